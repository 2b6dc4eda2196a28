// qkdlab command-line front end. Talks to the library only through the C API.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qkdlab/qkdlab.h"

using nlohmann::json;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitNumerical = 2;

struct Failure {
    int code;
    std::string message;
};

int exit_code_for(qkd_status s)
{
    return s == QKD_ERR_NO_CROSSING || s == QKD_ERR_NOT_CONVERGED ? kExitNumerical : kExitUsage;
}

void check(qkd_status s)
{
    if (s != QKD_OK)
        throw Failure{exit_code_for(s), std::string(qkd_status_name(s)) + ": " + qkd_last_error()};
}

void usage_error(const std::string& message)
{
    throw Failure{kExitUsage, message};
}

json take_json(char* raw)
{
    std::unique_ptr<char, void (*)(char*)> guard(raw, qkd_string_free);
    return json::parse(raw);
}

template <class F>
json call_json(F&& f)
{
    char* raw = nullptr;
    check(f(&raw));
    return take_json(raw);
}

struct ClonerHandle {
    qkd_cloner* p = nullptr;
    ~ClonerHandle() { qkd_cloner_free(p); }
};

struct ConfigHandle {
    qkd_sim_config* p = nullptr;
    ~ConfigHandle() { qkd_sim_config_free(p); }
};

struct ResultHandle {
    qkd_sim_result* p = nullptr;
    ~ResultHandle() { qkd_sim_result_free(p); }
};

std::string utc_timestamp()
{
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> out;
    std::stringstream in(s);
    std::string item;
    while (std::getline(in, item, sep))
        out.push_back(item);
    return out;
}

double to_double(const std::string& s, const std::string& what)
{
    try {
        std::size_t used = 0;
        const double x = std::stod(s, &used);
        if (used != s.size())
            throw std::invalid_argument(s);
        return x;
    } catch (const std::exception&) {
        usage_error("cannot parse " + what + " value '" + s + "'");
    }
    return 0.0;
}

int to_int(const std::string& s, const std::string& what)
{
    const double x = to_double(s, what);
    if (x != std::floor(x))
        usage_error(what + " must be an integer");
    return static_cast<int>(x);
}

// Shortest round-trip formatting capped at 10 significant digits.
std::string fmt(double x)
{
    if (std::isnan(x))
        return "";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", x);
    return buf;
}

struct Globals {
    std::string output;
    std::string format = "json";
    std::string base = "2";
    bool no_timestamp = false;
};

class Emitter {
public:
    explicit Emitter(const Globals& g) : g_(g) {}

    void json_result(const std::string& command, const json& input, const json& result,
                     std::optional<std::uint64_t> seed = std::nullopt) const
    {
        json doc = {{"tool", "qkdlab"}, {"version", qkd_version()}, {"command", command}, {"input", input}};
        if (seed)
            doc["seed"] = *seed;
        if (!g_.no_timestamp)
            doc["timestamp"] = utc_timestamp();
        doc["result"] = result;
        write(doc.dump(2) + "\n");
    }

    void text(const std::string& body) const { write(body); }

    bool csv() const { return g_.format == "csv"; }

private:
    void write(const std::string& body) const
    {
        if (g_.output.empty() || g_.output == "-") {
            std::cout << body;
            std::cout.flush();
            return;
        }
        std::ofstream f(g_.output);
        if (!f)
            usage_error("cannot open output file '" + g_.output + "'");
        f << body;
    }

    const Globals& g_;
};

qkd_log_base parse_base(const std::string& text)
{
    qkd_log_base b{};
    if (qkd_parse_log_base(text.c_str(), &b) != QKD_OK)
        usage_error(std::string("unknown log base '") + text + "' (use 2, 3 or e)");
    return b;
}

qkd_preset parse_preset_or_fail(const std::string& key)
{
    qkd_preset p{};
    if (qkd_parse_preset(key.c_str(), &p) != QKD_OK)
        usage_error("unknown preset '" + key + "' (use 3deb, universal, 2mub or qubit)");
    return p;
}

void require_format(const Globals& g, std::initializer_list<const char*> allowed, const std::string& command)
{
    for (const char* f : allowed)
        if (g.format == f)
            return;
    usage_error("format '" + g.format + "' is not available for " + command);
}

// ---- simulate / survey -----------------------------------------------------

struct SimFlags {
    std::uint64_t rounds = 100000;
    std::uint64_t seed = 0;
    std::string channel = "ideal";
    std::string alice_weights;
    std::string bob_weights;
    std::string sifting = "same";
    std::string bob_basis = "conjugate";
    unsigned threads = 0;
    std::string config_path;
    std::string rounds_csv;
    bool compare = false;
    int resamples = 50;
    bool rounds_set = false;
    bool seed_set = false;
};

void apply_channel(qkd_sim_config* cfg, const std::string& spec)
{
    if (spec == "ideal") {
        check(qkd_sim_config_set_ideal(cfg));
        return;
    }
    const auto colon = spec.find(':');
    const std::string kind = spec.substr(0, colon);
    const std::string arg = colon == std::string::npos ? "" : spec.substr(colon + 1);
    if (kind == "depolarizing" || kind == "depol") {
        if (arg.empty())
            usage_error("depolarizing channel needs a visibility, e.g. depolarizing:0.7");
        check(qkd_sim_config_set_depolarizing(cfg, to_double(arg, "visibility")));
    } else if (kind == "clone") {
        ClonerHandle c;
        if (arg == "optimal" || arg.empty()) {
            check(qkd_cloner_create_published(&c.p));
        } else if (arg == "identity") {
            check(qkd_cloner_create(1, 0, 0, 0, 0, &c.p));
        } else {
            const auto parts = split(arg, ',');
            if (parts.size() != 3 && parts.size() != 4)
                usage_error("clone channel takes v,x,y or v,x,y,z");
            const double v = to_double(parts[0], "v"), x = to_double(parts[1], "x"), y = to_double(parts[2], "y");
            const double z = parts.size() == 4 ? to_double(parts[3], "z") : y;
            check(qkd_cloner_create(v, x, y, z, 1, &c.p));
        }
        check(qkd_sim_config_set_attack(cfg, c.p));
    } else {
        usage_error("unknown channel '" + spec + "' (use ideal, depolarizing:V, clone:optimal or clone:v,x,y)");
    }
}

void apply_weights(qkd_sim_config* cfg, int party, const std::string& spec)
{
    const auto parts = split(spec, ',');
    if (parts.size() != 4)
        usage_error("basis weights take four comma-separated numbers");
    double w[4];
    for (std::size_t k = 0; k < 4; ++k)
        w[k] = to_double(parts[k], "weight");
    check(qkd_sim_config_set_weights(cfg, party, w));
}

void apply_sifting(qkd_sim_config* cfg, const std::string& spec)
{
    if (spec == "same") {
        check(qkd_sim_config_set_same_index(cfg));
        return;
    }
    if (spec.rfind("pairs:", 0) != 0)
        usage_error("sifting must be 'same' or 'pairs:i-j,i-j,...'");
    std::vector<int> a, b;
    for (const std::string& item : split(spec.substr(6), ',')) {
        const auto dash = item.find('-');
        if (dash == std::string::npos)
            usage_error("sifting pair '" + item + "' must look like i-j");
        a.push_back(to_int(item.substr(0, dash), "basis index"));
        b.push_back(to_int(item.substr(dash + 1), "basis index"));
    }
    check(qkd_sim_config_set_pairs(cfg, a.data(), b.data(), a.size()));
}

ConfigHandle build_config(const SimFlags& f, const Globals& g)
{
    ConfigHandle cfg;
    if (!f.config_path.empty()) {
        std::ifstream in(f.config_path);
        if (!in)
            usage_error("cannot read config file '" + f.config_path + "'");
        std::stringstream ss;
        ss << in.rdbuf();
        check(qkd_sim_config_from_json(ss.str().c_str(), &cfg.p));
    } else {
        check(qkd_sim_config_create(&cfg.p));
        apply_channel(cfg.p, f.channel);
        if (!f.alice_weights.empty())
            apply_weights(cfg.p, 0, f.alice_weights);
        if (!f.bob_weights.empty())
            apply_weights(cfg.p, 1, f.bob_weights);
        apply_sifting(cfg.p, f.sifting);
        if (f.bob_basis != "conjugate" && f.bob_basis != "plain")
            usage_error("bob basis must be 'conjugate' or 'plain'");
        check(qkd_sim_config_set_bob_conjugate(cfg.p, f.bob_basis == "conjugate"));
        check(qkd_sim_config_set_log_base(cfg.p, parse_base(g.base)));
    }
    if (f.config_path.empty() || f.rounds_set) {
        if (f.rounds < 1)
            usage_error("--rounds must be at least 1");
        check(qkd_sim_config_set_rounds(cfg.p, f.rounds));
    }
    if (f.config_path.empty() || f.seed_set)
        check(qkd_sim_config_set_seed(cfg.p, f.seed));
    if (f.threads > 0)
        check(qkd_sim_config_set_threads(cfg.p, f.threads));
    return cfg;
}

void add_sim_flags(CLI::App* cmd, SimFlags& f, bool full)
{
    cmd->add_option("--rounds", f.rounds, "number of protocol rounds")->each([&f](const std::string&) { f.rounds_set = true; });
    cmd->add_option("--seed", f.seed, "64-bit seed")->each([&f](const std::string&) { f.seed_set = true; });
    cmd->add_option("--bob-basis", f.bob_basis, "conjugate | plain");
    cmd->add_option("--threads", f.threads, "worker threads (0: automatic)");
    cmd->add_option("--alice-weights", f.alice_weights, "w0,w1,w2,w3");
    cmd->add_option("--bob-weights", f.bob_weights, "w0,w1,w2,w3");
    if (!full)
        return;
    cmd->add_option("--channel", f.channel, "ideal | depolarizing:V | clone:optimal | clone:identity | clone:v,x,y[,z]");
    cmd->add_option("--sifting", f.sifting, "same | pairs:i-j,...");
    cmd->add_option("--config", f.config_path, "simulation config JSON file");
    cmd->add_option("--rounds-csv", f.rounds_csv, "also write round,basis_i,basis_j,a,b rows to this file");
    cmd->add_flag("--compare", f.compare, "compare empirical and analytic Eve information (cloning attack)");
    cmd->add_option("--resamples", f.resamples, "bootstrap resamples for --compare");
}

// ---- commands ---------------------------------------------------------------

void run_bases(const Emitter& out, const Globals& g)
{
    require_format(g, {"json"}, "bases");
    out.json_result("bases", json::object(), call_json([](char** s) { return qkd_bases_json(s); }));
}

struct ClonerFlags {
    double v = 1.0, x = 0.0, y = 0.0;
    std::optional<double> z;
    bool normalize = false;
    bool published = false;
};

void run_cloner_eval(const Emitter& out, const Globals& g, const ClonerFlags& f)
{
    require_format(g, {"json"}, "cloner-eval");
    const qkd_log_base base = parse_base(g.base);
    ClonerHandle c;
    json input = {{"base", g.base}};
    if (f.published) {
        check(qkd_cloner_create_published(&c.p));
        input["published"] = true;
    } else {
        const double z = f.z.value_or(f.y);
        check(qkd_cloner_create(f.v, f.x, f.y, z, f.normalize ? 1 : 0, &c.p));
        input.update({{"v", f.v}, {"x", f.x}, {"y", f.y}, {"z", z}, {"normalize", f.normalize}});
    }
    out.json_result("cloner-eval", input, call_json([&](char** s) { return qkd_cloner_report_json(c.p, base, s); }));
}

void run_crossing(const Emitter& out, const Globals& g, const std::string& preset)
{
    require_format(g, {"json"}, "crossing");
    const qkd_preset p = parse_preset_or_fail(preset);
    const qkd_log_base base = parse_base(g.base);
    out.json_result("crossing", {{"preset", preset}, {"base", g.base}},
                    call_json([&](char** s) { return qkd_crossing_json(p, base, s); }));
}

void run_symmetric(const Emitter& out, const Globals& g, const std::string& preset)
{
    require_format(g, {"json"}, "symmetric");
    const qkd_preset p = parse_preset_or_fail(preset);
    out.json_result("symmetric", {{"preset", preset}}, call_json([&](char** s) { return qkd_symmetric_json(p, s); }));
}

void run_thresholds(const Emitter& out, const Globals& g)
{
    require_format(g, {"json"}, "thresholds");
    out.json_result("thresholds", json::object(), call_json([](char** s) { return qkd_thresholds_json(s); }));
}

void run_table(const Emitter& out, const Globals& g)
{
    require_format(g, {"json", "csv"}, "table");
    const qkd_log_base base = parse_base(g.base);
    if (!out.csv()) {
        out.json_result("table", {{"base", g.base}},
                        call_json([&](char** s) { return qkd_error_rate_table_json(base, s); }));
        return;
    }
    qkd_table_row rows[4];
    std::size_t n = 0;
    check(qkd_error_rate_table(base, rows, 4, &n));
    std::ostringstream csv;
    csv << "protocol,f_a_star,error_rate,paper_value,delta\n";
    for (std::size_t k = 0; k < n; ++k)
        csv << rows[k].protocol << ',' << fmt(rows[k].F_A_star) << ',' << fmt(rows[k].error_rate) << ','
            << fmt(rows[k].paper_value) << ',' << fmt(rows[k].delta) << '\n';
    out.text(csv.str());
}

struct SweepFlags {
    double from = 0.70;
    double to = 0.85;
    int points = 151;
};

void run_sweep(const Emitter& out, const Globals& g, const SweepFlags& f)
{
    require_format(g, {"json", "csv"}, "sweep");
    const qkd_log_base base = parse_base(g.base);
    if (f.points < 1)
        usage_error("sweep grid is empty (--points must be at least 1)");
    if (!(f.from <= f.to))
        usage_error("sweep needs --from <= --to");
    if (f.points == 1 && f.from != f.to)
        usage_error("a single-point sweep needs --from equal to --to");
    if (!(f.from >= 1.0 / 3.0 && f.to <= 1.0))
        usage_error("sweep fidelities must lie in [1/3, 1]");

    std::vector<qkd_sweep_row> rows(static_cast<std::size_t>(f.points));
    for (int k = 0; k < f.points; ++k) {
        const double F = f.points == 1 ? f.from : f.from + (f.to - f.from) * k / (f.points - 1);
        check(qkd_sweep_point(F, base, &rows[static_cast<std::size_t>(k)]));
    }

    if (out.csv()) {
        std::ostringstream csv;
        csv << "index,f_a,v,x,y,f_b,i_ab,i_ae,i_be,r_bound\n";
        for (std::size_t k = 0; k < rows.size(); ++k) {
            const qkd_sweep_row& r = rows[k];
            csv << k << ',' << fmt(r.F_A) << ',' << fmt(r.params[0]) << ',' << fmt(r.params[1]) << ','
                << fmt(r.params[2]) << ',' << fmt(r.F_B) << ',' << fmt(r.I_AB) << ',' << fmt(r.I_AE) << ','
                << fmt(r.I_BE) << ',' << fmt(r.R_bound) << '\n';
        }
        out.text(csv.str());
        return;
    }
    json arr = json::array();
    for (std::size_t k = 0; k < rows.size(); ++k) {
        const qkd_sweep_row& r = rows[k];
        auto num = [](double x) { return json::parse(fmt(x)); };
        arr.push_back({{"index", k},
                       {"F_A", num(r.F_A)},
                       {"params", {{"v", num(r.params[0])}, {"x", num(r.params[1])}, {"y", num(r.params[2])}}},
                       {"F_B", num(r.F_B)},
                       {"I_AB", num(r.I_AB)},
                       {"I_AE", num(r.I_AE)},
                       {"I_BE", num(r.I_BE)},
                       {"R_bound", num(r.R_bound)}});
    }
    out.json_result("sweep", {{"from", f.from}, {"to", f.to}, {"points", f.points}, {"base", g.base}}, arr);
}

void run_simulate(const Emitter& out, const Globals& g, const SimFlags& f)
{
    require_format(g, {"json"}, "simulate");
    if (f.resamples < 2)
        usage_error("--resamples must be at least 2");
    ConfigHandle cfg = build_config(f, g);
    const json input = call_json([&](char** s) { return qkd_sim_config_to_json(cfg.p, s); });
    if (!f.rounds_csv.empty())
        check(qkd_write_rounds_csv(cfg.p, f.rounds_csv.c_str()));

    json result;
    if (f.compare) {
        result = call_json([&](char** s) { return qkd_compare_json(cfg.p, f.resamples, s); });
    } else {
        ResultHandle r;
        check(qkd_simulate(cfg.p, &r.p));
        result = call_json([&](char** s) { return qkd_sim_result_json(r.p, s); });
    }
    // Thread count is an execution detail; keep the document thread-independent.
    if (result.contains("threads_used"))
        result.erase("threads_used");
    if (result.contains("session"))
        result["session"].erase("threads_used");
    out.json_result("simulate", input, result, input.at("seed").get<std::uint64_t>());
}

void run_survey(const Emitter& out, const Globals& g, const SimFlags& f)
{
    require_format(g, {"json"}, "survey");
    ConfigHandle cfg = build_config(f, g);
    const json input = call_json([&](char** s) { return qkd_sim_config_to_json(cfg.p, s); });
    out.json_result("survey", input, call_json([&](char** s) { return qkd_survey_json(cfg.p, s); }),
                    input.at("seed").get<std::uint64_t>());
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"qkdlab: security analysis of the entanglement-based qutrit QKD protocol"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(qkd_version()));

    Globals g;
    app.add_option("-o,--output", g.output, "write to this file instead of stdout");
    app.add_option("--format", g.format, "json | csv")->check(CLI::IsMember({"json", "csv"}));
    app.add_option("--base", g.base, "logarithm base: 2, 3 or e");
    app.add_flag("--no-timestamp", g.no_timestamp, "omit the timestamp field");

    auto* bases = app.add_subcommand("bases", "the four optimal phi-bases and their conjugates");

    ClonerFlags cf;
    auto* cloner = app.add_subcommand("cloner-eval", "fidelities and information for a phase-covariant cloner");
    cloner->add_option("--v", cf.v, "amplitude of the identity term");
    cloner->add_option("--x", cf.x, "phase-error amplitude");
    cloner->add_option("--y", cf.y, "shift-error amplitude");
    cloner->add_option("--z", cf.z, "defaults to y");
    cloner->add_flag("--normalize", cf.normalize, "rescale to unit norm");
    cloner->add_flag("--published", cf.published, "use the rounded published optimum");

    std::string crossing_preset = "3deb", symmetric_preset = "3deb";
    auto* crossing = app.add_subcommand("crossing", "information crossing point of a preset");
    crossing->add_option("--preset", crossing_preset, "3deb | universal | 2mub | qubit");
    auto* symmetric = app.add_subcommand("symmetric", "largest symmetric fidelity F_A = F_B of a preset");
    symmetric->add_option("--preset", symmetric_preset, "3deb | universal | 2mub | qubit");

    auto* thresh = app.add_subcommand("thresholds", "Bell-violation and security threshold constants");
    auto* table = app.add_subcommand("table", "acceptable error rates of the four protocols");

    SweepFlags sf;
    auto* sweep = app.add_subcommand("sweep", "Eve-optimal cloner along a grid of Bob fidelities");
    sweep->add_option("--from", sf.from, "first Bob fidelity (default 0.70)");
    sweep->add_option("--to", sf.to, "last Bob fidelity (default 0.85)");
    sweep->add_option("--points", sf.points, "grid points (default 151)");

    SimFlags sim_flags, survey_flags;
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo protocol session");
    add_sim_flags(simulate, sim_flags, true);
    auto* survey = app.add_subcommand("survey", "relabeled agreement for every basis pair (ideal source)");
    add_sim_flags(survey, survey_flags, false);

    for (CLI::App* sub : {bases, cloner, crossing, symmetric, thresh, table, sweep, simulate, survey})
        sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    const Emitter out(g);
    try {
        if (*bases)
            run_bases(out, g);
        else if (*cloner)
            run_cloner_eval(out, g, cf);
        else if (*crossing)
            run_crossing(out, g, crossing_preset);
        else if (*symmetric)
            run_symmetric(out, g, symmetric_preset);
        else if (*thresh)
            run_thresholds(out, g);
        else if (*table)
            run_table(out, g);
        else if (*sweep)
            run_sweep(out, g, sf);
        else if (*simulate)
            run_simulate(out, g, sim_flags);
        else if (*survey)
            run_survey(out, g, survey_flags);
    } catch (const Failure& f) {
        std::cerr << "qkdlab: " << f.message << '\n';
        return f.code;
    } catch (const std::exception& e) {
        std::cerr << "qkdlab: " << e.what() << '\n';
        return kExitUsage;
    }
    return 0;
}
