#include "serialize.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <stdexcept>

namespace qkdlab::io {

namespace {

json numbers(std::span<const double> xs)
{
    json out = json::array();
    for (double x : xs)
        out.push_back(number(x));
    return out;
}

template <class T, std::size_t N, std::size_t M>
json table(const std::array<std::array<T, M>, N>& t)
{
    json out = json::array();
    for (const auto& row : t) {
        json r = json::array();
        for (const T& x : row) {
            if constexpr (std::is_floating_point_v<T>)
                r.push_back(number(x));
            else
                r.push_back(x);
        }
        out.push_back(std::move(r));
    }
    return out;
}

json channel_json(const Channel& ch)
{
    if (std::holds_alternative<IdealChannel>(ch))
        return {{"kind", "ideal"}};
    if (const auto* d = std::get_if<DepolarizingChannel>(&ch))
        return {{"kind", "depolarizing"}, {"visibility", number(d->visibility)}};
    return {{"kind", "clone"}, {"params", to_json(std::get<CloningAttack>(ch).params)}};
}

json pair_json(const BasisPair& p)
{
    return json::array({p.alice, p.bob});
}

std::array<double, 4> weights_from(const json& j)
{
    if (!j.is_array() || j.size() != 4)
        throw std::invalid_argument("basis weights must be an array of 4 numbers");
    std::array<double, 4> w{};
    for (std::size_t k = 0; k < 4; ++k)
        w[k] = j.at(k).get<double>();
    return w;
}

json named_params(const PresetSpec& spec, const std::vector<double>& params)
{
    json out = json::object();
    for (std::size_t k = 0; k < params.size() && k < spec.param_names.size(); ++k)
        out[spec.param_names[k]] = number(params[k]);
    return out;
}

}  // namespace

json number(double x)
{
    if (!std::isfinite(x))
        return nullptr;
    if (x == 0.0)
        return 0.0;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", x);
    return std::strtod(buf, nullptr);
}

json complex_number(cplx z)
{
    return json::array({number(z.real()), number(z.imag())});
}

json to_json(const StateVector& psi)
{
    json out = json::array();
    for (Eigen::Index k = 0; k < psi.amps().size(); ++k)
        out.push_back(complex_number(psi.amps()(k)));
    return out;
}

json to_json(const AmplitudeMatrix& a)
{
    json rows = json::array();
    for (std::size_t m = 0; m < a.dim(); ++m) {
        json r = json::array();
        for (std::size_t n = 0; n < a.dim(); ++n)
            r.push_back(complex_number(a(m, n)));
        rows.push_back(std::move(r));
    }
    return {{"dim", a.dim()}, {"entries", std::move(rows)}};
}

json to_json(const ClonerParams& p)
{
    return {{"v", number(p.v)}, {"x", number(p.x)}, {"y", number(p.y)}, {"z", number(p.z)}};
}

json to_json(const FidelityFigures& f)
{
    return {{"F_A", number(f.F_A)},   {"D_A1", number(f.D_A1)}, {"D_A2", number(f.D_A2)},
            {"F_B", number(f.F_B)},   {"D_B1", number(f.D_B1)}, {"D_B2", number(f.D_B2)},
            {"closed_form_B", f.closed_form_B}};
}

json to_json(const InfoReport& r)
{
    return {{"fidelities", to_json(r.figures)}, {"I_AB", number(r.I_AB)},       {"I_AE", number(r.I_AE)},
            {"I_BE", number(r.I_BE)},          {"R_bound", number(r.R_bound)}, {"log_base", to_string(r.log_base)}};
}

json to_json(const CrossingResult& r)
{
    const PresetSpec& spec = preset_spec(r.preset);
    return {{"preset", spec.key},
            {"protocol", spec.protocol},
            {"log_base", to_string(r.log_base)},
            {"F_A_star", number(r.F_A_star)},
            {"error_rate", number(1.0 - r.F_A_star)},
            {"params", named_params(spec, r.params)},
            {"I_AB", number(r.I_AB)},
            {"I_AE", number(r.I_AE)},
            {"residual", number(r.residual)},
            {"iterations", r.iterations}};
}

json to_json(const SymmetricResult& r)
{
    const PresetSpec& spec = preset_spec(r.preset);
    return {{"preset", spec.key},      {"fidelity", number(r.fidelity)}, {"F_A", number(r.F_A)},
            {"F_B", number(r.F_B)},    {"params", named_params(spec, r.params)},
            {"iterations", r.iterations}};
}

json to_json(const Thresholds& t)
{
    return {{"bell_visibility", number(t.bell_visibility)},
            {"bell_fidelity", number(t.bell_fidelity)},
            {"qubit_fidelity", number(t.qubit_fidelity)},
            {"security_fidelity_3deb", number(t.security_fidelity_3deb)},
            {"kaszlikowski_visibility", number(t.kaszlikowski_visibility)},
            {"kaszlikowski_fidelity", number(t.kaszlikowski_fidelity)}};
}

json to_json(const std::vector<ErrorRateRow>& rows)
{
    json out = json::array();
    for (const ErrorRateRow& r : rows)
        out.push_back({{"preset", preset_spec(r.preset).key},
                       {"protocol", r.protocol},
                       {"f_a_star", number(r.F_A_star)},
                       {"error_rate", number(r.error_rate)},
                       {"paper_value", number(r.paper_value)},
                       {"delta", number(r.delta)}});
    return out;
}

json to_json(const SweepRow& row)
{
    return {{"F_A", number(row.F_A)},
            {"params", named_params(preset_spec(Preset::ThreeDEB), row.params)},
            {"report", to_json(row.report)}};
}

json bases_json()
{
    json out = json::array();
    const auto bases = optimal_bases();
    for (std::size_t i = 0; i < bases.size(); ++i) {
        json states = json::array(), conj = json::array();
        for (int l = 0; l < 3; ++l) {
            states.push_back(to_json(bases[i].state(l)));
            conj.push_back(to_json(bases[i].state(l).conj()));
        }
        json overlaps = json::array();
        for (std::size_t k = 0; k < bases.size(); ++k) {
            double worst = 0.0;
            for (int l = 0; l < 3; ++l)
                for (int m = 0; m < 3; ++m)
                    worst = std::max(worst, std::norm(bases[i].state(l).inner(bases[k].state(m))));
            overlaps.push_back(number(worst));
        }
        out.push_back({{"index", i},
                       {"phi", number(bases[i].phi)},
                       {"states", std::move(states)},
                       {"conjugate_states", std::move(conj)},
                       {"max_overlap_sq", std::move(overlaps)}});
    }
    return out;
}

json to_json(const SimConfig& c)
{
    json sifting;
    if (c.sifting.kind == SiftingRule::Kind::SameIndex) {
        sifting = {{"kind", "same_index"}};
    } else {
        json pairs = json::array();
        for (const BasisPair& p : c.sifting.pairs)
            pairs.push_back(pair_json(p));
        sifting = {{"kind", "paired"}, {"pairs", std::move(pairs)}};
    }
    return {{"rounds", c.rounds},
            {"seed", c.seed},
            {"channel", channel_json(c.channel)},
            {"alice_weights", numbers(c.alice_weights)},
            {"bob_weights", numbers(c.bob_weights)},
            {"sifting", std::move(sifting)},
            {"bob_basis", c.bob_basis == BobBasis::Conjugate ? "conjugate" : "plain"},
            {"log_base", to_string(c.log_base)}};
}

SimConfig sim_config_from_json(const json& j)
{
    if (!j.is_object())
        throw std::invalid_argument("simulation config must be a JSON object");
    SimConfig c;
    try {
        if (j.contains("rounds")) {
            if (!j["rounds"].is_number_integer() || j["rounds"].get<long long>() < 1)
                throw std::invalid_argument("rounds must be a positive integer");
            c.rounds = j["rounds"].get<std::uint64_t>();
        }
        if (j.contains("seed"))
            c.seed = j["seed"].get<std::uint64_t>();
        if (j.contains("channel")) {
            const json& ch = j["channel"];
            const std::string kind = ch.at("kind").get<std::string>();
            if (kind == "ideal") {
                c.channel = IdealChannel{};
            } else if (kind == "depolarizing") {
                c.channel = DepolarizingChannel{ch.at("visibility").get<double>()};
            } else if (kind == "clone") {
                const json& p = ch.at("params");
                c.channel = CloningAttack{ClonerParams{p.at("v").get<double>(), p.at("x").get<double>(),
                                                       p.at("y").get<double>(), p.value("z", p.at("y").get<double>())}};
            } else {
                throw std::invalid_argument("unknown channel kind '" + kind + "'");
            }
        }
        if (j.contains("alice_weights"))
            c.alice_weights = weights_from(j["alice_weights"]);
        if (j.contains("bob_weights"))
            c.bob_weights = weights_from(j["bob_weights"]);
        if (j.contains("sifting")) {
            const json& s = j["sifting"];
            const std::string kind = s.at("kind").get<std::string>();
            if (kind == "same_index") {
                c.sifting = SiftingRule::same_index();
            } else if (kind == "paired") {
                std::vector<BasisPair> pairs;
                for (const json& p : s.at("pairs"))
                    pairs.push_back({p.at(0).get<int>(), p.at(1).get<int>()});
                c.sifting = SiftingRule::paired(std::move(pairs));
            } else {
                throw std::invalid_argument("unknown sifting kind '" + kind + "'");
            }
        }
        if (j.contains("bob_basis")) {
            const std::string b = j["bob_basis"].get<std::string>();
            if (b == "conjugate")
                c.bob_basis = BobBasis::Conjugate;
            else if (b == "plain")
                c.bob_basis = BobBasis::Plain;
            else
                throw std::invalid_argument("bob_basis must be 'conjugate' or 'plain'");
        }
        if (j.contains("log_base")) {
            const auto base = parse_log_base(j["log_base"].get<std::string>());
            if (!base)
                throw std::invalid_argument("unknown log base");
            c.log_base = *base;
        }
        if (j.contains("threads"))
            c.threads = j["threads"].get<unsigned>();
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("malformed simulation config: ") + e.what());
    }
    return c;
}

AmplitudeMatrix amplitude_matrix_from_json(const json& j)
{
    try {
        const json& rows = j.is_object() ? j.at("entries") : j;
        const auto d = static_cast<Eigen::Index>(rows.size());
        if (d < 2)
            throw std::invalid_argument("amplitude matrix must be at least 2x2");
        CMatrix a(d, d);
        for (Eigen::Index m = 0; m < d; ++m) {
            const json& r = rows.at(static_cast<std::size_t>(m));
            if (static_cast<Eigen::Index>(r.size()) != d)
                throw std::invalid_argument("amplitude matrix must be square");
            for (Eigen::Index n = 0; n < d; ++n) {
                const json& z = r.at(static_cast<std::size_t>(n));
                a(m, n) = z.is_array() ? cplx(z.at(0).get<double>(), z.at(1).get<double>()) : cplx(z.get<double>(), 0.0);
            }
        }
        return AmplitudeMatrix(std::move(a));
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("malformed amplitude matrix: ") + e.what());
    }
}

json to_json(const SimResult& r)
{
    json pairs = json::array(), perms = json::array();
    for (std::size_t k = 0; k < r.accepted_pairs.size(); ++k) {
        pairs.push_back(pair_json(r.accepted_pairs[k]));
        perms.push_back(r.relabelings[k].perm);
    }
    json out = {{"rounds", r.rounds},
                {"sifted_count", r.sifted_count},
                {"sifted_errors", r.sifted_errors},
                {"qber", r.qber ? number(*r.qber) : json(nullptr)},
                {"qber_standard_error", r.qber ? number(r.qber_standard_error) : json(nullptr)},
                {"accepted_pairs", std::move(pairs)},
                {"relabelings", std::move(perms)},
                {"basis_pair_counts", table(r.basis_pair_counts)},
                {"basis_correlation_matrix", table(r.basis_correlation_matrix)},
                {"outcome_counts", r.outcome_counts},
                {"log_base", to_string(r.log_base)},
                {"threads_used", r.threads_used}};
    if (!r.eve_counts.empty()) {
        out["eve_counts"] = r.eve_counts;
        out["syndrome_counts"] = r.syndrome_counts;
    }
    out["empirical_I_AE"] = r.empirical_I_AE ? number(*r.empirical_I_AE) : json(nullptr);
    return out;
}

json to_json(const SurveyResult& s)
{
    json perfect = json::array();
    for (const BasisPair& p : s.perfect_pairs)
        perfect.push_back(pair_json(p));
    json perms = json::array();
    for (const auto& row : s.permutations) {
        json r = json::array();
        for (const auto& p : row)
            r.push_back(p);
        perms.push_back(std::move(r));
    }
    return {{"bob_basis", s.convention == BobBasis::Conjugate ? "conjugate" : "plain"},
            {"rounds", s.rounds},
            {"exact", table(s.exact)},
            {"empirical", table(s.empirical)},
            {"permutations", std::move(perms)},
            {"perfect_pairs", std::move(perfect)}};
}

json to_json(const Comparison& c)
{
    return {{"analytic_I_AE", number(c.analytic_I_AE)},
            {"empirical_I_AE", number(c.empirical_I_AE)},
            {"I_AE_standard_error", number(c.I_AE_standard_error)},
            {"I_AE_within", c.I_AE_within},
            {"analytic_qber", number(c.analytic_qber)},
            {"empirical_qber", number(c.empirical_qber)},
            {"qber_standard_error", number(c.qber_standard_error)},
            {"qber_within", c.qber_within},
            {"bootstrap_resamples", c.bootstrap_resamples},
            {"plugin_bias_bound", number(c.plugin_bias_bound)},
            {"session", to_json(c.session)}};
}

}  // namespace qkdlab::io
