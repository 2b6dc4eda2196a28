#include "qkdlab/protocol_sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>

namespace qkdlab {

namespace {

constexpr double kTableTol = 1e-12;

// SplitMix64 seeded from (seed, round): a counter-based stream per round.
class RoundStream {
public:
    RoundStream(std::uint64_t seed, std::uint64_t round) : state_(mix(seed ^ mix(round + 0x632BE59BD9B4E019ull))) {}

    double uniform()
    {
        state_ += 0x9E3779B97F4A7C15ull;
        return static_cast<double>(mix(state_) >> 11) * 0x1.0p-53;
    }

private:
    static std::uint64_t mix(std::uint64_t z)
    {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    std::uint64_t state_;
};

std::size_t sample_cdf(const std::vector<double>& cdf, double u)
{
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    // Trailing zero-probability cells share the final cdf value; clamp to the
    // last cell with mass.
    std::size_t i = static_cast<std::size_t>(it - cdf.begin());
    if (i >= cdf.size())
        i = cdf.size() - 1;
    while (i > 0 && cdf[i] == cdf[i - 1])
        --i;
    return i;
}

std::vector<double> cumulative(std::span<const double> p)
{
    std::vector<double> cdf(p.size());
    std::partial_sum(p.begin(), p.end(), cdf.begin());
    const double total = cdf.back();
    for (double& c : cdf)
        c /= total;
    cdf.back() = 1.0;
    return cdf;
}

void check_basis_index(int i, const char* who)
{
    if (i < 0 || i > 3)
        throw std::out_of_range(std::string(who) + " basis index must lie in [0, 3]");
}

CMatrix bob_columns(int j, BobBasis convention)
{
    return BasisSpec(optimal_bases()[static_cast<std::size_t>(j)].phi, convention == BobBasis::Conjugate).columns();
}

void validate_channel(const Channel& channel)
{
    if (const auto* d = std::get_if<DepolarizingChannel>(&channel)) {
        if (!(d->visibility >= 0.0 && d->visibility <= 1.0))
            throw std::invalid_argument("visibility must lie in [0, 1]");
    } else if (const auto* c = std::get_if<CloningAttack>(&channel)) {
        if (std::abs(c->params.norm_squared() - 1.0) > 1e-6)
            throw std::invalid_argument("cloner parameters must satisfy v^2 + 2x^2 + 3y^2 + 3z^2 = 1");
    }
}

void validate_weights(const std::array<double, 4>& w, const char* who)
{
    double total = 0.0;
    for (double x : w) {
        if (!(x >= 0.0))
            throw std::invalid_argument(std::string(who) + " basis weights must be nonnegative");
        total += x;
    }
    if (std::abs(total - 1.0) > 1e-12)
        throw std::invalid_argument(std::string(who) + " basis weights must sum to 1");
}

constexpr std::array<std::array<int, 3>, 6> kPermutations{
    {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};

Relabeling best_from_table(const RoundTable& t)
{
    Relabeling best;
    best.agreement = -1.0;
    for (const auto& perm : kPermutations) {
        double s = 0.0;
        for (int a = 0; a < 3; ++a)
            s += t.alice_bob(a, perm[static_cast<std::size_t>(a)]);
        if (s > best.agreement + 1e-15) {
            best.agreement = s;
            best.perm = perm;
        }
    }
    return best;
}

struct Tables {
    bool has_eve = false;
    std::array<std::vector<double>, 16> cdf;
    std::array<double, 4> alice_cdf{};
    std::array<double, 4> bob_cdf{};
};

Tables build_tables(const SimConfig& config)
{
    Tables t;
    t.has_eve = std::holds_alternative<CloningAttack>(config.channel);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            t.cdf[static_cast<std::size_t>(i * 4 + j)] =
                cumulative(round_distribution(config.channel, i, j, config.bob_basis).p);
    std::partial_sum(config.alice_weights.begin(), config.alice_weights.end(), t.alice_cdf.begin());
    std::partial_sum(config.bob_weights.begin(), config.bob_weights.end(), t.bob_cdf.begin());
    return t;
}

int pick_basis(const std::array<double, 4>& cdf, const std::array<double, 4>& weights, double u)
{
    for (int k = 0; k < 4; ++k)
        if (u < cdf[static_cast<std::size_t>(k)] && weights[static_cast<std::size_t>(k)] > 0.0)
            return k;
    for (int k = 3; k >= 0; --k)
        if (weights[static_cast<std::size_t>(k)] > 0.0)
            return k;
    return 3;
}

struct RoundOutcome {
    int i, j, a, b, eB, eC;
};

RoundOutcome sample_round(const SimConfig& config, const Tables& t, std::uint64_t round)
{
    RoundStream rng(config.seed, round);
    RoundOutcome r{};
    r.i = pick_basis(t.alice_cdf, config.alice_weights, rng.uniform());
    r.j = pick_basis(t.bob_cdf, config.bob_weights, rng.uniform());
    const std::size_t cell = sample_cdf(t.cdf[static_cast<std::size_t>(r.i * 4 + r.j)], rng.uniform());
    if (t.has_eve) {
        r.a = static_cast<int>(cell / 27);
        r.b = static_cast<int>(cell / 9 % 3);
        r.eB = static_cast<int>(cell / 3 % 3);
        r.eC = static_cast<int>(cell % 3);
    } else {
        r.a = static_cast<int>(cell / 3);
        r.b = static_cast<int>(cell % 3);
        r.eB = r.eC = 0;
    }
    return r;
}

struct Accumulator {
    std::vector<std::uint64_t> outcomes = std::vector<std::uint64_t>(144, 0);
    std::vector<std::uint64_t> eve;
    std::array<std::uint64_t, 9> syndrome{};

    void merge(const Accumulator& o)
    {
        for (std::size_t k = 0; k < outcomes.size(); ++k)
            outcomes[k] += o.outcomes[k];
        for (std::size_t k = 0; k < eve.size(); ++k)
            eve[k] += o.eve[k];
        for (std::size_t k = 0; k < syndrome.size(); ++k)
            syndrome[k] += o.syndrome[k];
    }
};

std::size_t mod3(int k)
{
    return static_cast<std::size_t>(((k % 3) + 3) % 3);
}

}  // namespace

std::vector<BasisPair> SiftingRule::accepted_pairs() const
{
    if (kind == Kind::SameIndex)
        return {{0, 0}, {1, 1}, {2, 2}, {3, 3}};
    if (pairs.empty())
        throw std::invalid_argument("paired sifting needs at least one accepted pair");
    for (const BasisPair& p : pairs) {
        check_basis_index(p.alice, "alice");
        check_basis_index(p.bob, "bob");
    }
    for (std::size_t k = 0; k < pairs.size(); ++k)
        for (std::size_t l = k + 1; l < pairs.size(); ++l)
            if (pairs[k] == pairs[l])
                throw std::invalid_argument("duplicate accepted basis pair");
    return pairs;
}

void SimConfig::validate() const
{
    if (rounds < 1)
        throw std::invalid_argument("rounds must be at least 1");
    validate_weights(alice_weights, "alice");
    validate_weights(bob_weights, "bob");
    validate_channel(channel);
    (void)sifting.accepted_pairs();
}

double RoundTable::alice_bob(int a, int b) const
{
    if (!has_eve)
        return p[static_cast<std::size_t>(a * 3 + b)];
    double s = 0.0;
    for (int e = 0; e < 9; ++e)
        s += p[static_cast<std::size_t>(a * 27 + b * 9 + e)];
    return s;
}

RoundTable round_distribution(const Channel& channel, int alice_basis, int bob_basis, BobBasis convention)
{
    check_basis_index(alice_basis, "alice");
    check_basis_index(bob_basis, "bob");
    validate_channel(channel);

    const BasisSpec alice = optimal_bases()[static_cast<std::size_t>(alice_basis)];
    const CMatrix bob = bob_columns(bob_basis, convention);
    RoundTable t;

    if (const auto* attack = std::get_if<CloningAttack>(&channel)) {
        // Alice's outcome a leaves Bob's qutrit in the conjugate of |a_phi>.
        t.has_eve = true;
        t.p.assign(81, 0.0);
        const AmplitudeMatrix amp = phi_cloner_matrix(attack->params, true);
        const CMatrix eve_c = bob.conjugate();
        for (int a = 0; a < 3; ++a) {
            const StateVector joint = clone_joint(amp, alice.state(a).conj());
            const std::vector<double> probs = product_basis_probabilities(joint, bob, bob, eve_c);
            for (std::size_t k = 0; k < 27; ++k)
                t.p[static_cast<std::size_t>(a) * 27 + k] = probs[k] / 3.0;
        }
    } else {
        t.p.assign(9, 0.0);
        const StateVector source = max_entangled(3);
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) {
                const StateVector proj = kron(alice.state(a), StateVector(CVector(bob.col(b))));
                t.p[static_cast<std::size_t>(a * 3 + b)] = std::norm(proj.inner(source));
            }
        if (const auto* d = std::get_if<DepolarizingChannel>(&channel))
            for (double& x : t.p)
                x = d->visibility * x + (1.0 - d->visibility) / 9.0;
    }

    const double total = std::accumulate(t.p.begin(), t.p.end(), 0.0);
    if (std::abs(total - 1.0) > kTableTol)
        throw std::logic_error("round table does not sum to 1");
    return t;
}

Relabeling best_relabeling(int alice_basis, int bob_basis, BobBasis convention)
{
    return best_from_table(round_distribution(IdealChannel{}, alice_basis, bob_basis, convention));
}

unsigned default_thread_count()
{
    unsigned n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("QKDLAB_THREADS")) {
        char* end = nullptr;
        const long cap = std::strtol(env, &end, 10);
        if (end != env && cap >= 1)
            n = std::min(n, static_cast<unsigned>(cap));
    }
    return n;
}

double plugin_eve_information(const std::vector<std::uint64_t>& eve_counts, std::size_t pairs, LogBase base)
{
    const std::size_t cols = pairs * 9;
    if (eve_counts.size() != pairs * 27)
        throw std::invalid_argument("eve counts do not match the pair count");
    const double n = static_cast<double>(std::accumulate(eve_counts.begin(), eve_counts.end(), std::uint64_t{0}));
    if (n == 0.0)
        throw std::invalid_argument("no sifted rounds to estimate Eve's information from");
    // Rows: Alice's trit; columns: (pair, eB, eC).
    std::vector<double> joint(3 * cols, 0.0);
    for (std::size_t p = 0; p < pairs; ++p)
        for (std::size_t a = 0; a < 3; ++a)
            for (std::size_t e = 0; e < 9; ++e)
                joint[a * cols + p * 9 + e] = static_cast<double>(eve_counts[(p * 3 + a) * 9 + e]) / n;
    return mutual_information(joint, 3, cols, base);
}

SimResult run_session(const SimConfig& config)
{
    config.validate();
    const Tables tables = build_tables(config);
    const std::vector<BasisPair> accepted = config.sifting.accepted_pairs();

    std::array<int, 16> pair_slot;
    pair_slot.fill(-1);
    for (std::size_t k = 0; k < accepted.size(); ++k)
        pair_slot[static_cast<std::size_t>(accepted[k].alice * 4 + accepted[k].bob)] = static_cast<int>(k);
    std::vector<Relabeling> relabel;
    for (const BasisPair& p : accepted)
        relabel.push_back(best_relabeling(p.alice, p.bob, config.bob_basis));

    const unsigned requested = config.threads == 0 ? default_thread_count() : config.threads;
    const auto workers = static_cast<unsigned>(std::clamp<std::uint64_t>(config.rounds / 4096 + 1, 1, requested));

    auto work = [&](std::uint64_t begin, std::uint64_t end, Accumulator& acc) {
        if (tables.has_eve)
            acc.eve.assign(accepted.size() * 27, 0);
        for (std::uint64_t r = begin; r < end; ++r) {
            const RoundOutcome o = sample_round(config, tables, r);
            ++acc.outcomes[static_cast<std::size_t>(((o.i * 4 + o.j) * 3 + o.a) * 3 + o.b)];
            const int slot = pair_slot[static_cast<std::size_t>(o.i * 4 + o.j)];
            if (!tables.has_eve || slot < 0)
                continue;
            ++acc.eve[static_cast<std::size_t>(((slot * 3 + o.a) * 3 + o.eB) * 3 + o.eC)];
            const int expected = relabel[static_cast<std::size_t>(slot)].perm[static_cast<std::size_t>(o.a)];
            ++acc.syndrome[mod3(o.eC - o.eB) * 3 + mod3(o.b - expected)];
        }
    };

    std::vector<Accumulator> partial(workers);
    if (workers == 1) {
        work(0, config.rounds, partial[0]);
    } else {
        std::vector<std::thread> pool;
        const std::uint64_t chunk = (config.rounds + workers - 1) / workers;
        for (unsigned w = 0; w < workers; ++w) {
            const std::uint64_t begin = std::min<std::uint64_t>(config.rounds, w * chunk);
            const std::uint64_t end = std::min<std::uint64_t>(config.rounds, begin + chunk);
            pool.emplace_back(work, begin, end, std::ref(partial[w]));
        }
        for (std::thread& th : pool)
            th.join();
    }
    Accumulator total = std::move(partial[0]);
    for (unsigned w = 1; w < workers; ++w)
        total.merge(partial[w]);

    SimResult res;
    res.rounds = config.rounds;
    res.accepted_pairs = accepted;
    res.relabelings = relabel;
    res.outcome_counts = std::move(total.outcomes);
    res.log_base = config.log_base;
    res.threads_used = workers;

    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            std::uint64_t n = 0, agree = 0;
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b) {
                    const std::uint64_t c = res.outcome_counts[static_cast<std::size_t>(((i * 4 + j) * 3 + a) * 3 + b)];
                    n += c;
                    if (a == b)
                        agree += c;
                }
            res.basis_pair_counts[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = n;
            res.basis_correlation_matrix[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                n == 0 ? std::numeric_limits<double>::quiet_NaN() : static_cast<double>(agree) / static_cast<double>(n);
        }

    for (std::size_t k = 0; k < accepted.size(); ++k) {
        const BasisPair p = accepted[k];
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) {
                const std::uint64_t c =
                    res.outcome_counts[static_cast<std::size_t>(((p.alice * 4 + p.bob) * 3 + a) * 3 + b)];
                res.sifted_count += c;
                if (b != relabel[k].perm[static_cast<std::size_t>(a)])
                    res.sifted_errors += c;
            }
    }
    if (res.sifted_count > 0) {
        const double n = static_cast<double>(res.sifted_count);
        const double q = static_cast<double>(res.sifted_errors) / n;
        res.qber = q;
        res.qber_standard_error = std::sqrt(q * (1.0 - q) / n);
    }
    if (tables.has_eve) {
        res.eve_counts = std::move(total.eve);
        res.syndrome_counts = total.syndrome;
        if (res.sifted_count > 0)
            res.empirical_I_AE = plugin_eve_information(res.eve_counts, accepted.size(), config.log_base);
    }
    return res;
}

void write_rounds_csv(const SimConfig& config, std::ostream& out)
{
    config.validate();
    const Tables tables = build_tables(config);
    out << "round,basis_i,basis_j,a,b\n";
    for (std::uint64_t r = 0; r < config.rounds; ++r) {
        const RoundOutcome o = sample_round(config, tables, r);
        out << r << ',' << o.i << ',' << o.j << ',' << o.a << ',' << o.b << '\n';
    }
}

SurveyResult basis_correlation_survey(const SimConfig& config)
{
    if (!std::holds_alternative<IdealChannel>(config.channel))
        throw std::invalid_argument("the basis correlation survey needs the ideal channel");
    SimConfig cfg = config;
    cfg.sifting = SiftingRule::same_index();
    const SimResult session = run_session(cfg);

    SurveyResult s;
    s.convention = config.bob_basis;
    s.rounds = config.rounds;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            const auto ui = static_cast<std::size_t>(i), uj = static_cast<std::size_t>(j);
            const Relabeling r = best_relabeling(i, j, config.bob_basis);
            s.exact[ui][uj] = r.agreement;
            s.permutations[ui][uj] = r.perm;
            if (std::abs(r.agreement - 1.0) <= 1e-12)
                s.perfect_pairs.push_back({i, j});

            const std::uint64_t n = session.basis_pair_counts[ui][uj];
            double best = std::numeric_limits<double>::quiet_NaN();
            if (n > 0) {
                best = 0.0;
                for (const auto& perm : kPermutations) {
                    std::uint64_t agree = 0;
                    for (int a = 0; a < 3; ++a)
                        agree += session.outcome_counts[static_cast<std::size_t>(
                            ((i * 4 + j) * 3 + a) * 3 + perm[static_cast<std::size_t>(a)])];
                    best = std::max(best, static_cast<double>(agree) / static_cast<double>(n));
                }
            }
            s.empirical[ui][uj] = best;
        }
    return s;
}

Comparison empirical_vs_analytic(const SimConfig& config, int resamples)
{
    const auto* attack = std::get_if<CloningAttack>(&config.channel);
    if (attack == nullptr)
        throw std::invalid_argument("empirical_vs_analytic needs a cloning attack channel");
    if (std::abs(attack->params.y - attack->params.z) > 1e-10)
        throw std::invalid_argument("empirical_vs_analytic needs a phase-covariant cloner (y = z)");
    if (config.sifting.kind != SiftingRule::Kind::SameIndex || config.bob_basis != BobBasis::Conjugate)
        throw std::invalid_argument("empirical_vs_analytic needs same-index sifting and the conjugate convention");
    if (config.rounds < 100'000)
        throw std::invalid_argument("empirical_vs_analytic needs at least 100000 rounds");
    if (resamples < 2)
        throw std::invalid_argument("at least two bootstrap resamples are needed");

    Comparison c;
    c.session = run_session(config);
    if (c.session.sifted_count == 0)
        throw std::runtime_error("no sifted rounds");
    const ClonerParams params = attack->params.normalized();
    c.analytic_I_AE = eve_information(params, config.log_base);
    c.analytic_qber = 1.0 - closed_form_report(params).F_A;
    c.empirical_I_AE = *c.session.empirical_I_AE;
    c.empirical_qber = *c.session.qber;
    c.qber_standard_error = c.session.qber_standard_error;
    c.bootstrap_resamples = resamples;

    const std::size_t pairs = c.session.accepted_pairs.size();
    const auto n = c.session.sifted_count;
    std::vector<double> weights(c.session.eve_counts.begin(), c.session.eve_counts.end());
    std::discrete_distribution<std::size_t> cell(weights.begin(), weights.end());
    std::mt19937_64 rng(config.seed ^ 0xB0075712A9ull);
    std::vector<double> estimates;
    std::vector<std::uint64_t> counts(weights.size());
    for (int r = 0; r < resamples; ++r) {
        std::fill(counts.begin(), counts.end(), 0);
        for (std::uint64_t k = 0; k < n; ++k)
            ++counts[cell(rng)];
        estimates.push_back(plugin_eve_information(counts, pairs, config.log_base));
    }
    const double mean = std::accumulate(estimates.begin(), estimates.end(), 0.0) / resamples;
    double var = 0.0;
    for (double e : estimates)
        var += (e - mean) * (e - mean);
    c.I_AE_standard_error = std::sqrt(var / (resamples - 1));

    const double cols = static_cast<double>(pairs * 9);
    // Miller-Madow: the plug-in estimate is biased upward by about
    // (rows - 1)(cols - 1) / (2 n) nats under independence.
    c.plugin_bias_bound = 2.0 * (cols - 1.0) / (2.0 * static_cast<double>(n)) * log_in(std::exp(1.0), config.log_base);
    c.I_AE_within = std::abs(c.empirical_I_AE - c.analytic_I_AE) <= 3.0 * c.I_AE_standard_error;
    c.qber_within = std::abs(c.empirical_qber - c.analytic_qber) <= 3.0 * c.qber_standard_error;
    return c;
}

}  // namespace qkdlab
