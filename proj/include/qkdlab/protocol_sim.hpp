#pragma once

// Monte Carlo sessions of the entanglement-based qutrit protocol. Each round
// draws Alice's and Bob's bases among the four optimal phi-bases and samples
// the outcomes from the exact per-round distribution (9 or 81 entries), so
// the only randomness is the sampling itself.
//
// Every round owns a counter-based random stream keyed by (seed, round
// index); results are identical for any thread count.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <variant>
#include <vector>

#include "qkdlab/cloner.hpp"
#include "qkdlab/information.hpp"

namespace qkdlab {

struct IdealChannel {};

/// V * |phi_3+><phi_3+| + (1 - V) * I/9.
struct DepolarizingChannel {
    double visibility = 1.0;
};

/// Eve clones Bob's qutrit, forwards clone A, keeps B and the ancilla C,
/// and measures B in Bob's basis and C in its conjugate.
struct CloningAttack {
    ClonerParams params;
};

using Channel = std::variant<IdealChannel, DepolarizingChannel, CloningAttack>;

/// Conjugate: Bob measures in {|l_phi*>}, perfectly correlated with Alice's
/// {|l_phi>} for the same phi. Plain: Bob measures in {|l_phi>} too.
enum class BobBasis { Conjugate, Plain };

struct BasisPair {
    int alice = 0;
    int bob = 0;
    friend bool operator==(const BasisPair&, const BasisPair&) = default;
};

struct SiftingRule {
    enum class Kind { SameIndex, PairedIndices };
    Kind kind = Kind::SameIndex;
    std::vector<BasisPair> pairs;  // used by PairedIndices

    static SiftingRule same_index() { return {}; }
    static SiftingRule paired(std::vector<BasisPair> accepted) { return {Kind::PairedIndices, std::move(accepted)}; }

    std::vector<BasisPair> accepted_pairs() const;
};

struct SimConfig {
    std::uint64_t rounds = 100'000;
    std::uint64_t seed = 0;
    Channel channel = IdealChannel{};
    std::array<double, 4> alice_weights{0.25, 0.25, 0.25, 0.25};
    std::array<double, 4> bob_weights{0.25, 0.25, 0.25, 0.25};
    SiftingRule sifting;
    BobBasis bob_basis = BobBasis::Conjugate;
    LogBase log_base = LogBase::Two;
    unsigned threads = 0;  // 0: hardware concurrency, capped by QKDLAB_THREADS

    /// Throws std::invalid_argument on bad weights, visibility or cloner.
    void validate() const;
};

/// Exact outcome distribution for one basis pair.
struct RoundTable {
    bool has_eve = false;
    /// has_eve: p[a*27 + b*9 + eB*3 + eC]; otherwise p[a*3 + b].
    std::vector<double> p;

    double alice_bob(int a, int b) const;
};

RoundTable round_distribution(const Channel& channel, int alice_basis, int bob_basis,
                              BobBasis convention = BobBasis::Conjugate);

/// Permutation pi maximizing sum_a P(a, pi(a)) for the noise-free source.
struct Relabeling {
    std::array<int, 3> perm{0, 1, 2};
    double agreement = 0.0;
};

Relabeling best_relabeling(int alice_basis, int bob_basis, BobBasis convention);

struct SimResult {
    std::uint64_t rounds = 0;
    std::uint64_t sifted_count = 0;
    std::uint64_t sifted_errors = 0;
    std::optional<double> qber;  // empty when nothing was sifted
    double qber_standard_error = 0.0;
    std::vector<BasisPair> accepted_pairs;
    std::vector<Relabeling> relabelings;  // one per accepted pair
    std::array<std::array<std::uint64_t, 4>, 4> basis_pair_counts{};
    /// Empirical P(a = b | i, j); NaN for pairs never drawn.
    std::array<std::array<double, 4>, 4> basis_correlation_matrix{};
    /// outcome_counts[((i*4 + j)*3 + a)*3 + b]
    std::vector<std::uint64_t> outcome_counts;
    /// Cloning attack only: eve_counts[((p*3 + a)*3 + eB)*3 + eC] over sifted
    /// rounds, p the index of the accepted pair.
    std::vector<std::uint64_t> eve_counts;
    /// Cloning attack only: syndrome_counts[m*3 + e] with m = (eC - eB) mod 3
    /// Eve's recorded error and e = (b - pi(a)) mod 3 Bob's actual error.
    std::array<std::uint64_t, 9> syndrome_counts{};
    std::optional<double> empirical_I_AE;
    LogBase log_base = LogBase::Two;
    unsigned threads_used = 1;
};

SimResult run_session(const SimConfig& config);

/// Plug-in I(a ; pair, eB, eC) from eve counts (any layout with 3 rows of Alice trits).
double plugin_eve_information(const std::vector<std::uint64_t>& eve_counts, std::size_t pairs, LogBase base);

/// round,basis_i,basis_j,a,b rows for every round, sampled from the same
/// streams as run_session.
void write_rounds_csv(const SimConfig& config, std::ostream& out);

struct SurveyResult {
    BobBasis convention = BobBasis::Conjugate;
    std::array<std::array<double, 4>, 4> exact{};
    std::array<std::array<double, 4>, 4> empirical{};
    std::array<std::array<std::array<int, 3>, 4>, 4> permutations{};
    std::vector<BasisPair> perfect_pairs;  // exact agreement within 1e-12 of 1
    std::uint64_t rounds = 0;
};

/// Requires an ideal channel.
SurveyResult basis_correlation_survey(const SimConfig& config);

struct Comparison {
    SimResult session;
    double analytic_I_AE = 0.0;
    double empirical_I_AE = 0.0;
    double I_AE_standard_error = 0.0;  // bootstrap
    bool I_AE_within = false;          // |diff| <= 3 SE
    double analytic_qber = 0.0;        // 1 - F_A
    double empirical_qber = 0.0;
    double qber_standard_error = 0.0;
    bool qber_within = false;
    int bootstrap_resamples = 0;
    double plugin_bias_bound = 0.0;    // (rows-1)(cols-1) / (2 n ln base)
};

/// Requires a cloning attack with y = z, same-index sifting, the conjugate
/// convention and at least 1e5 rounds.
Comparison empirical_vs_analytic(const SimConfig& config, int resamples = 50);

/// Parallelism cap from QKDLAB_THREADS, or hardware concurrency.
unsigned default_thread_count();

}  // namespace qkdlab
