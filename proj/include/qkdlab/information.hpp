#pragma once

// Shannon quantities for the individual-attack analysis.

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "qkdlab/cloner.hpp"

namespace qkdlab {

enum class LogBase { Two, Three, E };

std::string_view to_string(LogBase base);
std::optional<LogBase> parse_log_base(std::string_view text);

/// log(x) in the given base.
double log_in(double x, LogBase base);

/// Probability entries below this are treated as exactly zero.
inline constexpr double kEntropyFloor = 1e-15;

/// -sum p_i log p_i. Throws std::invalid_argument on negative entries (below
/// -1e-12) or when sum p deviates from 1 by more than 1e-9.
double shannon_entropy(std::span<const double> p, LogBase base);

/// I(X;Y) of a joint table p[x * cols + y].
double mutual_information(std::span<const double> joint, std::size_t rows, std::size_t cols, LogBase base);

/// log N - H[F, (1-F)/(N-1), ...]. F must lie in [1/N, 1].
double bob_information(double fidelity, LogBase base, std::size_t dim = 3);

struct EveInformation {
    std::array<double, 3> p_no_error{};  // Eve's conditional distribution when Bob's error m = 0
    std::array<double, 3> p_error{};     // ... when m != 0
    double given_no_error = 0.0;         // I(A:E | m = 0)
    double given_error = 0.0;            // I(A:E | m != 0)
    double F_A = 0.0;
    double total = 0.0;                  // F_A I(.|m=0) + (1 - F_A) I(.|m!=0)
};

/// Eve's information for the phase-covariant qutrit cloner (requires y = z and
/// normalized parameters). The m != 0 branch is skipped when F_A = 1.
EveInformation eve_information_detail(const ClonerParams& params, LogBase base);
double eve_information(const ClonerParams& params, LogBase base);

/// max(I_AB - I_AE, I_AB - I_BE).
double ck_rate_bound(double i_ab, double i_ae, double i_be);

struct InfoReport {
    FidelityFigures figures;
    double I_AB = 0.0;
    double I_AE = 0.0;
    double I_BE = 0.0;
    double R_bound = 0.0;
    LogBase log_base = LogBase::Two;
};

/// Full report for a phase-covariant qutrit cloner (y = z). I_BE is computed
/// from the state-level joint distribution of Bob's and Eve's outcomes.
InfoReport information_report(const ClonerParams& params, LogBase base);

}  // namespace qkdlab
