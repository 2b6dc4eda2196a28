#pragma once

// Information crossing points, the symmetric cloner, the Bell-violation
// thresholds and the acceptable-error-rate comparison between protocols.

#include <string>
#include <vector>

#include "qkdlab/information.hpp"
#include "qkdlab/optimizer.hpp"
#include "qkdlab/presets.hpp"

namespace qkdlab {

struct CrossingOptions {
    SliceOptions slice;
    int max_iterations = 200;
    double residual_tolerance = 1e-8;
    int bracket_points = 24;
};

struct CrossingResult {
    Preset preset = Preset::ThreeDEB;
    double F_A_star = 0.0;
    std::vector<double> params;  // in preset order, params[0] >= 0
    double I_AB = 0.0;
    double I_AE = 0.0;
    double residual = 0.0;       // |I_AE - I_AB| at the solution
    int iterations = 0;
    LogBase log_base = LogBase::Two;
};

/// Largest Bob fidelity at which some cloner of the family gives Eve as much
/// information as Bob: the root in F of
///     g(F) = max_{params : F_A(params) = F} I_AE(params) - I_AB(F).
/// Throws NoCrossingError if g does not change sign on the reachable range
/// and ConvergenceError if the residual stays above tolerance.
CrossingResult crossing_point(Preset preset, LogBase base, const CrossingOptions& options = {});

struct SymmetricResult {
    Preset preset = Preset::ThreeDEB;
    double fidelity = 0.0;
    std::vector<double> params;
    double F_A = 0.0;
    double F_B = 0.0;
    int iterations = 0;
};

/// Largest common fidelity F_A = F_B reachable by the family.
SymmetricResult symmetric_point(Preset preset, const CrossingOptions& options = {});

/// (2/3) V + 1/3: Bob's fidelity after admixing (1 - V) of white noise to the
/// maximally entangled qutrit pair.
double fidelity_from_visibility(double visibility);

struct Thresholds {
    double bell_visibility;          // (6 sqrt 3 - 9) / 2
    double bell_fidelity;            // fidelity_from_visibility(bell_visibility)
    double qubit_fidelity;           // 1/2 + 1/sqrt 8
    double security_fidelity_3deb;   // published crossing, 0.7753
    double kaszlikowski_visibility;  // 0.6629
    double kaszlikowski_fidelity;    // fidelity_from_visibility(0.6629)
};

Thresholds thresholds();

struct ErrorRateRow {
    Preset preset = Preset::ThreeDEB;
    std::string protocol;
    double F_A_star = 0.0;
    double error_rate = 0.0;   // 1 - F_A_star
    double paper_value = 0.0;  // literature error rate
    double delta = 0.0;        // error_rate - paper_value
};

/// One row per preset, each from crossing_point.
std::vector<ErrorRateRow> error_rate_table(LogBase base = LogBase::Two, const CrossingOptions& options = {});

struct SweepRow {
    double F_A = 0.0;
    std::vector<double> params;  // Eve-optimal phase-covariant cloner at F_A
    InfoReport report;
};

/// Eve-optimal 3DEB cloner at a prescribed Bob fidelity in [1/3, 1].
SweepRow sweep_point(double fidelity, LogBase base, const SliceOptions& options = {});

}  // namespace qkdlab
