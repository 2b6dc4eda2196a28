#pragma once

// Derivative-free maximization over a fidelity slice of a cloner family.
//
// For a family whose norm and fidelity are both diagonal quadratic forms in
// the real parameters theta,
//
//     sum_i c_i theta_i^2 = 1,      sum_i f_i theta_i^2 = F,
//
// the squared parameters s_i = theta_i^2 range over a polytope. The search
// runs a compass pattern search in the polytope's affine coordinates for
// every sign pattern of theta (theta_0 >= 0 fixes the overall sign), from
// several seeded random interior starts.

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace qkdlab {

class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NoCrossingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SliceOptions {
    int restarts = 16;
    std::uint64_t seed = 0x3DEBu;
    double step_tolerance = 1e-9;
    int max_evaluations = 2'000'000;
};

struct SliceMaximum {
    std::vector<double> params;
    double value = 0.0;
    int evaluations = 0;
};

using SliceObjective = std::function<double(std::span<const double>)>;

/// [min_i f_i/c_i, max_i f_i/c_i]: the fidelities reachable on the unit sphere.
std::pair<double, double> feasible_fidelity_range(std::span<const double> norm_coeff,
                                                  std::span<const double> fid_coeff);

/// Maximizes the objective over the slice at fidelity F. Throws
/// std::invalid_argument if the slice is empty.
SliceMaximum maximize_on_fidelity_slice(std::span<const double> norm_coeff, std::span<const double> fid_coeff,
                                        double fidelity, const SliceObjective& objective,
                                        const SliceOptions& options = {});

/// Uniformly spread feasible parameter vectors on the slice (used to probe
/// that a reported maximum is not beaten elsewhere).
std::vector<std::vector<double>> sample_fidelity_slice(std::span<const double> norm_coeff,
                                                       std::span<const double> fid_coeff, double fidelity,
                                                       std::size_t count, std::uint64_t seed);

}  // namespace qkdlab
