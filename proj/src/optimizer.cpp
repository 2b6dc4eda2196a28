#include "qkdlab/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include <Eigen/Dense>

namespace qkdlab {

namespace {

constexpr double kFeasibilityTol = 1e-13;

// The polytope {s >= 0, c.s = 1, f.s = F} in affine coordinates s = center + axes * u.
struct Slice {
    std::vector<Eigen::VectorXd> vertices;
    Eigen::VectorXd center;
    Eigen::MatrixXd axes;  // orthonormal columns spanning the null space of [c; f]
    double diameter = 0.0;

    std::size_t dims() const { return static_cast<std::size_t>(axes.cols()); }

    bool point(const Eigen::VectorXd& u, Eigen::VectorXd& s) const
    {
        s = center + axes * u;
        for (Eigen::Index i = 0; i < s.size(); ++i) {
            if (s(i) < -kFeasibilityTol)
                return false;
            s(i) = std::max(s(i), 0.0);
        }
        return true;
    }
};

Slice make_slice(std::span<const double> c, std::span<const double> f, double fidelity)
{
    const auto p = static_cast<Eigen::Index>(c.size());
    if (c.size() != f.size() || c.empty())
        throw std::invalid_argument("norm and fidelity coefficient lists must match and be nonempty");

    Slice slice;
    for (Eigen::Index i = 0; i < p; ++i) {
        const auto ui = static_cast<std::size_t>(i);
        if (c[ui] > 0 && std::abs(f[ui] - fidelity * c[ui]) <= 1e-12) {
            Eigen::VectorXd v = Eigen::VectorXd::Zero(p);
            v(i) = 1.0 / c[ui];
            slice.vertices.push_back(v);
        }
        for (Eigen::Index j = i + 1; j < p; ++j) {
            const auto uj = static_cast<std::size_t>(j);
            const double det = c[ui] * f[uj] - c[uj] * f[ui];
            if (std::abs(det) < 1e-14)
                continue;
            const double si = (f[uj] - fidelity * c[uj]) / det;
            const double sj = (fidelity * c[ui] - f[ui]) / det;
            if (si < -kFeasibilityTol || sj < -kFeasibilityTol)
                continue;
            Eigen::VectorXd v = Eigen::VectorXd::Zero(p);
            v(i) = std::max(si, 0.0);
            v(j) = std::max(sj, 0.0);
            slice.vertices.push_back(v);
        }
    }
    if (slice.vertices.empty())
        throw std::invalid_argument("fidelity " + std::to_string(fidelity) + " is not reachable by this cloner family");

    slice.center = Eigen::VectorXd::Zero(p);
    for (const auto& v : slice.vertices)
        slice.center += v;
    slice.center /= static_cast<double>(slice.vertices.size());
    for (const auto& a : slice.vertices)
        for (const auto& b : slice.vertices)
            slice.diameter = std::max(slice.diameter, (a - b).norm());

    Eigen::MatrixXd constraints(2, p);
    for (Eigen::Index i = 0; i < p; ++i) {
        constraints(0, i) = c[static_cast<std::size_t>(i)];
        constraints(1, i) = f[static_cast<std::size_t>(i)];
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(constraints);
    const Eigen::Index kdim = lu.dimensionOfKernel();
    if (kdim > 0) {
        const Eigen::MatrixXd kernel = lu.kernel();
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(kernel);
        slice.axes = qr.householderQ() * Eigen::MatrixXd::Identity(p, kdim);
    } else {
        slice.axes = Eigen::MatrixXd::Zero(p, 0);
    }
    return slice;
}

Eigen::VectorXd random_interior(const Slice& slice, std::mt19937_64& rng)
{
    std::exponential_distribution<double> expo(1.0);
    Eigen::VectorXd s = Eigen::VectorXd::Zero(slice.center.size());
    double total = 0.0;
    for (const auto& v : slice.vertices) {
        const double w = expo(rng);
        s += w * v;
        total += w;
    }
    return s / total;
}

void to_params(const Eigen::VectorXd& s, unsigned signs, std::vector<double>& theta)
{
    theta.resize(static_cast<std::size_t>(s.size()));
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        const bool negative = i > 0 && ((signs >> (i - 1)) & 1u);
        const double mag = std::sqrt(std::max(s(i), 0.0));
        theta[static_cast<std::size_t>(i)] = negative ? -mag : mag;
    }
}

}  // namespace

std::pair<double, double> feasible_fidelity_range(std::span<const double> norm_coeff, std::span<const double> fid_coeff)
{
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (std::size_t i = 0; i < norm_coeff.size(); ++i) {
        if (norm_coeff[i] <= 0)
            continue;
        lo = std::min(lo, fid_coeff[i] / norm_coeff[i]);
        hi = std::max(hi, fid_coeff[i] / norm_coeff[i]);
    }
    return {lo, hi};
}

SliceMaximum maximize_on_fidelity_slice(std::span<const double> norm_coeff, std::span<const double> fid_coeff,
                                        double fidelity, const SliceObjective& objective, const SliceOptions& options)
{
    const Slice slice = make_slice(norm_coeff, fid_coeff, fidelity);
    const std::size_t p = norm_coeff.size();
    const unsigned patterns = 1u << (p - 1);
    const auto d = static_cast<Eigen::Index>(slice.dims());

    SliceMaximum best;
    best.value = -std::numeric_limits<double>::infinity();
    std::vector<double> theta;
    Eigen::VectorXd s;
    int evaluations = 0;

    auto evaluate = [&](const Eigen::VectorXd& u, unsigned signs, double& value) {
        if (!slice.point(u, s))
            return false;
        to_params(s, signs, theta);
        value = objective(theta);
        ++evaluations;
        return true;
    };

    for (unsigned signs = 0; signs < patterns; ++signs) {
        std::mt19937_64 rng(options.seed + signs);
        const int restarts = d == 0 ? 1 : options.restarts;
        for (int r = 0; r < restarts; ++r) {
            Eigen::VectorXd u = slice.axes.transpose() * (random_interior(slice, rng) - slice.center);
            double value = 0.0;
            if (!evaluate(u, signs, value))
                continue;
            double step = std::max(0.25 * slice.diameter, 1e-6);
            while (d > 0 && step >= options.step_tolerance) {
                if (evaluations > options.max_evaluations)
                    throw ConvergenceError("slice maximization exceeded its evaluation budget");
                bool moved = false;
                for (Eigen::Index k = 0; k < d && !moved; ++k)
                    for (double dir : {+1.0, -1.0}) {
                        Eigen::VectorXd trial = u;
                        trial(k) += dir * step;
                        double tv = 0.0;
                        if (evaluate(trial, signs, tv) && tv > value) {
                            u = trial;
                            value = tv;
                            moved = true;
                            break;
                        }
                    }
                if (!moved)
                    step *= 0.5;
            }
            if (value > best.value) {
                slice.point(u, s);
                to_params(s, signs, best.params);
                best.value = value;
            }
        }
    }
    if (best.params.empty())
        throw ConvergenceError("no feasible start found on the fidelity slice");
    best.evaluations = evaluations;
    return best;
}

std::vector<std::vector<double>> sample_fidelity_slice(std::span<const double> norm_coeff,
                                                       std::span<const double> fid_coeff, double fidelity,
                                                       std::size_t count, std::uint64_t seed)
{
    const Slice slice = make_slice(norm_coeff, fid_coeff, fidelity);
    const unsigned patterns = 1u << (norm_coeff.size() - 1);
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<unsigned> pick(0, patterns - 1);
    std::vector<std::vector<double>> out;
    out.reserve(count);
    std::vector<double> theta;
    for (std::size_t i = 0; i < count; ++i) {
        to_params(random_interior(slice, rng), pick(rng), theta);
        out.push_back(theta);
    }
    return out;
}

}  // namespace qkdlab
