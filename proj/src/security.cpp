#include "qkdlab/security.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include <boost/math/tools/roots.hpp>

namespace qkdlab {

namespace {

struct RootSolution {
    double at = 0.0;
    SliceMaximum inner;
    int iterations = 0;
};

// Finds the first downward sign change of gap(F) = inner(F).value - target(F)
// on [lo, hi] by scanning, then polishes it with TOMS 748.
template <class Inner, class Target>
RootSolution solve_outer(double lo, double hi, const Inner& inner, const Target& target, const CrossingOptions& options,
                         const char* what)
{
    auto gap = [&](double F) { return inner(F).value - target(F); };

    const int n = std::max(options.bracket_points, 2);
    double a = lo, fa = gap(lo);
    double b = 0.0, fb = 0.0;
    bool bracketed = false;
    for (int i = 1; i <= n; ++i) {
        const double F = lo + (hi - lo) * i / n;
        const double g = gap(F);
        if (fa >= 0.0 && g < 0.0) {
            b = F;
            fb = g;
            bracketed = true;
            break;
        }
        a = F;
        fa = g;
    }
    if (!bracketed)
        throw NoCrossingError(std::string(what) + ": no sign change on the reachable fidelity range");

    RootSolution sol;
    if (fa == 0.0) {
        sol.at = a;
    } else {
        std::uintmax_t iters = static_cast<std::uintmax_t>(options.max_iterations);
        const auto tol = boost::math::tools::eps_tolerance<double>(std::numeric_limits<double>::digits - 6);
        const auto [left, right] = boost::math::tools::toms748_solve(gap, a, b, fa, fb, tol, iters);
        if (iters >= static_cast<std::uintmax_t>(options.max_iterations))
            throw ConvergenceError(std::string(what) + ": root finder hit its iteration cap");
        sol.iterations = static_cast<int>(iters);
        sol.at = std::abs(gap(left)) <= std::abs(gap(right)) ? left : right;
    }
    sol.inner = inner(sol.at);
    return sol;
}

std::pair<double, double> search_range(const PresetModel& model)
{
    auto [lo, hi] = feasible_fidelity_range(model.norm_coefficients(), model.fidelity_coefficients());
    lo = std::max(lo, 1.0 / static_cast<double>(model.spec().dim));
    return {lo + 1e-9, hi - 1e-9};
}

}  // namespace

CrossingResult crossing_point(Preset preset, LogBase base, const CrossingOptions& options)
{
    const PresetModel model(preset);
    const auto& nc = model.norm_coefficients();
    const auto& fc = model.fidelity_coefficients();
    const std::size_t dim = model.spec().dim;

    auto inner = [&](double F) {
        return maximize_on_fidelity_slice(
            nc, fc, F, [&](std::span<const double> p) { return model.eve_information(p, base); }, options.slice);
    };
    auto target = [&](double F) { return bob_information(F, base, dim); };

    const auto [lo, hi] = search_range(model);
    const RootSolution sol = solve_outer(lo, hi, inner, target, options, "crossing_point");

    CrossingResult r;
    r.preset = preset;
    r.log_base = base;
    r.params = sol.inner.params;
    r.F_A_star = model.fidelity_A(r.params);
    r.I_AE = sol.inner.value;
    r.I_AB = bob_information(r.F_A_star, base, dim);
    r.residual = std::abs(r.I_AE - r.I_AB);
    r.iterations = sol.iterations;
    if (r.residual > options.residual_tolerance)
        throw ConvergenceError("crossing_point: residual " + std::to_string(r.residual) + " above tolerance");
    return r;
}

SymmetricResult symmetric_point(Preset preset, const CrossingOptions& options)
{
    const PresetModel model(preset);
    const auto& nc = model.norm_coefficients();
    const auto& fc = model.fidelity_coefficients();

    auto inner = [&](double F) {
        return maximize_on_fidelity_slice(
            nc, fc, F, [&](std::span<const double> p) { return model.fidelity_B(p); }, options.slice);
    };
    auto target = [](double F) { return F; };

    const auto [lo, hi] = search_range(model);
    const RootSolution sol = solve_outer(lo, hi, inner, target, options, "symmetric_point");

    SymmetricResult r;
    r.preset = preset;
    r.params = sol.inner.params;
    r.F_A = model.fidelity_A(r.params);
    r.F_B = model.fidelity_B(r.params);
    r.fidelity = 0.5 * (r.F_A + r.F_B);
    r.iterations = sol.iterations;
    if (std::abs(r.F_A - r.F_B) > options.residual_tolerance)
        throw ConvergenceError("symmetric_point: |F_A - F_B| above tolerance");
    return r;
}

double fidelity_from_visibility(double visibility)
{
    return 2.0 / 3.0 * visibility + 1.0 / 3.0;
}

Thresholds thresholds()
{
    Thresholds t{};
    t.bell_visibility = (6.0 * std::sqrt(3.0) - 9.0) / 2.0;
    t.bell_fidelity = fidelity_from_visibility(t.bell_visibility);
    t.qubit_fidelity = 0.5 + 1.0 / std::sqrt(8.0);
    t.security_fidelity_3deb = 0.7753;
    t.kaszlikowski_visibility = 0.6629;
    t.kaszlikowski_fidelity = fidelity_from_visibility(t.kaszlikowski_visibility);
    return t;
}

std::vector<ErrorRateRow> error_rate_table(LogBase base, const CrossingOptions& options)
{
    // Literature error rates, in the same order as all_presets().
    constexpr double kPublishedRates[] = {0.2247, 0.2267, 0.2113, 0.1464};
    std::vector<ErrorRateRow> rows;
    std::size_t i = 0;
    for (Preset p : all_presets()) {
        const CrossingResult c = crossing_point(p, base, options);
        ErrorRateRow row;
        row.preset = p;
        row.protocol = preset_spec(p).protocol;
        row.F_A_star = c.F_A_star;
        row.error_rate = 1.0 - c.F_A_star;
        row.paper_value = kPublishedRates[i++];
        row.delta = row.error_rate - row.paper_value;
        rows.push_back(std::move(row));
    }
    return rows;
}

SweepRow sweep_point(double fidelity, LogBase base, const SliceOptions& options)
{
    if (!(fidelity >= 1.0 / 3.0 && fidelity <= 1.0))
        throw std::out_of_range("sweep fidelity must lie in [1/3, 1]");
    const PresetModel model(Preset::ThreeDEB);
    const SliceMaximum best = maximize_on_fidelity_slice(
        model.norm_coefficients(), model.fidelity_coefficients(), fidelity,
        [&](std::span<const double> p) { return model.eve_information(p, base); }, options);
    SweepRow row;
    row.F_A = fidelity;
    row.params = best.params;
    const ClonerParams cp{best.params[0], best.params[1], best.params[2], best.params[2]};
    row.report = information_report(cp.normalized(), base);
    return row;
}

}  // namespace qkdlab
