#include <doctest.h>

#include "oracles.hpp"
#include "qkdlab/optimizer.hpp"
#include "qkdlab/presets.hpp"
#include "qkdlab/security.hpp"

using namespace qkdlab;

TEST_CASE("presets")
{
    CHECK(all_presets().size() == 4);
    CHECK(parse_preset("3deb") == Preset::ThreeDEB);
    CHECK(parse_preset("universal") == Preset::UniversalQutrit);
    CHECK(parse_preset("2mub") == Preset::TwoMUBQutrit);
    CHECK(parse_preset("qubit") == Preset::QubitPhaseCovariant);
    CHECK_FALSE(parse_preset("bogus").has_value());

    // The 3DEB mask reproduces the constrained cloner with y = z.
    const PresetSpec& s = preset_spec(Preset::ThreeDEB);
    const std::vector<double> p{0.8, 0.2, 0.2};
    const double n = std::sqrt(0.64 + 0.08 + 0.24);
    const std::vector<double> q{p[0] / n, p[1] / n, p[2] / n};
    const AmplitudeMatrix a = preset_matrix(s, q);
    CHECK((a.matrix() - phi_cloner_matrix({q[0], q[1], q[2], q[2]}).matrix()).cwiseAbs().maxCoeff() < 1e-15);

    // Every preset basis set is orthonormal.
    for (Preset id : all_presets())
        for (const CMatrix& b : preset_spec(id).bases)
            CHECK((b.adjoint() * b - CMatrix::Identity(b.rows(), b.cols())).cwiseAbs().maxCoeff() < 1e-12);

    // The universal preset uses four mutually unbiased bases.
    const auto& ub = preset_spec(Preset::UniversalQutrit).bases;
    REQUIRE(ub.size() == 4);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = i + 1; j < 4; ++j)
            CHECK(((ub[i].adjoint() * ub[j]).cwiseAbs2().array() - 1.0 / 3.0).abs().maxCoeff() < 1e-12);

    CHECK_THROWS_AS(preset_matrix(s, std::vector<double>{1.0}), std::invalid_argument);
}

TEST_CASE("preset model against the cloner module")
{
    const PresetModel model(Preset::ThreeDEB);
    std::mt19937_64 rng(43);
    for (int trial = 0; trial < 10; ++trial) {
        const ClonerParams c = oracle::random_symmetric(rng);
        const std::vector<double> p{c.v, c.x, c.y};
        CHECK(model.norm_squared(p) == doctest::Approx(1.0));
        const FidelityFigures f = closed_form_report(c);
        CHECK(model.fidelity_A(p) == doctest::Approx(f.F_A).epsilon(1e-12));
        CHECK(model.fidelity_B(p) == doctest::Approx(f.F_B).epsilon(1e-12));
        // State-level route agrees with the closed form.
        CHECK(model.state_level_eve_information(p, LogBase::Two) ==
              doctest::Approx(eve_information(c, LogBase::Two)).epsilon(1e-10));
    }
}

TEST_CASE("slice optimizer")
{
    const std::vector<double> c{1.0, 2.0, 6.0}, f{1.0, 0.0, 2.0};
    const auto [lo, hi] = feasible_fidelity_range(c, f);
    CHECK(lo == 0.0);
    CHECK(hi == 1.0);

    // Maximize theta_1^2 at F = 0.5.
    const SliceObjective obj = [](std::span<const double> t) { return t[1] * t[1]; };
    const SliceMaximum m = maximize_on_fidelity_slice(c, f, 0.5, obj);
    double norm = 0.0, fid = 0.0;
    for (std::size_t i = 0; i < 3; ++i) {
        norm += c[i] * m.params[i] * m.params[i];
        fid += f[i] * m.params[i] * m.params[i];
    }
    CHECK(norm == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(fid == doctest::Approx(0.5).epsilon(1e-12));
    // On the slice s0 = 0.5 - 2 s2 and s1 = 0.25 - 2 s2, so the optimum is s2 = 0.
    CHECK(m.value == doctest::Approx(0.25).epsilon(1e-8));
    CHECK(m.params[0] >= 0.0);

    CHECK_THROWS_AS(maximize_on_fidelity_slice(c, f, 1.5, obj), std::invalid_argument);
    for (const auto& s : sample_fidelity_slice(c, f, 0.5, 20, 1)) {
        double fs = 0.0;
        for (std::size_t i = 0; i < 3; ++i)
            fs += f[i] * s[i] * s[i];
        CHECK(fs == doctest::Approx(0.5).epsilon(1e-12));
    }
}

TEST_CASE("crossing point, 3DEB")
{
    const CrossingResult r = crossing_point(Preset::ThreeDEB, LogBase::Two);
    CHECK(std::abs(r.F_A_star - 0.7753) < 5e-4);
    REQUIRE(r.params.size() == 3);
    CHECK(r.params[0] > 0.0);
    CHECK(std::abs(r.params[0] - 0.8320) < 2e-3);
    CHECK(std::abs(r.params[1] - 0.1711) < 2e-3);
    CHECK(std::abs(r.params[2] - 0.2038) < 2e-3);
    CHECK(r.residual <= 1e-8);
    CHECK(r.I_AB == doctest::Approx(bob_information(r.F_A_star, LogBase::Two)));

    SUBCASE("no point on the slice beats the reported maximum")
    {
        const PresetModel model(Preset::ThreeDEB);
        for (const auto& p : sample_fidelity_slice(model.norm_coefficients(), model.fidelity_coefficients(),
                                                   r.F_A_star, 2000, 99))
            CHECK(model.eve_information(p, LogBase::Two) <= r.I_AB + 1e-8);
    }

    SUBCASE("base invariance")
    {
        for (LogBase b : {LogBase::Three, LogBase::E})
            CHECK(std::abs(crossing_point(Preset::ThreeDEB, b).F_A_star - r.F_A_star) < 1e-6);
    }

    SUBCASE("non-convergence is reported")
    {
        CrossingOptions strict;
        strict.residual_tolerance = -1.0;
        CHECK_THROWS_AS(crossing_point(Preset::ThreeDEB, LogBase::Two, strict), ConvergenceError);
    }
}

TEST_CASE("crossing points of the comparison presets")
{
    CHECK(std::abs(crossing_point(Preset::UniversalQutrit, LogBase::Two).F_A_star - 0.7733) < 1e-3);
    const CrossingResult mub = crossing_point(Preset::TwoMUBQutrit, LogBase::Two);
    CHECK(std::abs(mub.F_A_star - 0.7887) < 1.5e-3);
    // Closed form 1/2 + 1/(2 sqrt 3) for the two-basis qutrit protocol.
    CHECK(mub.F_A_star == doctest::Approx(0.5 + 0.5 / std::sqrt(3.0)).epsilon(1e-7));
    const CrossingResult qubit = crossing_point(Preset::QubitPhaseCovariant, LogBase::Two);
    CHECK(qubit.F_A_star == doctest::Approx(0.5 + 1.0 / std::sqrt(8.0)).epsilon(1e-7));
}

TEST_CASE("symmetric point")
{
    const SymmetricResult s = symmetric_point(Preset::ThreeDEB);
    const double closed = (5.0 + std::sqrt(17.0)) / 12.0;
    CHECK(std::abs(s.fidelity - closed) < 1e-4);
    CHECK(std::abs(s.F_A - s.F_B) <= 1e-8);
    CHECK(s.fidelity < crossing_point(Preset::ThreeDEB, LogBase::Two).F_A_star);
}

TEST_CASE("thresholds")
{
    const Thresholds t = thresholds();
    CHECK(t.bell_visibility == doctest::Approx((6 * std::sqrt(3.0) - 9) / 2).epsilon(1e-15));
    CHECK(std::abs(t.bell_visibility - 0.69615) < 1e-5);
    CHECK(std::abs(t.bell_fidelity - 0.79744) < 1e-4);
    CHECK(t.bell_fidelity > t.security_fidelity_3deb);
    CHECK(t.qubit_fidelity == doctest::Approx(0.85355).epsilon(1e-5));
    CHECK(std::abs(t.kaszlikowski_fidelity - 0.7753) < 1e-4);
    CHECK(fidelity_from_visibility(1.0) == 1.0);
    CHECK(fidelity_from_visibility(0.0) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("error-rate table")
{
    const auto rows = error_rate_table();
    REQUIRE(rows.size() == 4);
    const char* names[] = {"3DEB", "12-state", "3D-BB84", "Ekert91"};
    const double published[] = {0.2247, 0.2267, 0.2113, 0.1464};
    const double tol[] = {5e-4, 1.5e-3, 1.5e-3, 5e-4};
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(rows[i].protocol == names[i]);
        CHECK(std::abs(rows[i].error_rate - published[i]) < tol[i]);
        CHECK(rows[i].error_rate == doctest::Approx(1.0 - rows[i].F_A_star));
        CHECK(rows[i].delta == doctest::Approx(rows[i].error_rate - rows[i].paper_value));
    }
    CHECK(rows[3].error_rate == doctest::Approx(0.5 - 1.0 / std::sqrt(8.0)).epsilon(1e-7));
}

TEST_CASE("sweep")
{
    const SweepRow top = sweep_point(1.0, LogBase::Three);
    CHECK(top.report.R_bound == doctest::Approx(1.0).epsilon(1e-9));

    int changes = 0;
    double prev = 0.0, bracket_lo = 0.0, bracket_hi = 0.0;
    for (int k = 0; k <= 150; ++k) {
        const double F = 0.70 + 0.15 * k / 150.0;
        const SweepRow row = sweep_point(F, LogBase::Two);
        const double gap = row.report.I_AB - row.report.I_AE;
        if (k > 0 && (gap > 0) != (prev > 0)) {
            ++changes;
            bracket_lo = F - 0.001;
            bracket_hi = F;
        }
        prev = gap;
    }
    CHECK(changes == 1);
    CHECK(bracket_lo <= 0.7753);
    CHECK(bracket_hi >= 0.7753);

    CHECK_THROWS_AS(sweep_point(0.2, LogBase::Two), std::out_of_range);
}
