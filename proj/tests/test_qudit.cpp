#include <doctest.h>

#include <array>

#include "oracles.hpp"
#include "qkdlab/qudit.hpp"

using namespace qkdlab;

namespace {

const cplx w = std::polar(1.0, 2.0 * kPi / 3.0);

double max_diff(const CVector& a, const CVector& b)
{
    return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("phi basis states")
{
    const double s = 1.0 / std::sqrt(3.0);
    CVector e00(3), e01(3);
    e00 << s, s, s;
    e01 << s, s * w, s * w * w;
    CHECK(max_diff(phi_basis_state(0.0, 0).amps(), e00) < 1e-15);
    CHECK(max_diff(phi_basis_state(0.0, 1).amps(), e01) < 1e-15);

    for (const double phi : phase_grid(24))
        for (int l = 0; l < 3; ++l) {
            const StateVector v = phi_basis_state(phi, l);
            CHECK(max_diff(v.amps(), oracle::phi_state(phi, l)) < 1e-14);
            for (int k = 0; k < 3; ++k)
                CHECK(std::norm(v[static_cast<std::size_t>(k)]) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
        }
}

TEST_CASE("phi bases are orthonormal on a 24-point grid")
{
    for (const double phi : phase_grid(24))
        for (const bool conj : {false, true}) {
            const CMatrix b = BasisSpec(phi, conj).columns();
            CHECK((b.adjoint() * b - CMatrix::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-12);
        }
}

TEST_CASE("conjugate phi basis")
{
    CHECK(max_diff(conjugate_phi_basis_state(0.0, 0).amps(), phi_basis_state(0.0, 0).amps()) < 1e-15);
    for (const double phi : {0.0, 0.3, kPi / 6, 2.0})
        for (int l = 0; l < 3; ++l) {
            CHECK(max_diff(conjugate_phi_basis_state(phi, l).amps(), phi_basis_state(phi, l).amps().conjugate()) < 1e-15);
            for (int m = 0; m < 3; ++m) {
                const cplx ip = conjugate_phi_basis_state(phi, l).inner(conjugate_phi_basis_state(phi, m));
                CHECK(std::abs(ip - (l == m ? 1.0 : 0.0)) < 1e-12);
            }
        }
}

TEST_CASE("optimal bases")
{
    const auto b = optimal_bases();
    CHECK(b[0].phi == 0.0);
    CHECK(b[3].phi == doctest::Approx(kPi / 2).epsilon(1e-15));
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK_FALSE(b[i].conjugated);
        const double ratio = b[i].phi / (kPi / 6);
        CHECK(std::abs(ratio - std::round(ratio)) < 1e-12);
        CHECK(std::round(ratio) == static_cast<double>(i));
    }
}

TEST_CASE("maximally entangled state")
{
    const StateVector bell = max_entangled(3);
    for (std::size_t i = 0; i < 9; ++i)
        CHECK(std::abs(bell[i] - ((i % 4 == 0) ? 1.0 / std::sqrt(3.0) : 0.0)) < 1e-15);
    CHECK(bell.factors() == std::vector<std::size_t>{3, 3});

    // Perfect correlation between a phi-basis and its conjugate.
    for (const double phi : phase_grid(12))
        for (int l = 0; l < 3; ++l)
            for (int m = 0; m < 3; ++m) {
                const StateVector prod = kron(phi_basis_state(phi, l), conjugate_phi_basis_state(phi, m));
                CHECK(std::abs(prod.inner(bell) - (l == m ? 1.0 / std::sqrt(3.0) : 0.0)) < 1e-12);
            }

    const std::size_t first[] = {0}, second[] = {1};
    CHECK((partial_trace(bell, first).matrix() - CMatrix::Identity(3, 3) / 3.0).cwiseAbs().maxCoeff() < 1e-15);
    CHECK((partial_trace(bell, second).matrix() - CMatrix::Identity(3, 3) / 3.0).cwiseAbs().maxCoeff() < 1e-15);
    CHECK_THROWS_AS(max_entangled(1), std::invalid_argument);
}

TEST_CASE("error operators")
{
    CHECK((error_operator(0, 0, 3).matrix() - CMatrix::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-15);
    const StateVector one = error_operator(1, 0, 3).apply(StateVector::basis(0, {3}));
    CHECK(std::abs(one[1] - 1.0) < 1e-15);
    for (std::size_t k = 0; k < 3; ++k) {
        const StateVector out = error_operator(0, 1, 3).apply(StateVector::basis(k, {3}));
        CHECK(std::abs(out[k] - std::pow(w, static_cast<double>(k))) < 1e-14);
    }
    for (int m = 0; m < 3; ++m)
        for (int n = 0; n < 3; ++n)
            CHECK(error_operator(m, n, 3).is_unitary());
    CHECK_THROWS_AS(error_operator(3, 0, 3), std::out_of_range);
    CHECK_THROWS_AS(error_operator(0, -1, 3), std::out_of_range);
}

TEST_CASE("generalized Bell states")
{
    CHECK(bell_state(0, 0, 3).equal_up_to_phase(max_entangled(3)));
    for (int m = 0; m < 3; ++m)
        for (int n = 0; n < 3; ++n)
            for (int mp = 0; mp < 3; ++mp)
                for (int np = 0; np < 3; ++np) {
                    const cplx ip = bell_state(m, n, 3).inner(bell_state(mp, np, 3));
                    CHECK(std::abs(ip - ((m == mp && n == np) ? 1.0 : 0.0)) < 1e-12);
                }

    // |B_{m,n}> = (1 (x) X^m) (Z^n (x) 1)|B_00>, by explicit matrices.
    CMatrix X = CMatrix::Zero(3, 3), Z = CMatrix::Zero(3, 3);
    for (int k = 0; k < 3; ++k) {
        X((k + 1) % 3, k) = 1.0;
        Z(k, k) = oracle::omega(k);
    }
    for (int m = 0; m < 3; ++m)
        for (int n = 0; n < 3; ++n) {
            CMatrix Xm = CMatrix::Identity(3, 3), Zn = CMatrix::Identity(3, 3);
            for (int k = 0; k < m; ++k)
                Xm = X * Xm;
            for (int k = 0; k < n; ++k)
                Zn = Z * Zn;
            CMatrix op(9, 9);
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j)
                    op.block(3 * i, 3 * j, 3, 3) = Zn(i, j) * Xm;
            const CVector mapped = op * max_entangled(3).amps();
            CHECK(std::abs(std::abs(bell_state(m, n, 3).amps().dot(mapped)) - 1.0) < 1e-12);
        }
}

TEST_CASE("tilde Bell states")
{
    for (const double phi : {0.0, kPi / 6, 0.3})
        CHECK(tilde_bell_state(0, 0, phi).equal_up_to_phase(max_entangled(3)));

    SUBCASE("orthonormal at phi = pi/6")
    {
        for (int a = 0; a < 9; ++a)
            for (int b = 0; b < 9; ++b) {
                const cplx ip = tilde_bell_state(a / 3, a % 3, kPi / 6).inner(tilde_bell_state(b / 3, b % 3, kPi / 6));
                CHECK(std::abs(ip - (a == b ? 1.0 : 0.0)) < 1e-12);
            }
    }

    SUBCASE("relation to the Bell basis at phi = 0")
    {
        for (int m = 0; m < 3; ++m)
            for (int n = 0; n < 3; ++n) {
                const cplx phase = std::polar(1.0, m * (-2.0 * kPi * n / 3.0));
                const CVector rhs = phase * tilde_bell_state(static_cast<int>(mod_index(-n, 3)), m, 0.0).amps();
                CHECK(max_diff(bell_state(m, n, 3).amps(), rhs) < 1e-12);
            }
    }

    SUBCASE("the phi = 0 relation does not carry over to phi = pi/6")
    {
        // Regression fixture: with the phase factor exp(i m (-2 pi n / 3 + phi)),
        // the identity fails away from phi = 0 for shifted Bell states.
        double worst = 0.0;
        for (int m = 0; m < 3; ++m)
            for (int n = 0; n < 3; ++n) {
                const double phi = kPi / 6;
                const cplx phase = std::polar(1.0, m * (-2.0 * kPi * n / 3.0 + phi));
                const CVector rhs = phase * tilde_bell_state(static_cast<int>(mod_index(-n, 3)), m, phi).amps();
                worst = std::max(worst, max_diff(bell_state(m, n, 3).amps(), rhs));
            }
        CHECK(worst > 1e-3);
    }

    SUBCASE("the phi-phase form holds exactly when exp(i phi) is a cube root of unity")
    {
        for (int g = 0; g < 24; ++g) {
            const double phi = g * kTwoPi / 24;
            double worst = 0.0;
            for (int m = 0; m < 3; ++m)
                for (int n = 0; n < 3; ++n) {
                    const cplx phase = std::polar(1.0, m * (-2.0 * kPi * n / 3.0 + phi));
                    const CVector rhs = phase * tilde_bell_state(static_cast<int>(mod_index(-n, 3)), m, phi).amps();
                    worst = std::max(worst, max_diff(bell_state(m, n, 3).amps(), rhs));
                }
            if (g % 8 == 0)
                CHECK(worst < 1e-12);
            else
                CHECK(worst > 0.1);
        }
    }
}

TEST_CASE("partial trace")
{
    const StateVector a = phi_basis_state(0.4, 2), b = conjugate_phi_basis_state(1.1, 1);
    const std::size_t first[] = {0};
    const DensityMatrix ra = partial_trace(kron(a, b), first);
    CHECK(ra.max_abs_diff(DensityMatrix::pure(a)) < 1e-15);

    std::mt19937_64 rng(11);
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 20; ++trial) {
        CVector psi(27);
        for (int k = 0; k < 27; ++k)
            psi(k) = cplx(g(rng), g(rng));
        psi.normalize();
        const StateVector s(psi, {3, 3, 3});
        for (std::size_t pos = 0; pos < 3; ++pos) {
            const std::size_t keep[] = {pos};
            const DensityMatrix r = partial_trace(s, keep);
            CHECK(std::abs(r.trace() - 1.0) < 1e-12);
            CHECK((r.matrix() - oracle::reduce(psi, {3, 3, 3}, static_cast<int>(pos))).cwiseAbs().maxCoeff() < 1e-13);
        }
        // Density-matrix route agrees with the state route.
        const std::size_t keep01[] = {0, 1}, keep0[] = {0};
        const DensityMatrix r01 = partial_trace(s, keep01);
        CHECK(partial_trace(DensityMatrix(r01.matrix(), {3, 3}), keep0).max_abs_diff(partial_trace(s, keep0)) < 1e-13);
    }

    const std::size_t bad[] = {3};
    CHECK_THROWS(partial_trace(max_entangled(3), bad));
    CHECK_THROWS(partial_trace(max_entangled(3), std::span<const std::size_t>{}));
}

TEST_CASE("validation")
{
    CVector v(3);
    v << 1, 1, 0;
    CHECK_THROWS_AS(StateVector{v}, std::invalid_argument);
    CHECK_THROWS_AS(phi_basis_state(0.0, 3), std::out_of_range);
    CMatrix m = CMatrix::Identity(3, 3);
    CHECK_THROWS_AS(DensityMatrix{m}, std::invalid_argument);
    m(0, 0) = 2.0;
    m(1, 1) = -0.5;
    m(2, 2) = -0.5;
    CHECK_THROWS_AS(DensityMatrix{m}, std::invalid_argument);
}
