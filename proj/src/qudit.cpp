#include "qkdlab/qudit.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <string>

namespace qkdlab {

namespace {

std::size_t product(const std::vector<std::size_t>& factors)
{
    return std::accumulate(factors.begin(), factors.end(), std::size_t{1}, std::multiplies<>());
}

void check_index(int value, std::size_t n, const char* what)
{
    if (value < 0 || static_cast<std::size_t>(value) >= n)
        throw std::out_of_range(std::string(what) + " must lie in [0, " + std::to_string(n - 1) + "], got " +
                                std::to_string(value));
}

void check_factors(const std::vector<std::size_t>& factors, std::size_t dim)
{
    if (factors.empty() || std::find(factors.begin(), factors.end(), 0u) != factors.end())
        throw std::invalid_argument("factor list must be nonempty with positive entries");
    if (product(factors) != dim)
        throw std::invalid_argument("factor product " + std::to_string(product(factors)) +
                                    " does not match dimension " + std::to_string(dim));
}

// Splits a flat index over `factors` into (kept, traced) flat indices.
struct IndexSplit {
    std::vector<std::size_t> kept_factors;
    std::vector<bool> is_kept;
    std::size_t kept_dim = 1;
    std::size_t traced_dim = 1;

    IndexSplit(const std::vector<std::size_t>& factors, std::span<const std::size_t> keep)
        : is_kept(factors.size(), false)
    {
        if (keep.empty())
            throw std::invalid_argument("partial_trace: keep set must be nonempty");
        for (std::size_t s : keep) {
            if (s >= factors.size())
                throw std::invalid_argument("partial_trace: subsystem " + std::to_string(s) +
                                            " not in factor list of size " + std::to_string(factors.size()));
            if (is_kept[s])
                throw std::invalid_argument("partial_trace: duplicate subsystem in keep set");
            is_kept[s] = true;
        }
        for (std::size_t s = 0; s < factors.size(); ++s) {
            if (is_kept[s]) {
                kept_factors.push_back(factors[s]);
                kept_dim *= factors[s];
            } else {
                traced_dim *= factors[s];
            }
        }
    }

    std::pair<std::size_t, std::size_t> split(std::size_t flat, const std::vector<std::size_t>& factors) const
    {
        // Walk from the fastest index (last factor) backwards.
        std::size_t kept = 0, traced = 0, kept_stride = 1, traced_stride = 1;
        for (std::size_t s = factors.size(); s-- > 0;) {
            const std::size_t digit = flat % factors[s];
            flat /= factors[s];
            if (is_kept[s]) {
                kept += digit * kept_stride;
                kept_stride *= factors[s];
            } else {
                traced += digit * traced_stride;
                traced_stride *= factors[s];
            }
        }
        return {kept, traced};
    }
};

}  // namespace

std::size_t mod_index(long long k, std::size_t n)
{
    const auto nn = static_cast<long long>(n);
    return static_cast<std::size_t>(((k % nn) + nn) % nn);
}

cplx root_of_unity(long long k, std::size_t n)
{
    const double angle = kTwoPi * static_cast<double>(mod_index(k, n)) / static_cast<double>(n);
    return std::polar(1.0, angle);
}

// ---------------------------------------------------------------------------
// StateVector

StateVector::StateVector(CVector amps, std::vector<std::size_t> factors)
    : amps_(std::move(amps)), factors_(std::move(factors))
{
    check_factors(factors_, dim());
    if (std::abs(amps_.squaredNorm() - 1.0) > kExactTol)
        throw std::invalid_argument("state vector is not normalized (norm^2 = " +
                                    std::to_string(amps_.squaredNorm()) + ")");
}

StateVector::StateVector(CVector amps) : StateVector(amps, {static_cast<std::size_t>(amps.size())}) {}

StateVector StateVector::basis(std::size_t index, std::vector<std::size_t> factors)
{
    const std::size_t d = product(factors);
    if (index >= d)
        throw std::out_of_range("basis index out of range");
    CVector v = CVector::Zero(static_cast<Eigen::Index>(d));
    v(static_cast<Eigen::Index>(index)) = 1.0;
    return StateVector(std::move(v), std::move(factors));
}

cplx StateVector::inner(const StateVector& ket) const
{
    if (ket.dim() != dim())
        throw std::invalid_argument("inner product of states with different dimensions");
    return amps_.dot(ket.amps_);  // Eigen's dot conjugates the left operand
}

StateVector StateVector::conj() const
{
    return StateVector(amps_.conjugate(), factors_);
}

bool StateVector::equal_up_to_phase(const StateVector& other, double tol) const
{
    return other.dim() == dim() && std::abs(std::abs(inner(other)) - 1.0) <= tol;
}

StateVector kron(const StateVector& a, const StateVector& b)
{
    CVector out(static_cast<Eigen::Index>(a.dim() * b.dim()));
    for (std::size_t i = 0; i < a.dim(); ++i)
        out.segment(static_cast<Eigen::Index>(i * b.dim()), static_cast<Eigen::Index>(b.dim())) = a[i] * b.amps();
    std::vector<std::size_t> factors = a.factors();
    factors.insert(factors.end(), b.factors().begin(), b.factors().end());
    return StateVector(std::move(out), std::move(factors));
}

// ---------------------------------------------------------------------------
// Operator

Operator::Operator(CMatrix m) : m_(std::move(m))
{
    if (m_.rows() != m_.cols() || m_.rows() == 0)
        throw std::invalid_argument("operator must be a nonempty square matrix");
}

StateVector Operator::apply(const StateVector& psi) const
{
    if (psi.dim() != dim())
        throw std::invalid_argument("operator/state dimension mismatch");
    return StateVector(m_ * psi.amps(), psi.factors());
}

bool Operator::is_unitary(double tol) const
{
    const CMatrix id = CMatrix::Identity(m_.rows(), m_.cols());
    return (m_ * m_.adjoint() - id).cwiseAbs().maxCoeff() <= tol;
}

// ---------------------------------------------------------------------------
// DensityMatrix

DensityMatrix::DensityMatrix(CMatrix m, std::vector<std::size_t> factors)
    : m_(std::move(m)), factors_(std::move(factors))
{
    if (m_.rows() != m_.cols() || m_.rows() == 0)
        throw std::invalid_argument("density matrix must be a nonempty square matrix");
    check_factors(factors_, dim());
    if ((m_ - m_.adjoint()).cwiseAbs().maxCoeff() > kExactTol)
        throw std::invalid_argument("density matrix is not Hermitian");
    if (std::abs(m_.trace() - cplx(1.0)) > kExactTol)
        throw std::invalid_argument("density matrix trace deviates from 1");
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(m_, Eigen::EigenvaluesOnly);
    if (eig.eigenvalues().minCoeff() < -1e-10)
        throw std::invalid_argument("density matrix has a negative eigenvalue");
}

DensityMatrix::DensityMatrix(CMatrix m) : DensityMatrix(m, {static_cast<std::size_t>(m.rows())}) {}

DensityMatrix DensityMatrix::pure(const StateVector& psi)
{
    return DensityMatrix(psi.amps() * psi.amps().adjoint(), psi.factors());
}

double DensityMatrix::expectation(const StateVector& psi) const
{
    if (psi.dim() != dim())
        throw std::invalid_argument("density matrix/state dimension mismatch");
    return psi.amps().dot(m_ * psi.amps()).real();
}

double DensityMatrix::max_abs_diff(const DensityMatrix& other) const
{
    if (other.dim() != dim())
        throw std::invalid_argument("density matrix dimension mismatch");
    return (m_ - other.m_).cwiseAbs().maxCoeff();
}

// ---------------------------------------------------------------------------
// Bases and named states

BasisSpec::BasisSpec(double phase, bool conj) : phi(std::fmod(phase, kTwoPi)), conjugated(conj)
{
    if (phi < 0.0)
        phi += kTwoPi;
    if (phi >= kTwoPi)  // fmod of a value just below a multiple of 2 pi
        phi = 0.0;
}

StateVector BasisSpec::state(int l) const
{
    return conjugated ? conjugate_phi_basis_state(phi, l) : phi_basis_state(phi, l);
}

CMatrix BasisSpec::columns() const
{
    CMatrix cols(3, 3);
    for (int l = 0; l < 3; ++l)
        cols.col(l) = state(l).amps();
    return cols;
}

StateVector phi_basis_state(double phi, int l, std::size_t n)
{
    check_index(l, n, "basis label l");
    CVector v(static_cast<Eigen::Index>(n));
    const double theta = kTwoPi * l / static_cast<double>(n) + phi;
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (std::size_t k = 0; k < n; ++k)
        v(static_cast<Eigen::Index>(k)) = std::polar(scale, static_cast<double>(k) * theta);
    return StateVector(std::move(v));
}

StateVector conjugate_phi_basis_state(double phi, int l, std::size_t n)
{
    return phi_basis_state(phi, l, n).conj();
}

std::array<BasisSpec, 4> optimal_bases()
{
    std::array<BasisSpec, 4> out;
    for (int i = 0; i < 4; ++i)
        out[static_cast<std::size_t>(i)] = BasisSpec(kTwoPi / 12.0 * i, false);
    return out;
}

StateVector max_entangled(std::size_t n)
{
    if (n < 2)
        throw std::invalid_argument("max_entangled requires dimension >= 2");
    return bell_state(0, 0, n);
}

Operator error_operator(int m, int n, std::size_t dim)
{
    check_index(m, dim, "shift m");
    check_index(n, dim, "phase n");
    CMatrix u = CMatrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (std::size_t k = 0; k < dim; ++k)
        u(static_cast<Eigen::Index>((k + static_cast<std::size_t>(m)) % dim), static_cast<Eigen::Index>(k)) =
            root_of_unity(static_cast<long long>(k) * n, dim);
    return Operator(std::move(u));
}

StateVector bell_state(int m, int n, std::size_t dim)
{
    check_index(m, dim, "shift m");
    check_index(n, dim, "phase n");
    CVector v = CVector::Zero(static_cast<Eigen::Index>(dim * dim));
    const double scale = 1.0 / std::sqrt(static_cast<double>(dim));
    for (std::size_t k = 0; k < dim; ++k)
        v(static_cast<Eigen::Index>(k * dim + (k + static_cast<std::size_t>(m)) % dim)) =
            scale * root_of_unity(static_cast<long long>(k) * n, dim);
    return StateVector(std::move(v), {dim, dim});
}

StateVector tilde_bell_state(int m, int n, double phi)
{
    check_index(m, 3, "shift m");
    check_index(n, 3, "phase n");
    CVector v = CVector::Zero(9);
    for (int k = 0; k < 3; ++k) {
        const StateVector left = phi_basis_state(phi, k);
        const StateVector right = conjugate_phi_basis_state(phi, (k + m) % 3);
        v += root_of_unity(static_cast<long long>(k) * n, 3) * kron(left, right).amps();
    }
    v /= std::sqrt(3.0);
    return StateVector(std::move(v), {3, 3});
}

// ---------------------------------------------------------------------------
// Partial trace

DensityMatrix partial_trace(const StateVector& state, std::span<const std::size_t> keep)
{
    const IndexSplit split(state.factors(), keep);
    // Reshape |psi> into M[kept, traced]; then rho_kept = M M^dagger.
    CMatrix mat = CMatrix::Zero(static_cast<Eigen::Index>(split.kept_dim), static_cast<Eigen::Index>(split.traced_dim));
    for (std::size_t i = 0; i < state.dim(); ++i) {
        const auto [k, t] = split.split(i, state.factors());
        mat(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(t)) = state[i];
    }
    CMatrix rho = mat * mat.adjoint();
    return DensityMatrix(std::move(rho), split.kept_factors);
}

DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const std::size_t> keep)
{
    const IndexSplit split(rho.factors(), keep);
    CMatrix out = CMatrix::Zero(static_cast<Eigen::Index>(split.kept_dim), static_cast<Eigen::Index>(split.kept_dim));
    for (std::size_t r = 0; r < rho.dim(); ++r) {
        const auto [kr, tr] = split.split(r, rho.factors());
        for (std::size_t c = 0; c < rho.dim(); ++c) {
            const auto [kc, tc] = split.split(c, rho.factors());
            if (tr == tc)
                out(static_cast<Eigen::Index>(kr), static_cast<Eigen::Index>(kc)) += rho(r, c);
        }
    }
    return DensityMatrix(std::move(out), split.kept_factors);
}

}  // namespace qkdlab
