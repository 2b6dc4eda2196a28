#pragma once

// Small-dimension qudit linear algebra: pure states, operators, density
// matrices, the phi-bases of a qutrit and the generalized Bell basis.
//
// Multipartite amplitudes are stored row-major over the factor list: the
// first factor is the slowest-varying index.

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace qkdlab {

using cplx = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

/// Absolute tolerance for identities built only from roots of unity.
inline constexpr double kExactTol = 1e-12;
inline constexpr double kPi = 3.14159265358979323846264338327950288;
inline constexpr double kTwoPi = 2.0 * kPi;

/// exp(2 pi i k / n), with k reduced modulo n first so that large or
/// negative k stay exact.
cplx root_of_unity(long long k, std::size_t n);

/// Reduces k into [0, n).
std::size_t mod_index(long long k, std::size_t n);

class StateVector {
public:
    StateVector(CVector amps, std::vector<std::size_t> factors);

    /// Single-system state, factors = {dim}.
    explicit StateVector(CVector amps);

    /// Computational basis vector |index> of a system with the given factors.
    static StateVector basis(std::size_t index, std::vector<std::size_t> factors);

    std::size_t dim() const { return static_cast<std::size_t>(amps_.size()); }
    const std::vector<std::size_t>& factors() const { return factors_; }
    const CVector& amps() const { return amps_; }
    cplx operator[](std::size_t i) const { return amps_(static_cast<Eigen::Index>(i)); }

    double norm() const { return amps_.norm(); }

    /// <this|ket>
    cplx inner(const StateVector& ket) const;

    /// Componentwise complex conjugate in the computational basis.
    StateVector conj() const;

    /// |<this|other>| = 1 within tol (both assumed normalized).
    bool equal_up_to_phase(const StateVector& other, double tol = kExactTol) const;

private:
    CVector amps_;
    std::vector<std::size_t> factors_;
};

/// Tensor product; factor lists are concatenated.
StateVector kron(const StateVector& a, const StateVector& b);

class Operator {
public:
    explicit Operator(CMatrix m);

    std::size_t dim() const { return static_cast<std::size_t>(m_.rows()); }
    const CMatrix& matrix() const { return m_; }

    StateVector apply(const StateVector& psi) const;
    Operator adjoint() const { return Operator(m_.adjoint()); }
    bool is_unitary(double tol = kExactTol) const;

private:
    CMatrix m_;
};

/// Hermitian, unit-trace, positive-semidefinite operator. The constructor
/// validates all three (Hermiticity and trace to 1e-12, eigenvalues >= -1e-10)
/// and throws std::invalid_argument on violation.
class DensityMatrix {
public:
    DensityMatrix(CMatrix m, std::vector<std::size_t> factors);
    explicit DensityMatrix(CMatrix m);

    static DensityMatrix pure(const StateVector& psi);

    std::size_t dim() const { return static_cast<std::size_t>(m_.rows()); }
    const std::vector<std::size_t>& factors() const { return factors_; }
    const CMatrix& matrix() const { return m_; }
    cplx operator()(std::size_t r, std::size_t c) const
    {
        return m_(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
    }

    double trace() const { return m_.trace().real(); }

    /// <psi|rho|psi>, real part.
    double expectation(const StateVector& psi) const;

    /// Largest entrywise modulus of (this - other).
    double max_abs_diff(const DensityMatrix& other) const;

private:
    CMatrix m_;
    std::vector<std::size_t> factors_;
};

/// One of the phi-bases {|l_phi>} (or its conjugate {|l_phi*>}) of a qutrit.
struct BasisSpec {
    double phi = 0.0;  // reduced to [0, 2 pi)
    bool conjugated = false;

    BasisSpec() = default;
    BasisSpec(double phase, bool conj);

    StateVector state(int l) const;

    /// 3x3 matrix whose column l is the l-th basis vector.
    CMatrix columns() const;
};

/// (1/sqrt n) sum_k exp(i k (2 pi l / n + phi)) |k>.
StateVector phi_basis_state(double phi, int l, std::size_t n = 3);

/// (1/sqrt n) sum_k exp(-i k (2 pi l / n + phi)) |k>.
StateVector conjugate_phi_basis_state(double phi, int l, std::size_t n = 3);

/// The four phi-bases used by the entanglement-based protocol, phi_i = 2 pi i / 12.
std::array<BasisSpec, 4> optimal_bases();

/// (1/sqrt n) sum_k |k>|k>, factors {n, n}.
StateVector max_entangled(std::size_t n);

/// U_{m,n} = sum_k exp(2 pi i k n / N) |k+m mod N><k|.
Operator error_operator(int m, int n, std::size_t dim);

/// |B_{m,n}> = N^{-1/2} sum_k exp(2 pi i k n / N) |k>|k+m mod N>.
StateVector bell_state(int m, int n, std::size_t dim);

/// 3^{-1/2} sum_k exp(2 pi i k n / 3) |k_phi>|(k+m)_phi*>: the Bell basis
/// re-expressed in a phi-basis and its conjugate.
StateVector tilde_bell_state(int m, int n, double phi);

/// Reduced state on the subsystems listed in `keep` (any order; the result
/// keeps the original factor order).
DensityMatrix partial_trace(const StateVector& state, std::span<const std::size_t> keep);
DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const std::size_t> keep);

}  // namespace qkdlab
