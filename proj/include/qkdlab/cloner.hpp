#pragma once

// Heisenberg-Weyl cloning machines: amplitude matrices a_{m,n}, their Fourier
// duals b_{m,n}, the explicit tripartite output state, the reduced clone
// states, and the closed forms for the phase-covariant qutrit family
//
//        ( v x x )
//    a = ( y y y )
//        ( z z z )
//
// Register convention for the tripartite output: A is the clone forwarded to
// Bob, B is the clone kept by Eve, C is the machine ancilla.

#include <array>
#include <span>
#include <vector>

#include "qkdlab/qudit.hpp"

namespace qkdlab {

struct ClonerParams {
    double v = 1.0;
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    /// v^2 + 2x^2 + 3y^2 + 3z^2 (Frobenius norm^2 of the amplitude matrix).
    double norm_squared() const { return v * v + 2 * x * x + 3 * y * y + 3 * z * z; }

    ClonerParams normalized() const;
};

/// The cloner that leaves the input untouched on A (v = 1).
inline constexpr ClonerParams kIdentityCloner{1.0, 0.0, 0.0, 0.0};

/// Rounded optimum of the 3DEB crossing as published; not exactly normalized.
inline constexpr ClonerParams kPublishedOptimum{0.8320, 0.1711, 0.2038, 0.2038};

class AmplitudeMatrix {
public:
    /// Validates that sum |a_{m,n}|^2 = 1 within 1e-10.
    explicit AmplitudeMatrix(CMatrix a);

    std::size_t dim() const { return static_cast<std::size_t>(a_.rows()); }
    const CMatrix& matrix() const { return a_; }
    cplx operator()(std::size_t m, std::size_t n) const
    {
        return a_(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
    }

    /// p_{m,n} = |a_{m,n}|^2.
    Eigen::MatrixXd weights() const { return a_.cwiseAbs2(); }

private:
    CMatrix a_;
};

/// Builds the constrained matrix. Throws std::invalid_argument if the norm
/// deviates from 1 by more than 1e-6 and `normalize` is false; with
/// `normalize` the parameters are rescaled first.
AmplitudeMatrix phi_cloner_matrix(const ClonerParams& params, bool normalize = false);

/// b_{m,n} = (1/N) sum_{x,y} exp(2 pi i (n x - m y) / N) a_{x,y}.
AmplitudeMatrix fourier_dual(const AmplitudeMatrix& a);

/// Inverse of fourier_dual: a_{x,y} = (1/N) sum_{m,n} exp(-2 pi i (n x - m y) / N) b_{m,n}.
AmplitudeMatrix inverse_fourier_dual(const AmplitudeMatrix& b);

struct CloneOutputs {
    StateVector joint;  // factors {N, N, N}: A, B, C
    DensityMatrix rho_A;
    DensityMatrix rho_B;
    /// max entrywise |rho - sum p U psi psi^dag U^dag| over both clones.
    double mixture_discrepancy = 0.0;
};

/// sum_{m,n} a_{m,n} (U_{m,n}|psi>)_A |B_{m,-n}>_{BC}, factors {N, N, N}.
StateVector clone_joint(const AmplitudeMatrix& a, const StateVector& input);

/// clone_joint plus both reduced clone states.
CloneOutputs clone_state(const AmplitudeMatrix& a, const StateVector& input);

/// sum_{m,n} w_{m,n} U_{m,n}|psi><psi|U_{m,n}^dag.
DensityMatrix mixture_state(const Eigen::MatrixXd& weights, const StateVector& psi);

/// <psi|rho|psi>.
double fidelity(const DensityMatrix& rho, const StateVector& psi);

struct FidelityFigures {
    double F_A = 0.0;
    double D_A1 = 0.0;
    double D_A2 = 0.0;
    double F_B = 0.0;
    double D_B1 = 0.0;
    double D_B2 = 0.0;
    /// False when y != z: F_B and D_B then come from the state-level route.
    bool closed_form_B = true;
};

/// Clone fidelities and disturbances on the phi-bases.
FidelityFigures closed_form_report(const ClonerParams& params);

/// Same figures from explicit reduced states for input |l_phi>:
/// F = <l_phi|rho|l_phi>, D1 = <(l+1)_phi|rho|(l+1)_phi>, D2 = <(l-1)_phi|...>.
FidelityFigures state_level_figures(const AmplitudeMatrix& a, double phi, int l);

/// max over the grid and l of |<l_phi|rho_A|l_phi> - sum_m |a_{m,0}|^2|.
/// The reference is the closed-form F_A of the constrained family.
double phase_covariance_check(const AmplitudeMatrix& a, std::span<const double> phi_grid);

/// n equally spaced phases on [0, 2 pi).
std::vector<double> phase_grid(std::size_t n);

using TildeCoefficients = std::array<std::array<double, 3>, 3>;

/// c~_{m,j} = 3y delta_{j0} + (v-y) delta_{m0} + (x-y)(delta_{m1} + delta_{m2}).
/// Cross-checked internally against sum_n a~_{m,n} exp(2 pi i j n / 3) with
/// a~_{n,-m} = a_{m,n}; requires y = z within 1e-10.
TildeCoefficients tilde_coefficients(const ClonerParams& params);

/// The same coefficients straight from the Fourier definition, any a.
CMatrix tilde_coefficients_from_definition(const AmplitudeMatrix& a);

/// P(alpha, beta, gamma) for Alice's trit k: alpha is Bob's outcome on A,
/// beta Eve's outcome on B (Bob's basis), gamma Eve's outcome on C
/// (conjugate basis). Flat index alpha*9 + beta*3 + gamma.
struct EveTable {
    std::array<double, 27> p{};
    /// max |P - P_state| against clone_state expanded in the (phi, phi, phi*) basis at phi = 0.
    double state_discrepancy = 0.0;

    double operator()(int alpha, int beta, int gamma) const
    {
        return p[static_cast<std::size_t>(alpha * 9 + beta * 3 + gamma)];
    }
};

EveTable eve_joint_distribution(const ClonerParams& params, int alice_trit);

/// Outcome probabilities of measuring a three-register state with each
/// register in the basis given by the columns of the matching matrix.
/// Flat index a*d^2 + b*d + c.
std::vector<double> product_basis_probabilities(const StateVector& joint, const CMatrix& basis_a,
                                                const CMatrix& basis_b, const CMatrix& basis_c);

/// Squared amplitudes of clone_state(a, |k_phi>) in the product basis
/// |alpha_phi>_A |beta_phi>_B |gamma_phi*>_C.
std::array<double, 27> state_level_eve_table(const AmplitudeMatrix& a, double phi, int alice_trit);

}  // namespace qkdlab
