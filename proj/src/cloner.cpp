#include "qkdlab/cloner.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace qkdlab {

namespace {

constexpr double kNormTol = 1e-10;

void require_normalized(const ClonerParams& p, const char* where)
{
    if (std::abs(p.norm_squared() - 1.0) > kNormTol)
        throw std::invalid_argument(std::string(where) + ": cloner parameters are not normalized (norm^2 = " +
                                    std::to_string(p.norm_squared()) + ")");
}

void require_symmetric(const ClonerParams& p, const char* where)
{
    if (std::abs(p.y - p.z) > kNormTol)
        throw std::invalid_argument(std::string(where) + ": requires y = z");
}

AmplitudeMatrix dual_transform(const AmplitudeMatrix& in, int sign)
{
    const std::size_t n = in.dim();
    const auto nn = static_cast<long long>(n);
    CMatrix out = CMatrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (long long m = 0; m < nn; ++m)
        for (long long k = 0; k < nn; ++k) {
            cplx acc = 0.0;
            for (long long x = 0; x < nn; ++x)
                for (long long y = 0; y < nn; ++y)
                    acc += root_of_unity(sign * (k * x - m * y), n) * in(static_cast<std::size_t>(x), static_cast<std::size_t>(y));
            out(m, k) = acc / static_cast<double>(n);
        }
    return AmplitudeMatrix(std::move(out));
}

}  // namespace

ClonerParams ClonerParams::normalized() const
{
    const double s = std::sqrt(norm_squared());
    if (s == 0.0)
        throw std::invalid_argument("cannot normalize the zero cloner");
    return {v / s, x / s, y / s, z / s};
}

AmplitudeMatrix::AmplitudeMatrix(CMatrix a) : a_(std::move(a))
{
    if (a_.rows() != a_.cols() || a_.rows() < 2)
        throw std::invalid_argument("amplitude matrix must be square with dimension >= 2");
    if (std::abs(a_.squaredNorm() - 1.0) > kNormTol)
        throw std::invalid_argument("amplitude matrix is not normalized (sum |a|^2 = " +
                                    std::to_string(a_.squaredNorm()) + ")");
}

AmplitudeMatrix phi_cloner_matrix(const ClonerParams& params, bool normalize)
{
    if (!normalize && std::abs(params.norm_squared() - 1.0) > 1e-6)
        throw std::invalid_argument("cloner parameters violate v^2 + 2x^2 + 3y^2 + 3z^2 = 1 (got " +
                                    std::to_string(params.norm_squared()) + ")");
    // Deviations below 1e-6 are rescaled away as well.
    const ClonerParams p = params.normalized();
    CMatrix a(3, 3);
    a << p.v, p.x, p.x,
         p.y, p.y, p.y,
         p.z, p.z, p.z;
    return AmplitudeMatrix(std::move(a));
}

AmplitudeMatrix fourier_dual(const AmplitudeMatrix& a)
{
    return dual_transform(a, +1);
}

AmplitudeMatrix inverse_fourier_dual(const AmplitudeMatrix& b)
{
    // The kernel exp(2 pi i (n x - m y)/N)/N is unitary, so its inverse is the adjoint.
    const std::size_t n = b.dim();
    const auto nn = static_cast<long long>(n);
    CMatrix out = CMatrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (long long x = 0; x < nn; ++x)
        for (long long y = 0; y < nn; ++y) {
            cplx acc = 0.0;
            for (long long m = 0; m < nn; ++m)
                for (long long k = 0; k < nn; ++k)
                    acc += root_of_unity(-(k * x - m * y), n) * b(static_cast<std::size_t>(m), static_cast<std::size_t>(k));
            out(x, y) = acc / static_cast<double>(n);
        }
    return AmplitudeMatrix(std::move(out));
}

StateVector clone_joint(const AmplitudeMatrix& a, const StateVector& input)
{
    const std::size_t n = a.dim();
    if (input.dim() != n)
        throw std::invalid_argument("clone input dimension does not match the cloner");
    CVector joint = CVector::Zero(static_cast<Eigen::Index>(n * n * n));
    for (std::size_t m = 0; m < n; ++m)
        for (std::size_t k = 0; k < n; ++k) {
            const cplx amp = a(m, k);
            if (amp == cplx(0.0))
                continue;
            const int mi = static_cast<int>(m), ki = static_cast<int>(k);
            const StateVector shifted = error_operator(mi, ki, n).apply(input);
            const StateVector bell = bell_state(mi, static_cast<int>(mod_index(-ki, n)), n);
            joint += amp * kron(shifted, bell).amps();
        }
    return StateVector(std::move(joint), {n, n, n});
}

DensityMatrix mixture_state(const Eigen::MatrixXd& weights, const StateVector& psi)
{
    const std::size_t n = psi.dim();
    if (static_cast<std::size_t>(weights.rows()) != n || static_cast<std::size_t>(weights.cols()) != n)
        throw std::invalid_argument("mixture weights must be N x N for an N-level state");
    CMatrix rho = CMatrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t m = 0; m < n; ++m)
        for (std::size_t k = 0; k < n; ++k) {
            const CVector s = error_operator(static_cast<int>(m), static_cast<int>(k), n).matrix() * psi.amps();
            rho += weights(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(k)) * (s * s.adjoint());
        }
    return DensityMatrix(std::move(rho), psi.factors());
}

CloneOutputs clone_state(const AmplitudeMatrix& a, const StateVector& input)
{
    if (std::abs(input.norm() - 1.0) > kExactTol)
        throw std::invalid_argument("clone input must be normalized");
    StateVector joint = clone_joint(a, input);
    const std::array<std::size_t, 1> keep_a{0}, keep_b{1};
    DensityMatrix rho_a = partial_trace(joint, keep_a);
    DensityMatrix rho_b = partial_trace(joint, keep_b);

    const DensityMatrix mix_a = mixture_state(a.weights(), input);
    const DensityMatrix mix_b = mixture_state(fourier_dual(a).weights(), input);
    const double disc = std::max(rho_a.max_abs_diff(mix_a), rho_b.max_abs_diff(mix_b));
    return CloneOutputs{std::move(joint), std::move(rho_a), std::move(rho_b), disc};
}

double fidelity(const DensityMatrix& rho, const StateVector& psi)
{
    return rho.expectation(psi);
}

FidelityFigures closed_form_report(const ClonerParams& params)
{
    require_normalized(params, "closed_form_report");
    const auto& [v, x, y, z] = params;
    FidelityFigures f;
    f.F_A = v * v + y * y + z * z;
    f.D_A1 = f.D_A2 = x * x + y * y + z * z;
    if (std::abs(f.F_A + f.D_A1 + f.D_A2 - 1.0) > kNormTol)
        throw std::logic_error("closed_form_report: F_A + D_A1 + D_A2 != 1");

    if (std::abs(y - z) <= kNormTol) {
        f.F_B = (v * v + 2 * x * x + 12 * y * y + 8 * x * y + 4 * v * y) / 3.0;
        f.D_B1 = f.D_B2 = (v * v + 2 * x * x + 3 * y * y - 4 * x * y - 2 * v * y) / 3.0;
    } else {
        const FidelityFigures s = state_level_figures(phi_cloner_matrix(params), 0.0, 0);
        f.F_B = s.F_B;
        f.D_B1 = s.D_B1;
        f.D_B2 = s.D_B2;
        f.closed_form_B = false;
    }
    return f;
}

FidelityFigures state_level_figures(const AmplitudeMatrix& a, double phi, int l)
{
    if (a.dim() != 3)
        throw std::invalid_argument("state_level_figures is defined for qutrit cloners");
    const StateVector psi = phi_basis_state(phi, l);
    const StateVector up = phi_basis_state(phi, (l + 1) % 3);
    const StateVector down = phi_basis_state(phi, (l + 2) % 3);
    const CloneOutputs out = clone_state(a, psi);
    FidelityFigures f;
    f.F_A = fidelity(out.rho_A, psi);
    f.D_A1 = fidelity(out.rho_A, up);
    f.D_A2 = fidelity(out.rho_A, down);
    f.F_B = fidelity(out.rho_B, psi);
    f.D_B1 = fidelity(out.rho_B, up);
    f.D_B2 = fidelity(out.rho_B, down);
    f.closed_form_B = false;
    return f;
}

std::vector<double> phase_grid(std::size_t n)
{
    std::vector<double> grid(n);
    for (std::size_t i = 0; i < n; ++i)
        grid[i] = kTwoPi * static_cast<double>(i) / static_cast<double>(n);
    return grid;
}

double phase_covariance_check(const AmplitudeMatrix& a, std::span<const double> phi_grid)
{
    if (a.dim() != 3)
        throw std::invalid_argument("phase_covariance_check is defined for qutrit cloners");
    const double reference = a.weights().col(0).sum();
    const std::array<std::size_t, 1> keep_a{0};
    double worst = 0.0;
    for (double phi : phi_grid)
        for (int l = 0; l < 3; ++l) {
            const StateVector psi = phi_basis_state(phi, l);
            const DensityMatrix rho_a = partial_trace(clone_joint(a, psi), keep_a);
            worst = std::max(worst, std::abs(fidelity(rho_a, psi) - reference));
        }
    return worst;
}

CMatrix tilde_coefficients_from_definition(const AmplitudeMatrix& a)
{
    if (a.dim() != 3)
        throw std::invalid_argument("tilde coefficients are defined for qutrit cloners");
    // a~_{p,q} = a_{-q, p}
    CMatrix c = CMatrix::Zero(3, 3);
    for (int m = 0; m < 3; ++m)
        for (int j = 0; j < 3; ++j)
            for (int n = 0; n < 3; ++n)
                c(m, j) += a(mod_index(-n, 3), static_cast<std::size_t>(m)) * root_of_unity(j * n, 3);
    return c;
}

TildeCoefficients tilde_coefficients(const ClonerParams& params)
{
    require_symmetric(params, "tilde_coefficients");
    const auto& [v, x, y, z] = params;
    TildeCoefficients c{};
    for (int m = 0; m < 3; ++m)
        for (int j = 0; j < 3; ++j)
            c[m][j] = 3 * y * (j == 0) + (v - y) * (m == 0) + (x - y) * (m != 0);

    // Same structure as the normalized matrix, scaled back to the raw parameters.
    const double scale = std::sqrt(params.norm_squared());
    const CMatrix def = tilde_coefficients_from_definition(phi_cloner_matrix(params, true)) * scale;
    for (int m = 0; m < 3; ++m)
        for (int j = 0; j < 3; ++j)
            if (std::abs(def(m, j) - c[m][j]) > kExactTol)
                throw std::logic_error("tilde coefficient closed form disagrees with its Fourier definition");
    return c;
}

std::vector<double> product_basis_probabilities(const StateVector& joint, const CMatrix& basis_a,
                                                const CMatrix& basis_b, const CMatrix& basis_c)
{
    const auto d = static_cast<std::size_t>(basis_a.rows());
    if (joint.dim() != d * d * d || basis_b.rows() != basis_a.rows() || basis_c.rows() != basis_a.rows())
        throw std::invalid_argument("product basis does not match the joint state");
    // T[a,b,c] = sum_{i,j,k} conj(A_ia) conj(B_jb) conj(C_kc) psi_{ijk}, one register at a time.
    const auto D = static_cast<Eigen::Index>(d);
    CMatrix stage1(D, D * D);  // [a, (j,k)]
    for (Eigen::Index jk = 0; jk < D * D; ++jk)
        for (Eigen::Index a = 0; a < D; ++a) {
            cplx acc = 0.0;
            for (Eigen::Index i = 0; i < D; ++i)
                acc += std::conj(basis_a(i, a)) * joint.amps()(i * D * D + jk);
            stage1(a, jk) = acc;
        }
    std::vector<double> probs(d * d * d);
    for (Eigen::Index a = 0; a < D; ++a)
        for (Eigen::Index b = 0; b < D; ++b)
            for (Eigen::Index c = 0; c < D; ++c) {
                cplx acc = 0.0;
                for (Eigen::Index j = 0; j < D; ++j)
                    for (Eigen::Index k = 0; k < D; ++k)
                        acc += std::conj(basis_b(j, b)) * std::conj(basis_c(k, c)) * stage1(a, j * D + k);
                probs[static_cast<std::size_t>((a * D + b) * D + c)] = std::norm(acc);
            }
    return probs;
}

std::array<double, 27> state_level_eve_table(const AmplitudeMatrix& a, double phi, int alice_trit)
{
    const BasisSpec plain(phi, false), conj(phi, true);
    const StateVector joint = clone_joint(a, plain.state(alice_trit));
    const std::vector<double> probs = product_basis_probabilities(joint, plain.columns(), plain.columns(), conj.columns());
    std::array<double, 27> out{};
    std::copy(probs.begin(), probs.end(), out.begin());
    return out;
}

EveTable eve_joint_distribution(const ClonerParams& params, int alice_trit)
{
    require_symmetric(params, "eve_joint_distribution");
    require_normalized(params, "eve_joint_distribution");
    if (alice_trit < 0 || alice_trit > 2)
        throw std::out_of_range("alice trit must lie in [0, 2]");
    const TildeCoefficients c = tilde_coefficients(params);
    EveTable t;
    for (int mp = 0; mp < 3; ++mp)
        for (int beta = 0; beta < 3; ++beta) {
            const int alpha = (alice_trit + mp) % 3;
            const int gamma = (beta + mp) % 3;
            const double amp = c[mp][mod_index(alice_trit - beta, 3)];
            t.p[static_cast<std::size_t>(alpha * 9 + beta * 3 + gamma)] = amp * amp / 3.0;
        }
    const std::array<double, 27> state = state_level_eve_table(phi_cloner_matrix(params), 0.0, alice_trit);
    for (std::size_t i = 0; i < 27; ++i)
        t.state_discrepancy = std::max(t.state_discrepancy, std::abs(state[i] - t.p[i]));
    return t;
}

}  // namespace qkdlab
