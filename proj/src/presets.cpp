#include "qkdlab/presets.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace qkdlab {

namespace {

CMatrix computational_basis(std::size_t dim)
{
    return CMatrix::Identity(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
}

// Columns (1/sqrt 3) omega^{l k + s k^2}: s = 0 is the Fourier basis, s = 1, 2
// complete the four mutually unbiased qutrit bases.
CMatrix quadratic_phase_basis(int s)
{
    CMatrix b(3, 3);
    for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l)
            b(k, l) = root_of_unity(l * k + s * k * k, 3) / std::sqrt(3.0);
    return b;
}

CMatrix phi_basis_columns(double phi, std::size_t dim)
{
    CMatrix b(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (std::size_t l = 0; l < dim; ++l)
        b.col(static_cast<Eigen::Index>(l)) = phi_basis_state(phi, static_cast<int>(l), dim).amps();
    return b;
}

std::vector<PresetSpec> build_presets()
{
    std::vector<PresetSpec> out;

    {
        PresetSpec p{Preset::ThreeDEB, "3deb", "3DEB", 3, {"v", "x", "y"}, {0, 1, 1, 2, 2, 2, 2, 2, 2}, {}, 0.7753};
        for (const BasisSpec& b : optimal_bases())
            p.bases.push_back(b.columns());
        out.push_back(std::move(p));
    }
    {
        PresetSpec p{Preset::UniversalQutrit, "universal", "12-state", 3, {"v", "y"}, {0, 1, 1, 1, 1, 1, 1, 1, 1}, {}, 0.7733};
        p.bases.push_back(computational_basis(3));
        for (int s = 0; s < 3; ++s)
            p.bases.push_back(quadratic_phase_basis(s));
        out.push_back(std::move(p));
    }
    {
        PresetSpec p{Preset::TwoMUBQutrit, "2mub", "3D-BB84", 3, {"v", "x", "x'", "y"}, {0, 1, 1, 2, 3, 3, 2, 3, 3}, {}, 0.7887};
        p.bases.push_back(computational_basis(3));
        p.bases.push_back(quadratic_phase_basis(0));
        out.push_back(std::move(p));
    }
    {
        PresetSpec p{Preset::QubitPhaseCovariant, "qubit", "Ekert91", 2, {"v", "x", "y"}, {0, 1, 2, 2}, {},
                     0.5 + 1.0 / std::sqrt(8.0)};
        p.bases.push_back(phi_basis_columns(0.0, 2));
        p.bases.push_back(phi_basis_columns(kPi / 2, 2));
        out.push_back(std::move(p));
    }
    return out;
}

const std::vector<PresetSpec>& presets()
{
    static const std::vector<PresetSpec> table = build_presets();
    return table;
}

constexpr std::array<Preset, 4> kAllPresets{Preset::ThreeDEB, Preset::UniversalQutrit, Preset::TwoMUBQutrit,
                                            Preset::QubitPhaseCovariant};

}  // namespace

const PresetSpec& preset_spec(Preset preset)
{
    for (const PresetSpec& p : presets())
        if (p.id == preset)
            return p;
    throw std::invalid_argument("unknown preset");
}

std::optional<Preset> parse_preset(std::string_view key)
{
    for (const PresetSpec& p : presets())
        if (p.key == key)
            return p.id;
    return std::nullopt;
}

std::span<const Preset> all_presets()
{
    return kAllPresets;
}

AmplitudeMatrix preset_matrix(const PresetSpec& spec, std::span<const double> params)
{
    if (params.size() != spec.param_names.size())
        throw std::invalid_argument("preset '" + spec.key + "' expects " + std::to_string(spec.param_names.size()) +
                                    " parameters");
    const auto d = static_cast<Eigen::Index>(spec.dim);
    CMatrix a(d, d);
    for (Eigen::Index m = 0; m < d; ++m)
        for (Eigen::Index n = 0; n < d; ++n)
            a(m, n) = params[static_cast<std::size_t>(spec.mask[static_cast<std::size_t>(m * d + n)])];
    return AmplitudeMatrix(std::move(a));
}

PresetModel::PresetModel(Preset preset) : spec_(&preset_spec(preset))
{
    const std::size_t d = spec_->dim;
    const auto D = static_cast<Eigen::Index>(d);
    const std::size_t slots = d * d;

    slot_weights_ = Eigen::MatrixXd::Zero(D, D);
    for (const CMatrix& basis : spec_->bases)
        for (Eigen::Index k = 0; k < D; ++k)
            for (std::size_t m = 0; m < d; ++m)
                for (std::size_t n = 0; n < d; ++n) {
                    const CMatrix u = error_operator(static_cast<int>(m), static_cast<int>(n), d).matrix();
                    const cplx overlap = basis.col(k).dot(u * basis.col(k));
                    slot_weights_(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n)) += std::norm(overlap);
                }
    slot_weights_ /= static_cast<double>(spec_->bases.size() * d);

    norm_coeff_.assign(num_params(), 0.0);
    fid_coeff_.assign(num_params(), 0.0);
    for (std::size_t s = 0; s < slots; ++s) {
        const auto i = static_cast<std::size_t>(spec_->mask[s]);
        norm_coeff_[i] += 1.0;
        fid_coeff_[i] += slot_weights_(static_cast<Eigen::Index>(s / d), static_cast<Eigen::Index>(s % d));
    }

    // Amplitude of each slot's term in the measurement product basis
    // (A and B in the basis, C in its conjugate).
    projected_.resize(spec_->bases.size());
    for (std::size_t bi = 0; bi < spec_->bases.size(); ++bi) {
        const CMatrix& basis = spec_->bases[bi];
        const CMatrix conj_basis = basis.conjugate();
        projected_[bi].resize(d);
        for (std::size_t k = 0; k < d; ++k) {
            const StateVector input(basis.col(static_cast<Eigen::Index>(k)));
            for (std::size_t s = 0; s < slots; ++s) {
                const int m = static_cast<int>(s / d), n = static_cast<int>(s % d);
                const StateVector term =
                    kron(error_operator(m, n, d).apply(input), bell_state(m, static_cast<int>(mod_index(-n, d)), d));
                // Contract each register with the conjugated measurement vectors.
                CVector amps(static_cast<Eigen::Index>(d * d * d));
                for (Eigen::Index a = 0; a < D; ++a)
                    for (Eigen::Index b = 0; b < D; ++b)
                        for (Eigen::Index c = 0; c < D; ++c) {
                            cplx acc = 0.0;
                            for (Eigen::Index i = 0; i < D; ++i)
                                for (Eigen::Index j = 0; j < D; ++j)
                                    for (Eigen::Index l = 0; l < D; ++l)
                                        acc += std::conj(basis(i, a) * basis(j, b) * conj_basis(l, c)) *
                                               term.amps()((i * D + j) * D + l);
                            amps((a * D + b) * D + c) = acc;
                        }
                projected_[bi][k].push_back(std::move(amps));
            }
        }
    }
}

double PresetModel::norm_squared(std::span<const double> params) const
{
    double s = 0.0;
    for (std::size_t i = 0; i < params.size(); ++i)
        s += norm_coeff_[i] * params[i] * params[i];
    return s;
}

double PresetModel::fidelity_A(std::span<const double> params) const
{
    double s = 0.0;
    for (std::size_t i = 0; i < params.size(); ++i)
        s += fid_coeff_[i] * params[i] * params[i];
    return s;
}

double PresetModel::fidelity_B(std::span<const double> params) const
{
    const AmplitudeMatrix b = fourier_dual(preset_matrix(*spec_, params));
    return (b.weights().array() * slot_weights_.array()).sum();
}

double PresetModel::state_level_eve_information(std::span<const double> params, LogBase base) const
{
    const std::size_t d = spec_->dim;
    const std::size_t slots = d * d;
    const std::size_t eve_cells = d * d;
    double total = 0.0;
    std::vector<double> joint(d * eve_cells);
    CVector amp(static_cast<Eigen::Index>(d * d * d));
    for (const auto& per_basis : projected_) {
        std::fill(joint.begin(), joint.end(), 0.0);
        for (std::size_t k = 0; k < d; ++k) {
            amp.setZero();
            for (std::size_t s = 0; s < slots; ++s)
                amp += params[static_cast<std::size_t>(spec_->mask[s])] * per_basis[k][s];
            // Sum out Bob's register A.
            for (std::size_t a = 0; a < d; ++a)
                for (std::size_t e = 0; e < eve_cells; ++e)
                    joint[k * eve_cells + e] += std::norm(amp(static_cast<Eigen::Index>(a * eve_cells + e))) / static_cast<double>(d);
        }
        total += mutual_information(joint, d, eve_cells, base);
    }
    return total / static_cast<double>(projected_.size());
}

double PresetModel::eve_information(std::span<const double> params, LogBase base) const
{
    if (spec_->id == Preset::ThreeDEB)
        return qkdlab::eve_information(ClonerParams{params[0], params[1], params[2], params[2]}, base);
    return state_level_eve_information(params, base);
}

double PresetModel::bob_information(std::span<const double> params, LogBase base) const
{
    return qkdlab::bob_information(std::min(1.0, fidelity_A(params)), base, spec_->dim);
}

}  // namespace qkdlab
