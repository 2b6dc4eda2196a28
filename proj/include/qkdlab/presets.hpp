#pragma once

// Parametrized cloner families for the protocols being compared. Each preset
// ties every slot a_{m,n} of the amplitude matrix to one real parameter and
// lists the measurement bases the protocol uses; fidelities and Eve's
// information are averaged over those bases.

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qkdlab/cloner.hpp"
#include "qkdlab/information.hpp"

namespace qkdlab {

enum class Preset { ThreeDEB, UniversalQutrit, TwoMUBQutrit, QubitPhaseCovariant };

struct PresetSpec {
    Preset id;
    std::string key;       // CLI name
    std::string protocol;  // row label in the error-rate table
    std::size_t dim;
    std::vector<std::string> param_names;
    /// mask[m * dim + n] = index of the parameter that fills a_{m,n}.
    std::vector<int> mask;
    /// Measurement bases as column matrices (column l = basis vector l).
    std::vector<CMatrix> bases;
    /// Crossing fidelity reported in the literature for this protocol.
    double published_crossing;
};

const PresetSpec& preset_spec(Preset preset);
std::optional<Preset> parse_preset(std::string_view key);
std::span<const Preset> all_presets();

/// Fills the mask with the given parameters; requires unit Frobenius norm.
AmplitudeMatrix preset_matrix(const PresetSpec& spec, std::span<const double> params);

/// Precomputed evaluator for one preset: fidelity and Eve's information as
/// functions of the preset parameters.
class PresetModel {
public:
    explicit PresetModel(Preset preset);

    const PresetSpec& spec() const { return *spec_; }
    std::size_t num_params() const { return spec_->param_names.size(); }

    /// norm^2 = sum_i norm_coefficients[i] * theta_i^2
    const std::vector<double>& norm_coefficients() const { return norm_coeff_; }
    /// F_A = sum_i fidelity_coefficients[i] * theta_i^2
    const std::vector<double>& fidelity_coefficients() const { return fid_coeff_; }

    double norm_squared(std::span<const double> params) const;
    double fidelity_A(std::span<const double> params) const;

    /// Fidelity of Eve's clone, from the Fourier-dual weights.
    double fidelity_B(std::span<const double> params) const;

    /// I(Alice's trit ; Eve's (B, C) outcomes) with Eve measuring B in Bob's
    /// basis and C in its complex conjugate, averaged over the preset bases.
    double state_level_eve_information(std::span<const double> params, LogBase base) const;

    /// Closed form for ThreeDEB, state-level route otherwise.
    double eve_information(std::span<const double> params, LogBase base) const;

    double bob_information(std::span<const double> params, LogBase base) const;

private:
    const PresetSpec* spec_;
    std::vector<double> norm_coeff_;
    std::vector<double> fid_coeff_;
    Eigen::MatrixXd slot_weights_;  // w_{m,n}: mean |<e|U_{m,n}|e>|^2 over the bases
    // projected_[basis][k][slot] = (U_slot|e_k> (x) |B_slot'>) in the product measurement basis
    std::vector<std::vector<std::vector<CVector>>> projected_;
};

}  // namespace qkdlab
