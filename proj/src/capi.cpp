#include "qkdlab/qkdlab.h"

#include <cmath>
#include <cstring>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>

#include "qkdlab/protocol_sim.hpp"
#include "qkdlab/security.hpp"
#include "serialize.hpp"

using namespace qkdlab;

struct qkd_cloner {
    AmplitudeMatrix matrix;
    std::optional<ClonerParams> params;  // set for the phase-covariant family
};

struct qkd_sim_config {
    SimConfig config;
};

struct qkd_sim_result {
    SimResult result;
};

namespace {

thread_local std::string g_last_error;

qkd_status fail(qkd_status code, const std::string& message)
{
    g_last_error = message;
    return code;
}

// Runs f, translating exceptions to status codes.
template <class F>
qkd_status guarded(F&& f)
{
    try {
        g_last_error.clear();
        f();
        return QKD_OK;
    } catch (const NoCrossingError& e) {
        return fail(QKD_ERR_NO_CROSSING, e.what());
    } catch (const ConvergenceError& e) {
        return fail(QKD_ERR_NOT_CONVERGED, e.what());
    } catch (const nlohmann::json::exception& e) {
        return fail(QKD_ERR_PARSE, e.what());
    } catch (const std::out_of_range& e) {
        return fail(QKD_ERR_OUT_OF_RANGE, e.what());
    } catch (const std::invalid_argument& e) {
        return fail(QKD_ERR_INVALID_ARGUMENT, e.what());
    } catch (const std::exception& e) {
        return fail(QKD_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(QKD_ERR_INTERNAL, "unknown error");
    }
}

void need(const void* p, const char* what)
{
    if (p == nullptr)
        throw std::invalid_argument(std::string(what) + " must not be null");
}

char* dup_string(const std::string& s)
{
    char* out = new char[s.size() + 1];
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

void emit(const nlohmann::json& j, char** out)
{
    need(out, "output pointer");
    *out = dup_string(j.dump());
}

LogBase to_base(qkd_log_base b)
{
    switch (b) {
    case QKD_LOG_2: return LogBase::Two;
    case QKD_LOG_3: return LogBase::Three;
    case QKD_LOG_E: return LogBase::E;
    }
    throw std::invalid_argument("unknown log base");
}

Preset to_preset(qkd_preset p)
{
    switch (p) {
    case QKD_PRESET_3DEB: return Preset::ThreeDEB;
    case QKD_PRESET_UNIVERSAL: return Preset::UniversalQutrit;
    case QKD_PRESET_2MUB: return Preset::TwoMUBQutrit;
    case QKD_PRESET_QUBIT: return Preset::QubitPhaseCovariant;
    }
    throw std::invalid_argument("unknown preset");
}

qkd_preset from_preset(Preset p)
{
    switch (p) {
    case Preset::ThreeDEB: return QKD_PRESET_3DEB;
    case Preset::UniversalQutrit: return QKD_PRESET_UNIVERSAL;
    case Preset::TwoMUBQutrit: return QKD_PRESET_2MUB;
    case Preset::QubitPhaseCovariant: return QKD_PRESET_QUBIT;
    }
    return QKD_PRESET_3DEB;
}

const ClonerParams& phase_covariant(const qkd_cloner* c)
{
    need(c, "cloner");
    if (!c->params)
        throw std::invalid_argument("operation needs a phase-covariant cloner");
    return *c->params;
}

void copy_params(const std::vector<double>& src, double* dst, int* n)
{
    if (src.size() > QKD_MAX_PARAMS)
        throw std::logic_error("too many preset parameters");
    for (std::size_t k = 0; k < QKD_MAX_PARAMS; ++k)
        dst[k] = k < src.size() ? src[k] : 0.0;
    *n = static_cast<int>(src.size());
}

void fill(const FidelityFigures& f, qkd_fidelities* out)
{
    *out = {f.F_A, f.D_A1, f.D_A2, f.F_B, f.D_B1, f.D_B2, f.closed_form_B ? 1 : 0};
}

}  // namespace

extern "C" {

const char* qkd_version(void)
{
    return QKDLAB_VERSION_STRING;
}

const char* qkd_last_error(void)
{
    return g_last_error.c_str();
}

const char* qkd_status_name(qkd_status status)
{
    switch (status) {
    case QKD_OK: return "ok";
    case QKD_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case QKD_ERR_OUT_OF_RANGE: return "out_of_range";
    case QKD_ERR_NO_CROSSING: return "no_crossing";
    case QKD_ERR_NOT_CONVERGED: return "not_converged";
    case QKD_ERR_PARSE: return "parse_error";
    case QKD_ERR_INTERNAL: return "internal_error";
    }
    return "unknown";
}

void qkd_string_free(char* s)
{
    delete[] s;
}

qkd_status qkd_parse_preset(const char* key, qkd_preset* out)
{
    return guarded([&] {
        need(key, "preset key");
        need(out, "output");
        const auto p = parse_preset(key);
        if (!p)
            throw std::invalid_argument(std::string("unknown preset '") + key + "'");
        *out = from_preset(*p);
    });
}

qkd_status qkd_preset_key(qkd_preset preset, const char** out)
{
    return guarded([&] {
        need(out, "output");
        *out = preset_spec(to_preset(preset)).key.c_str();
    });
}

qkd_status qkd_parse_log_base(const char* text, qkd_log_base* out)
{
    return guarded([&] {
        need(text, "log base");
        need(out, "output");
        const auto b = parse_log_base(text);
        if (!b)
            throw std::invalid_argument(std::string("unknown log base '") + text + "'");
        *out = *b == LogBase::Two ? QKD_LOG_2 : *b == LogBase::Three ? QKD_LOG_3 : QKD_LOG_E;
    });
}

qkd_status qkd_phi_basis_state(double phi, int l, int conjugate, double* re, double* im)
{
    return guarded([&] {
        need(re, "re");
        need(im, "im");
        const StateVector s = conjugate ? conjugate_phi_basis_state(phi, l) : phi_basis_state(phi, l);
        for (Eigen::Index k = 0; k < 3; ++k) {
            re[k] = s.amps()(k).real();
            im[k] = s.amps()(k).imag();
        }
    });
}

qkd_status qkd_bases_json(char** out)
{
    return guarded([&] { emit(io::bases_json(), out); });
}

qkd_status qkd_cloner_create(double v, double x, double y, double z, int normalize, qkd_cloner** out)
{
    return guarded([&] {
        need(out, "output");
        const ClonerParams raw{v, x, y, z};
        const AmplitudeMatrix a = phi_cloner_matrix(raw, normalize != 0);
        *out = new qkd_cloner{a, raw.normalized()};
    });
}

qkd_status qkd_cloner_create_published(qkd_cloner** out)
{
    const ClonerParams p = kPublishedOptimum;
    return qkd_cloner_create(p.v, p.x, p.y, p.z, 1, out);
}

qkd_status qkd_cloner_create_matrix(int dim, const double* re, const double* im, qkd_cloner** out)
{
    return guarded([&] {
        need(re, "re");
        need(im, "im");
        need(out, "output");
        if (dim < 2 || dim > 16)
            throw std::out_of_range("dimension must lie in [2, 16]");
        CMatrix a(dim, dim);
        for (int m = 0; m < dim; ++m)
            for (int n = 0; n < dim; ++n)
                a(m, n) = cplx(re[m * dim + n], im[m * dim + n]);
        *out = new qkd_cloner{AmplitudeMatrix(std::move(a)), std::nullopt};
    });
}

void qkd_cloner_free(qkd_cloner* c)
{
    delete c;
}

qkd_status qkd_cloner_params(const qkd_cloner* c, double out[4])
{
    return guarded([&] {
        need(out, "output");
        const ClonerParams& p = phase_covariant(c);
        out[0] = p.v;
        out[1] = p.x;
        out[2] = p.y;
        out[3] = p.z;
    });
}

qkd_status qkd_cloner_fidelities(const qkd_cloner* c, qkd_fidelities* out)
{
    return guarded([&] {
        need(out, "output");
        fill(closed_form_report(phase_covariant(c)), out);
    });
}

qkd_status qkd_cloner_state_fidelities(const qkd_cloner* c, double phi, int l, qkd_fidelities* out)
{
    return guarded([&] {
        need(c, "cloner");
        need(out, "output");
        fill(state_level_figures(c->matrix, phi, l), out);
    });
}

qkd_status qkd_cloner_mixture_discrepancy(const qkd_cloner* c, double phi, int l, double* out)
{
    return guarded([&] {
        need(c, "cloner");
        need(out, "output");
        *out = clone_state(c->matrix, phi_basis_state(phi, l, c->matrix.dim())).mixture_discrepancy;
    });
}

qkd_status qkd_cloner_phase_covariance(const qkd_cloner* c, int grid_points, double* out)
{
    return guarded([&] {
        need(c, "cloner");
        need(out, "output");
        if (grid_points < 1)
            throw std::out_of_range("grid needs at least one point");
        const std::vector<double> grid = phase_grid(static_cast<std::size_t>(grid_points));
        *out = phase_covariance_check(c->matrix, grid);
    });
}

qkd_status qkd_cloner_dual(const qkd_cloner* c, double* re, double* im, size_t capacity)
{
    return guarded([&] {
        need(c, "cloner");
        need(re, "re");
        need(im, "im");
        const std::size_t d = c->matrix.dim();
        if (capacity < d * d)
            throw std::out_of_range("output buffers are too small");
        const AmplitudeMatrix b = fourier_dual(c->matrix);
        for (std::size_t m = 0; m < d; ++m)
            for (std::size_t n = 0; n < d; ++n) {
                re[m * d + n] = b(m, n).real();
                im[m * d + n] = b(m, n).imag();
            }
    });
}

qkd_status qkd_cloner_eve_table(const qkd_cloner* c, int alice_trit, double out[27])
{
    return guarded([&] {
        need(out, "output");
        const EveTable t = eve_joint_distribution(phase_covariant(c), alice_trit);
        for (std::size_t k = 0; k < 27; ++k)
            out[k] = t.p[k];
    });
}

qkd_status qkd_cloner_information(const qkd_cloner* c, qkd_log_base base, qkd_information* out)
{
    return guarded([&] {
        need(out, "output");
        const InfoReport r = information_report(phase_covariant(c), to_base(base));
        *out = {r.I_AB, r.I_AE, r.I_BE, r.R_bound};
    });
}

qkd_status qkd_cloner_report_json(const qkd_cloner* c, qkd_log_base base, char** out)
{
    return guarded([&] {
        const ClonerParams& p = phase_covariant(c);
        nlohmann::json j = io::to_json(information_report(p, to_base(base)));
        j["params"] = io::to_json(p);
        j["amplitudes"] = io::to_json(c->matrix);
        j["computational_basis_fidelity"] = io::number(state_level_figures(c->matrix, 0.0, 0).F_A);
        const auto grid = phase_grid(24);
        j["phase_covariance_deviation"] = io::number(phase_covariance_check(c->matrix, grid));
        emit(j, out);
    });
}

qkd_status qkd_bob_information(double fidelity, qkd_log_base base, int dim, double* out)
{
    return guarded([&] {
        need(out, "output");
        if (dim < 2)
            throw std::out_of_range("dimension must be at least 2");
        *out = bob_information(fidelity, to_base(base), static_cast<std::size_t>(dim));
    });
}

qkd_status qkd_crossing_point(qkd_preset preset, qkd_log_base base, qkd_crossing* out)
{
    return guarded([&] {
        need(out, "output");
        const CrossingResult r = crossing_point(to_preset(preset), to_base(base));
        out->preset = preset;
        out->F_A_star = r.F_A_star;
        copy_params(r.params, out->params, &out->num_params);
        out->I_AB = r.I_AB;
        out->I_AE = r.I_AE;
        out->residual = r.residual;
        out->iterations = r.iterations;
    });
}

qkd_status qkd_crossing_json(qkd_preset preset, qkd_log_base base, char** out)
{
    return guarded([&] { emit(io::to_json(crossing_point(to_preset(preset), to_base(base))), out); });
}

qkd_status qkd_symmetric_point(qkd_preset preset, qkd_symmetric* out)
{
    return guarded([&] {
        need(out, "output");
        const SymmetricResult r = symmetric_point(to_preset(preset));
        out->preset = preset;
        out->fidelity = r.fidelity;
        out->F_A = r.F_A;
        out->F_B = r.F_B;
        copy_params(r.params, out->params, &out->num_params);
    });
}

qkd_status qkd_symmetric_json(qkd_preset preset, char** out)
{
    return guarded([&] { emit(io::to_json(symmetric_point(to_preset(preset))), out); });
}

qkd_status qkd_get_thresholds(qkd_thresholds* out)
{
    return guarded([&] {
        need(out, "output");
        const Thresholds t = thresholds();
        *out = {t.bell_visibility,         t.bell_fidelity,           t.qubit_fidelity,
                t.security_fidelity_3deb, t.kaszlikowski_visibility, t.kaszlikowski_fidelity};
    });
}

qkd_status qkd_thresholds_json(char** out)
{
    return guarded([&] { emit(io::to_json(thresholds()), out); });
}

qkd_status qkd_fidelity_from_visibility(double visibility, double* out)
{
    return guarded([&] {
        need(out, "output");
        if (!(visibility >= 0.0 && visibility <= 1.0))
            throw std::out_of_range("visibility must lie in [0, 1]");
        *out = fidelity_from_visibility(visibility);
    });
}

qkd_status qkd_error_rate_table(qkd_log_base base, qkd_table_row* rows, size_t capacity, size_t* count)
{
    return guarded([&] {
        need(rows, "rows");
        need(count, "count");
        const auto table = error_rate_table(to_base(base));
        if (capacity < table.size())
            throw std::out_of_range("row buffer is too small");
        for (std::size_t k = 0; k < table.size(); ++k) {
            qkd_table_row& r = rows[k];
            r.preset = from_preset(table[k].preset);
            std::memset(r.protocol, 0, sizeof r.protocol);
            std::strncpy(r.protocol, table[k].protocol.c_str(), sizeof r.protocol - 1);
            r.F_A_star = table[k].F_A_star;
            r.error_rate = table[k].error_rate;
            r.paper_value = table[k].paper_value;
            r.delta = table[k].delta;
        }
        *count = table.size();
    });
}

qkd_status qkd_error_rate_table_json(qkd_log_base base, char** out)
{
    return guarded([&] { emit(io::to_json(error_rate_table(to_base(base))), out); });
}

qkd_status qkd_sweep_point(double fidelity, qkd_log_base base, qkd_sweep_row* out)
{
    return guarded([&] {
        need(out, "output");
        const SweepRow r = sweep_point(fidelity, to_base(base));
        out->F_A = r.F_A;
        for (std::size_t k = 0; k < 3; ++k)
            out->params[k] = r.params[k];
        out->F_B = r.report.figures.F_B;
        out->I_AB = r.report.I_AB;
        out->I_AE = r.report.I_AE;
        out->I_BE = r.report.I_BE;
        out->R_bound = r.report.R_bound;
    });
}

qkd_status qkd_sweep_point_json(double fidelity, qkd_log_base base, char** out)
{
    return guarded([&] { emit(io::to_json(sweep_point(fidelity, to_base(base))), out); });
}

qkd_status qkd_sim_config_create(qkd_sim_config** out)
{
    return guarded([&] {
        need(out, "output");
        *out = new qkd_sim_config{};
    });
}

qkd_status qkd_sim_config_from_json(const char* text, qkd_sim_config** out)
{
    return guarded([&] {
        need(text, "text");
        need(out, "output");
        *out = new qkd_sim_config{io::sim_config_from_json(nlohmann::json::parse(text))};
    });
}

qkd_status qkd_sim_config_to_json(const qkd_sim_config* cfg, char** out)
{
    return guarded([&] {
        need(cfg, "config");
        emit(io::to_json(cfg->config), out);
    });
}

void qkd_sim_config_free(qkd_sim_config* cfg)
{
    delete cfg;
}

qkd_status qkd_sim_config_set_rounds(qkd_sim_config* cfg, uint64_t rounds)
{
    return guarded([&] {
        need(cfg, "config");
        if (rounds < 1)
            throw std::invalid_argument("rounds must be at least 1");
        cfg->config.rounds = rounds;
    });
}

qkd_status qkd_sim_config_set_seed(qkd_sim_config* cfg, uint64_t seed)
{
    return guarded([&] {
        need(cfg, "config");
        cfg->config.seed = seed;
    });
}

qkd_status qkd_sim_config_set_threads(qkd_sim_config* cfg, unsigned threads)
{
    return guarded([&] {
        need(cfg, "config");
        cfg->config.threads = threads;
    });
}

qkd_status qkd_sim_config_set_ideal(qkd_sim_config* cfg)
{
    return guarded([&] {
        need(cfg, "config");
        cfg->config.channel = IdealChannel{};
    });
}

qkd_status qkd_sim_config_set_depolarizing(qkd_sim_config* cfg, double visibility)
{
    return guarded([&] {
        need(cfg, "config");
        if (!(visibility >= 0.0 && visibility <= 1.0))
            throw std::out_of_range("visibility must lie in [0, 1]");
        cfg->config.channel = DepolarizingChannel{visibility};
    });
}

qkd_status qkd_sim_config_set_attack(qkd_sim_config* cfg, const qkd_cloner* cloner)
{
    return guarded([&] {
        need(cfg, "config");
        cfg->config.channel = CloningAttack{phase_covariant(cloner)};
    });
}

qkd_status qkd_sim_config_set_weights(qkd_sim_config* cfg, int party, const double weights[4])
{
    return guarded([&] {
        need(cfg, "config");
        need(weights, "weights");
        if (party != 0 && party != 1)
            throw std::out_of_range("party must be 0 (Alice) or 1 (Bob)");
        SimConfig trial = cfg->config;
        auto& w = party == 0 ? trial.alice_weights : trial.bob_weights;
        for (std::size_t k = 0; k < 4; ++k)
            w[k] = weights[k];
        trial.validate();
        cfg->config = trial;
    });
}

qkd_status qkd_sim_config_set_same_index(qkd_sim_config* cfg)
{
    return guarded([&] {
        need(cfg, "config");
        cfg->config.sifting = SiftingRule::same_index();
    });
}

qkd_status qkd_sim_config_set_pairs(qkd_sim_config* cfg, const int* alice, const int* bob, size_t n)
{
    return guarded([&] {
        need(cfg, "config");
        need(alice, "alice indices");
        need(bob, "bob indices");
        std::vector<BasisPair> pairs;
        for (std::size_t k = 0; k < n; ++k)
            pairs.push_back({alice[k], bob[k]});
        SiftingRule rule = SiftingRule::paired(std::move(pairs));
        (void)rule.accepted_pairs();
        cfg->config.sifting = std::move(rule);
    });
}

qkd_status qkd_sim_config_set_bob_conjugate(qkd_sim_config* cfg, int conjugate)
{
    return guarded([&] {
        need(cfg, "config");
        cfg->config.bob_basis = conjugate ? BobBasis::Conjugate : BobBasis::Plain;
    });
}

qkd_status qkd_sim_config_set_log_base(qkd_sim_config* cfg, qkd_log_base base)
{
    return guarded([&] {
        need(cfg, "config");
        cfg->config.log_base = to_base(base);
    });
}

qkd_status qkd_round_distribution(const qkd_sim_config* cfg, int alice_basis, int bob_basis, double* out,
                                  size_t capacity, size_t* count)
{
    return guarded([&] {
        need(cfg, "config");
        need(out, "output");
        need(count, "count");
        const RoundTable t = round_distribution(cfg->config.channel, alice_basis, bob_basis, cfg->config.bob_basis);
        if (capacity < t.p.size())
            throw std::out_of_range("output buffer is too small");
        std::copy(t.p.begin(), t.p.end(), out);
        *count = t.p.size();
    });
}

qkd_status qkd_simulate(const qkd_sim_config* cfg, qkd_sim_result** out)
{
    return guarded([&] {
        need(cfg, "config");
        need(out, "output");
        *out = new qkd_sim_result{run_session(cfg->config)};
    });
}

void qkd_sim_result_free(qkd_sim_result* r)
{
    delete r;
}

qkd_status qkd_sim_result_summary(const qkd_sim_result* r, qkd_sim_summary* out)
{
    return guarded([&] {
        need(r, "result");
        need(out, "output");
        const SimResult& s = r->result;
        out->rounds = s.rounds;
        out->sifted_count = s.sifted_count;
        out->sifted_errors = s.sifted_errors;
        out->has_qber = s.qber ? 1 : 0;
        out->qber = s.qber.value_or(std::nan(""));
        out->qber_standard_error = s.qber_standard_error;
        out->has_eve_information = s.empirical_I_AE ? 1 : 0;
        out->empirical_I_AE = s.empirical_I_AE.value_or(std::nan(""));
        out->threads_used = s.threads_used;
    });
}

qkd_status qkd_sim_result_correlation(const qkd_sim_result* r, double out[16])
{
    return guarded([&] {
        need(r, "result");
        need(out, "output");
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = 0; j < 4; ++j)
                out[i * 4 + j] = r->result.basis_correlation_matrix[i][j];
    });
}

qkd_status qkd_sim_result_outcome_counts(const qkd_sim_result* r, uint64_t out[144])
{
    return guarded([&] {
        need(r, "result");
        need(out, "output");
        std::copy(r->result.outcome_counts.begin(), r->result.outcome_counts.end(), out);
    });
}

qkd_status qkd_sim_result_syndrome_counts(const qkd_sim_result* r, uint64_t out[9])
{
    return guarded([&] {
        need(r, "result");
        need(out, "output");
        std::copy(r->result.syndrome_counts.begin(), r->result.syndrome_counts.end(), out);
    });
}

qkd_status qkd_sim_result_json(const qkd_sim_result* r, char** out)
{
    return guarded([&] {
        need(r, "result");
        emit(io::to_json(r->result), out);
    });
}

qkd_status qkd_survey(const qkd_sim_config* cfg, double exact[16], double empirical[16])
{
    return guarded([&] {
        need(cfg, "config");
        need(exact, "exact");
        need(empirical, "empirical");
        const SurveyResult s = basis_correlation_survey(cfg->config);
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = 0; j < 4; ++j) {
                exact[i * 4 + j] = s.exact[i][j];
                empirical[i * 4 + j] = s.empirical[i][j];
            }
    });
}

qkd_status qkd_survey_json(const qkd_sim_config* cfg, char** out)
{
    return guarded([&] {
        need(cfg, "config");
        emit(io::to_json(basis_correlation_survey(cfg->config)), out);
    });
}

qkd_status qkd_compare(const qkd_sim_config* cfg, int resamples, qkd_comparison* out)
{
    return guarded([&] {
        need(cfg, "config");
        need(out, "output");
        const Comparison c = empirical_vs_analytic(cfg->config, resamples);
        out->analytic_I_AE = c.analytic_I_AE;
        out->empirical_I_AE = c.empirical_I_AE;
        out->I_AE_standard_error = c.I_AE_standard_error;
        out->I_AE_within = c.I_AE_within ? 1 : 0;
        out->analytic_qber = c.analytic_qber;
        out->empirical_qber = c.empirical_qber;
        out->qber_standard_error = c.qber_standard_error;
        out->qber_within = c.qber_within ? 1 : 0;
        out->bootstrap_resamples = c.bootstrap_resamples;
        out->plugin_bias_bound = c.plugin_bias_bound;
        out->sifted_count = c.session.sifted_count;
    });
}

qkd_status qkd_compare_json(const qkd_sim_config* cfg, int resamples, char** out)
{
    return guarded([&] {
        need(cfg, "config");
        emit(io::to_json(empirical_vs_analytic(cfg->config, resamples)), out);
    });
}

qkd_status qkd_write_rounds_csv(const qkd_sim_config* cfg, const char* path)
{
    return guarded([&] {
        need(cfg, "config");
        need(path, "path");
        std::ofstream f(path);
        if (!f)
            throw std::invalid_argument(std::string("cannot open '") + path + "' for writing");
        write_rounds_csv(cfg->config, f);
        if (!f)
            throw std::runtime_error("write failed");
    });
}

}  // extern "C"
