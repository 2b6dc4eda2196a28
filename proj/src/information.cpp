#include "qkdlab/information.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace qkdlab {

std::string_view to_string(LogBase base)
{
    switch (base) {
    case LogBase::Two: return "2";
    case LogBase::Three: return "3";
    case LogBase::E: return "e";
    }
    return "?";
}

std::optional<LogBase> parse_log_base(std::string_view text)
{
    if (text == "2" || text == "bits")
        return LogBase::Two;
    if (text == "3" || text == "trits")
        return LogBase::Three;
    if (text == "e" || text == "nats")
        return LogBase::E;
    return std::nullopt;
}

double log_in(double x, LogBase base)
{
    switch (base) {
    case LogBase::Two: return std::log2(x);
    case LogBase::Three: return std::log(x) / std::log(3.0);
    case LogBase::E: return std::log(x);
    }
    return std::log(x);
}

double shannon_entropy(std::span<const double> p, LogBase base)
{
    double sum = 0.0, h = 0.0;
    for (double pi : p) {
        if (pi < -1e-12)
            throw std::invalid_argument("entropy of a distribution with a negative entry");
        sum += pi;
        if (pi > kEntropyFloor)
            h -= pi * log_in(pi, base);
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw std::invalid_argument("entropy of a distribution that sums to " + std::to_string(sum));
    return h;
}

double mutual_information(std::span<const double> joint, std::size_t rows, std::size_t cols, LogBase base)
{
    if (joint.size() != rows * cols)
        throw std::invalid_argument("joint table size does not match its shape");
    std::vector<double> px(rows, 0.0), py(cols, 0.0);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) {
            px[r] += joint[r * cols + c];
            py[c] += joint[r * cols + c];
        }
    return shannon_entropy(px, base) + shannon_entropy(py, base) - shannon_entropy(joint, base);
}

double bob_information(double fidelity, LogBase base, std::size_t dim)
{
    const double lo = 1.0 / static_cast<double>(dim);
    if (!(fidelity >= lo - 1e-12 && fidelity <= 1.0 + 1e-12))
        throw std::out_of_range("Bob's fidelity " + std::to_string(fidelity) + " outside [1/N, 1]");
    std::vector<double> p(dim, (1.0 - fidelity) / static_cast<double>(dim - 1));
    p[0] = fidelity;
    return std::max(0.0, log_in(static_cast<double>(dim), base) - shannon_entropy(p, base));
}

EveInformation eve_information_detail(const ClonerParams& params, LogBase base)
{
    if (std::abs(params.y - params.z) > 1e-10)
        throw std::invalid_argument("eve_information requires y = z");
    if (std::abs(params.norm_squared() - 1.0) > 1e-10)
        throw std::invalid_argument("eve_information requires normalized parameters");
    const auto& [v, x, y, z] = params;
    EveInformation e;
    e.F_A = v * v + 2 * y * y;
    const double log3 = log_in(3.0, base);

    if (e.F_A > kEntropyFloor) {
        const double d = 3 * e.F_A;
        e.p_no_error = {(v + 2 * y) * (v + 2 * y) / d, (v - y) * (v - y) / d, (v - y) * (v - y) / d};
        e.given_no_error = log3 - shannon_entropy(e.p_no_error, base);
    }
    if (1.0 - e.F_A > kEntropyFloor) {
        const double d = 3 * (1 - e.F_A);
        e.p_error = {2 * (x + 2 * y) * (x + 2 * y) / d, 2 * (x - y) * (x - y) / d, 2 * (x - y) * (x - y) / d};
        e.given_error = log3 - shannon_entropy(e.p_error, base);
    }
    e.total = e.F_A * e.given_no_error + (1 - e.F_A) * e.given_error;
    return e;
}

double eve_information(const ClonerParams& params, LogBase base)
{
    return eve_information_detail(params, base).total;
}

double ck_rate_bound(double i_ab, double i_ae, double i_be)
{
    return std::max(i_ab - i_ae, i_ab - i_be);
}

InfoReport information_report(const ClonerParams& params, LogBase base)
{
    InfoReport r;
    r.log_base = base;
    r.figures = closed_form_report(params);
    r.I_AB = bob_information(r.figures.F_A, base);
    r.I_AE = eve_information(params, base);

    // I_BE: Bob's outcome alpha against Eve's (beta, gamma), averaged over Alice's trit.
    std::array<double, 27> joint{};
    for (int k = 0; k < 3; ++k) {
        const EveTable t = eve_joint_distribution(params, k);
        for (std::size_t i = 0; i < 27; ++i)
            joint[i] += t.p[i] / 3.0;
    }
    r.I_BE = mutual_information(joint, 3, 9, base);
    r.R_bound = ck_rate_bound(r.I_AB, r.I_AE, r.I_BE);
    return r;
}

}  // namespace qkdlab
