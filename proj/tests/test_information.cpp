#include <doctest.h>

#include "oracles.hpp"
#include "qkdlab/information.hpp"

using namespace qkdlab;

namespace {

// Eve's information straight from the conditional vectors, in bits.
double eve_bits(double v, double x, double y)
{
    const double FA = v * v + 2 * y * y;
    auto branch = [](std::vector<long double> p) { return static_cast<double>(std::log2(3.0L) - oracle::entropy_bits(p)); };
    const long double a0 = (v + 2 * y) * (v + 2 * y) / (3 * FA), b0 = (v - y) * (v - y) / (3 * FA);
    double total = FA * branch({a0, b0, b0});
    if (FA < 1.0) {
        const long double a1 = 2 * (x + 2 * y) * (x + 2 * y) / (3 * (1 - FA)), b1 = 2 * (x - y) * (x - y) / (3 * (1 - FA));
        total += (1 - FA) * branch({a1, b1, b1});
    }
    return total;
}

}  // namespace

TEST_CASE("log bases")
{
    CHECK(parse_log_base("2") == LogBase::Two);
    CHECK(parse_log_base("bits") == LogBase::Two);
    CHECK(parse_log_base("3") == LogBase::Three);
    CHECK(parse_log_base("e") == LogBase::E);
    CHECK_FALSE(parse_log_base("10").has_value());
    CHECK(log_in(9.0, LogBase::Three) == doctest::Approx(2.0));
}

TEST_CASE("shannon entropy")
{
    const double third = 1.0 / 3.0;
    const std::vector<double> uniform{third, third, third};
    CHECK(shannon_entropy(uniform, LogBase::Three) == doctest::Approx(1.0).epsilon(1e-14));
    const std::vector<double> point{1.0, 0.0, 0.0};
    CHECK(shannon_entropy(point, LogBase::Two) == 0.0);

    const std::vector<double> p{0.7753, 0.11235, 0.11235};
    const double oracle_value = static_cast<double>(oracle::entropy_bits({0.7753L, 0.11235L, 0.11235L}));
    CHECK(shannon_entropy(p, LogBase::Two) == doctest::Approx(oracle_value).epsilon(1e-13));
    CHECK(std::abs(shannon_entropy(p, LogBase::Two) - 0.99336) < 1e-3);

    const std::vector<double> negative{1.1, -0.1};
    CHECK_THROWS_AS(shannon_entropy(negative, LogBase::Two), std::invalid_argument);
    const std::vector<double> short_sum{0.5, 0.4};
    CHECK_THROWS_AS(shannon_entropy(short_sum, LogBase::Two), std::invalid_argument);
    const std::vector<double> tiny{1.0, 1e-16};
    CHECK(shannon_entropy(tiny, LogBase::Two) == 0.0);
}

TEST_CASE("mutual information")
{
    const std::vector<double> diag{1.0 / 3, 0, 0, 0, 1.0 / 3, 0, 0, 0, 1.0 / 3};
    CHECK(mutual_information(diag, 3, 3, LogBase::Three) == doctest::Approx(1.0));
    std::vector<double> indep(9, 1.0 / 9);
    CHECK(std::abs(mutual_information(indep, 3, 3, LogBase::Two)) < 1e-15);
}

TEST_CASE("Bob's information")
{
    CHECK(bob_information(1.0, LogBase::Two) == doctest::Approx(std::log2(3.0)));
    CHECK(bob_information(1.0, LogBase::Three) == doctest::Approx(1.0));
    CHECK(std::abs(bob_information(1.0 / 3.0, LogBase::Two)) < 1e-12);
    double prev = 0.0;
    for (int k = 1; k <= 200; ++k) {
        const double F = 1.0 / 3.0 + (2.0 / 3.0) * k / 200.0;
        const double I = bob_information(F, LogBase::E);
        CHECK(I > prev);
        prev = I;
    }
    CHECK_THROWS_AS(bob_information(0.2, LogBase::Two), std::out_of_range);
    CHECK_THROWS_AS(bob_information(1.01, LogBase::Two), std::out_of_range);
    CHECK(bob_information(1.0, LogBase::Two, 2) == doctest::Approx(1.0));
}

TEST_CASE("Eve's information")
{
    const EveInformation id = eve_information_detail(kIdentityCloner, LogBase::Two);
    for (double p : id.p_no_error)
        CHECK(p == doctest::Approx(1.0 / 3.0));
    CHECK(std::abs(id.total) < 1e-15);

    const ClonerParams opt = kPublishedOptimum.normalized();
    const EveInformation e = eve_information_detail(opt, LogBase::Two);
    CHECK(std::abs(e.p_no_error[0] - 0.6607) < 2e-3);
    CHECK(std::abs(e.p_no_error[1] - 0.1697) < 2e-3);
    CHECK(std::abs(e.p_no_error[2] - 0.1697) < 2e-3);
    CHECK(e.p_no_error[0] + e.p_no_error[1] + e.p_no_error[2] == doctest::Approx(1.0).epsilon(1e-12));
    for (LogBase b : {LogBase::Two, LogBase::Three, LogBase::E})
        CHECK(std::abs(eve_information(opt, b) - bob_information(e.F_A, b)) < 1e-3);

    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 50; ++trial) {
        const ClonerParams p = oracle::random_symmetric(rng);
        CHECK(eve_information(p, LogBase::Two) == doctest::Approx(eve_bits(p.v, p.x, p.y)).epsilon(1e-12));
    }
    CHECK_THROWS_AS(eve_information(ClonerParams{0.7, 0.3, 0.25, 0.15}.normalized(), LogBase::Two),
                    std::invalid_argument);
}

TEST_CASE("Csiszar-Korner bound")
{
    CHECK(ck_rate_bound(1, 0, 0) == 1.0);
    CHECK(ck_rate_bound(0.5, 0.5, 0.5) == 0.0);
    CHECK(ck_rate_bound(0.4, 0.6, 0.3) == doctest::Approx(0.1));
}

TEST_CASE("information report")
{
    const ClonerParams opt = kPublishedOptimum.normalized();
    for (LogBase b : {LogBase::Two, LogBase::Three, LogBase::E}) {
        const InfoReport r = information_report(opt, b);
        const double cap = log_in(3.0, b);
        CHECK(r.I_AB >= 0.0);
        CHECK(r.I_AB <= cap);
        CHECK(r.I_AE >= 0.0);
        CHECK(r.I_AE <= cap);
        // Eve's two registers are symmetric under the phase-covariant cloner.
        CHECK(std::abs(r.I_BE - r.I_AE) < 1e-12);
        CHECK(r.R_bound == doctest::Approx(r.I_AB - r.I_AE));
    }
    const InfoReport id = information_report(kIdentityCloner, LogBase::Three);
    CHECK(id.R_bound == doctest::Approx(1.0));
}
