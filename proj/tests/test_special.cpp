#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <stdexcept>

#include "everett/special.hpp"

using namespace everett::special;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

// Reference values below were computed independently with scipy.special /
// scipy.stats at double precision and are frozen here.

TEST_CASE("regularized lower incomplete gamma matches references") {
    CHECK_THAT(gamma_p(1.0, 1.0), WithinRel(0.63212055882855767, 1e-13));
    CHECK_THAT(gamma_p(3.0, 2.5), WithinRel(0.45618688411667035, 1e-13));
    CHECK_THAT(gamma_p(10.0, 9.5), WithinRel(0.47817397776279236, 1e-13));
    CHECK_THAT(gamma_p(100.0, 110.0), WithinRel(0.84172132993991289, 1e-13));
    CHECK_THAT(gamma_p(0.5, 0.25), WithinRel(0.52049987781304663, 1e-13));
    // Large shape right at the series/fraction split loses a couple digits
    // to cancellation; 2e-11 is representative for this regime.
    CHECK_THAT(gamma_p(1e4, 1e4), WithinRel(0.50132980833995522, 2e-11));
}

TEST_CASE("regularized upper incomplete gamma matches references") {
    CHECK_THAT(gamma_q(1.0, 1.0), WithinRel(0.36787944117144245, 1e-13));
    CHECK_THAT(gamma_q(3.0, 2.5), WithinRel(0.5438131158833297, 1e-13));
    CHECK_THAT(gamma_q(10.0, 9.5), WithinRel(0.52182602223720764, 1e-13));
    CHECK_THAT(gamma_q(100.0, 110.0), WithinRel(0.15827867006008706, 1e-12));
    CHECK_THAT(gamma_q(0.5, 0.25), WithinRel(0.47950012218695337, 1e-13));
    CHECK_THAT(gamma_q(1e4, 1e4), WithinRel(0.49867019166004478, 2e-11));
}

TEST_CASE("gamma_p and gamma_q are complementary") {
    const double shapes[] = {0.5, 1.0, 2.0, 7.5, 30.0, 250.0};
    const double scales[] = {0.1, 0.5, 1.0, 1.7, 3.0};
    for (double a : shapes) {
        for (double f : scales) {
            const double x = a * f;
            CHECK_THAT(gamma_p(a, x) + gamma_q(a, x), WithinAbs(1.0, 1e-14));
        }
    }
}

TEST_CASE("gamma boundary and domain behavior") {
    CHECK(gamma_p(2.0, 0.0) == 0.0);
    CHECK(gamma_q(2.0, 0.0) == 1.0);
    CHECK_THROWS_AS(gamma_p(0.0, 1.0), std::domain_error);
    CHECK_THROWS_AS(gamma_p(-1.0, 1.0), std::domain_error);
    CHECK_THROWS_AS(gamma_p(1.0, -0.5), std::domain_error);
    CHECK_THROWS_AS(gamma_q(0.0, 1.0), std::domain_error);
}

TEST_CASE("gamma_p_inv round-trips gamma_p") {
    const double shapes[] = {0.5, 1.0, 2.0, 5.0, 50.0, 1000.0};
    const double probs[] = {1e-6, 0.01, 0.25, 0.5, 0.75, 0.99, 1.0 - 1e-6};
    for (double a : shapes) {
        for (double p : probs) {
            const double x = gamma_p_inv(a, p);
            REQUIRE(x > 0.0);
            CHECK_THAT(gamma_p(a, x), WithinAbs(p, 1e-11));
        }
    }
    CHECK(gamma_p_inv(3.0, 0.0) == 0.0);
    CHECK_THROWS_AS(gamma_p_inv(3.0, 1.0), std::domain_error);
    CHECK_THROWS_AS(gamma_p_inv(3.0, -0.1), std::domain_error);
}

TEST_CASE("chi-square quantiles match references") {
    // scipy.stats.chi2.ppf(p, k)
    CHECK_THAT(chi2_quantile(0.025, 200), WithinRel(162.72798250184627, 1e-11));
    CHECK_THAT(chi2_quantile(0.975, 200), WithinRel(241.05789550631093, 1e-11));
    CHECK_THAT(chi2_quantile(0.05, 200), WithinRel(168.27855443662838, 1e-11));
    CHECK_THAT(chi2_quantile(0.99, 3), WithinRel(11.344866730144373, 1e-11));
    CHECK_THAT(chi2_quantile(0.99, 10), WithinRel(23.209251158954356, 1e-11));
    CHECK_THAT(chi2_quantile(0.95, 20000), WithinRel(20330.103823932252, 1e-11));
}

TEST_CASE("chi-square cdf and quantile are inverse") {
    const unsigned dofs[] = {1, 2, 5, 20, 200};
    const double probs[] = {0.01, 0.05, 0.5, 0.95, 0.99};
    for (unsigned k : dofs) {
        for (double p : probs) {
            CHECK_THAT(chi2_cdf(chi2_quantile(p, k), k), WithinAbs(p, 1e-10));
        }
    }
}

TEST_CASE("normal quantile matches references") {
    // scipy.stats.norm.ppf
    CHECK_THAT(normal_quantile(0.95), WithinRel(1.6448536269514722, 1e-13));
    CHECK_THAT(normal_quantile(0.975), WithinRel(1.959963984540054, 1e-13));
    CHECK_THAT(normal_quantile(0.005), WithinRel(-2.5758293035489008, 1e-13));
    CHECK_THAT(normal_quantile(1e-10), WithinRel(-6.3613409024040557, 1e-12));
    CHECK_THAT(normal_quantile(0.3), WithinRel(-0.52440051270804089, 1e-13));
    CHECK(normal_quantile(0.5) == 0.0);
    CHECK_THAT(normal_quantile(0.975) + normal_quantile(0.025), WithinAbs(0.0, 1e-14));
    CHECK_THROWS_AS(normal_quantile(0.0), std::domain_error);
    CHECK_THROWS_AS(normal_quantile(1.0), std::domain_error);
}

TEST_CASE("one-sample KS critical values") {
    // c(0.01) = 1.6276236307187293, c(0.05) = 1.3581015157406195
    CHECK_THAT(ks_critical(0.01, 100) * 10.0, WithinRel(1.6276236307187293, 1e-13));
    CHECK_THAT(ks_critical(0.05, 10000) * 100.0, WithinRel(1.3581015157406195, 1e-13));
    CHECK(ks_critical(0.01, 400) < ks_critical(0.01, 100));
    CHECK_THROWS_AS(ks_critical(0.0, 10), std::domain_error);
    CHECK_THROWS_AS(ks_critical(0.05, 0), std::domain_error);
}

TEST_CASE("two-sample KS critical values") {
    // Equal sizes reduce to c(alpha) * sqrt(2/n).
    const double c01 = 1.6276236307187293;
    CHECK_THAT(ks_critical_two_sample(0.01, 100, 100),
               WithinRel(c01 * std::sqrt(2.0 / 100.0), 1e-13));
    // Symmetric in the two sample sizes.
    CHECK(ks_critical_two_sample(0.05, 30, 70) == ks_critical_two_sample(0.05, 70, 30));
    CHECK_THROWS_AS(ks_critical_two_sample(0.05, 0, 10), std::domain_error);
}
