#include <doctest.h>

#include <cmath>
#include <vector>

#include "fastdiff/errors.hpp"
#include "fastdiff/params.hpp"

using namespace fastdiff;

namespace {

// Independent route to the tail roots: the plain quadratic formula applied to
// gamma^2 - (sum) gamma + (prod) = 0.
void naive_roots(int n, double m, double rho1, double beta, double& g1, double& g2) {
    const double sum = (n - 2 - (n + 2) * m) / (1 - m) + 2 * beta * (n - 2 - n * m) / ((1 - m) * rho1);
    const double prod = 2 * (n - 2 - n * m) / (1 - m);
    const double disc = sum * sum - 4 * prod;
    g1 = 0.5 * (sum - std::sqrt(disc));
    g2 = 0.5 * (sum + std::sqrt(disc));
}

} // namespace

TEST_CASE("validate accepts the reference parameter set") {
    ParamSet p{3, 0.2, 1.0, 5.0, 1.0};
    CHECK_NOTHROW(validate(p));
}

TEST_CASE("validate rejects m at or above (n-2)/n") {
    ParamSet p{3, 0.4, 1.0, 5.0, 1.0};
    CHECK_THROWS_AS(validate(p), RangeError);
    p.m = 1.0 / 3.0; // boundary of the open interval
    CHECK_THROWS_AS(validate(p), RangeError);
}

TEST_CASE("validate rejects beta below the existence range") {
    ParamSet p{3, 0.2, 1.0, 0.4, 1.0};
    // m rho1/(n-2-nm) = 0.2/0.4 = 0.5 > 0.4
    CHECK(beta_existence_min(3, 0.2, 1.0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK_THROWS_AS(validate(p), RangeError);
    p.beta = 0.5;
    CHECK_NOTHROW(validate(p));
}

TEST_CASE("validate rejects nonpositive rho1 and lambda") {
    CHECK_THROWS_AS(validate(ParamSet{3, 0.2, -1.0, 5.0, 1.0}), RangeError);
    CHECK_THROWS_AS(validate(ParamSet{3, 0.2, 1.0, 5.0, 0.0}), RangeError);
}

TEST_CASE("derive reproduces the reference constants") {
    ParamSet p{3, 0.2, 1.0, 5.0, 1.0};
    const DerivedConstants c = derive(p);
    CHECK(c.alpha == doctest::Approx(13.75).epsilon(1e-14));
    CHECK(c.beta1 == doctest::Approx(2.5).epsilon(1e-14));
    CHECK(c.beta0 == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(c.Cstar == doctest::Approx(0.2).epsilon(1e-14));
    CHECK(c.n_beta_minus_alpha == doctest::Approx(1.25).epsilon(1e-14));
    REQUIRE(c.real_roots);
    double g1, g2;
    naive_roots(3, 0.2, 1.0, 5.0, g1, g2);
    CHECK(c.gamma1 == doctest::Approx(g1).epsilon(1e-13));
    CHECK(c.gamma2 == doctest::Approx(g2).epsilon(1e-13));
    CHECK(c.gamma1 == doctest::Approx(0.20871215252208).epsilon(1e-10));
    CHECK(c.gamma2 == doctest::Approx(4.79128784747792).epsilon(1e-10));
    // Vieta on the tail quadratic
    CHECK(c.gamma1 * c.gamma2 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(c.gamma1 + c.gamma2 == doctest::Approx(5.0).epsilon(1e-12));
    CHECK(c.M0 == doctest::Approx(2 * 0.2 * 0.4 / (0.8 * (c.gamma2 - c.gamma1))).epsilon(1e-13));
}

TEST_CASE("special case m=(n-2)/(n+2), rho1=1") {
    for (int n : {3, 4, 6}) {
        ParamSet p;
        p.n = n;
        p.m = double(n - 2) / double(n + 2);
        p.rho1 = 1.0;
        p.beta = 10.0;
        const DerivedConstants c = derive(p);
        CHECK(c.beta0 == doctest::Approx(2.0 / std::sqrt(double(n - 2))).epsilon(1e-14));
        CHECK(c.beta1 == doctest::Approx(1.0 / (2.0 * p.m)).epsilon(1e-14));
    }
}

TEST_CASE("Vieta identities and discriminant sign over a parameter sweep") {
    for (int n : {3, 4, 5, 6}) {
        for (double fm : {0.15, 0.4, 0.7, 0.9}) {
            const double m = fm * double(n - 2) / double(n);
            for (double rho1 : {0.5, 1.0, 2.0}) {
                ParamSet p;
                p.n = n;
                p.m = m;
                p.rho1 = rho1;
                const DerivedConstants base = derive(ParamSet{n, m, rho1, 10.0 * rho1, 1.0});
                for (double f : {1.0, 1.5, 4.0, 32.0}) {
                    p.beta = base.beta0 * f;
                    const DerivedConstants c = derive(p);
                    REQUIRE(c.real_roots); // beta >= beta0
                    CHECK(c.gamma1 > 0.0);
                    CHECK(c.gamma2 >= c.gamma1);
                    const double prod = 2 * (n - 2 - n * m) / (1 - m);
                    const double sum = (n - 2 - (n + 2) * m) / (1 - m) +
                                       2 * p.beta * (n - 2 - n * m) / ((1 - m) * rho1);
                    CHECK(c.gamma1 * c.gamma2 == doctest::Approx(prod).epsilon(1e-12));
                    CHECK(c.gamma1 + c.gamma2 == doctest::Approx(sum).epsilon(1e-12));
                    // beta > beta1 iff n beta > alpha
                    CHECK(((p.beta > c.beta1) == (p.n * p.beta > c.alpha)));
                }
                // boundary: beta = beta1 makes n beta = alpha
                p.beta = base.beta1;
                const DerivedConstants cb = derive(p);
                CHECK(cb.n_beta_minus_alpha == doctest::Approx(0.0).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("beta2 threshold at the reference parameters") {
    ParamSet p{3, 0.2, 1.0, 5.0, 1.0};
    const double c2 = (1 - 0.1) * (1 - 0.1);
    CHECK(c2 == doctest::Approx(0.81).epsilon(1e-15));
    const double b0 = std::max(2.0 * std::sqrt(2.0 * 0.8 / (0.4 * (1 - c2 * c2))),
                               std::sqrt(2.0 / 0.4));
    CHECK(b0 == doctest::Approx(6.8209348817194558).epsilon(1e-12));
    const double beta2 = beta2_lower_bound(p);
    CHECK(beta2 == doctest::Approx(b0).epsilon(1e-12)); // a0 = b0 here, dominates beta0, beta1

    // all three candidates scale linearly in rho1
    ParamSet p2 = p;
    p2.rho1 = 2.0;
    p2.beta = 10.0;
    CHECK(beta2_lower_bound(p2) == doctest::Approx(2.0 * beta2).epsilon(1e-12));
}

TEST_CASE("A1 > 0 > A2 above beta2, equivalent root ordering") {
    for (double beta : {7.0, 8.0, 10.0}) {
        ParamSet p{3, 0.2, 1.0, beta, 1.0};
        const DerivedConstants c = derive(p);
        CHECK(c.A1_beta > 0.0);
        CHECK(c.A2_beta < 0.0);
        const double mid = p.rho1 / ((1 - p.m) * p.beta);
        CHECK(c.gamma1 < mid);
        CHECK(mid < c.gamma2);
    }
}

TEST_CASE("beta2 certification for m above (n-2)/(n+2)") {
    // n = 3: (n-2)/(n+2) = 0.2 < m = 0.3 < 1/3; a0 comes from the bisection.
    ParamSet p{3, 0.3, 1.0, 1.0, 1.0};
    const double beta2 = beta2_lower_bound(p);
    const DerivedConstants c0 = derive(ParamSet{3, 0.3, 1.0, 2.0 * beta2, 1.0});
    CHECK(beta2 >= c0.beta0);
    CHECK(beta2 >= c0.beta1);
    for (double f : {1.01, 1.5, 3.0, 10.0, 100.0}) {
        const DerivedConstants c = derive(ParamSet{3, 0.3, 1.0, f * beta2, 1.0});
        REQUIRE(c.real_roots);
        CHECK(c.A1_beta > 0.0);
        CHECK(c.A2_beta < 0.0);
    }
}

TEST_CASE("classify_beta walks the regime ladder") {
    ParamSet p{3, 0.2, 1.0, 5.0, 1.0};
    BetaClassification c = classify_beta(p);
    CHECK(c.regime == BetaRegime::real_roots);
    CHECK(c.n_beta_minus_alpha == doctest::Approx(1.25).epsilon(1e-14));
    CHECK(c.sign_n_beta_minus_alpha == 1);

    p.beta = 2.5; // exactly beta1
    c = classify_beta(p);
    CHECK(c.regime == BetaRegime::uniqueness);
    CHECK(c.at_uniqueness_boundary);
    CHECK(c.sign_n_beta_minus_alpha == 0);

    p.beta = 8.0;
    c = classify_beta(p);
    CHECK(c.regime == BetaRegime::second_order);

    p.beta = 1.0;
    c = classify_beta(p);
    CHECK(c.regime == BetaRegime::existence_only);
    CHECK(c.sign_n_beta_minus_alpha == -1);
}

TEST_CASE("complex roots reported as a flag below beta0") {
    // beta0 = 2 at these parameters; beta = 1 keeps only the always-defined fields
    ParamSet p{3, 0.2, 1.0, 1.0, 1.0};
    const DerivedConstants c = derive(p);
    CHECK_FALSE(c.real_roots);
    CHECK(std::isnan(c.gamma1));
    CHECK(c.Cstar == doctest::Approx(0.2));
    CHECK(c.alpha == doctest::Approx((2.0 + 1.0) / 0.8));
}
