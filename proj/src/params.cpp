#include "fastdiff/params.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "fastdiff/errors.hpp"

namespace fastdiff {

namespace {

double quiet_nan() { return std::numeric_limits<double>::quiet_NaN(); }

double beta0_threshold(int n, double m, double rho1) {
    const double d = n - 2 - n * m;
    const double base = std::sqrt(2.0 * (1.0 - m) / d);
    if (m <= double(n - 2) / double(n + 2)) {
        return rho1 * base;
    }
    return rho1 * std::max(2.0 * base, ((n + 2) * m - (n - 2)) / d);
}

double A_of_beta(int n, double m, double rho1, double beta) {
    return n - 2 - (n + 2) * m + 2.0 * beta * (n - 2 - n * m) / rho1;
}

// Smaller root via the product form 4(n-2-nm)/(A+sqrt(disc)); the naive
// (A - sqrt(disc))/(2(1-m)) cancels catastrophically once A^2 >> disc gap,
// i.e. gamma1 -> 0 as beta -> infinity.
void tail_roots(int n, double m, double A, double disc, double& g1, double& g2) {
    const double sq = std::sqrt(disc);
    g1 = 4.0 * (n - 2 - n * m) / (A + sq);
    g2 = (A + sq) / (2.0 * (1.0 - m));
}

} // namespace

std::string to_string(BetaRegime r) {
    switch (r) {
    case BetaRegime::existence_only: return "existence-only";
    case BetaRegime::uniqueness: return "uniqueness";
    case BetaRegime::real_roots: return "real-roots";
    case BetaRegime::second_order: return "second-order";
    }
    return "?";
}

double beta_existence_min(int n, double m, double rho1) {
    return m * rho1 / (n - 2 - n * m);
}

ParamSet validate(const ParamSet& p) {
    std::ostringstream why;
    if (p.n < 3) {
        why << "n = " << p.n << " violates n >= 3";
        throw RangeError(why.str());
    }
    const double m_max = double(p.n - 2) / double(p.n);
    if (!(p.m > 0.0) || !(p.m < m_max)) {
        why << "m = " << p.m << " violates 0 < m < (n-2)/n = " << m_max;
        throw RangeError(why.str());
    }
    if (!(p.rho1 > 0.0)) {
        why << "rho1 = " << p.rho1 << " violates rho1 > 0";
        throw RangeError(why.str());
    }
    if (!(p.lambda > 0.0)) {
        why << "lambda = " << p.lambda << " violates lambda > 0";
        throw RangeError(why.str());
    }
    const double beta_min = beta_existence_min(p.n, p.m, p.rho1);
    if (!(p.beta >= beta_min * (1.0 - 1e-12))) {
        why << "beta = " << p.beta << " violates beta >= m*rho1/(n-2-n*m) = " << beta_min;
        throw RangeError(why.str());
    }
    return p;
}

DerivedConstants derive(const ParamSet& p) {
    const int n = p.n;
    const double m = p.m;
    DerivedConstants c;
    c.alpha = p.alpha();
    c.beta1 = p.rho1 / (n - 2 - n * m);
    c.beta0 = beta0_threshold(n, m, p.rho1);
    c.beta2 = beta2_lower_bound(p);
    c.A_beta = A_of_beta(n, m, p.rho1, p.beta);
    c.discriminant = c.A_beta * c.A_beta - 8.0 * (n - 2 - n * m) * (1.0 - m);
    c.Cstar = 2.0 * m * (n - 2 - n * m) / ((1.0 - m) * p.rho1);
    c.n_beta_minus_alpha = n * p.beta - c.alpha;
    c.real_roots = c.discriminant >= 0.0;
    if (c.real_roots) {
        tail_roots(n, m, c.A_beta, c.discriminant, c.gamma1, c.gamma2);
        c.M0 = 2.0 * m * (n - 2 - n * m) / ((1.0 - m) * (c.gamma2 - c.gamma1));
        c.A1_beta = 1.0 / (1.0 - m) - p.beta * c.gamma1 / p.rho1;
        c.A2_beta = 1.0 / (1.0 - m) - p.beta * c.gamma2 / p.rho1;
    } else {
        c.gamma1 = c.gamma2 = c.M0 = c.A1_beta = c.A2_beta = quiet_nan();
    }
    return c;
}

double beta2_lower_bound(const ParamSet& p) {
    const int n = p.n;
    const double m = p.m;
    const double d = n - 2 - n * m;
    const double c2 = (1.0 - m / 2.0) * (1.0 - m / 2.0);
    const double b0 = std::max(2.0 * std::sqrt(2.0 * (1.0 - m) / (d * (1.0 - c2 * c2))),
                               std::sqrt(2.0 / d));
    const double beta0 = beta0_threshold(n, m, p.rho1);
    const double beta1 = p.rho1 / d;

    if (m <= double(n - 2) / double(n + 2)) {
        return std::max({b0 * p.rho1, beta0, beta1});
    }

    // For (n-2)/(n+2) < m < (n-2)/n only "some a0 > b0" is guaranteed; certify
    // one by bisection on: A1(beta) > 0 for 64 betas sampled log-uniformly in
    // (max(a0*rho1, beta0, beta1), 1000*rho1].
    auto a1_positive_above = [&](double a0) {
        const double lo = std::max({a0 * p.rho1, beta0, beta1});
        const double hi = 1000.0 * p.rho1;
        if (lo >= hi) return true;
        for (int i = 0; i < 64; ++i) {
            const double f = (i + 1.0) / 64.0;
            const double beta = lo * std::pow(hi / lo, f);
            const double A = A_of_beta(n, m, p.rho1, beta);
            const double disc = A * A - 8.0 * d * (1.0 - m);
            if (disc < 0.0) return false;
            double g1, g2;
            tail_roots(n, m, A, disc, g1, g2);
            if (!(1.0 / (1.0 - m) - beta * g1 / p.rho1 > 0.0)) return false;
        }
        return true;
    };

    double lo = b0;
    double hi = 2.0 * b0;
    while (!a1_positive_above(hi)) {
        hi *= 2.0;
        if (hi > 1e6) throw InvariantViolation("beta2_lower_bound: no admissible a0 found");
    }
    if (!a1_positive_above(lo)) {
        for (int it = 0; it < 80; ++it) {
            const double mid = 0.5 * (lo + hi);
            (a1_positive_above(mid) ? hi : lo) = mid;
        }
    } else {
        hi = lo; // b0 itself already works
    }
    const double a0 = hi;
    return std::max({a0 * p.rho1, beta0, beta1});
}

BetaClassification classify_beta(const ParamSet& p) {
    const DerivedConstants c = derive(p);
    BetaClassification out;
    out.n_beta_minus_alpha = c.n_beta_minus_alpha;
    const double scale = std::max(std::abs(p.n * p.beta), std::abs(c.alpha));
    const double tol = 1e-12 * scale;
    out.sign_n_beta_minus_alpha =
        std::abs(out.n_beta_minus_alpha) <= tol ? 0 : (out.n_beta_minus_alpha > 0 ? 1 : -1);
    out.at_uniqueness_boundary = std::abs(p.beta - c.beta1) <= 1e-12 * c.beta1;

    if (p.beta > c.beta2) {
        out.regime = BetaRegime::second_order;
    } else if (p.beta >= c.beta0 && p.beta > c.beta1) {
        out.regime = BetaRegime::real_roots;
    } else if (p.beta >= c.beta1 || out.at_uniqueness_boundary) {
        out.regime = BetaRegime::uniqueness;
    } else {
        out.regime = BetaRegime::existence_only;
    }
    return out;
}

} // namespace fastdiff
