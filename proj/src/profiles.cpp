#include "fastdiff/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "fastdiff/errors.hpp"
#include "fastdiff/numerics.hpp"
#include "fastdiff/ode.hpp"

namespace fastdiff {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<double> grid_nodes(const SGrid& grid) {
    if (grid.nodes < 2 || !(grid.s_max > grid.s_min)) {
        throw ConfigError("grid needs s_max > s_min and at least 2 nodes");
    }
    std::vector<double> s(grid.nodes);
    const double ds = grid.ds();
    for (std::size_t i = 0; i < grid.nodes; ++i) s[i] = grid.s_min + double(i) * ds;
    s.back() = grid.s_max;
    return s;
}

double cylinder_value(const ParamSet& p, double r) {
    const double cstar = 2.0 * p.m * (p.n - 2 - p.n * p.m) / ((1.0 - p.m) * p.rho1);
    return std::pow(cstar / (r * r), 1.0 / (1.0 - p.m));
}

} // namespace

std::string to_string(ProfileKind k) {
    switch (k) {
    case ProfileKind::regular: return "regular";
    case ProfileKind::singular: return "singular";
    case ProfileKind::cylinder: return "cylinder";
    }
    return "?";
}

double RadialProfile::r(std::size_t i) const { return std::exp(s[i]); }

// ---------------------------------------------------------------------------
// head expansions
// ---------------------------------------------------------------------------

double SingularHead::log_correction(double r) const {
    const double x = std::pow(r, sigma);
    double acc = 0.0, xk = 1.0;
    for (double th : theta) {
        xk *= x;
        acc += th * xk;
    }
    return acc;
}

double SingularHead::z(double r) const {
    const double x = std::pow(r, sigma);
    double acc = 0.0, xk = 1.0;
    for (std::size_t k = 0; k < theta.size(); ++k) {
        xk *= x;
        acc += double(k + 1) * theta[k] * xk;
    }
    return sigma * acc;
}

double SingularHead::v(double r) const {
    return L * std::pow(r, -alpha_over_beta) * std::exp(log_correction(r));
}

double SingularHead::dv(double r) const { return v(r) * (z(r) - alpha_over_beta) / r; }

std::vector<double> SingularHead::exp_coefficients() const {
    const std::size_t K = theta.size();
    std::vector<double> e(K + 1, 0.0);
    e[0] = 1.0;
    for (std::size_t i = 1; i <= K; ++i) {
        double acc = 0.0;
        for (std::size_t l = 1; l <= i; ++l) acc += double(l) * theta[l - 1] * e[i - l];
        e[i] = acc / double(i);
    }
    return e;
}

double SingularHead::mass_below(double r, int n) const {
    const double p0 = double(n) - alpha_over_beta;
    if (!(p0 > 0.0)) return kNaN; // integral diverges unless n beta > alpha
    const auto e = exp_coefficients();
    double acc = 0.0;
    for (std::size_t k = 0; k < e.size(); ++k) {
        const double pw = p0 + double(k) * sigma;
        acc += e[k] * std::pow(r, pw) / pw;
    }
    return L * acc;
}

SingularHead singular_head(const ParamSet& p, int order) {
    SingularHead head;
    const double ab = p.alpha() / p.beta;
    head.alpha_over_beta = ab;
    head.sigma = p.rho1 / p.beta;
    head.L = std::pow(p.lambda, -p.rho1 / ((1.0 - p.m) * p.beta));
    if (order <= 0) return head;

    const double m = p.m;
    const double sg = head.sigma;
    const double C2 = ab * (p.n - 2 - m * ab);
    const double a = p.n - 2 - 2.0 * m * ab;
    const double kappa = (p.rho1 / m) * std::pow(head.L, 1.0 - m);

    std::vector<double>& th = head.theta;
    th.assign(order, 0.0);
    th[0] = C2 / kappa;
    // Taylor coefficients of exp((1-m) * sum th_k x^k), grown alongside th.
    std::vector<double> e(order + 1, 0.0);
    e[0] = 1.0;
    for (int k = 1; k < order; ++k) {
        double acc = 0.0;
        for (int l = 1; l <= k; ++l) acc += double(l) * (1.0 - m) * th[l - 1] * e[k - l];
        e[k] = acc / double(k);

        double rhs = sg * sg * double(k) * double(k) * th[k - 1] +
                     a * sg * double(k) * th[k - 1];
        for (int i = 1; i < k; ++i)
            rhs += m * sg * sg * double(i) * double(k - i) * th[i - 1] * th[k - i - 1];
        for (int j = 1; j <= k; ++j) rhs += kappa * double(j) * th[j - 1] * e[k + 1 - j];
        th[k] = -rhs / (kappa * double(k + 1));
    }
    return head;
}

double RegularHead::v(double r) const {
    const double r2 = r * r;
    return lambda * (1.0 + c2 * r2 + c4 * r2 * r2);
}

double RegularHead::dv(double r) const {
    return lambda * (2.0 * c2 * r + 4.0 * c4 * r * r * r);
}

double RegularHead::mass_below(double r, int n) const {
    return lambda * (std::pow(r, n) / n + c2 * std::pow(r, n + 2) / (n + 2) +
                     c4 * std::pow(r, n + 4) / (n + 4));
}

RegularHead regular_head(const ParamSet& p) {
    RegularHead head;
    head.lambda = p.lambda;
    const double alpha = p.alpha();
    const double lm = std::pow(p.lambda, 1.0 - p.m);
    head.c2 = -alpha * lm / (2.0 * p.n * p.m);
    head.c4 = -(alpha + 2.0 * p.beta) * lm * head.c2 / (4.0 * (p.n + 2) * p.m) -
              (p.m - 1.0) * head.c2 * head.c2 / 2.0;
    return head;
}

// ---------------------------------------------------------------------------
// profile constructors
// ---------------------------------------------------------------------------

RadialProfile cylinder_profile(const ParamSet& p, const SGrid& grid) {
    validate(p);
    RadialProfile prof;
    prof.kind = ProfileKind::cylinder;
    prof.params = p;
    prof.alpha = p.alpha();
    prof.beta = p.beta;
    prof.s = grid_nodes(grid);
    prof.v.resize(prof.s.size());
    prof.dv.resize(prof.s.size());
    for (std::size_t i = 0; i < prof.s.size(); ++i) {
        const double r = std::exp(prof.s[i]);
        prof.v[i] = cylinder_value(p, r);
        prof.dv[i] = -2.0 / (1.0 - p.m) * prof.v[i] / r;
    }
    const double r0 = std::exp(prof.s.front());
    const double pw = p.n - 2.0 / (1.0 - p.m);
    prof.head_mass = prof.v.front() * std::pow(r0, 2.0 / (1.0 - p.m)) * std::pow(r0, pw) / pw;
    return prof;
}

RadialProfile solve_regular(const ParamSet& p, const SGrid& grid, double tol) {
    validate(p);
    const auto nodes = grid_nodes(grid);
    const RegularHead head = regular_head(p);
    const double alpha = p.alpha();
    const double beta = p.beta;
    const int n = p.n;
    const double m = p.m;

    // Seed radius: quartic term of the Taylor start below tol.
    double r0 = std::pow(0.01 * tol / std::max(std::abs(head.c4), 1e-30), 0.25);
    r0 = std::max(std::min(r0, std::exp(grid.s_min)), 1e-9);
    const double s0 = std::log(r0);

    using Solver = DormandPrince<3>;
    Solver::Rhs rhs = [=](double s, const Solver::State& y, Solver::State& dy) {
        const double u = y[0], us = y[1];
        const double e2s = std::exp(2.0 * s);
        dy[0] = us;
        dy[1] = -(n - 2) * us + (1.0 - m) * us * us / u -
                e2s * std::pow(u, 1.0 - m) / m * (alpha * u + beta * us);
        dy[2] = u * std::exp(double(n) * s);
    };
    OdeOptions<3> opts;
    opts.rel_tol = tol;
    opts.abs_tol = {0.0, 0.0, 0.0}; // pure relative control: u decays forever
    opts.abs_tol[2] = 1e-300;
    opts.initial_step = 1e-3;

    RadialProfile prof;
    prof.kind = ProfileKind::regular;
    prof.params = p;
    prof.alpha = alpha;
    prof.beta = beta;
    prof.s = nodes;
    prof.v.assign(nodes.size(), 0.0);
    prof.dv.assign(nodes.size(), 0.0);
    prof.rel_tol = tol;

    for (std::size_t i = 0; i < nodes.size() && nodes[i] < s0; ++i) {
        const double r = std::exp(nodes[i]);
        prof.v[i] = head.v(r);
        prof.dv[i] = head.dv(r);
        if (i == 0) prof.head_mass = head.mass_below(r, n);
    }
    Solver::State y0 = {head.v(r0), r0 * head.dv(r0), 0.0};
    const double head_mass0 = head.mass_below(r0, n);
    Solver solver(rhs, opts);
    solver.integrate(
        s0, y0, nodes,
        [&](std::size_t i, double s, const Solver::State& y) {
            prof.v[i] = y[0];
            prof.dv[i] = y[1] / std::exp(s);
            if (i == 0) prof.head_mass = head_mass0 + y[2];
        },
        [&](double s, const Solver::State& y) {
            if (!(y[0] > 0.0)) {
                std::ostringstream msg;
                msg << "regular profile hit v <= 0 at s = " << s
                    << " (invalid parameters or tolerance too loose)";
                throw NonPositive(msg.str());
            }
        });
    return prof;
}

RadialProfile solve_singular(const ParamSet& p, double xi0, const SGrid& grid, double tol,
                             int head_order) {
    validate(p);
    const auto nodes = grid_nodes(grid);
    if (xi0 <= 0.0) {
        // Anchor where the head expansion is already converged (x = r^{rho1/beta}
        // around 0.05 keeps the order-8 truncation near 1e-12) without walking
        // into the stiff relaxation region gratuitously.
        xi0 = std::min(0.5 * std::exp(grid.s_min), std::pow(0.05, p.beta / p.rho1));
    }
    if (std::log(xi0) > grid.s_min) {
        throw ConfigError("xi0 must not exceed the first grid radius");
    }
    const SingularHead head = singular_head(p, head_order);
    const double alpha = p.alpha();
    const double beta = p.beta;
    const double ab = alpha / beta;
    const int n = p.n;
    const double m = p.m;
    const double sigma = p.rho1 / beta;
    const double C2 = ab * (n - 2 - m * ab);
    const double a = n - 2 - 2.0 * m * ab;

    // State: W = log(r^{alpha/beta} g), z = dW/ds, J = int_{xi0}^r g rho^{n-1} drho.
    using Solver = DormandPrince<3>;
    Solver::Rhs rhs = [=](double s, const Solver::State& y, Solver::State& dy) {
        const double W = y[0], z = y[1];
        dy[0] = z;
        dy[1] = C2 - a * z - m * z * z -
                (beta / m) * std::exp(-sigma * s + (1.0 - m) * W) * z;
        dy[2] = std::exp(W + (double(n) - ab) * s);
    };
    OdeOptions<3> opts;
    opts.rel_tol = tol;
    // z relaxes onto a slaved manifold where it is exponentially small near
    // the anchor; an absolute floor at 1e-9 keeps the controller from
    // resolving it beyond physical relevance in the stiff stretch.
    opts.abs_tol = {1e-14, 1e-9, 1e-300};
    opts.initial_step = std::min(1e-3, 0.1 * sigma);

    RadialProfile prof;
    prof.kind = ProfileKind::singular;
    prof.params = p;
    prof.alpha = alpha;
    prof.beta = beta;
    prof.s = nodes;
    prof.v.assign(nodes.size(), 0.0);
    prof.dv.assign(nodes.size(), 0.0);
    prof.xi0 = xi0;
    prof.rel_tol = tol;
    prof.head_order = head_order;

    const double s_a = std::log(xi0);
    Solver::State y0 = {std::log(head.L) + head.log_correction(xi0), head.z(xi0), 0.0};
    const double head_mass0 = head.mass_below(xi0, n); // NaN unless n beta > alpha
    Solver solver(rhs, opts);
    solver.integrate(
        s_a, y0, nodes,
        [&](std::size_t i, double s, const Solver::State& y) {
            const double r = std::exp(s);
            prof.v[i] = std::exp(y[0] - ab * s);
            prof.dv[i] = prof.v[i] * (y[1] - ab) / r;
            if (i == 0) prof.head_mass = head_mass0 + y[2];
        },
        [&](double s, const Solver::State& y) {
            if (y[1] < -1e-7 * std::max(1.0, std::abs(y[1]))) {
                std::ostringstream msg;
                msg << "monotonicity breach (z = " << y[1] << " < 0) at s = " << s;
                throw InvariantViolation(msg.str());
            }
            if (y[1] > ab * (1.0 + 1e-12)) {
                std::ostringstream msg;
                msg << "g' > 0 breach (z = " << y[1] << " > alpha/beta) at s = " << s;
                throw InvariantViolation(msg.str());
            }
        });
    return prof;
}

RadialProfile solve_regular(const ParamSet& p, double r_max, double tol) {
    const double s_max = std::log(r_max);
    const double s_min = std::min(-6.0, s_max - 10.0);
    const std::size_t nodes = std::size_t((s_max - s_min) / 0.01) + 2;
    return solve_regular(p, SGrid{s_min, s_max, nodes}, tol);
}

RadialProfile solve_singular(const ParamSet& p, double xi0, double r_max, double tol) {
    const double s_max = std::log(r_max);
    double s_min = std::min(-6.0, s_max - 10.0);
    if (xi0 > 0.0) s_min = std::max(s_min, std::log(xi0));
    const std::size_t nodes = std::size_t((s_max - s_min) / 0.01) + 2;
    return solve_singular(p, xi0, SGrid{s_min, s_max, nodes}, tol, 8);
}

// ---------------------------------------------------------------------------
// residual operators
// ---------------------------------------------------------------------------

namespace {

// r^{n-1} (v^m)'(r) from stored values, factored to avoid overflow.
double flux_term(int n, double m, double r, double v, double dv) {
    return m * dv * std::pow(v, m - 1.0) * std::pow(r, double(n - 1));
}

} // namespace

std::vector<double> ode_residual(const RadialProfile& prof) {
    const std::size_t N = prof.size();
    if (N < 3) throw ConfigError("ode_residual needs at least 3 nodes");
    const int n = prof.params.n;
    const double m = prof.params.m;
    std::vector<double> P(N);
    for (std::size_t i = 0; i < N; ++i)
        P[i] = flux_term(n, m, prof.r(i), prof.v[i], prof.dv[i]);
    const auto dPds = derivative_uniform(P, prof.ds());
    std::vector<double> res(N);
    for (std::size_t i = 0; i < N; ++i) {
        const double r = prof.r(i);
        const double t1 = dPds[i] / r;
        const double t2 = prof.alpha * std::pow(r, double(n - 1)) * prof.v[i];
        const double t3 = prof.beta * std::pow(r, double(n)) * prof.dv[i];
        const double scale = std::abs(t1) + std::abs(t2) + std::abs(t3);
        res[i] = std::abs(t1 + t2 + t3) / (scale > 0.0 ? scale : 1.0);
    }
    return res;
}

std::vector<double> integral_identity_residual(const RadialProfile& prof) {
    if (prof.inverted) throw WrongKind("integral identity undefined for inverted profiles");
    const std::size_t N = prof.size();
    if (N < 2) throw ConfigError("integral_identity_residual needs at least 2 nodes");
    const int n = prof.params.n;
    const double m = prof.params.m;
    const double beta1 = prof.params.rho1 / (n - 2 - n * m);
    const bool at_beta1 = std::abs(prof.beta - beta1) <= 1e-12 * beta1;
    if (prof.kind == ProfileKind::singular && prof.beta < beta1 && !at_beta1) {
        throw WrongRegime("integral identity requires beta >= beta1 for singular profiles");
    }

    std::vector<double> lhs(N), res(N);
    for (std::size_t i = 0; i < N; ++i) {
        const double r = prof.r(i);
        lhs[i] = flux_term(n, m, r, prof.v[i], prof.dv[i]) +
                 prof.beta * std::pow(r, double(n)) * prof.v[i];
    }

    if (prof.kind == ProfileKind::singular && at_beta1) {
        const double L = std::pow(prof.params.lambda,
                                  -prof.params.rho1 / ((1.0 - m) * prof.beta));
        const double target = prof.beta * L;
        for (std::size_t i = 0; i < N; ++i) {
            const double scale = std::abs(lhs[i]) + std::abs(target);
            res[i] = std::abs(lhs[i] - target) / (scale > 0.0 ? scale : 1.0);
        }
        return res;
    }

    std::vector<double> f(N);
    for (std::size_t i = 0; i < N; ++i) f[i] = prof.v[i] * std::exp(double(n) * prof.s[i]);
    const auto Q = cumulative_integral_uniform(f, prof.ds());
    const double coeff = n * prof.beta - prof.alpha;
    for (std::size_t i = 0; i < N; ++i) {
        const double r = prof.r(i);
        const double rhs = coeff * (prof.head_mass + Q[i]);
        const double scale = std::abs(flux_term(n, m, r, prof.v[i], prof.dv[i])) +
                             std::abs(prof.beta * std::pow(r, double(n)) * prof.v[i]) +
                             std::abs(rhs);
        res[i] = std::abs(lhs[i] - rhs) / (scale > 0.0 ? scale : 1.0);
    }
    return res;
}

// ---------------------------------------------------------------------------
// exact transformations
// ---------------------------------------------------------------------------

RadialProfile invert(const RadialProfile& prof) {
    const int n = prof.params.n;
    const double m = prof.params.m;
    if (std::abs(m - double(n - 2) / double(n + 2)) > 1e-14) {
        throw WrongExponent("inversion requires m = (n-2)/(n+2)");
    }
    if (prof.beta == 0.0) throw WrongRegime("inversion requires beta != 0");
    const double q = double(n - 2) / m;
    const std::size_t N = prof.size();

    RadialProfile out;
    out.kind = prof.kind;
    out.params = prof.params;
    out.alpha = prof.alpha - q * prof.beta;
    out.beta = -prof.beta;
    out.inverted = !prof.inverted;
    out.rel_tol = prof.rel_tol;
    out.s.resize(N);
    out.v.resize(N);
    out.dv.resize(N);
    for (std::size_t i = 0; i < N; ++i) {
        const std::size_t j = N - 1 - i;
        const double rho = std::exp(-prof.s[j]);
        out.s[i] = -prof.s[j];
        const double pref = std::pow(rho, -q);
        out.v[i] = pref * prof.v[j];
        out.dv[i] = -(pref / rho) * (q * prof.v[j] + std::exp(prof.s[j]) * prof.dv[j]);
    }
    out.head_mass = kNaN;
    return out;
}

RadialProfile rescale_lambda(const RadialProfile& prof, double lambda2) {
    if (prof.kind == ProfileKind::cylinder) {
        throw WrongKind("cylinder profile has no lambda to rescale");
    }
    if (prof.inverted) throw WrongKind("cannot rescale an inverted profile");
    const double beta1 = prof.params.rho1 / (prof.params.n - 2 - prof.params.n * prof.params.m);
    if (prof.beta < beta1 * (1.0 - 1e-12)) {
        throw WrongRegime("lambda-rescaling identities require beta >= beta1");
    }
    if (!(lambda2 > 0.0)) throw RangeError("lambda2 must be positive");

    const double m = prof.params.m;
    const double k = lambda2 / prof.params.lambda;
    const std::size_t N = prof.size();
    RadialProfile out = prof;
    out.params.lambda = lambda2;
    if (prof.kind == ProfileKind::singular) {
        const double amp = std::pow(k, 2.0 / (1.0 - m));
        const double shift = std::log(k);
        for (std::size_t i = 0; i < N; ++i) {
            out.s[i] = prof.s[i] - shift;
            out.v[i] = amp * prof.v[i];
            out.dv[i] = amp * k * prof.dv[i];
        }
        out.xi0 = prof.xi0 / k;
        out.head_mass = std::pow(k, 2.0 / (1.0 - m) - prof.params.n) * prof.head_mass;
    } else {
        const double arg = std::pow(k, (1.0 - m) / 2.0);
        const double shift = std::log(arg);
        for (std::size_t i = 0; i < N; ++i) {
            out.s[i] = prof.s[i] - shift;
            out.v[i] = k * prof.v[i];
            out.dv[i] = k * arg * prof.dv[i];
        }
        out.head_mass = k * std::pow(arg, -double(prof.params.n)) * prof.head_mass;
    }
    return out;
}

// ---------------------------------------------------------------------------
// interpolation
// ---------------------------------------------------------------------------

ProfileInterpolant::ProfileInterpolant(RadialProfile prof) : prof_(std::move(prof)) {
    if (prof_.kind == ProfileKind::singular) {
        shead_ = singular_head(prof_.params, std::max(prof_.head_order, 8));
    } else if (prof_.kind == ProfileKind::regular) {
        rhead_ = regular_head(prof_.params);
    }
}

double ProfileInterpolant::r_min() const { return 0.0; }

double ProfileInterpolant::r_max() const { return std::exp(prof_.s.back()); }

double ProfileInterpolant::operator()(double r) const {
    if (!(r > 0.0) && prof_.kind != ProfileKind::regular) {
        throw RangeError("profile evaluation needs r > 0");
    }
    if (prof_.kind == ProfileKind::cylinder) return cylinder_value(prof_.params, r);
    const double s = std::log(r);
    if (s <= prof_.s.front()) {
        // Below the first node the head expansions are the right evaluators
        // (their error shrinks as r -> 0).
        return prof_.kind == ProfileKind::singular ? shead_.v(r) : rhead_.v(r);
    }
    if (s > prof_.s.back() + 1e-12) {
        throw RangeError("profile evaluated beyond solved range");
    }
    const double h = prof_.ds();
    std::size_t i = std::min<std::size_t>(
        std::size_t(std::max(0.0, (s - prof_.s.front()) / h)), prof_.size() - 2);
    const double t = (s - prof_.s[i]) / h;
    const double u0 = prof_.v[i], u1 = prof_.v[i + 1];
    const double d0 = std::exp(prof_.s[i]) * prof_.dv[i] * h;
    const double d1 = std::exp(prof_.s[i + 1]) * prof_.dv[i + 1] * h;
    const double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * u0 + (t3 - 2 * t2 + t) * d0 + (-2 * t3 + 3 * t2) * u1 +
           (t3 - t2) * d1;
}

} // namespace fastdiff
