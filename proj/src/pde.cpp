#include "fastdiff/pde.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <sstream>

#include "fastdiff/errors.hpp"
#include "fastdiff/numerics.hpp"

namespace fastdiff {

namespace {

void fill_weights(RadialGrid& g) {
    const double omega = sphere_area(g.n);
    const std::size_t N = g.centers.size();
    g.weights.resize(N);
    g.face_area.resize(N + 1);
    for (std::size_t i = 0; i < N; ++i) {
        g.weights[i] = omega *
                       (std::pow(g.faces[i + 1], g.n) - std::pow(g.faces[i], g.n)) / g.n;
    }
    for (std::size_t i = 0; i <= N; ++i)
        g.face_area[i] = omega * std::pow(g.faces[i], g.n - 1);
}

// Piecewise log-log interpolation of positive cell data; flat beyond the
// first/last centers (the boundary faces cap the admissible range).
double interp_loglog(const RadialGrid& g, const std::vector<double>& u, double r) {
    const auto& c = g.centers;
    if (r <= c.front()) {
        if (r < g.faces.front() * (1.0 - 1e-12)) {
            throw RangeError("interpolation below the inner face");
        }
        return u.front();
    }
    if (r >= c.back()) {
        if (r > g.faces.back() * (1.0 + 1e-12)) {
            throw RangeError("interpolation beyond the outer face");
        }
        return u.back();
    }
    const auto it = std::upper_bound(c.begin(), c.end(), r);
    const std::size_t i = std::size_t(it - c.begin()) - 1;
    const double t = std::log(r / c[i]) / std::log(c[i + 1] / c[i]);
    if (u[i] > 0.0 && u[i + 1] > 0.0) {
        return std::exp((1.0 - t) * std::log(u[i]) + t * std::log(u[i + 1]));
    }
    return (1.0 - t) * u[i] + t * u[i + 1];
}

void thomas_solve(std::vector<double>& lower, std::vector<double>& diag,
                  std::vector<double>& upper, std::vector<double>& rhs) {
    const std::size_t N = diag.size();
    for (std::size_t i = 1; i < N; ++i) {
        const double m = lower[i] / diag[i - 1];
        diag[i] -= m * upper[i - 1];
        rhs[i] -= m * rhs[i - 1];
    }
    rhs[N - 1] /= diag[N - 1];
    for (std::size_t i = N - 1; i-- > 0;) {
        rhs[i] = (rhs[i] - upper[i] * rhs[i + 1]) / diag[i];
    }
}

} // namespace

double sphere_area(int n) {
    return 2.0 * std::pow(std::numbers::pi, n / 2.0) / std::tgamma(n / 2.0);
}

RadialGrid make_ball_grid(int n, double r_core, double r_max, std::size_t cells) {
    if (!(r_core > 0.0) || !(r_max > r_core) || cells < 4) {
        throw ConfigError("ball grid needs 0 < r_core < r_max and >= 4 cells");
    }
    RadialGrid g;
    g.n = n;
    g.ball = true;
    g.faces.resize(cells + 1);
    g.faces[0] = 0.0;
    const double ratio = std::log(r_max / r_core) / double(cells - 1);
    for (std::size_t i = 1; i <= cells; ++i)
        g.faces[i] = r_core * std::exp(double(i - 1) * ratio);
    g.faces[cells] = r_max;
    g.centers.resize(cells);
    g.centers[0] = 0.5 * r_core;
    for (std::size_t i = 1; i < cells; ++i)
        g.centers[i] = std::sqrt(g.faces[i] * g.faces[i + 1]);
    fill_weights(g);
    return g;
}

RadialGrid make_annulus_grid(int n, double r_min, double r_max, std::size_t cells) {
    if (!(r_min > 0.0) || !(r_max > r_min) || cells < 4) {
        throw ConfigError("annulus grid needs 0 < r_min < r_max and >= 4 cells");
    }
    RadialGrid g;
    g.n = n;
    g.ball = false;
    g.faces.resize(cells + 1);
    const double ratio = std::log(r_max / r_min) / double(cells);
    for (std::size_t i = 0; i <= cells; ++i)
        g.faces[i] = r_min * std::exp(double(i) * ratio);
    g.faces[cells] = r_max;
    g.centers.resize(cells);
    for (std::size_t i = 0; i < cells; ++i)
        g.centers[i] = std::sqrt(g.faces[i] * g.faces[i + 1]);
    fill_weights(g);
    return g;
}

double l1_distance(const std::vector<double>& a, const std::vector<double>& b,
                   const RadialGrid& grid) {
    if (a.size() != b.size() || a.size() != grid.cells()) {
        throw GridMismatch("l1_distance needs matching grids");
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += grid.weights[i] * std::abs(a[i] - b[i]);
    return acc;
}

SelfSimilarSolution::SelfSimilarSolution(ProfileInterpolant profile, double T)
    : profile_(std::move(profile)), T_(T) {
    const ParamSet& p = profile_.params();
    if (std::abs(p.rho1 - 1.0) > 1e-12) {
        throw ConfigError("self-similar solutions of the PDE require rho1 = 1");
    }
    alpha_ = p.alpha();
    beta_ = p.beta;
}

double SelfSimilarSolution::operator()(double r, double t) const {
    if (t >= T_) throw PastExtinction("reference evaluated at t >= T");
    const double tau = T_ - t;
    return std::pow(tau, alpha_) * profile_(std::pow(tau, beta_) * r);
}

InitialKind initial_kind_from_string(const std::string& name) {
    if (name == "psi") return InitialKind::psi;
    if (name == "V") return InitialKind::V;
    if (name == "perturbed_psi") return InitialKind::perturbed_psi;
    if (name == "perturbed_V") return InitialKind::perturbed_V;
    throw ConfigError("unknown initial kind '" + name + "'");
}

std::string to_string(InitialKind k) {
    switch (k) {
    case InitialKind::psi: return "psi";
    case InitialKind::V: return "V";
    case InitialKind::perturbed_psi: return "perturbed_psi";
    case InitialKind::perturbed_V: return "perturbed_V";
    }
    return "?";
}

PdeState make_initial(InitialKind kind, const ParamSet& p, double T, const RadialGrid& grid,
                      const SelfSimilarSolution& ref, const PerturbationSpec& spec,
                      const SelfSimilarSolution* sandwich_lo,
                      const SelfSimilarSolution* sandwich_hi) {
    if (std::abs(p.rho1 - 1.0) > 1e-12) {
        throw ConfigError("make_initial requires rho1 = 1");
    }
    const bool wants_singular = kind == InitialKind::V || kind == InitialKind::perturbed_V;
    if (wants_singular == (ref.profile().kind() == ProfileKind::regular)) {
        throw WrongKind("initial kind does not match the reference profile kind");
    }
    PdeState state;
    state.t = 0.0;
    state.T = T;
    state.params = p;
    state.u.resize(grid.cells());
    double lo = spec.support_lo, hi = spec.support_hi;
    if (spec.jitter_seed != 0) {
        // deterministic support shift in [1, 1.5]
        const double f = 1.0 + 0.5 * ((spec.jitter_seed * 2654435761u) % 1000u) / 999.0;
        lo *= f;
        hi *= f;
    }
    const bool perturbed =
        kind == InitialKind::perturbed_psi || kind == InitialKind::perturbed_V;
    for (std::size_t i = 0; i < grid.cells(); ++i) {
        const double r = grid.centers[i];
        double u = ref(r, 0.0);
        if (perturbed && r >= lo && r <= hi) u *= 1.0 + spec.amplitude;
        state.u[i] = u;
    }
    if (sandwich_lo || sandwich_hi) {
        for (std::size_t i = 0; i < grid.cells(); ++i) {
            const double r = grid.centers[i];
            if (sandwich_lo && state.u[i] < (*sandwich_lo)(r, 0.0) * (1.0 - 1e-12)) {
                std::ostringstream msg;
                msg << "u0 < lower sandwich bound at r = " << r;
                throw SandwichViolation(msg.str());
            }
            if (sandwich_hi && state.u[i] > (*sandwich_hi)(r, 0.0) * (1.0 + 1e-12)) {
                std::ostringstream msg;
                msg << "u0 > upper sandwich bound at r = " << r;
                throw SandwichViolation(msg.str());
            }
        }
    }
    return state;
}

StepReport step(PdeState& state, double dt, const RadialGrid& grid, BoundaryMode mode,
                const std::function<double(double, double)>& boundary_value,
                const StepControls& ctl) {
    if (!(dt > 0.0)) throw ConfigError("step needs dt > 0");
    const std::size_t N = grid.cells();
    if (state.u.size() != N) throw GridMismatch("state does not match grid");
    const double m = state.params.m;
    const double t_new = state.t + dt;

    const bool dirichlet = mode == BoundaryMode::dirichlet;
    double coef_in = 0.0, w_in = 0.0, coef_out = 0.0, w_out = 0.0;
    if (dirichlet) {
        if (!grid.ball) {
            coef_in = grid.face_area.front() / (grid.centers.front() - grid.faces.front());
            w_in = std::pow(boundary_value(grid.faces.front(), t_new), m);
        }
        coef_out = grid.face_area.back() / (grid.faces.back() - grid.centers.back());
        w_out = std::pow(boundary_value(grid.faces.back(), t_new), m);
    }
    std::vector<double> coef(N + 1, 0.0); // interior face conductances
    for (std::size_t i = 1; i < N; ++i) {
        coef[i] = grid.face_area[i] / (grid.centers[i] - grid.centers[i - 1]);
    }
    coef[0] = coef_in;
    coef[N] = coef_out;

    std::vector<double> w(N), u_old = state.u;
    for (std::size_t i = 0; i < N; ++i) {
        if (!(u_old[i] > 0.0)) throw PositivityLoss("step requires positive u");
        w[i] = std::pow(u_old[i], m);
    }

    // The flux part of the residual is evaluated from O(1) quantities whose
    // rounding is amplified by dt/(V h); Newton cannot push the residual
    // below that floor, so it joins the convergence scale.
    std::vector<double> res_floor(N);
    for (std::size_t i = 0; i < N; ++i) {
        res_floor[i] = 16.0 * std::numeric_limits<double>::epsilon() *
                       (dt / grid.weights[i]) * (coef[i] + coef[i + 1]) * w[i];
    }

    auto residual = [&](const std::vector<double>& wv, std::vector<double>& G) {
        G.resize(N);
        for (std::size_t i = 0; i < N; ++i) {
            const double wl = i == 0 ? w_in : wv[i - 1];
            const double wr = i + 1 == N ? w_out : wv[i + 1];
            double flux = coef[i + 1] * (wr - wv[i]) - coef[i] * (wv[i] - wl);
            if (i == 0 && !dirichlet) flux = coef[i + 1] * (wr - wv[i]);
            if (i + 1 == N && !dirichlet) flux = -coef[i] * (wv[i] - wl);
            if (N == 1 && !dirichlet) flux = 0.0;
            G[i] = (std::pow(wv[i], 1.0 / m) - u_old[i]) - dt / grid.weights[i] * flux;
        }
    };
    auto norm = [&](const std::vector<double>& wv, const std::vector<double>& G) {
        double worst = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double scale = ctl.rel_tol * std::max(u_old[i], std::pow(wv[i], 1.0 / m)) +
                                 ctl.abs_tol + res_floor[i];
            worst = std::max(worst, std::abs(G[i]) / scale);
        }
        return worst;
    };

    std::vector<double> G, lower(N), diag(N), upper(N), rhs(N), w_try, G_try;
    residual(w, G);
    double phi = norm(w, G);
    StepReport report;
    int iter = 0;
    while (phi > 1.0) {
        if (++iter > ctl.max_newton) {
            std::ostringstream msg;
            msg << "Newton did not converge in " << ctl.max_newton
                << " iterations; dt = " << dt << " too large, try dt <= " << dt / 4.0;
            throw NewtonDivergence(msg.str());
        }
        for (std::size_t i = 0; i < N; ++i) {
            const double vd = dt / grid.weights[i];
            double cl = coef[i], cr = coef[i + 1];
            if (!dirichlet) {
                if (i == 0) cl = 0.0;
                if (i + 1 == N) cr = 0.0;
            }
            diag[i] = (1.0 / m) * std::pow(w[i], 1.0 / m - 1.0) + vd * (cl + cr);
            lower[i] = i == 0 ? 0.0 : -vd * cl;
            upper[i] = i + 1 == N ? 0.0 : -vd * cr;
            rhs[i] = -G[i];
        }
        thomas_solve(lower, diag, upper, rhs); // rhs becomes delta w

        double theta = 1.0;
        for (std::size_t i = 0; i < N; ++i) {
            if (rhs[i] < 0.0) theta = std::min(theta, -0.95 * w[i] / rhs[i]);
        }
        bool accepted = false;
        for (int bt = 0; bt < ctl.max_backtracks; ++bt) {
            w_try = w;
            for (std::size_t i = 0; i < N; ++i) w_try[i] += theta * rhs[i];
            residual(w_try, G_try);
            const double phi_try = norm(w_try, G_try);
            if (phi_try <= 1.0 || phi_try <= (1.0 - 0.25 * theta) * phi) {
                w = std::move(w_try);
                G = std::move(G_try);
                phi = phi_try;
                accepted = true;
                break;
            }
            theta *= 0.5;
        }
        if (!accepted) {
            std::ostringstream msg;
            msg << "Newton line search stalled at t = " << state.t << "; dt = " << dt
                << " too large, try dt <= " << dt / 4.0;
            throw NewtonDivergence(msg.str());
        }
    }
    report.newton_iterations = iter;
    for (std::size_t i = 0; i < N; ++i) {
        const double u_new = std::pow(w[i], 1.0 / m);
        if (!(u_new > 0.0)) throw PositivityLoss("u lost positivity during step");
        state.u[i] = u_new;
    }
    state.t = t_new;
    if (dirichlet) {
        if (!grid.ball) report.mass_in_inner = dt * coef[0] * (w_in - w[0]);
        report.mass_in_outer = dt * coef[N] * (w_out - w[N - 1]);
    }
    return report;
}

std::vector<double> rescale(const PdeState& state, const RadialGrid& grid,
                            const std::vector<double>& y) {
    if (state.t >= state.T) {
        throw PastExtinction("rescale needs t < T");
    }
    const double tau = state.T - state.t;
    const double fu = std::pow(tau, -state.params.alpha());
    const double fr = std::pow(tau, -state.params.beta);
    std::vector<double> out(y.size());
    for (std::size_t j = 0; j < y.size(); ++j) {
        out[j] = fu * interp_loglog(grid, state.u, fr * y[j]);
    }
    return out;
}

Simulation::Simulation(SimulationConfig cfg)
    : cfg_(std::move(cfg)),
      grid_(cfg_.kind == InitialKind::psi || cfg_.kind == InitialKind::perturbed_psi
                ? make_ball_grid(cfg_.params.n, cfg_.r_core, cfg_.r_max, cfg_.cells)
                : make_annulus_grid(cfg_.params.n, cfg_.r_min, cfg_.r_max, cfg_.cells)),
      ref_([&] {
          validate(cfg_.params);
          if (std::abs(cfg_.params.rho1 - 1.0) > 1e-12) {
              throw ConfigError("simulation requires rho1 = 1");
          }
          const bool regular = cfg_.kind == InitialKind::psi ||
                               cfg_.kind == InitialKind::perturbed_psi;
          // Reference profile must cover (T-t)^beta r for every r in the
          // domain and t in the run, i.e. radii up to T^beta * r_max.
          const double s_hi =
              std::log(std::pow(cfg_.T, cfg_.params.beta) * cfg_.r_max) + 0.05;
          const double s_lo = std::min(std::log(regular ? cfg_.r_core : cfg_.r_min) - 1.0,
                                       -7.0);
          const std::size_t nodes = std::size_t((s_hi - s_lo) / 0.005) + 2;
          SGrid sgrid{s_lo, s_hi, nodes};
          RadialProfile prof = regular
                                   ? solve_regular(cfg_.params, sgrid, 1e-10)
                                   : solve_singular(cfg_.params, 0.0, sgrid, 1e-10, 8);
          return SelfSimilarSolution(ProfileInterpolant(std::move(prof)), cfg_.T);
      }()),
      state_() {
    // Observation window must stay inside the domain for the whole run.
    const double r_needed = cfg_.y_hi * std::exp(cfg_.params.beta * cfg_.s_end);
    if (r_needed > cfg_.r_max * (1.0 + 1e-9)) {
        std::ostringstream msg;
        msg << "rescaled window needs r_max >= " << r_needed << " (got " << cfg_.r_max
            << "); enlarge the domain or shorten the run";
        throw ConfigError(msg.str());
    }
    const SelfSimilarSolution* lo = nullptr;
    const SelfSimilarSolution* hi = nullptr;
    std::unique_ptr<SelfSimilarSolution> lo_own, hi_own;
    const bool perturbed =
        cfg_.kind == InitialKind::perturbed_psi || cfg_.kind == InitialKind::perturbed_V;
    if (perturbed && cfg_.sandwich_lambda_lo > 0 && cfg_.sandwich_lambda_hi > 0) {
        const bool regular = cfg_.kind == InitialKind::perturbed_psi;
        auto solve_at = [&](double lam) {
            ParamSet p = cfg_.params;
            p.lambda = lam;
            const double s_hi = std::log(std::pow(cfg_.T, cfg_.params.beta) * cfg_.r_max) + 0.05;
            const double s_lo =
                std::min(std::log(regular ? cfg_.r_core : cfg_.r_min) - 1.0, -7.0);
            const std::size_t nodes = std::size_t((s_hi - s_lo) / 0.005) + 2;
            SGrid sgrid{s_lo, s_hi, nodes};
            RadialProfile prof = regular ? solve_regular(p, sgrid, 1e-10)
                                         : solve_singular(p, 0.0, sgrid, 1e-10, 8);
            return std::make_unique<SelfSimilarSolution>(ProfileInterpolant(std::move(prof)),
                                                         cfg_.T);
        };
        // For regular profiles larger lambda lies above; for singular, below.
        const bool regular_kind = regular;
        const double lam_lo = regular_kind ? cfg_.sandwich_lambda_lo : cfg_.sandwich_lambda_hi;
        const double lam_hi = regular_kind ? cfg_.sandwich_lambda_hi : cfg_.sandwich_lambda_lo;
        lo_own = solve_at(lam_lo);
        hi_own = solve_at(lam_hi);
        lo = lo_own.get();
        hi = hi_own.get();
    }
    state_ = make_initial(cfg_.kind, cfg_.params, cfg_.T, grid_, ref_, cfg_.perturbation, lo,
                          hi);
}

RescaledTrajectory Simulation::run() {
    RescaledTrajectory traj;
    // fixed rescaled radii: log-spaced cells between y_lo and y_hi
    const RadialGrid ygrid =
        make_annulus_grid(cfg_.params.n, cfg_.y_lo, cfg_.y_hi, cfg_.y_cells);
    traj.y = ygrid.centers;
    traj.y_weights = ygrid.weights;
    traj.phys_weights = grid_.weights;

    std::vector<double> target(traj.y.size());
    for (std::size_t j = 0; j < traj.y.size(); ++j) target[j] = ref_.profile()(traj.y[j]);

    auto record = [&] {
        const double s = -std::log(state_.T - state_.t);
        traj.s_values.push_back(s);
        traj.t_values.push_back(state_.t);
        std::vector<double> resc = rescale(state_, grid_, traj.y);
        double sup = 0.0, l1 = 0.0;
        for (std::size_t j = 0; j < traj.y.size(); ++j) {
            const double d = std::abs(resc[j] - target[j]);
            if (traj.y[j] >= cfg_.compact_lo && traj.y[j] <= cfg_.compact_hi)
                sup = std::max(sup, d);
            l1 += traj.y_weights[j] * d;
        }
        traj.sup_history.push_back(sup);
        traj.l1_history.push_back(l1);
        traj.snapshots.push_back(std::move(resc));
        traj.u_phys.push_back(state_.u);
        traj.max_u.push_back(*std::max_element(state_.u.begin(), state_.u.end()));
    };

    record();
    const double s0 = -std::log(state_.T);
    double next_snap = s0 + cfg_.snapshot_ds;
    const double tau_end = std::exp(-cfg_.s_end);
    auto bc = [&](double r, double t) { return ref_(r, t); };
    while (true) {
        const double tau = state_.T - state_.t;
        if (-std::log(tau) >= cfg_.s_end - 1e-12) break;
        double dt = cfg_.dt_factor * tau;
        if (tau - dt < tau_end) dt = tau - tau_end; // land exactly on s_end
        if (!(dt > 1e-16 * tau)) break;
        step(state_, dt, grid_, cfg_.boundary, bc, cfg_.controls);
        const double s_new = -std::log(state_.T - state_.t);
        if (s_new >= next_snap - 1e-12 || s_new >= cfg_.s_end - 1e-12) {
            record();
            while (next_snap <= s_new + 1e-12) next_snap += cfg_.snapshot_ds;
        }
    }
    return traj;
}

ContractionReport contraction_check(const RescaledTrajectory& a, const RescaledTrajectory& b,
                                    const DerivedConstants& constants,
                                    double fit_skip_fraction, double monotonicity_tol) {
    if (a.s_values.size() != b.s_values.size() || a.y.size() != b.y.size() ||
        a.u_phys.empty() || a.u_phys.front().size() != b.u_phys.front().size()) {
        throw GridMismatch("contraction_check needs runs sharing grid and s samples");
    }
    for (std::size_t k = 0; k < a.s_values.size(); ++k) {
        if (std::abs(a.s_values[k] - b.s_values[k]) > 1e-9) {
            throw GridMismatch("contraction_check: s samples differ");
        }
    }
    ContractionReport rep;
    rep.s = a.s_values;
    const std::size_t K = a.s_values.size();
    rep.l1_phys.resize(K);
    rep.l1_resc.resize(K);
    for (std::size_t k = 0; k < K; ++k) {
        double phys = 0.0;
        for (std::size_t i = 0; i < a.u_phys[k].size(); ++i) {
            phys += a.phys_weights[i] * std::abs(a.u_phys[k][i] - b.u_phys[k][i]);
        }
        rep.l1_phys[k] = phys;
        double resc = 0.0;
        for (std::size_t j = 0; j < a.y.size(); ++j) {
            resc += a.y_weights[j] * std::abs(a.snapshots[k][j] - b.snapshots[k][j]);
        }
        rep.l1_resc[k] = resc;
    }
    rep.phys_nonincreasing = true;
    rep.max_phys_increase = 0.0;
    for (std::size_t k = 1; k < K; ++k) {
        const double rise = (rep.l1_phys[k] - rep.l1_phys[k - 1]) /
                            std::max(rep.l1_phys[0], 1e-300);
        rep.max_phys_increase = std::max(rep.max_phys_increase, rise);
        if (rise > monotonicity_tol) rep.phys_nonincreasing = false;
    }
    rep.predicted_rate = constants.n_beta_minus_alpha;
    const double s_from = rep.s.front() + fit_skip_fraction * (rep.s.back() - rep.s.front());
    std::vector<double> xs, ys;
    for (std::size_t k = 0; k < K; ++k) {
        if (rep.s[k] < s_from || rep.l1_resc[k] <= 0.0) continue;
        xs.push_back(rep.s[k]);
        ys.push_back(std::log(rep.l1_resc[k]));
    }
    if (xs.size() >= 3) {
        rep.empirical_rate = -fit_line(xs, ys).slope;
        rep.rate_rel_dev = std::abs(rep.empirical_rate / rep.predicted_rate - 1.0);
    } else {
        rep.empirical_rate = 0.0;
        rep.rate_rel_dev = 1.0;
    }
    return rep;
}

ConvergenceReport convergence_diagnostics(const RescaledTrajectory& traj) {
    ConvergenceReport rep;
    rep.s = traj.s_values;
    rep.sup_history = traj.sup_history;
    rep.l1_history = traj.l1_history;
    rep.sup_floor = traj.sup_history.back();
    rep.l1_floor = traj.l1_history.back();
    const double lowest = *std::min_element(traj.sup_history.begin(), traj.sup_history.end());
    rep.sup_decreasing_to_floor = rep.sup_floor <= 1.25 * std::max(lowest, 1e-300) &&
                                  rep.sup_floor <= traj.sup_history.front() * 1.05;
    return rep;
}

double extinction_time_estimate(const std::vector<double>& t_values,
                                const std::vector<double>& max_u, double alpha) {
    if (t_values.size() != max_u.size() || t_values.size() < 3) {
        throw ConfigError("extinction_time_estimate needs >= 3 samples");
    }
    if (!(max_u.back() < 0.9 * max_u.front())) {
        throw NotExtincting("max u is not decreasing toward zero");
    }
    std::vector<double> ys(max_u.size());
    for (std::size_t i = 0; i < max_u.size(); ++i) ys[i] = std::pow(max_u[i], 1.0 / alpha);
    const LineFit fit = fit_line(t_values, ys);
    if (!(fit.slope < 0.0)) throw NotExtincting("fitted amplitude is not decaying");
    return -fit.intercept / fit.slope;
}

} // namespace fastdiff
