#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "fastdiff/asymptotics.hpp"
#include "fastdiff/errors.hpp"
#include "fastdiff/io.hpp"
#include "fastdiff/params.hpp"
#include "fastdiff/pde.hpp"
#include "fastdiff/profiles.hpp"

using nlohmann::json;
using namespace fastdiff;

namespace {

constexpr const char* kVersion = "0.1.0";

json load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file '" + path + "'");
    try {
        return json::parse(f);
    } catch (const json::parse_error& e) {
        throw ConfigError("config parse error in '" + path + "': " + e.what());
    }
}

double require_number(const json& j, const std::string& key, const std::string& where) {
    if (!j.contains(key)) throw ConfigError(where + ": missing field '" + key + "'");
    if (!j[key].is_number()) throw ConfigError(where + ": field '" + key + "' must be a number");
    return j[key].get<double>();
}

ParamSet params_from_json(const json& cfg) {
    if (!cfg.contains("params")) throw ConfigError("config: missing object 'params'");
    const json& j = cfg["params"];
    ParamSet p;
    p.n = int(require_number(j, "n", "params"));
    p.m = require_number(j, "m", "params");
    p.rho1 = require_number(j, "rho1", "params");
    p.beta = require_number(j, "beta", "params");
    p.lambda = j.value("lambda", 1.0);
    return p;
}

SGrid grid_from_json(const json& cfg, SGrid defaults) {
    SGrid g = defaults;
    if (cfg.contains("grid")) {
        const json& j = cfg["grid"];
        g.s_min = j.value("s_min", g.s_min);
        g.s_max = j.value("s_max", g.s_max);
        g.nodes = j.value("nodes", g.nodes);
    }
    return g;
}

json params_to_json(const ParamSet& p) {
    return json{{"n", p.n}, {"m", p.m}, {"rho1", p.rho1}, {"beta", p.beta},
                {"lambda", p.lambda}};
}

json constants_to_json(const ParamSet& p) {
    const DerivedConstants c = derive(p);
    const BetaClassification cls = classify_beta(p);
    json out{
        {"alpha", c.alpha},
        {"beta0", c.beta0},
        {"beta1", c.beta1},
        {"beta2", c.beta2},
        {"A_beta", c.A_beta},
        {"discriminant", c.discriminant},
        {"real_roots", c.real_roots},
        {"Cstar", c.Cstar},
        {"n_beta_minus_alpha", c.n_beta_minus_alpha},
        {"regime", to_string(cls.regime)},
        {"at_uniqueness_boundary", cls.at_uniqueness_boundary},
        {"sign_n_beta_minus_alpha", cls.sign_n_beta_minus_alpha},
    };
    if (c.real_roots) {
        out["gamma1"] = c.gamma1;
        out["gamma2"] = c.gamma2;
        out["M0"] = c.M0;
        out["A1_beta"] = c.A1_beta;
        out["A2_beta"] = c.A2_beta;
    }
    return out;
}

void write_manifest(const std::string& dir, const std::string& command, unsigned seed,
                    const json& resolved) {
    json manifest{{"tool", "fastdiff"},
                  {"version", kVersion},
                  {"command", command},
                  {"seed", seed},
                  {"config", resolved}};
    write_file(dir + "/manifest.json", manifest.dump(2) + "\n");
}

std::string profile_csv(const RadialProfile& prof) {
    const std::size_t N = prof.size();
    std::vector<double> r(N), wbar(N), y(N);
    for (std::size_t i = 0; i < N; ++i) {
        r[i] = prof.r(i);
        wbar[i] = std::pow(r[i], prof.alpha / prof.beta) * prof.v[i];
        y[i] = r[i] * r[i] * std::pow(prof.v[i], 1.0 - prof.params.m);
    }
    return csv_table({"r", "s", "v", "dv", "r_ab_v", "r2_v_1m"},
                     {r, prof.s, prof.v, prof.dv, wbar, y});
}

double vec_max(const std::vector<double>& v) {
    double m = 0;
    for (double x : v) m = std::max(m, x);
    return m;
}

int run_constants(const json& cfg, const std::string& out_dir, unsigned seed) {
    const ParamSet p = validate(params_from_json(cfg));
    json out = constants_to_json(p);
    out["params"] = params_to_json(p);
    std::cout << out.dump(2) << "\n";
    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        write_file(out_dir + "/constants.json", out.dump(2) + "\n");
        write_manifest(out_dir, "constants", seed, cfg);
    }
    return 0;
}

int run_profile(const json& cfg, const std::string& out_dir, unsigned seed) {
    const ParamSet p = validate(params_from_json(cfg));
    const std::string kind = cfg.value("kind", "regular");
    const SGrid grid = grid_from_json(cfg, SGrid{-6.0, 25.0, 3101});
    const double tol = cfg.value("tol", 1e-10);
    const int head_order = cfg.value("head_order", 8);
    const double xi0 = cfg.value("xi0", 0.0);

    RadialProfile prof;
    if (kind == "cylinder") {
        prof = cylinder_profile(p, grid);
    } else if (kind == "regular") {
        prof = solve_regular(p, grid, tol);
    } else if (kind == "singular") {
        prof = solve_singular(p, xi0, grid, tol, head_order);
    } else {
        throw ConfigError("kind must be cylinder, regular or singular");
    }

    const DerivedConstants c = derive(p);
    json checks;
    checks["max_ode_residual"] = vec_max(ode_residual(prof));
    try {
        checks["max_integral_identity_residual"] = vec_max(integral_identity_residual(prof));
    } catch (const WrongRegime& e) {
        checks["max_integral_identity_residual"] = nullptr;
        checks["integral_identity_note"] = e.what();
    }
    if (kind == "singular") {
        const LogProfile logp = to_log_profile(prof);
        checks["blowup_limit_deviation"] = blowup_limit_check(logp, p, head_order);
        checks["blowup_limit_target"] =
            std::pow(p.lambda, -p.rho1 / ((1.0 - p.m) * p.beta));
        const SingularHead head = singular_head(p, head_order);
        checks["blowup_limit"] = std::pow(prof.r(0), prof.alpha / prof.beta) * prof.v[0] *
                                 std::exp(-head.log_correction(prof.r(0)));
        bool mono_dv = true, mono_wbar = true;
        double prev = 0.0;
        for (std::size_t i = 0; i < prof.size(); ++i) {
            if (prof.dv[i] > 1e-12 * std::abs(prof.v[i] / prof.r(i))) mono_dv = false;
            const double wb = std::pow(prof.r(i), prof.alpha / prof.beta) * prof.v[i];
            if (i > 0 && wb < prev * (1.0 - 1e-12)) mono_wbar = false;
            prev = wb;
        }
        checks["derivative_nonpositive"] = mono_dv;
        checks["r_ab_v_nondecreasing"] = mono_wbar;
        checks["head_exponent_slope"] = head_exponent_slope(logp);
        checks["head_exponent_expected"] = -p.m * p.rho1 / ((1.0 - p.m) * p.beta);
        // Uniqueness (hence xi0-independence) is only proved for beta >= beta1.
        checks["xi0_stability_asserted"] = p.beta >= c.beta1 * (1.0 - 1e-12);
        if (cfg.value("check_xi0_stability", false)) {
            RadialProfile half = solve_singular(p, prof.xi0 / 2.0, grid, tol, head_order);
            double worst = 0.0;
            for (std::size_t i = 0; i < prof.size(); ++i) {
                if (prof.r(i) < 2.0 * prof.xi0) continue;
                worst = std::max(worst, std::abs(prof.v[i] / half.v[i] - 1.0));
            }
            checks["xi0_halving_max_rel_change"] = worst;
        }
    }
    if (kind == "regular") {
        bool mono = true;
        double prev = -1.0;
        for (std::size_t i = 0; i < prof.size(); ++i) {
            const double y = prof.r(i) * prof.r(i) * std::pow(prof.v[i], 1.0 - p.m);
            if (y < prev * (1.0 - 1e-10)) mono = false;
            prev = y;
        }
        checks["r2_v_1m_nondecreasing"] = mono;
    }
    if (cfg.value("check_sandwich", false) && kind != "cylinder") {
        const RadialProfile other = kind == "regular"
                                        ? solve_singular(p, xi0, grid, tol, head_order)
                                        : solve_regular(p, grid, tol);
        const RadialProfile cyl = cylinder_profile(p, grid);
        const RadialProfile& reg = kind == "regular" ? prof : other;
        const RadialProfile& sing = kind == "regular" ? other : prof;
        bool ok = true;
        for (std::size_t i = 0; i < prof.size(); ++i) {
            if (!(reg.v[i] < cyl.v[i] && cyl.v[i] < sing.v[i])) ok = false;
        }
        checks["sandwich_strict"] = ok;
    }

    json out{{"params", params_to_json(p)},
             {"kind", kind},
             {"tol", tol},
             {"xi0", prof.xi0},
             {"head_order", prof.head_order},
             {"checks", checks}};

    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        write_file(out_dir + "/profile.csv", profile_csv(prof));
        if (cfg.value("invert", false)) {
            const RadialProfile inv = invert(prof); // WrongExponent surfaces
            write_file(out_dir + "/inverted.csv", profile_csv(inv));
            out["inverted"] = json{{"alpha", inv.alpha},
                                   {"beta", inv.beta},
                                   {"max_ode_residual", vec_max(ode_residual(inv))}};
        }
        if (cfg.contains("rescale_to_lambda")) {
            const RadialProfile res = rescale_lambda(prof, cfg["rescale_to_lambda"].get<double>());
            write_file(out_dir + "/rescaled.csv", profile_csv(res));
        }
        write_file(out_dir + "/checks.json", out.dump(2) + "\n");
        write_manifest(out_dir, "profile", seed, cfg);
    } else if (cfg.value("invert", false)) {
        const RadialProfile inv = invert(prof);
        out["inverted"] = json{{"alpha", inv.alpha},
                               {"beta", inv.beta},
                               {"max_ode_residual", vec_max(ode_residual(inv))}};
    }
    std::cout << out.dump(2) << "\n";
    return 0;
}

json fit_to_json(const AsymptoticFit& fit) {
    return json{{"Cstar_hat", fit.Cstar_hat}, {"gamma_hat", fit.gamma_hat},
                {"B_hat", fit.B_hat},         {"B_w_diagnostic", fit.B_w},
                {"sign", fit.sign},           {"window", {fit.window.s_lo, fit.window.s_hi}},
                {"residual", fit.residual},   {"lambda", fit.lambda}};
}

int run_asympt(const json& cfg, const std::string& out_dir, unsigned seed) {
    const ParamSet p = validate(params_from_json(cfg));
    const std::string kind = cfg.value("kind", "regular");
    const SGrid grid = grid_from_json(cfg, SGrid{-8.0, 40.0, 4801});
    const double tol = cfg.value("tol", 1e-10);
    const DerivedConstants c = derive(p);

    if (cfg.value("require_second_order", false) && !(p.beta > c.beta2)) {
        throw WrongRegime("beta = " + std::to_string(p.beta) +
                          " is not above beta2 = " + std::to_string(c.beta2) +
                          "; second-order tail fit not certified");
    }

    auto solve_kind = [&](double lambda) {
        ParamSet q = p;
        q.lambda = lambda;
        if (kind == "regular") return solve_regular(q, grid, tol);
        if (kind == "singular") return solve_singular(q, cfg.value("xi0", 0.0), grid, tol,
                                                      cfg.value("head_order", 8));
        throw ConfigError("asympt kind must be regular or singular");
    };

    const RadialProfile prof = solve_kind(p.lambda);
    const LogProfile logp = to_log_profile(prof);
    FitWindow w1, w2;
    if (cfg.contains("window")) {
        const auto& jw = cfg["window"];
        w2 = FitWindow{jw.at(0).get<double>(), jw.at(1).get<double>()};
        w1 = FitWindow{2.0 * w2.s_lo - w2.s_hi, w2.s_lo};
    } else {
        std::tie(w1, w2) = default_fit_windows(logp);
    }
    const AsymptoticFit fit1 = fit_tail(logp, c, w1);
    const AsymptoticFit fit2 = fit_tail(logp, c, w2);

    json out{{"params", params_to_json(p)},
             {"kind", kind},
             {"gamma1", c.gamma1},
             {"fit", fit_to_json(fit2)},
             {"fit_secondary_window", fit_to_json(fit1)},
             {"window_gamma_agreement",
              std::abs(fit1.gamma_hat / fit2.gamma_hat - 1.0)},
             {"window_B_agreement", std::abs(fit1.B_hat / fit2.B_hat - 1.0)},
             {"max_w_equation_residual", vec_max(w_equation_residual(logp))}};
    if (kind == "singular") {
        out["blowup_limit_deviation"] = blowup_limit_check(logp, p, cfg.value("head_order", 8));
    }

    if (cfg.contains("lambdas")) {
        const double l1 = cfg["lambdas"].at(0).get<double>();
        const double l2 = cfg["lambdas"].at(1).get<double>();
        const RadialProfile pr1 = solve_kind(l1);
        const RadialProfile pr2 = solve_kind(l2);
        const AsymptoticFit f1 = fit_tail(to_log_profile(pr1), c, w2);
        const AsymptoticFit f2 = fit_tail(to_log_profile(pr2), c, w2);
        out["B_scaling"] = json{{"lambda1", l1},
                                {"lambda2", l2},
                                {"B1", f1.B_hat},
                                {"B2", f2.B_hat},
                                {"deviation", check_B_scaling(f1, f2, l1, l2, c)}};
    }

    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        std::vector<double> Fe(logp.size());
        for (std::size_t i = 0; i < logp.size(); ++i)
            Fe[i] = logp.F[i] * std::exp(c.gamma1 * logp.s[i]);
        write_file(out_dir + "/logprofile.csv",
                   csv_table({"s", "q", "w", "F", "F_egamma1s"},
                             {logp.s, logp.q, logp.w, logp.F, Fe}));
        write_file(out_dir + "/fit.json", out.dump(2) + "\n");
        write_manifest(out_dir, "asympt", seed, cfg);
    }
    std::cout << out.dump(2) << "\n";
    return 0;
}

SimulationConfig simconfig_from_json(const json& cfg, unsigned seed) {
    SimulationConfig sc;
    sc.params = params_from_json(cfg);
    sc.T = cfg.value("T", 1.0);
    sc.kind = initial_kind_from_string(cfg.value("scenario", "psi"));
    if (cfg.contains("perturbation")) {
        const json& jp = cfg["perturbation"];
        sc.perturbation.amplitude = jp.value("amplitude", 0.1);
        if (jp.contains("support")) {
            sc.perturbation.support_lo = jp["support"].at(0).get<double>();
            sc.perturbation.support_hi = jp["support"].at(1).get<double>();
        }
        if (jp.value("jitter", false)) sc.perturbation.jitter_seed = seed;
    }
    if (cfg.contains("sandwich")) {
        sc.sandwich_lambda_lo = cfg["sandwich"].value("lambda_lo", 0.0);
        sc.sandwich_lambda_hi = cfg["sandwich"].value("lambda_hi", 0.0);
    }
    if (cfg.contains("domain")) {
        const json& jd = cfg["domain"];
        sc.r_min = jd.value("r_min", sc.r_min);
        sc.r_core = jd.value("r_core", sc.r_core);
        sc.r_max = jd.value("r_max", sc.r_max);
        sc.cells = jd.value("cells", sc.cells);
    }
    if (cfg.contains("time")) {
        const json& jt = cfg["time"];
        sc.s_end = jt.value("s_end", sc.s_end);
        sc.dt_factor = jt.value("dt_factor", sc.dt_factor);
        sc.snapshot_ds = jt.value("snapshot_ds", sc.snapshot_ds);
    }
    if (cfg.contains("window")) {
        const json& jw = cfg["window"];
        sc.y_lo = jw.value("y_lo", sc.y_lo);
        sc.y_hi = jw.value("y_hi", sc.y_hi);
        sc.y_cells = jw.value("cells", sc.y_cells);
        if (jw.contains("compact")) {
            sc.compact_lo = jw["compact"].at(0).get<double>();
            sc.compact_hi = jw["compact"].at(1).get<double>();
        }
    }
    const std::string bmode = cfg.value("boundary", "dirichlet");
    if (bmode == "no_flux") sc.boundary = BoundaryMode::no_flux;
    else if (bmode != "dirichlet") throw ConfigError("boundary must be dirichlet or no_flux");
    if (cfg.contains("controls")) {
        sc.controls.rel_tol = cfg["controls"].value("newton_rel_tol", sc.controls.rel_tol);
        sc.controls.max_newton = cfg["controls"].value("max_newton", sc.controls.max_newton);
    }
    return sc;
}

int worker_budget() {
    if (const char* env = std::getenv("FASTDIFF_WORKERS")) {
        const int k = std::atoi(env);
        if (k >= 1) return k;
    }
    return 2;
}

int run_simulate(const json& cfg, const std::string& out_dir, unsigned seed) {
    const SimulationConfig sc = simconfig_from_json(cfg, seed);
    const bool perturbed =
        sc.kind == InitialKind::perturbed_psi || sc.kind == InitialKind::perturbed_V;
    const bool compare_exact = cfg.value("compare_exact", perturbed);

    RescaledTrajectory traj, exact_traj;
    if (compare_exact && perturbed) {
        SimulationConfig ec = sc;
        ec.kind = sc.kind == InitialKind::perturbed_psi ? InitialKind::psi : InitialKind::V;
        ec.sandwich_lambda_lo = ec.sandwich_lambda_hi = 0;
        if (worker_budget() >= 2) {
            auto fut = std::async(std::launch::async,
                                  [&ec] { return Simulation(ec).run(); });
            traj = Simulation(sc).run();
            exact_traj = fut.get();
        } else {
            traj = Simulation(sc).run();
            exact_traj = Simulation(ec).run();
        }
    } else {
        traj = Simulation(sc).run();
    }

    const DerivedConstants c = derive(sc.params);
    const ConvergenceReport conv = convergence_diagnostics(traj);
    json summary{{"params", params_to_json(sc.params)},
                 {"scenario", to_string(sc.kind)},
                 {"s_first", traj.s_values.front()},
                 {"s_last", traj.s_values.back()},
                 {"sup_floor", conv.sup_floor},
                 {"sup_max", vec_max(traj.sup_history)},
                 {"l1_floor", conv.l1_floor},
                 {"predicted_rate", c.n_beta_minus_alpha}};
    summary["stationary"] =
        vec_max(traj.sup_history) <= cfg.value("stationary_tol", 0.05);
    try {
        summary["T_hat"] =
            extinction_time_estimate(traj.t_values, traj.max_u, sc.params.alpha());
    } catch (const NotExtincting& e) {
        summary["T_hat"] = nullptr;
        summary["extinction_note"] = e.what();
    }

    bool invariant_failure = false;
    if (compare_exact && perturbed) {
        const ContractionReport rep = contraction_check(traj, exact_traj, c);
        summary["contraction"] = json{{"phys_nonincreasing", rep.phys_nonincreasing},
                                      {"max_phys_increase", rep.max_phys_increase},
                                      {"empirical_rate", rep.empirical_rate},
                                      {"predicted_rate", rep.predicted_rate},
                                      {"rate_rel_dev", rep.rate_rel_dev}};
        invariant_failure = !rep.phys_nonincreasing;
        if (!out_dir.empty()) {
            std::filesystem::create_directories(out_dir);
            write_file(out_dir + "/pair_histories.csv",
                       csv_table({"s", "l1_phys", "l1_resc"},
                                 {rep.s, rep.l1_phys, rep.l1_resc}));
        }
    }

    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        write_file(out_dir + "/histories.csv",
                   csv_table({"s", "sup_dist", "l1_dist"},
                             {traj.s_values, traj.sup_history, traj.l1_history}));
        write_file(out_dir + "/snapshot_first.csv",
                   csv_table({"r", "u_rescaled"}, {traj.y, traj.snapshots.front()}));
        write_file(out_dir + "/snapshot_last.csv",
                   csv_table({"r", "u_rescaled"}, {traj.y, traj.snapshots.back()}));
        write_file(out_dir + "/summary.json", summary.dump(2) + "\n");
        write_manifest(out_dir, "simulate", seed, cfg);
    }
    std::cout << summary.dump(2) << "\n";
    return invariant_failure ? 3 : 0;
}

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const InvariantViolation*>(&e) ||
        dynamic_cast<const SandwichViolation*>(&e) ||
        dynamic_cast<const PositivityLoss*>(&e)) {
        return 3;
    }
    if (dynamic_cast<const IntegrationFailure*>(&e) ||
        dynamic_cast<const NewtonDivergence*>(&e) || dynamic_cast<const NonPositive*>(&e) ||
        dynamic_cast<const NoDecay*>(&e) || dynamic_cast<const NotExtincting*>(&e) ||
        dynamic_cast<const PastExtinction*>(&e)) {
        return 2;
    }
    return 1; // usage / config / regime errors
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Self-similar profiles and extinction dynamics of u_t = div(grad u^m)"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path, out_dir;
    unsigned seed = 0;
    app.add_option("--config", config_path, "JSON run configuration");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--seed", seed, "seed for perturbation placement");

    auto* c_const = app.add_subcommand("constants", "derived constants and regime");
    double n = 0, m = 0, rho1 = 0, beta = 0, lambda = 1;
    c_const->add_option("--n", n, "dimension");
    c_const->add_option("--m", m, "exponent");
    c_const->add_option("--rho1", rho1, "scaling constant");
    c_const->add_option("--beta", beta, "self-similar exponent");
    c_const->add_option("--lambda", lambda, "amplitude");
    auto* c_prof = app.add_subcommand("profile", "solve and check a radial profile");
    bool invert_flag = false;
    c_prof->add_flag("--invert", invert_flag, "also emit the inverted profile");
    auto* c_asym = app.add_subcommand("asympt", "tail asymptotics fits");
    auto* c_sim = app.add_subcommand("simulate", "radial PDE run near extinction");

    CLI11_PARSE(app, argc, argv);

    try {
        json cfg;
        if (!config_path.empty()) {
            cfg = load_config(config_path);
        } else if (c_const->parsed() && n > 0) {
            cfg = json{{"params",
                        {{"n", n}, {"m", m}, {"rho1", rho1}, {"beta", beta},
                         {"lambda", lambda}}}};
        } else {
            throw ConfigError("--config is required (constants also accepts --n/--m/--rho1/--beta)");
        }
        if (c_const->parsed()) return run_constants(cfg, out_dir, seed);
        if (c_prof->parsed()) {
            if (invert_flag) cfg["invert"] = true;
            return run_profile(cfg, out_dir, seed);
        }
        if (c_asym->parsed()) return run_asympt(cfg, out_dir, seed);
        if (c_sim->parsed()) return run_simulate(cfg, out_dir, seed);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e);
    }
    return 0;
}
