#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "fastdiff/params.hpp"
#include "fastdiff/profiles.hpp"

namespace fastdiff {

/// Surface area coefficient of the unit sphere in R^n: 2 pi^{n/2} / Gamma(n/2).
double sphere_area(int n);

/// Finite-volume grid for the radial problem. Ball grids start at r = 0 (the
/// inner face has zero area, which is the natural symmetry condition);
/// annulus grids are punctured. weights are the exact cell measures
/// omega_{n-1} * (f_{i+1}^n - f_i^n)/n used for L1 integrals.
struct RadialGrid {
    int n = 3;
    bool ball = true;
    std::vector<double> centers;
    std::vector<double> faces;     ///< cells()+1 entries
    std::vector<double> weights;   ///< cell measures
    std::vector<double> face_area; ///< omega_{n-1} * r^{n-1} per face

    std::size_t cells() const { return centers.size(); }
};

/// Ball grid: one core cell [0, r_core] plus log-spaced cells to r_max.
RadialGrid make_ball_grid(int n, double r_core, double r_max, std::size_t cells);

/// Punctured (annulus) grid, log-spaced between r_min and r_max.
RadialGrid make_annulus_grid(int n, double r_min, double r_max, std::size_t cells);

/// Weighted radial L1 distance sum_i weights_i |a_i - b_i|.
double l1_distance(const std::vector<double>& a, const std::vector<double>& b,
                   const RadialGrid& grid);

/// A reference solution (T-t)^alpha * profile((T-t)^beta r) built from a
/// solved radial profile; requires rho1 = 1 (otherwise the ansatz does not
/// solve u_t = Delta u^m).
class SelfSimilarSolution {
public:
    SelfSimilarSolution(ProfileInterpolant profile, double T);

    double operator()(double r, double t) const;
    double T() const { return T_; }
    const ProfileInterpolant& profile() const { return profile_; }

private:
    ProfileInterpolant profile_;
    double T_;
    double alpha_;
    double beta_;
};

/// Simulator state: cell values of u at time t plus the nominal extinction
/// time of the reference solution.
struct PdeState {
    double t = 0;
    double T = 1;
    ParamSet params;
    std::vector<double> u;
};

enum class BoundaryMode { dirichlet, no_flux };

enum class InitialKind { psi, V, perturbed_psi, perturbed_V };

InitialKind initial_kind_from_string(const std::string& name);
std::string to_string(InitialKind k);

/// Multiplicative compactly-supported bump u0 = ref * (1 + amplitude) on
/// [support_lo, support_hi]. When jitter_seed is nonzero the support is
/// shifted by a deterministic pseudo-random factor in [1, 1.5].
struct PerturbationSpec {
    double amplitude = 0.1;
    double support_lo = 1.0;
    double support_hi = 2.0;
    unsigned jitter_seed = 0;
};

/// Samples u0 from the reference solution at t = 0, with the optional bump
/// for the perturbed kinds. If sandwich_lo/hi are given, verifies
/// lo(r,0) <= u0 <= hi(r,0) cell-wise and throws SandwichViolation otherwise.
PdeState make_initial(InitialKind kind, const ParamSet& p, double T, const RadialGrid& grid,
                      const SelfSimilarSolution& ref, const PerturbationSpec& spec = {},
                      const SelfSimilarSolution* sandwich_lo = nullptr,
                      const SelfSimilarSolution* sandwich_hi = nullptr);

struct StepControls {
    double rel_tol = 1e-10;   ///< per-cell Newton tolerance, in u units
    double abs_tol = 1e-300;
    int max_newton = 40;
    int max_backtracks = 30;
};

struct StepReport {
    int newton_iterations = 0;
    double mass_in_inner = 0; ///< boundary mass inflow through the inner face
    double mass_in_outer = 0; ///< ... and the outer face, over this step
};

/// One backward-Euler step of u_t = r^{1-n} (r^{n-1} (u^m)_r)_r on the grid,
/// solved by damped Newton in the w = u^m variable (tridiagonal Jacobian).
/// Dirichlet data are sampled at the boundary faces at the new time level.
/// Positivity is preserved; ordered inputs yield ordered outputs.
StepReport step(PdeState& state, double dt, const RadialGrid& grid, BoundaryMode mode,
                const std::function<double(double, double)>& boundary_value,
                const StepControls& ctl = {});

/// (T-t)^{-alpha} u((T-t)^{-beta} y, t) interpolated onto the fixed rescaled
/// radii y (log-log interpolation between cell centers). Throws
/// PastExtinction if t >= T and RangeError if a y maps outside the grid.
std::vector<double> rescale(const PdeState& state, const RadialGrid& grid,
                            const std::vector<double>& y);

/// Rescaled snapshots and norm histories of one run.
struct RescaledTrajectory {
    std::vector<double> s_values;
    std::vector<double> t_values;
    std::vector<double> y;         ///< fixed rescaled radii
    std::vector<double> y_weights; ///< cell measures on the y grid
    std::vector<double> phys_weights;
    std::vector<std::vector<double>> snapshots; ///< u~ per s on y
    std::vector<std::vector<double>> u_phys;    ///< physical field per s
    std::vector<double> sup_history; ///< sup |u~ - target| on the compact annulus
    std::vector<double> l1_history;  ///< weighted L1 |u~ - target| over the y window
    std::vector<double> max_u;       ///< max of the physical field per snapshot
};

struct SimulationConfig {
    ParamSet params;         ///< rho1 must equal 1
    double T = 1.0;
    InitialKind kind = InitialKind::psi;
    PerturbationSpec perturbation;
    double sandwich_lambda_lo = 0; ///< 0 = skip the sandwich check
    double sandwich_lambda_hi = 0;
    // domain
    double r_min = 1e-4;     ///< annulus runs only
    double r_core = 1e-3;    ///< ball runs: core cell radius
    double r_max = 500.0;
    std::size_t cells = 400;
    // time
    double s_end = 1.0;      ///< run from s = -log T to s_end
    double dt_factor = 0.002;///< dt = dt_factor * (T - t)
    double snapshot_ds = 0.05;
    // rescaled observation window
    double y_lo = 0.05;
    double y_hi = 2.0;
    std::size_t y_cells = 200;
    double compact_lo = 0.25; ///< sup-norm annulus
    double compact_hi = 2.0;
    BoundaryMode boundary = BoundaryMode::dirichlet;
    StepControls controls;
};

/// Owns the grid, the reference profile solve and the time loop for one run.
class Simulation {
public:
    explicit Simulation(SimulationConfig cfg);

    RescaledTrajectory run();

    const RadialGrid& grid() const { return grid_; }
    const SelfSimilarSolution& reference() const { return ref_; }
    const PdeState& state() const { return state_; }

private:
    SimulationConfig cfg_;
    RadialGrid grid_;
    SelfSimilarSolution ref_;
    PdeState state_;
};

struct ContractionReport {
    bool phys_nonincreasing = false;
    double max_phys_increase = 0;  ///< worst relative uptick of the L1 sequence
    double empirical_rate = 0;     ///< fitted decay rate of the rescaled L1 distance
    double predicted_rate = 0;     ///< n beta - alpha
    double rate_rel_dev = 0;
    std::vector<double> s;
    std::vector<double> l1_phys;
    std::vector<double> l1_resc;
};

/// L1 contraction diagnostics for a pair of runs sharing grid and s samples.
/// The physical-time distance must be nonincreasing; the rescaled distance is
/// fitted against the predicted rate n beta - alpha (requires beta > beta1).
/// The rate fit skips the leading fraction of the s-window (transient).
ContractionReport contraction_check(const RescaledTrajectory& a, const RescaledTrajectory& b,
                                    const DerivedConstants& constants,
                                    double fit_skip_fraction = 0.25,
                                    double monotonicity_tol = 1e-7);

struct ConvergenceReport {
    std::vector<double> s;
    std::vector<double> sup_history;
    std::vector<double> l1_history;
    double sup_floor = 0;    ///< final sup distance
    double l1_floor = 0;
    bool sup_decreasing_to_floor = false;
};

/// Summary of the stored per-snapshot distances to the target profile.
ConvergenceReport convergence_diagnostics(const RescaledTrajectory& traj);

/// Extinction time from fitting max_r u(.,t) ~ (T-t)^alpha with the known
/// alpha. Throws NotExtincting when the max does not decrease materially.
double extinction_time_estimate(const std::vector<double>& t_values,
                                const std::vector<double>& max_u, double alpha);

} // namespace fastdiff
