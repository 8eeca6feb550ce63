#pragma once

#include <utility>
#include <vector>

#include "fastdiff/params.hpp"
#include "fastdiff/profiles.hpp"

namespace fastdiff {

/// A profile transformed to the log variables of the tail analysis:
///   q = (r^{2/(1-m)} v)^m / Cstar^{m/(1-m)},  w = q - 1,
///   F = (r^2/Cstar)^{1/(1-m)} v - 1.
/// F is the un-powered relative deviation from the cylinder; by construction
/// (1+F)^m = 1+w holds exactly at every node.
struct LogProfile {
    ProfileKind kind = ProfileKind::cylinder;
    ParamSet params;
    std::vector<double> s;
    std::vector<double> q;
    std::vector<double> w;
    std::vector<double> F;

    std::size_t size() const { return s.size(); }
    double ds() const { return s.size() > 1 ? s[1] - s[0] : 0.0; }
};

struct FitWindow {
    double s_lo = 0;
    double s_hi = 0;
};

/// Tail parameters extracted from a LogProfile.
///
/// gamma_hat comes from the least-squares slope of log|F|; B_hat from the
/// mean of |F| e^{gamma1 s} using the exact gamma1 (a joint nonlinear fit of
/// (B, gamma) is ill-conditioned when gamma1 is small). B_w is the same
/// amplitude extracted from w instead of F, reported for diagnostics only —
/// it differs from B_hat by a factor ~m at first order.
struct AsymptoticFit {
    ProfileKind kind = ProfileKind::regular;
    double lambda = 1;
    double m = 0;
    double Cstar_hat = 0;
    double gamma_hat = 0;
    double B_hat = 0;
    double B_w = 0;
    int sign = 0;       ///< -1: regular (1 - B r^-g); +1: singular (1 + B r^-g)
    FitWindow window;
    double residual = 0; ///< max |F - model| / max |F| over the window
};

LogProfile to_log_profile(const RadialProfile& prof);

/// Scaled residual of the full nonlinear w-equation
///   w_ss + (K1 + (beta Cstar / m)(1+w)^{1/m-1}) w_s
///        + K2 ((1+w)^{1/m} - 1 - w) = 0
/// evaluated with second-order differences in s; converged profiles land at
/// the O(ds^2) discretization level.
std::vector<double> w_equation_residual(const LogProfile& logp);

/// Default fit windows: the last 40% of the resolved s-range split into two
/// disjoint halves (the right one is the primary window).
std::pair<FitWindow, FitWindow> default_fit_windows(const LogProfile& logp);

/// Fits (Cstar, gamma, B) over the window. Throws WindowTooShort (< 10
/// nodes) or NoDecay (|F| not decreasing across the window).
AsymptoticFit fit_tail(const LogProfile& logp, const DerivedConstants& constants,
                       const FitWindow& window);

/// Relative deviation of B_hat ratios from the lambda-rescaling law.
/// Regular kind: B at lambda2 = (l1/l2)^{(1-m) gamma1 / 2} * B at lambda1.
/// Singular kind: exponent gamma1 instead (substituting the singular
/// rescaling into the tail normal form).
double check_B_scaling(const AsymptoticFit& fit1, const AsymptoticFit& fit2, double lambda1,
                       double lambda2, const DerivedConstants& constants);

/// Deviation of the blow-up prefactor from lambda^{-rho1/((1-m)beta)} at the
/// smallest resolved radii, with the head expansion of the given order
/// stripped off (the raw value at finite r carries the genuine O(r^{rho1/beta})
/// correction, so the limit is only reachable after stripping).
double blowup_limit_check(const LogProfile& logp, const ParamSet& params, int head_order = 8);

/// Least-squares slope of log(1+w) vs s over the leading nodes; tends to
/// -m rho1/((1-m) beta) for the singular kind as s -> -infinity.
double head_exponent_slope(const LogProfile& logp, std::size_t max_nodes = 20);

} // namespace fastdiff
