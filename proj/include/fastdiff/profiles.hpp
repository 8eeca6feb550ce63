#pragma once

#include <cstddef>
#include <vector>

#include "fastdiff/params.hpp"

namespace fastdiff {

enum class ProfileKind { regular, singular, cylinder };

std::string to_string(ProfileKind k);

/// Uniform grid in s = log r.
struct SGrid {
    double s_min = -6.0;
    double s_max = 25.0;
    std::size_t nodes = 3101;

    double ds() const { return (s_max - s_min) / double(nodes - 1); }
};

/// A positive radial profile sampled on a uniform log-radius grid.
///
/// alpha/beta are the ODE coefficients actually in force; they coincide with
/// the ParamSet's values except for inverted profiles, whose (alpha', beta')
/// fall outside the validated family.
struct RadialProfile {
    ProfileKind kind = ProfileKind::cylinder;
    ParamSet params;
    double alpha = 0;
    double beta = 0;
    std::vector<double> s;  ///< log radii, uniform, strictly increasing
    std::vector<double> v;  ///< profile values, positive
    std::vector<double> dv; ///< radial derivative v'(r)
    double xi0 = 0;         ///< singular: shooting anchor radius
    double head_mass = 0;   ///< integral of v rho^{n-1} drho over (0, first node)
    double rel_tol = 0;
    double abs_tol = 0;
    int head_order = 0;     ///< singular: truncation order of the blow-up expansion
    bool inverted = false;

    std::size_t size() const { return s.size(); }
    double r(std::size_t i) const;
    double ds() const { return s.size() > 1 ? s[1] - s[0] : 0.0; }
};

/// Blow-up expansion of the singular profile near the origin:
///   log(r^{alpha/beta} g(r)) = log L + sum_k theta_k r^{k sigma},
/// with L = lambda^{-rho1/((1-m)beta)} and sigma = rho1/beta. The
/// coefficients follow from the exact equation for z = d log(r^{a/b}g)/ds
/// order by order in r^sigma.
struct SingularHead {
    double L = 1;
    double sigma = 0;
    double alpha_over_beta = 0;
    std::vector<double> theta; ///< theta_1 .. theta_K

    /// sum_k theta_k r^{k sigma} (the log-correction above L)
    double log_correction(double r) const;
    /// z(r) = d log(r^{a/b}g)/ds = sigma * sum_k k theta_k r^{k sigma}
    double z(double r) const;
    double v(double r) const;
    double dv(double r) const;
    /// Taylor coefficients of exp(sum theta_k x^k), x = r^sigma; [0] = 1.
    std::vector<double> exp_coefficients() const;
    /// integral of v rho^{n-1} drho over (0, r); requires n beta > alpha
    double mass_below(double r, int n) const;
};

SingularHead singular_head(const ParamSet& p, int order);

/// Quadratic Taylor start of the regular profile: v = lambda(1 + c2 r^2 + c4 r^4).
struct RegularHead {
    double lambda = 1;
    double c2 = 0;
    double c4 = 0;
    double v(double r) const;
    double dv(double r) const;
    double mass_below(double r, int n) const;
};

RegularHead regular_head(const ParamSet& p);

/// Exact cylinder solution (C*/r^2)^{1/(1-m)} sampled on the grid.
RadialProfile cylinder_profile(const ParamSet& p, const SGrid& grid);

/// Shoots the smooth-at-origin profile with v(0) = lambda from a Taylor seed
/// at r0 (chosen so the neglected term is below tol) and records it on the
/// requested grid. Throws IntegrationFailure / NonPositive.
RadialProfile solve_regular(const ParamSet& p, const SGrid& grid, double tol = 1e-10);

/// Convenience overload: records on a default grid up to r_max.
RadialProfile solve_regular(const ParamSet& p, double r_max, double tol);

/// Shoots the blow-up profile from xi0 using the head expansion of the given
/// order and records it on the requested grid. xi0 <= 0 selects the default
/// 1e-6 * min(1, e^{s_min}). Order 0 reproduces the bare power-law data
/// g(xi0) = L xi0^{-a/b}, g'(xi0) = -(a/b) L xi0^{-a/b-1}.
RadialProfile solve_singular(const ParamSet& p, double xi0, const SGrid& grid,
                             double tol = 1e-10, int head_order = 8);

/// Convenience overload: records from xi0 (or the default anchor) to r_max.
RadialProfile solve_singular(const ParamSet& p, double xi0, double r_max, double tol);

/// Scaled residual of (r^{n-1}(v^m)')' + alpha r^{n-1} v + beta r^n v' = 0
/// per node, from the stored (v, dv) with high-order differentiation in s.
std::vector<double> ode_residual(const RadialProfile& prof);

/// Scaled residual of the integral identity
///   r^{n-1}(v^m)' + beta r^n v = (n beta - alpha) \int_0^r v rho^{n-1} drho
/// (for beta > beta1, and any beta for regular/cylinder kind), or of
///   r^{n-1}(v^m)' + beta r^n v = beta L  at beta = beta1 (singular kind).
/// The integral below the first node uses the solver-accumulated head mass.
std::vector<double> integral_identity_residual(const RadialProfile& prof);

/// Inversion v~(rho) = rho^{-(n-2)/m} v(1/rho); requires m = (n-2)/(n+2) to
/// 1e-14. The output satisfies the ODE with alpha' = alpha - ((n-2)/m) beta,
/// beta' = -beta, and r^{a/b} v(r) = rho^{a'/b'} v~(rho) node-wise.
RadialProfile invert(const RadialProfile& prof);

/// Exact lambda-rescaling of a stored profile (beta >= beta1 required):
/// singular g_l2(x) = k^{2/(1-m)} g_l1(k x), regular v_l2(x) = k v_l1(k^{(1-m)/2} x),
/// k = lambda2/lambda1. Grids shift by the argument factor.
RadialProfile rescale_lambda(const RadialProfile& prof, double lambda2);

/// C1 evaluation of a profile at arbitrary radius: cubic Hermite between
/// nodes, head expansions below the first node, error beyond the last.
class ProfileInterpolant {
public:
    explicit ProfileInterpolant(RadialProfile prof);

    double operator()(double r) const;
    double r_min() const;
    double r_max() const;
    ProfileKind kind() const { return prof_.kind; }
    const ParamSet& params() const { return prof_.params; }
    const RadialProfile& profile() const { return prof_; }

private:
    RadialProfile prof_;
    SingularHead shead_;
    RegularHead rhead_;
};

} // namespace fastdiff
