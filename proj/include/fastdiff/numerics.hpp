#pragma once

#include <span>
#include <vector>

namespace fastdiff {

/// Finite-difference weights for the m-th derivative at z from arbitrary
/// nodes x (Fornberg's recursion).
std::vector<double> fd_weights(double z, std::span<const double> x, int m);

/// 6th-order first derivative on a uniform grid (one-sided stencils at the
/// edges). Falls back to the widest centered stencil available when the grid
/// has fewer than 7 nodes.
std::vector<double> derivative_uniform(std::span<const double> f, double h);

/// 2nd-order first and second derivatives on a uniform grid (central where
/// possible, one-sided at the edges). Used where a residual is specified at
/// plain second-difference accuracy.
void derivative2_uniform(std::span<const double> f, double h,
                         std::vector<double>& d1, std::vector<double>& d2);

/// Cumulative integral on a uniform grid: out[i] = integral of f from x0 to
/// x_i, 6th-order accurate (per-cell integration of the degree-5 interpolant
/// through the six nearest nodes).
std::vector<double> cumulative_integral_uniform(std::span<const double> f, double h);

struct LineFit {
    double slope = 0;
    double intercept = 0;
};

/// Ordinary least squares line through (x, y).
LineFit fit_line(std::span<const double> x, std::span<const double> y);

} // namespace fastdiff
