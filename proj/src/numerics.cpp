#include "fastdiff/numerics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>

namespace fastdiff {

std::vector<double> fd_weights(double z, std::span<const double> x, int m) {
    // B. Fornberg, "Generation of finite difference formulas on arbitrarily
    // spaced grids", Math. Comp. 51 (1988).
    const int nd = static_cast<int>(x.size()) - 1;
    std::vector<std::vector<double>> c(nd + 1, std::vector<double>(m + 1, 0.0));
    double c1 = 1.0;
    double c4 = x[0] - z;
    c[0][0] = 1.0;
    for (int i = 1; i <= nd; ++i) {
        const int mn = std::min(i, m);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = x[i] - z;
        for (int j = 0; j < i; ++j) {
            const double c3 = x[i] - x[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k)
                    c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for (int k = mn; k >= 1; --k)
                c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    std::vector<double> w(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) w[i] = c[i][m];
    return w;
}

std::vector<double> derivative_uniform(std::span<const double> f, double h) {
    const std::size_t n = f.size();
    std::vector<double> out(n, 0.0);
    if (n < 2) return out;
    const std::size_t width = std::min<std::size_t>(7, n);
    std::vector<double> nodes(width);
    for (std::size_t j = 0; j < width; ++j) nodes[j] = double(j);
    // Weight rows for each in-stencil position, nodes in units of h.
    std::vector<std::vector<double>> rows(width);
    for (std::size_t p = 0; p < width; ++p) rows[p] = fd_weights(double(p), nodes, 1);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t j0 = 0;
        if (i > width / 2) j0 = std::min(i - width / 2, n - width);
        const std::size_t p = i - j0;
        double acc = 0.0;
        for (std::size_t j = 0; j < width; ++j) acc += rows[p][j] * f[j0 + j];
        out[i] = acc / h;
    }
    return out;
}

void derivative2_uniform(std::span<const double> f, double h,
                         std::vector<double>& d1, std::vector<double>& d2) {
    const std::size_t n = f.size();
    d1.assign(n, 0.0);
    d2.assign(n, 0.0);
    if (n < 3) throw std::invalid_argument("derivative2_uniform needs >= 3 nodes");
    for (std::size_t i = 1; i + 1 < n; ++i) {
        d1[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
        d2[i] = (f[i + 1] - 2.0 * f[i] + f[i - 1]) / (h * h);
    }
    d1[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
    d1[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
    if (n >= 4) {
        d2[0] = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) / (h * h);
        d2[n - 1] = (2.0 * f[n - 1] - 5.0 * f[n - 2] + 4.0 * f[n - 3] - f[n - 4]) / (h * h);
    } else {
        d2[0] = d2[n - 1] = d2[1];
    }
}

namespace {

// Integral of the degree-5 Lagrange basis over [k, k+1] on nodes {0..5}.
// 3-point Gauss-Legendre is exact for quintics.
std::array<std::array<double, 6>, 5> cell_weights_table() {
    std::array<std::array<double, 6>, 5> table{};
    const double g = std::sqrt(3.0 / 5.0);
    const std::array<double, 3> gx = {-g, 0.0, g};
    const std::array<double, 3> gw = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
    for (int k = 0; k < 5; ++k) {
        for (int j = 0; j < 6; ++j) {
            double acc = 0.0;
            for (int q = 0; q < 3; ++q) {
                const double t = k + 0.5 + 0.5 * gx[q];
                double basis = 1.0;
                for (int l = 0; l < 6; ++l) {
                    if (l != j) basis *= (t - l) / double(j - l);
                }
                acc += 0.5 * gw[q] * basis;
            }
            table[k][j] = acc;
        }
    }
    return table;
}

} // namespace

std::vector<double> cumulative_integral_uniform(std::span<const double> f, double h) {
    static const auto table = cell_weights_table();
    const std::size_t n = f.size();
    std::vector<double> out(n, 0.0);
    if (n < 2) return out;
    if (n < 6) {
        // Short grids: trapezoid is all the data supports.
        for (std::size_t i = 1; i < n; ++i)
            out[i] = out[i - 1] + 0.5 * h * (f[i - 1] + f[i]);
        return out;
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
        std::size_t j0 = 0;
        if (i > 2) j0 = std::min(i - 2, n - 6);
        const std::size_t k = i - j0;
        double acc = 0.0;
        for (std::size_t j = 0; j < 6; ++j) acc += table[k][j] * f[j0 + j];
        out[i + 1] = out[i] + h * acc;
    }
    return out;
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    LineFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    return fit;
}

} // namespace fastdiff
