#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <sstream>

#include "fastdiff/errors.hpp"

namespace fastdiff {

template <std::size_t N>
struct OdeOptions {
    double rel_tol = 1e-10;
    /// Per-component absolute floor; keep essentially zero for states that
    /// must stay relatively accurate while decaying through many decades.
    std::array<double, N> abs_tol = make_filled(1e-14);
    double initial_step = 1e-4;
    long max_steps = 50'000'000;

    static std::array<double, N> make_filled(double value) {
        std::array<double, N> a{};
        a.fill(value);
        return a;
    }
};

/// Adaptive Dormand-Prince 5(4) integrator for small fixed-size systems.
///
/// Integrates y' = f(s, y) from s_start through an ascending list of output
/// nodes, clamping steps so every node is hit exactly (no dense-output
/// interpolation error enters the stored values). on_node is invoked once per
/// node; after every accepted step an optional validator may throw to abort.
template <std::size_t N>
class DormandPrince {
public:
    using State = std::array<double, N>;
    using Rhs = std::function<void(double, const State&, State&)>;
    using NodeFn = std::function<void(std::size_t, double, const State&)>;
    using Validator = std::function<void(double, const State&)>;

    DormandPrince(Rhs rhs, OdeOptions<N> opts) : rhs_(std::move(rhs)), opts_(opts) {}

    void integrate(double s_start, State y, std::span<const double> nodes,
                   const NodeFn& on_node, const Validator& validate = {}) const {
        double s = s_start;
        std::size_t next = 0;
        while (next < nodes.size() && nodes[next] <= s_start) {
            if (nodes[next] == s_start) on_node(next, s_start, y);
            ++next;
        }
        if (next >= nodes.size()) return;

        State k1;
        rhs_(s, y, k1);
        double h = opts_.initial_step;
        long steps = 0;
        while (next < nodes.size()) {
            const double s_target = nodes[next];
            bool clamped = false;
            if (s + h >= s_target) {
                h = s_target - s;
                clamped = true;
            }
            if (++steps > opts_.max_steps) {
                throw IntegrationFailure("step budget exhausted at s = " + std::to_string(s));
            }
            State y_new, k_last, y_err;
            step(s, y, k1, h, y_new, k_last, y_err);
            const double err = error_norm(y, y_new, y_err);
            if (err <= 1.0) {
                s = clamped ? s_target : s + h;
                y = y_new;
                k1 = k_last; // FSAL
                if (validate) validate(s, y);
                if (clamped) {
                    on_node(next, s, y);
                    ++next;
                }
            }
            const double factor = err > 0.0 ? 0.9 * std::pow(err, -0.2) : 5.0;
            h *= std::min(5.0, std::max(0.2, factor));
            const double h_floor = 1e-14 * std::max(1.0, std::abs(s));
            if (h < h_floor) {
                std::ostringstream msg;
                msg << "step size underflow (h = " << h << ") at s = " << s;
                throw IntegrationFailure(msg.str());
            }
        }
    }

private:
    void step(double s, const State& y, const State& k1, double h,
              State& y_new, State& k_last, State& y_err) const {
        // Dormand-Prince RK5(4) tableau, FSAL.
        static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
        static constexpr double a21 = 1.0 / 5;
        static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
        static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
        static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                                a53 = 64448.0 / 6561, a54 = -212.0 / 729;
        static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                                a64 = 49.0 / 176, a65 = -5103.0 / 18656;
        static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                                b5 = -2187.0 / 6784, b6 = 11.0 / 84;
        static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                                e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

        State k2, k3, k4, k5, k6, tmp;
        for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * a21 * k1[i];
        rhs_(s + c2 * h, tmp, k2);
        for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
        rhs_(s + c3 * h, tmp, k3);
        for (std::size_t i = 0; i < N; ++i)
            tmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        rhs_(s + c4 * h, tmp, k4);
        for (std::size_t i = 0; i < N; ++i)
            tmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        rhs_(s + c5 * h, tmp, k5);
        for (std::size_t i = 0; i < N; ++i)
            tmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] +
                                 a65 * k5[i]);
        rhs_(s + h, tmp, k6);
        for (std::size_t i = 0; i < N; ++i)
            y_new[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] +
                                   b6 * k6[i]);
        rhs_(s + h, y_new, k_last);
        for (std::size_t i = 0; i < N; ++i)
            y_err[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                            e7 * k_last[i]);
    }

    double error_norm(const State& y, const State& y_new, const State& y_err) const {
        double acc = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double scale =
                opts_.abs_tol[i] + opts_.rel_tol * std::max(std::abs(y[i]), std::abs(y_new[i]));
            const double q = y_err[i] / scale;
            acc += q * q;
        }
        return std::sqrt(acc / N);
    }

    Rhs rhs_;
    OdeOptions<N> opts_;
};

} // namespace fastdiff
