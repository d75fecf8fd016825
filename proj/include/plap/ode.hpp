#pragma once

// Adaptive Dormand–Prince 5(4) integrator with PI step control.
//
// The right-hand side may be only C^0 at a known set of abscissae (knots of a
// piecewise-linear potential); those are passed as breakpoints and become
// mandatory step boundaries, with the FSAL stage discarded across them.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <span>
#include <string>
#include <utility>

#include "plap/errors.hpp"

namespace plap {

struct ToleranceConfig {
    double rel_tol = 1e-11;
    double abs_tol = 1e-12;
    std::int64_t max_steps = 2'000'000;
};

struct IntegrationStats {
    std::int64_t accepted = 0;
    std::int64_t rejected = 0;
    std::int64_t rhs_evals = 0;
    double h_min = std::numeric_limits<double>::infinity();
    double h_max = 0.0;

    IntegrationStats& operator+=(const IntegrationStats& o) {
        accepted += o.accepted;
        rejected += o.rejected;
        rhs_evals += o.rhs_evals;
        h_min = std::min(h_min, o.h_min);
        h_max = std::max(h_max, o.h_max);
        return *this;
    }
};

template <std::size_t N>
using State = std::array<double, N>;

namespace detail {

// Dormand & Prince (1980) tableau.
struct Dopri5 {
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
};

template <std::size_t N>
double error_norm(const State<N>& err, const State<N>& y0, const State<N>& y1,
                  const ToleranceConfig& tol) {
    double m = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        const double sc = tol.abs_tol + tol.rel_tol * std::max(std::abs(y0[i]), std::abs(y1[i]));
        m = std::max(m, std::abs(err[i]) / sc);
    }
    return m;
}

template <std::size_t N>
State<N> axpy(const State<N>& y, double h, std::initializer_list<std::pair<double, const State<N>*>> terms) {
    State<N> out = y;
    for (const auto& [a, k] : terms) {
        if (a == 0.0) continue;
        for (std::size_t i = 0; i < N; ++i) out[i] += h * a * (*k)[i];
    }
    return out;
}

}  // namespace detail

/// Integrates y' = rhs(x, y) from a to b. `breaks` must be sorted; entries
/// outside (a, b) are ignored. `on_accept(x, y, dy)` is called for the
/// initial point and after every accepted step. `h_cap` bounds the step.
template <std::size_t N, class Rhs, class Observer>
State<N> integrate_dopri(Rhs&& rhs, State<N> y, double a, double b,
                         std::span<const double> breaks, const ToleranceConfig& tol,
                         IntegrationStats& stats, Observer&& on_accept,
                         double h_cap = std::numeric_limits<double>::infinity()) {
    using T = detail::Dopri5;
    if (!(b > a)) {
        State<N> f = rhs(a, y);
        ++stats.rhs_evals;
        on_accept(a, y, f);
        return y;
    }

    double x = a;
    State<N> f = rhs(x, y);
    ++stats.rhs_evals;
    on_accept(x, y, f);

    // Initial step from the usual two-evaluation heuristic.
    double h;
    {
        double d0 = 0.0, d1 = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double sc = tol.abs_tol + tol.rel_tol * std::abs(y[i]);
            d0 = std::max(d0, std::abs(y[i]) / sc);
            d1 = std::max(d1, std::abs(f[i]) / sc);
        }
        double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
        h0 = std::min(h0, b - a);
        State<N> y1 = y;
        for (std::size_t i = 0; i < N; ++i) y1[i] += h0 * f[i];
        const State<N> f1 = rhs(x + h0, y1);
        ++stats.rhs_evals;
        double d2 = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double sc = tol.abs_tol + tol.rel_tol * std::abs(y[i]);
            d2 = std::max(d2, std::abs(f1[i] - f[i]) / sc / h0);
        }
        const double h1 = std::max(d1, d2) <= 1e-15 ? std::max(1e-6, h0 * 1e-3)
                                                    : std::pow(0.01 / std::max(d1, d2), 0.2);
        h = std::min({100.0 * h0, h1, b - a, h_cap});
    }

    double err_prev = 1e-4;
    auto seg_it = std::upper_bound(breaks.begin(), breaks.end(), a);
    std::int64_t steps = 0;

    while (x < b) {
        while (seg_it != breaks.end() && *seg_it <= x) ++seg_it;
        const double seg_end = (seg_it != breaks.end() && *seg_it < b) ? *seg_it : b;

        bool hit_end = false;
        double hs = std::min(h, h_cap);
        if (x + hs >= seg_end || seg_end - (x + hs) < 1e-12 * std::abs(seg_end)) {
            hs = seg_end - x;
            hit_end = true;
        }
        if (hs <= 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(x)))
            throw IntegrationError("step size underflow at x = " + std::to_string(x), x);
        if (++steps > tol.max_steps)
            throw IntegrationError("step budget exhausted at x = " + std::to_string(x), x);

        const State<N>& k1 = f;
        const State<N> k2 = rhs(x + T::c2 * hs, detail::axpy<N>(y, hs, {{T::a21, &k1}}));
        const State<N> k3 =
            rhs(x + T::c3 * hs, detail::axpy<N>(y, hs, {{T::a31, &k1}, {T::a32, &k2}}));
        const State<N> k4 = rhs(
            x + T::c4 * hs, detail::axpy<N>(y, hs, {{T::a41, &k1}, {T::a42, &k2}, {T::a43, &k3}}));
        const State<N> k5 =
            rhs(x + T::c5 * hs, detail::axpy<N>(y, hs, {{T::a51, &k1}, {T::a52, &k2},
                                                         {T::a53, &k3}, {T::a54, &k4}}));
        const State<N> k6 =
            rhs(x + hs, detail::axpy<N>(y, hs, {{T::a61, &k1}, {T::a62, &k2}, {T::a63, &k3},
                                                {T::a64, &k4}, {T::a65, &k5}}));
        const State<N> y_new = detail::axpy<N>(
            y, hs, {{T::b1, &k1}, {T::b3, &k3}, {T::b4, &k4}, {T::b5, &k5}, {T::b6, &k6}});
        const double x_new = hit_end ? seg_end : x + hs;
        const State<N> k7 = rhs(x_new, y_new);
        stats.rhs_evals += 6;

        State<N> err{};
        for (std::size_t i = 0; i < N; ++i) {
            err[i] = hs * (T::e1 * k1[i] + T::e3 * k3[i] + T::e4 * k4[i] + T::e5 * k5[i] +
                           T::e6 * k6[i] + T::e7 * k7[i]);
        }
        const double en = detail::error_norm<N>(err, y, y_new, tol);

        if (en <= 1.0) {
            ++stats.accepted;
            stats.h_min = std::min(stats.h_min, hs);
            stats.h_max = std::max(stats.h_max, hs);
            x = x_new;
            y = y_new;
            // A breakpoint ends the smooth piece: restart the FSAL stage there.
            if (hit_end && seg_end < b) {
                f = rhs(x, y);
                ++stats.rhs_evals;
            } else {
                f = k7;
            }
            on_accept(x, y, f);

            const double e = std::max(en, 1e-10);
            double fac = 0.9 * std::pow(e, -0.7 / 5.0) * std::pow(err_prev, 0.4 / 5.0);
            fac = std::clamp(fac, 0.2, 5.0);
            err_prev = e;
            // Do not let a short step forced by a breakpoint shrink the next one.
            h = hit_end ? std::max(h, hs * fac) : hs * fac;
        } else {
            ++stats.rejected;
            double fac = std::isfinite(en) ? 0.9 * std::pow(en, -0.2) : 0.1;
            h = hs * std::clamp(fac, 0.1, 0.9);
        }
    }
    return y;
}

}  // namespace plap
