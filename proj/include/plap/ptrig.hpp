#pragma once

// Generalized trigonometric functions for the one-dimensional p-Laplacian.
//
// S_p solves -((y')^(p-1))' = (p-1) y^(p-1), S_p(0) = 0, S_p'(0) = 1, where
// f^(p-1) = |f|^(p-2) f. It is odd, 2*pi_p periodic, satisfies
// |S_p|^p + |S_p'|^p = 1, and S_p(pi_p - x) = S_p(x).
//
// On the quarter period [0, pi_p/2] the inverse of S_p is
//
//     x = F(s) = int_0^s (1 - t^p)^(-1/p) dt.
//
// Near the top of the quarter the integrand is singular, so the quarter is
// split at s^p = 1/2. Below the split F is summed as a power series in
// w = s^p. Above it the complementary integral, written in c = S_p', is
//
//     pi_p/2 - x = G = int_0^c t^(p-2) (1 - t^p)^(-(p-1)/p) dt
//                = v * sum_k a_k u^k,    v = c^(p-1), u = c^p,
//
// which is again a power series with ratio u <= 1/2 and no endpoint
// singularity. Both branches are inverted by Newton iteration seeded from
// a cubic Hermite table on Chebyshev-spaced nodes, built once per context.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <memory>
#include <numbers>
#include <string>
#include <vector>

#include "plap/errors.hpp"

namespace plap {

namespace detail {

inline constexpr int kSeriesTerms = 60;
inline constexpr int kTableIntervals = 2048;

struct PtrigTable {
    double p = 2.0;
    double pi_p = std::numbers::pi;
    double half = std::numbers::pi / 2;  // pi_p / 2
    double inv_p = 0.5;
    double alpha = 0.5;   // (p - 1) / p
    double p_conj = 2.0;  // p / (p - 1)
    double x_split = 0.0;  // F(2^(-1/p))
    double s_split = 0.0;
    double v_split = 0.0;

    std::array<double, kSeriesTerms> lower{};
    std::array<double, kSeriesTerms> upper{};

    // Hermite data per node: s and ds/dx for the lower branch, v and dv/dx
    // for the upper branch.
    std::vector<double> nodes;
    std::vector<double> s;
    std::vector<double> ds;
    std::vector<double> v;
    std::vector<double> dv;

    double seed_error = 0.0;

    /// Number of series terms needed for |w|^k below 2^-57.
    static int terms_for(double w) {
        if (w <= 0.0) return 1;
        int e = 0;
        std::frexp(w, &e);  // w < 2^e
        if (e >= 0) return kSeriesTerms;
        return std::min(kSeriesTerms, 1 + (57 + (-e) - 1) / (-e));
    }

    static double horner(const std::array<double, kSeriesTerms>& coef, double w) {
        const int n = terms_for(w);
        double acc = coef[n - 1];
        for (int k = n - 2; k >= 0; --k) acc = std::fma(acc, w, coef[k]);
        return acc;
    }

    double lower_integral(double s_val) const {
        return s_val * horner(lower, std::pow(s_val, p));
    }

    double upper_integral(double v_val) const {
        return v_val * horner(upper, std::pow(v_val, p_conj));
    }

    /// Solves F(s) = x for x in [0, x_split]. Returns (s, c).
    ///
    /// F is convex with F''/F' <= 2 on this branch, so once a Newton step is
    /// below 1e-8 the error after it is below 1e-16 and the loop exits,
    /// moving c to the updated s with a first-order correction.
    std::pair<double, double> solve_lower(double x, double seed) const {
        double sv = std::clamp(seed, 0.0, s_split);
        for (int it = 0; it < 60; ++it) {
            const double w = std::pow(sv, p);
            const double f = sv * horner(lower, w);
            const double c = std::pow(1.0 - w, inv_p);
            const double step = (f - x) * c;
            if (std::abs(step) <= 1e-8 * std::max(sv, 1e-300) || it == 59) {
                const double c_new = sv > 0.0 ? c * (1.0 + step * w / (sv * (1.0 - w))) : 1.0;
                return {std::clamp(sv - step, 0.0, 1.0), std::clamp(c_new, 0.0, 1.0)};
            }
            sv = std::clamp(sv - step, 0.0, s_split);
        }
        return {sv, std::pow(1.0 - std::pow(sv, p), inv_p)};
    }

    /// Solves G(v) = g for g in [0, half - x_split]. Returns (s, c).
    /// Same convexity bound and exit rule as the lower branch; c = u / v and
    /// s = (1 - u) / (1 - u)^alpha.
    std::pair<double, double> solve_upper(double g, double seed) const {
        double vv = std::clamp(seed, 0.0, v_split);
        for (int it = 0; it < 60; ++it) {
            if (vv <= 0.0 && g <= 0.0) return {1.0, 0.0};
            const double u = std::pow(vv, p_conj);
            const double gv = vv * horner(upper, u);
            const double a = std::pow(1.0 - u, alpha);
            const double step = (gv - g) * (p - 1.0) * a;
            if ((std::abs(step) <= 1e-8 * vv && vv > 0.0) || it == 59) {
                const double v_new = vv - step;
                const double u_new = u * (1.0 - p_conj * step / vv);
                const double a_new = a * (1.0 + alpha * (u - u_new) / (1.0 - u));
                return {std::clamp((1.0 - u_new) / a_new, 0.0, 1.0),
                        std::clamp(u_new / v_new, 0.0, 1.0)};
            }
            vv = std::clamp(vv - step, 0.0, v_split);
            if (vv == 0.0) vv = std::min((p - 1.0) * g, v_split);
        }
        return {1.0, 0.0};
    }

    std::size_t locate(double x) const {
        // Nodes are x_j = half/2 * (1 - cos(pi j / N)).
        const double t = std::clamp(1.0 - 2.0 * x / half, -1.0, 1.0);
        const double pos = std::acos(t) * kTableIntervals / std::numbers::pi;
        auto j = static_cast<std::ptrdiff_t>(pos);
        j = std::clamp<std::ptrdiff_t>(j, 0, kTableIntervals - 1);
        // acos rounding can put x one interval off.
        if (x < nodes[j] && j > 0) --j;
        if (x > nodes[j + 1] && j + 1 < kTableIntervals) ++j;
        return static_cast<std::size_t>(j);
    }

    static double hermite(double x0, double x1, double y0, double y1, double d0, double d1,
                          double x) {
        const double h = x1 - x0;
        const double t = (x - x0) / h;
        const double t2 = t * t;
        const double t3 = t2 * t;
        return (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * h * d0 +
               (-2 * t3 + 3 * t2) * y1 + (t3 - t2) * h * d1;
    }

    double seed_lower(double x) const {
        const std::size_t j = locate(x);
        return hermite(nodes[j], nodes[j + 1], s[j], s[j + 1], ds[j], ds[j + 1], x);
    }

    double seed_upper(double x) const {
        const std::size_t j = locate(x);
        return hermite(nodes[j], nodes[j + 1], v[j], v[j + 1], dv[j], dv[j + 1], x);
    }

    /// (S_p(x), S_p'(x)) for x in [0, half].
    std::pair<double, double> quarter(double x) const {
        if (x <= x_split) return solve_lower(x, seed_lower(x));
        return solve_upper(half - x, seed_upper(x));
    }

    void build() {
        double r = 1.0;  // (1/p)_k / k!
        double q = 1.0;  // ((p-1)/p)_k / k!
        for (int k = 0; k < kSeriesTerms; ++k) {
            lower[k] = r / (k * p + 1.0);
            upper[k] = q / (k * p + p - 1.0);
            r *= (inv_p + k) / (k + 1.0);
            q *= (alpha + k) / (k + 1.0);
        }
        s_split = std::pow(0.5, inv_p);
        v_split = std::pow(0.5, alpha);
        x_split = lower_integral(s_split);

        const std::size_t n = kTableIntervals + 1;
        nodes.resize(n);
        s.resize(n);
        ds.resize(n);
        v.resize(n);
        dv.resize(n);
        for (std::size_t j = 0; j < n; ++j) {
            const double x = 0.5 * half *
                             (1.0 - std::cos(std::numbers::pi * static_cast<double>(j) /
                                             kTableIntervals));
            nodes[j] = x;
        }
        nodes.front() = 0.0;
        nodes.back() = half;
        for (std::size_t j = 0; j < n; ++j) {
            const double x = nodes[j];
            std::pair<double, double> sc;
            if (x <= x_split) {
                sc = solve_lower(x, std::min(x, s_split));
            } else {
                const double g = half - x;
                sc = solve_upper(g, std::min((p - 1.0) * g, v_split));
            }
            s[j] = sc.first;
            ds[j] = sc.second;
            v[j] = std::pow(sc.second, p - 1.0);
            dv[j] = -(p - 1.0) * std::pow(sc.first, p - 1.0);
        }

        // Seed quality at interval midpoints, for reporting only.
        seed_error = 0.0;
        for (std::size_t j = 0; j + 1 < n; j += 7) {
            const double x = 0.5 * (nodes[j] + nodes[j + 1]);
            if (x <= x_split) {
                const double exact = solve_lower(x, std::min(x, s_split)).first;
                seed_error = std::max(seed_error, std::abs(seed_lower(x) - exact));
            } else {
                const double g = half - x;
                auto sc = solve_upper(g, std::min((p - 1.0) * g, v_split));
                const double exact = std::pow(sc.second, p - 1.0);
                seed_error = std::max(seed_error, std::abs(seed_upper(x) - exact));
            }
        }
    }
};

}  // namespace detail

/// Exponent p > 1 with the constants derived from it. Immutable and cheap to copy.
class PContext {
public:
    double p() const noexcept { return table_->p; }
    double pi_p() const noexcept { return table_->pi_p; }
    double p_conj() const noexcept { return table_->p_conj; }

    /// Largest Hermite seed error observed on the table when it was built.
    /// Newton refinement removes it, so this only signals degraded regimes.
    double table_seed_error() const noexcept { return table_->seed_error; }

    const detail::PtrigTable& table() const noexcept { return *table_; }

private:
    friend PContext make_context(double p);
    explicit PContext(std::shared_ptr<const detail::PtrigTable> t) : table_(std::move(t)) {}
    std::shared_ptr<const detail::PtrigTable> table_;
};

/// Closed-form half period 2 pi / (p sin(pi / p)).
inline double pi_p_closed_form(double p) {
    return 2.0 * std::numbers::pi / (p * std::sin(std::numbers::pi / p));
}

inline PContext make_context(double p) {
    if (!std::isfinite(p) || p <= 1.0)
        throw DomainError("exponent p must be finite and > 1, got " + std::to_string(p));
    auto t = std::make_shared<detail::PtrigTable>();
    t->p = p;
    t->pi_p = pi_p_closed_form(p);
    t->half = 0.5 * t->pi_p;
    t->inv_p = 1.0 / p;
    t->alpha = (p - 1.0) / p;
    t->p_conj = p / (p - 1.0);
    t->build();
    return PContext(std::move(t));
}

struct ReducedArgument {
    double xr = 0.0;             // in [0, pi_p/2]
    int quadrant = 0;            // 0..3
    std::int64_t period_count = 0;
};

/// Writes x = 2 pi_p * period_count + r with r in [0, 2 pi_p), then folds r
/// onto the quarter period. Quadrants are the half-open intervals
/// [0, h], (h, 2h], (2h, 3h], (3h, 4h) with h = pi_p/2, and
///   S_p(x)  = +S(xr), +S(xr), -S(xr), -S(xr)
///   S_p'(x) = +C(xr), -C(xr), -C(xr), +C(xr)
/// by quadrant. Negative x is mapped through oddness so S_p(-x) = -S_p(x)
/// holds bit for bit.
inline ReducedArgument reduce_argument(const PContext& ctx, double x) {
    if (!std::isfinite(x)) throw DomainError("argument must be finite");
    const double pi_p = ctx.pi_p();
    const double period = 2.0 * pi_p;
    const double h = 0.5 * pi_p;

    const double ax = std::abs(x);
    const double r = std::fmod(ax, period);
    auto k = static_cast<std::int64_t>(std::llround((ax - r) / period));

    ReducedArgument out;
    if (r <= h) {
        out = {r, 0, k};
    } else if (r <= pi_p) {
        out = {pi_p - r, 1, k};
    } else if (r <= 3.0 * h) {
        out = {r - pi_p, 2, k};
    } else {
        out = {period - r, 3, k};
    }
    out.xr = std::clamp(out.xr, 0.0, h);

    if (x < 0.0) {
        if (r == 0.0) {
            out.period_count = -k;
        } else {
            // -(2 pi_p k + r) = 2 pi_p (-k-1) + (2 pi_p - r); quadrants mirror.
            out.quadrant = 3 - out.quadrant;
            out.period_count = -k - 1;
        }
    }
    return out;
}

struct SinCosP {
    double s;  // S_p
    double c;  // S_p'
};

/// S_p and S_p' at the same argument from a single inversion.
inline SinCosP sincos_p(const PContext& ctx, double x) {
    const ReducedArgument red = reduce_argument(ctx, x);
    auto [s, c] = ctx.table().quarter(red.xr);
    switch (red.quadrant) {
        case 0: return {s, c};
        case 1: return {s, -c};
        case 2: return {-s, -c};
        default: return {-s, c};
    }
}

inline double sp(const PContext& ctx, double x) { return sincos_p(ctx, x).s; }

inline double sp_prime(const PContext& ctx, double x) { return sincos_p(ctx, x).c; }

inline constexpr double kDefaultPoleGuard = 1e-8;

/// T_p = S_p / S_p'. Poles sit at (k + 1/2) pi_p.
inline double tp(const PContext& ctx, double x, double guard = kDefaultPoleGuard) {
    if (!std::isfinite(x)) throw DomainError("argument must be finite");
    const double pi_p = ctx.pi_p();
    const double k = std::round(x / pi_p - 0.5);
    const double pole = (k + 0.5) * pi_p;
    if (std::abs(x - pole) < guard)
        throw PoleError("T_p pole proximity at x = " + std::to_string(x), pole);
    const SinCosP sc = sincos_p(ctx, x);
    return sc.s / sc.c;
}

/// Signed power f^(e) = |f|^e sgn(f).
inline double signed_pow(double f, double e) {
    return std::copysign(std::pow(std::abs(f), e), f);
}

}  // namespace plap
