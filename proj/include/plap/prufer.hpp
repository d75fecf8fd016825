#pragma once

// Generalized Prüfer system for -((y')^(p-1))' = (p-1)(lambda - q) y^(p-1).
//
// With rho = lambda^(1/p), y = R S_p(phi), y' = rho R S_p'(phi):
//
//     phi'    = rho - q rho^(1-p) |S_p(phi)|^p
//     (ln R)' = q rho^(1-p) S_p(phi)^(p-1) S_p'(phi)
//     u'      = a u + b,   u = d phi / d rho,
//         a = -p q rho^(1-p) S_p(phi)^(p-1) S_p'(phi)
//         b = 1 + (p-1) q rho^(-p) |S_p(phi)|^p
//
// with phi(0) = 0, R(0) = 1, u(0) = 0. The phase is accumulated without
// reduction, so phi(ell) = n pi_p identifies the n-th Dirichlet eigenvalue.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "plap/errors.hpp"
#include "plap/ode.hpp"
#include "plap/potential.hpp"
#include "plap/ptrig.hpp"

namespace plap {

struct PruferSample {
    double x;
    double phi;
    double log_r;
    double dphi;
    double dlog_r;
};

struct PruferTrajectory {
    PContext ctx = make_context(2.0);
    double rho = 0.0;
    double ell = 0.0;
    double phi_end = 0.0;
    double theta_end = 0.0;
    double log_r_end = 0.0;
    bool has_amplitude = false;
    std::optional<double> u_end;
    std::optional<double> theta_dot_end;  // (rho u - phi) / rho^2 at ell
    std::vector<PruferSample> dense;
    IntegrationStats stats;
    double min_phi_slope = std::numeric_limits<double>::infinity();
    bool conditioning_warning = false;
};

inline constexpr double kLargeRho = 1e8;

namespace detail {

inline void check_prufer_args(const Potential& q, double rho, double ell) {
    if (!std::isfinite(rho) || rho <= 0.0)
        throw DomainError("Prüfer substitution needs rho > 0, got " + std::to_string(rho));
    if (!std::isfinite(ell) || ell <= 0.0 || ell > 1.0)
        throw DomainError("interval end must lie in (0, 1], got " + std::to_string(ell));
    if (ell > q.domain_end() * (1.0 + 1e-14))
        throw DomainError("interval end " + std::to_string(ell) +
                          " exceeds the potential's domain " + std::to_string(q.domain_end()));
}

/// Integrates the first N components of (phi, log R, u).
template <std::size_t N>
PruferTrajectory integrate_prufer(const PContext& ctx, const Potential& q, double rho, double ell,
                                  const ToleranceConfig& tol, bool keep_dense) {
    static_assert(N >= 1 && N <= 3);
    check_prufer_args(q, rho, ell);
    const double p = ctx.p();
    const double k = std::pow(rho, 1.0 - p);  // rho^(1-p)
    const double k2 = k / rho;                // rho^(-p)

    auto rhs = [&](double x, const State<N>& y) {
        const double qx = q(x);
        const SinCosP sc = sincos_p(ctx, y[0]);
        const double as = std::abs(sc.s);
        const double sp1 = std::pow(as, p - 1.0);  // |S|^(p-1)
        const double abs_sp = sp1 * as;            // |S|^p
        State<N> d{};
        d[0] = rho - qx * k * abs_sp;
        if constexpr (N >= 2) d[1] = qx * k * std::copysign(sp1, sc.s) * sc.c;
        if constexpr (N >= 3) {
            const double a = -p * qx * k * std::copysign(sp1, sc.s) * sc.c;
            const double b = 1.0 + (p - 1.0) * qx * k2 * abs_sp;
            d[2] = a * y[2] + b;
        }
        return d;
    };

    PruferTrajectory t;
    t.ctx = ctx;
    t.rho = rho;
    t.ell = ell;
    t.has_amplitude = N >= 2;
    t.conditioning_warning = rho > kLargeRho;

    const std::vector<double> breaks = q.breakpoints();
    State<N> y{};
    auto observe = [&](double x, const State<N>& s, const State<N>& d) {
        t.min_phi_slope = std::min(t.min_phi_slope, d[0]);
        if (keep_dense) {
            PruferSample ps{x, s[0], 0.0, d[0], 0.0};
            if constexpr (N >= 2) {
                ps.log_r = s[1];
                ps.dlog_r = d[1];
            }
            t.dense.push_back(ps);
        }
    };
    y = integrate_dopri<N>(rhs, y, 0.0, ell, breaks, tol, t.stats, observe);

    t.phi_end = y[0];
    t.theta_end = t.phi_end / rho;
    if constexpr (N >= 2) t.log_r_end = y[1];
    if constexpr (N >= 3) {
        t.u_end = y[2];
        t.theta_dot_end = (rho * y[2] - y[0]) / (rho * rho);
    }
    return t;
}

}  // namespace detail

/// Phase only. Dense output keeps (x, phi, phi') at accepted steps.
inline PruferTrajectory integrate_phase(const PContext& ctx, const Potential& q, double rho,
                                        double ell, const ToleranceConfig& tol = {},
                                        bool keep_dense = true) {
    return detail::integrate_prufer<1>(ctx, q, rho, ell, tol, keep_dense);
}

/// Phase and log-amplitude, R(0) = 1.
inline PruferTrajectory integrate_amplitude(const PContext& ctx, const Potential& q, double rho,
                                            double ell, const ToleranceConfig& tol = {}) {
    return detail::integrate_prufer<2>(ctx, q, rho, ell, tol, true);
}

/// Phase, log-amplitude and the rho-sensitivity u = d phi / d rho.
inline PruferTrajectory integrate_sensitivity(const PContext& ctx, const Potential& q, double rho,
                                              double ell, const ToleranceConfig& tol = {}) {
    return detail::integrate_prufer<3>(ctx, q, rho, ell, tol, true);
}

struct EigenfunctionSample {
    double x;
    double y;
    double dy;
};

/// y = R S_p(phi), y' = rho R S_p'(phi) on a uniform grid of `samples`
/// points over [0, ell], Hermite-interpolating phi and log R between
/// accepted steps.
inline std::vector<EigenfunctionSample> reconstruct_eigenfunction(const PruferTrajectory& traj,
                                                                  int samples) {
    if (traj.dense.size() < 2) throw StateError("trajectory has no dense output");
    if (!traj.has_amplitude) throw StateError("trajectory has no amplitude data");
    if (samples < 2) throw DomainError("need at least 2 samples");

    auto hermite = [](double h, double t, double y0, double y1, double d0, double d1) {
        const double t2 = t * t, t3 = t2 * t;
        return (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * h * d0 + (-2 * t3 + 3 * t2) * y1 +
               (t3 - t2) * h * d1;
    };

    std::vector<EigenfunctionSample> out;
    out.reserve(static_cast<std::size_t>(samples));
    std::size_t j = 0;
    for (int i = 0; i < samples; ++i) {
        const double x = i == samples - 1 ? traj.ell : traj.ell * i / (samples - 1);
        while (j + 2 < traj.dense.size() && traj.dense[j + 1].x < x) ++j;
        const PruferSample& a = traj.dense[j];
        const PruferSample& b = traj.dense[j + 1];
        const double h = b.x - a.x;
        const double t = h > 0.0 ? std::clamp((x - a.x) / h, 0.0, 1.0) : 0.0;
        const double phi = hermite(h, t, a.phi, b.phi, a.dphi, b.dphi);
        const double log_r = hermite(h, t, a.log_r, b.log_r, a.dlog_r, b.dlog_r);
        const double r = std::exp(log_r);
        const SinCosP sc = sincos_p(traj.ctx, phi);
        out.push_back({x, r * sc.s, traj.rho * r * sc.c});
    }
    out.front().y = 0.0;
    return out;
}

/// Sign changes of y strictly inside (0, ell), ignoring the endpoint samples.
inline int count_interior_sign_changes(const std::vector<EigenfunctionSample>& f) {
    int count = 0;
    int last = 0;
    for (std::size_t i = 1; i + 1 < f.size(); ++i) {
        const int s = f[i].y > 0.0 ? 1 : (f[i].y < 0.0 ? -1 : 0);
        if (s == 0) continue;
        if (last != 0 && s != last) ++count;
        last = s;
    }
    return count;
}

}  // namespace plap
