#pragma once

// Dirichlet eigenvalues on [0, ell] by shooting on the Prüfer phase, with an
// independent direct-shooting route on the original equation.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "plap/errors.hpp"
#include "plap/ode.hpp"
#include "plap/potential.hpp"
#include "plap/prufer.hpp"
#include "plap/ptrig.hpp"

namespace plap {

struct SolverConfig {
    double phase_tol = 1e-9;
    int max_bisections = 200;
    bool use_secant = true;
    ToleranceConfig tol{};
    /// Tolerances for the direct-shooting route, looser than the Prüfer path
    /// because y' = |v|^(1/(p-1)) is not Lipschitz where v = 0.
    ToleranceConfig oracle_tol{1e-11, 1e-14, 4'000'000};
};

struct Eigenpair {
    int n = 0;
    double lambda = 0.0;
    double rho = 0.0;
    double phi_end = 0.0;
    double residual = 0.0;
    int zero_count = 0;
    double bracket_width = 0.0;  // width of the final lambda interval
    int iterations = 0;
};

struct Spectrum {
    double ell = 1.0;
    std::vector<Eigenpair> pairs;
    PContext ctx = make_context(2.0);
    Potential potential;
    SolverConfig config;
};

struct LambdaBracket {
    double lo = 0.0;
    double hi = 0.0;
    /// lo was raised to a positive floor; the Prüfer route only sees lambda > 0.
    bool truncated_at_zero = false;
};

/// Extremes of q over [0, ell] from the classification sample set, which is
/// exact for knot-backed potentials.
inline std::pair<double, double> potential_range(const Potential& q, double ell) {
    const Potential r = q.restricted(std::min(ell, q.domain_end()));
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (double x : classification_abscissae(r, kDefaultClassifyGrid)) {
        const double v = q(x);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (q.is_function_backed()) {
        // Grid extremes of a general function can miss the true ones slightly.
        const double pad = 1e-6 * (1.0 + hi - lo);
        lo -= pad;
        hi += pad;
    }
    return {lo, hi};
}

inline double free_eigenvalue(const PContext& ctx, int n, double ell) {
    return std::pow(n * ctx.pi_p() / ell, ctx.p());
}

/// Comparison bracket [(n pi_p/ell)^p + min q, (n pi_p/ell)^p + max q].
inline LambdaBracket bracket_eigenvalue(const PContext& ctx, const Potential& q, int n, double ell,
                                        double floor_scale = 1e-12) {
    if (n < 1) throw DomainError("eigenvalue index must be >= 1");
    const auto [qmin, qmax] = potential_range(q, ell);
    const double base = free_eigenvalue(ctx, n, ell);
    LambdaBracket b{base + qmin, base + qmax, false};
    if (b.lo <= 0.0) {
        b.lo = floor_scale * (1.0 + std::abs(qmin));
        b.truncated_at_zero = true;
    }
    return b;
}

inline int phase_zero_count(const PContext& ctx, double phi_end) {
    return std::max(0, static_cast<int>(std::ceil(phi_end / ctx.pi_p() - 1e-6)) - 1);
}

inline Eigenpair find_eigenvalue(const PContext& ctx, const Potential& q, int n, double ell,
                                 const SolverConfig& cfg = {}) {
    const double p = ctx.p();
    const double target = n * ctx.pi_p();
    LambdaBracket br = bracket_eigenvalue(ctx, q, n, ell);
    if (br.hi <= 0.0)
        throw UnsupportedRegimeError(
            "eigenvalue " + std::to_string(n) + " is not positive; use sign_of_lambda1", n);

    int evals = 0;
    auto phase = [&](double rho) {
        ++evals;
        return integrate_phase(ctx, q, rho, ell, cfg.tol, false).phi_end - target;
    };

    // Pad the bracket so integration error cannot fake a missing sign change.
    const double pad = 1e-9 * std::max(1.0, std::abs(br.hi));
    double lam_lo = br.truncated_at_zero ? br.lo : std::max(br.lo - pad, 0.5 * br.lo);
    double lam_hi = br.hi + pad;
    double a = std::pow(lam_lo, 1.0 / p);
    double b = std::pow(lam_hi, 1.0 / p);
    double fa = phase(a);
    double fb = phase(b);
    for (int grow = 0; fa > 0.0 && grow < 40; ++grow) {
        if (br.truncated_at_zero)
            throw UnsupportedRegimeError("eigenvalue " + std::to_string(n) +
                                             " lies below the positive floor; use sign_of_lambda1",
                                         n);
        lam_lo = lam_lo > 0.0 ? lam_lo - (lam_hi - lam_lo + pad) : 0.0;
        if (lam_lo <= 0.0) {
            lam_lo = br.lo * 1e-3 + 1e-12;
            br.truncated_at_zero = true;
        }
        a = std::pow(lam_lo, 1.0 / p);
        fa = phase(a);
    }
    for (int grow = 0; fb < 0.0 && grow < 40; ++grow) {
        lam_hi += (lam_hi - lam_lo) + pad;
        b = std::pow(lam_hi, 1.0 / p);
        fb = phase(b);
    }
    if (fa > 0.0 || fb < 0.0)
        throw SearchError("no phase sign change in bracket for eigenvalue " + std::to_string(n),
                          n, fa, fb);

    // Brent's method on rho; a and b always bracket the root.
    double c = a, fc = fa, d = b - a, e = d;
    double best = b, fbest = fb;
    int it = 0;
    if (std::abs(fa) < std::abs(fb)) {
        best = a;
        fbest = fa;
    }
    while (std::abs(fbest) > cfg.phase_tol && it < cfg.max_bisections) {
        ++it;
        if ((fb > 0.0) == (fc > 0.0)) {
            c = a;
            fc = fa;
            d = e = b - a;
        }
        if (std::abs(fc) < std::abs(fb)) {
            a = b; b = c; c = a;
            fa = fb; fb = fc; fc = fa;
        }
        const double tol1 = 4.0 * std::numeric_limits<double>::epsilon() * std::abs(b);
        const double xm = 0.5 * (c - b);
        if (std::abs(xm) <= tol1 || fb == 0.0) break;
        if (cfg.use_secant && std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
            double s = fb / fa, pp, qq;
            if (a == c) {
                pp = 2.0 * xm * s;
                qq = 1.0 - s;
            } else {
                const double q1 = fa / fc, r = fb / fc;
                pp = s * (2.0 * xm * q1 * (q1 - r) - (b - a) * (r - 1.0));
                qq = (q1 - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (pp > 0.0) qq = -qq;
            pp = std::abs(pp);
            if (2.0 * pp < std::min(3.0 * xm * qq - std::abs(tol1 * qq), std::abs(e * qq))) {
                e = d;
                d = pp / qq;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += std::abs(d) > tol1 ? d : std::copysign(tol1, xm);
        fb = phase(b);
        if (std::abs(fb) < std::abs(fbest)) {
            best = b;
            fbest = fb;
        }
    }
    if (std::abs(fbest) > cfg.phase_tol && std::abs(c - b) > 8.0 * std::numeric_limits<double>::epsilon() * std::abs(b))
        throw SearchError("eigenvalue " + std::to_string(n) + " did not converge", n, fa, fb);

    // Honesty interval: a sign change around the returned rho.
    double lo_rho = std::min(b, c), hi_rho = std::max(b, c);
    if (fbest != 0.0) {
        const double slope = std::abs((fb - fc) / (b - c));
        const double step = std::max(2.0 * std::abs(fbest) / std::max(slope, 1e-300),
                                     8.0 * std::numeric_limits<double>::epsilon() * best);
        const double other = best - std::copysign(step, fbest);
        const double fo = phase(other);
        if ((fo > 0.0) != (fbest > 0.0)) {
            lo_rho = std::min(best, other);
            hi_rho = std::max(best, other);
        }
    }

    Eigenpair ep;
    ep.n = n;
    ep.rho = best;
    ep.lambda = std::pow(best, p);
    ep.phi_end = fbest + target;
    ep.residual = std::abs(fbest);
    ep.zero_count = phase_zero_count(ctx, ep.phi_end);
    ep.bracket_width = std::pow(hi_rho, p) - std::pow(lo_rho, p);
    ep.iterations = evals;
    return ep;
}

inline Spectrum compute_spectrum(const PContext& ctx, const Potential& q, int n_max, double ell,
                                 const SolverConfig& cfg = {}) {
    if (n_max < 1) throw DomainError("n_max must be >= 1");
    Spectrum s;
    s.ell = ell;
    s.ctx = ctx;
    s.potential = q;
    s.config = cfg;
    for (int n = 1; n <= n_max; ++n) {
        Eigenpair ep = find_eigenvalue(ctx, q, n, ell, cfg);
        if (ep.zero_count != n - 1)
            throw SearchError("eigenvalue " + std::to_string(n) + " has " +
                                  std::to_string(ep.zero_count) + " interior zeros",
                              n, ep.phi_end, ep.phi_end);
        if (!s.pairs.empty() && !(ep.lambda > s.pairs.back().lambda))
            throw SearchError("eigenvalue " + std::to_string(n) + " does not increase", n,
                              ep.phi_end, ep.phi_end);
        s.pairs.push_back(ep);
    }
    return s;
}

struct ShootResult {
    double y_end = 0.0;
    double v_end = 0.0;  // (y')^(p-1) at ell
    int zero_count = 0;  // sign changes of y on (0, ell], endpoint included
    double y_max = 0.0;
    IntegrationStats stats;
    std::int64_t degenerate_steps = 0;  // accepted steps with |v| or |y| below 1e-12
    bool quality_warning = false;
};

/// Integrates (y, v = (y')^(p-1)) with y' = v^(1/(p-1)), v' = -(p-1)(lambda - q) y^(p-1),
/// y(0) = 0, y'(0) = 1. Valid for any real lambda.
inline ShootResult direct_shoot(const PContext& ctx, const Potential& q, double lambda, double ell,
                                const SolverConfig& cfg = {}) {
    if (!std::isfinite(lambda)) throw DomainError("lambda must be finite");
    if (!std::isfinite(ell) || ell <= 0.0 || ell > q.domain_end() * (1.0 + 1e-14))
        throw DomainError("interval end out of range: " + std::to_string(ell));
    const double p = ctx.p();
    const double e_y = 1.0 / (p - 1.0);

    auto run = [&](const ToleranceConfig& tol) {
        ShootResult r;
        auto rhs = [&](double x, const State<2>& s) {
            return State<2>{signed_pow(s[1], e_y),
                            -(p - 1.0) * (lambda - q(x)) * signed_pow(s[0], p - 1.0)};
        };
        int last = 0;
        auto observe = [&](double x, const State<2>& s, const State<2>&) {
            if (x > 0.0) {
                const int sg = s[0] > 0.0 ? 1 : (s[0] < 0.0 ? -1 : 0);
                if (sg != 0) {
                    if (last != 0 && sg != last) ++r.zero_count;
                    last = sg;
                }
            }
            r.y_max = std::max(r.y_max, std::abs(s[0]));
            if (x > 0.0 && (std::abs(s[1]) < 1e-12 || std::abs(s[0]) < 1e-12)) ++r.degenerate_steps;
        };
        const std::vector<double> breaks = q.breakpoints();
        const State<2> end =
            integrate_dopri<2>(rhs, State<2>{0.0, 1.0}, 0.0, ell, breaks, tol, r.stats, observe);
        r.y_end = end[0];
        r.v_end = end[1];
        return r;
    };

    try {
        return run(cfg.oracle_tol);
    } catch (const IntegrationError&) {
        ToleranceConfig relaxed = cfg.oracle_tol;
        relaxed.rel_tol *= 100.0;
        relaxed.abs_tol *= 100.0;
        ShootResult r = run(relaxed);
        r.quality_warning = true;
        return r;
    }
}

/// lambda_n by bisection on the direct-shooting zero count: y(.; lambda) has
/// at least n sign changes on (0, ell] exactly when lambda > lambda_n.
inline double oracle_eigenvalue(const PContext& ctx, const Potential& q, int n, double ell,
                                const SolverConfig& cfg = {}, double rel_width = 1e-12) {
    const auto [qmin, qmax] = potential_range(q, ell);
    const double base = free_eigenvalue(ctx, n, ell);
    const double pad = 1e-6 * (1.0 + std::abs(base));
    double lo = base + qmin - pad;
    double hi = base + qmax + pad;
    auto above = [&](double lam) { return direct_shoot(ctx, q, lam, ell, cfg).zero_count >= n; };
    for (int g = 0; above(lo) && g < 40; ++g) lo -= (hi - lo);
    for (int g = 0; !above(hi) && g < 40; ++g) hi += (hi - lo);
    for (int it = 0; it < 200 && hi - lo > rel_width * std::max(1.0, std::abs(hi)); ++it) {
        const double mid = 0.5 * (lo + hi);
        (above(mid) ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

enum class Lambda1Sign { positive, zero_within_tol, nonpositive };

inline const char* to_string(Lambda1Sign s) {
    switch (s) {
        case Lambda1Sign::positive: return "positive";
        case Lambda1Sign::zero_within_tol: return "zero_within_tol";
        case Lambda1Sign::nonpositive: return "nonpositive";
    }
    return "unknown";
}

struct Lambda1Result {
    Lambda1Sign sign = Lambda1Sign::positive;
    double margin = 0.0;  // |y(ell)| of the lambda = 0 solution
    ShootResult shot;
};

/// lambda_1(ell) > 0 exactly when the lambda = 0 solution has no zero in (0, ell].
inline Lambda1Result sign_of_lambda1(const PContext& ctx, const Potential& q, double ell,
                                     const SolverConfig& cfg = {}, double zero_tol = 1e-9) {
    Lambda1Result r;
    r.shot = direct_shoot(ctx, q, 0.0, ell, cfg);
    r.margin = std::abs(r.shot.y_end);
    if (r.margin <= zero_tol * std::max(r.shot.y_max, 1e-300))
        r.sign = Lambda1Sign::zero_within_tol;
    else
        r.sign = r.shot.zero_count == 0 ? Lambda1Sign::positive : Lambda1Sign::nonpositive;
    return r;
}

}  // namespace plap
