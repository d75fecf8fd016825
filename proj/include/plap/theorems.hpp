#pragma once

// Numerical verification harnesses for the eigenvalue-ratio statements:
//
//   T1  q <= 0 nondecreasing on [0, x0]: d theta / d rho (x0, rho) <= 0
//       for rho >= (-2 q(0))^(1/p).
//   T2  q <= 0 single-barrier: lambda_n / lambda_m >= n^p / m^p whenever
//       lambda_n > lambda_m >= -2 q*, q* = min(q(0), q(1)).
//   T3  q <= 0 single-barrier: for ell up to some ell0 <= (-p / (3 q*))^(1/p),
//       lambda_1(ell) > 0 and every ratio obeys the T2 lower bound.
//   R1  q >= 0 single-well: lambda_n / lambda_m <= n^p / m^p.
//
// Each harness scans a grid, records one row per scanned point and a
// verdict. Rows are emitted in scan-input order so output is deterministic.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "plap/eigensolver.hpp"
#include "plap/errors.hpp"
#include "plap/potential.hpp"
#include "plap/prufer.hpp"
#include "plap/ptrig.hpp"

namespace plap {

enum class TheoremId { T1, T2, T3, R1 };
enum class Verdict { verified, violated, inconclusive };

inline const char* to_string(TheoremId t) {
    switch (t) {
        case TheoremId::T1: return "T1";
        case TheoremId::T2: return "T2";
        case TheoremId::T3: return "T3";
        case TheoremId::R1: return "R1";
    }
    return "unknown";
}

inline const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::verified: return "verified";
        case Verdict::violated: return "violated";
        case Verdict::inconclusive: return "inconclusive";
    }
    return "unknown";
}

struct HarnessConfig {
    SolverConfig solver{};
    double ratio_slack = 1e-8;   // relative, on ratio inequalities
    double sign_slack = 1e-10;   // absolute, on theta-dot
    int grid_n = kDefaultClassifyGrid;
    int t1_grid_points = 32;
    int t3_grid_points = 24;
    /// T1: also estimate theta-dot by a centered difference in rho.
    bool fd_crosscheck = false;
    /// Relative step: h = fd_step * max(1, rho).
    double fd_step = 1e-4;
    ToleranceConfig fd_tol{1e-13, 1e-15, 4'000'000};
};

/// Status strings used in scan rows.
inline constexpr const char* kInHypothesis = "in_hypothesis";
inline constexpr const char* kOutOfHypothesis = "out_of_hypothesis";
inline constexpr const char* kBeyondBound = "beyond_bound";
inline constexpr const char* kFailed = "failed";

struct ScanPoint {
    std::vector<std::pair<std::string, double>> fields;
    double margin = 0.0;  // >= -slack means the inequality holds
    std::string status = kInHypothesis;
    bool ok = true;
    std::string note;

    double field(const std::string& name) const {
        for (const auto& [k, v] : fields)
            if (k == name) return v;
        return std::numeric_limits<double>::quiet_NaN();
    }
};

struct TheoremCertificate {
    TheoremId theorem = TheoremId::T2;
    double p = 2.0;
    ShapeCertificate hypotheses;
    bool hypotheses_hold = false;
    std::vector<std::pair<std::string, double>> thresholds;
    std::vector<ScanPoint> scan;
    Verdict verdict = Verdict::inconclusive;
    double worst_margin = std::numeric_limits<double>::quiet_NaN();
    std::optional<ScanPoint> witness;
    double slack = 0.0;
    std::vector<std::string> notes;
    HarnessConfig config;

    double threshold(const std::string& name) const {
        for (const auto& [k, v] : thresholds)
            if (k == name) return v;
        return std::numeric_limits<double>::quiet_NaN();
    }
    std::size_t count(const std::string& status) const {
        return static_cast<std::size_t>(std::count_if(
            scan.begin(), scan.end(), [&](const ScanPoint& s) { return s.status == status; }));
    }
};

namespace detail {

inline void finish(TheoremCertificate& c, bool vacuous_is_inconclusive = true) {
    double worst = std::numeric_limits<double>::infinity();
    std::size_t in_hyp = 0;
    for (const ScanPoint& s : c.scan) {
        if (s.status != kInHypothesis && s.status != kFailed) continue;
        ++in_hyp;
        if (s.status == kInHypothesis) worst = std::min(worst, s.margin);
        if (!s.ok && !c.witness) c.witness = s;
    }
    c.worst_margin = std::isfinite(worst) ? worst : std::numeric_limits<double>::quiet_NaN();
    if (!c.hypotheses_hold) {
        c.verdict = Verdict::inconclusive;
    } else if (c.count(kFailed) > 0) {
        c.verdict = Verdict::inconclusive;
    } else if (c.witness) {
        c.verdict = Verdict::violated;
    } else if (in_hyp == 0 && vacuous_is_inconclusive) {
        c.verdict = Verdict::inconclusive;
        c.notes.push_back("no scanned point satisfies the hypotheses");
    } else {
        c.verdict = Verdict::verified;
    }
}

/// lambda_1..lambda_nmax; entries are empty where lambda_n is not positive
/// (the Prüfer route does not reach it). Search failures propagate.
inline std::vector<std::optional<Eigenpair>> positive_spectrum(const PContext& ctx,
                                                               const Potential& q, int n_max,
                                                               double ell,
                                                               const SolverConfig& cfg) {
    std::vector<std::optional<Eigenpair>> out;
    for (int n = 1; n <= n_max; ++n) {
        try {
            out.push_back(find_eigenvalue(ctx, q, n, ell, cfg));
        } catch (const UnsupportedRegimeError&) {
            out.push_back(std::nullopt);
        }
    }
    return out;
}

/// Relative margin of lambda_n m^p >= lambda_m n^p (lower) or <= (upper).
inline double ratio_margin(double lam_n, double lam_m, int n, int m, double p, bool lower) {
    const double lhs = lam_n * std::pow(m, p);
    const double rhs = lam_m * std::pow(n, p);
    const double scale = std::abs(rhs);
    return (lower ? lhs - rhs : rhs - lhs) / scale;
}

inline ScanPoint pair_point(const Eigenpair& en, const Eigenpair& em, double p, bool lower) {
    ScanPoint s;
    const double bound = std::pow(static_cast<double>(en.n) / em.n, p);
    s.fields = {{"n", static_cast<double>(en.n)},
                {"m", static_cast<double>(em.n)},
                {"lambda_n", en.lambda},
                {"lambda_m", em.lambda},
                {"ratio", en.lambda / em.lambda},
                {"bound", bound}};
    s.margin = ratio_margin(en.lambda, em.lambda, en.n, em.n, p, lower);
    return s;
}

}  // namespace detail

/// Default T1 grid: logarithmically spaced from the threshold rho* to 4 rho*.
/// When q(0) = 0 the threshold is 0 and the grid starts at pi_p instead.
inline std::vector<double> default_t1_grid(const PContext& ctx, double q0, int points) {
    const double thr = std::pow(std::max(0.0, -2.0 * q0), 1.0 / ctx.p());
    const double base = thr > 0.0 ? thr : ctx.pi_p();
    std::vector<double> g;
    for (int i = 0; i < points; ++i)
        g.push_back(i == 0 ? base : base * std::pow(4.0, static_cast<double>(i) / (points - 1)));
    return g;
}

inline TheoremCertificate verify_theorem1(const PContext& ctx, const Potential& q,
                                          std::vector<double> rho_grid,
                                          const HarnessConfig& cfg = {}) {
    TheoremCertificate c;
    c.theorem = TheoremId::T1;
    c.p = ctx.p();
    c.config = cfg;
    c.slack = cfg.sign_slack;
    c.hypotheses = classify(q, cfg.grid_n);
    const ShapeCertificate& h = c.hypotheses;
    const double x0 = h.x0;
    // Nondecreasing on [0, x0] holds for every barrier-like shape, with the
    // turning point reported by the certificate.
    c.hypotheses_hold = h.nonpositive && h.barrier_like();
    const double thr = std::pow(std::max(0.0, -2.0 * h.q0), 1.0 / ctx.p());
    c.thresholds = {{"x0", x0}, {"rho_threshold", thr}, {"q0", h.q0}};
    if (!c.hypotheses_hold) {
        c.notes.push_back(std::string("hypothesis failure: need q <= 0 nondecreasing on [0, x0], got ") +
                          to_string(h.shape) + (h.nonpositive ? "" : ", not nonpositive"));
        detail::finish(c);
        return c;
    }

    if (rho_grid.empty()) rho_grid = default_t1_grid(ctx, h.q0, cfg.t1_grid_points);
    std::sort(rho_grid.begin(), rho_grid.end());

    bool all_zero = true;
    for (double rho : rho_grid) {
        ScanPoint s;
        s.fields = {{"rho", rho}};
        if (!(rho > 0.0) || rho < thr * (1.0 - 1e-12)) {
            s.status = kOutOfHypothesis;
            s.fields.push_back({"theta_dot", std::numeric_limits<double>::quiet_NaN()});
            c.scan.push_back(s);
            continue;
        }
        double theta_dot = 0.0;
        if (x0 > 0.0) {
            try {
                theta_dot = *integrate_sensitivity(ctx, q, rho, x0, cfg.solver.tol).theta_dot_end;
            } catch (const std::runtime_error& e) {
                s.status = kFailed;
                s.ok = false;
                s.note = e.what();
                s.fields.push_back({"theta_dot", std::numeric_limits<double>::quiet_NaN()});
                c.scan.push_back(s);
                continue;
            }
        } else {
            s.note = "degenerate turning point x0 = 0";
        }
        s.fields.push_back({"theta_dot", theta_dot});
        if (cfg.fd_crosscheck && x0 > 0.0) {
            const double hstep = cfg.fd_step * std::max(1.0, rho);
            const double tp_ = integrate_phase(ctx, q, rho + hstep, x0, cfg.fd_tol, false).theta_end;
            const double tm_ = integrate_phase(ctx, q, rho - hstep, x0, cfg.fd_tol, false).theta_end;
            s.fields.push_back({"theta_dot_fd", (tp_ - tm_) / (2.0 * hstep)});
        }
        s.margin = -theta_dot;
        s.ok = theta_dot <= cfg.sign_slack;
        if (std::abs(theta_dot) > cfg.sign_slack) all_zero = false;
        c.scan.push_back(s);
    }
    detail::finish(c);
    if (c.verdict == Verdict::verified && all_zero)
        c.notes.push_back("theta_dot vanishes on the whole grid, consistent with q == 0 on (0, x0]");
    return c;
}

inline TheoremCertificate verify_theorem2(const PContext& ctx, const Potential& q, int n_max,
                                          const HarnessConfig& cfg = {}) {
    TheoremCertificate c;
    c.theorem = TheoremId::T2;
    c.p = ctx.p();
    c.config = cfg;
    c.slack = cfg.ratio_slack;
    c.hypotheses = classify(q, cfg.grid_n);
    const ShapeCertificate& h = c.hypotheses;
    c.hypotheses_hold = h.nonpositive && h.barrier_like();
    const double thr = -2.0 * h.q_star;
    c.thresholds = {{"q_star", h.q_star}, {"lambda_threshold", thr}};
    if (!c.hypotheses_hold) {
        c.notes.push_back(std::string("hypothesis failure: need q <= 0 single-barrier, got ") +
                          to_string(h.shape) + (h.nonpositive ? "" : ", not nonpositive"));
        detail::finish(c);
        return c;
    }
    if (h.q_star == 0.0)
        c.notes.push_back("q* = 0: every positive lambda_m meets the threshold");

    std::vector<std::optional<Eigenpair>> spec;
    try {
        spec = detail::positive_spectrum(ctx, q, n_max, q.domain_end(), cfg.solver);
    } catch (const std::runtime_error& e) {
        c.notes.push_back(std::string("eigenvalue search failed: ") + e.what());
        c.hypotheses_hold = true;
        c.scan.push_back(ScanPoint{{}, 0.0, kFailed, false, e.what()});
        detail::finish(c);
        return c;
    }

    bool all_equal = true;
    for (int n = 2; n <= n_max; ++n) {
        for (int m = 1; m < n; ++m) {
            const auto& en = spec[n - 1];
            const auto& em = spec[m - 1];
            if (!en || !em) {
                ScanPoint s;
                s.fields = {{"n", double(n)}, {"m", double(m)}};
                s.status = kOutOfHypothesis;
                s.note = "nonpositive eigenvalue";
                c.scan.push_back(s);
                continue;
            }
            ScanPoint s = detail::pair_point(*en, *em, c.p, true);
            if (em->lambda < thr) {
                s.status = kOutOfHypothesis;
                s.note = "lambda_m below -2q*";
            } else if (!(en->lambda - em->lambda > cfg.sign_slack)) {
                s.status = kOutOfHypothesis;
                s.note = "lambda_n not above lambda_m";
            } else {
                s.ok = s.margin >= -cfg.ratio_slack;
                if (std::abs(s.margin) > cfg.ratio_slack) all_equal = false;
            }
            c.scan.push_back(s);
        }
    }
    detail::finish(c);
    if (c.verdict == Verdict::verified && all_equal)
        c.notes.push_back("every in-hypothesis pair attains equality, consistent with q == 0");
    return c;
}

/// min(1, (-p / (3 q*))^(1/p)); 1 when q* = 0.
inline double theorem3_ell_bound(double p, double q_star) {
    if (!(q_star < 0.0)) return 1.0;
    return std::min(1.0, std::pow(-p / (3.0 * q_star), 1.0 / p));
}

inline std::vector<double> default_t3_grid(double ell_bound, int points) {
    std::vector<double> g;
    for (int k = 1; k <= points; ++k) g.push_back(ell_bound * k / points);
    g.back() = ell_bound;
    return g;
}

/// Grid points above the bound are scanned as `beyond_bound` rows and only
/// feed the empirical ell-hat. A break at ell <= bound is flagged and turns
/// the verdict inconclusive: the statement guarantees some ell0 below the
/// bound, not the whole range, so it cannot be refuted on a grid.
inline TheoremCertificate verify_theorem3(const PContext& ctx, const Potential& q,
                                          std::vector<double> ell_grid, int n_max,
                                          const HarnessConfig& cfg = {}) {
    TheoremCertificate c;
    c.theorem = TheoremId::T3;
    c.p = ctx.p();
    c.config = cfg;
    c.slack = cfg.ratio_slack;
    c.hypotheses = classify(q, cfg.grid_n);
    const ShapeCertificate& h = c.hypotheses;
    c.hypotheses_hold = h.nonpositive && h.barrier_like();
    const double bound = theorem3_ell_bound(c.p, h.q_star);
    c.thresholds = {{"q_star", h.q_star}, {"ell_bound", bound}};
    if (!c.hypotheses_hold) {
        c.notes.push_back(std::string("hypothesis failure: need q <= 0 single-barrier, got ") +
                          to_string(h.shape) + (h.nonpositive ? "" : ", not nonpositive"));
        detail::finish(c);
        return c;
    }
    if (!(h.q_star < 0.0))
        c.notes.push_back("q* = 0: bound formula degenerates, ell_bound set to 1");

    if (ell_grid.empty()) ell_grid = default_t3_grid(bound, cfg.t3_grid_points);
    std::sort(ell_grid.begin(), ell_grid.end());

    double ell_hat = 0.0;
    bool prefix_ok = true;
    bool flagged = false;
    for (double ell : ell_grid) {
        ScanPoint s;
        if (!(ell > 0.0) || ell > q.domain_end()) {
            s.fields = {{"ell", ell}};
            s.status = kOutOfHypothesis;
            s.note = "ell outside (0, domain]";
            c.scan.push_back(s);
            continue;
        }
        const bool in_bound = ell <= bound * (1.0 + 1e-12);
        const Potential qr = q.restricted(ell);
        try {
            const Lambda1Result sign = sign_of_lambda1(ctx, qr, ell, cfg.solver);
            double worst_ratio = std::numeric_limits<double>::infinity();
            double lam1 = std::numeric_limits<double>::quiet_NaN();
            if (sign.sign == Lambda1Sign::positive) {
                const Spectrum sp = compute_spectrum(ctx, qr, n_max, ell, cfg.solver);
                lam1 = sp.pairs.front().lambda;
                for (int n = 2; n <= n_max; ++n)
                    for (int m = 1; m < n; ++m)
                        worst_ratio = std::min(
                            worst_ratio, detail::ratio_margin(sp.pairs[n - 1].lambda,
                                                              sp.pairs[m - 1].lambda, n, m, c.p, true));
            }
            const double sign_code = sign.sign == Lambda1Sign::positive
                                         ? 1.0
                                         : (sign.sign == Lambda1Sign::zero_within_tol ? 0.0 : -1.0);
            s.fields = {{"ell", ell},
                        {"lambda1_sign", sign_code},
                        {"lambda1", lam1},
                        {"lambda1_margin", sign.margin},
                        {"min_ratio_margin", n_max >= 2 ? worst_ratio
                                                        : std::numeric_limits<double>::quiet_NaN()}};
            s.ok = sign.sign == Lambda1Sign::positive &&
                   (n_max < 2 || worst_ratio >= -cfg.ratio_slack);
            s.margin = sign.sign != Lambda1Sign::positive ? -1.0
                                                          : (n_max >= 2 ? worst_ratio : 0.0);
        } catch (const std::runtime_error& e) {
            s.fields = {{"ell", ell}};
            s.ok = false;
            s.note = e.what();
            s.margin = std::numeric_limits<double>::quiet_NaN();
        }
        if (prefix_ok && s.ok) ell_hat = ell;
        if (!s.ok) prefix_ok = false;
        if (!in_bound) {
            s.status = kBeyondBound;
        } else if (!s.ok) {
            // Flag, never refute.
            flagged = true;
            s.note = s.note.empty() ? "property fails at this ell" : s.note;
            s.status = kFailed;
        }
        c.scan.push_back(s);
    }
    c.thresholds.push_back({"ell_hat", ell_hat});
    detail::finish(c);
    if (flagged) c.notes.push_back("property fails at some grid ell <= ell_bound (flagged)");
    return c;
}

inline TheoremCertificate verify_remark1(const PContext& ctx, const Potential& q, int n_max,
                                         const HarnessConfig& cfg = {}) {
    TheoremCertificate c;
    c.theorem = TheoremId::R1;
    c.p = ctx.p();
    c.config = cfg;
    c.slack = cfg.ratio_slack;
    c.hypotheses = classify(q, cfg.grid_n);
    const ShapeCertificate& h = c.hypotheses;
    c.hypotheses_hold = h.nonnegative && h.well_like();
    c.thresholds = {{"q_star", h.q_star}};
    if (!c.hypotheses_hold) {
        c.notes.push_back(std::string("hypothesis failure: need q >= 0 single-well, got ") +
                          to_string(h.shape) + (h.nonnegative ? "" : ", not nonnegative"));
        detail::finish(c);
        return c;
    }
    Spectrum sp;
    try {
        sp = compute_spectrum(ctx, q, n_max, q.domain_end(), cfg.solver);
    } catch (const std::runtime_error& e) {
        c.notes.push_back(std::string("eigenvalue search failed: ") + e.what());
        c.scan.push_back(ScanPoint{{}, 0.0, kFailed, false, e.what()});
        detail::finish(c);
        return c;
    }
    for (int n = 2; n <= n_max; ++n) {
        for (int m = 1; m < n; ++m) {
            ScanPoint s = detail::pair_point(sp.pairs[n - 1], sp.pairs[m - 1], c.p, false);
            s.ok = s.margin >= -cfg.ratio_slack;
            c.scan.push_back(s);
        }
    }
    detail::finish(c);
    return c;
}

/// A strictly negative theta-dot rules out the all-pairs equality pattern in T2.
inline bool t1_t2_consistent(const TheoremCertificate& t1, const TheoremCertificate& t2) {
    bool strict = false;
    for (const ScanPoint& s : t1.scan)
        if (s.status == kInHypothesis && s.field("theta_dot") < -t1.slack) strict = true;
    if (!strict) return true;
    std::size_t in_hyp = 0;
    bool all_equal = true;
    for (const ScanPoint& s : t2.scan) {
        if (s.status != kInHypothesis) continue;
        ++in_hyp;
        if (std::abs(s.margin) > t2.slack) all_equal = false;
    }
    return in_hyp == 0 || !all_equal;
}

}  // namespace plap
