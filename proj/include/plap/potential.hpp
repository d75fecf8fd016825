#pragma once

// Continuous potentials q on [0, 1] and their shape certificates.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "plap/errors.hpp"

namespace plap {

enum class PotentialKind { constant, piecewise_linear, sampled_table, builtin_family };

inline const char* to_string(PotentialKind k) {
    switch (k) {
        case PotentialKind::constant: return "constant";
        case PotentialKind::piecewise_linear: return "piecewise_linear";
        case PotentialKind::sampled_table: return "table";
        case PotentialKind::builtin_family: return "builtin_family";
    }
    return "unknown";
}

struct Knot {
    double x;
    double q;
};

using PotentialParams = std::vector<std::pair<std::string, double>>;

/// A continuous potential evaluated on [0, 1]; the eigenvalue problem that
/// uses it lives on [0, domain_end()].
class Potential {
public:
    using Fn = std::function<double(double)>;

    static Potential constant(double value) {
        check_finite(value, "constant value");
        Potential q;
        q.kind_ = PotentialKind::constant;
        q.family_ = "constant";
        q.params_ = {{"value", value}};
        q.knots_ = {{0.0, value}, {1.0, value}};
        return q;
    }

    /// Knots strictly increasing in x, first at 0 and last at 1.
    static Potential piecewise_linear(std::vector<Knot> knots) {
        validate_knots(knots);
        Potential q;
        q.kind_ = PotentialKind::piecewise_linear;
        q.family_ = "piecewise_linear";
        q.knots_ = std::move(knots);
        return q;
    }

    /// Sampled table with linear interpolation between nodes.
    static Potential table(const std::vector<double>& xs, const std::vector<double>& qs) {
        if (xs.size() != qs.size())
            throw DataError("table arrays differ in length");
        if (xs.size() < 2) throw DataError("table needs at least 2 nodes");
        std::vector<Knot> knots;
        knots.reserve(xs.size());
        for (std::size_t i = 0; i < xs.size(); ++i) knots.push_back({xs[i], qs[i]});
        validate_knots(knots);
        Potential q;
        q.kind_ = PotentialKind::sampled_table;
        q.family_ = "table";
        q.knots_ = std::move(knots);
        return q;
    }

    /// q(x) = depth + rise * min(x, 1 - x); single-barrier for rise >= 0.
    static Potential scaled_tent(double depth, double rise) {
        check_finite(depth, "depth");
        check_finite(rise, "rise");
        Potential q;
        q.kind_ = PotentialKind::builtin_family;
        q.family_ = "scaled_tent";
        q.params_ = {{"depth", depth}, {"rise", rise}};
        q.knots_ = {{0.0, depth}, {0.5, depth + 0.5 * rise}, {1.0, depth}};
        return q;
    }

    /// q(x) = height - dip * min(x, 1 - x); single-well for dip >= 0.
    static Potential scaled_well(double height, double dip) {
        check_finite(height, "height");
        check_finite(dip, "dip");
        Potential q;
        q.kind_ = PotentialKind::builtin_family;
        q.family_ = "scaled_well";
        q.params_ = {{"height", height}, {"dip", dip}};
        q.knots_ = {{0.0, height}, {0.5, height - 0.5 * dip}, {1.0, height}};
        return q;
    }

    /// q(x) = a + b x.
    static Potential linear(double a, double b) {
        check_finite(a, "intercept");
        check_finite(b, "slope");
        Potential q;
        q.kind_ = PotentialKind::builtin_family;
        q.family_ = "linear";
        q.params_ = {{"intercept", a}, {"slope", b}};
        q.knots_ = {{0.0, a}, {1.0, a + b}};
        return q;
    }

    /// Arbitrary continuous function; `breaks` lists points where it is
    /// only C^0 (used as mandatory integrator step boundaries).
    static Potential from_function(std::string name, Fn fn, std::vector<double> breaks = {}) {
        Potential q;
        q.kind_ = PotentialKind::builtin_family;
        q.family_ = std::move(name);
        q.fn_ = std::make_shared<const Fn>(std::move(fn));
        std::sort(breaks.begin(), breaks.end());
        q.breaks_ = std::move(breaks);
        return q;
    }

    double operator()(double x) const {
        if (fn_) return (*fn_)(x) + shift_;
        if (kind_ == PotentialKind::constant) return knots_.front().q + shift_;
        x = std::clamp(x, 0.0, 1.0);
        auto it = std::upper_bound(knots_.begin(), knots_.end(), x,
                                   [](double v, const Knot& k) { return v < k.x; });
        if (it == knots_.begin()) return knots_.front().q + shift_;
        if (it == knots_.end()) return knots_.back().q + shift_;
        const Knot& k1 = *it;
        const Knot& k0 = *(it - 1);
        const double t = (x - k0.x) / (k1.x - k0.x);
        return k0.q + t * (k1.q - k0.q) + shift_;
    }

    PotentialKind kind() const noexcept { return kind_; }
    const std::string& family() const noexcept { return family_; }
    const PotentialParams& params() const noexcept { return params_; }
    /// Knots before any shift is applied; empty for function-backed potentials.
    const std::vector<Knot>& knots() const noexcept { return knots_; }
    double shift() const noexcept { return shift_; }
    double domain_end() const noexcept { return ell_; }
    bool is_function_backed() const noexcept { return static_cast<bool>(fn_); }

    /// Points in (0, domain_end()) where q is only C^0.
    std::vector<double> breakpoints() const {
        std::vector<double> out;
        if (fn_) {
            for (double b : breaks_)
                if (b > 0.0 && b < ell_) out.push_back(b);
        } else if (kind_ != PotentialKind::constant) {
            for (const Knot& k : knots_)
                if (k.x > 0.0 && k.x < ell_) out.push_back(k.x);
        }
        return out;
    }

    /// q + c.
    Potential shifted(double c) const {
        check_finite(c, "shift");
        Potential q = *this;
        q.shift_ += c;
        return q;
    }

    /// The same function, posed on [0, ell].
    Potential restricted(double ell) const {
        if (!std::isfinite(ell) || ell <= 0.0 || ell > 1.0)
            throw DomainError("restriction length must lie in (0, 1], got " + std::to_string(ell));
        Potential q = *this;
        q.ell_ = ell;
        return q;
    }

private:
    static void check_finite(double v, const char* what) {
        if (!std::isfinite(v)) throw DataError(std::string(what) + " is not finite");
    }

    static void validate_knots(const std::vector<Knot>& knots) {
        if (knots.size() < 2) throw DataError("need at least 2 knots");
        for (std::size_t i = 0; i < knots.size(); ++i) {
            if (!std::isfinite(knots[i].x) || !std::isfinite(knots[i].q))
                throw DataError("knot " + std::to_string(i) + " is not finite");
            if (i > 0 && !(knots[i].x > knots[i - 1].x))
                throw DataError("knot " + std::to_string(i) + " is not strictly increasing in x");
        }
        if (knots.front().x != 0.0 || knots.back().x != 1.0)
            throw DataError("knots must start at x = 0 and end at x = 1");
    }

    PotentialKind kind_ = PotentialKind::constant;
    std::string family_ = "constant";
    PotentialParams params_;
    std::vector<Knot> knots_{{0.0, 0.0}, {1.0, 0.0}};
    std::shared_ptr<const Fn> fn_;
    std::vector<double> breaks_;
    double shift_ = 0.0;
    double ell_ = 1.0;
};

inline Potential restrict(const Potential& q, double ell) { return q.restricted(ell); }

/// Nonpositive piecewise-linear potential with `interior` random knots and
/// values in [-max_depth, 0]. Deterministic for a given seed.
inline Potential random_nonpositive_potential(std::uint64_t seed, int interior = 4,
                                              double max_depth = 8.0) {
    if (interior < 0) throw DomainError("interior knot count must be nonnegative");
    if (!(max_depth >= 0.0)) throw DomainError("max_depth must be nonnegative");
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> ux(0.02, 0.98);
    std::uniform_real_distribution<double> uq(-max_depth, 0.0);
    std::vector<double> xs;
    while (static_cast<int>(xs.size()) < interior) {
        const double x = ux(gen);
        if (std::none_of(xs.begin(), xs.end(), [&](double o) { return std::abs(o - x) < 1e-3; }))
            xs.push_back(x);
    }
    std::sort(xs.begin(), xs.end());
    std::vector<Knot> knots{{0.0, uq(gen)}};
    for (double x : xs) knots.push_back({x, uq(gen)});
    knots.push_back({1.0, uq(gen)});
    return Potential::piecewise_linear(std::move(knots));
}

enum class Shape {
    single_well,
    single_barrier,
    monotone_increasing,
    monotone_decreasing,
    constant,
    neither
};

inline const char* to_string(Shape s) {
    switch (s) {
        case Shape::single_well: return "single_well";
        case Shape::single_barrier: return "single_barrier";
        case Shape::monotone_increasing: return "monotone_increasing";
        case Shape::monotone_decreasing: return "monotone_decreasing";
        case Shape::constant: return "constant";
        case Shape::neither: return "neither";
    }
    return "unknown";
}

/// Grid-level monotonicity certificate. It is empirical: it records the
/// resolution it was obtained at.
///
/// x0 is the turning point. For single_well it locates the minimum plateau;
/// for every other shape it locates the maximum plateau, i.e. the turning
/// point under the single-barrier reading (strictly increasing q gives
/// x0 = ell). Constants report ell / 2.
struct ShapeCertificate {
    Shape shape = Shape::neither;
    double x0 = 0.0;
    bool nonpositive = false;
    bool nonnegative = false;
    double q_star = 0.0;
    double q0 = 0.0;
    double q1 = 0.0;  // q at the right end of the domain
    double q_min = 0.0;
    double q_max = 0.0;
    double ell = 1.0;
    int grid_resolution = 0;

    /// Increasing on [0, x0] and decreasing on [x0, ell] for some x0.
    bool barrier_like() const {
        return shape == Shape::single_barrier || shape == Shape::constant ||
               shape == Shape::monotone_increasing || shape == Shape::monotone_decreasing;
    }
    /// Decreasing on [0, x0] and increasing on [x0, ell] for some x0.
    bool well_like() const {
        return shape == Shape::single_well || shape == Shape::constant ||
               shape == Shape::monotone_increasing || shape == Shape::monotone_decreasing;
    }
};

inline constexpr double kMonotoneTol = 1e-12;
inline constexpr int kDefaultClassifyGrid = 1024;

/// Sample points used for classification: a uniform grid with grid_n
/// intervals on [0, ell] merged with the potential's own breakpoints.
inline std::vector<double> classification_abscissae(const Potential& q, int grid_n) {
    const double ell = q.domain_end();
    std::vector<double> xs;
    xs.reserve(static_cast<std::size_t>(grid_n) + 8);
    for (int i = 0; i <= grid_n; ++i) xs.push_back(ell * i / grid_n);
    xs.back() = ell;
    for (double b : q.breakpoints()) xs.push_back(b);
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    return xs;
}

inline ShapeCertificate classify(const Potential& q, int grid_n = kDefaultClassifyGrid) {
    if (grid_n < 16) throw DomainError("classification grid must have at least 16 intervals");
    const std::vector<double> xs = classification_abscissae(q, grid_n);
    std::vector<double> qs(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        qs[i] = q(xs[i]);
        if (!std::isfinite(qs[i]))
            throw DataError("potential is not finite at x = " + std::to_string(xs[i]));
    }

    ShapeCertificate c;
    c.ell = q.domain_end();
    c.grid_resolution = grid_n;
    c.q0 = qs.front();
    c.q1 = qs.back();
    c.q_star = std::min(c.q0, c.q1);
    c.q_min = *std::min_element(qs.begin(), qs.end());
    c.q_max = *std::max_element(qs.begin(), qs.end());
    c.nonpositive = c.q_max <= kMonotoneTol;
    c.nonnegative = c.q_min >= -kMonotoneTol;

    // Signs of consecutive differences, plateaus as 0.
    const std::size_t m = xs.size() - 1;
    std::vector<int> sgn(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double d = qs[i + 1] - qs[i];
        sgn[i] = d > kMonotoneTol ? 1 : (d < -kMonotoneTol ? -1 : 0);
    }
    std::vector<std::pair<int, std::size_t>> runs;  // (sign, first interval)
    for (std::size_t i = 0; i < m; ++i) {
        if (sgn[i] == 0) continue;
        if (runs.empty() || runs.back().first != sgn[i]) runs.push_back({sgn[i], i});
    }
    auto last_of = [&](int s, std::size_t from) {
        std::size_t last = from;
        for (std::size_t i = from; i < m; ++i)
            if (sgn[i] == s) last = i;
            else if (sgn[i] == -s) break;
        return last;
    };

    if (runs.empty()) {
        c.shape = Shape::constant;
        c.x0 = 0.5 * c.ell;
    } else if (runs.size() == 1 && runs[0].first > 0) {
        c.shape = Shape::monotone_increasing;
        const std::size_t up_end = last_of(1, runs[0].second) + 1;
        c.x0 = 0.5 * (xs[up_end] + xs[m]);
    } else if (runs.size() == 1) {
        c.shape = Shape::monotone_decreasing;
        c.x0 = 0.5 * (xs[0] + xs[runs[0].second]);
    } else if (runs.size() == 2) {
        const std::size_t first_end = last_of(runs[0].first, runs[0].second) + 1;
        c.shape = runs[0].first > 0 ? Shape::single_barrier : Shape::single_well;
        c.x0 = 0.5 * (xs[first_end] + xs[runs[1].second]);
    } else {
        c.shape = Shape::neither;
        c.x0 = xs[static_cast<std::size_t>(
            std::max_element(qs.begin(), qs.end()) - qs.begin())];
    }
    return c;
}

}  // namespace plap
