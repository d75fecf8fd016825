#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "plap/eigensolver.hpp"

using namespace plap;

namespace {

constexpr double kPi = std::numbers::pi;

Potential tent() { return Potential::scaled_tent(-5.0, 4.0); }

TEST(Bracket, Examples) {
    const LambdaBracket b0 = bracket_eigenvalue(make_context(2.0), Potential::constant(0.0), 1, 1.0);
    EXPECT_DOUBLE_EQ(b0.lo, kPi * kPi);
    EXPECT_DOUBLE_EQ(b0.hi, kPi * kPi);
    EXPECT_FALSE(b0.truncated_at_zero);

    const LambdaBracket b1 = bracket_eigenvalue(make_context(3.0), Potential::constant(-2.0), 2, 1.0);
    EXPECT_NEAR(b1.lo, oracle::kTwoPi3Cubed - 2.0, 1e-12);
    EXPECT_EQ(b1.lo, b1.hi);

    const LambdaBracket b2 = bracket_eigenvalue(make_context(2.0), tent(), 1, 1.0);
    EXPECT_NEAR(b2.lo, kPi * kPi - 5.0, 1e-13);
    EXPECT_NEAR(b2.hi, kPi * kPi - 3.0, 1e-13);
}

TEST(Bracket, TruncatedAtZero) {
    const LambdaBracket b = bracket_eigenvalue(make_context(2.0), Potential::constant(-50.0), 1, 1.0);
    EXPECT_TRUE(b.truncated_at_zero);
    EXPECT_GT(b.lo, 0.0);
    EXPECT_LT(b.hi, 0.0);
    EXPECT_THROW(bracket_eigenvalue(make_context(2.0), tent(), 0, 1.0), DomainError);
}

TEST(FindEigenvalue, Examples) {
    const Eigenpair a = find_eigenvalue(make_context(3.0), Potential::constant(0.0), 2, 1.0);
    EXPECT_LT(oracle::rel_err(a.lambda, oracle::kTwoPi3Cubed), 1e-9);
    const Eigenpair b = find_eigenvalue(make_context(2.0), Potential::constant(-2.0), 1, 1.0);
    EXPECT_LT(oracle::rel_err(b.lambda, oracle::kPiSqMinus2), 1e-9);
    const Eigenpair c = find_eigenvalue(make_context(2.0), Potential::constant(0.0), 3, 0.5);
    EXPECT_LT(oracle::rel_err(c.lambda, oracle::kThirtySixPiSq), 1e-9);
}

TEST(FindEigenvalue, EigenpairInvariants) {
    const SolverConfig cfg;
    for (double p : {1.5, 2.0, 3.0}) {
        const PContext ctx = make_context(p);
        for (int n = 1; n <= 5; ++n) {
            const Eigenpair e = find_eigenvalue(ctx, tent(), n, 1.0, cfg);
            EXPECT_EQ(e.n, n);
            EXPECT_NEAR(std::pow(e.rho, p), e.lambda, 1e-14 * e.lambda);
            EXPECT_LE(e.residual, cfg.phase_tol);
            EXPECT_EQ(e.zero_count, n - 1);
            EXPECT_GT(e.bracket_width, 0.0);
            EXPECT_LT(e.bracket_width, 1e-6 * e.lambda);
            EXPECT_NEAR(e.phi_end, n * ctx.pi_p(), cfg.phase_tol);
            EXPECT_GT(e.iterations, 0);
        }
    }
}

TEST(FindEigenvalue, BisectionOnlyAgreesWithBrent) {
    SolverConfig plain;
    plain.use_secant = false;
    const PContext ctx = make_context(2.0);
    for (int n = 1; n <= 3; ++n) {
        const Eigenpair a = find_eigenvalue(ctx, tent(), n, 1.0);
        const Eigenpair b = find_eigenvalue(ctx, tent(), n, 1.0, plain);
        EXPECT_LT(oracle::rel_err(a.lambda, b.lambda), 1e-9);
        EXPECT_LE(a.iterations, b.iterations);
    }
}

TEST(FindEigenvalue, Errors) {
    EXPECT_THROW(find_eigenvalue(make_context(2.0), Potential::constant(-50.0), 1, 1.0),
                 UnsupportedRegimeError);
    // lambda_1 = pi^2 - 12 < 0 while the bracket top pi^2 - 9 is positive.
    try {
        find_eigenvalue(make_context(2.0), Potential::scaled_tent(-12.0, 6.0), 1, 1.0);
        FAIL() << "expected UnsupportedRegimeError";
    } catch (const UnsupportedRegimeError& e) {
        EXPECT_EQ(e.index(), 1);
    }
    SolverConfig starved;
    starved.phase_tol = 1e-15;
    starved.max_bisections = 1;
    try {
        find_eigenvalue(make_context(2.0), tent(), 3, 1.0, starved);
        FAIL() << "expected SearchError";
    } catch (const SearchError& e) {
        EXPECT_EQ(e.index(), 3);
    }
}

TEST(FindEigenvalue, MatchesClassicalSchroedingerAtP2) {
    for (const Potential& q : {tent(), random_nonpositive_potential(9), Potential::linear(-3, 2)}) {
        const auto [qmin, qmax] = potential_range(q, 1.0);
        for (int n = 1; n <= 4; ++n) {
            const double base = n * n * kPi * kPi;
            const double ref = oracle::classical_eigenvalue([&](double x) { return q(x); }, n, 1.0,
                                                            base + qmin - 1e-6, base + qmax + 1e-6);
            // phase_tol = 1e-9 bounds the relative accuracy of small lambda_1.
            EXPECT_LT(oracle::rel_err(find_eigenvalue(make_context(2.0), q, n, 1.0).lambda, ref),
                      1e-8)
                << n;
        }
    }
}

TEST(ComputeSpectrum, FreeAndShifted) {
    const Spectrum s = compute_spectrum(make_context(2.0), Potential::constant(0.0), 4, 1.0);
    ASSERT_EQ(s.pairs.size(), 4u);
    for (int n = 1; n <= 4; ++n)
        EXPECT_LT(oracle::rel_err(s.pairs[n - 1].lambda, n * n * kPi * kPi), 1e-9);

    const Spectrum t = compute_spectrum(make_context(3.0), Potential::constant(-3.0), 2, 1.0);
    EXPECT_LT(oracle::rel_err(t.pairs[0].lambda, std::pow(oracle::kPi3, 3) - 3.0), 1e-9);
    EXPECT_LT(oracle::rel_err(t.pairs[1].lambda, oracle::kTwoPi3Cubed - 3.0), 1e-9);
    EXPECT_EQ(t.ell, 1.0);
    EXPECT_EQ(t.ctx.p(), 3.0);
}

TEST(ComputeSpectrum, TentIsIncreasingWithRatiosAboveSquares) {
    const Spectrum s = compute_spectrum(make_context(2.0), Potential::scaled_tent(-10.0, 2.0), 5, 1.0);
    for (std::size_t i = 1; i < s.pairs.size(); ++i) {
        EXPECT_GT(s.pairs[i].lambda, s.pairs[i - 1].lambda);
        EXPECT_EQ(s.pairs[i].n, static_cast<int>(i) + 1);
    }
    // Here lambda_1 > 0 but below -2 q* = 20; the ratio bound still holds.
    for (int n = 2; n <= 5; ++n)
        EXPECT_GE(s.pairs[n - 1].lambda / s.pairs[0].lambda, n * n * (1.0 - 1e-8));
    EXPECT_THROW(compute_spectrum(make_context(2.0), tent(), 0, 1.0), DomainError);
}

TEST(ComputeSpectrum, FreeSpectrumExactness) {
    for (double p : {1.5, 2.0, 3.0, 5.0}) {
        const PContext ctx = make_context(p);
        for (double ell : {0.25, 0.5, 1.0}) {
            const Spectrum s = compute_spectrum(ctx, Potential::constant(0.0), 8, ell);
            for (int n = 1; n <= 8; ++n)
                EXPECT_LT(oracle::rel_err(s.pairs[n - 1].lambda, std::pow(n * ctx.pi_p() / ell, p)),
                          1e-8)
                    << p << ' ' << ell << ' ' << n;
        }
    }
}

TEST(ComputeSpectrum, ShiftCovariance) {
    const std::vector<Potential> qs{tent(), random_nonpositive_potential(4),
                                    Potential::piecewise_linear({{0, -1}, {0.3, -6}, {1, -2}})};
    for (double p : {1.5, 2.0, 3.0}) {
        const PContext ctx = make_context(p);
        for (const Potential& q : qs) {
            const Spectrum base = compute_spectrum(ctx, q, 5, 1.0);
            for (double c : {-3.0, -1.0, 2.0}) {
                const Spectrum sh = compute_spectrum(ctx, q.shifted(c), 5, 1.0);
                for (int n = 0; n < 5; ++n)
                    EXPECT_LE(std::abs(sh.pairs[n].lambda - base.pairs[n].lambda - c) /
                                  std::max(1.0, std::abs(base.pairs[n].lambda)),
                              1e-8)
                        << p << ' ' << c << ' ' << n;
            }
        }
    }
}

TEST(ComputeSpectrum, DomainMonotonicity) {
    const PContext ctx = make_context(3.0);
    for (int n = 1; n <= 3; ++n) {
        double prev = INFINITY;
        for (int k = 0; k <= 14; ++k) {
            const double ell = 0.3 + 0.05 * k;
            const double lam = find_eigenvalue(ctx, tent(), n, ell).lambda;
            EXPECT_LT(lam, prev) << n << ' ' << ell;
            prev = lam;
        }
    }
}

TEST(DirectShoot, Examples) {
    const ShootResult a = direct_shoot(make_context(2.0), Potential::constant(0.0), kPi * kPi, 1.0);
    EXPECT_NEAR(a.y_end, 0.0, 1e-9);
    // The count includes the endpoint, where y(1) = 0 up to rounding.
    EXPECT_LE(a.zero_count, 1);
    EXPECT_EQ(direct_shoot(make_context(2.0), Potential::constant(0.0), kPi * kPi, 0.999).zero_count, 0);

    const PContext c3 = make_context(3.0);
    const ShootResult b = direct_shoot(c3, Potential::constant(0.0), std::pow(c3.pi_p(), 3), 0.999);
    EXPECT_EQ(b.zero_count, 0);
    EXPECT_GT(b.y_end, 0.0);
    // y = S_3(pi_3 x) / pi_3 for y'(0) = 1.
    const ShootResult b2 = direct_shoot(c3, Potential::constant(0.0), std::pow(c3.pi_p(), 3), 0.5);
    EXPECT_NEAR(b2.y_end, 1.0 / c3.pi_p(), 1e-9);

    const ShootResult d = direct_shoot(make_context(2.0), Potential::constant(-2.0), 0.0, 1.0);
    EXPECT_EQ(d.zero_count, 0);
    EXPECT_GT(d.y_end, 0.0);
    EXPECT_NEAR(d.y_end, std::sin(std::sqrt(2.0)) / std::sqrt(2.0), 1e-9);
}

TEST(DirectShoot, NegativeLambdaAndErrors) {
    const ShootResult s = direct_shoot(make_context(2.0), Potential::constant(0.0), -4.0, 1.0);
    EXPECT_NEAR(s.y_end, std::sinh(2.0) / 2.0, 1e-9);
    EXPECT_EQ(s.zero_count, 0);
    EXPECT_THROW(direct_shoot(make_context(2.0), tent(), NAN, 1.0), DomainError);
    EXPECT_THROW(direct_shoot(make_context(2.0), tent(), 1.0, 1.5), DomainError);
    EXPECT_THROW(direct_shoot(make_context(2.0), tent(), 1.0, 0.0), DomainError);
}

TEST(OracleEigenvalue, AgreesWithPruferOnRandomPotentials) {
    for (std::uint64_t seed = 100; seed < 104; ++seed) {
        const Potential q = random_nonpositive_potential(seed);
        for (double p : {1.5, 3.0}) {
            const PContext ctx = make_context(p);
            for (int n = 1; n <= 4; ++n) {
                Eigenpair e;
                try {
                    e = find_eigenvalue(ctx, q, n, 1.0);
                } catch (const UnsupportedRegimeError&) {
                    continue;
                }
                EXPECT_LT(oracle::rel_err(e.lambda, oracle_eigenvalue(ctx, q, n, 1.0)), 1e-6)
                    << seed << ' ' << p << ' ' << n;
            }
        }
    }
}

TEST(OracleEigenvalue, HandlesNonpositiveEigenvalues) {
    EXPECT_NEAR(oracle_eigenvalue(make_context(2.0), Potential::constant(-50.0), 1, 1.0),
                kPi * kPi - 50.0, 1e-8);
}

TEST(SignOfLambda1, Examples) {
    const PContext c2 = make_context(2.0);
    for (double ell : {0.1, 0.5, 1.0})
        EXPECT_EQ(sign_of_lambda1(make_context(3.0), Potential::constant(0.0), ell).sign,
                  Lambda1Sign::positive);
    EXPECT_EQ(sign_of_lambda1(c2, Potential::constant(-50.0), 1.0).sign, Lambda1Sign::nonpositive);
    const Lambda1Result r = sign_of_lambda1(c2, restrict(Potential::constant(-50.0), 0.3), 0.3);
    EXPECT_EQ(r.sign, Lambda1Sign::positive);
    EXPECT_GT(r.margin, 0.0);
    // lambda_1 = 0 exactly: q = -pi^2.
    EXPECT_EQ(sign_of_lambda1(c2, Potential::constant(-kPi * kPi), 1.0).sign,
              Lambda1Sign::zero_within_tol);
    EXPECT_STREQ(to_string(Lambda1Sign::zero_within_tol), "zero_within_tol");
}

}  // namespace
