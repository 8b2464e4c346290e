#include <gtest/gtest.h>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>
#include <limits>
#include <random>

#include "shortrate/analysis.hpp"
#include "shortrate/approx.hpp"
#include "shortrate/closedform.hpp"

using namespace shortrate;

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
const CKLSParams kCIR{0.00315, -0.0555, 0.0894, 0.5};

ConvergenceModel conv_cir_model() { return {0.0075, -2.0, 2.0, 0.003, -0.2, 0.03, 0.01, 0.5, 0.5, 0.0}; }

/// Slower-reverting convergence parameters whose asymptotic regime covers tau up to 1.
ConvergenceModel slow_conv_model() { return {0.0075, -0.2, 0.2, 0.003, -0.1, 0.03, 0.01, 0.5, 0.5, 0.0}; }

std::vector<double> log_spaced(double a, double b, int n) {
    std::vector<double> t(n);
    for (int k = 0; k < n; ++k) t[k] = a * std::pow(b / a, k / (n - 1.0));
    return t;
}

template <class F>
double sup_1f(F&& f, double tau) {
    double s = 0.0;
    for (double r : uniform_grid(0.0, 0.15, 151)) s = std::max(s, std::abs(f(r, tau) - cir_log_price(kCIR, r, tau)));
    return s;
}

template <class F>
double sup_2f(const ConvergenceModel& m, F&& f, double tau) {
    double s = 0.0;
    for (double rd : uniform_grid(0.005, 0.05, 10))
        for (double re : uniform_grid(0.005, 0.05, 10))
            s = std::max(s, std::abs(f(rd, re, tau) - conv_cir_log_price(m, rd, re, tau)));
    return s;
}

template <class F>
double slope_1f(F&& f, double a, double b) {
    const auto ts = log_spaced(a, b, 8);
    std::vector<double> e;
    for (double t : ts) e.push_back(sup_1f(f, t));
    return fitted_slope(ts, e);
}

template <class F>
double slope_2f(const ConvergenceModel& m, F&& f, const std::vector<double>& ts) {
    std::vector<double> e;
    for (double t : ts) e.push_back(sup_2f(m, f, t));
    return fitted_slope(ts, e);
}

/// Least-squares intercept of y against a cubic in x.
double cubic_intercept(const std::vector<double>& x, const std::vector<double>& y) {
    long double M[4][5] = {};
    for (std::size_t i = 0; i < x.size(); ++i) {
        long double p[4] = {1.0L, x[i], x[i] * x[i], x[i] * x[i] * x[i]};
        for (int a = 0; a < 4; ++a) {
            for (int b = 0; b < 4; ++b) M[a][b] += p[a] * p[b];
            M[a][4] += p[a] * y[i];
        }
    }
    for (int c = 0; c < 4; ++c)
        for (int r = c + 1; r < 4; ++r) {
            const long double f = M[r][c] / M[c][c];
            for (int k = c; k < 5; ++k) M[r][k] -= f * M[c][k];
        }
    long double sol[4];
    for (int r = 3; r >= 0; --r) {
        long double s = M[r][4];
        for (int k = r + 1; k < 4; ++k) s -= M[r][k] * sol[k];
        sol[r] = s / M[r][r];
    }
    return static_cast<double>(sol[0]);
}

}  // namespace

// ---------------------------------------------------------------------------
// Exactness at gamma = 0

TEST(Exactness, OneFactorApproximationsAtGammaZero) {
    const CKLSParams p{0.00315, -0.0555, 0.0894, 0.0};
    for (double r : uniform_grid(0.001, 0.15, 10))
        for (double tau : uniform_grid(0.1, 10.0, 10)) {
            const double ex = vasicek_log_price(p, r, tau);
            const double tol = 8.0 * kEps * std::abs(ex);
            EXPECT_LE(std::abs(cw_price(p, r, tau) - ex), tol) << "r=" << r << " tau=" << tau;
            EXPECT_LE(std::abs(cw_ap2_price(p, r, tau) - ex), tol) << "r=" << r << " tau=" << tau;
            EXPECT_LE(std::abs(vas_subst_price(p, r, tau) - ex), tol) << "r=" << r << " tau=" << tau;
        }
}

TEST(Exactness, ConvergenceApproximationsAtGammaZero) {
    for (double rho : {0.0, 0.2, -0.5}) {
        const ConvergenceModel m{0.0075, -2.0, 2.0, 0.003, -0.2, 0.03, 0.01, 0.0, 0.0, rho};
        for (double rd : uniform_grid(0.001, 0.1, 5))
            for (double re : uniform_grid(0.001, 0.1, 4))
                for (double tau : uniform_grid(0.1, 10.0, 5)) {
                    const double ex = conv_vasicek_log_price(m, rd, re, tau);
                    const double tol = 8.0 * kEps * std::abs(ex);
                    EXPECT_LE(std::abs(conv_approx_price(m, rd, re, tau) - ex), tol);
                    EXPECT_LE(std::abs(conv_ap2_price(m, rd, re, tau) - ex), tol);
                }
    }
}

TEST(Exactness, UnitPriceAtZeroMaturity) {
    EXPECT_EQ(cw_price(kCIR, 0.04, 0.0), 0.0);
    EXPECT_EQ(cw_ap2_price(kCIR, 0.04, 0.0), 0.0);
    EXPECT_EQ(vas_subst_price(kCIR, 0.04, 0.0), 0.0);
    EXPECT_EQ(conv_approx_price(conv_cir_model(), 0.02, 0.01, 0.0), 0.0);
    EXPECT_EQ(conv_ap2_price(conv_cir_model(), 0.02, 0.01, 0.0), 0.0);
}

TEST(Domain, Rejections) {
    EXPECT_THROW(cw_price(CKLSParams{0.001, -0.1, 0.1, 0.25}, 0.0, 1.0), DomainError);
    EXPECT_THROW(cw_price(CKLSParams{0.001, 0.0, 0.1, 0.5}, 0.04, 1.0), DomainError);
    EXPECT_THROW(vas_subst_price(CKLSParams{0.001, 0.0, 0.1, 0.5}, 0.04, 1.0), DomainError);
    EXPECT_NO_THROW(vas_subst_price(kCIR, 0.0, 1.0));
    EXPECT_THROW(conv_correction_coeffs(conv_cir_model(), 0.0, 0.01), DomainError);
    EXPECT_THROW(conv_correction_coeffs(conv_cir_model(), 0.01, 0.0), DomainError);
}

// ---------------------------------------------------------------------------
// One-factor error norms and coefficients

TEST(CW, SupNormAtHalfYear) {
    const double s = grid_error_norms([](double r, double t) { return cw_price(kCIR, r, t); },
                                      [](double r, double t) { return cir_log_price(kCIR, r, t); },
                                      uniform_grid(0.0, 0.15, 1501), {0.5})
                         .rows[0]
                         .sup;
    EXPECT_NEAR(s, 9.023e-9, 0.01 * 9.023e-9);
}

TEST(CW, ImprovedSupNormAndOrder) {
    const CWImproved ap2(kCIR);
    const auto rep = grid_error_norms([&](double r, double t) { return ap2(r, t); },
                                      [](double r, double t) { return cir_log_price(kCIR, r, t); },
                                      uniform_grid(0.0, 0.15, 1501), {1.0, 0.75});
    EXPECT_NEAR(rep.rows[0].sup, 4.682e-10, 0.02 * 4.682e-10);
    ASSERT_TRUE(rep.eoc_sup[0].has_value());
    EXPECT_NEAR(*rep.eoc_sup[0], 7.039, 0.05);
}

TEST(CW, FifthOrderCoefficientMatchesExpansion) {
    const double a = kCIR.alpha, b = kCIR.beta, s2 = kCIR.sigma2();
    const auto c5 = cw_c5(kCIR);
    for (double r : {0.01, 0.04, 0.1}) {
        const double formula = -(1.0 / 120.0) * s2 * (a * b + r * (b * b - 4.0 * s2));
        EXPECT_NEAR(c5(r), formula, 1e-12 * std::abs(formula));
        std::vector<double> ts, y;
        for (double t : uniform_grid(0.05, 0.3, 12)) {
            ts.push_back(t);
            y.push_back((cw_price(kCIR, r, t) - cir_log_price(kCIR, r, t)) / std::pow(t, 5));
        }
        EXPECT_NEAR(cubic_intercept(ts, y), formula, 1e-3 * std::abs(formula)) << "r=" << r;
    }
}

TEST(CW, ImprovedCoefficientsVanishAtGammaZero) {
    const CKLSParams p{0.00315, -0.0555, 0.0894, 0.0};
    EXPECT_TRUE(cw_c5(p).empty());
    EXPECT_TRUE(cw_c6(p).empty());
}

TEST(VasSubst, FourthOrderCoefficient) {
    for (double g : {0.5, 0.75, 1.0}) {
        const CKLSParams p{0.00315, -0.0555, 0.0894, g};
        const auto c4 = vas_subst_c4(p);
        for (double r : {0.01, 0.04, 0.1}) {
            const double s2 = p.sigma2();
            const double formula = -(1.0 / 24.0) * g * std::pow(r, 2 * g - 2) * s2 *
                                   (2 * p.alpha * r + 2 * p.beta * r * r + (2 * g - 1) * std::pow(r, 2 * g) * s2);
            EXPECT_NEAR(c4(r), formula, 1e-12 * std::abs(formula)) << "gamma=" << g << " r=" << r;
        }
    }
    const auto c4 = vas_subst_c4(kCIR);
    for (double r : {0.01, 0.04, 0.1}) {
        std::vector<double> ts, y;
        for (double t : uniform_grid(0.05, 0.3, 12)) {
            ts.push_back(t);
            y.push_back((vas_subst_price(kCIR, r, t) - cir_log_price(kCIR, r, t)) / std::pow(t, 4));
        }
        EXPECT_NEAR(cubic_intercept(ts, y), c4(r), 1e-3 * std::abs(c4(r))) << "r=" << r;
    }
}

TEST(VasSubst, YieldErrorBelowQuotingPrecision) {
    for (double r : uniform_grid(0.02, 0.06, 9))
        for (double tau : uniform_grid(0.25, 10.0, 40)) {
            const double d = yield_from_log_price(vas_subst_price(kCIR, r, tau), tau) -
                             yield_from_log_price(cir_log_price(kCIR, r, tau), tau);
            EXPECT_LT(std::abs(d), 1e-3) << "r=" << r << " tau=" << tau;
        }
}

// ---------------------------------------------------------------------------
// Convergence model coefficients

TEST(ConvCoefficients, SquareRootFormOfC4) {
    std::mt19937_64 gen(2024);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 200; ++k) {
        const ConvergenceModel m{0.02 * u(gen), -3.0 * u(gen) - 0.01, 3.0 * u(gen), 0.01 * u(gen), -u(gen) - 0.01,
                                 0.01 + 0.2 * u(gen), 0.01 + 0.2 * u(gen), 0.5, 0.5, 0.0};
        const double rd = 1e-3 + 0.1 * u(gen), re = 1e-3 + 0.1 * u(gen);
        const double s2 = m.sigma_d * m.sigma_d;
        const double t1 = -m.a2 * s2 * rd, t2 = -m.a1 * s2, t3 = -m.a3 * s2 * re;
        const double formula = (t1 + t2 + t3) / 24.0;
        const double scale = (std::abs(t1) + std::abs(t2) + std::abs(t3)) / 24.0;
        EXPECT_LE(std::abs(conv_correction_coeffs(m, rd, re).c4 - formula), 8.0 * kEps * scale);
    }
}

TEST(ConvCoefficients, VanishWithoutDomesticVolatilityExponent) {
    ConvergenceModel m = conv_cir_model();
    m.gamma_d = 0.0;
    const auto c = conv_correction_coeffs(m);
    EXPECT_EQ(c.c4(0.02, 0.01), 0.0);
    const double ap = conv_approx_price(m, 0.02, 0.01, 0.5);
    EXPECT_EQ(conv_ap2_price(m, 0.02, 0.01, 0.5), ap);
}

TEST(ConvCoefficients, OneFactorSpecialization) {
    for (double g : {0.5, 0.75, 1.0, 1.5}) {
        const ConvergenceModel m{0.004, -0.3, 0.0, 0.003, -0.2, 0.09, 0.01, g, 0.5, 0.0};
        const auto c1 = vas_subst_c4(CKLSParams{m.a1, m.a2, m.sigma_d, g});
        const auto c2 = conv_correction_coeffs(m);
        for (double r : {0.005, 0.03, 0.12}) {
            const double v = c1(r);
            EXPECT_LE(std::abs(c2.c4(r, 0.02) - v), 8.0 * kEps * std::abs(v)) << "gamma=" << g << " r=" << r;
        }
    }
}

namespace {

using Real = boost::multiprecision::cpp_bin_float_50;

/// Residual of ln P^ap in the log-price equation for gamma_d = gamma_e = 1/2,
/// rho = 0, with every derivative in closed form.
Real conv_residual(const ConvergenceModel& m, Real rd, Real re, Real t) {
    const Real a1 = m.a1, a2 = m.a2, a3 = m.a3, b1 = m.b1, b2 = m.b2;
    const Real sd2 = Real(m.sigma_d) * m.sigma_d, se2 = Real(m.sigma_e) * m.sigma_e;
    auto E = [&](Real x) { return (exp(x * t) - 1) / x; };
    auto IEE = [&](Real x, Real y) { return (E(x + y) - E(x) - E(y) + t) / (x * y); };
    const Real k = a3 / (a2 - b2);
    const Real D = E(a2), Dt = exp(a2 * t);
    const Real U = k * (E(a2) - E(b2)), Ut = k * (exp(a2 * t) - exp(b2 * t));
    const Real ID = IEE(a2, a2) / 2;
    const Real IU = k * k * (IEE(a2, a2) - 2 * IEE(a2, b2) + IEE(b2, b2)) / 2;
    const Real At = -a1 * D - b1 * U + sd2 * rd * D * D / 2 + se2 * re * U * U / 2;
    const Real fd = -D + sd2 * ID, fe = -U + se2 * IU;
    return -(At - Dt * rd - Ut * re) + sd2 * rd * fd * fd / 2 + se2 * re * fe * fe / 2 +
           (a1 + a2 * rd + a3 * re) * fd + (b1 + b2 * re) * fe - rd;
}

}  // namespace

TEST(ConvCoefficients, ResidualExpansionMatchesK3AndK4) {
    const auto m = conv_cir_model();
    const auto c = conv_correction_coeffs(m);
    for (auto [rd, re] : {std::pair{0.02, 0.02}, std::pair{0.017, 0.01}, std::pair{0.05, 0.005}}) {
        const Real k3 = -4 * Real(c.c4(rd, re));
        std::vector<Real> ts, g;
        for (int i = 0; i < 6; ++i) {
            const Real t = Real(1e-4) / (1 << i);
            ts.push_back(t);
            g.push_back((conv_residual(m, rd, re, t) / (t * t * t) - k3) / t);
        }
        for (std::size_t j = 1; j < g.size(); ++j)
            for (std::size_t i = g.size() - 1; i >= j; --i) g[i] = (ts[i - j] * g[i] - ts[i] * g[i - 1]) / (ts[i - j] - ts[i]);
        const double k4 = static_cast<double>(g.back());
        EXPECT_NEAR(k4, c.k4(rd, re), 1e-6 * std::abs(c.k4(rd, re))) << "rd=" << rd << " re=" << re;
        const Real t = Real(1e-8);
        EXPECT_NEAR(static_cast<double>(conv_residual(m, rd, re, t) / (t * t * t)), static_cast<double>(k3),
                    1e-6 * std::abs(static_cast<double>(k3)));
    }
}

TEST(ConvApprox, TableYields) {
    const auto m = conv_cir_model();
    EXPECT_NEAR(100.0 * yield_from_log_price(conv_approx_price(m, 0.017, 0.01, 0.25), 0.25), 1.63256, 1e-5);
    EXPECT_NEAR(100.0 * yield_from_log_price(conv_approx_price(m, 0.017, 0.01, 30.0), 30.0), 1.78787, 1e-5);
}

TEST(ConvApprox, ImprovedIsMoreAccurateAtQuarterYear) {
    const auto m = conv_cir_model();
    const double ex = conv_cir_log_price(m, 0.017, 0.01, 0.25);
    EXPECT_LE(std::abs(conv_ap2_price(m, 0.017, 0.01, 0.25) - ex), std::abs(conv_approx_price(m, 0.017, 0.01, 0.25) - ex));
}

// ---------------------------------------------------------------------------
// Orders of accuracy

TEST(Order, OneFactorSlopes) {
    const CWImproved ap2(kCIR);
    EXPECT_NEAR(slope_1f([](double r, double t) { return cw_price(kCIR, r, t); }, 0.25, 1.0), 5.0, 0.15);
    EXPECT_NEAR(slope_1f([&](double r, double t) { return ap2(r, t); }, 0.25, 1.0), 7.0, 0.15);
    EXPECT_NEAR(slope_1f([](double r, double t) { return vas_subst_price(kCIR, r, t); }, 0.25, 1.0), 4.0, 0.15);
}

TEST(Order, ConvergenceSlopesInAsymptoticRange) {
    const auto m = conv_cir_model();
    const ConvImproved ap2(m);
    const auto ts = log_spaced(0.01, 0.1, 8);
    EXPECT_NEAR(slope_2f(m, [&](double a, double b, double t) { return conv_approx_price(m, a, b, t); }, ts), 4.0, 0.15);
    EXPECT_NEAR(slope_2f(m, [&](double a, double b, double t) { return ap2(a, b, t); }, ts), 6.0, 0.15);
}

TEST(Order, ConvergenceSlopesSlowReversion) {
    const auto m = slow_conv_model();
    const ConvImproved ap2(m);
    const auto ts = log_spaced(0.25, 1.0, 8);
    EXPECT_NEAR(slope_2f(m, [&](double a, double b, double t) { return conv_approx_price(m, a, b, t); }, ts), 4.0, 0.15);
    EXPECT_NEAR(slope_2f(m, [&](double a, double b, double t) { return ap2(a, b, t); }, ts), 6.0, 0.15);
}

TEST(Order, ConvergenceImprovedAtLeastSixthOrder) {
    const auto m = conv_cir_model();
    const ConvImproved ap2(m);
    std::vector<double> ts, e;
    for (int k = 1; k <= 8; ++k) {
        const double t = 0.05 * k;
        ts.push_back(t);
        e.push_back(std::abs(ap2(0.017, 0.01, t) - conv_cir_log_price(m, 0.017, 0.01, t)));
    }
    EXPECT_GE(fitted_slope(ts, e), 5.9);
}
