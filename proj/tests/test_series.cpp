#include <gtest/gtest.h>

#include <cmath>

#include "shortrate/approx.hpp"
#include "shortrate/closedform.hpp"
#include "shortrate/series.hpp"

using namespace shortrate;

namespace {

const CKLSParams kCIR{0.00315, -0.0555, 0.0894, 0.5};

/// Taylor coefficients of ln P = A(tau) - B(tau) r from the Riccati system
/// B' = 1 + beta B - (s2/2) B^2, A' = -alpha B + (v/2) B^2, where v is a constant
/// variance (Vasicek) and s2 the coefficient of r in the variance (CIR).
struct AffineSeries {
    std::vector<double> A, B;
};

AffineSeries riccati_series(double alpha, double beta, double v, double s2, int J) {
    AffineSeries s;
    s.A.assign(J + 1, 0.0);
    s.B.assign(J + 1, 0.0);
    for (int j = 0; j < J; ++j) {
        double bb = 0.0;
        for (int i = 0; i <= j; ++i) bb += s.B[i] * s.B[j - i];
        s.B[j + 1] = ((j == 0 ? 1.0 : 0.0) + beta * s.B[j] - 0.5 * s2 * bb) / (j + 1);
        s.A[j + 1] = (-alpha * s.B[j] + 0.5 * v * bb) / (j + 1);
    }
    return s;
}

}  // namespace

TEST(Coefficients, FirstIsMinusRate) {
    const ShortRateModel1F models[] = {ShortRateModel1F::vasicek(0.01, -0.1, 0.02), ShortRateModel1F(kCIR),
                                       ShortRateModel1F::dothan(0.005, 0.1),
                                       ShortRateModel1F(BlackKarasinskiParams{1.0, std::log(0.04), 0.85}),
                                       ShortRateModel1F(AitSahaliaDriftParams{0.000693, -0.0347, 0.676, -4.059, 0.8, 1.5})};
    for (const auto& m : models) {
        const auto k = taylor_log_coeffs(m, 3);
        EXPECT_TRUE(k[0].empty());
        ASSERT_EQ(k[1].size(), 1u);
        EXPECT_EQ(k[1].terms()[0].coef, -1.0);
        EXPECT_EQ(k[1].terms()[0].p, 1.0);
        EXPECT_EQ(k[1].terms()[0].q, 0);
    }
}

TEST(Coefficients, MatchRiccatiExpansion) {
    const CKLSParams vas{0.00315, -0.0555, 0.0894, 0.0};
    const auto kv = taylor_log_coeffs(ShortRateModel1F(vas), 6);
    const auto sv = riccati_series(vas.alpha, vas.beta, vas.sigma2(), 0.0, 6);
    const auto kc = taylor_log_coeffs(ShortRateModel1F(kCIR), 6);
    const auto sc = riccati_series(kCIR.alpha, kCIR.beta, 0.0, kCIR.sigma2(), 6);
    for (int j = 1; j <= 6; ++j)
        for (double r : {0.01, 0.05, 0.1}) {
            const double ev = sv.A[j] - sv.B[j] * r, ec = sc.A[j] - sc.B[j] * r;
            EXPECT_NEAR(kv[j](r), ev, 1e-10 * std::abs(ev)) << "vasicek j=" << j << " r=" << r;
            EXPECT_NEAR(kc[j](r), ec, 1e-10 * std::abs(ec)) << "cir j=" << j << " r=" << r;
        }
}

TEST(Coefficients, FifthOrderGapToCWExpansion) {
    const auto k = taylor_log_coeffs(ShortRateModel1F(kCIR), 8);
    const double a = kCIR.alpha, b = kCIR.beta, s2 = kCIR.sigma2();
    auto series = [&](double r, double t) {
        double s = 0.0;
        for (int j = 1; j <= 8; ++j) s += k[j](r) * std::pow(t, j);
        return s;
    };
    for (double r : {0.02, 0.06}) {
        EXPECT_NEAR(series(r, 0.01), cir_log_price(kCIR, r, 0.01), 1e-18);
        const double c5 = -(1.0 / 120.0) * s2 * (a * b + r * (b * b - 4.0 * s2));
        auto gap = [&](double t) { return (cw_price(kCIR, r, t) - series(r, t)) / std::pow(t, 5); };
        const double fit = (8.0 * gap(0.05) - 6.0 * gap(0.1) + gap(0.2)) / 3.0;
        EXPECT_NEAR(fit, c5, 1e-3 * std::abs(c5)) << "r=" << r;
    }
}

TEST(Pricing, VasicekTwelveTerms) {
    const CKLSParams vas{0.00315, -0.0555, 0.0894, 0.0};
    const TaylorPricer tp(ShortRateModel1F(vas), 12);
    for (double r = 0.0; r <= 0.1 + 1e-12; r += 0.01)
        for (double tau = 0.1; tau <= 2.0 + 1e-12; tau += 0.1)
            EXPECT_NEAR(tp(r, tau).price, vasicek_price(vas, r, tau), 1e-12) << "r=" << r << " tau=" << tau;
}

TEST(Pricing, DothanPriceSeries) {
    const auto model = ShortRateModel1F::dothan(0.005, 0.1);
    const auto c = taylor_coeffs(model, 7, SeriesKind::price);
    EXPECT_NEAR(100.0 * taylor_partial_prices(c, 0.035, 1.0, SeriesKind::price)[3], 96.5523, 5e-5);
    const auto p10 = taylor_partial_prices(c, 0.035, 10.0, SeriesKind::price);
    EXPECT_NEAR(100.0 * p10[3], 70.0312, 5e-5);
    EXPECT_NEAR(100.0 * p10[5], 69.9977, 5e-5);
    EXPECT_NEAR(100.0 * p10[7], 69.9982, 5e-5);
}

TEST(Pricing, BlackKarasinskiPriceSeries) {
    const auto c = taylor_coeffs(ShortRateModel1F(BlackKarasinskiParams{0.1, std::log(0.04), 0.85}), 6,
                                 SeriesKind::price);
    const auto p = taylor_partial_prices(c, 0.06, 1.0, SeriesKind::price);
    const double printed[] = {0.940000, 0.932179, 0.932807, 0.933097, 0.933118, 0.933110};
    for (int n = 1; n <= 6; ++n) EXPECT_NEAR(p[n], printed[n - 1], 5e-7) << "order " << n;
}

TEST(Pricing, TruncationErrorDecreasesWithOrder) {
    const TaylorPricer tp(ShortRateModel1F(kCIR), 10);
    for (double r : {0.01, 0.04, 0.1}) {
        const auto res = tp(r, 0.5);
        const double exact = cir_price(kCIR, r, 0.5);
        double prev = std::abs(res.partial[1] - exact);
        for (int j = 2; j <= 10; ++j) {
            const double e = std::abs(res.partial[j] - exact);
            if (prev < 1e-15) break;
            EXPECT_LE(e, prev) << "r=" << r << " J=" << j;
            prev = e;
        }
        EXPECT_EQ(res.stabilization, std::abs(res.partial[10] - res.partial[9]));
    }
}

TEST(Pricing, DomainErrors) {
    const auto as = ShortRateModel1F(AitSahaliaDriftParams{0.000693, -0.0347, 0.676, -4.059, 0.8, 1.5});
    EXPECT_THROW(taylor_price(as, 0.0, 0.5, 3), DomainError);
    EXPECT_NO_THROW(taylor_price(as, 0.05, 0.1, 3));
    const auto bk = ShortRateModel1F(BlackKarasinskiParams{1.0, std::log(0.04), 0.85});
    EXPECT_THROW(taylor_price(bk, -0.01, 0.5, 3), DomainError);
    EXPECT_THROW(TaylorPricer(bk, 0), DomainError);
}

TEST(Basis, ClosedUnderProductAndDerivative) {
    const SeriesInR a{{2.0, 1.5, 1}, {-1.0, -1.0, 0}, {0.5, 0.0, 2}};
    const SeriesInR b{{3.0, 0.5, 0}, {1.0, 2.0, 1}};
    const SeriesInR prod = a * b;
    const SeriesInR da = a.derivative();
    for (double r : {0.02, 0.3, 1.7}) {
        EXPECT_NEAR(prod(r), a(r) * b(r), 1e-12 * std::abs(a(r) * b(r)));
        const double h = 1e-6 * r;
        EXPECT_NEAR(da(r), (a(r + h) - a(r - h)) / (2 * h), 1e-6 * std::abs(da(r)));
    }
    for (const auto& t : prod.terms()) EXPECT_GE(t.q, 0);
    for (const auto& t : da.terms()) EXPECT_GE(t.q, 0);
}

TEST(Basis, MergesEqualKeys) {
    SeriesInR s;
    s.add_term(1.0, 0.5, 1);
    s.add_term(2.0, 0.5, 1);
    s.add_term(1.0, 0.5, 0);
    EXPECT_EQ(s.size(), 2u);
    s.add_term(-3.0, 0.5, 1);
    EXPECT_EQ(s.size(), 1u);
}
