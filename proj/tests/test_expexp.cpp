#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "shortrate/expexp.hpp"
#include "shortrate/numerics/quadrature.hpp"
#include "shortrate/series.hpp"

using namespace shortrate;

namespace {

const BlackKarasinskiParams kBK{0.1, std::log(0.04), 0.85};
const double kX0 = std::log(0.06);

TransformedModel free_model(double sigma, double rate) {
    TransformedModel m;
    m.sigma = sigma;
    m.rate_const = rate;
    return m;
}

}  // namespace

TEST(Coefficients, FreeKernelHasNoCorrections) {
    const auto m = free_model(0.3, 0.0);
    for (double x : {-1.0, -0.2, 0.0, 0.5}) {
        const auto w = ee_coeffs(m, x, 0.1, 6);
        for (double v : w) EXPECT_NEAR(v, 0.0, 1e-12);
    }
}

TEST(ArrowDebreu, FreeKernelIsGaussian) {
    const auto m = free_model(0.3, 0.0);
    const double t = 0.4, x0 = 0.1, s = 0.3 * std::sqrt(t);
    for (double x : {-0.5, 0.0, 0.1, 0.3, 0.9}) {
        const double g = std::exp(-0.5 * (x - x0) * (x - x0) / (s * s)) / (s * std::sqrt(2.0 * std::numbers::pi));
        EXPECT_NEAR(arrow_debreu(m, x, t, x0, 4), g, 1e-12 * g);
    }
    auto psi = [&](double x) { return arrow_debreu(m, x, t, x0, 4); };
    EXPECT_NEAR(numerics::integrate_adaptive(psi, x0 - 12 * s, x0 + 12 * s), 1.0, 1e-12);
    EXPECT_GE(numerics::integrate_adaptive(psi, x0 - 5 * s, x0 + 5 * s), 0.999999);
}

TEST(ArrowDebreu, ConstantRateDiscounts) {
    const double c = 0.05;
    const auto m = free_model(0.3, c);
    for (int N : {1, 3, 6})
        for (double t : {0.5, 2.0}) EXPECT_NEAR(ee_bond_price(m, 0.0, t, N), std::exp(-c * t), 1e-10);
}

TEST(ArrowDebreu, PositiveDensity) {
    const auto m = TransformedModel::black_karasinski(kBK);
    for (double x = kX0 - 2.0; x <= kX0 + 2.0; x += 0.25) EXPECT_GT(arrow_debreu(m, x, 0.5, kX0, 6), 0.0);
}

TEST(BondPrice, BlackKarasinskiOrdersAtHalfYear) {
    const auto m = TransformedModel::black_karasinski(kBK);
    const double printed[] = {0.969249, 0.968138, 0.968140, 0.968142, 0.968142, 0.968142};
    for (int n = 1; n <= 6; ++n) EXPECT_NEAR(ee_bond_price(m, kX0, 0.5, n), printed[n - 1], 5e-7) << "order " << n;
    EXPECT_NEAR(ee_bond_price(m, kX0, 1.0, 6), 0.933106, 5e-7);
}

TEST(BondPrice, OrderMonotonicityAgainstFineConvolution) {
    const auto m = TransformedModel::black_karasinski(kBK);
    for (double tau : {0.5, 1.0}) {
        const double oracle = ee_bond_price_convolution(m, kX0, tau, 6, 0.1);
        double prev = 1.0;
        for (int n = 1; n <= 6; ++n) {
            const double e = std::abs(ee_bond_price(m, kX0, tau, n) - oracle);
            EXPECT_LE(e, prev + 1e-9) << "tau=" << tau << " order " << n;
            prev = e;
        }
    }
}

TEST(BondPrice, AgreesWithTaylorSeries) {
    const auto m = TransformedModel::black_karasinski(kBK);
    const auto c = taylor_coeffs(ShortRateModel1F(kBK), 6, SeriesKind::price);
    const double taylor = taylor_partial_prices(c, 0.06, 1.0, SeriesKind::price)[6];
    EXPECT_LT(std::abs(ee_bond_price(m, kX0, 1.0, 6) - taylor), 5e-5);
}

TEST(BondPrice, SmallVolatilityApproachesDeterministicPath) {
    const BlackKarasinskiParams p{0.1, std::log(0.04), 1e-4};
    const auto m = TransformedModel::black_karasinski(p);
    for (double tau : {0.5, 1.0}) {
        auto r_path = [&](double t) { return std::exp(p.theta + (kX0 - p.theta) * std::exp(-p.kappa * t)); };
        const double det = std::exp(-numerics::integrate_adaptive(r_path, 0.0, tau));
        EXPECT_NEAR(ee_bond_price(m, kX0, tau, 8), det, 1e-6) << "tau=" << tau;
    }
    EXPECT_NEAR(ee_bond_price(m, kX0, 0.5, 6), std::exp(-numerics::integrate_adaptive(
        [&](double t) { return std::exp(p.theta + (kX0 - p.theta) * std::exp(-p.kappa * t)); }, 0.0, 0.5)), 1e-6);
}

TEST(BondPrice, RejectsInvalidArguments) {
    const auto m = TransformedModel::black_karasinski(kBK);
    EXPECT_THROW(ee_bond_price(m, kX0, 0.0, 3), DomainError);
    EXPECT_THROW(ee_bond_price(m, kX0, 1.0, 9), DomainError);
    EXPECT_THROW(ee_bond_price_convolution(m, kX0, 1.0, 6, 0.0), DomainError);
    EXPECT_THROW(ee_coeffs(m, kX0, kX0, 9), DomainError);
}

TEST(Convolution, LongMaturities) {
    const auto m = TransformedModel::black_karasinski(kBK);
    EXPECT_NEAR(ee_bond_price_convolution(m, kX0, 10.0, 6, 1.0), 0.46229, 5e-6);
    const double printed[] = {0.26812, 0.26827, 0.26831};
    const double steps[] = {5.0, 2.5, 1.0};
    for (int k = 0; k < 3; ++k)
        EXPECT_NEAR(ee_bond_price_convolution(m, kX0, 20.0, 6, steps[k]), printed[k], 5e-6) << "step " << steps[k];
}

TEST(Convolution, SingleSliceIsDirectIntegration) {
    const auto m = TransformedModel::black_karasinski(kBK);
    for (double tau : {0.5, 1.0, 3.0})
        EXPECT_NEAR(ee_bond_price_convolution(m, kX0, tau, 6, tau), ee_bond_price(m, kX0, tau, 6), 1e-8);
}

TEST(Convolution, RefinementDifferencesShrink) {
    const auto m = TransformedModel::black_karasinski(kBK);
    const double p5 = ee_bond_price_convolution(m, kX0, 10.0, 6, 5.0);
    const double p25 = ee_bond_price_convolution(m, kX0, 10.0, 6, 2.5);
    const double p125 = ee_bond_price_convolution(m, kX0, 10.0, 6, 1.25);
    EXPECT_LT(std::abs(p25 - p125), std::abs(p5 - p25));
}

TEST(Convolution, ShortenedLastSlice) {
    const auto m = TransformedModel::black_karasinski(kBK);
    const double a = ee_bond_price_convolution(m, kX0, 2.5, 6, 1.0);
    const double b = ee_bond_price_convolution(m, kX0, 2.5, 6, 0.5);
    EXPECT_NEAR(a, b, 1e-5);
}
