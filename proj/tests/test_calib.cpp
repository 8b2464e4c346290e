#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "shortrate/calib.hpp"
#include "shortrate/dataset.hpp"

using namespace shortrate;

namespace {

const CKLSParams kCIR{0.00315, -0.0555, 0.0894, 0.5};

std::vector<double> cir_rates(int n, std::uint64_t seed) {
    SimConfig cfg;
    cfg.dt = 1.0 / 252.0;
    cfg.n_steps = n - 1;
    cfg.seed = seed;
    const auto path = simulate_path_1f(ShortRateModel1F(kCIR), 0.05, cfg);
    return path.values[0];
}

YieldDataset subst_panel(const CKLSParams& p, const std::vector<double>& rates, const std::vector<double>& taus) {
    return panel_from_rates(rates, taus, [&](double r, double tau) { return vas_subst_price(p, r, tau); });
}

}  // namespace

TEST(Objective, ZeroAtGeneratingParameters) {
    const auto data = subst_panel(kCIR, cir_rates(60, 3), monthly_maturities());
    EXPECT_LT(objective_F(kCIR, data), 1e-28);
    const auto exact = synthetic_cir_panel(kCIR, 0.05, monthly_maturities(), 60, 3);
    EXPECT_LT(objective_F(kCIR, exact, CalibPricer::exact), 1e-28);
    EXPECT_GT(objective_F(CKLSParams{0.003, -0.05, 0.0894, 0.5}, data), 1e-12);
}

TEST(Objective, DefaultWeightsAreSquaredMaturities) {
    const auto data = subst_panel(kCIR, cir_rates(5, 1), yearly_maturities());
    for (const auto& row : data.weights)
        for (std::size_t j = 0; j < row.size(); ++j) EXPECT_EQ(row[j], data.taus[j] * data.taus[j]);
}

TEST(Linear, RecoversGeneratingParameters) {
    for (double gamma : {0.0, 0.5, 1.0}) {
        const CKLSParams p{0.00315, -0.0555, 0.0894, gamma};
        const auto data = subst_panel(p, cir_rates(120, 4), monthly_maturities());
        const auto s = solve_linear_subproblem(p.beta, gamma, data);
        EXPECT_NEAR(s.alpha, p.alpha, 1e-10 * std::abs(p.alpha)) << "gamma=" << gamma;
        EXPECT_NEAR(s.sigma2, p.sigma2(), 1e-10 * p.sigma2()) << "gamma=" << gamma;
        EXPECT_FALSE(s.sigma2_at_bound);
    }
}

TEST(Linear, MatchesObjectiveAndIsMinimal) {
    const auto data = synthetic_cir_panel(kCIR, 0.05, yearly_maturities(), 80, 9);
    const double beta = -0.06;
    const auto s = solve_linear_subproblem(beta, 0.5, data);
    const CKLSParams opt{s.alpha, beta, std::sqrt(s.sigma2), 0.5};
    EXPECT_NEAR(objective_F(opt, data), s.F, 1e-12 * s.F);
    for (double da : {-1e-6, 1e-6})
        for (double ds : {-1e-6, 0.0, 1e-6}) {
            const CKLSParams q{s.alpha + da, beta, std::sqrt(s.sigma2 + ds), 0.5};
            EXPECT_GE(objective_F(q, data), s.F);
        }
}

TEST(Linear, FlagsNegativeVarianceBoundary) {
    const CKLSParams p{0.00315, -0.0555, 0.0894, 0.0};
    auto data = subst_panel(p, cir_rates(40, 5), monthly_maturities());
    // Add a curvature that a non-negative variance cannot produce.
    for (auto& row : data.yields)
        for (std::size_t j = 0; j < row.size(); ++j) row[j] += 0.01 * data.taus[j] * data.taus[j];
    const auto s = solve_linear_subproblem(p.beta, 0.0, data);
    EXPECT_TRUE(s.sigma2_at_bound);
    EXPECT_EQ(s.sigma2, 0.0);
}

TEST(Linear, SingleMaturityIsSingularForConstantVolatility) {
    const auto data = subst_panel(kCIR, cir_rates(10, 6), {1.0});
    EXPECT_THROW(solve_linear_subproblem(-0.05, 0.0, data), DomainError);
    EXPECT_THROW(solve_linear_subproblem(-0.05, 0.5, data.without_short_rates()), DomainError);
}

TEST(Calibrate, RecoversBetaOnSubstitutionPanel) {
    const auto data = subst_panel(kCIR, cir_rates(252, 22), monthly_maturities());
    const auto res = calibrate_beta_1d(0.5, data);
    EXPECT_NEAR(res.beta, kCIR.beta, 1e-5);
    EXPECT_NEAR(res.alpha, kCIR.alpha, 1e-6);
    EXPECT_NEAR(res.sigma(), kCIR.sigma, 1e-5);
    EXPECT_LT(res.F, 1e-20);
    EXPECT_LE(res.bracket_lo, res.beta);
    EXPECT_GE(res.bracket_hi, res.beta);
}

TEST(Calibrate, InvariantToRowOrder) {
    const auto data = synthetic_cir_panel(kCIR, 0.05, monthly_maturities(), 100, 8);
    auto shuffled = data;
    std::reverse(shuffled.yields.begin(), shuffled.yields.end());
    std::reverse(shuffled.short_rates.begin(), shuffled.short_rates.end());
    std::reverse(shuffled.dates.begin(), shuffled.dates.end());
    const auto a = calibrate_beta_1d(0.5, data), b = calibrate_beta_1d(0.5, shuffled);
    EXPECT_NEAR(a.beta, b.beta, 1e-7);
    EXPECT_NEAR(a.alpha, b.alpha, 1e-9);
    EXPECT_NEAR(a.F, b.F, 1e-6 * a.F);
}

TEST(Calibrate, NoInteriorMinimumIsReported) {
    const auto data = synthetic_cir_panel(kCIR, 0.05, monthly_maturities(), 50, 8);
    BetaBracket far{-5.0, -1.0, 21};
    EXPECT_THROW(calibrate_beta_1d(0.5, data, far), NumericalError);
    EXPECT_THROW(calibrate_beta_1d(0.5, data, BetaBracket{-1.0, 0.5, 21}), DomainError);
}

TEST(GammaScan, ExactCIRPanelSelectsSquareRoot) {
    const auto data = synthetic_cir_panel(kCIR, 0.05, monthly_maturities(), 252, 22);
    const auto scan = gamma_scan(data, {0.0, 0.25, 0.5, 0.75, 1.0});
    ASSERT_TRUE(scan.argmin);
    EXPECT_EQ(scan.entries[*scan.argmin].gamma, 0.5);
    const auto& r = *scan.entries[2].result;
    EXPECT_NEAR(r.alpha, 0.00315, 5e-6);
    EXPECT_NEAR(r.beta, -0.0555, 5e-5);
    EXPECT_NEAR(r.sigma(), 0.0896, 5e-5);
}

TEST(GammaScan, FlatCurveAtVasicek) {
    const CKLSParams p{0.00315, -0.0555, 0.02, 0.0};
    const auto data = subst_panel(p, cir_rates(100, 12), monthly_maturities());
    const auto scan = gamma_scan(data, {0.0, 0.5, 1.0});
    ASSERT_TRUE(scan.argmin);
    EXPECT_EQ(scan.entries[*scan.argmin].gamma, 0.0);
    EXPECT_LT(scan.entries[0].result->F, 1e-20);
}

TEST(Latent, VasicekRecoversRates) {
    const CKLSParams p{0.00315, -0.0555, 0.0894, 0.0};
    const auto rates = cir_rates(120, 31);
    const auto data = subst_panel(p, rates, monthly_maturities()).without_short_rates();
    const auto res = latent_short_rate_vasicek(data, p.beta);
    for (std::size_t i = 0; i < rates.size(); ++i) EXPECT_NEAR(res.rates[i], rates[i], 1e-8);
    EXPECT_NEAR(res.alpha, p.alpha, 1e-8);
    EXPECT_NEAR(res.sigma2, p.sigma2(), 1e-6 * p.sigma2());
    const auto searched = latent_short_rate_vasicek(data);
    EXPECT_NEAR(searched.beta, p.beta, 1e-4);
}

TEST(Latent, CKLSSubstitutionPanelIsConsistent) {
    for (double gamma : {0.0, 0.5}) {
        const CKLSParams p{0.00315, -0.0555, 0.0894, gamma};
        const auto rates = cir_rates(120, 32);
        const auto data = subst_panel(p, rates, monthly_maturities()).without_short_rates();
        const auto res = latent_short_rate_ckls(data, gamma, p.beta);
        for (std::size_t i = 0; i < rates.size(); ++i) EXPECT_NEAR(res.rates[i], rates[i], 1e-8);
        EXPECT_NEAR(res.alpha, p.alpha, 1e-8);
        EXPECT_NEAR(res.sigma2, p.sigma2(), 1e-6 * p.sigma2());
        EXPECT_LT(res.ratio_spread, 1e-6) << "gamma=" << gamma;
    }
}

TEST(Latent, CKLSOnExactCIRPanel) {
    const auto full = synthetic_cir_panel(kCIR, 0.05, monthly_maturities(), 252, 22);
    const auto res = latent_short_rate_ckls(full.without_short_rates(), 0.5);
    EXPECT_NEAR(res.beta, kCIR.beta, 0.05 * std::abs(kCIR.beta));
    EXPECT_NEAR(std::sqrt(res.sigma2), kCIR.sigma, 0.10 * kCIR.sigma);
    for (std::size_t i = 0; i < full.n_days(); ++i) EXPECT_NEAR(res.rates[i], full.short_rates[i], 1e-4);
}

TEST(Latent, RequiresEnoughMaturities) {
    const auto data = subst_panel(kCIR, cir_rates(10, 6), {0.5, 1.0}).without_short_rates();
    EXPECT_THROW(latent_short_rate_ckls(data, 0.5, -0.05), DomainError);
    const auto one = subst_panel(kCIR, cir_rates(10, 6), {1.0}).without_short_rates();
    EXPECT_THROW(latent_short_rate_vasicek(one, -0.05), DomainError);
}

TEST(Dataset, CsvRoundTrip) {
    const auto data = synthetic_cir_panel(kCIR, 0.05, yearly_maturities(), 7, 2);
    std::stringstream ss;
    write_dataset_csv(ss, data);
    const auto back = read_dataset_csv(ss);
    EXPECT_EQ(back.taus, data.taus);
    EXPECT_EQ(back.yields, data.yields);
    EXPECT_EQ(back.weights, data.weights);
    EXPECT_EQ(back.short_rates, data.short_rates);
    EXPECT_EQ(back.dates, data.dates);
}

TEST(Dataset, CsvErrors) {
    auto parse = [](const std::string& s) {
        std::istringstream is(s);
        return read_dataset_csv(is);
    };
    EXPECT_THROW(parse(""), DomainError);
    EXPECT_THROW(parse("date,tau,yield\n1,1.0,abc\n"), DomainError);
    EXPECT_THROW(parse("date,tau,yield\n1,1.0,0.03\n1,2.0,0.04\n2,1.0,0.03\n"), DomainError);
    EXPECT_THROW(parse("date,tau,yield\n1,-1.0,0.03\n"), DomainError);
    const auto ok = parse("date,tau,yield\n1,1.0,0.03\n1,2.0,0.04\n");
    EXPECT_EQ(ok.weights[0][1], 4.0);
    EXPECT_FALSE(ok.has_short_rates());
}
