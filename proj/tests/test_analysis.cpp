#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "shortrate/analysis.hpp"
#include "shortrate/approx.hpp"
#include "shortrate/closedform.hpp"

using namespace shortrate;

TEST(Eoc, PowerLawGivesExactOrder) {
    const std::vector<double> taus{1.0, 0.75, 0.5, 0.25};
    for (double k : {1.0, 3.0, 5.0, 7.0}) {
        std::vector<double> e;
        for (double t : taus) e.push_back(2.5e-3 * std::pow(t, k));
        const auto o = eoc(e, taus);
        ASSERT_EQ(o.size(), 3u);
        for (const auto& v : o) {
            ASSERT_TRUE(v);
            EXPECT_NEAR(*v, k, 1e-12);
        }
        EXPECT_NEAR(fitted_slope(taus, e), k, 1e-12);
    }
}

TEST(Eoc, UndefinedForZeroError) {
    const auto o = eoc({1e-8, 0.0, 1e-10}, {1.0, 0.5, 0.25});
    EXPECT_FALSE(o[0]);
    EXPECT_FALSE(o[1]);
    EXPECT_THROW(eoc({1.0, 2.0}, {1.0, 1.0}), DomainError);
    EXPECT_THROW(eoc({1.0}, {1.0, 2.0}), DomainError);
}

TEST(Norms, IdenticalFunctionsGiveZero) {
    auto f = [](double r, double tau) { return -r * tau; };
    const auto rep = grid_error_norms(f, f, uniform_grid(0.0, 0.15, 151), {1.0, 0.5});
    for (const auto& row : rep.rows) {
        EXPECT_EQ(row.sup, 0.0);
        EXPECT_EQ(row.l2, 0.0);
        EXPECT_EQ(row.points, 151u);
    }
    for (const auto& v : rep.eoc_sup) EXPECT_FALSE(v);
}

TEST(Norms, DiscreteDefinitions) {
    auto a = [](double r, double) { return r; };
    auto z = [](double, double) { return 0.0; };
    const auto grid = uniform_grid(0.0, 1.0, 11);
    const auto rep = grid_error_norms(a, z, grid, {1.0});
    EXPECT_DOUBLE_EQ(rep.rows[0].sup, 1.0);
    double ss = 0.0;
    for (double r : grid) ss += r * r;
    EXPECT_DOUBLE_EQ(rep.rows[0].l2, std::sqrt(0.1 * ss));
    EXPECT_DOUBLE_EQ(rep.h, 0.1);
}

TEST(Norms, CIRApproximationErrors) {
    const CKLSParams p{0.00315, -0.0555, 0.0894, 0.5};
    const auto rep = grid_error_norms([&](double r, double tau) { return cw_price(p, r, tau); },
                                      [&](double r, double tau) { return cir_log_price(p, r, tau); },
                                      uniform_grid(0.0, 0.15, 1501), {1.0, 0.75, 0.5, 0.25});
    EXPECT_NEAR(rep.rows[3].sup, 2.876e-10, 0.01 * 2.876e-10);
    EXPECT_NEAR(rep.rows[0].l2, 6.345e-8, 0.01 * 6.345e-8);
    for (std::size_t k = 0; k + 1 < rep.rows.size(); ++k) {
        EXPECT_GT(rep.rows[k].sup, rep.rows[k + 1].sup);
        EXPECT_GE(rep.rows[k].sup, rep.rows[k].l2 / std::sqrt(0.15));
    }
}

TEST(Norms, ToleratesFewFailuresOnly) {
    auto exact = [](double, double) { return 0.0; };
    auto rare = [](double r, double) {
        if (r == 0.0) throw DomainError("singular");
        return 0.0;
    };
    const auto rep = grid_error_norms(rare, exact, uniform_grid(0.0, 1.0, 201), {1.0});
    EXPECT_EQ(rep.rows[0].failed, 1u);
    EXPECT_EQ(rep.rows[0].points, 200u);
    auto often = [](double r, double) {
        if (r < 0.05) throw DomainError("singular");
        return 0.0;
    };
    EXPECT_THROW(grid_error_norms(often, exact, uniform_grid(0.0, 1.0, 201), {1.0}), NumericalError);
    EXPECT_THROW(grid_error_norms(exact, exact, std::vector<double>{0.0, 0.1, 0.3}, {1.0}), DomainError);
}

TEST(Norms, CsvHasOneRowPerMaturity) {
    auto f = [](double r, double tau) { return r * tau * tau; };
    auto z = [](double, double) { return 0.0; };
    const auto rep = grid_error_norms(f, z, uniform_grid(0.0, 0.1, 11), {1.0, 0.5});
    std::ostringstream os;
    write_error_report_csv(os, rep);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    EXPECT_EQ(line, "tau,sup,l2,eoc_sup,eoc_l2,points,failed");
    int rows = 0;
    while (std::getline(is, line)) ++rows;
    EXPECT_EQ(rows, 2);
}
