#pragma once

// Finite-difference reference solutions of the bond-pricing PDEs
//   -P_tau + (1/2) sigma(r)^2 P_rr + mu(r) P_r - r P = 0,  P(0, r) = 1
// and its two-factor convergence-model analogue.

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "shortrate/error.hpp"
#include "shortrate/models.hpp"
#include "shortrate/numerics/kernels.hpp"
#include "shortrate/numerics/tridiag.hpp"

namespace shortrate {

struct Grid1D {
    double r_min = 0.0;
    double r_max = 0.5;
    int n_r = 2001;          // nodes including both ends
    double tau_max = 1.0;
    int n_tau = 1000;        // time steps
    int save_every = 1;      // keep every k-th time level
    int rannacher_steps = 2; // leading steps done as two implicit Euler half-steps each

    void validate() const {
        detail::require(n_r >= 16, "grid needs at least 16 rate nodes");
        detail::require(n_tau >= 1, "grid needs at least one time step");
        detail::require(r_max > r_min, "rate range must be non-empty");
        detail::require(tau_max > 0.0, "tau_max must be positive");
        detail::require(save_every >= 1, "save_every must be positive");
        detail::require(rannacher_steps >= 0, "rannacher_steps must be non-negative");
    }
    double h() const { return (r_max - r_min) / (n_r - 1); }
};

struct Grid2D {
    double rd_min = 0.0, rd_max = 0.3;
    double re_min = 0.0, re_max = 0.3;
    int n_rd = 121, n_re = 121;
    double tau_max = 1.0;
    int n_tau = 200;
    int save_every = 1;
    int douglas_steps = 4;  // leading steps done by the Douglas scheme with theta = 1 at half the step
    double theta = 1.0 / 3.0;

    void validate() const {
        detail::require(n_rd >= 16 && n_re >= 16, "grid needs at least 16 nodes per axis");
        detail::require(n_tau >= 1, "grid needs at least one time step");
        detail::require(rd_max > rd_min && re_max > re_min, "rate ranges must be non-empty");
        detail::require(tau_max > 0.0, "tau_max must be positive");
        detail::require(save_every >= 1, "save_every must be positive");
    }
};

/// Discrete price surface. One-factor: P[k][i] at (taus[k], r[i]).
/// Two-factor: P[k][i * re.size() + j] at (taus[k], r[i] = r_d, re[j]).
struct PDESolution {
    std::vector<double> taus;
    std::vector<double> r;
    std::vector<double> re;
    std::vector<std::vector<double>> P;
    std::map<std::string, std::string> meta;

    bool two_factor() const { return !re.empty(); }

    std::size_t tau_index(double tau) const {
        std::size_t best = 0;
        for (std::size_t k = 1; k < taus.size(); ++k)
            if (std::abs(taus[k] - tau) < std::abs(taus[best] - tau)) best = k;
        detail::require(std::abs(taus[best] - tau) <= 1e-9 * std::max(1.0, tau), "tau is not a saved time level");
        return best;
    }

    /// Cubic (four-point Lagrange) interpolation in r at a saved level.
    double at(double tau, double rr) const {
        detail::require(!two_factor(), "one-factor lookup on a two-factor solution");
        return interp1(r, P[tau_index(tau)], rr, 1, 0);
    }

    /// Tensor-product cubic interpolation at a saved level.
    double at(double tau, double rd, double re_) const {
        detail::require(two_factor(), "two-factor lookup on a one-factor solution");
        const auto& S = P[tau_index(tau)];
        const std::size_t ne = re.size();
        const std::size_t i0 = stencil_start(r, rd);
        double v[4];
        for (int a = 0; a < 4; ++a) v[a] = interp1(re, S, re_, 1, (i0 + a) * ne);
        return lagrange4(&r[i0], v, rd);
    }

private:
    static std::size_t stencil_start(const std::vector<double>& x, double xx) {
        detail::require(xx >= x.front() && xx <= x.back(), "interpolation point outside the grid");
        std::size_t i = std::upper_bound(x.begin(), x.end(), xx) - x.begin();
        i = (i == 0) ? 0 : i - 1;
        std::size_t s = (i >= 1) ? i - 1 : 0;
        if (s + 4 > x.size()) s = x.size() - 4;
        return s;
    }
    static double lagrange4(const double* x, const double* y, double xx) {
        double v = 0.0;
        for (int a = 0; a < 4; ++a) {
            double l = 1.0;
            for (int b = 0; b < 4; ++b)
                if (b != a) l *= (xx - x[b]) / (x[a] - x[b]);
            v += l * y[a];
        }
        return v;
    }
    static double interp1(const std::vector<double>& x, const std::vector<double>& y, double xx, std::size_t stride,
                          std::size_t offset) {
        const std::size_t s = stencil_start(x, xx);
        double yy[4];
        for (int a = 0; a < 4; ++a) yy[a] = y[offset + (s + a) * stride];
        return lagrange4(&x[s], yy, xx);
    }
};

inline void write_solution_csv(std::ostream& os, const PDESolution& sol) {
    const auto old = os.precision(17);
    if (!sol.two_factor()) {
        os << "tau,r,P\n";
        for (std::size_t k = 0; k < sol.taus.size(); ++k)
            for (std::size_t i = 0; i < sol.r.size(); ++i) os << sol.taus[k] << ',' << sol.r[i] << ',' << sol.P[k][i] << '\n';
    } else {
        os << "tau,rd,re,P\n";
        const std::size_t ne = sol.re.size();
        for (std::size_t k = 0; k < sol.taus.size(); ++k)
            for (std::size_t i = 0; i < sol.r.size(); ++i)
                for (std::size_t j = 0; j < ne; ++j)
                    os << sol.taus[k] << ',' << sol.r[i] << ',' << sol.re[j] << ',' << sol.P[k][i * ne + j] << '\n';
    }
    os.precision(old);
}

namespace detail {

/// Tridiagonal coefficients of L P_i = a_i P_{i-1} + b_i P_i + c_i P_{i+1} for
/// L = D(x) d2/dx2 + mu(x) d/dx + react(x) on a uniform line. Interior nodes use
/// central differences, switching the convection to upwind where the cell
/// Peclet number |mu| h / D exceeds 2. End nodes drop the diffusion term and use
/// one-sided first differences towards the interior.
struct LineOperator {
    std::vector<double> a, b, c;
    int upwind_nodes = 0;

    template <class Dfn, class Mufn, class Rfn>
    void build(int n, double h, Dfn&& D, Mufn&& mu, Rfn&& react) {
        a.assign(n, 0.0);
        b.assign(n, 0.0);
        c.assign(n, 0.0);
        upwind_nodes = 0;
        const double h2 = h * h;
        for (int i = 1; i + 1 < n; ++i) {
            const double d = D(i), m = mu(i);
            if (std::abs(m) * h > 2.0 * d) {
                ++upwind_nodes;
                a[i] = d / h2 + std::max(-m, 0.0) / h;
                c[i] = d / h2 + std::max(m, 0.0) / h;
                b[i] = -2.0 * d / h2 - std::abs(m) / h + react(i);
            } else {
                a[i] = d / h2 - m / (2.0 * h);
                c[i] = d / h2 + m / (2.0 * h);
                b[i] = -2.0 * d / h2 + react(i);
            }
        }
        const double m0 = mu(0);
        b[0] = -m0 / h + react(0);
        c[0] = m0 / h;
        const double mn = mu(n - 1);
        a[n - 1] = -mn / h;
        b[n - 1] = mn / h + react(n - 1);
    }

    void apply(const double* x, std::size_t stride, double* out, std::size_t ostride) const {
        const std::size_t n = b.size();
        for (std::size_t i = 0; i < n; ++i) {
            double v = b[i] * x[i * stride];
            if (i > 0) v += a[i] * x[(i - 1) * stride];
            if (i + 1 < n) v += c[i] * x[(i + 1) * stride];
            out[i * ostride] = v;
        }
    }

    /// Solves (I - w L) y = rhs in place.
    void solve_shifted(double w, std::vector<double>& rhs, std::vector<double>& lo, std::vector<double>& di,
                       std::vector<double>& up, std::vector<double>& scratch) const {
        const std::size_t n = b.size();
        lo.resize(n);
        di.resize(n);
        up.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            lo[i] = -w * a[i];
            di[i] = 1.0 - w * b[i];
            up[i] = -w * c[i];
        }
        numerics::solve_tridiagonal(lo, di, up, rhs, scratch);
    }
};

inline std::string fmt(double v) {
    std::ostringstream os;
    os.precision(10);
    os << v;
    return os.str();
}

/// Prices must stay non-negative, and below 1 when rates cannot go negative.
inline void check_range(const std::vector<double>& P, double eps, bool capped, const std::string& where) {
    for (double v : P)
        if (!std::isfinite(v) || v < -eps || (capped && v > 1.0 + eps))
            throw NumericalError("PDE solution out of range (" + where + "); refine the grid");
}

}  // namespace detail

/// Crank-Nicolson solve of the one-factor pricing PDE with Rannacher start-up.
inline PDESolution solve_pde_1f(const ShortRateModel1F& model, const Grid1D& grid) {
    grid.validate();
    const bool positive = model.requires_positive_rate();
    if (positive) detail::require(grid.r_min >= 0.0, "grid must start at r >= 0 for this model");
    const int n = grid.n_r;
    const double h = grid.h();
    std::vector<double> r(n);
    for (int i = 0; i < n; ++i) r[i] = grid.r_min + i * h;
    r[n - 1] = grid.r_max;

    std::vector<double> D(n), mu(n);
    for (int i = 0; i < n; ++i) {
        const auto dv = (model.family() == Family::black_karasinski || model.family() == Family::ait_sahalia) &&
                                r[i] == 0.0
                            ? DriftVol{0.0, 0.0}
                            : drift_vol(model, r[i]);
        D[i] = 0.5 * dv.vol * dv.vol;
        mu[i] = dv.drift;
    }
    detail::LineOperator L;
    L.build(
        n, h, [&](int i) { return D[i]; }, [&](int i) { return mu[i]; }, [&](int i) { return -r[i]; });

    PDESolution sol;
    sol.r = r;
    sol.meta["scheme"] = "crank-nicolson";
    sol.meta["rannacher_steps"] = std::to_string(grid.rannacher_steps);
    sol.meta["h"] = detail::fmt(h);
    sol.meta["dtau"] = detail::fmt(grid.tau_max / grid.n_tau);
    sol.meta["upwind_nodes"] = std::to_string(L.upwind_nodes);
    sol.meta["right_boundary"] = "zero second derivative, one-sided drift";
    if (positive && grid.r_min == 0.0 && D[0] == 0.0) {
        // Fichera function at r = 0 for inward normal: mu(0) - (1/2) d/dr sigma^2(r).
        double dsig2 = 0.0;
        if (model.is_ckls()) {
            const auto& p = model.ckls();
            if (p.gamma == 0.5) dsig2 = p.sigma * p.sigma;
            else if (p.gamma < 0.5) dsig2 = std::numeric_limits<double>::infinity();
        }
        const double fichera = mu[0] - 0.5 * dsig2;
        sol.meta["fichera_r0"] = detail::fmt(fichera);
        sol.meta["left_boundary"] = fichera >= 0.0 ? "degenerate, no condition needed (equation imposed)"
                                                   : "degenerate, outflow (equation imposed)";
    } else {
        sol.meta["left_boundary"] = "zero second derivative, one-sided drift";
    }

    std::vector<double> P(n, 1.0), rhs(n), tmp(n), lo, di, up, scratch;
    sol.taus.push_back(0.0);
    sol.P.push_back(P);
    const double dt = grid.tau_max / grid.n_tau;
    auto implicit = [&](double w) {
        rhs = P;
        L.solve_shifted(w, rhs, lo, di, up, scratch);
        P.swap(rhs);
    };
    for (int k = 1; k <= grid.n_tau; ++k) {
        if (k <= grid.rannacher_steps) {
            implicit(0.5 * dt);
            implicit(0.5 * dt);
        } else {
            L.apply(P.data(), 1, tmp.data(), 1);
            for (int i = 0; i < n; ++i) rhs[i] = P[i] + 0.5 * dt * tmp[i];
            L.solve_shifted(0.5 * dt, rhs, lo, di, up, scratch);
            P.swap(rhs);
        }
        if (k % grid.save_every == 0 || k == grid.n_tau) {
            detail::check_range(P, 1e-6, positive, "tau = " + detail::fmt(k * dt));
            sol.taus.push_back(k * dt);
            sol.P.push_back(P);
        }
    }
    return sol;
}

/// Modified Craig-Sneyd ADI for the convergence-model PDE, with the mixed
/// derivative treated explicitly and a few Douglas start-up steps.
inline PDESolution solve_pde_2f(const ConvergenceModel& m, const Grid2D& grid) {
    grid.validate();
    m.validate();
    if (m.gamma_d > 0.0) detail::require(grid.rd_min >= 0.0, "grid must start at rd >= 0 when gamma_d > 0");
    if (m.gamma_e > 0.0) detail::require(grid.re_min >= 0.0, "grid must start at re >= 0 when gamma_e > 0");
    using numerics::rpow;
    const int nd = grid.n_rd, ne = grid.n_re;
    const double hd = (grid.rd_max - grid.rd_min) / (nd - 1);
    const double he = (grid.re_max - grid.re_min) / (ne - 1);
    std::vector<double> rd(nd), re(ne);
    for (int i = 0; i < nd; ++i) rd[i] = grid.rd_min + i * hd;
    for (int j = 0; j < ne; ++j) re[j] = grid.re_min + j * he;
    auto vol_d = [&](double x) { return m.gamma_d == 0.0 ? m.sigma_d : m.sigma_d * rpow(std::max(x, 0.0), m.gamma_d); };
    auto vol_e = [&](double x) { return m.gamma_e == 0.0 ? m.sigma_e : m.sigma_e * rpow(std::max(x, 0.0), m.gamma_e); };

    // Lines along rd (one per re_j) carry the reaction term -rd.
    std::vector<detail::LineOperator> Ld(ne), Le(nd);
    int upwind = 0;
    for (int j = 0; j < ne; ++j) {
        Ld[j].build(
            nd, hd, [&](int i) { return 0.5 * vol_d(rd[i]) * vol_d(rd[i]); },
            [&](int i) { return m.a1 + m.a2 * rd[i] + m.a3 * re[j]; }, [&](int i) { return -rd[i]; });
        upwind += Ld[j].upwind_nodes;
    }
    for (int i = 0; i < nd; ++i) {
        Le[i].build(
            ne, he, [&](int j) { return 0.5 * vol_e(re[j]) * vol_e(re[j]); }, [&](int j) { return m.b1 + m.b2 * re[j]; },
            [&](int) { return 0.0; });
        upwind += Le[i].upwind_nodes;
    }
    std::vector<double> cross(static_cast<std::size_t>(nd) * ne, 0.0);
    if (m.rho != 0.0)
        for (int i = 1; i + 1 < nd; ++i)
            for (int j = 1; j + 1 < ne; ++j) cross[i * ne + j] = m.rho * vol_d(rd[i]) * vol_e(re[j]) / (4.0 * hd * he);

    const std::size_t N = static_cast<std::size_t>(nd) * ne;
    auto F0 = [&](const std::vector<double>& U, std::vector<double>& out) {
        std::fill(out.begin(), out.end(), 0.0);
        if (m.rho == 0.0) return;
        for (int i = 1; i + 1 < nd; ++i)
            for (int j = 1; j + 1 < ne; ++j) {
                const std::size_t k = i * ne + j;
                out[k] = cross[k] * (U[k + ne + 1] - U[k + ne - 1] - U[k - ne + 1] + U[k - ne - 1]);
            }
    };
    auto F1 = [&](const std::vector<double>& U, std::vector<double>& out) {
        for (int j = 0; j < ne; ++j) Ld[j].apply(U.data() + j, ne, out.data() + j, ne);
    };
    auto F2 = [&](const std::vector<double>& U, std::vector<double>& out) {
        for (int i = 0; i < nd; ++i) Le[i].apply(U.data() + i * ne, 1, out.data() + i * ne, 1);
    };
    std::vector<double> line, lo, di, up, scratch;
    // Solves (I - w L1) Y = rhs along rd lines, in place.
    auto solve1 = [&](double w, std::vector<double>& Y) {
        line.resize(nd);
        for (int j = 0; j < ne; ++j) {
            for (int i = 0; i < nd; ++i) line[i] = Y[i * ne + j];
            Ld[j].solve_shifted(w, line, lo, di, up, scratch);
            for (int i = 0; i < nd; ++i) Y[i * ne + j] = line[i];
        }
    };
    auto solve2 = [&](double w, std::vector<double>& Y) {
        line.resize(ne);
        for (int i = 0; i < nd; ++i) {
            std::copy(Y.begin() + i * ne, Y.begin() + (i + 1) * ne, line.begin());
            Le[i].solve_shifted(w, line, lo, di, up, scratch);
            std::copy(line.begin(), line.end(), Y.begin() + i * ne);
        }
    };

    PDESolution sol;
    sol.r = rd;
    sol.re = re;
    sol.meta["scheme"] = "modified craig-sneyd adi";
    sol.meta["theta"] = detail::fmt(grid.theta);
    sol.meta["douglas_steps"] = std::to_string(grid.douglas_steps);
    sol.meta["hd"] = detail::fmt(hd);
    sol.meta["he"] = detail::fmt(he);
    sol.meta["dtau"] = detail::fmt(grid.tau_max / grid.n_tau);
    sol.meta["upwind_nodes"] = std::to_string(upwind);
    sol.meta["cross_term"] = "explicit, zero on boundary nodes";
    if (m.gamma_d > 0.0 && grid.rd_min == 0.0)
        sol.meta["fichera_rd0"] = detail::fmt(m.a1 + m.a3 * grid.re_min - (m.gamma_d == 0.5 ? 0.5 * m.sigma_d * m.sigma_d : 0.0));
    if (m.gamma_e > 0.0 && grid.re_min == 0.0)
        sol.meta["fichera_re0"] = detail::fmt(m.b1 - (m.gamma_e == 0.5 ? 0.5 * m.sigma_e * m.sigma_e : 0.0));

    std::vector<double> U(N, 1.0), f0(N), f1(N), f2(N), Y0(N), Y(N), tmp(N);
    sol.taus.push_back(0.0);
    sol.P.push_back(U);
    const double dt = grid.tau_max / grid.n_tau;

    // Douglas step: Y0 = U + dt F(U); Y_j = Y_{j-1} + th dt (F_j(Y_j) - F_j(U)).
    auto douglas = [&](double h, double th) {
        F0(U, f0);
        F1(U, f1);
        F2(U, f2);
        for (std::size_t k = 0; k < N; ++k) Y[k] = U[k] + h * (f0[k] + f1[k] + f2[k]) - th * h * f1[k];
        solve1(th * h, Y);
        for (std::size_t k = 0; k < N; ++k) Y[k] -= th * h * f2[k];
        solve2(th * h, Y);
        U.swap(Y);
    };
    auto mcs = [&](double h, double th) {
        F0(U, f0);
        F1(U, f1);
        F2(U, f2);
        std::vector<double> f0u = f0, f1u = f1, f2u = f2;
        for (std::size_t k = 0; k < N; ++k) Y0[k] = U[k] + h * (f0u[k] + f1u[k] + f2u[k]);
        // Y1, Y2
        for (std::size_t k = 0; k < N; ++k) Y[k] = Y0[k] - th * h * f1u[k];
        solve1(th * h, Y);
        for (std::size_t k = 0; k < N; ++k) Y[k] -= th * h * f2u[k];
        solve2(th * h, Y);
        // Yhat0 = Y0 + th h (F0(Y2) - F0(U)); Ytilde0 = Yhat0 + (1/2 - th) h (F(Y2) - F(U))
        F0(Y, f0);
        F1(Y, f1);
        F2(Y, f2);
        for (std::size_t k = 0; k < N; ++k)
            tmp[k] = Y0[k] + th * h * (f0[k] - f0u[k]) +
                     (0.5 - th) * h * (f0[k] + f1[k] + f2[k] - f0u[k] - f1u[k] - f2u[k]);
        for (std::size_t k = 0; k < N; ++k) tmp[k] -= th * h * f1u[k];
        solve1(th * h, tmp);
        for (std::size_t k = 0; k < N; ++k) tmp[k] -= th * h * f2u[k];
        solve2(th * h, tmp);
        U.swap(tmp);
    };
    for (int k = 1; k <= grid.n_tau; ++k) {
        if (k <= grid.douglas_steps) {
            douglas(0.5 * dt, 1.0);
            douglas(0.5 * dt, 1.0);
        } else {
            mcs(dt, grid.theta);
        }
        if (k % grid.save_every == 0 || k == grid.n_tau) {
            detail::check_range(U, 1e-6, m.gamma_d > 0.0 && m.gamma_e > 0.0, "tau = " + detail::fmt(k * dt));
            sol.taus.push_back(k * dt);
            sol.P.push_back(U);
        }
    }
    return sol;
}

}  // namespace shortrate
