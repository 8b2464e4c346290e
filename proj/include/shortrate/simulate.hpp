#pragma once

// Euler-Maruyama paths for one- and two-factor short-rate models and a
// Monte-Carlo bond-price estimator.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "shortrate/error.hpp"
#include "shortrate/models.hpp"
#include "shortrate/numerics/kernels.hpp"
#include "shortrate/numerics/rng.hpp"

namespace shortrate {

struct SimConfig {
    double dt = 1.0 / 252.0;
    int n_steps = 252;
    std::uint64_t seed = 1;
    int n_paths = 1;

    void validate() const {
        detail::require(dt > 0.0, "time step must be positive");
        detail::require(n_steps >= 1, "at least one time step is required");
        detail::require(n_paths >= 1, "at least one path is required");
    }
};

/// Sampled path: times plus one value column per named component.
struct Path {
    std::vector<double> times;
    std::vector<std::string> names;
    std::vector<std::vector<double>> values;  // values[c][k]

    const std::vector<double>& column(const std::string& name) const {
        for (std::size_t c = 0; c < names.size(); ++c)
            if (names[c] == name) return values[c];
        throw DomainError("path has no component " + name);
    }
};

/// Writes the path as CSV with header t,<names...>.
inline void write_path_csv(std::ostream& os, const Path& path) {
    os << "t";
    for (const auto& n : path.names) os << ',' << n;
    os << '\n';
    const auto old = os.precision(17);
    for (std::size_t k = 0; k < path.times.size(); ++k) {
        os << path.times[k];
        for (const auto& v : path.values) os << ',' << v[k];
        os << '\n';
    }
    os.precision(old);
}

namespace detail {

/// One Euler step of a one-factor model. The state is r except for
/// Black-Karasinski, which is stepped in x = ln r.
class Stepper1F {
public:
    Stepper1F(const ShortRateModel1F& model, double dt) : model_(model), dt_(dt), sqdt_(std::sqrt(dt)) {}

    double to_state(double r) const {
        if (model_.family() == Family::black_karasinski) {
            require(r > 0.0, "Black-Karasinski needs r > 0");
            return std::log(r);
        }
        require(r >= 0.0 || !model_.requires_positive_rate(), "initial rate outside the model domain");
        return r;
    }
    double rate(double s) const { return model_.family() == Family::black_karasinski ? std::exp(s) : s; }

    double step(double s, double z) const {
        switch (model_.family()) {
            case Family::ckls: {
                const auto& p = model_.ckls();
                if (p.gamma == 0.0) return s + (p.alpha + p.beta * s) * dt_ + p.sigma * sqdt_ * z;
                const double sp = std::max(s, 0.0);
                const double next = sp + (p.alpha + p.beta * sp) * dt_ + p.sigma * numerics::rpow(sp, p.gamma) * sqdt_ * z;
                return std::max(next, 0.0);
            }
            case Family::black_karasinski: {
                const auto& p = model_.black_karasinski();
                return s + p.kappa * (p.theta - s) * dt_ + p.sigma * sqdt_ * z;
            }
            case Family::ait_sahalia: {
                const auto& p = model_.ait_sahalia();
                const double sp = std::max(s, kAitSahaliaFloor);
                const double mu = p.a_m1 / sp + p.a_0 + p.a_1 * sp + p.a_2 * sp * sp;
                const double next = sp + mu * dt_ + p.sigma * numerics::rpow(sp, p.gamma) * sqdt_ * z;
                return std::max(next, kAitSahaliaFloor);
            }
        }
        return s;
    }

    static constexpr double kAitSahaliaFloor = 1e-12;

private:
    ShortRateModel1F model_;
    double dt_;
    double sqdt_;
};

/// Euler step of a CKLS-type factor with truncation at zero when gamma > 0.
inline double ckls_step(double x, double drift_at_xp, double sigma, double gamma, double sqdt_z, double dt) {
    if (gamma == 0.0) return x + drift_at_xp * dt + sigma * sqdt_z;
    const double xp = std::max(x, 0.0);
    return std::max(xp + drift_at_xp * dt + sigma * numerics::rpow(xp, gamma) * sqdt_z, 0.0);
}

inline std::vector<double> time_grid(const SimConfig& cfg) {
    std::vector<double> t(cfg.n_steps + 1);
    for (int k = 0; k <= cfg.n_steps; ++k) t[k] = k * cfg.dt;
    return t;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Paths

/// One path of a one-factor model. For r^gamma volatilities (0 < gamma) the
/// drift and volatility are evaluated at max(r, 0) and negative updates are
/// truncated to 0.
inline Path simulate_path_1f(const ShortRateModel1F& model, double r0, const SimConfig& cfg) {
    cfg.validate();
    const detail::Stepper1F st(model, cfg.dt);
    numerics::NormalStream z(cfg.seed, 0);
    Path path;
    path.times = detail::time_grid(cfg);
    path.names = {"r"};
    path.values.assign(1, std::vector<double>(cfg.n_steps + 1));
    double s = st.to_state(r0);
    path.values[0][0] = r0;
    for (int k = 1; k <= cfg.n_steps; ++k) {
        s = st.step(s, z());
        path.values[0][k] = st.rate(s);
    }
    return path;
}

/// Convergence model path with dw_e = rho dw_d + sqrt(1 - rho^2) dz.
inline Path simulate_path_2f(const ConvergenceModel& m, double rd0, double re0, const SimConfig& cfg) {
    cfg.validate();
    m.validate();
    detail::require((rd0 >= 0.0 || m.gamma_d == 0.0) && (re0 >= 0.0 || m.gamma_e == 0.0),
                    "initial rates outside the model domain");
    numerics::NormalStream z(cfg.seed, 0);
    const double sq = std::sqrt(cfg.dt);
    const double rc = std::sqrt(1.0 - m.rho * m.rho);
    Path path;
    path.times = detail::time_grid(cfg);
    path.names = {"rd", "re"};
    path.values.assign(2, std::vector<double>(cfg.n_steps + 1));
    double rd = rd0, re = re0;
    path.values[0][0] = rd;
    path.values[1][0] = re;
    for (int k = 1; k <= cfg.n_steps; ++k) {
        const double zd = z();
        const double ze = m.rho * zd + rc * z();
        const double rdp = m.gamma_d == 0.0 ? rd : std::max(rd, 0.0);
        const double rep = m.gamma_e == 0.0 ? re : std::max(re, 0.0);
        const double nd = detail::ckls_step(rd, m.a1 + m.a2 * rdp + m.a3 * rep, m.sigma_d, m.gamma_d, sq * zd, cfg.dt);
        const double ne = detail::ckls_step(re, m.b1 + m.b2 * rep, m.sigma_e, m.gamma_e, sq * ze, cfg.dt);
        rd = nd;
        re = ne;
        path.values[0][k] = rd;
        path.values[1][k] = re;
    }
    return path;
}

/// Fong-Vasicek path (r, y) under the dynamics as given; y is truncated at zero.
inline Path simulate_path_2f(const FongVasicekParams& p, double r0, double y0, const SimConfig& cfg) {
    cfg.validate();
    p.validate();
    detail::require(y0 >= 0.0, "initial variance must be non-negative");
    numerics::NormalStream z(cfg.seed, 0);
    const double sq = std::sqrt(cfg.dt);
    const double rc = std::sqrt(1.0 - p.rho * p.rho);
    Path path;
    path.times = detail::time_grid(cfg);
    path.names = {"r", "y"};
    path.values.assign(2, std::vector<double>(cfg.n_steps + 1));
    double r = r0, y = y0;
    path.values[0][0] = r;
    path.values[1][0] = y;
    for (int k = 1; k <= cfg.n_steps; ++k) {
        const double z1 = z();
        const double z2 = p.rho * z1 + rc * z();
        const double yp = std::max(y, 0.0);
        r = r + p.kappa1 * (p.theta1 - r) * cfg.dt + std::sqrt(yp) * sq * z1;
        y = detail::ckls_step(y, p.kappa2 * (p.theta2 - yp), p.v, 0.5, sq * z2, cfg.dt);
        path.values[0][k] = r;
        path.values[1][k] = y;
    }
    return path;
}

/// Independent CIR factors dx_i = kappa_i (theta_i - x_i) dt + sigma_i sqrt(x_i) dw_i
/// and their sum r. Components are named x1, x2, ..., r.
inline Path simulate_path_2f(const MultiCIRParams& p, const std::vector<double>& x0, const SimConfig& cfg) {
    cfg.validate();
    p.validate();
    detail::require(x0.size() == p.factors.size(), "one initial value per factor is required");
    numerics::NormalStream z(cfg.seed, 0);
    const double sq = std::sqrt(cfg.dt);
    const std::size_t nf = p.factors.size();
    Path path;
    path.times = detail::time_grid(cfg);
    for (std::size_t i = 0; i < nf; ++i) path.names.push_back("x" + std::to_string(i + 1));
    path.names.push_back("r");
    path.values.assign(nf + 1, std::vector<double>(cfg.n_steps + 1));
    std::vector<double> x = x0;
    for (std::size_t i = 0; i < nf; ++i) {
        detail::require(x[i] >= 0.0, "CIR factors must start non-negative");
        path.values[i][0] = x[i];
        path.values[nf][0] += x[i];
    }
    for (int k = 1; k <= cfg.n_steps; ++k) {
        double r = 0.0;
        for (std::size_t i = 0; i < nf; ++i) {
            const auto& f = p.factors[i];
            const double xp = std::max(x[i], 0.0);
            x[i] = detail::ckls_step(x[i], f.kappa * (f.theta - xp), f.sigma, 0.5, sq * z(), cfg.dt);
            path.values[i][k] = x[i];
            r += x[i];
        }
        path.values[nf][k] = r;
    }
    return path;
}

// ---------------------------------------------------------------------------
// Monte Carlo

struct MCResult {
    double price = 0.0;
    double standard_error = 0.0;
    int n_paths = 0;
    int n_steps = 0;
};

namespace detail {

constexpr int kMCBlock = 4096;

/// Runs n_paths paths in blocks, each block on its own normal stream, and
/// averages exp(-sum_k r_k dt). `discount` maps (stream, n_steps, dt) to
/// exp(-integral) for one path.
template <class PathDiscount>
MCResult monte_carlo(double tau, const SimConfig& cfg, PathDiscount&& discount) {
    cfg.validate();
    require(tau > 0.0, "maturity must be positive");
    const int n_steps = std::max(1, static_cast<int>(std::ceil(tau / cfg.dt - 1e-9)));
    const double dt = tau / n_steps;
    double sum = 0.0, sum2 = 0.0;
    int done = 0;
    for (std::uint64_t block = 0; done < cfg.n_paths; ++block) {
        numerics::NormalStream z(cfg.seed, block);
        const int count = std::min(kMCBlock, cfg.n_paths - done);
        double bs = 0.0, bs2 = 0.0;
        for (int i = 0; i < count; ++i) {
            const double d = discount(z, n_steps, dt);
            bs += d;
            bs2 += d * d;
        }
        sum += bs;
        sum2 += bs2;
        done += count;
    }
    MCResult res;
    res.n_paths = cfg.n_paths;
    res.n_steps = n_steps;
    res.price = sum / cfg.n_paths;
    if (cfg.n_paths > 1) {
        const double var = std::max(0.0, (sum2 - cfg.n_paths * res.price * res.price) / (cfg.n_paths - 1));
        res.standard_error = std::sqrt(var / cfg.n_paths);
    }
    return res;
}

}  // namespace detail

/// P = E[exp(-integral r dt)] with the integral as a left-endpoint sum over an
/// Euler grid of ceil(tau/dt) equal steps.
inline MCResult mc_bond_price(const ShortRateModel1F& model, double r0, double tau, const SimConfig& cfg) {
    const int n_steps = std::max(1, static_cast<int>(std::ceil(tau / cfg.dt - 1e-9)));
    const detail::Stepper1F st(model, tau / n_steps);
    const double s0 = st.to_state(r0);
    return detail::monte_carlo(tau, cfg, [&](numerics::NormalStream& z, int n, double dt) {
        double s = s0, integral = 0.0;
        for (int k = 0; k < n; ++k) {
            integral += st.rate(s);
            s = st.step(s, z());
        }
        return std::exp(-integral * dt);
    });
}

/// Prices for several maturities from one set of paths. Every maturity must be
/// a whole number of steps of cfg.dt; the longest one reproduces mc_bond_price.
inline std::vector<MCResult> mc_bond_prices(const ShortRateModel1F& model, double r0, const std::vector<double>& taus,
                                            const SimConfig& cfg) {
    cfg.validate();
    detail::require(!taus.empty(), "at least one maturity is required");
    std::vector<int> steps;
    for (double tau : taus) {
        detail::require(tau > 0.0, "maturity must be positive");
        const double k = tau / cfg.dt;
        detail::require(std::abs(k - std::round(k)) <= 1e-9 * k, "maturities must be multiples of the time step");
        steps.push_back(static_cast<int>(std::round(k)));
    }
    const auto longest = std::max_element(steps.begin(), steps.end());
    const int n_max = *longest;
    const double dt = taus[longest - steps.begin()] / n_max;
    const detail::Stepper1F st(model, dt);
    const double s0 = st.to_state(r0);
    std::vector<double> sum(taus.size(), 0.0), sum2(taus.size(), 0.0), at_step(n_max + 1, -1.0);
    int done = 0;
    for (std::uint64_t block = 0; done < cfg.n_paths; ++block) {
        numerics::NormalStream z(cfg.seed, block);
        const int count = std::min(detail::kMCBlock, cfg.n_paths - done);
        std::vector<double> bs(taus.size(), 0.0), bs2(taus.size(), 0.0);
        for (int i = 0; i < count; ++i) {
            double s = s0, integral = 0.0;
            for (int k = 1; k <= n_max; ++k) {
                integral += st.rate(s);
                s = st.step(s, z());
                at_step[k] = integral;
            }
            for (std::size_t j = 0; j < taus.size(); ++j) {
                const double d = std::exp(-at_step[steps[j]] * dt);
                bs[j] += d;
                bs2[j] += d * d;
            }
        }
        for (std::size_t j = 0; j < taus.size(); ++j) {
            sum[j] += bs[j];
            sum2[j] += bs2[j];
        }
        done += count;
    }
    std::vector<MCResult> out(taus.size());
    for (std::size_t j = 0; j < taus.size(); ++j) {
        auto& res = out[j];
        res.n_paths = cfg.n_paths;
        res.n_steps = steps[j];
        res.price = sum[j] / cfg.n_paths;
        if (cfg.n_paths > 1) {
            const double var = std::max(0.0, (sum2[j] - cfg.n_paths * res.price * res.price) / (cfg.n_paths - 1));
            res.standard_error = std::sqrt(var / cfg.n_paths);
        }
    }
    return out;
}

/// Monte-Carlo price for a sum of independent CIR factors; each factor is
/// simulated under its risk-neutral dynamics.
inline MCResult mc_bond_price(const MultiCIRParams& p, const std::vector<double>& x0, double tau,
                              const SimConfig& cfg) {
    p.validate();
    detail::require(x0.size() == p.factors.size(), "one initial value per factor is required");
    std::vector<CKLSParams> q;
    for (const auto& f : p.factors) q.push_back(to_risk_neutral(f));
    return detail::monte_carlo(tau, cfg, [&](numerics::NormalStream& z, int n, double dt) {
        const double sq = std::sqrt(dt);
        std::vector<double> x = x0;
        double integral = 0.0;
        for (int k = 0; k < n; ++k) {
            for (std::size_t i = 0; i < x.size(); ++i) {
                integral += x[i];
                const double xp = std::max(x[i], 0.0);
                x[i] = detail::ckls_step(x[i], q[i].alpha + q[i].beta * xp, q[i].sigma, 0.5, sq * z(), dt);
            }
        }
        return std::exp(-integral * dt);
    });
}

/// Monte-Carlo price of the domestic bond in the convergence model.
inline MCResult mc_bond_price(const ConvergenceModel& m, double rd0, double re0, double tau, const SimConfig& cfg) {
    m.validate();
    const double rc = std::sqrt(1.0 - m.rho * m.rho);
    return detail::monte_carlo(tau, cfg, [&](numerics::NormalStream& z, int n, double dt) {
        const double sq = std::sqrt(dt);
        double rd = rd0, re = re0, integral = 0.0;
        for (int k = 0; k < n; ++k) {
            integral += rd;
            const double zd = z();
            const double ze = m.rho * zd + rc * z();
            const double rdp = m.gamma_d == 0.0 ? rd : std::max(rd, 0.0);
            const double rep = m.gamma_e == 0.0 ? re : std::max(re, 0.0);
            const double nd = detail::ckls_step(rd, m.a1 + m.a2 * rdp + m.a3 * rep, m.sigma_d, m.gamma_d, sq * zd, dt);
            re = detail::ckls_step(re, m.b1 + m.b2 * rep, m.sigma_e, m.gamma_e, sq * ze, dt);
            rd = nd;
        }
        return std::exp(-integral * dt);
    });
}

}  // namespace shortrate
