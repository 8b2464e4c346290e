#pragma once

#include <array>
#include <boost/numeric/odeint.hpp>

#include "shortrate/error.hpp"

namespace shortrate::numerics {

struct OdeTolerance {
    double rel = 1e-12;
    double abs = 1e-14;
};

/// Integrates y' = f(t, y) from 0 to t_end with an adaptive Runge-Kutta-Fehlberg 7(8)
/// pair and returns y(t_end).
template <std::size_t N, class Rhs>
std::array<double, N> integrate_ode(Rhs&& rhs, std::array<double, N> y0, double t_end,
                                    OdeTolerance tol = {}) {
    using State = std::array<double, N>;
    namespace odeint = boost::numeric::odeint;
    if (t_end == 0.0) return y0;
    auto system = [&rhs](const State& y, State& dy, double t) { dy = rhs(t, y); };
    auto stepper = odeint::make_controlled(tol.abs, tol.rel, odeint::runge_kutta_fehlberg78<State>());
    const double dt0 = std::min(1e-3, t_end / 16.0);
    odeint::integrate_adaptive(stepper, system, y0, 0.0, t_end, dt0);
    for (double v : y0)
        if (!std::isfinite(v)) throw NumericalError("ODE integration produced a non-finite state");
    return y0;
}

}  // namespace shortrate::numerics
