#pragma once

#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "shortrate/error.hpp"

namespace shortrate::numerics {

struct ScanPoint {
    double x;
    double f;
};

struct MinimizeResult {
    double x = 0.0;
    double f = 0.0;
    std::uintmax_t iterations = 0;
    double lo = 0.0;  // final bracket used by the local search
    double hi = 0.0;
    std::vector<ScanPoint> trace;  // coarse scan that located the bracket
};

/// Minimizes f over the sorted abscissae in `scan`: the best scan point is
/// located first, then Brent's method refines inside its neighbouring cells
/// until the abscissa is known to about 2^-bits relative precision.
template <class F>
MinimizeResult minimize_scanned(F&& f, const std::vector<double>& scan,
                                int bits = std::numeric_limits<double>::digits / 2) {
    detail::require(scan.size() >= 3, "scan needs at least three points");
    auto safe = [&f](double x) {
        const double v = f(x);
        return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
    };
    MinimizeResult res;
    res.trace.reserve(scan.size());
    std::size_t best = 0;
    for (std::size_t i = 0; i < scan.size(); ++i) {
        if (i > 0) detail::require(scan[i] > scan[i - 1], "scan abscissae must be increasing");
        res.trace.push_back({scan[i], safe(scan[i])});
        if (res.trace[i].f < res.trace[best].f) best = i;
    }
    if (!std::isfinite(res.trace[best].f)) throw NumericalError("no finite objective value in the scan bracket");
    res.lo = res.trace[best == 0 ? 0 : best - 1].x;
    res.hi = res.trace[best + 1 == res.trace.size() ? best : best + 1].x;
    std::uintmax_t iters = 200;
    const auto [x, v] = boost::math::tools::brent_find_minima(safe, res.lo, res.hi, bits, iters);
    res.iterations = iters;
    if (v <= res.trace[best].f) {
        res.x = x;
        res.f = v;
    } else {
        res.x = res.trace[best].x;
        res.f = res.trace[best].f;
    }
    return res;
}

/// minimize_scanned over n_scan equally spaced points of [lo, hi].
template <class F>
MinimizeResult minimize_1d(F&& f, double lo, double hi, int n_scan = 41,
                           int bits = std::numeric_limits<double>::digits / 2) {
    detail::require(lo < hi, "minimization bracket must satisfy lo < hi");
    detail::require(n_scan >= 3, "scan needs at least three points");
    std::vector<double> scan(n_scan);
    for (int i = 0; i < n_scan; ++i) scan[i] = lo + (hi - lo) * i / (n_scan - 1);
    return minimize_scanned(f, scan, bits);
}

}  // namespace shortrate::numerics
