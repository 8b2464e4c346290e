#pragma once

// Finite sums of monomials c r^p (ln r)^q (one variable) and c r_d^p r_e^s
// (two variables). Both are closed under addition, multiplication and
// differentiation, which is all the series recursions and error coefficients need.

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <limits>
#include <ostream>
#include <vector>

#include "shortrate/error.hpp"
#include "shortrate/numerics/kernels.hpp"

namespace shortrate {

namespace detail {
constexpr double kExponentTol = 1e-12;
constexpr double kPruneTol = 1e-300;

inline bool same_exponent(double a, double b) { return std::abs(a - b) <= kExponentTol * (1.0 + std::abs(a)); }
}  // namespace detail

struct SeriesTerm {
    double coef;
    double p;  // power of r
    int q;     // power of ln r
};

class SeriesInR {
public:
    SeriesInR() = default;
    SeriesInR(std::initializer_list<SeriesTerm> terms) {
        for (const auto& t : terms) add_term(t.coef, t.p, t.q);
    }

    static SeriesInR constant(double c) { return monomial(c, 0.0, 0); }
    static SeriesInR monomial(double c, double p, int q = 0) {
        SeriesInR s;
        s.add_term(c, p, q);
        return s;
    }

    const std::vector<SeriesTerm>& terms() const { return terms_; }
    bool empty() const { return terms_.empty(); }
    std::size_t size() const { return terms_.size(); }

    /// Adds c r^p (ln r)^q, merging with an existing term of the same key.
    void add_term(double c, double p, int q) {
        detail::require(q >= 0, "log power must be non-negative");
        if (c == 0.0 || std::abs(c) < detail::kPruneTol) return;
        auto it = std::lower_bound(terms_.begin(), terms_.end(), p, [q](const SeriesTerm& t, double pp) {
            if (detail::same_exponent(t.p, pp)) return t.q < q;
            return t.p < pp;
        });
        if (it != terms_.end() && it->q == q && detail::same_exponent(it->p, p)) {
            it->coef += c;
            if (it->coef == 0.0 || std::abs(it->coef) < detail::kPruneTol) terms_.erase(it);
            return;
        }
        terms_.insert(it, SeriesTerm{c, p, q});
    }

    SeriesInR& operator+=(const SeriesInR& o) {
        for (const auto& t : o.terms_) add_term(t.coef, t.p, t.q);
        return *this;
    }
    SeriesInR& operator-=(const SeriesInR& o) {
        for (const auto& t : o.terms_) add_term(-t.coef, t.p, t.q);
        return *this;
    }
    SeriesInR& operator*=(double c) {
        if (c == 0.0) {
            terms_.clear();
            return *this;
        }
        for (auto& t : terms_) t.coef *= c;
        return *this;
    }

    friend SeriesInR operator+(SeriesInR a, const SeriesInR& b) { return a += b; }
    friend SeriesInR operator-(SeriesInR a, const SeriesInR& b) { return a -= b; }
    friend SeriesInR operator*(SeriesInR a, double c) { return a *= c; }
    friend SeriesInR operator*(double c, SeriesInR a) { return a *= c; }

    friend SeriesInR operator*(const SeriesInR& a, const SeriesInR& b) {
        SeriesInR out;
        for (const auto& x : a.terms_)
            for (const auto& y : b.terms_) out.add_term(x.coef * y.coef, x.p + y.p, x.q + y.q);
        return out;
    }

    /// d/dr of c r^p (ln r)^q = c p r^(p-1) (ln r)^q + c q r^(p-1) (ln r)^(q-1).
    SeriesInR derivative() const {
        SeriesInR out;
        for (const auto& t : terms_) {
            if (t.p != 0.0) out.add_term(t.coef * t.p, t.p - 1.0, t.q);
            if (t.q > 0) out.add_term(t.coef * t.q, t.p - 1.0, t.q - 1);
        }
        return out;
    }

    /// True when evaluation at r = 0 is finite (every term has p > 0 or is a constant).
    bool finite_at_zero() const {
        return std::all_of(terms_.begin(), terms_.end(),
                           [](const SeriesTerm& t) { return t.p > 0.0 || (t.p == 0.0 && t.q == 0); });
    }

    bool has_log_terms() const {
        return std::any_of(terms_.begin(), terms_.end(), [](const SeriesTerm& t) { return t.q > 0; });
    }

    double operator()(double r) const {
        if (r < 0.0) {
            double v = 0.0;
            for (const auto& t : terms_) {
                detail::require(t.q == 0 && t.p == std::round(t.p), "series with non-integer powers at a negative rate");
                v += t.coef * numerics::ipow(r, static_cast<int>(t.p));
            }
            return v;
        }
        if (r == 0.0) {
            double v = 0.0;
            for (const auto& t : terms_) {
                if (t.p > 0.0) continue;
                detail::require(t.p == 0.0 && t.q == 0, "series term singular at r = 0");
                v += t.coef;
            }
            return v;
        }
        const double lr = std::log(r);
        double v = 0.0;
        for (const auto& t : terms_) v += t.coef * numerics::rpow(r, t.p) * numerics::ipow(lr, t.q);
        return v;
    }

    friend std::ostream& operator<<(std::ostream& os, const SeriesInR& s) {
        if (s.terms_.empty()) return os << "0";
        bool first = true;
        for (const auto& t : s.terms_) {
            if (!first) os << " + ";
            first = false;
            os << t.coef;
            if (t.p != 0.0) os << "*r^" << t.p;
            if (t.q != 0) os << "*ln(r)^" << t.q;
        }
        return os;
    }

private:
    std::vector<SeriesTerm> terms_;  // sorted by (p, q)
};

struct PowerTerm2 {
    double coef;
    double pd;  // power of r_d
    double pe;  // power of r_e
};

/// Finite sum of c r_d^pd r_e^pe.
class PowerSum2 {
public:
    PowerSum2() = default;
    PowerSum2(std::initializer_list<PowerTerm2> terms) {
        for (const auto& t : terms) add_term(t.coef, t.pd, t.pe);
    }

    const std::vector<PowerTerm2>& terms() const { return terms_; }
    bool empty() const { return terms_.empty(); }

    void add_term(double c, double pd, double pe) {
        if (c == 0.0 || std::abs(c) < detail::kPruneTol) return;
        for (auto it = terms_.begin(); it != terms_.end(); ++it) {
            if (detail::same_exponent(it->pd, pd) && detail::same_exponent(it->pe, pe)) {
                it->coef += c;
                if (it->coef == 0.0 || std::abs(it->coef) < detail::kPruneTol) terms_.erase(it);
                return;
            }
        }
        terms_.push_back({c, pd, pe});
    }

    PowerSum2& operator+=(const PowerSum2& o) {
        for (const auto& t : o.terms_) add_term(t.coef, t.pd, t.pe);
        return *this;
    }
    PowerSum2& operator-=(const PowerSum2& o) {
        for (const auto& t : o.terms_) add_term(-t.coef, t.pd, t.pe);
        return *this;
    }
    PowerSum2& operator*=(double c) {
        if (c == 0.0) {
            terms_.clear();
            return *this;
        }
        for (auto& t : terms_) t.coef *= c;
        return *this;
    }
    friend PowerSum2 operator+(PowerSum2 a, const PowerSum2& b) { return a += b; }
    friend PowerSum2 operator-(PowerSum2 a, const PowerSum2& b) { return a -= b; }
    friend PowerSum2 operator*(PowerSum2 a, double c) { return a *= c; }
    friend PowerSum2 operator*(double c, PowerSum2 a) { return a *= c; }
    friend PowerSum2 operator*(const PowerSum2& a, const PowerSum2& b) {
        PowerSum2 out;
        for (const auto& x : a.terms_)
            for (const auto& y : b.terms_) out.add_term(x.coef * y.coef, x.pd + y.pd, x.pe + y.pe);
        return out;
    }

    PowerSum2 d_rd() const {
        PowerSum2 out;
        for (const auto& t : terms_)
            if (t.pd != 0.0) out.add_term(t.coef * t.pd, t.pd - 1.0, t.pe);
        return out;
    }
    PowerSum2 d_re() const {
        PowerSum2 out;
        for (const auto& t : terms_)
            if (t.pe != 0.0) out.add_term(t.coef * t.pe, t.pd, t.pe - 1.0);
        return out;
    }

    double operator()(double rd, double re) const {
        double v = 0.0;
        for (const auto& t : terms_) {
            const double fd = (t.pd == 0.0) ? 1.0 : numerics::rpow(rd, t.pd);
            const double fe = (t.pe == 0.0) ? 1.0 : numerics::rpow(re, t.pe);
            v += t.coef * fd * fe;
        }
        return v;
    }

private:
    std::vector<PowerTerm2> terms_;
};

}  // namespace shortrate
