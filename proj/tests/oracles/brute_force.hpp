#pragma once

// Test-only oracles. They use plain GMP rationals and pointwise evaluation, never the
// library's polynomial, linear-algebra or lattice code, so they stay an independent route.

#include <gmpxx.h>

#include <cstdint>
#include <utility>
#include <vector>

namespace oracle {

using Q = mpq_class;
using Point = std::vector<long>;

/// Exponent tuple (a_1..a_n, b).
struct Exponent {
    std::vector<unsigned> a;
    unsigned b = 0;
};

inline std::vector<Exponent> enumerate_exponents(std::size_t n, int k, bool parabolic) {
    std::vector<Exponent> out;
    if (k < 0) return out;
    Exponent e{std::vector<unsigned>(n, 0), 0};
    auto rec = [&](auto&& self, std::size_t i, int budget) -> void {
        if (i == n) {
            out.push_back(e);
            return;
        }
        for (int v = 0; v <= budget; ++v) {
            e.a[i] = static_cast<unsigned>(v);
            self(self, i + 1, budget - v);
        }
        e.a[i] = 0;
    };
    for (int b = 0; 2 * b <= (parabolic ? k : 0); ++b) {
        e.b = static_cast<unsigned>(b);
        rec(rec, 0, k - 2 * b);
    }
    return out;
}

inline Q power(const Q& base, unsigned e) {
    Q r = 1;
    for (unsigned i = 0; i < e; ++i) r *= base;
    return r;
}

inline Q monomial_value(const Exponent& e, const Point& x, const Q& t) {
    Q v = power(t, e.b);
    for (std::size_t i = 0; i < x.size(); ++i) v *= power(Q(x[i]), e.a[i]);
    return v;
}

/// (Delta - d/dt) x^a t^b at (x, t), straight from the definition (1/|S|) sum_s (f(x+s) - f(x)).
inline Q heat_of_monomial(const Exponent& e, const std::vector<Point>& gens, const Point& x, const Q& t, bool with_time) {
    Q lap = 0;
    const Q here = monomial_value(e, x, t);
    for (const auto& s : gens) {
        Point y(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] + s[i];
        lap += monomial_value(e, y, t) - here;
    }
    lap /= static_cast<long>(gens.size());
    if (with_time && e.b > 0) {
        Exponent d = e;
        d.b -= 1;
        lap -= Q(e.b) * monomial_value(d, x, t);
    }
    return lap;
}

/// Rank by plain Gaussian elimination over Q.
inline std::size_t rank(std::vector<std::vector<Q>> rows) {
    std::size_t r = 0;
    const std::size_t cols = rows.empty() ? 0 : rows[0].size();
    for (std::size_t c = 0; c < cols && r < rows.size(); ++c) {
        std::size_t p = r;
        while (p < rows.size() && rows[p][c] == 0) ++p;
        if (p == rows.size()) continue;
        std::swap(rows[r], rows[p]);
        for (std::size_t i = r + 1; i < rows.size(); ++i) {
            if (rows[i][c] == 0) continue;
            const Q f = rows[i][c] / rows[r][c];
            for (std::size_t j = c; j < cols; ++j) rows[i][j] -= f * rows[r][j];
        }
        ++r;
    }
    return r;
}

/// Dimension of {p in P^k or P-hat^k : (Delta - d/dt) p = 0} on (Z^n, gens), computed by
/// imposing the equation at the grid {0..k-2}^n x {0..(k-2)/2}, which is unisolvent for the
/// image space, and counting the nullity of the point-evaluation system.
inline std::size_t kernel_dimension(std::size_t n, int k, const std::vector<Point>& gens, bool caloric) {
    const auto columns = enumerate_exponents(n, k, caloric);
    if (k < 2) return columns.size();
    const long xs = k - 2, ts = caloric ? (k - 2) / 2 : 0;
    std::vector<std::vector<Q>> rows;
    Point x(n, 0);
    while (true) {
        for (long t = 0; t <= ts; ++t) {
            std::vector<Q> row;
            for (const auto& e : columns) row.push_back(heat_of_monomial(e, gens, x, Q(-t), caloric));
            rows.push_back(std::move(row));
        }
        std::size_t i = 0;
        while (i < n && x[i] == xs) x[i++] = 0;
        if (i == n) break;
        ++x[i];
    }
    return columns.size() - rank(std::move(rows));
}

inline std::vector<Point> standard_generators(std::size_t n) {
    std::vector<Point> g;
    for (std::size_t i = 0; i < n; ++i) {
        Point e(n, 0);
        e[i] = 1;
        g.push_back(e);
        e[i] = -1;
        g.push_back(e);
    }
    return g;
}

// ---------------------------------------------------------------------------
// one-dimensional cylinder integrals by vertex enumeration

/// Polynomial in t, coefficient of t^j at index j.
using TimePoly = std::vector<Q>;

inline TimePoly mul(const TimePoly& a, const TimePoly& b) {
    if (a.empty() || b.empty()) return {};
    TimePoly r(a.size() + b.size() - 1, Q(0));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    return r;
}

inline TimePoly sub(TimePoly a, const TimePoly& b) {
    if (a.size() < b.size()) a.resize(b.size(), Q(0));
    for (std::size_t i = 0; i < b.size(); ++i) a[i] -= b[i];
    return a;
}

inline TimePoly derivative(const TimePoly& a) {
    TimePoly r;
    for (std::size_t j = 1; j < a.size(); ++j) r.push_back(a[j] * static_cast<long>(j));
    return r;
}

/// int_{-T}^0 p(t) dt
inline Q integrate(const TimePoly& p, const Q& span) {
    Q total = 0;
    for (std::size_t j = 0; j < p.size(); ++j) {
        Q term = power(span, static_cast<unsigned>(j + 1)) / static_cast<long>(j + 1);
        total += (j % 2 == 1) ? Q(-term * p[j]) : Q(term * p[j]);
    }
    return total;
}

/// u(x, t) = sum c[a][b] x^a t^b on Z with S = {+1, -1}, mu = 2 at every vertex.
struct LineField {
    std::vector<std::vector<Q>> c;

    TimePoly at(long x) const {
        TimePoly r;
        for (std::size_t a = 0; a < c.size(); ++a)
            for (std::size_t b = 0; b < c[a].size(); ++b) {
                if (r.size() <= b) r.resize(b + 1, Q(0));
                r[b] += c[a][b] * power(Q(x), static_cast<unsigned>(a));
            }
        return r;
    }
};

struct CylinderTerms {
    Q gradient_term, time_term, denominator;
};

/// R^2 int Gamma(u), R^4 int u_t^2 over Q_R and int u^2 over Q_{dilation R}, centred at 0.
inline CylinderTerms line_caccioppoli(const LineField& u, long radius, long dilation) {
    const Q mu = 2;
    const Q span = Q(radius * radius);
    CylinderTerms out;
    Q gradient = 0, time = 0;
    for (long x = -radius; x <= radius; ++x) {
        const TimePoly here = u.at(x);
        TimePoly gam;
        for (long s : {1L, -1L}) {
            const TimePoly d = sub(u.at(x + s), here);
            gam = sub(gam, mul(d, d));  // accumulates -(sum of squares)
        }
        // Gamma = 1/2 * sum_s (w/mu) d^2 = (1/4) sum_s d^2
        gradient += -integrate(gam, span) / 4 * mu;
        const TimePoly ut = derivative(here);
        time += integrate(mul(ut, ut), span) * mu;
    }
    out.gradient_term = span * gradient;
    out.time_term = span * span * time;
    const long big = dilation * radius;
    const Q big_span = Q(big * big);
    Q mass = 0;
    for (long x = -big; x <= big; ++x) {
        const TimePoly here = u.at(x);
        mass += integrate(mul(here, here), big_span) * mu;
    }
    out.denominator = mass;
    return out;
}

}  // namespace oracle
