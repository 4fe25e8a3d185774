#pragma once

// Sparse space-time polynomials over the rationals: variables x1..xn and t.

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <map>
#include <numeric>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "caloric/errors.hpp"
#include "caloric/rational.hpp"

namespace caloric {

using LatticePoint = std::vector<std::int64_t>;

/// x1^a1 ... xn^an t^b
struct Monomial {
    std::vector<unsigned> x;
    unsigned t = 0;

    Monomial() = default;
    explicit Monomial(std::size_t n) : x(n, 0) {}
    Monomial(std::vector<unsigned> spatial, unsigned time) : x(std::move(spatial)), t(time) {}

    std::size_t dimension() const noexcept { return x.size(); }
    unsigned spatial_degree() const noexcept { return std::accumulate(x.begin(), x.end(), 0u); }
    unsigned total_degree() const noexcept { return spatial_degree() + t; }
    unsigned parabolic_degree() const noexcept { return spatial_degree() + 2 * t; }
    bool is_constant() const noexcept { return t == 0 && spatial_degree() == 0; }

    friend bool operator==(const Monomial&, const Monomial&) = default;

    friend Monomial operator*(const Monomial& a, const Monomial& b) {
        Monomial r = a;
        for (std::size_t i = 0; i < r.x.size(); ++i) r.x[i] += b.x[i];
        r.t += b.t;
        return r;
    }
};

/// Ascending graded order: parabolic degree, then spatial degree, then x1-dominant lex
/// (so 1 < x1 < x2 < t < x1^2 < x1 x2 < x2^2 for n = 2). Used for matrix column indexing.
struct GradedOrder {
    bool operator()(const Monomial& a, const Monomial& b) const noexcept {
        if (a.parabolic_degree() != b.parabolic_degree()) return a.parabolic_degree() < b.parabolic_degree();
        if (a.spatial_degree() != b.spatial_degree()) return a.spatial_degree() < b.spatial_degree();
        for (std::size_t i = 0; i < a.x.size() && i < b.x.size(); ++i)
            if (a.x[i] != b.x[i]) return a.x[i] > b.x[i];
        return a.x.size() < b.x.size();
    }
};

/// Printing order: highest graded piece first, x1-dominant within a piece.
struct DisplayOrder {
    bool operator()(const Monomial& a, const Monomial& b) const noexcept {
        if (a.parabolic_degree() != b.parabolic_degree()) return a.parabolic_degree() > b.parabolic_degree();
        if (a.spatial_degree() != b.spatial_degree()) return a.spatial_degree() > b.spatial_degree();
        return GradedOrder{}(a, b);
    }
};

struct DegreeInfo {
    int total_degree = -1;
    int parabolic_degree = -1;
};

class SpaceTimePolynomial {
public:
    using Terms = std::map<Monomial, Rational, GradedOrder>;

    explicit SpaceTimePolynomial(std::size_t n = 1) : n_(n) {}

    static SpaceTimePolynomial constant(std::size_t n, const Rational& c) {
        SpaceTimePolynomial p(n);
        p.add_term(Monomial(n), c);
        return p;
    }
    /// x_{index+1}, zero-based index
    static SpaceTimePolynomial variable(std::size_t n, std::size_t index) {
        if (index >= n) throw DimensionMismatch("variable index " + std::to_string(index + 1) + " exceeds n = " + std::to_string(n));
        Monomial m(n);
        m.x[index] = 1;
        return monomial(m);
    }
    static SpaceTimePolynomial time(std::size_t n) { return monomial(Monomial(std::vector<unsigned>(n, 0), 1)); }
    static SpaceTimePolynomial monomial(const Monomial& m, const Rational& c = 1) {
        SpaceTimePolynomial p(m.dimension());
        p.add_term(m, c);
        return p;
    }

    std::size_t dimension() const noexcept { return n_; }
    const Terms& terms() const noexcept { return terms_; }
    bool is_zero() const noexcept { return terms_.empty(); }
    std::size_t size() const noexcept { return terms_.size(); }

    Rational coefficient(const Monomial& m) const {
        auto it = terms_.find(m);
        return it == terms_.end() ? Rational(0) : it->second;
    }

    void add_term(const Monomial& m, const Rational& c) {
        if (m.dimension() != n_) throw DimensionMismatch(n_, m.dimension());
        if (c == 0) return;
        auto [it, inserted] = terms_.try_emplace(m, c);
        if (!inserted) {
            it->second += c;
            if (it->second == 0) terms_.erase(it);
        }
    }

    DegreeInfo degree() const noexcept {
        DegreeInfo d;
        for (const auto& [m, c] : terms_) {
            d.total_degree = std::max(d.total_degree, static_cast<int>(m.total_degree()));
            d.parabolic_degree = std::max(d.parabolic_degree, static_cast<int>(m.parabolic_degree()));
        }
        return d;
    }
    int parabolic_degree() const noexcept { return degree().parabolic_degree; }
    int total_degree() const noexcept { return degree().total_degree; }
    int spatial_degree() const noexcept {
        int d = -1;
        for (const auto& [m, c] : terms_) d = std::max(d, static_cast<int>(m.spatial_degree()));
        return d;
    }
    int time_degree() const noexcept {
        int d = -1;
        for (const auto& [m, c] : terms_) d = std::max(d, static_cast<int>(m.t));
        return d;
    }
    bool is_time_free() const noexcept { return time_degree() <= 0; }

    SpaceTimePolynomial& operator+=(const SpaceTimePolynomial& q) {
        check_same(q);
        for (const auto& [m, c] : q.terms_) add_term(m, c);
        return *this;
    }
    SpaceTimePolynomial& operator-=(const SpaceTimePolynomial& q) {
        check_same(q);
        for (const auto& [m, c] : q.terms_) add_term(m, -c);
        return *this;
    }
    SpaceTimePolynomial& operator*=(const Rational& s) {
        if (s == 0) {
            terms_.clear();
        } else {
            for (auto& [m, c] : terms_) c *= s;
        }
        return *this;
    }

    friend SpaceTimePolynomial operator+(SpaceTimePolynomial p, const SpaceTimePolynomial& q) { return p += q; }
    friend SpaceTimePolynomial operator-(SpaceTimePolynomial p, const SpaceTimePolynomial& q) { return p -= q; }
    friend SpaceTimePolynomial operator-(SpaceTimePolynomial p) { return p *= Rational(-1); }
    friend SpaceTimePolynomial operator*(SpaceTimePolynomial p, const Rational& s) { return p *= s; }
    friend SpaceTimePolynomial operator*(const Rational& s, SpaceTimePolynomial p) { return p *= s; }

    friend SpaceTimePolynomial operator*(const SpaceTimePolynomial& p, const SpaceTimePolynomial& q) {
        p.check_same(q);
        SpaceTimePolynomial r(p.n_);
        for (const auto& [mp, cp] : p.terms_)
            for (const auto& [mq, cq] : q.terms_) r.add_term(mp * mq, cp * cq);
        return r;
    }

    friend bool operator==(const SpaceTimePolynomial& p, const SpaceTimePolynomial& q) {
        return p.n_ == q.n_ && p.terms_ == q.terms_;
    }

    void check_same(const SpaceTimePolynomial& q) const {
        if (q.n_ != n_) throw DimensionMismatch(n_, q.n_);
    }

private:
    std::size_t n_;
    Terms terms_;
};

inline SpaceTimePolynomial add(const SpaceTimePolynomial& p, const SpaceTimePolynomial& q) { return p + q; }
inline SpaceTimePolynomial multiply(const SpaceTimePolynomial& p, const SpaceTimePolynomial& q) { return p * q; }

/// p(x + s, t), by binomial expansion of every (x_i + s_i)^{a_i}.
inline SpaceTimePolynomial shift_substitute(const SpaceTimePolynomial& p, std::span<const std::int64_t> s) {
    const std::size_t n = p.dimension();
    if (s.size() != n) throw DimensionMismatch(n, s.size());
    SpaceTimePolynomial r(n);
    for (const auto& [m, c] : p.terms()) {
        // expansion of each factor: list of (power kept, coefficient)
        std::vector<std::vector<std::pair<unsigned, Rational>>> factors(n);
        for (std::size_t i = 0; i < n; ++i) {
            const unsigned a = m.x[i];
            Integer shift_power = 1;
            std::vector<std::pair<unsigned, Rational>> f;
            for (unsigned j = 0; j <= a; ++j) {
                // term x^{a-j} s^j C(a, j)
                if (s[i] == 0 && j > 0) break;
                f.emplace_back(a - j, Rational(binomial(a, j) * shift_power));
                shift_power *= static_cast<long>(s[i]);
            }
            factors[i] = std::move(f);
        }
        Monomial out(n);
        out.t = m.t;
        auto expand = [&](auto&& self, std::size_t i, const Rational& acc) -> void {
            if (i == n) {
                r.add_term(out, acc);
                return;
            }
            for (const auto& [power, coeff] : factors[i]) {
                out.x[i] = power;
                self(self, i + 1, acc * coeff);
            }
        };
        expand(expand, 0, c);
    }
    return r;
}

/// m-th formal time derivative.
inline SpaceTimePolynomial partial_t(const SpaceTimePolynomial& p, unsigned m = 1) {
    SpaceTimePolynomial r(p.dimension());
    for (const auto& [mono, c] : p.terms()) {
        if (mono.t < m) continue;
        Integer falling = 1;
        for (unsigned j = 0; j < m; ++j) falling *= mono.t - j;
        Monomial d = mono;
        d.t -= m;
        r.add_term(d, c * Rational(falling));
    }
    return r;
}

/// Integral over t in [-T, 0]; the result is t-free.
inline SpaceTimePolynomial integrate_time(const SpaceTimePolynomial& p, Rational span) {
    span.canonicalize();
    if (span <= 0) throw NonPositiveSpan("time span must be positive, got " + span.get_str());
    SpaceTimePolynomial r(p.dimension());
    for (const auto& [mono, c] : p.terms()) {
        // (-1)^b T^{b+1} / (b+1)
        Rational factor = pow(span, mono.t + 1) / Rational(mono.t + 1);
        if (mono.t % 2 == 1) factor = -factor;
        Monomial spatial = mono;
        spatial.t = 0;
        r.add_term(spatial, c * factor);
    }
    return r;
}

inline Rational evaluate(const SpaceTimePolynomial& p, std::span<const std::int64_t> x, const Rational& t) {
    if (x.size() != p.dimension()) throw DimensionMismatch(p.dimension(), x.size());
    Rational sum = 0;
    for (const auto& [m, c] : p.terms()) {
        Integer spatial = 1;
        for (std::size_t i = 0; i < x.size(); ++i) {
            Integer f;
            mpz_pow_ui(f.get_mpz_t(), Integer(static_cast<long>(x[i])).get_mpz_t(), m.x[i]);
            spatial *= f;
        }
        sum += c * Rational(spatial) * pow(t, m.t);
    }
    return sum;
}

/// Substitutes x, leaving a polynomial in t alone (dimension 0).
inline SpaceTimePolynomial restrict_to_point(const SpaceTimePolynomial& p, std::span<const std::int64_t> x) {
    if (x.size() != p.dimension()) throw DimensionMismatch(p.dimension(), x.size());
    SpaceTimePolynomial r(0);
    for (const auto& [m, c] : p.terms()) {
        Integer spatial = 1;
        for (std::size_t i = 0; i < x.size(); ++i) {
            Integer f;
            mpz_pow_ui(f.get_mpz_t(), Integer(static_cast<long>(x[i])).get_mpz_t(), m.x[i]);
            spatial *= f;
        }
        r.add_term(Monomial(std::vector<unsigned>{}, m.t), c * Rational(spatial));
    }
    return r;
}

/// u(., t0): the t-free polynomial obtained by fixing the time.
inline SpaceTimePolynomial substitute_time(const SpaceTimePolynomial& p, const Rational& t0) {
    SpaceTimePolynomial r(p.dimension());
    for (const auto& [m, c] : p.terms()) {
        Monomial spatial = m;
        spatial.t = 0;
        r.add_term(spatial, c * pow(t0, m.t));
    }
    return r;
}

/// Coefficients of p against an ordered monomial list; every term of p must appear in the list.
inline std::vector<Rational> coefficient_vector(const SpaceTimePolynomial& p, std::span<const Monomial> basis) {
    std::map<Monomial, std::size_t, GradedOrder> index;
    for (std::size_t i = 0; i < basis.size(); ++i) index.emplace(basis[i], i);
    std::vector<Rational> v(basis.size());
    for (const auto& [m, c] : p.terms()) {
        auto it = index.find(m);
        if (it == index.end()) throw DimensionMismatch("polynomial term outside the given monomial basis");
        v[it->second] = c;
    }
    return v;
}

inline SpaceTimePolynomial from_coefficients(std::size_t n, std::span<const Monomial> basis, std::span<const Rational> coefficients) {
    if (basis.size() != coefficients.size()) throw DimensionMismatch(basis.size(), coefficients.size());
    SpaceTimePolynomial p(n);
    for (std::size_t i = 0; i < basis.size(); ++i) p.add_term(basis[i], coefficients[i]);
    return p;
}

// ---------------------------------------------------------------------------
// text form

inline std::string format_monomial(const Monomial& m) {
    std::string out;
    auto factor = [&out](const std::string& name, unsigned e) {
        if (e == 0) return;
        if (!out.empty()) out += ' ';
        out += name;
        if (e > 1) out += '^' + std::to_string(e);
    };
    for (std::size_t i = 0; i < m.x.size(); ++i) factor("x" + std::to_string(i + 1), m.x[i]);
    factor("t", m.t);
    return out.empty() ? "1" : out;
}

/// Terms printed from the highest graded piece down, e.g. "3/2 x1^2 t + x2 - 1".
inline std::string format(const SpaceTimePolynomial& p) {
    if (p.is_zero()) return "0";
    std::vector<std::pair<Monomial, Rational>> terms(p.terms().begin(), p.terms().end());
    std::sort(terms.begin(), terms.end(), [](const auto& a, const auto& b) { return DisplayOrder{}(a.first, b.first); });
    std::string out;
    bool first = true;
    for (const auto& [m, c] : terms) {
        const bool negative = c < 0;
        const Rational magnitude = abs(c);
        if (first) {
            if (negative) out += '-';
        } else {
            out += negative ? " - " : " + ";
        }
        first = false;
        if (m.is_constant()) {
            out += magnitude.get_str();
        } else {
            if (magnitude != 1) out += magnitude.get_str() + ' ';
            out += format_monomial(m);
        }
    }
    return out;
}

namespace detail {

class PolynomialParser {
public:
    PolynomialParser(std::string_view text, std::size_t n) : n_(n) {
        // U+2212 minus sign is accepted as '-'
        for (std::size_t i = 0; i < text.size(); ++i) {
            if (text.compare(i, 3, "\xE2\x88\x92") == 0) {
                chars_.push_back('-');
                origin_.push_back(i);
                i += 2;
            } else {
                chars_.push_back(text[i]);
                origin_.push_back(i);
            }
        }
        origin_.push_back(text.size());
    }

    SpaceTimePolynomial parse() {
        SpaceTimePolynomial p(n_);
        skip_ws();
        if (at_end()) throw SyntaxError("empty polynomial", position());
        bool first = true;
        while (!at_end()) {
            int sign = 1;
            if (peek() == '+' || peek() == '-') {
                sign = get() == '-' ? -1 : 1;
                skip_ws();
            } else if (!first) {
                throw SyntaxError(std::string("expected '+' or '-' but found '") + peek() + "'", position());
            }
            auto [m, c] = parse_term();
            p.add_term(m, sign > 0 ? c : Rational(-c));
            first = false;
            skip_ws();
        }
        return p;
    }

private:
    std::pair<Monomial, Rational> parse_term() {
        Monomial m(n_);
        Rational c = 1;
        bool seen = false;
        if (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) {
            c = parse_coefficient();
            seen = true;
            skip_ws();
        }
        while (!at_end() && (peek() == 'x' || peek() == 't' || peek() == '*')) {
            if (peek() == '*') {
                get();
                skip_ws();
                continue;
            }
            const std::size_t start = position();
            char v = get();
            std::size_t index = 0;
            if (v == 'x') {
                skip_ws();
                if (at_end() || !std::isdigit(static_cast<unsigned char>(peek())))
                    throw SyntaxError("expected variable index after 'x'", position());
                index = parse_unsigned();
                if (index == 0) throw SyntaxError("variable indices start at 1", start);
                if (index > n_)
                    throw DimensionMismatch("variable x" + std::to_string(index) + " at position " + std::to_string(start) +
                                            " exceeds declared n = " + std::to_string(n_));
            }
            skip_ws();
            unsigned e = 1;
            if (!at_end() && peek() == '^') {
                get();
                skip_ws();
                if (at_end() || !std::isdigit(static_cast<unsigned char>(peek())))
                    throw SyntaxError("expected exponent after '^'", position());
                e = static_cast<unsigned>(parse_unsigned());
                skip_ws();
            }
            if (v == 'x')
                m.x[index - 1] += e;
            else
                m.t += e;
            seen = true;
        }
        if (!seen) {
            if (at_end()) throw SyntaxError("expected a term", position());
            throw SyntaxError(std::string("unexpected character '") + peek() + "'", position());
        }
        return {m, c};
    }

    Rational parse_coefficient() {
        Integer num(digits());
        skip_ws();
        if (!at_end() && peek() == '/') {
            get();
            skip_ws();
            const std::size_t at = position();
            if (at_end() || !std::isdigit(static_cast<unsigned char>(peek())))
                throw SyntaxError("expected denominator after '/'", at);
            Integer den(digits());
            if (den == 0) throw SyntaxError("zero denominator", at);
            Rational q(num, den);
            q.canonicalize();
            return q;
        }
        return Rational(num);
    }

    std::size_t parse_unsigned() {
        const std::size_t at = position();
        std::string d = digits();
        if (d.size() > 9) throw SyntaxError("integer too large", at);
        return std::stoul(d);
    }

    std::string digits() {
        std::string d;
        while (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) d.push_back(get());
        return d;
    }

    void skip_ws() {
        while (!at_end() && std::isspace(static_cast<unsigned char>(peek()))) ++i_;
    }
    bool at_end() const { return i_ >= chars_.size(); }
    char peek() const { return chars_[i_]; }
    char get() { return chars_[i_++]; }
    std::size_t position() const { return origin_[i_]; }

    std::size_t n_;
    std::string chars_;
    std::vector<std::size_t> origin_;
    std::size_t i_ = 0;
};

}  // namespace detail

/// Grammar: terms joined by '+'/'-'; term := [rational] {var}; var := ("x" index | "t") ["^" exp].
inline SpaceTimePolynomial parse_polynomial(std::string_view text, std::size_t n) {
    return detail::PolynomialParser(text, n).parse();
}

inline std::ostream& operator<<(std::ostream& os, const SpaceTimePolynomial& p) { return os << format(p); }

}  // namespace caloric
