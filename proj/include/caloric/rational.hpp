#pragma once

#include <gmpxx.h>

#include <cctype>
#include <string>
#include <string_view>

#include "caloric/errors.hpp"

namespace caloric {

/// Exact rational; GMP keeps it canonical (positive denominator, reduced, zero as 0/1).
using Rational = mpq_class;
using Integer = mpz_class;

inline std::string to_string(const Rational& q) { return q.get_str(); }

/// Parses "-3", "7/4" or a decimal literal such as "0.125" or "-2.5e-1", exactly.
inline Rational parse_rational(std::string_view text) {
    std::string s;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
    if (s.empty()) throw SyntaxError("empty number", 0);

    std::size_t pos = 0;
    bool negative = false;
    if (s[pos] == '+' || s[pos] == '-') negative = s[pos++] == '-';

    auto digits = [&](std::size_t start) {
        std::size_t end = start;
        while (end < s.size() && std::isdigit(static_cast<unsigned char>(s[end]))) ++end;
        return end;
    };

    std::size_t int_end = digits(pos);
    Rational value;
    if (int_end < s.size() && s[int_end] == '/') {
        std::size_t den_end = digits(int_end + 1);
        if (int_end == pos || den_end == int_end + 1 || den_end != s.size())
            throw SyntaxError("malformed fraction '" + s + "'", pos);
        Integer num(s.substr(pos, int_end - pos), 10);
        Integer den(s.substr(int_end + 1), 10);
        if (den == 0) throw SyntaxError("zero denominator in '" + s + "'", int_end + 1);
        value = Rational(num, den);
        value.canonicalize();
    } else {
        std::string mantissa = s.substr(pos, int_end - pos);
        std::size_t cursor = int_end;
        long exponent = 0;
        if (cursor < s.size() && s[cursor] == '.') {
            std::size_t frac_end = digits(cursor + 1);
            mantissa += s.substr(cursor + 1, frac_end - cursor - 1);
            exponent -= static_cast<long>(frac_end - cursor - 1);
            cursor = frac_end;
        }
        if (mantissa.empty()) throw SyntaxError("expected a number in '" + s + "'", pos);
        if (cursor < s.size() && (s[cursor] == 'e' || s[cursor] == 'E')) {
            std::size_t exp_start = cursor + 1;
            bool exp_negative = false;
            if (exp_start < s.size() && (s[exp_start] == '+' || s[exp_start] == '-'))
                exp_negative = s[exp_start++] == '-';
            std::size_t exp_end = digits(exp_start);
            if (exp_end == exp_start) throw SyntaxError("malformed exponent in '" + s + "'", cursor);
            long e = std::stol(s.substr(exp_start, exp_end - exp_start));
            exponent += exp_negative ? -e : e;
            cursor = exp_end;
        }
        if (cursor != s.size()) throw SyntaxError("trailing characters in '" + s + "'", cursor);
        Integer num(mantissa, 10);
        Integer scale;
        mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(exponent < 0 ? -exponent : exponent));
        value = exponent < 0 ? Rational(num, scale) : Rational(num * scale);
        value.canonicalize();
    }
    return negative ? Rational(-value) : value;
}

inline Rational pow(const Rational& base, unsigned long e) {
    Rational r;
    mpz_pow_ui(r.get_num_mpz_t(), base.get_num_mpz_t(), e);
    mpz_pow_ui(r.get_den_mpz_t(), base.get_den_mpz_t(), e);
    r.canonicalize();
    return r;
}

inline Integer binomial(unsigned long n, unsigned long k) {
    Integer r;
    mpz_bin_uiui(r.get_mpz_t(), n, k);
    return r;
}

}  // namespace caloric
