#pragma once

// Dense exact linear algebra over the rationals.

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "caloric/errors.hpp"
#include "caloric/rational.hpp"

namespace caloric {

using RationalVector = std::vector<Rational>;

class RationalMatrix {
public:
    RationalMatrix() = default;
    RationalMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), entries_(rows * cols) {}
    RationalMatrix(std::initializer_list<std::initializer_list<Rational>> rows) {
        rows_ = rows.size();
        cols_ = rows_ ? rows.begin()->size() : 0;
        entries_.reserve(rows_ * cols_);
        for (const auto& r : rows) {
            if (r.size() != cols_) throw DimensionMismatch(cols_, r.size());
            entries_.insert(entries_.end(), r.begin(), r.end());
        }
    }

    static RationalMatrix identity(std::size_t n) {
        RationalMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
        return m;
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    Rational& operator()(std::size_t r, std::size_t c) { return entries_[r * cols_ + c]; }
    const Rational& operator()(std::size_t r, std::size_t c) const { return entries_[r * cols_ + c]; }

    std::span<const Rational> row(std::size_t r) const { return {entries_.data() + r * cols_, cols_}; }

    RationalVector operator*(std::span<const Rational> v) const {
        if (v.size() != cols_) throw DimensionMismatch(cols_, v.size());
        RationalVector out(rows_);
        for (std::size_t r = 0; r < rows_; ++r)
            for (std::size_t c = 0; c < cols_; ++c)
                if (sgn((*this)(r, c)) != 0 && sgn(v[c]) != 0) out[r] += (*this)(r, c) * v[c];
        return out;
    }

    friend bool operator==(const RationalMatrix&, const RationalMatrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Rational> entries_;
};

struct RrefResult {
    RationalMatrix reduced;
    std::size_t rank = 0;
    std::vector<std::size_t> pivot_columns;
};

struct KernelBasis {
    std::vector<RationalVector> vectors;
    std::size_t rank = 0;
};

namespace detail {

inline void make_primitive(std::vector<Integer>& row) {
    Integer g = 0;
    for (const auto& a : row)
        if (a != 0) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), a.get_mpz_t());
    if (g > 1)
        for (auto& a : row)
            if (a != 0) mpz_divexact(a.get_mpz_t(), a.get_mpz_t(), g.get_mpz_t());
}

}  // namespace detail

/// Reduced row echelon form. Forward elimination runs on integer rows (denominators cleared,
/// content divided out after every update); pivots are normalised to 1 only at the end.
inline RrefResult rref(const RationalMatrix& m) {
    const std::size_t rows = m.rows(), cols = m.cols();
    std::vector<std::vector<Integer>> work(rows, std::vector<Integer>(cols));
    for (std::size_t r = 0; r < rows; ++r) {
        Integer lcm = 1;
        for (std::size_t c = 0; c < cols; ++c)
            mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(), m(r, c).get_den_mpz_t());
        for (std::size_t c = 0; c < cols; ++c) work[r][c] = m(r, c).get_num() * (lcm / m(r, c).get_den());
        detail::make_primitive(work[r]);
    }

    std::vector<std::size_t> pivots;
    std::size_t lead = 0;
    for (std::size_t c = 0; c < cols && lead < rows; ++c) {
        std::size_t p = lead;
        while (p < rows && work[p][c] == 0) ++p;
        if (p == rows) continue;
        std::swap(work[lead], work[p]);
        const Integer pivot = work[lead][c];
        for (std::size_t r = lead + 1; r < rows; ++r) {
            if (work[r][c] == 0) continue;
            const Integer factor = work[r][c];
            for (std::size_t j = c; j < cols; ++j) work[r][j] = pivot * work[r][j] - factor * work[lead][j];
            detail::make_primitive(work[r]);
        }
        pivots.push_back(c);
        ++lead;
    }

    const std::size_t rank = pivots.size();
    RationalMatrix reduced(rows, cols);
    for (std::size_t r = 0; r < rank; ++r) {
        const Integer& pivot = work[r][pivots[r]];
        for (std::size_t c = 0; c < cols; ++c) {
            if (work[r][c] == 0) continue;
            reduced(r, c) = Rational(work[r][c], pivot);
            reduced(r, c).canonicalize();
        }
    }
    // back substitution, bottom pivot first
    for (std::size_t k = rank; k-- > 0;) {
        const std::size_t pc = pivots[k];
        for (std::size_t r = 0; r < k; ++r) {
            const Rational factor = reduced(r, pc);
            if (factor == 0) continue;
            for (std::size_t c = pc; c < cols; ++c)
                if (reduced(k, c) != 0) reduced(r, c) -= factor * reduced(k, c);
        }
    }
    return {std::move(reduced), rank, std::move(pivots)};
}

inline std::size_t rank(const RationalMatrix& m) { return rref(m).rank; }

/// Null-space basis: one vector per free column, with that column set to 1.
inline KernelBasis kernel(const RationalMatrix& m) {
    const RrefResult r = rref(m);
    std::vector<bool> is_pivot(m.cols(), false);
    for (auto c : r.pivot_columns) is_pivot[c] = true;
    KernelBasis basis;
    basis.rank = r.rank;
    for (std::size_t free = 0; free < m.cols(); ++free) {
        if (is_pivot[free]) continue;
        RationalVector v(m.cols());
        v[free] = 1;
        for (std::size_t i = 0; i < r.rank; ++i) v[r.pivot_columns[i]] = -r.reduced(i, free);
        basis.vectors.push_back(std::move(v));
    }
    return basis;
}

/// A particular solution of M x = b with every free variable pinned to zero.
inline RationalVector solve(const RationalMatrix& m, std::span<const Rational> b) {
    if (b.size() != m.rows()) throw DimensionMismatch(m.rows(), b.size());
    RationalMatrix augmented(m.rows(), m.cols() + 1);
    for (std::size_t r = 0; r < m.rows(); ++r) {
        for (std::size_t c = 0; c < m.cols(); ++c) augmented(r, c) = m(r, c);
        augmented(r, m.cols()) = b[r];
    }
    const RrefResult red = rref(augmented);
    if (!red.pivot_columns.empty() && red.pivot_columns.back() == m.cols())
        throw Inconsistent("right-hand side is not in the column span");
    RationalVector x(m.cols());
    for (std::size_t i = 0; i < red.rank; ++i) x[red.pivot_columns[i]] = red.reduced(i, m.cols());
    return x;
}

}  // namespace caloric
