#pragma once

// Cayley graphs (Z^n, S) with unit edge weights, and their operators on space-time polynomials.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "caloric/errors.hpp"
#include "caloric/linalg.hpp"
#include "caloric/polynomial.hpp"

namespace caloric {

/// Finite symmetric generating set of Z^n. Construction validates symmetry, distinctness,
/// absence of 0 and that the generators span Z^n over the integers.
class GeneratingSet {
public:
    GeneratingSet(std::size_t n, std::vector<LatticePoint> generators) : n_(n), generators_(std::move(generators)) {
        validate();
    }

    /// {+-e_1, ..., +-e_n}
    static GeneratingSet standard(std::size_t n) {
        std::vector<LatticePoint> gens;
        for (std::size_t i = 0; i < n; ++i) {
            LatticePoint e(n, 0);
            e[i] = 1;
            gens.push_back(e);
            e[i] = -1;
            gens.push_back(e);
        }
        return GeneratingSet(n, std::move(gens));
    }

    /// Adds s and -s for each listed vector (skipping ones already present).
    static GeneratingSet symmetric_closure(std::size_t n, const std::vector<LatticePoint>& half) {
        std::vector<LatticePoint> gens;
        auto push = [&gens](const LatticePoint& v) {
            if (std::find(gens.begin(), gens.end(), v) == gens.end()) gens.push_back(v);
        };
        for (const auto& s : half) {
            push(s);
            LatticePoint neg(s.size());
            std::transform(s.begin(), s.end(), neg.begin(), [](std::int64_t v) { return -v; });
            push(neg);
        }
        return GeneratingSet(n, std::move(gens));
    }

    /// One generator per line, comma-separated integers; blank lines and '#' comments ignored.
    static GeneratingSet parse(std::istream& in) {
        std::vector<LatticePoint> gens;
        std::string line;
        std::size_t line_no = 0;
        std::size_t n = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            LatticePoint v;
            std::stringstream fields(line);
            std::string field;
            while (std::getline(fields, field, ',')) {
                try {
                    std::size_t used = 0;
                    v.push_back(std::stoll(field, &used));
                    if (field.find_first_not_of(" \t\r", used) != std::string::npos) throw std::invalid_argument(field);
                } catch (const std::logic_error&) {
                    throw ValidationError("generating set line " + std::to_string(line_no) + ": bad integer '" + field + "'");
                }
            }
            if (n == 0) n = v.size();
            if (v.size() != n)
                throw DimensionMismatch("generating set line " + std::to_string(line_no) + ": expected " + std::to_string(n) +
                                        " entries, got " + std::to_string(v.size()));
            gens.push_back(std::move(v));
        }
        if (gens.empty()) throw ValidationError("generating set file contains no generators");
        return GeneratingSet(n, std::move(gens));
    }

    static GeneratingSet load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ValidationError("cannot open generating set file '" + path + "'");
        return parse(in);
    }

    std::size_t dimension() const noexcept { return n_; }
    std::size_t size() const noexcept { return generators_.size(); }
    const std::vector<LatticePoint>& generators() const noexcept { return generators_; }

    friend bool operator==(const GeneratingSet&, const GeneratingSet&) = default;

private:
    void validate() const {
        if (n_ == 0) throw ValidationError("generating set dimension must be positive");
        if (generators_.empty()) throw ValidationError("generating set is empty");
        for (std::size_t i = 0; i < generators_.size(); ++i) {
            const auto& s = generators_[i];
            if (s.size() != n_) throw DimensionMismatch(n_, s.size());
            if (std::all_of(s.begin(), s.end(), [](std::int64_t v) { return v == 0; }))
                throw ValidationError("generating set contains the zero vector");
            for (std::size_t j = 0; j < i; ++j)
                if (generators_[j] == s) throw ValidationError("generating set contains a repeated generator");
            LatticePoint neg(n_);
            std::transform(s.begin(), s.end(), neg.begin(), [](std::int64_t v) { return -v; });
            if (std::find(generators_.begin(), generators_.end(), neg) == generators_.end())
                throw ValidationError("generating set is not symmetric: inverse of a generator is missing");
        }
        if (!spans_lattice()) throw ValidationError("generators do not span Z^" + std::to_string(n_));
    }

    // Integer row echelon form by Euclidean row operations (unimodular), so the row lattice is
    // preserved; the generators span Z^n iff the echelon form has n pivots of absolute value 1.
    bool spans_lattice() const {
        std::vector<std::vector<Integer>> rows;
        for (const auto& s : generators_) {
            std::vector<Integer> r;
            for (auto v : s) r.emplace_back(static_cast<long>(v));
            rows.push_back(std::move(r));
        }
        std::size_t lead = 0;
        Integer det = 1;
        for (std::size_t c = 0; c < n_; ++c) {
            // Euclid on column c among rows [lead, end)
            while (true) {
                std::size_t best = rows.size();
                for (std::size_t r = lead; r < rows.size(); ++r)
                    if (rows[r][c] != 0 && (best == rows.size() || abs(rows[r][c]) < abs(rows[best][c]))) best = r;
                if (best == rows.size()) return false;
                std::swap(rows[lead], rows[best]);
                bool reduced = true;
                for (std::size_t r = lead + 1; r < rows.size(); ++r) {
                    if (rows[r][c] == 0) continue;
                    Integer q;
                    mpz_tdiv_q(q.get_mpz_t(), rows[r][c].get_mpz_t(), rows[lead][c].get_mpz_t());
                    for (std::size_t j = c; j < n_; ++j) rows[r][j] -= q * rows[lead][j];
                    if (rows[r][c] != 0) reduced = false;
                }
                if (reduced) break;
            }
            det *= rows[lead][c];
            ++lead;
        }
        return abs(det) == 1;
    }

    std::size_t n_;
    std::vector<LatticePoint> generators_;
};

/// Delta p(x) = (1/|S|) sum_s (p(x + s, t) - p(x, t)).
inline SpaceTimePolynomial lattice_laplacian(const GeneratingSet& gens, const SpaceTimePolynomial& p) {
    if (gens.dimension() != p.dimension()) throw DimensionMismatch(gens.dimension(), p.dimension());
    SpaceTimePolynomial sum(p.dimension());
    for (const auto& s : gens.generators()) sum += shift_substitute(p, s);
    sum -= p * Rational(static_cast<long>(gens.size()));
    return sum * Rational(1, static_cast<long>(gens.size()));
}

/// (Delta - d/dt) p; caloric polynomials are its kernel.
inline SpaceTimePolynomial heat_operator(const GeneratingSet& gens, const SpaceTimePolynomial& p) {
    return lattice_laplacian(gens, p) - partial_t(p);
}

enum class LatticeOperator { laplacian, heat };

struct LatticeOperatorReport {
    int input_parabolic_degree = -1;
    int output_parabolic_degree = -1;
};

inline LatticeOperatorReport operator_report(const GeneratingSet& gens, LatticeOperator op, const SpaceTimePolynomial& p) {
    const auto image = op == LatticeOperator::laplacian ? lattice_laplacian(gens, p) : heat_operator(gens, p);
    return {p.parabolic_degree(), image.parabolic_degree()};
}

/// Monomials of P^k (t-free, spatial degree <= k) or of P-hat^k (parabolic degree <= k),
/// in ascending GradedOrder. A negative k gives the empty list.
inline std::vector<Monomial> monomial_basis(std::size_t n, int k, bool parabolic) {
    std::vector<Monomial> out;
    if (k < 0) return out;
    Monomial m(n);
    auto fill = [&](auto&& self, std::size_t i, int budget) -> void {
        if (i == n) {
            out.push_back(m);
            return;
        }
        for (int a = 0; a <= budget; ++a) {
            m.x[i] = static_cast<unsigned>(a);
            self(self, i + 1, budget - a);
        }
        m.x[i] = 0;
    };
    const int max_t = parabolic ? k / 2 : 0;
    for (int b = 0; b <= max_t; ++b) {
        m.t = static_cast<unsigned>(b);
        fill(fill, 0, k - 2 * b);
    }
    std::sort(out.begin(), out.end(), GradedOrder{});
    return out;
}

/// Matrix of the operator from P^k (or P-hat^k) into P^{k-2} (or P-hat^{k-2}) in the monomial bases.
inline RationalMatrix operator_matrix(const GeneratingSet& gens, LatticeOperator op, int k, bool parabolic) {
    const std::size_t n = gens.dimension();
    const auto columns = monomial_basis(n, k, parabolic);
    const auto rows = monomial_basis(n, k - 2, parabolic);
    RationalMatrix m(rows.size(), columns.size());
    for (std::size_t c = 0; c < columns.size(); ++c) {
        const auto p = SpaceTimePolynomial::monomial(columns[c]);
        const auto image = op == LatticeOperator::laplacian ? lattice_laplacian(gens, p) : heat_operator(gens, p);
        const auto v = coefficient_vector(image, rows);
        for (std::size_t r = 0; r < rows.size(); ++r) m(r, c) = v[r];
    }
    return m;
}

}  // namespace caloric
