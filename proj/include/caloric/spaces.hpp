#pragma once

// Harmonic and caloric polynomial spaces on (Z^n, S), their dimensions, and the
// polynomial-in-time machinery used to compare them.

#include <algorithm>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "caloric/errors.hpp"
#include "caloric/lattice.hpp"
#include "caloric/linalg.hpp"
#include "caloric/polynomial.hpp"

namespace caloric {

enum class SpaceKind { harmonic, caloric };

inline std::string to_string(SpaceKind kind) { return kind == SpaceKind::harmonic ? "harmonic" : "caloric"; }

struct SpaceBasis {
    SpaceKind kind;
    std::size_t n;
    int k;
    GeneratingSet generating_set;
    std::vector<SpaceTimePolynomial> polynomials;
    std::size_t dimension = 0;
};

/// Number of monomials of degree exactly i in n variables, C(i+n-1, n-1).
inline Integer homogeneous_count(std::size_t n, int i) {
    if (i < 0) return 0;
    return binomial(static_cast<unsigned long>(i) + n - 1, n - 1);
}

/// dim P^k = sum_{i<=k} C(i+n-1, n-1)
inline Integer polynomial_space_dimension(std::size_t n, int k) {
    Integer total = 0;
    for (int i = 0; i <= k; ++i) total += homogeneous_count(n, i);
    return total;
}

/// Number of space-time monomials of parabolic degree exactly i: sum_{j<=i/2} S^{i-2j}.
inline Integer parabolic_homogeneous_count(std::size_t n, int i) {
    Integer total = 0;
    for (int j = 0; 2 * j <= i; ++j) total += homogeneous_count(n, i - 2 * j);
    return total;
}

/// dim P-hat^k = sum_{i<=k} S-hat^i
inline Integer parabolic_space_dimension(std::size_t n, int k) {
    Integer total = 0;
    for (int i = 0; i <= k; ++i) total += parabolic_homogeneous_count(n, i);
    return total;
}

/// Closed-form dimension of the caloric polynomials of parabolic degree <= k: dim P^k.
inline std::size_t caloric_dimension_formula(std::size_t n, int k) {
    if (n == 0) throw ValidationError("n must be positive");
    if (k < 0) throw ValidationError("k must be nonnegative");
    return polynomial_space_dimension(n, k).get_ui();
}

namespace detail {

inline SpaceTimePolynomial normalise_leading(SpaceTimePolynomial p) {
    if (p.is_zero()) return p;
    const Monomial* lead = nullptr;
    for (const auto& [m, c] : p.terms())
        if (!lead || DisplayOrder{}(m, *lead)) lead = &m;
    const Rational scale = 1 / p.coefficient(*lead);
    return p * scale;
}

inline SpaceBasis kernel_basis(const GeneratingSet& gens, SpaceKind kind, int k) {
    if (k < 0) throw ValidationError("degree bound must be nonnegative");
    const bool parabolic = kind == SpaceKind::caloric;
    const auto op = parabolic ? LatticeOperator::heat : LatticeOperator::laplacian;
    const auto columns = monomial_basis(gens.dimension(), k, parabolic);
    const auto ker = kernel(operator_matrix(gens, op, k, parabolic));
    SpaceBasis basis{kind, gens.dimension(), k, gens, {}, 0};
    for (const auto& v : ker.vectors)
        basis.polynomials.push_back(normalise_leading(from_coefficients(gens.dimension(), columns, v)));
    basis.dimension = basis.polynomials.size();
    return basis;
}

}  // namespace detail

/// Kernel of Delta on t-free polynomials of degree <= k.
inline SpaceBasis harmonic_basis(const GeneratingSet& gens, int k) {
    return detail::kernel_basis(gens, SpaceKind::harmonic, k);
}

/// Kernel of Delta - d/dt on polynomials of parabolic degree <= k.
inline SpaceBasis caloric_basis(const GeneratingSet& gens, int k) {
    return detail::kernel_basis(gens, SpaceKind::caloric, k);
}

/// Solves (Delta - d/dt) u = g exactly, monomial by monomial. For g = c x^a t^b the ansatz
/// u = sum_{i<=b} p_i t^i gives the layered system
///   Delta p_b = x^a,  Delta p_{i-1} = i p_i  (i = b, ..., 1),
/// each layer solved in P^{deg+2} with free coefficients pinned to zero.
inline SpaceTimePolynomial poisson_solve(const GeneratingSet& gens, const SpaceTimePolynomial& g) {
    const std::size_t n = gens.dimension();
    if (g.dimension() != n) throw DimensionMismatch(n, g.dimension());

    std::map<int, RationalMatrix> laplacians;
    auto solve_layer = [&](const SpaceTimePolynomial& rhs) {
        if (rhs.is_zero()) return SpaceTimePolynomial(n);
        const int d = rhs.spatial_degree();
        auto it = laplacians.find(d);
        if (it == laplacians.end())
            it = laplacians.emplace(d, operator_matrix(gens, LatticeOperator::laplacian, d + 2, false)).first;
        const auto rows = monomial_basis(n, d, false);
        const auto cols = monomial_basis(n, d + 2, false);
        try {
            return from_coefficients(n, cols, solve(it->second, coefficient_vector(rhs, rows)));
        } catch (const Inconsistent&) {
            throw InternalInconsistency("Delta: P^" + std::to_string(d + 2) + " -> P^" + std::to_string(d) +
                                        " failed to reach the layer right-hand side");
        }
    };

    SpaceTimePolynomial u(n);
    for (const auto& [mono, c] : g.terms()) {
        const unsigned b = mono.t;
        Monomial spatial = mono;
        spatial.t = 0;
        std::vector<SpaceTimePolynomial> layers(b + 1, SpaceTimePolynomial(n));
        layers[b] = solve_layer(SpaceTimePolynomial::monomial(spatial));
        for (unsigned i = b; i >= 1; --i) layers[i - 1] = solve_layer(layers[i] * Rational(i));
        for (unsigned i = 0; i <= b; ++i) {
            for (const auto& [m, coeff] : layers[i].terms()) {
                Monomial withtime = m;
                withtime.t = i;
                u.add_term(withtime, c * coeff);
            }
        }
    }
    return u;
}

/// u = sum_{i=0}^{l} t^i p_i with t-free layers p_i.
struct TimeDecomposition {
    std::vector<SpaceTimePolynomial> layers;
    int l = 0;

    /// Drops trailing zero layers (keeping at least p_0).
    TimeDecomposition trimmed() const {
        TimeDecomposition out = *this;
        while (out.layers.size() > 1 && out.layers.back().is_zero()) out.layers.pop_back();
        out.l = static_cast<int>(out.layers.size()) - 1;
        return out;
    }

    SpaceTimePolynomial reassemble() const {
        SpaceTimePolynomial u(layers.empty() ? 1 : layers.front().dimension());
        for (std::size_t i = 0; i < layers.size(); ++i)
            for (const auto& [m, c] : layers[i].terms()) {
                Monomial withtime = m;
                withtime.t = static_cast<unsigned>(i);
                u.add_term(withtime, c);
            }
        return u;
    }

    friend bool operator==(const TimeDecomposition& a, const TimeDecomposition& b) {
        const auto ta = a.trimmed(), tb = b.trimmed();
        return ta.layers == tb.layers;
    }
};

inline TimeDecomposition time_decompose(const SpaceTimePolynomial& u) {
    const int l = std::max(0, u.time_degree());
    TimeDecomposition d{std::vector<SpaceTimePolynomial>(l + 1, SpaceTimePolynomial(u.dimension())), l};
    for (const auto& [m, c] : u.terms()) {
        Monomial spatial = m;
        spatial.t = 0;
        d.layers[m.t].add_term(spatial, c);
    }
    return d;
}

struct TimeSample {
    Rational time;
    SpaceTimePolynomial value;  // t-free
};

/// Recovers the layers p_0..p_l from l+1 snapshots u(., t_j) by inverting the Vandermonde
/// matrix [t_j^i]: p_i = sum_j b^i_j u(., t_j). Times must be distinct and lie in (-1, 0].
inline TimeDecomposition vandermonde_recover(const std::vector<TimeSample>& samples, int l) {
    if (l < 0) throw ValidationError("l must be nonnegative");
    if (samples.size() != static_cast<std::size_t>(l) + 1)
        throw ValidationError("expected " + std::to_string(l + 1) + " samples, got " + std::to_string(samples.size()));
    for (std::size_t j = 0; j < samples.size(); ++j) {
        const auto& t = samples[j].time;
        if (!(t > -1 && t <= 0)) throw TimeOutOfRange("sample time " + t.get_str() + " outside (-1, 0]");
        if (!samples[j].value.is_time_free()) throw ValidationError("samples must be t-free");
        for (std::size_t i = 0; i < j; ++i)
            if (samples[i].time == t) throw DuplicateTimes("sample time " + t.get_str() + " repeated");
    }
    const std::size_t size = samples.size();
    const std::size_t n = samples.front().value.dimension();
    RationalMatrix vandermonde(size, size);
    for (std::size_t j = 0; j < size; ++j)
        for (std::size_t i = 0; i < size; ++i) vandermonde(j, i) = pow(samples[j].time, i);

    TimeDecomposition d{std::vector<SpaceTimePolynomial>(size, SpaceTimePolynomial(n)), l};
    // column j of the inverse holds the weights of sample j in every layer
    for (std::size_t j = 0; j < size; ++j) {
        RationalVector unit(size);
        unit[j] = 1;
        const auto weights = solve(vandermonde, unit);
        for (std::size_t i = 0; i < size; ++i)
            if (weights[i] != 0) d.layers[i] += samples[j].value * weights[i];
    }
    return d;
}

struct StructureReport {
    bool holds = true;
    std::vector<std::string> diagnostics;
};

/// Checks Delta p_l = 0 and Delta p_i = (i+1) p_{i+1} for the layers of u; equivalent to u being caloric.
inline StructureReport structure_check(const GeneratingSet& gens, const SpaceTimePolynomial& u) {
    const auto d = time_decompose(u);
    StructureReport report;
    for (int i = 0; i <= d.l; ++i) {
        const auto lhs = lattice_laplacian(gens, d.layers[i]);
        const auto rhs = i < d.l ? d.layers[i + 1] * Rational(i + 1) : SpaceTimePolynomial(u.dimension());
        if (lhs != rhs) {
            report.holds = false;
            report.diagnostics.push_back("Delta p_" + std::to_string(i) + " = " + format(lhs) + " but " +
                                         std::to_string(i + 1) + " p_" + std::to_string(i + 1) + " = " + format(rhs));
        }
    }
    return report;
}

struct BoundReport {
    std::size_t n = 0;
    int k = 0;
    std::size_t dim_caloric_2k = 0;
    std::size_t dim_harmonic_2k = 0;
    std::size_t bound = 0;
    bool satisfied = false;
};

/// dim P_{2k} <= (k+1) dim H_{2k} on (Z^n, S), both sides from computed kernels.
inline BoundReport bound_check(const GeneratingSet& gens, int k) {
    if (k < 1) throw ValidationError("bound_check needs k >= 1");
    BoundReport r;
    r.n = gens.dimension();
    r.k = k;
    r.dim_caloric_2k = caloric_basis(gens, 2 * k).dimension;
    r.dim_harmonic_2k = harmonic_basis(gens, 2 * k).dimension;
    r.bound = static_cast<std::size_t>(k + 1) * r.dim_harmonic_2k;
    r.satisfied = r.dim_caloric_2k <= r.bound;
    return r;
}

/// Least m with 4m > 2k + alpha + 2.
inline unsigned least_vanishing_order(int k, const Rational& alpha) {
    const Rational threshold = Rational(2 * k + 2) + alpha;
    Rational quarter = threshold / 4;
    Integer fl;
    mpz_fdiv_q(fl.get_mpz_t(), quarter.get_num_mpz_t(), quarter.get_den_mpz_t());
    return static_cast<unsigned>(fl.get_ui() + 1);
}

/// True iff d^m u / dt^m vanishes identically for the least m with 4m > 2k + alpha + 2.
inline bool derivative_vanishing_check(const GeneratingSet& gens, const SpaceTimePolynomial& u, int k, const Rational& alpha) {
    if (alpha <= 0) throw ValidationError("alpha must be positive");
    if (!heat_operator(gens, u).is_zero()) throw NotCaloric("polynomial is not caloric: " + format(u));
    if (u.parabolic_degree() > k)
        throw ValidationError("parabolic degree " + std::to_string(u.parabolic_degree()) + " exceeds k = " + std::to_string(k));
    return partial_t(u, least_vanishing_order(k, alpha)).is_zero();
}

}  // namespace caloric
