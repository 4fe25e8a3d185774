#pragma once

// Ancient solutions on parabolic cylinders Q_R = B_R(x0) x [-R^2, 0]: exact integrals for
// caloric polynomials on lattice windows, closed-form integrals for spectral solutions
// u = sum_j e^{theta_j t} phi_j on finite graphs, and the Caccioppoli energy ratio.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "caloric/errors.hpp"
#include "caloric/graph.hpp"
#include "caloric/lattice.hpp"
#include "caloric/polynomial.hpp"

namespace caloric {

enum class IntegrandKind { square, gamma, time_derivative_square, time_derivative_power_square };

/// u^2, Gamma(u), u_t^2 or |d^m u / dt^m|^2
struct Integrand {
    IntegrandKind kind = IntegrandKind::square;
    unsigned order = 1;  // m, used by time_derivative_power_square

    static Integrand square() { return {IntegrandKind::square, 0}; }
    static Integrand gamma() { return {IntegrandKind::gamma, 0}; }
    static Integrand time_derivative() { return {IntegrandKind::time_derivative_square, 1}; }
    static Integrand time_derivative(unsigned m) { return {IntegrandKind::time_derivative_power_square, m}; }
};

template <class Center>
struct CylinderSpec {
    Center center;
    Rational radius = 1;
    unsigned dilation = 36;
};

inline void check_radius(const Rational& radius) {
    if (radius < 1) throw ValidationError("cylinder radius must satisfy R >= 1, got " + radius.get_str());
}

// ---------------------------------------------------------------------------
// lattice windows

struct LatticePointHash {
    std::size_t operator()(const LatticePoint& p) const noexcept {
        std::size_t h = 1469598103934665603ull;
        for (auto v : p) h = (h ^ static_cast<std::size_t>(v)) * 1099511628211ull;
        return h;
    }
};

/// A BFS ball of (Z^n, S), with cached power sums sum_{x in ball} x^a.
class LatticeBall {
public:
    LatticeBall(std::size_t n, std::vector<LatticePoint> points) : n_(n), points_(std::move(points)) {}

    const std::vector<LatticePoint>& points() const noexcept { return points_; }
    std::size_t size() const noexcept { return points_.size(); }

    /// sum over ball points of the t-free polynomial p
    Rational sum(const SpaceTimePolynomial& p) const {
        if (p.dimension() != n_) throw DimensionMismatch(n_, p.dimension());
        Rational total = 0;
        for (const auto& [m, c] : p.terms()) {
            if (m.t != 0) throw ValidationError("ball sums take t-free polynomials");
            total += c * Rational(moment(m.x));
        }
        return total;
    }

private:
    Integer moment(const std::vector<unsigned>& exponent) const {
        std::lock_guard lock(mutex_);
        auto it = moments_.find(exponent);
        if (it != moments_.end()) return it->second;
        Integer total = 0, term, factor;
        for (const auto& x : points_) {
            term = 1;
            for (std::size_t i = 0; i < n_ && term != 0; ++i) {
                if (exponent[i] == 0) continue;
                mpz_set_si(factor.get_mpz_t(), static_cast<long>(x[i]));
                mpz_pow_ui(factor.get_mpz_t(), factor.get_mpz_t(), exponent[i]);
                term *= factor;
            }
            total += term;
        }
        moments_.emplace(exponent, total);
        return total;
    }

    std::size_t n_;
    std::vector<LatticePoint> points_;
    mutable std::mutex mutex_;
    mutable std::map<std::vector<unsigned>, Integer> moments_;
};

/// The Cayley graph of (Z^n, S) seen through the box [-radius, radius]^n. Every lattice vertex
/// has mu_x = |S|; balls must stay inside the box.
class LatticeBox {
public:
    LatticeBox(GeneratingSet gens, std::int64_t radius)
        : gens_(std::move(gens)), radius_(radius), cache_(std::make_shared<Cache>()) {
        if (radius < 0) throw ValidationError("box radius must be nonnegative");
    }

    const GeneratingSet& generating_set() const noexcept { return gens_; }
    std::size_t dimension() const noexcept { return gens_.dimension(); }
    std::int64_t radius() const noexcept { return radius_; }
    Rational mu() const { return Rational(static_cast<long>(gens_.size())); }

    bool contains(const LatticePoint& p) const {
        return p.size() == dimension() &&
               std::all_of(p.begin(), p.end(), [this](std::int64_t v) { return v >= -radius_ && v <= radius_; });
    }

    /// B_r(center) in the combinatorial metric of (Z^n, S).
    std::shared_ptr<const LatticeBall> ball(const LatticePoint& center, const Rational& r) const {
        if (!contains(center)) throw BallTruncated("ball centre lies outside the lattice box");
        const long steps = floor_of(r);
        const auto key = std::make_pair(center, steps);
        {
            std::lock_guard lock(cache_->mutex);
            if (auto it = cache_->balls.find(key); it != cache_->balls.end()) return it->second;
        }
        std::unordered_set<LatticePoint, LatticePointHash> seen{center};
        std::vector<LatticePoint> points{center}, frontier{center}, next;
        for (long d = 0; d < steps; ++d) {
            next.clear();
            for (const auto& x : frontier)
                for (const auto& s : gens_.generators()) {
                    LatticePoint y(x.size());
                    for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] + s[i];
                    if (!seen.insert(y).second) continue;
                    if (!contains(y))
                        throw BallTruncated("B_" + r.get_str() + " leaves the lattice box of radius " + std::to_string(radius_));
                    next.push_back(y);
                    points.push_back(std::move(y));
                }
            std::swap(frontier, next);
        }
        auto result = std::make_shared<const LatticeBall>(dimension(), std::move(points));
        std::lock_guard lock(cache_->mutex);
        cache_->balls.emplace(key, result);
        return result;
    }

private:
    struct Cache {
        std::mutex mutex;
        std::map<std::pair<LatticePoint, long>, std::shared_ptr<const LatticeBall>> balls;
    };
    GeneratingSet gens_;
    std::int64_t radius_;
    std::shared_ptr<Cache> cache_;
};

/// A caloric polynomial read as an ancient solution on (Z^n, S).
struct PolynomialField {
    SpaceTimePolynomial u;
    GeneratingSet gens;

    PolynomialField(SpaceTimePolynomial poly, GeneratingSet s) : u(std::move(poly)), gens(std::move(s)) {
        if (u.dimension() != gens.dimension()) throw DimensionMismatch(gens.dimension(), u.dimension());
    }

    bool is_caloric() const { return heat_operator(gens, u).is_zero(); }
};

/// Gamma(u) as a polynomial on (Z^n, S): (1 / 2|S|) sum_s (u(x+s, t) - u(x, t))^2.
inline SpaceTimePolynomial lattice_gamma(const GeneratingSet& gens, const SpaceTimePolynomial& u) {
    SpaceTimePolynomial total(u.dimension());
    for (const auto& s : gens.generators()) {
        const auto diff = shift_substitute(u, s) - u;
        total += diff * diff;
    }
    return total * Rational(1, 2 * static_cast<long>(gens.size()));
}

inline SpaceTimePolynomial integrand_polynomial(const PolynomialField& field, Integrand integrand) {
    switch (integrand.kind) {
    case IntegrandKind::square:
        return field.u * field.u;
    case IntegrandKind::gamma:
        return lattice_gamma(field.gens, field.u);
    case IntegrandKind::time_derivative_square: {
        const auto ut = partial_t(field.u, 1);
        return ut * ut;
    }
    case IntegrandKind::time_derivative_power_square: {
        const auto d = partial_t(field.u, integrand.order);
        return d * d;
    }
    }
    throw ValidationError("unknown integrand");
}

/// int_{Q_{multiplier R}} v = int_{-(mR)^2}^0 sum_{x in B_{mR}} v(x, t) mu_x dt, exactly.
inline Rational cylinder_integral(const LatticeBox& box, const PolynomialField& field, Integrand integrand,
                                  const CylinderSpec<LatticePoint>& spec, unsigned multiplier = 1) {
    check_radius(spec.radius);
    if (!(field.gens == box.generating_set())) throw ValidationError("field and lattice use different generating sets");
    if (spec.center.size() != box.dimension()) throw DimensionMismatch(box.dimension(), spec.center.size());
    const Rational r = spec.radius * multiplier;
    const auto b = box.ball(spec.center, r);
    const auto v = integrand_polynomial(field, integrand);
    if (v.is_zero()) return 0;
    return box.mu() * b->sum(integrate_time(v, r * r));
}

// ---------------------------------------------------------------------------
// spectral ancient solutions

struct SpectralMode {
    double theta = 0;
    VertexFunction<double> phi;
};

/// u(x, t) = sum_j e^{theta_j t} phi_j(x) with Delta phi_j = theta_j phi_j.
struct SpectralField {
    std::vector<SpectralMode> modes;

    static constexpr double tolerance = 1e-8;

    static double residual(const WeightedGraph& g, const SpectralMode& mode) {
        const auto lap = graph_laplacian(g, mode.phi);
        double worst = 0;
        for (Vertex x = 0; x < g.vertex_count(); ++x) worst = std::max(worst, std::abs(lap[x] - mode.theta * mode.phi[x]));
        return worst;
    }

    /// Throws SpectralFailure unless every mode is an eigenpair of Delta on g within tolerance.
    void validate(const WeightedGraph& g) const {
        for (const auto& m : modes) {
            if (m.phi.size() != g.vertex_count()) throw DimensionMismatch(g.vertex_count(), m.phi.size());
            if (m.theta > tolerance) throw SpectralFailure("positive eigenvalue " + std::to_string(m.theta));
            if (const double r = residual(g, m); !(r <= tolerance))
                throw SpectralFailure("eigen residual " + std::to_string(r) + " exceeds tolerance");
        }
    }
};

/// Eigenpairs of the mu-normalised Laplacian, smallest |theta| first, each wrapped as the
/// ancient solution e^{theta t} phi. phi is scaled to sup-norm 1 with its first significant
/// entry positive.
inline std::vector<SpectralField> spectral_ancient_solutions(const WeightedGraph& g, std::size_t count) {
    const std::size_t nv = g.vertex_count();
    if (!g.connected()) throw ValidationError("spectral solutions need a connected graph");
    if (count > nv) throw ValidationError("requested " + std::to_string(count) + " modes from " + std::to_string(nv) + " vertices");
    // D^{-1/2} W D^{-1/2} - I is symmetric and similar to Delta = D^{-1} W - I
    Eigen::MatrixXd sym = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(nv), static_cast<Eigen::Index>(nv));
    std::vector<double> root_mu(nv);
    for (Vertex x = 0; x < nv; ++x) root_mu[x] = std::sqrt(g.mu(x).get_d());
    for (Vertex x = 0; x < nv; ++x) {
        sym(x, x) = -1.0;
        for (const auto& nb : g.neighbors(x)) sym(x, nb.vertex) = nb.weight.get_d() / (root_mu[x] * root_mu[nb.vertex]);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym);
    if (solver.info() != Eigen::Success) throw SpectralFailure("eigen-decomposition did not converge");

    std::vector<std::pair<double, Eigen::Index>> order;
    for (Eigen::Index j = 0; j < solver.eigenvalues().size(); ++j) order.emplace_back(solver.eigenvalues()(j), j);
    std::stable_sort(order.begin(), order.end(), [](const auto& a, const auto& b) { return std::abs(a.first) < std::abs(b.first); });

    std::vector<SpectralField> out;
    for (std::size_t j = 0; j < count; ++j) {
        const auto [theta, col] = order[j];
        SpectralMode mode;
        mode.theta = std::abs(theta) < 1e-12 ? 0.0 : std::min(theta, 0.0);
        mode.phi = VertexFunction<double>(nv);
        double sup = 0;
        for (Vertex x = 0; x < nv; ++x) {
            mode.phi[x] = solver.eigenvectors()(static_cast<Eigen::Index>(x), col) / root_mu[x];
            sup = std::max(sup, std::abs(mode.phi[x]));
        }
        double sign = 1;
        for (Vertex x = 0; x < nv; ++x)
            if (std::abs(mode.phi[x]) > 1e-9 * sup) {
                sign = mode.phi[x] < 0 ? -1 : 1;
                break;
            }
        for (auto& v : mode.phi.values) v *= sign / sup;
        SpectralField field{{std::move(mode)}};
        field.validate(g);
        out.push_back(std::move(field));
    }
    return out;
}

/// A nonnegative quantity held as mantissa * e^{log_scale}, so cylinder integrals of
/// backward-growing modes e^{theta t} with theta < 0 stay finite.
struct ScaledValue {
    double mantissa = 0;
    double log_scale = 0;

    double value() const { return mantissa == 0 ? 0.0 : mantissa * std::exp(log_scale); }
    double log() const { return std::log(mantissa) + log_scale; }
    bool is_zero() const { return mantissa == 0; }

    friend ScaledValue operator*(ScaledValue a, double s) {
        a.mantissa *= s;
        return a;
    }
    friend ScaledValue operator+(const ScaledValue& a, const ScaledValue& b) {
        if (a.is_zero()) return b;
        if (b.is_zero()) return a;
        const double top = std::max(a.log_scale, b.log_scale);
        return {a.mantissa * std::exp(a.log_scale - top) + b.mantissa * std::exp(b.log_scale - top), top};
    }
    /// a / b as a plain double
    friend double ratio(const ScaledValue& a, const ScaledValue& b) {
        if (a.is_zero()) return 0;
        return a.mantissa / b.mantissa * std::exp(a.log_scale - b.log_scale);
    }
};

namespace detail {

/// int_{-T}^0 e^{ct} dt for c <= 0, as e^{-cT} (1 - e^{cT}) / (-c); the c = 0 limit is T.
inline ScaledValue exponential_integral(double c, double span) {
    if (std::abs(c) < 1e-15) return {span, 0};
    return {-std::expm1(c * span) / (-c), -c * span};
}

}  // namespace detail

inline ScaledValue cylinder_integral(const WeightedGraph& g, const SpectralField& field, Integrand integrand,
                                     const CylinderSpec<Vertex>& spec, unsigned multiplier = 1) {
    check_radius(spec.radius);
    const Rational r = spec.radius * multiplier;
    const auto vertices = ball(g, spec.center, r);
    for (Vertex x : vertices)
        if (!g.is_interior(x)) throw BallTruncated("B_" + r.get_str() + " reaches the truncated boundary of the graph");
    const double span = Rational(r * r).get_d();
    const auto& modes = field.modes;

    // d^m/dt^m multiplies mode j by theta_j^m
    std::vector<double> scale(modes.size(), 1.0);
    if (integrand.kind == IntegrandKind::time_derivative_square || integrand.kind == IntegrandKind::time_derivative_power_square)
        for (std::size_t j = 0; j < modes.size(); ++j) scale[j] = std::pow(modes[j].theta, integrand.order);

    ScaledValue total;
    for (std::size_t i = 0; i < modes.size(); ++i)
        for (std::size_t j = 0; j < modes.size(); ++j) {
            double spatial = 0;
            for (Vertex x : vertices) {
                if (integrand.kind == IntegrandKind::gamma) {
                    double acc = 0;
                    for (const auto& nb : g.neighbors(x))
                        acc += nb.weight.get_d() * (modes[i].phi[nb.vertex] - modes[i].phi[x]) *
                               (modes[j].phi[nb.vertex] - modes[j].phi[x]);
                    spatial += acc / 2;  // mu_x cancels against the 1/mu_x inside Gamma
                } else {
                    spatial += modes[i].phi[x] * modes[j].phi[x] * g.mu(x).get_d();
                }
            }
            const double coeff = spatial * scale[i] * scale[j];
            if (coeff == 0) continue;
            auto piece = detail::exponential_integral(modes[i].theta + modes[j].theta, span) * coeff;
            // cross terms may be negative; fold them in at a common scale
            if (total.is_zero()) {
                total = piece;
            } else {
                const double top = std::max(total.log_scale, piece.log_scale);
                total = {total.mantissa * std::exp(total.log_scale - top) + piece.mantissa * std::exp(piece.log_scale - top), top};
            }
        }
    if (total.mantissa < 0 && total.mantissa > -1e-12) total.mantissa = 0;
    return total;
}

// ---------------------------------------------------------------------------
// Caccioppoli energy ratio

/// R^2 int_{Q_R} Gamma(u) + R^4 int_{Q_R} u_t^2 against int_{Q_{dilation R}} u^2.
template <class T>
struct CaccioppoliReport {
    Rational radius;
    T gradient_term;
    T time_term;
    T denominator;
    double ratio = 0;
};

inline CaccioppoliReport<Rational> caccioppoli_ratio(const LatticeBox& box, const PolynomialField& field,
                                                     const CylinderSpec<LatticePoint>& spec) {
    check_radius(spec.radius);
    if (!field.is_caloric()) throw NotCaloric("u is not caloric: " + format(field.u));
    const Rational r2 = spec.radius * spec.radius;
    CaccioppoliReport<Rational> rep;
    rep.radius = spec.radius;
    // the large cylinder first, so a truncated box fails before any other work
    rep.denominator = cylinder_integral(box, field, Integrand::square(), spec, spec.dilation);
    rep.gradient_term = r2 * cylinder_integral(box, field, Integrand::gamma(), spec);
    rep.time_term = r2 * r2 * cylinder_integral(box, field, Integrand::time_derivative(), spec);
    if (rep.denominator == 0) throw ZeroDenominator("u vanishes on the dilated cylinder");
    rep.ratio = Rational((rep.gradient_term + rep.time_term) / rep.denominator).get_d();
    return rep;
}

/// Exact ratio for lattice reports.
inline Rational exact_ratio(const CaccioppoliReport<Rational>& rep) {
    return (rep.gradient_term + rep.time_term) / rep.denominator;
}

inline CaccioppoliReport<ScaledValue> caccioppoli_ratio(const WeightedGraph& g, const SpectralField& field,
                                                        const CylinderSpec<Vertex>& spec) {
    check_radius(spec.radius);
    field.validate(g);
    const double r2 = Rational(spec.radius * spec.radius).get_d();
    CaccioppoliReport<ScaledValue> rep;
    rep.radius = spec.radius;
    rep.denominator = cylinder_integral(g, field, Integrand::square(), spec, spec.dilation);
    rep.gradient_term = cylinder_integral(g, field, Integrand::gamma(), spec) * r2;
    rep.time_term = cylinder_integral(g, field, Integrand::time_derivative(), spec) * (r2 * r2);
    if (rep.denominator.mantissa <= 0) throw ZeroDenominator("u vanishes on the dilated cylinder");
    rep.ratio = ratio(rep.gradient_term + rep.time_term, rep.denominator);
    return rep;
}

/// (R, int_{Q_R} |d^m u/dt^m|^2) for each radius.
inline std::vector<std::pair<Rational, Rational>> derivative_decay_profile(const LatticeBox& box, const PolynomialField& field,
                                                                           const LatticePoint& center, unsigned m,
                                                                           const std::vector<Rational>& radii) {
    if (m == 0) throw ValidationError("derivative order must be positive");
    std::vector<std::pair<Rational, Rational>> out;
    for (const auto& r : radii)
        out.emplace_back(r, cylinder_integral(box, field, Integrand::time_derivative(m), {center, r}));
    return out;
}

inline std::vector<std::pair<Rational, ScaledValue>> derivative_decay_profile(const WeightedGraph& g, const SpectralField& field,
                                                                              Vertex center, unsigned m,
                                                                              const std::vector<Rational>& radii) {
    if (m == 0) throw ValidationError("derivative order must be positive");
    std::vector<std::pair<Rational, ScaledValue>> out;
    for (const auto& r : radii) out.emplace_back(r, cylinder_integral(g, field, Integrand::time_derivative(m), {center, r}));
    return out;
}

/// Values of u(., t) on the vertices of a lattice-embedded graph.
inline VertexFunction<Rational> restrict_field(const WeightedGraph& g, const SpaceTimePolynomial& u, const Rational& t) {
    if (!g.coordinates()) throw DimensionMismatch("graph carries no lattice embedding");
    VertexFunction<Rational> f(g.vertex_count());
    for (Vertex x = 0; x < g.vertex_count(); ++x) f[x] = evaluate(u, (*g.coordinates())[x], t);
    return f;
}

}  // namespace caloric
