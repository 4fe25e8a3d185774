#pragma once

// Finite weighted graphs G = (V, E, w) with vertex measure mu_x = sum_y w_xy, and the
// difference calculus on them: Laplacian, carre du champ, Green's formula, cut-offs, balls.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <queue>
#include <random>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "caloric/errors.hpp"
#include "caloric/lattice.hpp"
#include "caloric/rational.hpp"

namespace caloric {

using Vertex = std::size_t;

struct Neighbor {
    Vertex vertex;
    Rational weight;
};

class WeightedGraph {
public:
    class Builder;

    std::size_t vertex_count() const noexcept { return adjacency_.size(); }
    std::size_t edge_count() const noexcept { return edge_count_; }

    const std::vector<Neighbor>& neighbors(Vertex x) const { return adjacency_.at(x); }
    const Rational& mu(Vertex x) const { return mu_.at(x); }
    const std::vector<Rational>& measure() const noexcept { return mu_; }

    const std::string& name(Vertex x) const { return names_.at(x); }
    std::optional<Vertex> find(const std::string& name) const {
        auto it = index_.find(name);
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }
    Vertex vertex(const std::string& name) const {
        if (auto v = find(name)) return *v;
        throw ValidationError("unknown vertex '" + name + "'");
    }

    /// Weight of {x, y}, or nullopt when x and y are not adjacent.
    std::optional<Rational> weight(Vertex x, Vertex y) const {
        for (const auto& nb : neighbors(x))
            if (nb.vertex == y) return nb.weight;
        return std::nullopt;
    }

    /// Vertices whose full neighbourhood is present. A finite graph read from a file is all
    /// interior; a lattice window marks its outer halo as non-interior.
    bool is_interior(Vertex x) const { return interior_.at(x); }

    /// Lattice coordinates when the graph is an embedded piece of (Z^n, S).
    const std::optional<std::vector<LatticePoint>>& coordinates() const noexcept { return coordinates_; }

    std::size_t component_count() const noexcept { return component_count_; }
    std::size_t component(Vertex x) const { return component_.at(x); }
    bool connected() const noexcept { return component_count_ == 1; }

private:
    std::vector<std::string> names_;
    std::unordered_map<std::string, Vertex> index_;
    std::vector<std::vector<Neighbor>> adjacency_;
    std::vector<Rational> mu_;
    std::vector<bool> interior_;
    std::optional<std::vector<LatticePoint>> coordinates_;
    std::vector<std::size_t> component_;
    std::size_t component_count_ = 0;
    std::size_t edge_count_ = 0;
};

/// Accumulates edges and enforces simplicity, symmetry and positivity.
class WeightedGraph::Builder {
public:
    Vertex add_vertex(const std::string& name) {
        auto [it, inserted] = index_.try_emplace(name, names_.size());
        if (inserted) {
            names_.push_back(name);
            adjacency_.emplace_back();
        }
        return it->second;
    }

    /// Restating an edge in the opposite orientation with the same weight is accepted;
    /// loops, non-positive weights, asymmetric weights and repeated edges are rejected.
    void add_edge(const std::string& a, const std::string& b, const Rational& w) {
        if (a == b) throw ValidationError("loop at vertex '" + a + "'");
        if (w <= 0) throw ValidationError("non-positive weight on edge " + a + " " + b);
        const Vertex x = add_vertex(a), y = add_vertex(b);
        const auto key = std::minmax(x, y);
        auto it = edges_.find(key);
        if (it != edges_.end()) {
            if (it->second.weight != w)
                throw ValidationError("asymmetric weight on edge " + a + " " + b + ": " + it->second.weight.get_str() +
                                      " vs " + w.get_str());
            if (it->second.from == x || it->second.restated)
                throw ValidationError("repeated edge " + a + " " + b + " (multi-edges are not allowed)");
            it->second.restated = true;
            return;
        }
        edges_.emplace(key, EdgeRecord{w, x, false});
        adjacency_[x].push_back({y, w});
        adjacency_[y].push_back({x, w});
    }

    void set_interior(Vertex x, bool interior) {
        if (interior_.size() < names_.size()) interior_.resize(names_.size(), true);
        interior_.at(x) = interior;
    }

    void set_coordinates(std::vector<LatticePoint> coords) { coordinates_ = std::move(coords); }

    WeightedGraph build() && {
        WeightedGraph g;
        const std::size_t nv = names_.size();
        if (nv == 0) throw ValidationError("graph has no vertices");
        g.names_ = std::move(names_);
        g.index_ = std::move(index_);
        g.adjacency_ = std::move(adjacency_);
        for (auto& adj : g.adjacency_)
            std::sort(adj.begin(), adj.end(), [](const Neighbor& p, const Neighbor& q) { return p.vertex < q.vertex; });
        g.mu_.assign(nv, Rational(0));
        for (Vertex x = 0; x < nv; ++x) {
            for (const auto& nb : g.adjacency_[x]) g.mu_[x] += nb.weight;
            if (g.mu_[x] == 0) throw ValidationError("isolated vertex '" + g.names_[x] + "'");
        }
        interior_.resize(nv, true);
        g.interior_ = std::move(interior_);
        if (coordinates_ && coordinates_->size() != nv) throw DimensionMismatch(nv, coordinates_->size());
        g.coordinates_ = std::move(coordinates_);
        g.edge_count_ = edges_.size();

        g.component_.assign(nv, nv);
        for (Vertex s = 0; s < nv; ++s) {
            if (g.component_[s] != nv) continue;
            const std::size_t label = g.component_count_++;
            std::vector<Vertex> stack{s};
            g.component_[s] = label;
            while (!stack.empty()) {
                const Vertex x = stack.back();
                stack.pop_back();
                for (const auto& nb : g.adjacency_[x])
                    if (g.component_[nb.vertex] == nv) {
                        g.component_[nb.vertex] = label;
                        stack.push_back(nb.vertex);
                    }
            }
        }
        return g;
    }

private:
    struct EdgeRecord {
        Rational weight;
        Vertex from;
        bool restated;
    };
    std::vector<std::string> names_;
    std::unordered_map<std::string, Vertex> index_;
    std::vector<std::vector<Neighbor>> adjacency_;
    std::map<std::pair<Vertex, Vertex>, EdgeRecord> edges_;
    std::vector<bool> interior_;
    std::optional<std::vector<LatticePoint>> coordinates_;
};

// ---------------------------------------------------------------------------
// loading and standard families

/// Lines "u v w" with w an integer, fraction or decimal literal; '#' starts a comment.
inline WeightedGraph parse_graph(std::istream& in) {
    WeightedGraph::Builder b;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream fields(line);
        std::string u, v, w, extra;
        if (!(fields >> u)) continue;
        if (!(fields >> v >> w) || (fields >> extra))
            throw ValidationError("graph line " + std::to_string(line_no) + ": expected 'u v w'");
        try {
            b.add_edge(u, v, parse_rational(w));
        } catch (const ValidationError& e) {
            throw ValidationError("graph line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return std::move(b).build();
}

inline WeightedGraph load_graph(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open graph file '" + path + "'");
    return parse_graph(in);
}

/// Text form accepted by parse_graph; each edge written once.
inline std::string format_graph(const WeightedGraph& g) {
    std::string out;
    for (Vertex x = 0; x < g.vertex_count(); ++x)
        for (const auto& nb : g.neighbors(x))
            if (x < nb.vertex) out += g.name(x) + ' ' + g.name(nb.vertex) + ' ' + nb.weight.get_str() + '\n';
    return out;
}

inline WeightedGraph path_graph(std::size_t count, const Rational& w = 1) {
    if (count < 2) throw ValidationError("a path needs at least two vertices");
    WeightedGraph::Builder b;
    for (std::size_t i = 0; i + 1 < count; ++i) b.add_edge(std::to_string(i), std::to_string(i + 1), w);
    return std::move(b).build();
}

/// width x height grid, vertex names "i,j"
inline WeightedGraph grid_graph(std::size_t width, std::size_t height) {
    if (width * height < 2) throw ValidationError("grid needs at least two vertices");
    WeightedGraph::Builder b;
    auto name = [](std::size_t i, std::size_t j) { return std::to_string(i) + "," + std::to_string(j); };
    for (std::size_t i = 0; i < width; ++i)
        for (std::size_t j = 0; j < height; ++j) {
            if (i + 1 < width) b.add_edge(name(i, j), name(i + 1, j), 1);
            if (j + 1 < height) b.add_edge(name(i, j), name(i, j + 1), 1);
        }
    return std::move(b).build();
}

/// K_{1,leaves}; the centre is vertex "0".
inline WeightedGraph star_graph(std::size_t leaves) {
    if (leaves == 0) throw ValidationError("a star needs at least one leaf");
    WeightedGraph::Builder b;
    for (std::size_t i = 1; i <= leaves; ++i) b.add_edge("0", std::to_string(i), 1);
    return std::move(b).build();
}

/// Small positive rational p/q with 1 <= p, q <= 6.
template <class Rng>
Rational random_weight(Rng& rng) {
    std::uniform_int_distribution<long> d(1, 6);
    Rational w(d(rng), d(rng));
    w.canonicalize();
    return w;
}

template <class Rng>
WeightedGraph random_tree(std::size_t count, Rng& rng, bool rational_weights = true) {
    if (count < 2) throw ValidationError("a tree needs at least two vertices");
    WeightedGraph::Builder b;
    for (std::size_t i = 1; i < count; ++i) {
        std::uniform_int_distribution<std::size_t> parent(0, i - 1);
        b.add_edge(std::to_string(parent(rng)), std::to_string(i), rational_weights ? random_weight(rng) : Rational(1));
    }
    return std::move(b).build();
}

/// G(count, p) on top of a random spanning tree, so no vertex is isolated.
template <class Rng>
WeightedGraph random_graph(std::size_t count, double p, Rng& rng) {
    if (count < 2) throw ValidationError("a random graph needs at least two vertices");
    WeightedGraph::Builder b;
    std::vector<std::vector<bool>> used(count, std::vector<bool>(count, false));
    for (std::size_t i = 1; i < count; ++i) {
        std::uniform_int_distribution<std::size_t> parent(0, i - 1);
        const std::size_t j = parent(rng);
        used[i][j] = used[j][i] = true;
        b.add_edge(std::to_string(j), std::to_string(i), random_weight(rng));
    }
    std::bernoulli_distribution coin(p);
    for (std::size_t i = 0; i < count; ++i)
        for (std::size_t j = i + 1; j < count; ++j)
            if (!used[i][j] && coin(rng)) b.add_edge(std::to_string(i), std::to_string(j), random_weight(rng));
    return std::move(b).build();
}

inline std::string lattice_point_name(const LatticePoint& p) {
    std::string s;
    for (std::size_t i = 0; i < p.size(); ++i) s += (i ? "," : "") + std::to_string(p[i]);
    return s;
}

/// The box [-radius, radius]^n of (Z^n, S) plus every lattice neighbour of a box point. Box
/// points keep their full S-neighbourhood and are interior; the added halo is not.
inline WeightedGraph lattice_box_graph(const GeneratingSet& gens, std::int64_t radius) {
    const std::size_t n = gens.dimension();
    if (radius < 0) throw ValidationError("box radius must be nonnegative");
    WeightedGraph::Builder b;
    std::vector<LatticePoint> coords;
    std::map<LatticePoint, Vertex> ids;
    auto vertex_of = [&](const LatticePoint& p) {
        auto [it, inserted] = ids.try_emplace(p, coords.size());
        if (inserted) {
            coords.push_back(p);
            b.add_vertex(lattice_point_name(p));
        }
        return it->second;
    };
    auto in_box = [radius](const LatticePoint& p) {
        return std::all_of(p.begin(), p.end(), [radius](std::int64_t v) { return v >= -radius && v <= radius; });
    };
    LatticePoint p(n, -radius);
    std::vector<LatticePoint> box;
    while (true) {
        box.push_back(p);
        std::size_t i = 0;
        while (i < n && p[i] == radius) p[i++] = -radius;
        if (i == n) break;
        ++p[i];
    }
    for (const auto& x : box) vertex_of(x);
    std::vector<std::pair<LatticePoint, LatticePoint>> edges;
    for (const auto& x : box)
        for (const auto& s : gens.generators()) {
            LatticePoint y(n);
            for (std::size_t i = 0; i < n; ++i) y[i] = x[i] + s[i];
            vertex_of(y);
            if (!in_box(y) || x < y) edges.emplace_back(x, y);
        }
    for (const auto& [x, y] : edges) b.add_edge(lattice_point_name(x), lattice_point_name(y), 1);
    for (std::size_t v = 0; v < coords.size(); ++v) b.set_interior(v, in_box(coords[v]));
    b.set_coordinates(coords);
    return std::move(b).build();
}

// ---------------------------------------------------------------------------
// vertex functions and the difference calculus

/// f: V -> T. T = Rational is the exact mode, T = double the float mode; modes never mix.
template <class T>
struct VertexFunction {
    std::vector<T> values;

    VertexFunction() = default;
    explicit VertexFunction(std::size_t size) : values(size, T(0)) {}
    explicit VertexFunction(std::vector<T> v) : values(std::move(v)) {}

    std::size_t size() const noexcept { return values.size(); }
    T& operator[](Vertex x) { return values[x]; }
    const T& operator[](Vertex x) const { return values[x]; }
    friend bool operator==(const VertexFunction&, const VertexFunction&) = default;
};

namespace detail {

template <class T>
T scalar(const Rational& q) {
    if constexpr (std::is_same_v<T, double>)
        return q.get_d();
    else
        return T(q);
}

template <class T>
void check_size(const WeightedGraph& g, const VertexFunction<T>& f) {
    if (f.size() != g.vertex_count()) throw DimensionMismatch(g.vertex_count(), f.size());
}

}  // namespace detail

/// (Delta f)(x) = sum_{y~x} (w_xy / mu_x) (f(y) - f(x))
template <class T>
VertexFunction<T> graph_laplacian(const WeightedGraph& g, const VertexFunction<T>& f) {
    detail::check_size(g, f);
    VertexFunction<T> out(g.vertex_count());
    for (Vertex x = 0; x < g.vertex_count(); ++x) {
        T acc = 0;
        for (const auto& nb : g.neighbors(x)) acc += detail::scalar<T>(nb.weight) * (f[nb.vertex] - f[x]);
        out[x] = acc / detail::scalar<T>(g.mu(x));
    }
    return out;
}

/// Gamma(f)(x) = 1/2 sum_y (w_xy / mu_x) (f(y) - f(x))^2
template <class T>
VertexFunction<T> gamma(const WeightedGraph& g, const VertexFunction<T>& f) {
    detail::check_size(g, f);
    VertexFunction<T> out(g.vertex_count());
    for (Vertex x = 0; x < g.vertex_count(); ++x) {
        T acc = 0;
        for (const auto& nb : g.neighbors(x)) {
            const T d = f[nb.vertex] - f[x];
            acc += detail::scalar<T>(nb.weight) * d * d;
        }
        out[x] = acc / (2 * detail::scalar<T>(g.mu(x)));
    }
    return out;
}

/// 1/2 sum_{x,y} w_xy grad f grad g + sum_x Delta f(x) g(x) mu_x, which vanishes for finitely
/// supported g.
template <class T>
T green_identity_residual(const WeightedGraph& g, const VertexFunction<T>& f, const VertexFunction<T>& h) {
    detail::check_size(g, f);
    detail::check_size(g, h);
    for (Vertex x = 0; x < g.vertex_count(); ++x)
        if (h[x] != 0 && !g.is_interior(x))
            throw SupportTouchesBoundary("test function is nonzero on truncated vertex '" + g.name(x) + "'");
    T energy = 0;
    for (Vertex x = 0; x < g.vertex_count(); ++x)
        for (const auto& nb : g.neighbors(x))
            energy += detail::scalar<T>(nb.weight) * (f[nb.vertex] - f[x]) * (h[nb.vertex] - h[x]);
    const auto lap = graph_laplacian(g, f);
    T pairing = 0;
    for (Vertex x = 0; x < g.vertex_count(); ++x) pairing += lap[x] * h[x] * detail::scalar<T>(g.mu(x));
    return energy / 2 + pairing;
}

/// grad_xy(fg) - f(x) grad_xy g - g(y) grad_xy f
template <class T>
T product_rule_residual(const WeightedGraph& g, const VertexFunction<T>& f, const VertexFunction<T>& h, Vertex x, Vertex y) {
    detail::check_size(g, f);
    detail::check_size(g, h);
    if (!g.weight(x, y)) throw NotAnEdge("vertices '" + g.name(x) + "' and '" + g.name(y) + "' are not adjacent");
    const T lhs = f[y] * h[y] - f[x] * h[x];
    return lhs - f[x] * (h[y] - h[x]) - h[y] * (f[y] - f[x]);
}

/// sum_x Delta f(x) mu_x; zero on every finite graph.
template <class T>
T divergence_residual(const WeightedGraph& g, const VertexFunction<T>& f) {
    const auto lap = graph_laplacian(g, f);
    T total = 0;
    for (Vertex x = 0; x < g.vertex_count(); ++x) total += lap[x] * detail::scalar<T>(g.mu(x));
    return total;
}

/// Combinatorial distance from x0 by breadth-first search; -1 for unreachable vertices.
inline std::vector<long> distances_from(const WeightedGraph& g, Vertex x0) {
    std::vector<long> dist(g.vertex_count(), -1);
    std::queue<Vertex> queue;
    dist.at(x0) = 0;
    queue.push(x0);
    while (!queue.empty()) {
        const Vertex x = queue.front();
        queue.pop();
        for (const auto& nb : g.neighbors(x))
            if (dist[nb.vertex] < 0) {
                dist[nb.vertex] = dist[x] + 1;
                queue.push(nb.vertex);
            }
    }
    return dist;
}

inline long floor_of(const Rational& r) {
    Integer f;
    mpz_fdiv_q(f.get_mpz_t(), r.get_num_mpz_t(), r.get_den_mpz_t());
    return f.get_si();
}

/// B_R(x0) = {y : d(x0, y) <= R}
inline std::vector<Vertex> ball(const WeightedGraph& g, Vertex x0, const Rational& radius) {
    const long r = floor_of(radius);
    const auto dist = distances_from(g, x0);
    std::vector<Vertex> out;
    for (Vertex y = 0; y < g.vertex_count(); ++y)
        if (dist[y] >= 0 && dist[y] <= r) out.push_back(y);
    return out;
}

inline Rational ball_measure(const WeightedGraph& g, Vertex x0, const Rational& radius) {
    Rational total = 0;
    for (Vertex y : ball(g, x0, radius)) total += g.mu(y);
    return total;
}

/// eta(x) = 0 v (2 - d(x, x0)/R) ^ 1. Its three defining bounds (eta = 1 on B_R, eta = 0 off
/// B_2R, |grad eta| <= 2/R on edges) are checked before returning.
inline VertexFunction<Rational> cutoff(const WeightedGraph& g, Vertex x0, const Rational& radius) {
    if (radius < 1) throw ValidationError("cut-off radius must be >= 1, got " + radius.get_str());
    const auto dist = distances_from(g, x0);
    VertexFunction<Rational> eta(g.vertex_count());
    for (Vertex x = 0; x < g.vertex_count(); ++x) {
        if (dist[x] < 0) continue;
        Rational v = 2 - Rational(dist[x]) / radius;
        eta[x] = v < 0 ? Rational(0) : (v > 1 ? Rational(1) : v);
    }
    const Rational slope = 2 / radius;
    for (Vertex x = 0; x < g.vertex_count(); ++x) {
        const bool reachable = dist[x] >= 0;
        if (reachable && Rational(dist[x]) <= radius && eta[x] != 1)
            throw InternalInconsistency("cut-off differs from 1 inside B_R");
        if ((!reachable || Rational(dist[x]) > 2 * radius) && eta[x] != 0)
            throw InternalInconsistency("cut-off nonzero outside B_2R");
        for (const auto& nb : g.neighbors(x))
            if (abs(eta[nb.vertex] - eta[x]) > slope) throw InternalInconsistency("cut-off gradient exceeds 2/R");
    }
    return eta;
}

struct VolumeGrowth {
    double alpha_hat = 0;
    std::vector<std::pair<long, Rational>> table;  // (R, mu(B_R)), R = 1..R_max
};

/// mu(B_R(x0)) for R = 1..R_max and the least-squares slope of log mu(B_R) against log(1+R).
inline VolumeGrowth volume_growth_fit(const WeightedGraph& g, Vertex x0, long r_max) {
    if (r_max < 2) throw ValidationError("R_max must be at least 2");
    if (x0 >= g.vertex_count()) throw ValidationError("unknown vertex index " + std::to_string(x0));
    const auto dist = distances_from(g, x0);
    VolumeGrowth out;
    std::vector<Rational> shell(r_max + 1, Rational(0));
    for (Vertex y = 0; y < g.vertex_count(); ++y)
        if (dist[y] >= 0 && dist[y] <= r_max) shell[dist[y]] += g.mu(y);
    Rational running = shell[0];
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (long r = 1; r <= r_max; ++r) {
        running += shell[r];
        out.table.emplace_back(r, running);
        const double lx = std::log1p(static_cast<double>(r));
        const double ly = std::log(running.get_d());
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double count = static_cast<double>(r_max);
    out.alpha_hat = (count * sxy - sx * sy) / (count * sxx - sx * sx);
    return out;
}

}  // namespace caloric
