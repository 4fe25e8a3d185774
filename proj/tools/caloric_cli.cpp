// Command-line front end: dimension tables, bases, Poisson solves, Caccioppoli sweeps and
// graph diagnostics. Every command writes JSON or TSV to stdout and diagnostics to stderr.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include "caloric/caloric.hpp"

using namespace caloric;
using json = nlohmann::ordered_json;

namespace {

enum Exit { ok = 0, usage = 1, validation = 2, internal = 3, tolerance = 4 };

/// One table: a header and rows of preformatted cells. Rendered as TSV or a JSON array of objects.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<json>> rows;

    explicit Table(std::vector<std::string> columns) : header(std::move(columns)) {}

    void add(std::vector<json> row) { rows.push_back(std::move(row)); }

    json to_json() const {
        json out = json::array();
        for (const auto& row : rows) {
            json obj = json::object();
            for (std::size_t i = 0; i < header.size(); ++i) obj[header[i]] = row[i];
            out.push_back(std::move(obj));
        }
        return out;
    }

    void write_tsv(std::ostream& os) const {
        for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "\t" : "") << header[i];
        os << '\n';
        for (const auto& row : rows) {
            for (std::size_t i = 0; i < row.size(); ++i) {
                os << (i ? "\t" : "");
                if (row[i].is_string())
                    os << row[i].get<std::string>();
                else
                    os << row[i].dump();
            }
            os << '\n';
        }
    }
};

struct Output {
    std::string format = "tsv";

    /// meta goes into the JSON object only; TSV carries the table alone.
    void emit(json meta, const Table& table, const std::string& key = "rows") const {
        if (format == "json") {
            meta[key] = table.to_json();
            std::cout << meta.dump(2) << '\n';
        } else {
            table.write_tsv(std::cout);
        }
    }
};

std::size_t thread_count() {
    if (const char* env = std::getenv("CALORIC_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<std::size_t>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs job(i) for i < count on up to CALORIC_THREADS workers; results keep index order, and
/// the first exception (by index) is rethrown.
template <class R, class F>
std::vector<R> parallel_map(std::size_t count, F job) {
    std::vector<std::optional<R>> results(count);
    std::vector<std::exception_ptr> errors(count);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next++) < count;) {
            try {
                results[i].emplace(job(i));
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const std::size_t workers = std::min(thread_count(), std::max<std::size_t>(count, 1));
    std::vector<std::thread> pool;
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    std::vector<R> out;
    for (auto& r : results) out.push_back(std::move(*r));
    return out;
}

GeneratingSet generating_set(const std::string& path, std::size_t n) {
    if (path.empty()) return GeneratingSet::standard(n);
    auto s = GeneratingSet::load(path);
    if (s.dimension() != n) throw DimensionMismatch(n, s.dimension());
    return s;
}

json generators_json(const GeneratingSet& s) {
    json out = json::array();
    for (const auto& g : s.generators()) out.push_back(g);
    return out;
}

std::vector<Rational> parse_radii(const std::vector<std::string>& items) {
    std::vector<Rational> radii;
    for (const auto& item : items) {
        std::stringstream ss(item);
        std::string piece;
        while (std::getline(ss, piece, ',')) {
            if (piece.empty()) continue;
            const auto r = parse_rational(piece);
            if (r < 1) throw ValidationError("radius " + piece + " rejected: R >= 1 required");
            radii.push_back(r);
        }
    }
    if (radii.empty()) throw ValidationError("no radii given");
    return radii;
}

/// "1.2345678901234567e+4321" for a value that may not fit in a double
std::string format_scaled(const ScaledValue& v) {
    if (v.is_zero()) return "0";
    if (v.log_scale < 600) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.17g", v.value());
        return buf;
    }
    const double l10 = v.log() / std::log(10.0);
    const double e = std::floor(l10);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.16fe+%.0f", std::pow(10.0, l10 - e), e);
    return buf;
}

std::string format_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

// ---------------------------------------------------------------------------
// graph sources shared by checks and volume

struct GraphSource {
    std::string path, family;
    std::size_t size = 5;
    std::uint64_t seed = 1;

    void add_options(CLI::App* cmd) {
        auto* file = cmd->add_option("--graph", path, "graph file with lines 'u v w'");
        auto* fam = cmd->add_option("--family", family, "built-in graph instead of a file")
                        ->check(CLI::IsMember({"path", "grid", "star", "tree", "random"}));
        file->excludes(fam);
        cmd->add_option("--size", size, "family size: vertices, or grid side length")->check(CLI::PositiveNumber);
        cmd->add_option("--seed", seed, "seed for random families and test functions");
    }

    WeightedGraph load() const {
        if (!path.empty()) return load_graph(path);
        std::mt19937_64 rng(seed);
        if (family == "path") return path_graph(size);
        if (family == "grid") return grid_graph(size, size);
        if (family == "star") return star_graph(size);
        if (family == "tree") return random_tree(size, rng);
        if (family == "random") return random_graph(size, 0.3, rng);
        throw ValidationError("give --graph FILE or --family NAME");
    }

    std::string label() const { return path.empty() ? family : path; }
};

// ---------------------------------------------------------------------------
// commands

struct DimsArgs {
    std::size_t n = 1;
    int k_max = 0;
    std::string generators;
};

int cmd_dims(const DimsArgs& a, const Output& out) {
    if (a.n < 1) throw ValidationError("n must be at least 1");
    if (a.k_max < 0) throw ValidationError("k-max must be nonnegative");
    const auto s = generating_set(a.generators, a.n);
    struct Row {
        std::size_t harmonic, caloric;
        std::optional<BoundReport> bound;
    };
    const auto rows = parallel_map<Row>(static_cast<std::size_t>(a.k_max) + 1, [&](std::size_t i) {
        const int k = static_cast<int>(i);
        Row r{harmonic_basis(s, k).dimension, caloric_basis(s, k).dimension, std::nullopt};
        if (k >= 2 && k % 2 == 0) r.bound = bound_check(s, k / 2);
        return r;
    });
    Table t({"k", "dim_P", "dim_P_hat", "harmonic", "caloric", "formula", "match", "bound"});
    bool all_match = true;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const int k = static_cast<int>(i);
        const auto formula = caloric_dimension_formula(a.n, k);
        const bool match = formula == rows[i].caloric;
        all_match = all_match && match;
        std::string bound = "-";
        if (rows[i].bound) bound = rows[i].bound->satisfied ? "holds" : "fails";
        t.add({k, polynomial_space_dimension(a.n, k).get_str(), parabolic_space_dimension(a.n, k).get_str(), rows[i].harmonic,
               rows[i].caloric, formula, match, bound});
    }
    out.emit({{"command", "dims"}, {"n", a.n}, {"k_max", a.k_max}, {"generators", generators_json(s)}}, t);
    if (!all_match) {
        std::cerr << "caloric dimension differs from the counting formula\n";
        return internal;
    }
    return ok;
}

struct BasisArgs {
    std::string kind;
    std::size_t n = 1;
    int k = 0;
    std::string generators;
};

int cmd_basis(const BasisArgs& a, const Output& out) {
    if (a.k < 0) throw ValidationError("k must be nonnegative");
    const auto s = generating_set(a.generators, a.n);
    const auto b = a.kind == "harmonic" ? harmonic_basis(s, a.k) : caloric_basis(s, a.k);
    const auto op = a.kind == "harmonic" ? LatticeOperator::laplacian : LatticeOperator::heat;
    Table t({"index", "polynomial"});
    for (std::size_t i = 0; i < b.polynomials.size(); ++i) {
        const auto& p = b.polynomials[i];
        const auto image = op == LatticeOperator::heat ? heat_operator(s, p) : lattice_laplacian(s, p);
        if (!image.is_zero()) throw InternalInconsistency("basis element " + format(p) + " is not in the kernel");
        t.add({i, format(p)});
    }
    out.emit({{"command", "basis"}, {"kind", a.kind}, {"n", a.n}, {"k", a.k}, {"dimension", b.dimension}}, t, "basis");
    return ok;
}

struct PoissonArgs {
    std::string g;
    std::size_t n = 1;
    std::string generators;
};

int cmd_poisson(const PoissonArgs& a, const Output& out) {
    const auto s = generating_set(a.generators, a.n);
    const auto g = parse_polynomial(a.g, a.n);
    const auto u = poisson_solve(s, g);
    if (heat_operator(s, u) != g) throw InternalInconsistency("re-applying the heat operator does not give g back");
    Table t({"g", "u"});
    t.add({format(g), format(u)});
    out.emit({{"command", "poisson"}, {"n", a.n}, {"verified", true}}, t);
    return ok;
}

struct CaccioppoliArgs {
    std::string u, generators, graph, x0;
    std::size_t n = 1;
    std::int64_t box = -1;
    long spectral_index = -1;
    std::vector<std::string> radii;
    unsigned dilation = 36;
};

int cmd_caccioppoli(const CaccioppoliArgs& a, const Output& out) {
    const auto radii = parse_radii(a.radii);
    Table t({"R", "gradient_term", "time_term", "numerator", "denominator", "ratio"});
    double max_ratio = 0;
    json meta{{"command", "caccioppoli"}, {"dilation", a.dilation}};

    if (!a.graph.empty()) {
        if (a.spectral_index < 0) throw ValidationError("--graph needs --spectral-index");
        const auto g = load_graph(a.graph);
        const auto fields = spectral_ancient_solutions(g, static_cast<std::size_t>(a.spectral_index) + 1);
        const auto& field = fields.back();
        const Vertex center = a.x0.empty() ? 0 : g.vertex(a.x0);
        const auto reports = parallel_map<CaccioppoliReport<ScaledValue>>(radii.size(), [&](std::size_t i) {
            try {
                return caccioppoli_ratio(g, field, {center, radii[i], a.dilation});
            } catch (const BallTruncated& e) {
                throw BallTruncated("radius " + radii[i].get_str() + ": " + e.what());
            }
        });
        for (const auto& r : reports) {
            max_ratio = std::max(max_ratio, r.ratio);
            t.add({r.radius.get_str(), format_scaled(r.gradient_term), format_scaled(r.time_term),
                   format_scaled(r.gradient_term + r.time_term), format_scaled(r.denominator), format_double(r.ratio)});
        }
        meta["graph"] = a.graph;
        meta["spectral_index"] = a.spectral_index;
        meta["theta"] = field.modes[0].theta;
        meta["x0"] = g.name(center);
    } else {
        if (a.u.empty()) throw ValidationError("give --u POLY (with --box) or --graph FILE --spectral-index J");
        if (a.box < 0) throw ValidationError("--u needs --box RADIUS");
        const auto s = generating_set(a.generators, a.n);
        const PolynomialField field(parse_polynomial(a.u, a.n), s);
        if (!field.is_caloric()) throw NotCaloric("u is not caloric: " + format(field.u));
        const LatticeBox box(s, a.box);
        const auto reports = parallel_map<CaccioppoliReport<Rational>>(radii.size(), [&](std::size_t i) {
            try {
                return caccioppoli_ratio(box, field, {LatticePoint(a.n, 0), radii[i], a.dilation});
            } catch (const BallTruncated& e) {
                throw BallTruncated("radius " + radii[i].get_str() + ": " + e.what());
            }
        });
        for (const auto& r : reports) {
            max_ratio = std::max(max_ratio, r.ratio);
            t.add({r.radius.get_str(), r.gradient_term.get_str(), r.time_term.get_str(),
                   Rational(r.gradient_term + r.time_term).get_str(), r.denominator.get_str(), exact_ratio(r).get_str()});
        }
        meta["u"] = format(field.u);
        meta["n"] = a.n;
        meta["box"] = a.box;
    }
    meta["max_ratio"] = max_ratio;
    out.emit(meta, t);
    if (out.format != "json") std::cerr << "max ratio " << format_double(max_ratio) << '\n';
    return ok;
}

/// Exact identities on a graph with seeded random rational test functions.
int cmd_checks(const GraphSource& src, int rounds, const Output& out) {
    const auto g = src.load();
    std::mt19937_64 rng(src.seed ^ 0x9e3779b97f4a7c15ull);
    std::uniform_int_distribution<long> num(-9, 9), den(1, 5);
    auto random_function = [&] {
        VertexFunction<Rational> f(g.vertex_count());
        for (auto& v : f.values) {
            v = Rational(num(rng), den(rng));
            v.canonicalize();
        }
        return f;
    };

    struct Check {
        std::string name;
        std::size_t instances = 0;
        Rational worst = 0;
        bool pass = true;
    };
    Check green{"green_identity"}, product{"product_rule"}, gam{"gamma_nonnegative"}, cut{"cutoff_bounds"},
        div{"divergence"};
    for (int round = 0; round < rounds; ++round) {
        const auto f = random_function(), h = random_function();
        const Rational rg = abs(green_identity_residual(g, f, h));
        ++green.instances;
        green.worst = std::max(green.worst, rg);
        for (Vertex x = 0; x < g.vertex_count(); ++x)
            for (const auto& nb : g.neighbors(x)) {
                const Rational rp = abs(product_rule_residual(g, f, h, x, nb.vertex));
                ++product.instances;
                product.worst = std::max(product.worst, rp);
            }
        for (const auto& v : gamma(g, f).values) {
            ++gam.instances;
            if (v < 0) gam.worst = std::max(gam.worst, Rational(-v));
        }
        const Rational rd = abs(divergence_residual(g, f));
        ++div.instances;
        div.worst = std::max(div.worst, rd);
    }
    const auto centers = std::min<std::size_t>(g.vertex_count(), 4);
    for (Vertex x0 = 0; x0 < centers; ++x0)
        for (const Rational& r : {Rational(1), Rational(3, 2), Rational(2), Rational(3)}) {
            ++cut.instances;
            try {
                cutoff(g, x0, r);
            } catch (const InternalInconsistency&) {
                cut.pass = false;
            }
        }
    Table t({"check", "instances", "max_residual", "status"});
    bool all = true;
    for (auto* c : {&green, &product, &gam, &cut, &div}) {
        c->pass = c->pass && c->worst == 0;
        all = all && c->pass;
        t.add({c->name, c->instances, c->worst.get_str(), c->pass ? "pass" : "fail"});
    }
    out.emit({{"command", "checks"},
              {"graph", src.label()},
              {"vertices", g.vertex_count()},
              {"edges", g.edge_count()},
              {"seed", src.seed},
              {"all_pass", all}},
             t, "checks");
    return all ? ok : internal;
}

int cmd_volume(const GraphSource& src, const std::string& x0, long r_max, const Output& out) {
    const auto g = src.load();
    const Vertex center = x0.empty() ? 0 : g.vertex(x0);
    const auto fit = volume_growth_fit(g, center, r_max);
    Table t({"R", "mu_ball"});
    for (const auto& [r, m] : fit.table) t.add({r, m.get_str()});
    out.emit({{"command", "volume"}, {"graph", src.label()}, {"x0", g.name(center)}, {"r_max", r_max},
              {"alpha_hat", fit.alpha_hat}},
             t);
    if (out.format != "json") std::cerr << "alpha_hat " << format_double(fit.alpha_hat) << '\n';
    return ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Caloric and harmonic polynomials on lattices, and heat-equation diagnostics on weighted graphs"};
    app.require_subcommand(1);
    Output out;
    app.add_option("--output", out.format, "json or tsv")->check(CLI::IsMember({"json", "tsv"}));

    DimsArgs dims;
    auto* c_dims = app.add_subcommand("dims", "dimension table for k = 0..k-max");
    c_dims->add_option("--n", dims.n, "lattice dimension")->required();
    c_dims->add_option("--k-max", dims.k_max, "largest parabolic degree")->required();
    c_dims->add_option("--generators", dims.generators, "generating-set file (default: standard basis and negatives)");

    BasisArgs basis;
    auto* c_basis = app.add_subcommand("basis", "basis of harmonic or caloric polynomials");
    c_basis->add_option("--kind", basis.kind)->required()->check(CLI::IsMember({"harmonic", "caloric"}));
    c_basis->add_option("--n", basis.n)->required();
    c_basis->add_option("--k", basis.k)->required();
    c_basis->add_option("--generators", basis.generators);

    PoissonArgs poisson;
    auto* c_poisson = app.add_subcommand("poisson", "solve (Delta - d/dt) u = g");
    c_poisson->add_option("--g", poisson.g)->required();
    c_poisson->add_option("--n", poisson.n)->required();
    c_poisson->add_option("--generators", poisson.generators);

    CaccioppoliArgs cacc;
    auto* c_cacc = app.add_subcommand("caccioppoli", "energy ratio sweep over radii");
    c_cacc->add_option("--u", cacc.u, "caloric polynomial on the lattice");
    c_cacc->add_option("--n", cacc.n);
    c_cacc->add_option("--box", cacc.box, "lattice box radius");
    c_cacc->add_option("--generators", cacc.generators);
    c_cacc->add_option("--graph", cacc.graph, "graph file for a spectral solution");
    c_cacc->add_option("--spectral-index", cacc.spectral_index, "mode index, smallest |theta| first");
    c_cacc->add_option("--x0", cacc.x0, "centre vertex name");
    c_cacc->add_option("--radii", cacc.radii, "radii, comma separated, each >= 1")->required();
    c_cacc->add_option("--dilation", cacc.dilation)->check(CLI::PositiveNumber);

    GraphSource check_src;
    int rounds = 20;
    auto* c_checks = app.add_subcommand("checks", "exact identity checks on a graph");
    check_src.add_options(c_checks);
    c_checks->add_option("--rounds", rounds, "random (f, g) pairs")->check(CLI::PositiveNumber);

    GraphSource vol_src;
    std::string x0;
    long r_max = 32;
    auto* c_volume = app.add_subcommand("volume", "ball measures and fitted growth exponent");
    vol_src.add_options(c_volume);
    c_volume->add_option("--x0", x0, "centre vertex name");
    c_volume->add_option("--r-max", r_max);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? ok : usage;
    }

    try {
        if (*c_dims) return cmd_dims(dims, out);
        if (*c_basis) return cmd_basis(basis, out);
        if (*c_poisson) return cmd_poisson(poisson, out);
        if (*c_cacc) return cmd_caccioppoli(cacc, out);
        if (*c_checks) return cmd_checks(check_src, rounds, out);
        if (*c_volume) return cmd_volume(vol_src, x0, r_max, out);
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return validation;
    } catch (const SpectralFailure& e) {
        std::cerr << "error: " << e.what() << '\n';
        return tolerance;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return internal;
    }
    return usage;
}
