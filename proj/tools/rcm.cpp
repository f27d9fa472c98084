#include <algorithm>
#include <complex>
#include <fstream>
#include <iostream>
#include <memory>
#include <numbers>
#include <sstream>
#include <set>
#include <stdexcept>
#include <tuple>

#include "CLI11.hpp"
#include "cli_support.hpp"
#include "json.hpp"
#include "rcm/coupling.hpp"
#include "rcm/domain_io.hpp"
#include "rcm/exact.hpp"
#include "rcm/flower.hpp"
#include "rcm/observables.hpp"
#include "rcm/parafermion.hpp"
#include "rcm/sampler.hpp"
#include "rcm/scaling.hpp"
#include "rcm/union_find.hpp"
#include "verify.hpp"

using json = nlohmann::ordered_json;
using namespace rcm;

namespace {

// Exit code for bad arguments and invalid parameters.
constexpr int kUsage = 2;

struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Options shared by every data-producing subcommand.
struct Common {
    std::uint64_t seed = 1;
    std::string out;
    std::string record;
    int jobs = 1;
};

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("--seed", c.seed, "Base seed")->capture_default_str();
    sub->add_option("-o,--out", c.out, "Data file (default: standard output)");
    sub->add_option("--record", c.record, "Run record file (default: <out>.run.json when --out is given)");
}

struct ModelArgs {
    double q = 2.0;
    std::string p = "pc";
    double h = 0.0;

    ModelParams resolve() const {
        ModelParams mp{cli::parse_p(p, q), q, h};
        mp.validate();
        return mp;
    }
};

void add_model(CLI::App* sub, ModelArgs& m, bool with_h = true) {
    sub->add_option("--q", m.q, "Cluster weight q >= 1")->capture_default_str();
    sub->add_option("--p", m.p, "Edge parameter in (0,1), or 'pc'")->capture_default_str();
    if (with_h) sub->add_option("--h", m.h, "Ghost field h >= 0")->capture_default_str();
}

BoundaryCondition parse_bc(const std::string& name, const Domain& d) {
    if (name == "free") return BoundaryCondition::free(d);
    if (name == "wired") return BoundaryCondition::wired(d);
    throw UsageError("boundary condition must be 'free' or 'wired'");
}

sampler::Algorithm parse_algo(const std::string& name, const ModelParams& mp) {
    if (name == "auto") return observables::default_algorithm(mp);
    return sampler::parse_algorithm(name);
}

std::vector<std::string> domain_inputs(const std::string& spec) {
    if (spec.rfind("file:", 0) == 0) return {spec.substr(5)};
    return {};
}

// Parameter map of a parsed subcommand: every option with its given or default value.
std::map<std::string, std::string> param_map(const CLI::App* sub) {
    static const std::set<std::string> skip{"help", "help-all", "out", "record", "jobs"};
    std::map<std::string, std::string> out;
    for (const CLI::Option* opt : sub->get_options()) {
        const std::string name = opt->get_single_name();
        if (name.empty() || skip.count(name)) continue;
        if (opt->count() > 0) {
            std::string joined;
            for (const auto& r : opt->results()) joined += (joined.empty() ? "" : ",") + r;
            out[name] = joined;
        } else {
            out[name] = opt->get_default_str();
        }
    }
    return out;
}

// Owns the data stream and the run record of one invocation.
class Output {
public:
    Output(const CLI::App* sub, const Common& c, std::vector<std::string> inputs) : common_(c) {
        rec_.command = sub->get_name();
        rec_.params = param_map(sub);
        rec_.seed = c.seed;
        rec_.input_files = std::move(inputs);
        rec_.started = cli::utc_now();
        rec_.seal();
        if (!c.out.empty()) {
            file_ = std::make_unique<std::ofstream>(c.out, std::ios::binary);
            if (!*file_) throw std::runtime_error("cannot write " + c.out);
            rec_.outputs.push_back(c.out);
        }
    }

    std::ostream& stream() { return file_ ? *file_ : std::cout; }
    std::string run_id() const { return rec_.id(); }

    void finish() {
        stream().flush();
        rec_.finished = cli::utc_now();
        std::string path = common_.record;
        if (path.empty() && !common_.out.empty()) path = common_.out + ".run.json";
        if (path.empty()) return;
        std::ofstream r(path, std::ios::binary);
        if (!r) throw std::runtime_error("cannot write " + path);
        r << rec_.to_json();
    }

private:
    Common common_;
    cli::RunRecord rec_;
    std::unique_ptr<std::ofstream> file_;
};

json vertex_json(const Vertex& v) { return json::array({v.x, v.y}); }

json estimate_json(const Estimate& e) {
    return json{{"mean", e.mean}, {"stderr", e.std_error}, {"n", e.n_samples}, {"seed", e.seed},
                {"burn_in", e.burn_in}, {"batches", e.n_batches}};
}

// ---------------------------------------------------------------------------
// oracle

struct OracleArgs {
    Common common;
    ModelArgs model;
    std::string domain = "box:1";
    std::string bc = "free";
    int cap = 24;
};

int run_oracle(const CLI::App* sub, const OracleArgs& a) {
    auto d = share(parse_domain_spec(a.domain));
    const auto mp = a.model.resolve();
    Output out(sub, a.common, domain_inputs(a.domain));
    exact::ExactMeasure m(d, parse_bc(a.bc, *d), mp, {a.cap});
    json j;
    j["run_id"] = out.run_id();
    j["domain"] = a.domain;
    j["vertices"] = d->num_vertices();
    j["edges"] = d->num_edges();
    j["q"] = mp.q;
    j["p"] = mp.p;
    j["h"] = mp.h;
    j["bc"] = a.bc;
    j["log_partition"] = m.log_partition_function();
    json marg = json::array();
    const auto pm = m.edge_marginals();
    for (int e = 0; e < d->num_edges(); ++e)
        marg.push_back({{"edge", e}, {"u", vertex_json(d->vertex(d->edge(e).u))},
                        {"v", vertex_json(d->vertex(d->edge(e).v))}, {"p_open", pm[e]}});
    j["edge_marginals"] = marg;
    const auto& bb = d->bbox();
    if (d->num_vertices() == bb.width() * bb.height() && bb.width() > 1 && bb.height() > 1) {
        const Quad quad = make_rectangle_quad(bb.x_min, bb.y_min, bb.x_max, bb.y_max);
        j["horizontal_crossing"] = m.probability(events::crossing(quad));
    }
    if (mp.h > 0.0) {
        double mag = 0.0;
        for (int v = 0; v < d->num_vertices(); ++v) mag += m.probability(events::connected_to_ghost(v));
        j["mean_ghost_connection"] = mag / d->num_vertices();
    }
    out.stream() << j.dump() << "\n";
    out.finish();
    return 0;
}

// ---------------------------------------------------------------------------
// sample

struct SampleArgs {
    Common common;
    ModelArgs model;
    std::string domain = "box:8";
    std::string bc = "free";
    std::int64_t sweeps = 10000;
    std::int64_t burn_in = -1;
    std::string algo = "auto";
    int batches = 32;
    int thin = 1;
    bool no_stream = false;
    std::vector<std::string> obs{"open_fraction", "clusters"};
};

int run_sample(const CLI::App* sub, const SampleArgs& a) {
    auto d = share(parse_domain_spec(a.domain));
    const auto mp = a.model.resolve();
    const auto bc = parse_bc(a.bc, *d);
    if (a.thin < 1) throw UsageError("--thin must be positive");
    std::vector<Observable> fs;
    for (const auto& name : a.obs) {
        if (name == "open_fraction") {
            fs.push_back([](const EdgeConfig& c) { return static_cast<double>(c.num_open()) / c.num_edges(); });
        } else if (name == "clusters") {
            fs.push_back([bc](const EdgeConfig& c) { return static_cast<double>(cluster_count(c, bc)); });
        } else if (name == "crossing") {
            const auto& bb = d->bbox();
            if (d->num_vertices() != bb.width() * bb.height()) throw UsageError("crossing needs a rectangular domain");
            const Quad quad = make_rectangle_quad(bb.x_min, bb.y_min, bb.x_max, bb.y_max);
            fs.push_back([quad](const EdgeConfig& c) { return crossing_occurs(c, quad) ? 1.0 : 0.0; });
        } else {
            throw UsageError("unknown observable '" + name + "' (open_fraction, clusters, crossing)");
        }
    }
    Output out(sub, a.common, domain_inputs(a.domain));
    sampler::RunOptions o;
    o.budget = a.sweeps;
    o.burn_in = a.burn_in;
    o.seed = a.common.seed;
    o.algo = parse_algo(a.algo, mp);
    o.batches = a.batches;
    const std::string id = out.run_id();
    if (!a.no_stream)
        o.dump = [&](std::uint64_t sweep, int k, double value) {
            if (sweep % a.thin != 0) return;
            out.stream() << json{{"sweep", sweep}, {"observable", a.obs[k]}, {"value", value}}.dump() << "\n";
        };
    const auto est = sampler::estimate_many(fs, mp, d, bc, o);
    for (std::size_t k = 0; k < est.size(); ++k) {
        json s{{"summary", a.obs[k]}};
        s.update(estimate_json(est[k]));
        s["algo"] = sampler::to_string(o.algo);
        s["run_id"] = id;
        out.stream() << s.dump() << "\n";
    }
    out.finish();
    return 0;
}

// ---------------------------------------------------------------------------
// measure

struct MeasureArgs {
    Common common;
    ModelArgs model;
    std::vector<std::string> obs{"pi1"};
    std::vector<int> R{4, 8, 16, 32};
    int r = 1;
    std::int64_t budget = 10000;
    std::int64_t burn_in = -1;
    std::string algo = "auto";
    int batches = 32;
};

const std::vector<std::string> kQuantities{"pi1", "pi4", "crossing", "delta", "delta_rR"};

int run_measure(const CLI::App* sub, const MeasureArgs& a) {
    const auto mp = a.model.resolve();
    const auto algo = parse_algo(a.algo, mp);
    if (algo == sampler::Algorithm::ChayesMachta && mp.h > 0.0) throw UsageError("cm requires h = 0");
    struct Point {
        int kind;
        int r;
        int R;
    };
    std::vector<Point> points;
    for (const auto& name : a.obs) {
        const auto it = std::find(kQuantities.begin(), kQuantities.end(), name);
        if (it == kQuantities.end()) throw UsageError("unknown observable '" + name + "' (pi1, pi4, crossing, delta, delta_rR)");
        const int kind = static_cast<int>(it - kQuantities.begin());
        const bool uses_r = name == "pi4" || name == "delta_rR";
        for (int R : a.R) {
            if (R < 1) throw UsageError("scales must be positive");
            if (uses_r && !(a.r >= 0 && a.r < R)) throw UsageError("need 0 <= r < R");
            points.push_back({kind, uses_r ? a.r : 0, R});
        }
    }
    std::sort(points.begin(), points.end(),
              [](const Point& x, const Point& y) { return std::tie(x.kind, x.r, x.R) < std::tie(y.kind, y.r, y.R); });
    points.erase(std::unique(points.begin(), points.end(),
                             [](const Point& x, const Point& y) {
                                 return x.kind == y.kind && x.r == y.r && x.R == y.R;
                             }),
                 points.end());

    Output out(sub, a.common, {});
    std::vector<Estimate> results(points.size());
    cli::parallel_for(static_cast<int>(points.size()), a.common.jobs, [&](int i) {
        const Point& pt = points[i];
        sampler::RunOptions o;
        o.budget = a.budget;
        o.burn_in = a.burn_in;
        o.algo = algo;
        o.batches = a.batches;
        // The seed of a point depends on the point alone, so subsets of a scan reproduce.
        o.seed = derive_seed(a.common.seed,
                             (static_cast<std::uint64_t>(pt.kind) << 40) | (static_cast<std::uint64_t>(pt.r) << 20) |
                                 static_cast<std::uint64_t>(pt.R));
        using namespace observables;
        switch (pt.kind) {
            case 0: results[i] = arm_probability(mp, {{1}, 0, pt.R}, o); break;
            case 1: results[i] = arm_probability(mp, {{1, 0, 1, 0}, pt.r, pt.R}, o); break;
            case 2: results[i] = box_crossing(mp, pt.R, o); break;
            case 3: results[i] = delta_edge(mp, pt.R, o); break;
            default: results[i] = delta_hat(mp, pt.r, pt.R, o).delta_rR; break;
        }
    });

    auto& s = out.stream();
    s << "quantity,q,p,h,r,R,mean,stderr,n,seed,algo,run_id\n";
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto& e = results[i];
        s << kQuantities[points[i].kind] << "," << cli::num(mp.q) << "," << cli::num(mp.p) << "," << cli::num(mp.h)
          << "," << points[i].r << "," << points[i].R << "," << cli::num(e.mean) << "," << cli::num(e.std_error) << ","
          << e.n_samples << "," << e.seed << "," << sampler::to_string(algo) << "," << out.run_id() << "\n";
    }
    out.finish();
    return 0;
}

// ---------------------------------------------------------------------------
// couple

struct CoupleArgs {
    Common common;
    ModelArgs model;
    std::string p_high;
    std::string domain = "box:1";
    std::string mode = "exact";
    std::string tree = "deterministic";
    std::string stop = "auto";
    int runs = 10;
    std::int64_t sweeps = 1000;
};

// Wirings induced on a subdomain by the open edges outside it plus the boundary wirings.
BoundaryCondition induced_on(const Domain& region, const EdgeConfig& cfg, const BoundaryCondition& bc) {
    const Domain& d = cfg.domain();
    UnionFind uf(d.num_vertices());
    for (int e = 0; e < d.num_edges(); ++e) {
        const auto& ed = d.edge(e);
        if (cfg.open(e) && region.find_edge(d.vertex(ed.u), d.vertex(ed.v)) < 0) uf.unite(ed.u, ed.v);
    }
    for (const auto& cls : bc.classes())
        for (std::size_t i = 1; i < cls.size(); ++i) uf.unite(cls[0], cls[i]);
    std::map<int, int> count;
    std::vector<int> root(region.num_vertices());
    for (int v = 0; v < region.num_vertices(); ++v) {
        const int w = d.find_vertex(region.vertex(v));
        root[v] = w < 0 ? -1 - v : uf.find(w);
        ++count[root[v]];
    }
    std::vector<int> labels(region.num_vertices(), -1);
    for (int v = 0; v < region.num_vertices(); ++v)
        if (root[v] >= 0 && count[root[v]] > 1) labels[v] = root[v];
    return BoundaryCondition(region.num_vertices(), labels, std::nullopt);
}

// Inner flower explored in omega, with the boosting flag of the wirings that omega and omega'
// induce on it.
json flower_json(const EdgeConfig& omega, const EdgeConfig& omega_prime, const BoundaryCondition& lo,
                 const BoundaryCondition& hi) {
    try {
        coupling::annulus_radii(omega.domain());
    } catch (const std::exception&) {
        return nullptr;
    }
    const auto f = coupling::explore_inner_flower(omega);
    if (!f) return json{{"found", false}};
    json petals = json::array();
    for (const auto& pt : f->petals)
        petals.push_back({{"primal", pt.primal}, {"length", pt.vertices.size()}});
    json ends = json::array();
    for (const auto& v : f->endpoints) ends.push_back(vertex_json(v));
    const auto bl = induced_on(*f->region, omega, lo), bh = induced_on(*f->region, omega_prime, hi);
    return json{{"found", true},
                {"scale", f->scale},
                {"petals", petals},
                {"endpoints", ends},
                {"explored_edges", f->explored.size()},
                {"boosting", coupling::is_boosting_pair(*f, bl, bh)}};
}

int run_couple(const CLI::App* sub, const CoupleArgs& a) {
    auto d = share(parse_domain_spec(a.domain));
    const auto mp = a.model.resolve();
    if (mp.h > 0.0) throw UsageError("couplings are defined at h = 0");
    const double p_high = a.p_high.empty() ? mp.p : cli::parse_p(a.p_high, mp.q);
    if (!(p_high >= mp.p && p_high < 1.0)) throw UsageError("need p <= p-high < 1");
    if (a.runs < 0) throw UsageError("--runs must be nonnegative");
    const auto lo = BoundaryCondition::free(*d), hi = BoundaryCondition::wired(*d);
    Output out(sub, a.common, domain_inputs(a.domain));
    std::vector<std::string> lines(a.runs);

    if (a.mode == "dynamics") {
        cli::parallel_for(a.runs, a.common.jobs, [&](int i) {
            const std::uint64_t seed = derive_seed(a.common.seed, i);
            const auto res = coupling::dynamics_coupling(d, lo, hi, mp.p, p_high, mp.q, seed, a.sweeps);
            json j{{"run", i},
                   {"seed", seed},
                   {"mode", "dynamics"},
                   {"sweeps", a.sweeps},
                   {"coalescence", res.coalescence},
                   {"differing_edges", res.differing_edges},
                   {"monotonicity_violations", res.monotonicity_violations},
                   {"flower", flower_json(res.omega, res.omega_prime, lo, hi)},
                   {"run_id", out.run_id()}};
            lines[i] = j.dump();
        });
    } else if (a.mode == "exact") {
        std::string stop = a.stop;
        if (stop == "auto") stop = a.tree == "boundary" ? "boundary" : a.tree == "dual" ? "dual" : "none";
        coupling::StopRule rule;
        if (stop == "coincide") rule = coupling::stop_when_coincide();
        else if (stop == "boundary") rule = coupling::stop_when_boundary_cluster_explored();
        else if (stop == "dual") rule = coupling::stop_when_dual_cluster_explored();
        else if (stop != "none") throw UsageError("--stop must be auto, none, coincide, boundary or dual");
        auto make_tree = [&]() -> coupling::TreePtr {
            if (a.tree == "deterministic") return coupling::deterministic_tree(*d);
            if (a.tree == "boundary") return coupling::boundary_cluster_tree(*d);
            if (a.tree == "dual") return coupling::dual_cluster_tree(*d);
            throw UsageError("--tree must be deterministic, boundary or dual");
        };
        make_tree();
        const coupling::ExactCoupler coupler(d, lo, hi, mp.p, p_high, mp.q);
        // Trees keep per-run state, so each worker builds its own.
        cli::parallel_for(a.runs, a.common.jobs, [&](int i) {
            auto tree = make_tree();
            const std::uint64_t seed = derive_seed(a.common.seed, i);
            const auto res = coupler.run(*tree, seed, rule);
            json j{{"run", i},
                   {"seed", seed},
                   {"mode", "exact"},
                   {"tree", tree->name()},
                   {"order", res.order},
                   {"stop_time", res.stop_time},
                   {"monotonicity_violations", res.monotonicity_violations},
                   {"omega", res.omega.to_string()},
                   {"omega_prime", res.omega_prime.to_string()},
                   {"flower", flower_json(res.omega, res.omega_prime, lo, hi)},
                   {"run_id", out.run_id()}};
            lines[i] = j.dump();
        });
    } else {
        throw UsageError("--mode must be exact or dynamics");
    }
    for (const auto& l : lines) out.stream() << l << "\n";
    out.finish();
    return 0;
}

// ---------------------------------------------------------------------------
// length

struct LengthArgs {
    Common common;
    ModelArgs model;
    double delta = 0.05;
    int cap = 128;
    std::int64_t budget = 4000;
    std::int64_t burn_in = -1;
    std::string algo = "auto";
};

int run_length(const CLI::App* sub, const LengthArgs& a) {
    ModelArgs m = a.model;
    m.h = 0.0;
    const auto mp = m.resolve();
    sampler::RunOptions o;
    o.budget = a.budget;
    o.burn_in = a.burn_in;
    o.seed = a.common.seed;
    o.algo = parse_algo(a.algo, mp);
    Output out(sub, a.common, {});
    const auto res = observables::characteristic_length(mp.q, mp.p, a.delta, a.cap, o);
    json curve = json::array();
    for (const auto& [R, e] : res.curve) {
        json c{{"R", R}};
        c.update(estimate_json(e));
        curve.push_back(c);
    }
    json j{{"q", res.q},
           {"p", res.p},
           {"delta", res.delta},
           {"R_cap", res.R_cap},
           {"L_hat", res.L_hat ? json(*res.L_hat) : json(nullptr)},
           {"L", res.L_string()},
           {"proxy", res.proxy},
           {"curve", curve},
           {"seed", a.common.seed},
           {"algo", sampler::to_string(o.algo)},
           {"run_id", out.run_id()}};
    out.stream() << j.dump(2) << "\n";
    out.finish();
    return 0;
}

// ---------------------------------------------------------------------------
// parafermion

struct ParafermionArgs {
    Common common;
    std::string domain = "box:1";
    std::vector<int> root;
    double p = 2.0 / 3.0;
    int cap = 24;
};

json complex_json(std::complex<double> z) { return json::array({z.real(), z.imag()}); }

int run_parafermion(const CLI::App* sub, const ParafermionArgs& a) {
    auto d = share(parse_domain_spec(a.domain));
    int x = -1;
    if (!a.root.empty()) {
        if (a.root.size() != 2) throw UsageError("--root takes two coordinates");
        x = d->find_vertex({a.root[0], a.root[1]});
        if (x < 0) throw UsageError("root is not a vertex of the domain");
    } else {
        // Topmost degree-3 boundary vertex, leftmost among those.
        for (int v : d->boundary())
            if (d->degree(v) == 3 && (x < 0 || d->vertex(v).y > d->vertex(x).y)) x = v;
        if (x < 0) throw UsageError("domain has no boundary vertex of degree 3; give --root");
    }
    Output out(sub, a.common, domain_inputs(a.domain));
    const auto obs = parafermion::observable_exact(d, x, a.p, {a.cap});
    json res = json::array();
    for (const auto& r : parafermion::vertex_residuals(obs))
        res.push_back({{"medial_vertex", r.medial_vertex}, {"doubled", vertex_json(r.doubled)}, {"residual", r.residual}});
    const auto bi = parafermion::boundary_identity(obs);
    json terms = json::array();
    for (const auto& t : obs.boundary)
        terms.push_back({{"vertex", vertex_json(d->vertex(t.vertex))},
                         {"degree", t.degree},
                         {"passes", t.prob_passes},
                         {"connected", t.prob_connected},
                         {"touches_infinite_component", t.touches_infinite_component}});
    json j{{"domain", a.domain},
           {"q", 4.0},
           {"p", a.p},
           {"root", vertex_json(d->vertex(x))},
           {"max_residual", parafermion::max_vertex_residual(obs)},
           {"residuals", res},
           {"boundary_identity",
            {{"winding_sum", complex_json(bi.winding_sum)},
             {"expected_winding_sum", 1.5 * std::numbers::pi},
             {"contour_total", complex_json(bi.contour_total)},
             {"probability_sum", bi.probability_sum},
             {"connection_mismatch", bi.connection_mismatch}}},
           {"boundary_terms", terms},
           {"run_id", out.run_id()}};
    out.stream() << j.dump(2) << "\n";
    out.finish();
    return 0;
}

// ---------------------------------------------------------------------------
// exponents

struct ExponentsArgs {
    Common common;
    std::string input;
    double min_scale = 5.0;
};

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') cur += line[++i];
            else if (c == '"') quoted = false;
            else cur += c;
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

int run_exponents(const CLI::App* sub, const ExponentsArgs& a) {
    std::ifstream in(a.input);
    if (!in) throw UsageError("cannot read " + a.input);
    std::string line;
    if (!std::getline(in, line)) throw UsageError(a.input + " is empty");
    const auto header = split_csv_line(line);
    auto col = [&](const std::string& name) {
        const auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) throw UsageError(a.input + " has no column '" + name + "'");
        return static_cast<std::size_t>(it - header.begin());
    };
    const std::size_t cq = col("quantity"), cQ = col("q"), cp = col("p"), ch = col("h"), cr = col("r"), cR = col("R"),
                      cm = col("mean"), cs = col("stderr");
    // (quantity, q, p, h, r) -> scale points
    std::map<std::tuple<std::string, double, double, double, int>, std::vector<scaling::ScalePoint>> groups;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto f = split_csv_line(line);
        if (f.size() != header.size())
            throw UsageError(a.input + ":" + std::to_string(lineno) + ": wrong number of fields");
        try {
            groups[{f[cq], std::stod(f[cQ]), std::stod(f[cp]), std::stod(f[ch]), std::stoi(f[cr])}].push_back(
                {std::stod(f[cR]), std::stod(f[cm]), std::stod(f[cs])});
        } catch (const std::logic_error&) {
            throw UsageError(a.input + ":" + std::to_string(lineno) + ": malformed number");
        }
    }
    Output out(sub, a.common, {a.input});
    auto& s = out.stream();
    s << "exponent,q,predicted,measured,stderr,n_scales,run_id\n";
    for (const auto& [key, pts] : groups) {
        const auto& [quantity, q, p, h, r] = key;
        const auto exponent = scaling::exponent_of_observable(quantity);
        if (!exponent) continue;
        const auto predicted = scaling::predicted(q).get(*exponent);
        if (!predicted) {
            std::cerr << "skipping " << quantity << " at q=" << q << ": no predicted " << *exponent << "\n";
            continue;
        }
        scaling::FitResult fit;
        try {
            fit = scaling::fit_exponent(pts, {a.min_scale});
        } catch (const std::invalid_argument& e) {
            std::cerr << "skipping " << quantity << " at q=" << q << ": " << e.what() << "\n";
            continue;
        }
        const auto row = scaling::compare(*exponent, q, fit);
        s << row.exponent << "," << cli::num(row.q) << "," << cli::num(row.predicted) << "," << cli::num(row.measured)
          << "," << cli::num(row.std_error) << "," << row.n_scales << "," << out.run_id() << "\n";
    }
    out.finish();
    return 0;
}

// ---------------------------------------------------------------------------
// verify

struct VerifyArgs {
    std::string tier = "all";
    std::vector<int> criteria;
    std::uint64_t seed = verify::VerifyOptions{}.seed;
    bool quiet = false;
};

int run_verify(const VerifyArgs& a) {
    auto ids = a.criteria.empty() ? verify::criteria_of(verify::parse_tier(a.tier)) : a.criteria;
    verify::VerifyOptions opt;
    opt.seed = a.seed;
    if (!a.quiet) opt.log = [](const std::string& m) { std::cerr << "  .. " << m << std::endl; };
    bool ok = true;
    verify::run(ids, opt, [&](const verify::CriterionResult& r) {
        std::cout << r.line() << std::endl;
        ok = ok && r.pass;
    });
    return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Random-cluster model toolkit: exact oracles, samplers, couplings and measurements", "rcm"};
    // "--h" is the ghost field, so help is long-form only.
    app.set_help_flag("--help", "Print this help message and exit");
    app.require_subcommand(1);
    app.fallthrough(false);
    app.set_help_all_flag("--help-all", "Help for every subcommand");
    app.footer("Any subcommand accepts --config FILE with key=value lines; flags given on the command line win.");

    OracleArgs oa;
    auto* oracle = app.add_subcommand("oracle", "Exact edge marginals and partition function by enumeration");
    add_common(oracle, oa.common);
    add_model(oracle, oa.model);
    oracle->add_option("--domain", oa.domain, "box:N, annulus:r:R, rect:x0:y0:x1:y1 or file:PATH")->capture_default_str();
    oracle->add_option("--bc", oa.bc, "free or wired")->capture_default_str();
    oracle->add_option("--cap", oa.cap, "Largest number of enumerated edges")->capture_default_str();

    SampleArgs sa;
    auto* sample = app.add_subcommand("sample", "Run one Markov chain and stream observables as JSON lines");
    add_common(sample, sa.common);
    add_model(sample, sa.model);
    sample->add_option("--domain", sa.domain, "Domain spec")->capture_default_str();
    sample->add_option("--bc", sa.bc, "free or wired")->capture_default_str();
    sample->add_option("--sweeps", sa.sweeps, "Total sweeps, burn-in included")->capture_default_str();
    sample->add_option("--burn-in", sa.burn_in, "Burn-in sweeps (negative: automatic)")->capture_default_str();
    sample->add_option("--algo", sa.algo, "heatbath, cm or auto")->capture_default_str();
    sample->add_option("--batches", sa.batches, "Number of batches")->capture_default_str();
    sample->add_option("--obs", sa.obs, "open_fraction, clusters, crossing")->delimiter(',')->capture_default_str();
    sample->add_option("--thin", sa.thin, "Stream every k-th sweep")->capture_default_str();
    sample->add_flag("--no-stream", sa.no_stream, "Print only the summary lines");

    MeasureArgs ma;
    auto* measure = app.add_subcommand("measure", "Estimate arm, crossing and mixing-rate quantities; CSV");
    add_common(measure, ma.common);
    add_model(measure, ma.model);
    measure->add_option("--obs", ma.obs, "pi1, pi4, crossing, delta, delta_rR")->delimiter(',')->capture_default_str();
    measure->add_option("--R", ma.R, "Outer scales")->delimiter(',')->capture_default_str();
    measure->add_option("--r", ma.r, "Inner scale for pi4 and delta_rR")->capture_default_str();
    measure->add_option("--budget", ma.budget, "Sweeps per point, burn-in included")->capture_default_str();
    measure->add_option("--burn-in", ma.burn_in, "Burn-in sweeps (negative: automatic)")->capture_default_str();
    measure->add_option("--algo", ma.algo, "heatbath, cm or auto")->capture_default_str();
    measure->add_option("--batches", ma.batches, "Number of batches")->capture_default_str();
    measure->add_option("--jobs", ma.common.jobs, "Parameter points run in parallel")->capture_default_str();

    CoupleArgs ca;
    auto* couple = app.add_subcommand("couple", "Monotone couplings of the free and wired measures; JSON lines");
    add_common(couple, ca.common);
    add_model(couple, ca.model, false);
    couple->add_option("--p-high", ca.p_high, "Edge parameter of the upper measure (default: --p)");
    couple->add_option("--domain", ca.domain, "Domain spec")->capture_default_str();
    couple->add_option("--mode", ca.mode, "exact (decision trees, enumerable domains) or dynamics")->capture_default_str();
    couple->add_option("--tree", ca.tree, "deterministic, boundary or dual")->capture_default_str();
    couple->add_option("--stop", ca.stop, "auto, none, coincide, boundary or dual")->capture_default_str();
    couple->add_option("--runs", ca.runs, "Number of runs")->capture_default_str();
    couple->add_option("--sweeps", ca.sweeps, "Sweeps per run in dynamics mode")->capture_default_str();
    couple->add_option("--jobs", ca.common.jobs, "Runs in parallel")->capture_default_str();

    LengthArgs la;
    auto* length = app.add_subcommand("length", "Characteristic length scan; JSON");
    add_common(length, la.common);
    add_model(length, la.model, false);
    length->add_option("--delta", la.delta, "Crossing threshold in (0, 1/2)")->capture_default_str();
    length->add_option("--cap", la.cap, "Largest scale")->capture_default_str();
    length->add_option("--budget", la.budget, "Sweeps per scale")->capture_default_str();
    length->add_option("--burn-in", la.burn_in, "Burn-in sweeps (negative: automatic)")->capture_default_str();
    length->add_option("--algo", la.algo, "heatbath, cm or auto")->capture_default_str();

    ParafermionArgs pa;
    auto* para = app.add_subcommand("parafermion", "Parafermionic observable at q = 4 by enumeration; JSON");
    add_common(para, pa.common);
    para->add_option("--domain", pa.domain, "Domain spec")->capture_default_str();
    para->add_option("--root", pa.root, "Root vertex x,y (default: topmost degree-3 boundary vertex)")->delimiter(',');
    para->add_option("--p", pa.p, "Edge parameter")->capture_default_str();
    para->add_option("--cap", pa.cap, "Largest number of enumerated edges")->capture_default_str();

    ExponentsArgs ea;
    auto* expo = app.add_subcommand("exponents", "Fit exponents from a measure CSV and compare with predictions");
    add_common(expo, ea.common);
    expo->add_option("--input", ea.input, "CSV written by measure")->required();
    expo->add_option("--min-scale", ea.min_scale, "Drop scales below this")->capture_default_str();

    VerifyArgs va;
    auto* ver = app.add_subcommand("verify", "Run the acceptance criteria; exit 1 on any failure");
    ver->add_option("--tier", va.tier, "exact, statistical or all")->capture_default_str()
        ->check(CLI::IsMember({"exact", "statistical", "all"}));
    ver->add_option("-c,--criterion", va.criteria, "Criterion numbers")->check(CLI::Range(1, 8));
    ver->add_option("--seed", va.seed, "Base seed")->capture_default_str();
    ver->add_flag("-q,--quiet", va.quiet, "No progress messages");

    try {
        std::vector<std::string> args(argv, argv + argc);
        args = cli::expand_config(std::move(args));
        // CLI11 consumes arguments in reverse order.
        std::vector<std::string> rev(args.rbegin(), args.rend() - 1);
        app.parse(rev);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n\n" << app.help();
        return kUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    }

    try {
        if (oracle->parsed()) return run_oracle(oracle, oa);
        if (sample->parsed()) return run_sample(sample, sa);
        if (measure->parsed()) return run_measure(measure, ma);
        if (couple->parsed()) return run_couple(couple, ca);
        if (length->parsed()) return run_length(length, la);
        if (para->parsed()) return run_parafermion(para, pa);
        if (expo->parsed()) return run_exponents(expo, ea);
        if (ver->parsed()) return run_verify(va);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::length_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return kUsage;
}
