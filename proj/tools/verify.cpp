#include "verify.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "rcm/coupling.hpp"
#include "rcm/exact.hpp"
#include "rcm/observables.hpp"
#include "rcm/parafermion.hpp"
#include "rcm/sampler.hpp"
#include "rcm/scaling.hpp"

namespace rcm::verify {

namespace {

constexpr double kPi = std::numbers::pi;

const std::vector<double> kQGrid{1.0, 1.5, 2.0, 4.0};
const std::vector<double> kHGrid{0.0, 0.2};

std::vector<double> p_grid(double q) { return {0.3, ModelParams::critical_p(q), 0.7}; }

std::string fmt(double x, int prec = 4) {
    std::ostringstream os;
    os.precision(prec);
    os << x;
    return os.str();
}

void say(const VerifyOptions& o, const std::string& msg) {
    if (o.log) o.log(msg);
}

// Lowest value seen, with where it occurred.
struct Slack {
    double value = std::numeric_limits<double>::infinity();
    std::string where;
    void update(double v, const std::string& w) {
        if (v < value) {
            value = v;
            where = w;
        }
    }
};

// Largest value seen.
struct Worst {
    double value = 0.0;
    std::string where;
    void update(double v, const std::string& w) {
        if (where.empty() || v > value) {
            value = v;
            where = w;
        }
    }
};

std::uint64_t mask_of(const EdgeConfig& c) {
    std::uint64_t m = 0;
    for (int e = 0; e < c.num_edges(); ++e)
        if (c.open(e)) m |= std::uint64_t{1} << e;
    return m;
}

// ---------------------------------------------------------------------------
// Criterion 1

struct SmallDomain {
    std::string name;
    DomainPtr d;
    std::optional<Quad> quad;  // rectangles only
};

std::vector<SmallDomain> small_domains() {
    std::vector<SmallDomain> out;
    out.push_back({"edge", share(Domain({{0, 0}, {1, 0}}, {{{0, 0}, {1, 0}}})), std::nullopt});
    out.push_back({"path3", share(build_rectangle(0, 0, 2, 0)), std::nullopt});
    out.push_back({"star", share(Domain({{0, -1}, {-1, 0}, {0, 0}, {1, 0}, {0, 1}},
                                        {{{0, 0}, {1, 0}}, {{0, 0}, {0, 1}}, {{-1, 0}, {0, 0}}, {{0, -1}, {0, 0}}})),
                   std::nullopt});
    out.push_back({"square", share(build_rectangle(0, 0, 1, 1)), make_rectangle_quad(0, 0, 1, 1)});
    out.push_back({"rect2x1", share(build_rectangle(0, 0, 2, 1)), make_rectangle_quad(0, 0, 2, 1)});
    out.push_back({"rect1x2", share(build_rectangle(0, 0, 1, 2)), make_rectangle_quad(0, 0, 1, 2)});
    out.push_back({"rect3x1", share(build_rectangle(0, 0, 3, 1)), make_rectangle_quad(0, 0, 3, 1)});
    out.push_back({"L-tromino", share(Domain::induced({{0, 0}, {1, 0}, {2, 0}, {0, 1}, {1, 1}, {2, 1}, {0, 2}, {1, 2}})),
                   std::nullopt});
    out.push_back({"box1", share(build_box(1)), make_rectangle_quad(-1, -1, 1, 1)});
    return out;
}

// Free, two boundary arcs wired separately, everything wired (ghost included).
std::vector<std::pair<std::string, BoundaryCondition>> small_bcs(const Domain& d) {
    const auto& b = d.boundary();
    std::vector<Vertex> first, second;
    for (std::size_t i = 0; i < b.size(); ++i) (i < b.size() / 2 ? first : second).push_back(d.vertex(b[i]));
    return {{"free", BoundaryCondition::free(d)},
            {"mixed", BoundaryCondition::from_partition(d, {first, second})},
            {"wired", BoundaryCondition::wired(d)}};
}

struct EventFamily {
    std::vector<std::string> names;
    std::vector<Event> events;
    std::vector<std::vector<char>> indicator;  // per event, per primal mask
};

EventFamily increasing_events(const SmallDomain& sd) {
    const Domain& d = *sd.d;
    EventFamily f;
    for (int e = 0; e < d.num_edges(); ++e) {
        f.names.push_back("edge" + std::to_string(e));
        f.events.push_back(events::edge_open(e));
    }
    const int n = d.num_vertices();
    for (auto [a, b] : {std::pair{0, n - 1}, std::pair{0, n / 2}, std::pair{n / 2, n - 1}}) {
        if (a == b) continue;
        f.names.push_back("conn" + std::to_string(a) + "-" + std::to_string(b));
        f.events.push_back(events::connected(a, b));
    }
    f.names.push_back("half-open");
    f.events.push_back(events::at_least_open((d.num_edges() + 1) / 2));
    if (sd.quad) {
        f.names.push_back("crossing");
        f.events.push_back(events::crossing(*sd.quad));
    }
    const std::uint64_t configs = std::uint64_t{1} << d.num_edges();
    EdgeConfig c(sd.d);
    for (const auto& ev : f.events) {
        std::vector<char> ind(configs);
        for (std::uint64_t m = 0; m < configs; ++m) {
            for (int e = 0; e < d.num_edges(); ++e) c.set(e, (m >> e) & 1);
            ind[m] = ev(c) ? 1 : 0;
        }
        f.indicator.push_back(std::move(ind));
    }
    return f;
}

CriterionResult criterion1(const VerifyOptions& opt) {
    CriterionResult res{1, "exact-oracle identities", false, "", 0.0};
    Slack fkg, cbc, pmon, hmon;
    Worst smp, duality, boost;
    int measures = 0;
    for (const auto& sd : small_domains()) {
        const Domain& d = *sd.d;
        auto fam = increasing_events(sd);
        const int k = static_cast<int>(fam.events.size());
        auto bcs = small_bcs(d);
        if (!leq(bcs[0].second, bcs[1].second) || !leq(bcs[1].second, bcs[2].second))
            throw std::logic_error("boundary conditions are not ordered");
        // Star of a vertex of maximal degree for the spatial Markov check.
        int centre = 0;
        for (int v = 0; v < d.num_vertices(); ++v)
            if (d.degree(v) > d.degree(centre)) centre = v;
        std::vector<int> star;
        for (int dir = 0; dir < 4; ++dir)
            if (int e = d.incident_edge(centre, static_cast<Direction>(dir)); e >= 0) star.push_back(e);

        // probs[(bc, q, p, h)] = probabilities of the events, ghost connection last.
        std::map<std::tuple<int, int, int, int>, std::vector<double>> probs;
        const Event ghost = events::connected_to_ghost(centre);
        for (int ib = 0; ib < 3; ++ib)
            for (int iq = 0; iq < 4; ++iq)
                for (int ip = 0; ip < 3; ++ip)
                    for (int ih = 0; ih < 2; ++ih) {
                        const double q = kQGrid[iq], p = p_grid(q)[ip], h = kHGrid[ih];
                        const std::string where = sd.name + "/" + bcs[ib].first + " q=" + fmt(q) + " p=" + fmt(p) +
                                                  " h=" + fmt(h);
                        exact::ExactMeasure m(sd.d, bcs[ib].second, {p, q, h});
                        ++measures;
                        const auto pd = m.primal_distribution();
                        std::vector<double> pa(k, 0.0);
                        for (int a = 0; a < k; ++a)
                            for (std::size_t s = 0; s < pd.size(); ++s)
                                if (fam.indicator[a][s]) pa[a] += pd[s];
                        for (int a = 0; a < k; ++a)
                            for (int b = a; b < k; ++b) {
                                double pab = 0.0;
                                for (std::size_t s = 0; s < pd.size(); ++s)
                                    if (fam.indicator[a][s] && fam.indicator[b][s]) pab += pd[s];
                                fkg.update(pab - pa[a] * pa[b], where + " " + fam.names[a] + "," + fam.names[b]);
                            }
                        double pg = 0.0;
                        if (h > 0.0) {
                            pg = m.probability(ghost);
                            for (int a = 0; a < k; ++a) {
                                const Event& A = fam.events[a];
                                const double pag =
                                    m.probability([&](const EdgeConfig& c) { return ghost(c) && A(c); });
                                fkg.update(pag - pa[a] * pg, where + " ghost," + fam.names[a]);
                            }
                        }
                        pa.push_back(pg);
                        if (star.size() < static_cast<std::size_t>(d.num_edges()))
                            smp.update(exact::spatial_markov_deviation(m, star), where);
                        probs[{ib, iq, ip, ih}] = std::move(pa);
                    }
        auto names = fam.names;
        names.push_back("ghost");
        for (int iq = 0; iq < 4; ++iq)
            for (int ip = 0; ip < 3; ++ip)
                for (int ih = 0; ih < 2; ++ih)
                    for (int ib = 0; ib < 3; ++ib) {
                        const auto& cur = probs[{ib, iq, ip, ih}];
                        const std::string tag = sd.name + " q=" + fmt(kQGrid[iq]) + " p#" + std::to_string(ip) +
                                                " h=" + fmt(kHGrid[ih]) + " " + bcs[ib].first;
                        for (std::size_t a = 0; a < cur.size(); ++a) {
                            if (ib + 1 < 3)
                                cbc.update(probs[{ib + 1, iq, ip, ih}][a] - cur[a], tag + " " + names[a]);
                            if (ip + 1 < 3)
                                pmon.update(probs[{ib, iq, ip + 1, ih}][a] - cur[a], tag + " " + names[a]);
                            if (ih == 0) hmon.update(probs[{ib, iq, ip, 1}][a] - cur[a], tag + " " + names[a]);
                        }
                    }
        if (sd.quad)
            for (double q : kQGrid)
                for (double p : p_grid(q)) {
                    const ModelParams mp{p, q, 0.0};
                    const std::string where = sd.name + " q=" + fmt(q) + " p=" + fmt(p);
                    auto [a, b] = exact::crossing_duality_check(mp, *sd.quad);
                    duality.update(std::abs(a - b), where);
                    auto [l, r] = exact::boost_formula_check(mp, *sd.quad);
                    boost.update(std::abs(l - r), where);
                }
        say(opt, "C1 " + sd.name + " done");
    }
    const double tol = 1e-12;
    res.pass = fkg.value >= -tol && cbc.value >= -tol && pmon.value >= -tol && hmon.value >= -tol &&
               smp.value <= tol && duality.value <= tol && boost.value <= tol;
    std::ostringstream os;
    os << measures << " measures; min slack FKG " << fmt(fkg.value) << ", CBC " << fmt(cbc.value) << ", p-MON "
       << fmt(pmon.value) << ", h-MON " << fmt(hmon.value) << "; max SMP dev " << fmt(smp.value) << ", duality "
       << fmt(duality.value) << ", boost " << fmt(boost.value);
    if (!res.pass) os << " [tightest FKG at " << fkg.where << "]";
    res.detail = os.str();
    return res;
}

// ---------------------------------------------------------------------------
// Criterion 2

CriterionResult criterion2(const VerifyOptions& opt) {
    CriterionResult res{2, "sampler against the oracle", false, "", 0.0};
    auto d = share(build_box(1));
    const int ne = d->num_edges();
    std::vector<Observable> edges;
    for (int e = 0; e < ne; ++e) edges.push_back([e](const EdgeConfig& c) { return c.open(e) ? 1.0 : 0.0; });
    Worst z;
    int runs = 0;
    std::uint64_t idx = 0;
    for (const auto& [bname, bc] : {std::pair{std::string("free"), BoundaryCondition::free(*d)},
                                    std::pair{std::string("wired"), BoundaryCondition::wired(*d)}})
        for (double q : kQGrid)
            for (double p : p_grid(q))
                for (double h : kHGrid) {
                    const ModelParams mp{p, q, h};
                    const auto truth = exact::ExactMeasure(d, bc, mp).edge_marginals();
                    for (auto algo : {sampler::Algorithm::HeatBath, sampler::Algorithm::ChayesMachta}) {
                        if (algo == sampler::Algorithm::ChayesMachta && h > 0.0) continue;
                        sampler::RunOptions o;
                        o.budget = 1000000;
                        o.burn_in = 2000;
                        o.batches = 200;
                        o.algo = algo;
                        o.seed = derive_seed(opt.seed, 200 + idx++);
                        auto est = sampler::estimate_many(edges, mp, d, bc, o);
                        ++runs;
                        for (int e = 0; e < ne; ++e) {
                            const double dev = std::abs(est[e].mean - truth[e]);
                            const double zz = est[e].std_error > 0 ? dev / est[e].std_error
                                                                   : (dev == 0 ? 0.0 : std::numeric_limits<double>::infinity());
                            z.update(zz, bname + " " + sampler::to_string(algo) + " q=" + fmt(q) + " p=" + fmt(p) +
                                             " h=" + fmt(h) + " edge " + std::to_string(e));
                        }
                    }
                }
    say(opt, "C2 marginals done");
    // Joint law at q = 1.
    double min_pv = 1.0;
    std::string min_where;
    for (auto algo : {sampler::Algorithm::HeatBath, sampler::Algorithm::ChayesMachta})
        for (double p : {0.3, 0.5, 0.7}) {
            const ModelParams mp{p, 1.0, 0.0};
            const auto bc = BoundaryCondition::free(*d);
            const auto truth = exact::ExactMeasure(d, bc, mp).primal_distribution();
            sampler::ChainState st(d, bc, mp, derive_seed(opt.seed, 300 + idx++));
            for (int i = 0; i < 100; ++i) sampler::advance(st, algo);
            std::vector<std::int64_t> counts(truth.size(), 0);
            for (int i = 0; i < 400000; ++i) {
                sampler::advance(st, algo);
                ++counts[mask_of(st.config())];
            }
            const double pv = chi_square_test(counts, truth).p_value;
            if (pv < min_pv) {
                min_pv = pv;
                min_where = sampler::to_string(algo) + " p=" + fmt(p);
            }
        }
    res.pass = z.value < 4.0 && min_pv > 1e-3;
    res.detail = std::to_string(runs) + " runs x " + std::to_string(ne) + " edges; max |z| " + fmt(z.value) + " (" +
                 z.where + "); q=1 joint chi-square min p-value " + fmt(min_pv) + " (" + min_where + ")";
    return res;
}

// ---------------------------------------------------------------------------
// Criterion 3

CriterionResult criterion3(const VerifyOptions& opt) {
    using namespace rcm::coupling;
    CriterionResult res{3, "coupling correctness", false, "", 0.0};
    auto d = share(build_box(1));
    const int runs = 100000;
    int violations = 0, disagreements = 0;
    double min_pv = 1.0;
    std::string min_where;
    for (double q : {1.5, 2.0, 4.0}) {
        const double pc = ModelParams::critical_p(q);
        ExactCoupler c(d, BoundaryCondition::free(*d), BoundaryCondition::wired(*d), pc, pc, q);
        const auto lo_truth = c.low_measure().primal_distribution();
        const auto hi_truth = c.high_measure().primal_distribution();
        struct Example {
            std::string name;
            TreePtr tree;
            StopRule stop;
        };
        std::vector<Example> examples;
        examples.push_back({"deterministic", deterministic_tree(*d), nullptr});
        examples.push_back({"boundary-cluster", boundary_cluster_tree(*d), stop_when_boundary_cluster_explored()});
        examples.push_back({"dual-cluster", dual_cluster_tree(*d), stop_when_dual_cluster_explored()});
        for (std::size_t ex = 0; ex < examples.size(); ++ex) {
            auto& X = examples[ex];
            std::vector<std::int64_t> lo(lo_truth.size(), 0), hi(hi_truth.size(), 0);
            for (int s = 0; s < runs; ++s) {
                auto r = c.run(*X.tree, derive_seed(opt.seed, 1000000 * (ex + 1) + static_cast<std::uint64_t>(s) +
                                                                   static_cast<std::uint64_t>(q * 1e8)),
                               X.stop);
                violations += r.monotonicity_violations + (leq(r.omega, r.omega_prime) ? 0 : 1);
                ++lo[mask_of(r.omega)];
                ++hi[mask_of(r.omega_prime)];
                if (ex == 1) {
                    bool agree = r.at_stop.has_value();
                    for (int e = 0; agree && e < d->num_edges(); ++e)
                        if (!r.at_stop->revealed(e) && r.omega.open(e) != r.omega_prime.open(e)) agree = false;
                    disagreements += agree ? 0 : 1;
                }
            }
            for (auto [counts, truth, which] : {std::tuple{&lo, &lo_truth, "omega"}, std::tuple{&hi, &hi_truth, "omega'"}}) {
                const double pv = chi_square_test(*counts, *truth).p_value;
                if (pv < min_pv) {
                    min_pv = pv;
                    min_where = X.name + " q=" + fmt(q) + " " + which;
                }
            }
            say(opt, "C3 " + X.name + " q=" + fmt(q) + " done");
        }
    }
    res.pass = violations == 0 && disagreements == 0 && min_pv > 1e-3;
    res.detail = "9 x " + std::to_string(runs) + " runs; monotonicity violations " + std::to_string(violations) +
                 "; boundary-cluster runs disagreeing off the explored cluster " + std::to_string(disagreements) +
                 "; min chi-square p-value " + fmt(min_pv) + " (" + min_where + ")";
    return res;
}

// ---------------------------------------------------------------------------
// Criterion 4

CriterionResult criterion4(const VerifyOptions& opt) {
    CriterionResult res{4, "parafermionic identities", false, "", 0.0};
    std::vector<Vertex> l;
    for (int y = 0; y <= 2; ++y)
        for (int x = 0; x <= 2; ++x) l.push_back({x, y});
    for (Vertex v : {Vertex{3, 0}, Vertex{4, 0}, Vertex{3, 1}, Vertex{4, 1}}) l.push_back(v);
    struct Case {
        std::string name;
        DomainPtr d;
        Vertex root;
    };
    std::vector<Case> cases{{"box1", share(build_box(1)), {0, 1}},
                            {"rect 3x4 vertices", share(build_rectangle(0, 0, 2, 3)), {1, 3}},
                            {"L-shape", share(Domain::induced(l)), {1, 2}}};
    bool pass = true;
    std::ostringstream os;
    for (const auto& c : cases) {
        const int x = c.d->find_vertex(c.root);
        auto obs = parafermion::observable_exact(c.d, x, 2.0 / 3.0);
        const double res_max = parafermion::max_vertex_residual(obs);
        const auto bi = parafermion::boundary_identity(obs);
        const double werr = std::abs(bi.winding_sum - std::complex<double>(1.5 * kPi, 0.0));
        auto neg = parafermion::observable_exact(c.d, x, 0.4);
        const double neg_res = parafermion::max_vertex_residual(neg);
        const bool ok = res_max < 1e-10 && werr < 1e-10 && neg_res > 1e-3;
        pass = pass && ok;
        if (os.tellp() > 0) os << "; ";
        os << c.name << " (" << c.d->num_edges() << " edges): max residual " << fmt(res_max, 3)
           << ", |boundary sum - 3pi/2| " << fmt(werr, 3) << ", probability sum " << fmt(bi.probability_sum, 12)
           << ", p=0.4 residual " << fmt(neg_res, 3);
        say(opt, "C4 " + c.name + " done");
    }
    res.pass = pass;
    res.detail = os.str();
    return res;
}

// ---------------------------------------------------------------------------
// Criterion 5

CriterionResult criterion5(const VerifyOptions& opt) {
    using namespace rcm::observables;
    CriterionResult res{5, "mixing-rate structure", false, "", 0.0};
    const ModelParams mp{ModelParams::critical_p(2.0), 2.0, 0.0};
    sampler::RunOptions o;
    o.algo = sampler::Algorithm::ChayesMachta;
    o.budget = 1000000;
    o.seed = derive_seed(opt.seed, 5001);
    const Estimate d4 = delta_edge(mp, 4, o);
    say(opt, "C5 Delta(4) = " + fmt(d4.mean) + " +- " + fmt(d4.std_error));
    o.seed = derive_seed(opt.seed, 5002);
    const DeltaEstimates big = delta_hat(mp, 4, 32, o);
    const Estimate& d32 = big.delta_R;
    const Estimate& d4_32 = big.delta_rR;
    say(opt, "C5 Delta(32) = " + fmt(d32.mean) + ", Delta(4,32) = " + fmt(d4_32.mean));
    sampler::RunOptions oa = o;
    oa.budget = 100000;
    oa.seed = derive_seed(opt.seed, 5003);
    const Estimate pi4 = arm_probability(mp, {{1, 0, 1, 0}, 4, 32}, oa);
    say(opt, "C5 pi4(4,32) = " + fmt(pi4.mean) + " +- " + fmt(pi4.std_error));

    const double ratio = d4.mean * d4_32.mean / d32.mean;
    const double ratio_se =
        std::abs(ratio) * std::sqrt(std::pow(d4.std_error / d4.mean, 2) + std::pow(d4_32.std_error / d4_32.mean, 2) +
                                    std::pow(d32.std_error / d32.mean, 2));
    const double se = std::hypot(d4_32.std_error, pi4.std_error);
    const bool quasi = ratio >= 0.1 && ratio <= 10.0;
    const bool weak = d4_32.mean >= pi4.mean - 3.0 * se;
    res.pass = quasi && weak;
    std::ostringstream os;
    os << "Delta(4) " << fmt(d4.mean) << " +- " << fmt(d4.std_error, 2) << ", Delta(32) " << fmt(d32.mean) << " +- "
       << fmt(d32.std_error, 2) << ", Delta(4,32) " << fmt(d4_32.mean) << " +- " << fmt(d4_32.std_error, 2)
       << "; ratio " << fmt(ratio) << " +- " << fmt(ratio_se, 2) << " (need [0.1, 10]); pi4(4,32) " << fmt(pi4.mean)
       << " +- " << fmt(pi4.std_error, 2) << " on the free box of radius " << proxy_box_radius(2.0, 32)
       << " (need Delta(4,32) >= pi4 - 3 se = " << fmt(pi4.mean - 3.0 * se) << ")";
    res.detail = os.str();
    return res;
}

// ---------------------------------------------------------------------------
// Criterion 6

CriterionResult criterion6(const VerifyOptions& opt) {
    CriterionResult res{6, "one-arm exponent", false, "", 0.0};
    auto d = share(build_box(128));
    const auto bc = BoundaryCondition::free(*d);
    struct Case {
        double q, p, target, tol;
    };
    bool pass = true;
    std::ostringstream os;
    int idx = 0;
    for (const Case& c : {Case{1.0, 0.5, 5.0 / 48.0, 0.05}, Case{2.0, ModelParams::critical_p(2.0), 0.125, 0.06}}) {
        sampler::RunOptions o;
        o.algo = sampler::Algorithm::ChayesMachta;
        o.budget = 20000;
        o.seed = derive_seed(opt.seed, 6000 + idx++);
        const auto stats = observables::cluster_stats({c.p, c.q, 0.0}, d, bc, o);
        std::vector<scaling::ScalePoint> pts;
        for (int R : {8, 16, 32, 64}) pts.push_back({double(R), stats.pi1[R - 1].mean, stats.pi1[R - 1].std_error});
        const auto fit = scaling::fit_exponent(pts);
        const bool ok = std::abs(fit.slope - c.target) <= c.tol;
        pass = pass && ok;
        if (os.tellp() > 0) os << "; ";
        os << "q=" << fmt(c.q) << ": xi1 " << fmt(fit.slope) << " +- " << fmt(fit.slope_std_error, 2) << " (target "
           << fmt(c.target) << " +- " << c.tol << "; pi1 at 8..64:";
        for (const auto& pt : pts) os << " " << fmt(pt.estimate);
        os << ")";
        say(opt, "C6 q=" + fmt(c.q) + " done");
    }
    res.pass = pass;
    res.detail = os.str();
    return res;
}

// ---------------------------------------------------------------------------
// Criterion 7

CriterionResult criterion7(const VerifyOptions& opt) {
    CriterionResult res{7, "characteristic length", false, "", 0.0};
    sampler::RunOptions o;
    o.algo = sampler::Algorithm::ChayesMachta;
    o.budget = 4000;
    std::map<double, observables::LengthScanResult> scans;
    int idx = 0;
    for (double p : {0.5, 0.40, 0.35}) {
        o.seed = derive_seed(opt.seed, 7000 + idx++);
        scans.emplace(p, observables::characteristic_length(1.0, p, 0.05, 128, o));
        say(opt, "C7 p=" + fmt(p) + " L=" + scans.at(p).L_string());
    }
    const auto& at_pc = scans.at(0.5);
    const auto& l40 = scans.at(0.40);
    const auto& l35 = scans.at(0.35);
    res.pass = !at_pc.L_hat && l40.L_hat && l35.L_hat && *l40.L_hat >= *l35.L_hat;
    res.detail = "L(p_c) = " + at_pc.L_string() + " at cap 128, L(0.40) = " + l40.L_string() +
                 ", L(0.35) = " + l35.L_string();
    return res;
}

// ---------------------------------------------------------------------------
// Criterion 8

CriterionResult criterion8(const VerifyOptions&) {
    CriterionResult res{8, "scaling-relation identities", false, "", 0.0};
    double worst = 0.0;
    std::string where;
    for (int i = 0; i <= 6; ++i) {
        const double q = 1.0 + 0.5 * i;
        for (const auto& r : scaling::check_relations(scaling::predicted(q)))
            if (std::abs(r.residual) >= worst) {
                worst = std::abs(r.residual);
                where = r.id + " at q=" + fmt(q);
            }
    }
    const double k2 = scaling::predicted(2.0).kappa;
    const double i4 = *scaling::predicted(4.0).iota;
    const double n3 = scaling::predicted(3.0).nu;
    const bool spots = std::abs(k2 - 16.0 / 3.0) < 1e-10 && std::abs(i4 - 0.5) < 1e-10 && std::abs(n3 - 5.0 / 6.0) < 1e-10;
    res.pass = worst < 1e-10 && spots;
    res.detail = "max relation residual " + fmt(worst, 3) + " (" + where + "); kappa(2) " + fmt(k2, 12) +
                 ", iota(4) " + fmt(i4, 12) + ", nu(3) " + fmt(n3, 12);
    return res;
}

}  // namespace

Tier parse_tier(const std::string& name) {
    if (name == "exact") return Tier::Exact;
    if (name == "statistical") return Tier::Statistical;
    if (name == "all") return Tier::All;
    throw std::invalid_argument("unknown tier '" + name + "' (exact, statistical, all)");
}

std::vector<int> criteria_of(Tier tier) {
    switch (tier) {
        case Tier::Exact: return {1, 4, 8};
        case Tier::Statistical: return {2, 3, 5, 6, 7};
        case Tier::All: break;
    }
    return {1, 2, 3, 4, 5, 6, 7, 8};
}

std::string CriterionResult::line() const {
    std::ostringstream os;
    os << (pass ? "PASS" : "FAIL") << " C" << id << " " << title << ": " << detail << " (" << fmt(seconds, 3)
       << " s)";
    return os.str();
}

CriterionResult run_criterion(int id, const VerifyOptions& options) {
    const auto start = std::chrono::steady_clock::now();
    CriterionResult r;
    switch (id) {
        case 1: r = criterion1(options); break;
        case 2: r = criterion2(options); break;
        case 3: r = criterion3(options); break;
        case 4: r = criterion4(options); break;
        case 5: r = criterion5(options); break;
        case 6: r = criterion6(options); break;
        case 7: r = criterion7(options); break;
        case 8: r = criterion8(options); break;
        default: throw std::invalid_argument("criteria are numbered 1 to 8");
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

std::vector<CriterionResult> run(const std::vector<int>& ids, const VerifyOptions& options,
                                 const std::function<void(const CriterionResult&)>& on_result) {
    std::vector<CriterionResult> out;
    for (int id : ids) {
        out.push_back(run_criterion(id, options));
        if (on_result) on_result(out.back());
    }
    return out;
}

}  // namespace rcm::verify
