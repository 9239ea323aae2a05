#include "subvarlap/cli.hpp"

#include <omp.h>

#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "subvarlap/ball_family.hpp"
#include "subvarlap/config.hpp"
#include "subvarlap/error.hpp"
#include "subvarlap/harmonic.hpp"
#include "subvarlap/muckenhoupt.hpp"
#include "subvarlap/plaplacian.hpp"
#include "subvarlap/poincare.hpp"

namespace subvarlap {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

const std::vector<std::string> kCommands = {"geometry", "norm",    "apq",      "maximal",   "fracint", "rdf",
                                            "swcheck",  "poincare", "truncate", "represent", "solve"};

const std::vector<std::string> kKeys = {
    "group",     "lo",          "hi",          "cells",        "grid",          "exponent",   "weight",
    "source",    "function",    "density",     "seed",         "out",           "q_exponent", "alpha",
    "enrichment", "enrichments", "radii",      "probes",       "terms",         "c",          "level",
    "mode",      "order",       "family",      "count",        "variant",       "refine",     "jump_delta",
    "a_preset",  "a_angle",     "gradient_tol", "max_iterations", "init",       "source_weight", "p",
    "q",         "pair_budget", "t_levels",    "weak_p",       "weak_q",        "residual_tests"};

// Thrown when a precondition gate fails; exits with status 2.
struct GateFailure {
    std::string gate;
    std::string detail;
};

std::string fmt(double v) {
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return {buf.data(), res.ptr};
}

std::string fnv1a_hex(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

std::vector<std::string> axis_names(const CarnotGroup& g) {
    if (g.kind() == CarnotGroup::Kind::Heisenberg1) return {"x", "y", "t"};
    const std::vector<std::string> all{"x", "y", "z"};
    return {all.begin(), all.begin() + g.dim()};
}

struct Context {
    Config cfg;
    std::string command;
    fs::path out_dir;
    unsigned long long seed = 1;
    int refine = 1;
    std::vector<std::string> artifacts;
    json summary = json::object();

    CarnotGroup group() const { return CarnotGroup::from_id(cfg.text_value("group", "r2")); }

    GridDomain domain(const CarnotGroup& g, bool node_default) const {
        const int d = g.dim();
        std::vector<double> lo(static_cast<std::size_t>(d), 0.0), hi(static_cast<std::size_t>(d), 1.0);
        std::vector<int> cells(static_cast<std::size_t>(d), 32);
        auto read = [&](const std::string& key, auto& target) {
            if (!cfg.has(key)) return;
            const auto v = cfg.numbers(key);
            SUBVARLAP_REQUIRE(v.size() == 1 || v.size() == static_cast<std::size_t>(d), ErrorCode::ParseError,
                              "'" + key + "' needs 1 or " + std::to_string(d) + " values");
            for (std::size_t k = 0; k < target.size(); ++k) {
                using T = typename std::decay_t<decltype(target)>::value_type;
                target[k] = static_cast<T>(v.size() == 1 ? v[0] : v[k]);
            }
        };
        read("lo", lo);
        read("hi", hi);
        read("cells", cells);
        for (int n : cells) SUBVARLAP_REQUIRE(n >= 8, ErrorCode::InvalidArgument, "resolution must be >= 8 per axis");
        const std::string kind = cfg.text_value("grid", node_default ? "node" : "cell");
        SUBVARLAP_REQUIRE(kind == "node" || kind == "cell", ErrorCode::ParseError, "grid must be 'node' or 'cell'");
        if (kind == "node") {
            std::vector<int> intervals(cells);
            for (int& n : intervals) --n;
            return GridDomain::node_aligned(lo, hi, intervals);
        }
        return {lo, hi, cells};
    }

    GridFunction field(const std::string& key, const std::string& fallback, const GridDomain& dom) const {
        return GridFunction::sample(dom, cfg.expression(key, fallback).function());
    }

    void write_text(const std::string& name, const std::string& body) {
        std::ofstream os(out_dir / name, std::ios::binary);
        SUBVARLAP_REQUIRE(os.good(), ErrorCode::InvalidArgument, "cannot write " + (out_dir / name).string());
        os << body;
        artifacts.push_back(name);
    }

    void write_json(const std::string& name, const json& j) { write_text(name, j.dump(2) + "\n"); }

    void write_grid(const std::string& name, const GridFunction& f, const CarnotGroup& g, const std::string& value) {
        const GridDomain& dom = f.domain();
        std::string body;
        for (const auto& a : axis_names(g)) body += a + ",";
        body += value + "\n";
        for (std::size_t i = 0; i < dom.size(); ++i) {
            const Point c = dom.center(i);
            for (int k = 0; k < dom.dim(); ++k) body += fmt(c[k]) + ",";
            body += fmt(f[i]) + "\n";
        }
        write_text(name, body);
    }
};

json ball_json(const Ball& b) {
    json c = json::array();
    for (double v : b.center.coords()) c.push_back(v);
    return {{"center", c}, {"radius", b.radius}};
}

void cmd_geometry(Context& ctx) {
    const CarnotGroup g = ctx.group();
    const GridDomain dom = ctx.domain(g, false);
    const Point c = dom.midpoint();
    std::vector<double> radii;
    if (ctx.cfg.has("radii")) {
        radii = ctx.cfg.numbers("radii");
    } else {
        const double big = central_ball(dom, g).radius;
        for (int k = 3; k >= 0; --k) radii.push_back(big * std::ldexp(1.0, -k));
    }
    std::string csv = "radius,counted_measure,exact_measure\n";
    for (double r : radii) {
        const BallMeasure m = ball_measure(c, r, g, dom);
        csv += fmt(r) + "," + fmt(m.measure) + "," + fmt(g.ball_volume(r)) + "\n";
    }
    ctx.write_text("geometry.csv", csv);

    const Ball b = central_ball(dom, g);
    const double half = ball_measure(c, 0.5 * b.radius, g, dom).measure;
    std::mt19937_64 rng(ctx.seed);
    std::vector<std::uniform_real_distribution<double>> axis;
    for (int k = 0; k < dom.dim(); ++k) axis.emplace_back(dom.lo(k), dom.hi(k));
    auto random_point = [&] {
        Point p(dom.dim());
        for (int k = 0; k < dom.dim(); ++k) p[k] = axis[static_cast<std::size_t>(k)](rng);
        return p;
    };
    double worst = 0.0;
    for (int i = 0; i < 10'000; ++i) {
        const Point a = random_point(), m = random_point(), z = random_point();
        const double den = g.distance(a, m) + g.distance(m, z);
        if (den > 0.0) worst = std::max(worst, g.distance(a, z) / den);
    }
    ctx.summary = {{"group", g.id()},
                   {"layer_dims", g.layer_dims()},
                   {"homogeneous_dimension", g.homogeneous_dimension()},
                   {"quasi_metric_constant", g.quasi_metric_constant()},
                   {"central_ball", ball_json(b)},
                   {"doubling_ratio", half > 0.0 ? ball_measure(c, b.radius, g, dom).measure / half : 0.0},
                   {"max_triangle_ratio", worst}};
    ctx.write_json("geometry.json", ctx.summary);
}

void cmd_norm(Context& ctx) {
    const CarnotGroup g = ctx.group();
    const GridDomain dom = ctx.domain(g, false);
    const ExponentField p(ctx.field("exponent", "2", dom));
    const Weight w(ctx.field("weight", "1", dom));
    const GridFunction f = ctx.field("function", "1", dom);
    LogHolderOptions lh;
    lh.seed = ctx.seed;
    const auto holder = log_holder_check(p, g, lh);
    ctx.summary = {{"norm", luxemburg_norm(f, p, w)},
                   {"modular", modular(f, p, w)},
                   {"p_minus", p.minus()},
                   {"p_plus", p.plus()},
                   {"log_holder_c0", holder.c0},
                   {"log_holder_pairs", holder.pairs}};
    ctx.write_json("norm.json", ctx.summary);
}

void cmd_apq(Context& ctx) {
    const CarnotGroup g = ctx.group();
    const GridDomain dom = ctx.domain(g, false);
    const ExponentField p(ctx.field("exponent", "2", dom));
    const ExponentField q(ctx.field("q_exponent", ctx.cfg.text_value("exponent", "2"), dom));
    const Weight w(ctx.field("weight", "1", dom));
    const int e0 = static_cast<int>(ctx.cfg.integer("enrichment", 0));
    const int extra = static_cast<int>(ctx.cfg.integer("enrichments", 0));
    json estimates = json::array();
    std::vector<double> values;
    MuckenhouptEstimate first;
    for (int e = e0; e <= e0 + extra; ++e) {
        const auto est = apq_constant_estimate(w, p, q, BallFamily::grid_dyadic(dom, g, e), g);
        if (e == e0) first = est;
        values.push_back(est.constant);
        estimates.push_back({{"enrichment", e}, {"estimate", est.constant}, {"argmax", ball_json(est.argmax)},
                             {"balls", est.balls}});
    }
    ctx.summary = {{"estimate", first.constant}, {"gamma", first.gamma}, {"argmax", ball_json(first.argmax)},
                   {"enrichments", estimates}};
    if (values.size() >= 2) {
        const Growth gr = classify_growth(values);
        ctx.summary["growth"] = gr == Growth::Stable ? "stable" : gr == Growth::Divergent ? "divergent" : "inconclusive";
    }
    ctx.write_json("apq.json", ctx.summary);
}

void cmd_maximal(Context& ctx) {
    const CarnotGroup g = ctx.group();
    const GridDomain dom = ctx.domain(g, false);
    const GridFunction f = ctx.field("function", "1", dom);
    const BallFamily balls = BallFamily::grid_dyadic(dom, g, static_cast<int>(ctx.cfg.integer("enrichment", 0)));
    std::optional<GridFunction> density;
    if (ctx.cfg.has("density")) density = ctx.field("density", "1", dom);
    const GridFunction mf = maximal_operator(f, balls, g, density ? &*density : nullptr);
    ctx.write_grid("maximal.csv", mf, g, "Mf");
    ctx.summary = {{"family", balls.id()}, {"sup", mf.sup_abs()}};
}

void cmd_fracint(Context& ctx) {
    const CarnotGroup g = ctx.group();
    const GridDomain dom = ctx.domain(g, false);
    const GridFunction f = ctx.field("function", "1", dom);
    const double alpha = ctx.cfg.number("alpha", 1.0);
    const GridFunction If = fractional_integral(f, alpha, g);
    ctx.write_grid("fracint.csv", If, g, "Iaf");
    ctx.summary = {{"alpha", alpha}, {"sup", If.sup_abs()}};
    if (ctx.cfg.has("q_exponent")) {
        const ExponentField p(ctx.field("exponent", "2", dom));
        const ExponentField q(ctx.field("q_exponent", "2", dom));
        const Weight w(ctx.field("weight", "1", dom));
        ctx.summary["strong_ratio"] = luxemburg_norm(If, q, w) / luxemburg_norm(f, p, w);
    }
    if (ctx.cfg.has("weak_p")) {
        const Weight w(ctx.field("weight", "1", dom));
        WeakTypeOptions opts;
        opts.t_levels = static_cast<int>(ctx.cfg.integer("t_levels", 6));
        const auto wt = weak_type_check(f, alpha, ctx.cfg.number("weak_p"), ctx.cfg.number("weak_q", 2.0), w, g, opts);
        ctx.summary["weak_constant"] = wt.constant;
        ctx.summary["weak_t_at_max"] = wt.t_at_max;
    }
    ctx.write_json("fracint.json", ctx.summary);
}

void cmd_rdf(Context& ctx) {
    const CarnotGroup g = ctx.group();
    const GridDomain dom = ctx.domain(g, false);
    const ExponentField p(ctx.field("exponent", "2", dom));
    const GridFunction h = ctx.field("function", "1", dom);
    SUBVARLAP_REQUIRE(h.min() >= 0.0, ErrorCode::InvalidArgument, "h must be non-negative");
    const BallFamily balls = BallFamily::grid_dyadic(dom, g, static_cast<int>(ctx.cfg.integer("enrichment", 0)));
    std::optional<GridFunction> density;
    if (ctx.cfg.has("density")) density = ctx.field("density", "1", dom);
    const auto probes = bump_indicator_probes(dom, static_cast<std::size_t>(ctx.cfg.integer("probes", 16)), ctx.seed);
    Weight norm_weight = Weight::unit(dom);
    if (density) {
        GridFunction wf(dom);
        for (std::size_t i = 0; i < dom.size(); ++i) wf[i] = std::pow((*density)[i], 1.0 / p[i]);
        norm_weight = Weight(wf);
    }
    const auto est = operator_norm_estimate(maximal_operator_op(balls, g, density), p, norm_weight, probes,
                                            "bumps-indicators");
    const auto res = rubio_de_francia(h, p, density ? &*density : nullptr, est,
                                      static_cast<int>(ctx.cfg.integer("terms", kRubioDeFranciaTerms)), balls, g);
    ctx.write_grid("rdf.csv", res.rh, g, "Rh");
    ctx.summary = {{"norm_estimate", est.value}, {"term_norms", res.term_norms}, {"terms", res.terms},
                   {"tail_sup", res.tail_sup}, {"last_term_norm", res.last_term_norm}};
    ctx.write_json("rdf.json", ctx.summary);
}

void cmd_swcheck(Context& ctx) {
    const CarnotGroup g = ctx.group();
    const GridDomain dom = ctx.domain(g, false);
    const GridFunction target = ctx.field("weight", "1", dom);
    const GridFunction source = ctx.field("source_weight", "1", dom);
    SawyerWheedenOptions opts;
    opts.seed = ctx.seed;
    opts.pair_budget = static_cast<std::size_t>(ctx.cfg.integer("pair_budget", 10'000));
    const auto res = sawyer_wheeden_check(
        target, source, ctx.cfg.number("p", 2.0), ctx.cfg.number("q", 2.0), ctx.cfg.number("alpha", 1.0),
        BallFamily::grid_dyadic(dom, g, static_cast<int>(ctx.cfg.integer("enrichment", 0))), g, opts);
    ctx.summary = {{"value", res.value}, {"argmax", ball_json(res.argmax)}, {"balls_used", res.balls_used},
                   {"skipped", res.skipped}};
    ctx.write_json("swcheck.json", ctx.summary);
}

void cmd_poincare(Context& ctx) {
    const CarnotGroup g = ctx.group();
    SweepProblem prob{g, ctx.domain(g, true), ctx.cfg.expression("exponent", "2").function(),
                      ctx.cfg.expression("weight", "1").function()};
    const std::string mode = ctx.cfg.text_value("mode", "zero");
    SUBVARLAP_REQUIRE(mode == "zero" || mode == "mean", ErrorCode::InvalidArgument, "mode must be 'zero' or 'mean'");
    prob.mode = mode == "zero" ? RatioMode::ZeroBoundary : RatioMode::MeanSubtracted;
    prob.order = static_cast<int>(ctx.cfg.integer("order", 1));
    const std::string variant = ctx.cfg.text_value("variant", "sobolev");
    SUBVARLAP_REQUIRE(variant == "sobolev" || variant == "same", ErrorCode::InvalidArgument,
                      "variant must be 'sobolev' or 'same'");
    prob.variant = variant == "sobolev" ? RatioVariant::SobolevGain : RatioVariant::SameExponent;
    prob.jump_delta = ctx.cfg.number("jump_delta", 0.0);
    const TestFunctionFamily family(family_from_string(ctx.cfg.text_value("family", "trig")),
                                    static_cast<std::size_t>(ctx.cfg.integer("count", 32)), ctx.seed,
                                    prob.mode == RatioMode::ZeroBoundary);
    const SweepResult res = ratio_sweep(family, prob, ctx.refine);
    json gates = json::array();
    for (const auto& gate : res.gates) gates.push_back({{"name", gate.name}, {"passed", gate.passed}, {"detail", gate.detail}});
    ctx.summary = {{"family", family.id()}, {"gates", gates}};
    if (!res.gates_passed) {
        ctx.write_json("poincare.json", ctx.summary);
        for (const auto& gate : res.gates)
            if (!gate.passed) throw GateFailure{gate.name, gate.detail};
    }
    std::string csv = "id,ratio,numerator_norm,denominator_norm\n";
    json levels = json::array();
    for (const auto& rep : res.reports) {
        std::string res_tag;
        for (std::size_t k = 0; k < rep.resolution.size(); ++k) res_tag += (k ? "x" : "") + std::to_string(rep.resolution[k]);
        for (std::size_t m = 0; m < rep.ratios.size(); ++m) {
            const auto& r = rep.ratios[m];
            const std::string ratio = r.status == RatioStatus::Finite ? fmt(r.ratio)
                                      : r.status == RatioStatus::Vacuous ? "vacuous"
                                                                         : "inf";
            csv += "m" + std::to_string(m) + "@" + res_tag + "," + ratio + "," + fmt(r.numerator) + "," +
                   fmt(r.denominator) + "\n";
        }
        csv += "max@" + res_tag + "," + (rep.max_ratio ? fmt(*rep.max_ratio) : "vacuous") + ",,\n";
        levels.push_back({{"resolution", rep.resolution},
                          {"inequality", rep.inequality},
                          {"max_ratio", rep.max_ratio ? json(*rep.max_ratio) : json(nullptr)},
                          {"argmax", rep.argmax}});
    }
    ctx.write_text("poincare.csv", csv);
    ctx.summary["levels"] = levels;
    ctx.summary["refinement_factor"] = res.refinement_factor ? json(*res.refinement_factor) : json(nullptr);
    ctx.write_json("poincare.json", ctx.summary);
}

void cmd_truncate(Context& ctx) {
    const CarnotGroup g = ctx.group();
    const GridDomain dom = ctx.domain(g, false);
    const GridFunction f = ctx.field("function", "1", dom);
    const double c = ctx.cfg.number("c", domain_mean(f));
    const int j = static_cast<int>(ctx.cfg.integer("level", 0));
    ctx.write_grid("truncate.csv", level_truncation(f, c, j), g, "value");
    ctx.summary = {{"c", c}, {"level", j}};
}

void cmd_represent(Context& ctx) {
    const CarnotGroup g = ctx.group();
    const GridDomain base = ctx.domain(g, false);
    json levels = json::array();
    double lo = 0.0, hi = 0.0;
    for (int level = 0; level <= ctx.refine; ++level) {
        const GridDomain dom = base.refined(1 << level);
        const auto res = representation_check(ctx.field("function", "x", dom), g);
        levels.push_back({{"cells", dom.size()}, {"constant", res.constant}, {"evaluated", res.evaluated},
                          {"excluded", res.excluded}, {"central_ball", ball_json(res.central_ball)},
                          {"ball_mean", res.ball_mean}});
        lo = level == 0 ? res.constant : std::min(lo, res.constant);
        hi = level == 0 ? res.constant : std::max(hi, res.constant);
    }
    ctx.summary = {{"levels", levels}, {"refinement_factor", lo > 0.0 ? hi / lo : 0.0}};
    ctx.write_json("represent.json", ctx.summary);
}

void cmd_solve(Context& ctx) {
    const CarnotGroup g = ctx.group();
    const GridDomain dom = ctx.domain(g, true);
    const ExponentField p(ctx.field("exponent", "2", dom));
    const Weight w(ctx.field("weight", "1", dom));
    const std::string preset = ctx.cfg.text_value("a_preset", "isotropic");
    SUBVARLAP_REQUIRE(preset == "isotropic" || preset == "rotated", ErrorCode::InvalidArgument,
                      "a_preset must be 'isotropic' or 'rotated'");
    const EllipticityField a = preset == "isotropic"
                                   ? EllipticityField::isotropic(w, g.horizontal_dim())
                                   : EllipticityField::rotated(w, g.horizontal_dim(), ctx.cfg.number("a_angle", 0.0));
    DirichletProblem prob{dom, g, p, w, a, ctx.field("source", "1", dom), {}};
    prob.settings.gradient_tol = ctx.cfg.number("gradient_tol", prob.settings.gradient_tol);
    prob.settings.max_iterations =
        static_cast<std::size_t>(ctx.cfg.integer("max_iterations", static_cast<long long>(prob.settings.max_iterations)));
    std::optional<GridFunction> init;
    const std::string init_kind = ctx.cfg.text_value("init", "zero");
    SUBVARLAP_REQUIRE(init_kind == "zero" || init_kind == "random", ErrorCode::InvalidArgument,
                      "init must be 'zero' or 'random'");
    if (init_kind == "random") init = random_zero_boundary(dom, ctx.seed);
    const Solution sol = solve_dirichlet(prob, init);
    ctx.write_grid("solution.csv", sol.u, g, "u");
    std::string trace = "iteration,energy\n";
    for (std::size_t i = 0; i < sol.energy_trace.size(); ++i) trace += std::to_string(i) + "," + fmt(sol.energy_trace[i]) + "\n";
    ctx.write_text("energy_trace.csv", trace);
    json stages = json::array();
    std::vector<double> schedule;
    for (const auto& s : sol.stages) {
        schedule.push_back(s.eps);
        stages.push_back({{"eps", s.eps}, {"iterations", s.iterations}, {"gradient_sup", s.gradient_sup},
                          {"status", to_string(s.status)}});
    }
    ctx.summary = {{"iterations", sol.iterations},
                   {"status", to_string(sol.status)},
                   {"gradient_sup", sol.gradient_sup},
                   {"residual", weak_residual(sol.u, prob, static_cast<std::size_t>(ctx.cfg.integer("residual_tests", 10)),
                                              sol.eps, ctx.seed)},
                   {"eps_schedule", schedule},
                   {"eps_exit", sol.eps},
                   {"final_energy", sol.energy_trace.back()},
                   {"stages", stages},
                   {"warnings", sol.warnings}};
    ctx.write_json("diagnostics.json", ctx.summary);
}

void dispatch(Context& ctx) {
    const std::string& c = ctx.command;
    if (c == "geometry") return cmd_geometry(ctx);
    if (c == "norm") return cmd_norm(ctx);
    if (c == "apq") return cmd_apq(ctx);
    if (c == "maximal") return cmd_maximal(ctx);
    if (c == "fracint") return cmd_fracint(ctx);
    if (c == "rdf") return cmd_rdf(ctx);
    if (c == "swcheck") return cmd_swcheck(ctx);
    if (c == "poincare") return cmd_poincare(ctx);
    if (c == "truncate") return cmd_truncate(ctx);
    if (c == "represent") return cmd_represent(ctx);
    if (c == "solve") return cmd_solve(ctx);
    throw Error(ErrorCode::InvalidArgument, "unknown command '" + c + "'");
}

void write_manifest(Context& ctx, double wall) {
    std::string effective = ctx.cfg.text();
    for (const auto& [key, e] : ctx.cfg.entries())
        if (e.line == 0) effective += "\n# override " + key + " = " + e.value;
    effective += "\n# command " + ctx.command + " seed " + std::to_string(ctx.seed) + " refine " + std::to_string(ctx.refine);
    json m = {{"command", ctx.command},     {"version", kVersion},          {"config", ctx.cfg.text()},
              {"config_hash", fnv1a_hex(effective)}, {"seed", ctx.seed}, {"refine", ctx.refine},
              {"wall_time_s", wall},        {"artifacts", ctx.artifacts}};
    std::ofstream os(ctx.out_dir / "manifest.json", std::ios::binary);
    os << m.dump(2) << "\n";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    if (const char* env = std::getenv("SUBVARLAP_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) omp_set_num_threads(n);
    }

    CLI::App app{"Weighted variable-exponent analysis on Carnot groups"};
    app.require_subcommand(1);
    std::string config_path, out_dir;
    std::optional<unsigned long long> seed;
    std::optional<int> refine;
    std::optional<std::string> mode, family, variant;
    std::optional<int> order, count;
    for (const auto& name : kCommands) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "experiment config file")->required();
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--seed", seed, "random seed");
        sub->add_option("--refine", refine, "number of grid refinements");
        if (name == "poincare") {
            sub->add_option("--mode", mode, "zero or mean")->check(CLI::IsMember({"zero", "mean"}));
            sub->add_option("--order", order, "1 or 2");
            sub->add_option("--family", family, "bumps, coordbumps, trig or tents");
            sub->add_option("--count", count, "number of test functions");
            sub->add_option("--variant", variant, "sobolev or same");
        }
    }
    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitError;
    }

    Context ctx;
    ctx.command = app.get_subcommands().front()->get_name();
    const auto start = std::chrono::steady_clock::now();
    try {
        ctx.cfg = Config::load(config_path);
        ctx.cfg.require_known(kKeys);
        if (mode) ctx.cfg.set("mode", *mode);
        if (order) ctx.cfg.set("order", std::to_string(*order));
        if (family) ctx.cfg.set("family", *family);
        if (count) ctx.cfg.set("count", std::to_string(*count));
        if (variant) ctx.cfg.set("variant", *variant);
        ctx.seed = seed ? *seed : static_cast<unsigned long long>(ctx.cfg.integer("seed", 1));
        ctx.refine = refine ? *refine : static_cast<int>(ctx.cfg.integer("refine", 1));
        SUBVARLAP_REQUIRE(ctx.refine >= 0 && ctx.refine <= 4, ErrorCode::InvalidArgument, "refine must be in 0..4");
        ctx.out_dir = out_dir.empty() ? fs::path(ctx.cfg.text_value("out", "out")) : fs::path(out_dir);
        fs::create_directories(ctx.out_dir);
        dispatch(ctx);
    } catch (const GateFailure& gate) {
        write_manifest(ctx, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
        err << "gate failed: " << gate.gate << " (" << gate.detail << ")\n";
        return kExitGate;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitError;
    }
    write_manifest(ctx, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
    out << ctx.summary.dump() << "\n";
    return kExitOk;
}

}  // namespace subvarlap
