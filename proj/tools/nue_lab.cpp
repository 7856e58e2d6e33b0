// nue_lab: batch front door for the nonuniform-expansion laboratory.
// Reads a key=value config, runs one experiment pipeline, writes CSV
// artifacts plus a flat summary.json. All artifacts are bit-identical for
// identical (config, seed); wall time goes to stderr only for that reason.

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "nue/config.hpp"
#include "nue/correlate.hpp"
#include "nue/csv.hpp"
#include "nue/hyperbolic.hpp"
#include "nue/kernels.hpp"
#include "nue/map.hpp"
#include "nue/numeric.hpp"
#include "nue/parallel.hpp"
#include "nue/partition.hpp"
#include "nue/rng.hpp"
#include "nue/seq.hpp"
#include "nue/summary.hpp"
#include "nue/tails.hpp"
#include "nue/tower.hpp"
#include "nue/trace.hpp"

namespace fs = std::filesystem;
using namespace nue;

namespace {

constexpr const char* kVersion = "0.1.0";

struct RunContext {
    KeyValueConfig cfg;
    fs::path out_dir;
    std::uint64_t seed = 1;
    unsigned threads = 1;
    Summary summary;

    std::string artifact(const std::string& name) const {
        return (out_dir / name).string();
    }
};

MapSystem map_from_config(const KeyValueConfig& cfg) {
    const std::string kind_name = cfg.require_string("map.kind");
    const MapKind kind = map_kind_from_name(kind_name);
    std::optional<double> a0;
    const std::string a0_str = cfg.get_string("map.a0", "auto");
    if (a0_str != "auto") a0 = cfg.require_double("map.a0");
    std::optional<Interval> interval;
    if (cfg.has("map.interval_lo") || cfg.has("map.interval_hi")) {
        interval = Interval{cfg.require_double("map.interval_lo"),
                            cfg.require_double("map.interval_hi")};
    }
    switch (kind) {
        case MapKind::doubling:
            return make_doubling();
        case MapKind::ternary:
            return make_ternary();
        case MapKind::quadratic:
            return make_quadratic(a0, interval);
        case MapKind::viana:
            return make_viana(a0, cfg.get_double("map.coupling", 0.01),
                              static_cast<int>(cfg.get_long("map.base_mult", 16)), interval);
        case MapKind::cubic:
            return make_cubic();
        case MapKind::synthetic:
            throw ConfigError("synthetic maps are built through the library API, not the CLI");
    }
    throw ConfigError("unreachable map kind");
}

HyperbolicParams params_from_config(const KeyValueConfig& cfg, const MapSystem& map) {
    const double lambda = cfg.get_double("params.lambda", map.lambda_floor);
    HyperbolicParams p = HyperbolicParams::defaults(lambda, map.beta);
    p.eps = cfg.get_double_list("params.eps", p.eps);
    const std::string table = cfg.get_string("params.delta_table", "");
    if (!table.empty()) {
        // "eps:delta;eps:delta"
        std::istringstream ss(table);
        std::string item;
        while (std::getline(ss, item, ';')) {
            const auto colon = item.find(':');
            if (colon == std::string::npos)
                throw ConfigError("params.delta_table entries must look like eps:delta");
            p.delta_of_eps.table.emplace_back(std::stod(item.substr(0, colon)),
                                              std::stod(item.substr(colon + 1)));
        }
    }
    p.sigma = cfg.get_double("params.sigma", p.sigma);
    p.b = cfg.get_double("params.b", p.b);
    p.delta = cfg.get_double("params.delta",
                             p.delta_of_eps(p.eps.empty() ? 0.01 : p.eps[0]));
    p.theta1 = cfg.get_double("params.theta1", p.theta1);
    p.validate(map.beta);
    return p;
}

Point initial_point(const KeyValueConfig& cfg, const MapSystem& map) {
    const double x0 = cfg.get_double("run.x0", map.skew() ? 0.25 : 0.1);
    if (map.skew()) return Point::skew(cfg.get_double("run.omega0", 0.1), x0);
    if (!map.circle && !map.domain.contains(x0))
        return Point::one_d(0.5 * (map.domain.lo + map.domain.hi));
    return Point::one_d(x0);
}

Observable observable_from_spec(const std::string& spec) {
    if (spec == "coordinate" || spec == "coordinate_minus_half")
        return Observable::coordinate_minus_half();
    if (spec.rfind("indicator:", 0) == 0) {
        const std::string rest = spec.substr(10);
        const auto colon = rest.find(':');
        if (colon == std::string::npos)
            throw ConfigError("indicator observable needs indicator:lo:hi");
        return Observable::indicator(
            Interval{std::stod(rest.substr(0, colon)), std::stod(rest.substr(colon + 1))});
    }
    if (spec.rfind("user:", 0) == 0) {
        const std::string path = spec.substr(5);
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open observable table: " + path);
        std::vector<std::pair<double, double>> table;
        std::string line;
        while (std::getline(in, line)) {
            std::istringstream ls(line);
            double x, y;
            char comma;
            if (ls >> x >> comma >> y) table.emplace_back(x, y);
        }
        return Observable::user(std::move(table));
    }
    throw ConfigError("unknown observable spec: " + spec);
}

void put_common(RunContext& ctx, const std::string& command) {
    ctx.summary.set("command", command);
    ctx.summary.set("version", kVersion);
    ctx.summary.set("seed", static_cast<unsigned long long>(ctx.seed));
    ctx.summary.set("threads", static_cast<long>(ctx.threads));
    ctx.summary.set("kernel_backend", std::string(kern::backend_name(kern::active_backend())));
}

void put_params(RunContext& ctx, const HyperbolicParams& p) {
    ctx.summary.set("params.sigma", p.sigma);
    ctx.summary.set("params.delta", p.delta);
    ctx.summary.set("params.b", p.b);
    ctx.summary.set("params.lambda", p.lambda);
    for (std::size_t i = 0; i < p.eps.size(); ++i)
        ctx.summary.set("params.eps" + std::to_string(i + 1), p.eps[i]);
    ctx.summary.set("params.theta1", p.theta1);
    ctx.summary.set("params.theta_bound",
                    p.eps.size() >= 2 ? theta_bound(p.eps[0], p.eps[1], p.theta1) : 0.0);
}

void put_map(RunContext& ctx, const MapSystem& map) {
    ctx.summary.set("map.kind", map_kind_name(map.kind));
    ctx.summary.set("map.a0", map.a0);
    ctx.summary.set("map.coupling", map.coupling);
    ctx.summary.set("map.base_mult", map.base_mult);
    ctx.summary.set("map.interval_lo", map.domain.lo);
    ctx.summary.set("map.interval_hi", map.domain.hi);
    ctx.summary.set("map.lambda_floor", map.lambda_floor);
    ctx.summary.set("map.beta", map.beta);
}

void put_fit(RunContext& ctx, const DecayFit& fit) {
    const char* names[] = {"polynomial", "exponential", "stretched"};
    ctx.summary.set("model", std::string(names[static_cast<int>(fit.model)]));
    ctx.summary.set("C", fit.C);
    ctx.summary.set("gamma", fit.gamma);
    ctx.summary.set("c", fit.c);
    ctx.summary.set("eta", fit.eta);
    ctx.summary.set("window_lo", fit.window_lo);
    ctx.summary.set("window_hi", fit.window_hi);
    ctx.summary.set("residual", fit.residual);
    ctx.summary.set("r2", fit.r2);
    ctx.summary.set("stderr_c", fit.stderr_c);
    ctx.summary.set("stderr_gamma", fit.stderr_gamma);
    ctx.summary.set("stderr_eta", fit.stderr_eta);
}

void write_tail_csv(const std::string& path, const TailHistogram& hist) {
    CsvFile f(path);
    f.raw_line("n,survivors,fraction,censored_flag");
    const auto frac = hist.fractions();
    for (std::size_t n = 0; n < hist.survivors.size(); ++n) {
        const bool flag = hist.survivors[n] <= hist.censored && hist.censored > 0;
        f.row(static_cast<long>(n), static_cast<long long>(hist.survivors[n]), frac[n], flag);
    }
}

void write_mass_tail_csv(const std::string& path, const std::vector<double>& surv,
                         double total) {
    CsvFile f(path);
    f.raw_line("n,survivors,fraction,censored_flag");
    for (std::size_t n = 0; n < surv.size(); ++n)
        f.row(static_cast<long>(n), surv[n], total > 0 ? surv[n] / total : 0.0, false);
}

// ---------------------------------------------------------------- pipelines

void run_simulate(RunContext& ctx, const MapSystem& map, const HyperbolicParams& params) {
    const long horizon = ctx.cfg.get_long("run.horizon", 1000);
    const std::vector<double> levels =
        params.delta_levels(std::min<std::size_t>(params.eps.size(), 3));
    const Point x0 = initial_point(ctx.cfg, map);
    const OrbitTrace tr = orbit_trace(map, x0, static_cast<std::size_t>(horizon), levels);
    CsvFile f(ctx.artifact("trace.csv"));
    std::string header = "k,a_k";
    for (double d : levels) header += ",r_delta=" + csv_num(d);
    f.raw_line(header);
    for (std::size_t k = 0; k < tr.length; ++k) {
        std::string line = std::to_string(k) + "," + csv_num(tr.a[k]);
        for (std::size_t li = 0; li < levels.size(); ++li) line += "," + csv_num(tr.r[li][k]);
        f.raw_line(line);
    }
    ctx.summary.set("horizon", horizon);
    ctx.summary.set("trace_csv", ctx.artifact("trace.csv"));
    ctx.summary.set("status", "ok");
}

void run_hypertimes(RunContext& ctx, const MapSystem& map, const HyperbolicParams& params) {
    const long horizon = ctx.cfg.get_long("run.horizon", 200);
    const long samples = ctx.cfg.get_long("run.samples", 100);
    std::vector<double> levels =
        params.delta_levels(std::min<std::size_t>(params.eps.size(), 3));
    if (std::find(levels.begin(), levels.end(), params.delta) == levels.end())
        levels.push_back(params.delta);

    CsvFile ht(ctx.artifact("hvalues.csv"));
    ht.raw_line("sample_id,h1,h1_censored_flag,h2,h2_censored_flag");
    std::uint64_t sm = ctx.seed;
    bool first_written = false;
    for (long s = 0; s < samples; ++s) {
        Point x0;
        if (map.skew())
            x0 = Point::skew(to_unit(splitmix64(sm)),
                             map.domain.lo + map.domain.length() * to_unit(splitmix64(sm)));
        else if (map.circle)
            x0 = Point::one_d(to_unit(splitmix64(sm)));
        else
            x0 = Point::one_d(map.domain.lo + map.domain.length() * to_unit(splitmix64(sm)));
        OrbitTrace tr;
        try {
            tr = orbit_trace(map, x0, static_cast<std::size_t>(horizon), levels);
        } catch (const SingularityError&) {
            continue;  // skip exact singular hits in the listing
        }
        const HittingTime v1 = h1_censored(tr, params);
        HittingTime v2;
        if (params.eps.size() >= 3) v2 = h2(tr, params);
        ht.row(s, v1.censored ? -1 : v1.value, v1.censored, v2.censored ? -1 : v2.value,
               v2.censored);
        if (!first_written) {
            const HyperbolicTimeSet set = hyperbolic_times(tr, params);
            CsvFile tf(ctx.artifact("times.csv"));
            tf.raw_line("n,is_hyperbolic,is_super");
            std::size_t idx = 0;
            for (long n = 1; n <= horizon; ++n) {
                const bool is_h = set.is_time(n);
                bool is_s = false;
                if (is_h) {
                    while (idx < set.times.size() && set.times[idx] < n) ++idx;
                    if (idx < set.times.size() && set.times[idx] == n)
                        is_s = set.super_flags[idx];
                }
                tf.row(n, is_h, is_s);
            }
            first_written = true;
        }
    }
    ctx.summary.set("horizon", horizon);
    ctx.summary.set("samples", samples);
    ctx.summary.set("hvalues_csv", ctx.artifact("hvalues.csv"));
    ctx.summary.set("times_csv", ctx.artifact("times.csv"));
    ctx.summary.set("status", "ok");
}

void run_tails(RunContext& ctx, const MapSystem& map, const HyperbolicParams& params) {
    const long horizon = ctx.cfg.get_long("run.horizon", 500);
    const long samples = ctx.cfg.get_long("run.samples", 10000);
    const std::string which_str = ctx.cfg.get_string("tails.which", "h2");
    if (which_str != "h1" && which_str != "h2")
        throw ConfigError("tails.which must be h1 or h2");
    const HWhich which = which_str == "h1" ? HWhich::h1 : HWhich::h2;

    const TailHistogram hist =
        sample_tail(map, which, params, static_cast<std::size_t>(horizon),
                    static_cast<std::size_t>(samples), ctx.seed, ctx.threads);
    write_tail_csv(ctx.artifact("tails.csv"), hist);

    ctx.summary.set("which", which_str);
    ctx.summary.set("horizon", horizon);
    ctx.summary.set("samples", samples);
    ctx.summary.set("censored", static_cast<long long>(hist.censored));
    ctx.summary.set("resampled", static_cast<long long>(hist.resampled));
    ctx.summary.set("tails_csv", ctx.artifact("tails.csv"));
    if (hist.survivors.size() < 2 || hist.survivors[1] == 0) {
        ctx.summary.set("status", "empty");  // everything resolved at n = 1
        return;
    }
    const std::string model_str = ctx.cfg.get_string("tails.fit_model", "stretched");
    try {
        const DecayModel model = model_str == "polynomial"    ? DecayModel::polynomial
                                 : model_str == "exponential" ? DecayModel::exponential
                                                              : DecayModel::stretched;
        put_fit(ctx, fit_decay(hist, model));
        ctx.summary.set("status", "ok");
    } catch (const UnderdeterminedError& e) {
        ctx.summary.set("status", "fit_underdetermined");
        ctx.summary.set("fit_error", std::string(e.what()));
    }
}

void run_fit(RunContext& ctx) {
    const std::string input = ctx.cfg.require_string("fit.input");
    const std::string model_str = ctx.cfg.get_string("fit.model", "stretched");
    const DecayModel model = model_str == "polynomial"    ? DecayModel::polynomial
                             : model_str == "exponential" ? DecayModel::exponential
                                                          : DecayModel::stretched;
    const std::vector<double> u = read_sequence_csv(input);
    if (u.empty()) {
        ctx.summary.set("status", "empty");
        return;
    }
    FitWindow win{ctx.cfg.get_long("fit.window_lo", 5), ctx.cfg.get_long("fit.window_hi", 0)};
    if (win.hi <= 0) win.hi = static_cast<long>(u.size()) - 1;
    put_fit(ctx, fit_decay(u, win, model));
    ctx.summary.set("input", input);
    ctx.summary.set("status", "ok");
}

void run_correlate(RunContext& ctx, const MapSystem& map) {
    const long n_max = ctx.cfg.get_long("run.n_max", 60);
    const long samples = ctx.cfg.get_long("run.samples", 1000000);
    const long burn_in = ctx.cfg.get_long("run.burn_in", 1000);
    const long blocks = ctx.cfg.get_long("run.blocks", 20);
    const Observable f = observable_from_spec(ctx.cfg.get_string("correlate.f", "coordinate"));
    const Observable g = observable_from_spec(ctx.cfg.get_string("correlate.g", "coordinate"));

    std::size_t resampled = 0;
    const auto cor = correlate(map, f, g, static_cast<std::size_t>(n_max),
                               static_cast<std::size_t>(samples),
                               static_cast<std::size_t>(burn_in), ctx.seed,
                               static_cast<std::size_t>(blocks), &resampled);
    CsvFile cf(ctx.artifact("corr.csv"));
    cf.raw_line("n,cor,stderr");
    for (std::size_t n = 0; n < cor.size(); ++n)
        cf.row(static_cast<long>(n), cor[n].cor, cor[n].stderr_);
    ctx.summary.set("n_max", n_max);
    ctx.summary.set("samples", samples);
    ctx.summary.set("burn_in", burn_in);
    ctx.summary.set("blocks", blocks);
    ctx.summary.set("resampled", static_cast<long long>(resampled));
    ctx.summary.set("f_lipschitz", f.lipschitz_estimate());
    ctx.summary.set("g_lipschitz", g.lipschitz_estimate());
    ctx.summary.set("corr_csv", ctx.artifact("corr.csv"));
    ctx.summary.set("status", "ok");
}

void run_partition(RunContext& ctx, const MapSystem& map, const HyperbolicParams& params) {
    PartitionConfig pc;
    pc.delta2 = ctx.cfg.get_double("partition.delta2", 0.4);
    pc.horizon = ctx.cfg.get_long("run.horizon", 40);
    pc.grid = ctx.cfg.get_long("run.grid", 10000);
    pc.source_cell = static_cast<int>(ctx.cfg.get_long("partition.source_cell", 0));
    const double cells_delta2 = ctx.cfg.get_double("partition.cells_delta2", pc.delta2);
    const Interval dom = map.circle ? Interval{0.0, 1.0} : map.domain;
    const std::vector<Cell> cells = base_cells(dom, cells_delta2);

    const PartitionResult res = build_partition(map, params, cells, pc);

    CsvFile pf(ctx.artifact("partition.csv"));
    pf.raw_line("id,lo,hi,birth_time,return_time,source_cell,target_cell");
    for (const auto& e : res.elements)
        pf.row(e.id, e.lo, e.hi, e.birth_time, e.return_time, e.source_cell, e.target_cell);

    CsvFile lf(ctx.artifact("ledger.csv"));
    lf.raw_line(
        "origin_id,origin_time,m,annulus_lo_left,annulus_hi_left,annulus_lo_right,"
        "annulus_hi_right");
    for (const auto& e : res.elements) {
        for (long m = e.birth_time + 1; m <= pc.horizon; ++m) {
            const Annulus ann = annulus(map, e, cells, params.sigma, pc.delta2, m);
            lf.row(e.id, e.birth_time, m, ann.left.lo, ann.left.hi, ann.right.lo,
                   ann.right.hi);
        }
    }

    CsvFile tf(ctx.artifact("tail.csv"));
    tf.raw_line("n,unselected_mass");
    for (std::size_t n = 0; n < res.state.unselected_mass.size(); ++n)
        tf.row(static_cast<long>(n), res.state.unselected_mass[n]);

    const Cell& u1 = cells[static_cast<std::size_t>(pc.source_cell)];
    ctx.summary.set("cells", static_cast<long>(cells.size()));
    ctx.summary.set("delta2", pc.delta2);
    ctx.summary.set("elements", static_cast<long>(res.elements.size()));
    ctx.summary.set("total_selected_mass", res.state.selected_mass);
    ctx.summary.set("source_cell_mass", u1.width());
    ctx.summary.set("selected_fraction",
                    u1.width() > 0 ? res.state.selected_mass / u1.width() : 0.0);
    ctx.summary.set("clipped_cores", res.clipped_cores);
    ctx.summary.set("mass_error_bound", res.mass_error_bound);

    {
        std::vector<double> ns, logm;
        for (std::size_t n = 1; n < res.state.unselected_mass.size(); ++n)
            if (res.state.unselected_mass[n] > 0.0) {
                ns.push_back(static_cast<double>(n));
                logm.push_back(std::log(res.state.unselected_mass[n]));
            }
        if (ns.size() >= 3) {
            const LinFit lfit = linear_fit(ns, logm);
            ctx.summary.set("tail_fit_slope", lfit.slope);
            ctx.summary.set("tail_fit_r2", lfit.r2);
        }
    }
    const ForbiddenProfile prof = forbidden_profile(res.state);
    ctx.summary.set("lambda5_hat", prof.lambda5_hat);
    ctx.summary.set("lambda5_r2", prof.r2);
    const BoundaryConstants bc = boundary_constants(cells, pc.delta2, params.sigma);
    ctx.summary.set("C2", bc.C2);
    ctx.summary.set("lambda1", bc.lambda1);
    ctx.summary.set("lambda2", bc.lambda2);

    bool checks_pass = true;
    for (const auto& e : res.elements) {
        const ElementCheckReport rep = element_checks(map, e, cells, params.sigma);
        if (!rep.pass) checks_pass = false;
    }
    ctx.summary.set("element_checks_pass", checks_pass);
    ctx.summary.set("partition_csv", ctx.artifact("partition.csv"));
    ctx.summary.set("ledger_csv", ctx.artifact("ledger.csv"));
    ctx.summary.set("tail_csv", ctx.artifact("tail.csv"));
    ctx.summary.set("status", res.elements.empty() ? "empty" : "ok");
}

void run_tower(RunContext& ctx, const MapSystem& map, const HyperbolicParams& params) {
    PartitionConfig pc;
    pc.delta2 = ctx.cfg.get_double("partition.delta2", 0.4);
    pc.horizon = ctx.cfg.get_long("run.horizon", 40);
    pc.grid = ctx.cfg.get_long("run.grid", 2000);
    const double cells_delta2 = ctx.cfg.get_double("partition.cells_delta2", pc.delta2);
    const int base_cell = static_cast<int>(ctx.cfg.get_long("tower.base_cell", 0));
    const long l_cap = ctx.cfg.get_long("tower.l_cap", 2);
    const long tau_horizon = ctx.cfg.get_long("tower.tau_horizon", 400);
    const Interval dom = map.circle ? Interval{0.0, 1.0} : map.domain;
    const std::vector<Cell> cells = base_cells(dom, cells_delta2);

    std::vector<PartitionElement> all;
    long id_offset = 0;
    for (std::size_t c = 0; c < cells.size(); ++c) {
        PartitionConfig one = pc;
        one.source_cell = static_cast<int>(c);
        PartitionResult r = build_partition(map, params, cells, one);
        for (auto& e : r.elements) {
            e.id += id_offset;
            all.push_back(std::move(e));
        }
        if (!all.empty()) id_offset = all.back().id + 1;
    }

    const TowerResult tower = induce_tower(map, all, cells, base_cell, l_cap);
    CsvFile tf(ctx.artifact("tower.csv"));
    tf.raw_line("id,lo,hi,Rprime,k");
    for (const auto& z : tower.elements) tf.row(z.id, z.lo, z.hi, z.return_time, z.k());

    const std::vector<double> surv = tower_tail_dp(all, cells, base_cell, tau_horizon);
    write_mass_tail_csv(ctx.artifact("tower_tail.csv"), surv,
                        cells[static_cast<std::size_t>(base_cell)].width());

    ctx.summary.set("tower_elements", static_cast<long>(tower.elements.size()));
    ctx.summary.set("residual_mass", tower.residual_mass);
    ctx.summary.set("truncated", tower.truncated);
    ctx.summary.set("L_cap", l_cap);
    if (!tower.elements.empty()) ctx.summary.set("d1_gcd", gcd_period(tower.elements));
    {
        std::vector<double> ns, logu;
        for (std::size_t n = 1; n < surv.size(); ++n)
            if (surv[n] > 0.0) {
                ns.push_back(static_cast<double>(n));
                logu.push_back(std::log(surv[n]));
            }
        if (ns.size() >= 3) {
            const LinFit lf = linear_fit(ns, logu);
            ctx.summary.set("tail_fit_slope", lf.slope);
            ctx.summary.set("tail_fit_r2", lf.r2);
        }
    }
    ctx.summary.set("tower_csv", ctx.artifact("tower.csv"));
    ctx.summary.set("tower_tail_csv", ctx.artifact("tower_tail.csv"));
    ctx.summary.set("status", tower.elements.empty() ? "empty" : "ok");
}

Seq renewal_u_from_spec(const std::string& spec, long horizon) {
    const std::size_t len = static_cast<std::size_t>(horizon) + 2;
    if (spec.rfind("stretched:", 0) == 0) {
        const std::string rest = spec.substr(10);
        const auto comma = rest.find(',');
        if (comma == std::string::npos)
            throw ConfigError("renewal.u stretched spec needs stretched:c,eta");
        return Seq::stretched(std::stod(rest.substr(0, comma)),
                              std::stod(rest.substr(comma + 1)), len);
    }
    if (spec.rfind("polynomial:", 0) == 0)
        return Seq::polynomial(std::stod(spec.substr(11)), len);
    if (spec == "unit_step") {  // increments identically 1
        Seq s;
        s.values.assign(len, 0.0);
        s.values[0] = 1.0;
        return s;
    }
    if (spec.rfind("file:", 0) == 0) return Seq(read_sequence_csv(spec.substr(5)));
    throw ConfigError("unknown renewal.u spec: " + spec);
}

void run_renewal(RunContext& ctx) {
    const long horizon = ctx.cfg.get_long("run.horizon", 400);
    const long samples = ctx.cfg.get_long("run.samples", 100000);
    RenewalConfig rc;
    rc.u = renewal_u_from_spec(ctx.cfg.get_string("renewal.u", "stretched:1,0.5"), horizon);
    rc.C = ctx.cfg.get_double("renewal.C", 1.0);
    rc.selection_prob = ctx.cfg.get_double("renewal.selection", 0.5);
    rc.block_len = ctx.cfg.get_long("renewal.L", 1);

    const TailHistogram hist = renewal_simulate(rc, static_cast<std::size_t>(samples),
                                                horizon, ctx.seed, ctx.threads);
    write_tail_csv(ctx.artifact("tails.csv"), hist);
    ctx.summary.set("horizon", horizon);
    ctx.summary.set("samples", samples);
    ctx.summary.set("selection", rc.selection_prob);
    ctx.summary.set("L", rc.block_len);
    ctx.summary.set("C", rc.C);
    ctx.summary.set("censored", static_cast<long long>(hist.censored));
    ctx.summary.set("tails_csv", ctx.artifact("tails.csv"));
    const std::string model_str = ctx.cfg.get_string("renewal.fit_model", "stretched");
    try {
        const DecayModel model = model_str == "polynomial"    ? DecayModel::polynomial
                                 : model_str == "exponential" ? DecayModel::exponential
                                                              : DecayModel::stretched;
        put_fit(ctx, fit_decay(hist, model));
        ctx.summary.set("status", "ok");
    } catch (const UnderdeterminedError& e) {
        ctx.summary.set("status", "fit_underdetermined");
        ctx.summary.set("fit_error", std::string(e.what()));
    }
}

void run_seqcalc(RunContext& ctx) {
    const std::string op = ctx.cfg.require_string("seqcalc.op");
    if (op == "gen_series") {
        const GenSeries gs = gen_series_coeffs(
            ctx.cfg.get_double("seqcalc.C5", 1.0), ctx.cfg.get_double("seqcalc.lam2", 0.5),
            ctx.cfg.get_long("seqcalc.R", 2),
            static_cast<std::size_t>(ctx.cfg.get_long("seqcalc.n", 200)));
        write_sequence_csv(ctx.artifact("coeffs.csv"), gs.coeffs.values);
        ctx.summary.set("decay_rate", gs.decay_rate);
        ctx.summary.set("root", gs.root);
        ctx.summary.set("coeffs_csv", ctx.artifact("coeffs.csv"));
        ctx.summary.set("status", "ok");
        return;
    }
    if (op == "subadditive") {
        const SubadditiveThreshold st = subadditive_threshold(
            ctx.cfg.get_double("seqcalc.c", 1.0), ctx.cfg.require_double("seqcalc.eta"),
            ctx.cfg.get_double("seqcalc.C", 1.0), ctx.cfg.get_long("run.horizon", 10000));
        ctx.summary.set("k_min", st.k_min);
        ctx.summary.set("k_paper", st.k_paper);
        ctx.summary.set("gamma", st.gamma);
        ctx.summary.set("status", "ok");
        return;
    }
    if (op == "gamma") {
        const double eta = ctx.cfg.require_double("seqcalc.eta");
        ctx.summary.set("gamma", gamma_eta(eta));
        ctx.summary.set("gamma_endpoint", gamma_eta_endpoint(eta));
        ctx.summary.set("status", "ok");
        return;
    }
    if (op == "convolve") {
        const Seq a(read_sequence_csv(ctx.cfg.require_string("seqcalc.a")));
        const Seq b(read_sequence_csv(ctx.cfg.require_string("seqcalc.b")));
        const Seq out = convolve(a, b);
        write_sequence_csv(ctx.artifact("convolved.csv"), out.values);
        ctx.summary.set("convolved_csv", ctx.artifact("convolved.csv"));
        ctx.summary.set("status", "ok");
        return;
    }
    if (op == "tail_sum") {
        const Seq w(read_sequence_csv(ctx.cfg.require_string("seqcalc.input")));
        const long n = ctx.cfg.get_long("seqcalc.n", 0);
        ctx.summary.set("tail_sum", tail_sum(w, static_cast<std::size_t>(n)));
        ctx.summary.set("status", "ok");
        return;
    }
    throw ConfigError("unknown seqcalc.op: " + op);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"nonuniform-expansion laboratory"};
    std::string config_path;
    std::string out_dir_flag;
    long seed_flag = -1;
    long threads_flag = -1;
    app.add_option("--config", config_path, "config file (key=value)")->required();
    app.add_option("--out", out_dir_flag, "output directory (overrides run.out)");
    app.add_option("--seed", seed_flag, "seed override");
    app.add_option("--threads", threads_flag, "worker threads override");
    CLI11_PARSE(app, argc, argv);

    const auto t0 = std::chrono::steady_clock::now();
    try {
        RunContext ctx{KeyValueConfig::parse_file(config_path), {}, 1, 1, {}};
        const std::string command = ctx.cfg.require_string("command");

        std::string out = out_dir_flag;
        if (out.empty()) out = ctx.cfg.get_string("run.out", "");
        if (out.empty()) {
            const char* env = std::getenv("NUE_LAB_OUT");
            out = env ? env : ".";
        }
        ctx.out_dir = out;
        fs::create_directories(ctx.out_dir);

        ctx.seed = seed_flag >= 0 ? static_cast<std::uint64_t>(seed_flag)
                                  : static_cast<std::uint64_t>(ctx.cfg.get_long("run.seed", 1));
        const long threads =
            threads_flag >= 0 ? threads_flag : ctx.cfg.get_long("run.threads", 0);
        ctx.threads = threads <= 0 ? default_threads() : static_cast<unsigned>(threads);

        put_common(ctx, command);

        if (command == "fit") {
            run_fit(ctx);
        } else if (command == "renewal") {
            run_renewal(ctx);
        } else if (command == "seqcalc") {
            run_seqcalc(ctx);
        } else {
            const MapSystem map = map_from_config(ctx.cfg);
            put_map(ctx, map);
            if (command == "correlate") {
                run_correlate(ctx, map);
            } else {
                const HyperbolicParams params = params_from_config(ctx.cfg, map);
                put_params(ctx, params);
                if (command == "simulate")
                    run_simulate(ctx, map, params);
                else if (command == "hypertimes")
                    run_hypertimes(ctx, map, params);
                else if (command == "tails")
                    run_tails(ctx, map, params);
                else if (command == "partition")
                    run_partition(ctx, map, params);
                else if (command == "tower")
                    run_tower(ctx, map, params);
                else
                    throw ConfigError("unknown command: " + command);
            }
        }
        ctx.cfg.reject_unknown();
        ctx.summary.write(ctx.artifact("summary.json"));
        std::cout << ctx.summary.str() << std::endl;
        const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                            std::chrono::steady_clock::now() - t0)
                            .count();
        std::cerr << "wall_ms=" << ms << std::endl;
        return 0;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << std::endl;
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "fatal: " << e.what() << std::endl;
        return 4;
    }
}
