// kinlab: command-line front end over the solution families, geometry, FD
// solver, MC simulator, regularity probes, and the release report.
//
// Global flags: --config PATH (JSON key/value), --out PATH, --seed, --threads,
// --no-timestamp. Precedence: CLI flags > config file > built-in defaults; the
// resolved values are echoed into every output header. Exit codes: 0 success,
// 1 validation failure, 2 numerical failure; errors go to stderr as one JSON
// object per line.
#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "kinlab/fd.hpp"
#include "kinlab/geometry.hpp"
#include "kinlab/mc.hpp"
#include "kinlab/probe.hpp"
#include "kinlab/report.hpp"
#include "kinlab/solutions.hpp"
#include "kinlab/specfun.hpp"

using nlohmann::json;
using namespace kinlab;

namespace {

std::string fmt(double v) {
    char b[40];
    std::snprintf(b, sizeof b, "%.17g", v);
    return b;
}

std::string timestamp() {
    std::time_t t = std::time(nullptr);
    char buf[40];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        std::size_t pos = 0;
        double v = std::stod(tok, &pos);
        if (pos != tok.size()) throw std::invalid_argument("bad number in list: " + tok);
        out.push_back(v);
    }
    if (out.empty()) throw std::invalid_argument("empty numeric list");
    return out;
}

// one registered option: where it lives, how to set it from config, how to
// print its resolved value
struct Entry {
    CLI::App* app;
    CLI::Option* opt;
    std::function<void(const json&)> set;
    std::function<std::string()> get;
};

struct Ctx {
    std::string config_path, out_path, table_path;
    std::uint64_t seed = 1;
    int threads = 1;
    bool no_timestamp = false;
    std::string command;  // resolved subcommand path, e.g. "mc estimate"
    CLI::App* root = nullptr;
    std::multimap<std::string, Entry> reg;

    bool invoked(CLI::App* a) const { return a == root || a->parsed(); }
};

template <typename T>
CLI::Option* addopt(Ctx& c, CLI::App* app, const std::string& name, T& var,
                    const std::string& desc) {
    CLI::Option* o = app->add_option(name, var, desc);
    Entry e{app, o, [&var](const json& j) { var = j.get<T>(); },
            [&var]() -> std::string {
                if constexpr (std::is_same_v<T, std::string>) {
                    return var;
                } else if constexpr (std::is_same_v<T, double>) {
                    return fmt(var);
                } else {
                    std::ostringstream os;
                    os << var;
                    return os.str();
                }
            }};
    c.reg.emplace(name.substr(2), e);
    return o;
}

CLI::Option* addflag(Ctx& c, CLI::App* app, const std::string& name, bool& var,
                     const std::string& desc) {
    CLI::Option* o = app->add_flag(name, var, desc);
    Entry e{app, o, [&var](const json& j) { var = j.get<bool>(); },
            [&var]() -> std::string { return var ? "true" : "false"; }};
    c.reg.emplace(name.substr(2), e);
    return o;
}

void apply_config(Ctx& c) {
    if (c.config_path.empty()) return;
    std::ifstream f(c.config_path);
    if (!f) throw std::invalid_argument("cannot open config: " + c.config_path);
    json cfg = json::parse(f);
    if (!cfg.is_object()) throw std::invalid_argument("config must be a JSON object");
    for (auto& [key, value] : cfg.items()) {
        bool known = false;
        auto range = c.reg.equal_range(key);
        for (auto it = range.first; it != range.second; ++it) {
            if (!c.invoked(it->second.app)) continue;
            known = true;
            if (it->second.opt->count() == 0) it->second.set(value);
        }
        if (!known) throw std::invalid_argument("unknown config key: " + key);
    }
}

json resolved_params(Ctx& c) {
    json out = json::object();
    for (auto& [key, e] : c.reg)
        if (c.invoked(e.app)) out[key] = e.get();
    return out;
}

void write_text(Ctx& c, const std::string& path, const std::string& body) {
    if (path.empty()) {
        std::cout << body;
        std::cout.flush();
        return;
    }
    std::ofstream f(path);
    if (!f) throw std::invalid_argument("cannot open output: " + path);
    f << body;
    f.flush();
    if (!f) throw std::invalid_argument("write failed: " + path);
}

std::string csv_header(Ctx& c) {
    std::ostringstream os;
    os << "# schema=1\n";
    if (!c.no_timestamp) os << "# timestamp=" << timestamp() << "\n";
    os << "# command=" << c.command << "\n";
    json p = resolved_params(c);
    for (auto& [k, v] : p.items()) os << "# " << k << "=" << v.get<std::string>() << "\n";
    return os.str();
}

void emit_record(Ctx& c, json result) {
    json r;
    r["schema"] = 1;
    if (!c.no_timestamp) r["timestamp"] = timestamp();
    r["command"] = c.command;
    r["params"] = resolved_params(c);
    r["result"] = std::move(result);
    write_text(c, c.out_path, r.dump(2) + "\n");
}

// named stationary evaluables for the probe and report subcommands
Evaluable named_target(const std::string& t) {
    if (t == "phi0") return [](double x, double v) { return phi(0, x, v); };
    if (t == "phi1") return [](double x, double v) { return phi(1, x, v); };
    if (t == "phi-1") return [](double x, double v) { return phi(-1, x, v); };
    if (t == "psi0") return [](double x, double v) { return psi(0, x, v); };
    if (t == "psi1") return [](double x, double v) { return psi(1, x, v); };
    if (t == "psi0-forced") return [](double x, double v) { return psi0_forced(x, v); };
    if (t == "sharp")
        return [](double x, double v) { return phi(0, x, v) + v * v * phi_dv(0, x, v, 1); };
    if (t == "counterexample") return build_diffuse_counterexample().f;
    throw std::invalid_argument("unknown target: " + t);
}

Evaluable resolve_target(const std::string& target, const std::string& field_path) {
    if (!field_path.empty()) {
        std::ifstream f(field_path);
        if (!f) throw std::invalid_argument("cannot open field: " + field_path);
        auto fld = std::make_shared<Field>(read_csv(f));
        return [fld](double x, double v) { return fld->interp(x, v); };
    }
    return named_target(target);
}

ScalarFn named_data(const std::string& name) {
    if (name == "zero") return [](double, double) { return 0.0; };
    if (name == "one") return [](double, double) { return 1.0; };
    if (name == "v") return [](double, double v) { return v; };
    if (name == "quad") return [](double, double v) { return 1.0 + 0.5 * v * v; };
    if (name == "phi0") return [](double x, double v) { return phi(0, x, v); };
    if (name == "psi0") return [](double x, double v) { return psi(0, x, v); };
    throw std::invalid_argument("unknown boundary data: " + name);
}

std::function<double(double)> named_g(const std::string& name) {
    if (name == "one") return [](double) { return 1.0; };
    if (name == "v") return [](double v) { return v; };
    if (name == "bump")  // smooth, supported in (1, 2)
        return [](double v) {
            if (v <= 1.0 || v >= 2.0) return 0.0;
            return std::exp(-1.0 / ((v - 1.0) * (2.0 - v)));
        };
    throw std::invalid_argument("unknown wall data g: " + name);
}

const char* region_name(Region::Tag t) {
    switch (t) {
        case Region::RMinus: return "R-";
        case Region::RZero: return "R0";
        default: return "R+";
    }
}

json exponent_json(const ExponentEstimate& e) {
    return {{"alpha_hat", e.alpha_hat},
            {"ci_half_width", e.ci_half_width},
            {"fit_residual", e.fit_residual},
            {"saturated", e.saturated},
            {"scales", e.scales},
            {"osc", e.osc}};
}

// scale table companion output: r, measured oscillation, fitted power law
void emit_scale_table(Ctx& c, const ExponentEstimate& e) {
    if (c.table_path.empty()) return;
    std::ostringstream os;
    os << csv_header(c) << "r,osc,fit\n";
    for (std::size_t k = 0; k < e.scales.size(); ++k) {
        double fit = e.saturated
                         ? 0.0
                         : std::exp(e.fit_intercept + e.alpha_hat * std::log(e.scales[k]));
        os << fmt(e.scales[k]) << "," << fmt(e.osc[k]) << "," << fmt(fit) << "\n";
    }
    write_text(c, c.table_path, os.str());
}

KineticPoint parse_point(const std::string& s) {
    std::vector<double> p = parse_list(s);
    if (p.size() != 3) throw std::invalid_argument("point must be t,x,v: " + s);
    return KineticPoint(p[0], p[1], p[2]);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical laboratory for grazing-set boundary layers of the "
                 "kinetic Kolmogorov equation"};
    app.require_subcommand(1);
    Ctx ctx;
    ctx.root = &app;

    addopt(ctx, &app, "--config", ctx.config_path, "JSON config file (flags override it)");
    addopt(ctx, &app, "--out", ctx.out_path, "output path (default: stdout)");
    addopt(ctx, &app, "--seed", ctx.seed, "RNG seed");
    addopt(ctx, &app, "--threads", ctx.threads, "worker threads for MC internals");
    addflag(ctx, &app, "--no-timestamp", ctx.no_timestamp,
            "omit the timestamp header line (byte-stable outputs)");

    std::vector<std::pair<CLI::App*, std::function<void()>>> runners;
    auto leaf = [&](CLI::App* parent, const char* name, const char* desc) {
        CLI::App* a = parent->add_subcommand(name, desc);
        a->fallthrough();
        return a;
    };

    // specfun ---------------------------------------------------------------
    CLI::App* specfun = app.add_subcommand("specfun", "special function evaluation");
    specfun->require_subcommand(1);
    specfun->fallthrough();
    {
        CLI::App* ev = leaf(specfun, "eval", "evaluate gamma / kummer-m / tricomi-u");
        auto fn = std::make_shared<std::string>();
        auto a = std::make_shared<double>(0.0);
        auto b = std::make_shared<double>(0.0);
        auto z = std::make_shared<double>(0.0);
        auto x = std::make_shared<double>(1.0);
        addopt(ctx, ev, "--fn", *fn, "gamma|kummer-m|tricomi-u|tricomi-u-scaled")
            ->required();
        addopt(ctx, ev, "--a", *a, "parameter a");
        addopt(ctx, ev, "--b", *b, "parameter b");
        addopt(ctx, ev, "--z", *z, "argument z");
        addopt(ctx, ev, "--x", *x, "argument for gamma");
        runners.emplace_back(ev, [&ctx, fn, a, b, z, x] {
            ctx.command = "specfun eval";
            double val;
            if (*fn == "gamma") val = gamma_fn(*x);
            else if (*fn == "kummer-m") val = kummer_m(*a, *b, *z);
            else if (*fn == "tricomi-u") val = tricomi_u(*a, *b, *z);
            else if (*fn == "tricomi-u-scaled") val = tricomi_u_scaled(*a, *b, *z);
            else throw std::invalid_argument("unknown fn: " + *fn);
            if (ctx.out_path.empty()) std::printf("%.17g\n", val);
            else emit_record(ctx, {{"fn", *fn}, {"value", val}});
        });
    }

    // solutions -------------------------------------------------------------
    CLI::App* sol = app.add_subcommand("solutions", "phi/psi solution families");
    sol->require_subcommand(1);
    sol->fallthrough();
    {
        CLI::App* ev = leaf(sol, "eval", "evaluate one family member at a point");
        auto family = std::make_shared<std::string>("phi");
        auto m = std::make_shared<int>(0);
        auto x = std::make_shared<double>(1.0);
        auto v = std::make_shared<double>(0.0);
        addopt(ctx, ev, "--family", *family, "phi|psi|psi0-forced|basis");
        addopt(ctx, ev, "--m", *m, "family index (m, l, or basis k)");
        addopt(ctx, ev, "--x", *x, "position");
        addopt(ctx, ev, "--v", *v, "velocity");
        runners.emplace_back(ev, [&ctx, family, m, x, v] {
            ctx.command = "solutions eval";
            double val;
            if (*family == "phi") val = phi(*m, *x, *v);
            else if (*family == "psi") val = psi(*m, *x, *v);
            else if (*family == "psi0-forced") val = psi0_forced(*x, *v);
            else if (*family == "basis") val = basis_Phi(*m, *x, *v);
            else throw std::invalid_argument("unknown family: " + *family);
            if (ctx.out_path.empty()) std::printf("%.17g\n", val);
            else emit_record(ctx, {{"family", *family}, {"value", val}});
        });
    }
    {
        CLI::App* tab = leaf(sol, "tabulate", "CSV table over a sample grid");
        auto family = std::make_shared<std::string>("phi");
        auto m = std::make_shared<int>(0);
        auto grid = std::make_shared<std::string>("default");
        addopt(ctx, tab, "--family", *family, "phi|psi");
        addopt(ctx, tab, "--m", *m, "family index");
        addopt(ctx, tab, "--grid", *grid,
               "default (dyadic region sample to 2^-20) or lattice:X:V:Nx:Nv");
        runners.emplace_back(tab, [&ctx, family, m, grid] {
            ctx.command = "solutions tabulate";
            std::vector<std::pair<double, double>> pts;
            if (*grid == "default") {
                for (int k = 0; k <= 20; ++k) {
                    double r = std::pow(2.0, -k);
                    pts.emplace_back(r * r * r, 2.0 * r);
                    pts.emplace_back(8.0 * r * r * r, r);
                    pts.emplace_back(r * r * r, -2.0 * r);
                }
            } else if (grid->rfind("lattice:", 0) == 0) {
                double X, V;
                int Nx, Nv;
                if (std::sscanf(grid->c_str(), "lattice:%lf:%lf:%d:%d", &X, &V, &Nx, &Nv) != 4)
                    throw std::invalid_argument("bad lattice spec: " + *grid);
                GridSpec g{X, V, Nx, Nv};
                g.validate();
                for (int i = 1; i <= Nx; ++i)
                    for (int j = 0; j <= Nv; ++j) pts.emplace_back(g.xat(i), g.vat(j));
            } else {
                throw std::invalid_argument("unknown grid: " + *grid);
            }
            std::ostringstream os;
            os << csv_header(ctx) << "family,index,x,v,value,region,envelope,ratio\n";
            for (auto& [x, v] : pts) {
                double val = *family == "phi"   ? phi(*m, x, v)
                             : *family == "psi" ? psi(*m, x, v)
                                                : throw std::invalid_argument(
                                                      "unknown family: " + *family);
                os << *family << "," << *m << "," << fmt(x) << "," << fmt(v) << ","
                   << fmt(val) << "," << region_name(region_classify(x, v).tag);
                std::string env, ratio;
                if (*family == "phi") {
                    try {
                        EnvelopeValue e = envelope(*m, x, v);
                        env = fmt(e.value);
                        ratio = fmt(val / e.value);
                    } catch (const std::domain_error&) {
                        // envelope not defined in this region for this index
                    }
                }
                os << "," << env << "," << ratio << "\n";
            }
            write_text(ctx, ctx.out_path, os.str());
        });
    }

    // geometry --------------------------------------------------------------
    CLI::App* geo = app.add_subcommand("geometry", "kinetic metric utilities");
    geo->require_subcommand(1);
    geo->fallthrough();
    {
        CLI::App* di = leaf(geo, "distance", "kinetic distance and quasi-norm");
        auto z1 = std::make_shared<std::string>("0,1,0");
        auto z2 = std::make_shared<std::string>("0,1,1");
        addopt(ctx, di, "--z1", *z1, "first point t,x,v");
        addopt(ctx, di, "--z2", *z2, "second point t,x,v");
        runners.emplace_back(di, [&ctx, z1, z2] {
            ctx.command = "geometry distance";
            KineticPoint a = parse_point(*z1), b = parse_point(*z2);
            double d = kinetic_distance(a, b), q = quasi_norm(a, b);
            if (ctx.out_path.empty())
                std::printf("distance=%.17g quasi_norm=%.17g\n", d, q);
            else emit_record(ctx, {{"distance", d}, {"quasi_norm", q}});
        });
    }
    {
        CLI::App* gr = leaf(geo, "grazing", "distance proxy to the grazing set");
        auto x = std::make_shared<double>(1.0);
        auto v = std::make_shared<double>(0.0);
        addopt(ctx, gr, "--x", *x, "position");
        addopt(ctx, gr, "--v", *v, "velocity");
        runners.emplace_back(gr, [&ctx, x, v] {
            ctx.command = "geometry grazing";
            double d = kinetic_dist_to_grazing(KineticPoint(0.0, *x, *v));
            if (ctx.out_path.empty()) std::printf("%.17g\n", d);
            else emit_record(ctx, {{"distance", d}});
        });
    }

    // fd --------------------------------------------------------------------
    CLI::App* fd = app.add_subcommand("fd", "finite difference boundary value solver");
    fd->require_subcommand(1);
    fd->fallthrough();
    {
        CLI::App* so = leaf(fd, "solve", "solve v f_x - a f_vv = F, emit the field CSV");
        auto X = std::make_shared<double>(1.0);
        auto V = std::make_shared<double>(1.0);
        auto Nx = std::make_shared<int>(64);
        auto Nv = std::make_shared<int>(64);
        auto a = std::make_shared<double>(1.0);
        auto F = std::make_shared<double>(0.0);
        auto bc = std::make_shared<std::string>("inflow");
        auto data = std::make_shared<std::string>("phi0");
        addopt(ctx, so, "--X", *X, "domain size in x");
        addopt(ctx, so, "--V", *V, "domain half-size in v");
        addopt(ctx, so, "--Nx", *Nx, "cells in x");
        addopt(ctx, so, "--Nv", *Nv, "cells in v (even)");
        addopt(ctx, so, "--a", *a, "constant diffusion coefficient");
        addopt(ctx, so, "--F", *F, "constant source");
        addopt(ctx, so, "--bc", *bc, "absorbing|inflow|diffuse");
        addopt(ctx, so, "--data", *data, "zero|one|v|quad|phi0|psi0");
        runners.emplace_back(so, [&ctx, X, V, Nx, Nv, a, F, bc, data] {
            ctx.command = "fd solve";
            Problem p;
            p.grid = {*X, *V, *Nx, *Nv};
            double av = *a, Fv = *F;
            p.a = [av](double, double) { return av; };
            p.F = [Fv](double, double) { return Fv; };
            if (*bc == "absorbing") p.bc = BoundaryCondition::absorbing();
            else if (*bc == "inflow") p.bc = BoundaryCondition::inflow(named_data(*data));
            else if (*bc == "diffuse")
                p.bc = BoundaryCondition::diffuse(
                    [](double v) { return 2.0 * std::exp(-v * v); }, named_data(*data));
            else throw std::invalid_argument("unknown bc: " + *bc);
            Field f = solve(assemble(p));
            std::ostringstream os;
            os << csv_header(ctx);
            write_csv(f, os);
            write_text(ctx, ctx.out_path, os.str());
        });
    }
    {
        CLI::App* cv = leaf(fd, "converge", "convergence study against the phi0 profile");
        auto n0 = std::make_shared<int>(32);
        auto levels = std::make_shared<int>(4);
        addopt(ctx, cv, "--n0", *n0, "coarsest grid cells per direction");
        addopt(ctx, cv, "--levels", *levels, "number of dyadic refinements");
        runners.emplace_back(cv, [&ctx, n0, levels] {
            ctx.command = "fd converge";
            Problem p;
            p.grid = {1.0, 1.0, *n0, *n0};
            p.a = [](double, double) { return 1.0; };
            p.F = [](double, double) { return 0.0; };
            p.bc = BoundaryCondition::inflow([](double x, double v) { return phi(0, x, v); });
            auto rows = convergence_study(*levels, p,
                                          [](double x, double v) { return phi(0, x, v); });
            std::ostringstream os;
            os << csv_header(ctx) << "h,max_error,observed_order\n";
            for (auto& r : rows)
                os << fmt(r.h) << "," << fmt(r.max_error) << ","
                   << (std::isnan(r.observed_order) ? std::string()
                                                    : fmt(r.observed_order))
                   << "\n";
            write_text(ctx, ctx.out_path, os.str());
        });
    }

    // mc --------------------------------------------------------------------
    CLI::App* mc = app.add_subcommand("mc", "Monte Carlo particle simulator");
    mc->require_subcommand(1);
    mc->fallthrough();
    {
        CLI::App* es = leaf(mc, "estimate", "pointwise estimate of an in-flow solution");
        auto x = std::make_shared<double>(1.0);
        auto v = std::make_shared<double>(-1.0);
        auto g = std::make_shared<std::string>("one");
        auto n = std::make_shared<long long>(10000);
        auto dt = std::make_shared<double>(0.05);
        auto horizon = std::make_shared<double>(2000.0);
        auto refinement = std::make_shared<double>(0.5);
        auto box_x = std::make_shared<double>(0.0);
        auto box_v = std::make_shared<double>(0.0);
        auto max_timeout = std::make_shared<double>(0.5);
        addopt(ctx, es, "--x", *x, "evaluation position");
        addopt(ctx, es, "--v", *v, "evaluation velocity");
        addopt(ctx, es, "--g", *g, "wall data: one|v|bump");
        addopt(ctx, es, "--n", *n, "number of paths");
        addopt(ctx, es, "--dt", *dt, "base time step");
        addopt(ctx, es, "--horizon", *horizon, "path time horizon");
        addopt(ctx, es, "--refinement", *refinement, "near-wall step refinement factor");
        addopt(ctx, es, "--box-x", *box_x, "truncation box size in x (<= 0: none)");
        addopt(ctx, es, "--box-v", *box_v, "truncation box size in v (<= 0: none)");
        addopt(ctx, es, "--max-timeout-mass", *max_timeout,
               "fail (exit 2) if more paths than this fraction time out");
        runners.emplace_back(es, [&ctx, x, v, g, n, dt, horizon, refinement, box_x, box_v,
                                  max_timeout] {
            ctx.command = "mc estimate";
            McConfig cfg;
            cfg.n_paths = *n;
            cfg.dt_base = *dt;
            cfg.seed = ctx.seed;
            cfg.boundary_refinement = *refinement;
            cfg.time_horizon = *horizon;
            cfg.threads = ctx.threads;
            cfg.box_x = *box_x;
            cfg.box_v = *box_v;
            McEstimate e = estimate_inflow_solution(*x, *v, named_g(*g), cfg);
            if (e.timeout_mass > *max_timeout)
                throw NonConvergenceError("mc estimate: timeout mass " +
                                          fmt(e.timeout_mass) + " exceeds bound");
            emit_record(ctx, {{"mean", e.mean},
                              {"stderr", e.std_err},
                              {"n", e.n},
                              {"seed", e.seed},
                              {"dt_base", cfg.dt_base},
                              {"timeout_mass", e.timeout_mass}});
        });
    }
    {
        CLI::App* fw = leaf(mc, "forward", "forward Langevin run, wall histogram CSV");
        auto X = std::make_shared<double>(1.0);
        auto V = std::make_shared<double>(4.0);
        auto T = std::make_shared<double>(4.0);
        auto wall = std::make_shared<std::string>("diffuse");
        auto n = std::make_shared<long long>(4000);
        auto dt = std::make_shared<double>(0.05);
        addopt(ctx, fw, "--X", *X, "box size in x");
        addopt(ctx, fw, "--V", *V, "box half-size in v");
        addopt(ctx, fw, "--T", *T, "simulation horizon");
        addopt(ctx, fw, "--wall", *wall, "diffuse|absorbing");
        addopt(ctx, fw, "--n", *n, "number of particles");
        addopt(ctx, fw, "--dt", *dt, "base time step");
        runners.emplace_back(fw, [&ctx, X, V, T, wall, n, dt] {
            ctx.command = "mc forward";
            McConfig cfg;
            cfg.n_paths = *n;
            cfg.dt_base = *dt;
            cfg.seed = ctx.seed;
            cfg.threads = ctx.threads;
            std::function<double(double)> M;
            if (*wall == "diffuse") M = [](double v) { return 2.0 * std::exp(-v * v); };
            else if (*wall != "absorbing")
                throw std::invalid_argument("unknown wall: " + *wall);
            WallHistogram h = simulate_forward_diffuse(*X, *V, M, *T, cfg);
            std::ostringstream os;
            os << csv_header(ctx);
            write_csv(h, os);
            write_text(ctx, ctx.out_path, os.str());
        });
    }

    // probe -----------------------------------------------------------------
    CLI::App* probe = app.add_subcommand("probe", "regularity probes");
    probe->require_subcommand(1);
    probe->fallthrough();
    auto target = std::make_shared<std::string>("phi0");
    auto field_path = std::make_shared<std::string>();
    {
        CLI::App* ho = leaf(probe, "holder", "local Holder exponent at a point");
        auto x0 = std::make_shared<double>(0.0);
        auto v0 = std::make_shared<double>(0.0);
        auto scales = std::make_shared<std::string>("0.5,0.35,0.25,0.18,0.12,0.08");
        auto full = std::make_shared<bool>(false);
        addopt(ctx, ho, "--target", *target, "phi0|phi1|phi-1|psi0|psi1|psi0-forced|sharp|counterexample");
        addopt(ctx, ho, "--field", *field_path, "probe a field CSV instead of a named target");
        addopt(ctx, ho, "--x0", *x0, "center position");
        addopt(ctx, ho, "--v0", *v0, "center velocity");
        addopt(ctx, ho, "--scales", *scales, "decreasing scale list");
        addflag(ctx, ho, "--full-plane", *full, "sample without the x > 0 restriction");
        addopt(ctx, ho, "--table", ctx.table_path, "also write the r,osc,fit CSV here");
        runners.emplace_back(ho, [&ctx, target, field_path, x0, v0, scales, full] {
            ctx.command = "probe holder";
            ExponentEstimate e = holder_exponent(resolve_target(*target, *field_path), *x0,
                                                 *v0, parse_list(*scales), !*full);
            emit_scale_table(ctx, e);
            emit_record(ctx, exponent_json(e));
        });
    }
    {
        CLI::App* ex = leaf(probe, "expansion", "dictionary fit at the grazing origin");
        auto radii = std::make_shared<std::string>("0.3,0.22,0.16,0.11");
        auto samples = std::make_shared<int>(512);
        addopt(ctx, ex, "--target", *target, "named target");
        addopt(ctx, ex, "--field", *field_path, "field CSV instead of a named target");
        addopt(ctx, ex, "--radii", *radii, "decreasing radius list");
        addopt(ctx, ex, "--samples", *samples, "samples per radius");
        runners.emplace_back(ex, [&ctx, target, field_path, radii, samples] {
            ctx.command = "probe expansion";
            Evaluable f = resolve_target(*target, *field_path);
            ExpansionFit fit = expansion_fit(
                [&f](double, double x, double v) { return f(x, v); }, parse_list(*radii),
                *samples);
            emit_record(ctx, {{"names", fit.names},
                              {"radii", fit.radii},
                              {"coeffs", fit.coeffs},
                              {"residual", fit.residual},
                              {"residual_order", fit.residual_order}});
        });
    }
    {
        CLI::App* qu = leaf(probe, "quotient", "Lipschitz bound of f/phi0 near grazing");
        auto r = std::make_shared<double>(0.5);
        auto eps = std::make_shared<double>(1.0);
        addopt(ctx, qu, "--target", *target, "named target");
        addopt(ctx, qu, "--field", *field_path, "field CSV instead of a named target");
        addopt(ctx, qu, "--r", *r, "cylinder radius");
        addopt(ctx, qu, "--region-eps", *eps, "excluded exponential-region parameter");
        runners.emplace_back(qu, [&ctx, target, field_path, r, eps] {
            ctx.command = "probe quotient";
            double L = quotient_lipschitz(resolve_target(*target, *field_path), *r, *eps);
            if (ctx.out_path.empty()) std::printf("%.17g\n", L);
            else emit_record(ctx, {{"lipschitz", L}});
        });
    }
    {
        CLI::App* c3 = leaf(probe, "c3", "cubic-fit residual order on the critical region");
        auto eps = std::make_shared<double>(0.2);
        auto scales = std::make_shared<std::string>("0.6,0.45,0.34,0.25,0.19,0.14");
        addopt(ctx, c3, "--target", *target, "named target");
        addopt(ctx, c3, "--field", *field_path, "field CSV instead of a named target");
        addopt(ctx, c3, "--eps", *eps, "region exponent");
        addopt(ctx, c3, "--scales", *scales, "decreasing scale list");
        addopt(ctx, c3, "--table", ctx.table_path, "also write the r,osc,fit CSV here");
        runners.emplace_back(c3, [&ctx, target, field_path, eps, scales] {
            ctx.command = "probe c3";
            ExponentEstimate e = c3_region_check(resolve_target(*target, *field_path),
                                                 *eps, parse_list(*scales));
            emit_scale_table(ctx, e);
            emit_record(ctx, exponent_json(e));
        });
    }
    {
        CLI::App* sh = leaf(probe, "sharpness", "seminorm blow-up rate past the region");
        auto eps = std::make_shared<double>(0.2);
        auto delta = std::make_shared<double>(0.5);
        addopt(ctx, sh, "--target", *target, "named target");
        addopt(ctx, sh, "--eps", *eps, "region exponent");
        addopt(ctx, sh, "--delta", *delta, "region enlargement");
        runners.emplace_back(sh, [&ctx, target, eps, delta] {
            ctx.command = "probe sharpness";
            double s = c3_sharpness_deficit(named_target(*target), *eps, *delta);
            if (ctx.out_path.empty()) std::printf("%.17g\n", s);
            else emit_record(ctx, {{"slope", s}});
        });
    }
    {
        CLI::App* de = leaf(probe, "decay", "decay fit toward the incoming boundary");
        auto v0 = std::make_shared<double>(1.0);
        auto R = std::make_shared<double>(1.0);
        addopt(ctx, de, "--target", *target, "named target");
        addopt(ctx, de, "--v0", *v0, "velocity level");
        addopt(ctx, de, "--R", *R, "outer scale");
        runners.emplace_back(de, [&ctx, target, v0, R] {
            ctx.command = "probe decay";
            DecayFit d = gamma_minus_decay(named_target(*target), *v0, *R);
            emit_record(ctx, {{"slope", d.slope},
                              {"power", d.power},
                              {"intercept", d.intercept},
                              {"n_points", d.n_points}});
        });
    }
    {
        CLI::App* ha = leaf(probe, "harnack", "sup/inf ratio over slanted boxes");
        auto x0 = std::make_shared<double>(0.5);
        auto v0 = std::make_shared<double>(0.0);
        auto R = std::make_shared<double>(0.5);
        auto theta = std::make_shared<double>(0.1);
        auto gamma = std::make_shared<double>(0.25);
        addopt(ctx, ha, "--field", *field_path, "field CSV (required)")->required();
        addopt(ctx, ha, "--x0", *x0, "center position");
        addopt(ctx, ha, "--v0", *v0, "center velocity");
        addopt(ctx, ha, "--R", *R, "cylinder scale");
        addopt(ctx, ha, "--theta", *theta, "box shrink factor");
        addopt(ctx, ha, "--gamma", *gamma, "downstream slant offset");
        runners.emplace_back(ha, [&ctx, field_path, x0, v0, R, theta, gamma] {
            ctx.command = "probe harnack";
            std::ifstream f(*field_path);
            if (!f) throw std::invalid_argument("cannot open field: " + *field_path);
            Field fld = read_csv(f);
            double ratio = harnack_ratio(fld, *x0, *v0, *R, *theta, *gamma);
            if (ctx.out_path.empty()) std::printf("%.17g\n", ratio);
            else emit_record(ctx, {{"ratio", ratio}});
        });
    }

    // report ----------------------------------------------------------------
    CLI::App* report = app.add_subcommand("report", "predictions vs measurements");
    report->require_subcommand(1);
    report->fallthrough();
    {
        CLI::App* gr = leaf(report, "grazing", "run the release criteria table");
        auto criteria = std::make_shared<std::string>("all");
        addopt(ctx, gr, "--criteria", *criteria, "all or a comma list like 1,5,10");
        runners.emplace_back(gr, [&ctx, criteria] {
            ctx.command = "report grazing";
            std::vector<int> which;
            if (*criteria == "all") {
                for (int k = 1; k <= 10; ++k) which.push_back(k);
            } else {
                for (double v : parse_list(*criteria)) {
                    int k = int(v);
                    if (k < 1 || k > 10 || k != v)
                        throw std::invalid_argument("criterion index must be 1..10");
                    which.push_back(k);
                }
            }
            json arr = json::array();
            for (int k : which) {
                CriterionResult r = run_criterion(k);
                std::printf("[%s] criterion %2d: %s (%.1fs) %s\n",
                            r.pass ? "PASS" : "FAIL", r.index, r.name.c_str(), r.seconds,
                            r.detail.c_str());
                std::fflush(stdout);
                arr.push_back({{"index", r.index},
                               {"name", r.name},
                               {"pass", r.pass},
                               {"detail", r.detail},
                               {"seconds", r.seconds}});
            }
            if (!ctx.out_path.empty()) emit_record(ctx, {{"criteria", arr}});
        });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        std::cerr << json{{"error", "validation"}, {"what", e.what()}}.dump() << "\n";
        return 1;
    }
    try {
        apply_config(ctx);
        for (auto& [sub, run] : runners)
            if (sub->parsed()) run();
    } catch (const NonConvergenceError& e) {
        std::cerr << json{{"error", "numerical"}, {"what", e.what()}}.dump() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << json{{"error", "validation"}, {"what", e.what()}}.dump() << "\n";
        return 1;
    }
    return 0;
}
