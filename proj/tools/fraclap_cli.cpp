// fraclap: command-line front end. Every run writes CSV to stdout (or --output) with a
// leading '#'-prefixed JSON line carrying the version and the fully resolved configuration.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "fraclap/fraclap.hpp"

#ifndef FRACLAP_VERSION
#define FRACLAP_VERSION "dev"
#endif

using namespace fraclap;
using Json = nlohmann::ordered_json;

namespace {

enum Exit { ok = 0, failure = 1, usage = 2, accuracy = 3, capability = 4 };

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.15g", v);
    return buf;
}

std::vector<double> linspace(double lo, double hi, int n) {
    if (n < 1) throw DomainError("grid size must be at least 1");
    std::vector<double> out(n);
    for (int k = 0; k < n; ++k) out[k] = n == 1 ? lo : lo + (hi - lo) * k / (n - 1);
    return out;
}

template <int N>
Vec<N> on_axis(double x) {
    Vec<N> v{};
    v[0] = x;
    return v;
}

struct Options {
    double s = 1.5;
    int N = 1;
    int threads = default_threads();
    std::string output;
    QuadratureConfig quad;
};

struct Table {
    explicit Table(std::vector<std::string> cols = {}) : columns(std::move(cols)) {}

    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    std::vector<std::string> labels; // optional leading text column, one per row
    Json summary; // optional trailing '#' line
};

Json quad_json(const QuadratureConfig& q) {
    return Json{{"rel_tol", q.rel_tol},           {"abs_tol", q.abs_tol},       {"max_subdivisions", q.max_subdivisions},
                {"inner_cut", q.inner_cut},       {"outer_cut", q.outer_cut},   {"extrap_depth", q.extrap_depth},
                {"sphere_resolution", q.sphere_resolution}};
}

void emit(const Options& o, const std::string& command, const Json& config, const Table& t) {
    std::ofstream file;
    if (!o.output.empty()) {
        file.open(o.output);
        if (!file) throw DomainError("cannot open output file '" + o.output + "'");
    }
    std::ostream& out = o.output.empty() ? std::cout : file;
    const Json meta{{"tool", "fraclap"},
                    {"version", FRACLAP_VERSION},
                    {"command", command},
                    {"config", config},
                    {"quadrature", quad_json(o.quad)}};
    out << "# " << meta.dump() << '\n';
    for (std::size_t c = 0; c < t.columns.size(); ++c) out << (c ? "," : "") << t.columns[c];
    out << '\n';
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const auto& row = t.rows[r];
        if (!t.labels.empty()) out << t.labels[r] << ',';
        for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << num(row[c]);
        out << '\n';
    }
    if (!t.summary.is_null()) out << "# " << t.summary.dump() << '\n';
}

template <class F>
auto with_dim(int N, F&& f) {
    switch (N) {
    case 1: return f(std::integral_constant<int, 1>{});
    case 2: return f(std::integral_constant<int, 2>{});
    case 3: return f(std::integral_constant<int, 3>{});
    }
    throw DomainError("dimension N must be 1, 2 or 3");
}

void require_line(int N, const char* what) {
    if (N != 1) throw CapabilityError(std::string(what) + " is implemented for N = 1 only");
}

// ---- kernel ----------------------------------------------------------------------------

struct KernelArgs {
    std::string name;
    double x = 0.0;
    double z = 1.0;
    int grid = 101;
    double lo = NAN, hi = NAN;
    std::string trace = "sm1";
};

Table cmd_kernel(const Options& o, const KernelArgs& a, Json& cfg) {
    const FracOrder order(o.s);
    Table t;
    const auto tk = a.trace == "sm2" ? TraceOrder::s_minus_2 : TraceOrder::s_minus_1;
    if (a.trace != "sm1" && a.trace != "sm2") throw DomainError("--trace must be sm1 or sm2");
    double lo = a.lo, hi = a.hi;
    auto range = [&](double l, double h) {
        if (std::isnan(lo)) lo = l;
        if (std::isnan(hi)) hi = h;
    };
    if (a.name == "green" || a.name == "gamma" || a.name == "poisson") {
        a.name == "green" ? range(-1.0, 1.0) : range(1.05, 4.0);
    } else if (a.name == "eden" || a.name == "harmonic-sum") {
        range(-1.0, 1.0);
    } else {
        throw DomainError("unknown kernel '" + a.name + "' (choose green, gamma, poisson, eden, harmonic-sum)");
    }
    if (a.name == "harmonic-sum") require_line(o.N, "harmonic-sum");
    const auto grid = linspace(lo, hi, a.grid);
    cfg = Json{{"kernel", a.name}, {"s", o.s}, {"N", o.N}, {"grid", a.grid}, {"lo", lo}, {"hi", hi}};

    auto eval = with_dim(o.N, [&](auto dim) {
        constexpr int N = decltype(dim)::value;
        return std::function<double(double)>([&, order](double g) -> double {
            try {
                if (a.name == "green") return green_G<N>(order, on_axis<N>(a.x), on_axis<N>(g)).value;
                if (a.name == "eden") return eden_E<N>(order, tk, on_axis<N>(g), on_axis<N>(a.z));
                if (a.name == "harmonic-sum") return harmonic_sum_1d(order, g);
                return nonlocal_Gamma<N>(order, on_axis<N>(a.x), on_axis<N>(g));
            } catch (const DomainError&) {
                return NAN; // pole or boundary point on the grid
            }
        });
    });
    if (a.name == "green" || a.name == "gamma" || a.name == "poisson") {
        cfg["x"] = a.x;
        t.columns = {"y", "value"};
    } else {
        if (a.name == "eden") {
            cfg["z"] = a.z;
            cfg["trace"] = a.trace;
        }
        t.columns = {"x", "value"};
    }
    const auto vals = parallel_map<double>(grid.size(), [&](std::size_t k) { return eval(grid[k]); }, o.threads);
    for (std::size_t k = 0; k < grid.size(); ++k) t.rows.push_back({grid[k], vals[k]});
    return t;
}

// ---- apply -----------------------------------------------------------------------------

struct ApplyArgs {
    std::string u = "bump:0,1";
    std::string method = "4th";
    int grid = 21;
    double lo = -0.9, hi = 0.9;
};

Table cmd_apply(const Options& o, const ApplyArgs& a, Json& cfg) {
    const FracOrder order(o.s);
    cfg = Json{{"u", a.u}, {"method", a.method}, {"s", o.s}, {"N", o.N}, {"grid", a.grid}, {"lo", a.lo}, {"hi", a.hi}};
    const auto grid = linspace(a.lo, a.hi, a.grid);
    const auto est = with_dim(o.N, [&](auto dim) {
        constexpr int N = decltype(dim)::value;
        const auto u = selectors::parse_field<N>(a.u);
        std::function<Estimate(double)> f;
        if (a.method == "4th") f = [&, u, order](double x) { return frac_lap_4th_estimate<N>(order, u, on_axis<N>(x), o.quad); };
        else if (a.method == "composed")
            f = [&, u, order](double x) { return frac_lap_composed_estimate<N>(order, u, on_axis<N>(x), o.quad); };
        else if (a.method == "fourier")
            f = [&, u, order](double x) { return fourier_reference_estimate<N>(order, u, on_axis<N>(x), o.quad); };
        else if (a.method == "2nd")
            f = [&, u](double x) { return frac_lap_2nd_estimate<N>(o.s, u, on_axis<N>(x), o.quad); };
        else
            throw DomainError("unknown --method '" + a.method + "' (choose 4th, composed, fourier, 2nd)");
        return parallel_map<Estimate>(grid.size(), [&](std::size_t k) { return f(grid[k]); }, o.threads);
    });
    Table t{{"x", "value", "error"}};
    for (std::size_t k = 0; k < grid.size(); ++k) t.rows.push_back({grid[k], est[k].value, est[k].error});
    return t;
}

// ---- solve / trace ---------------------------------------------------------------------

struct ProblemArgs {
    std::string f, g0, g1, psi;
    double r = kInf;
    bool regularity = false, continuity = false;
    int grid = 201;
    double lo = -1.0, hi = 1.0;
    double z = 1.0;
};

Json problem_json(const Options& o, const ProblemArgs& a) {
    Json j{{"s", o.s}, {"N", o.N}};
    j["f"] = a.f.empty() ? "zero" : a.f;
    j["g0"] = a.g0.empty() ? "zero" : a.g0;
    j["g1"] = a.g1.empty() ? "zero" : a.g1;
    j["psi"] = a.psi.empty() ? "zero" : a.psi;
    j["r"] = std::isinf(a.r) ? Json("inf") : Json(a.r);
    j["assert_regularity"] = a.regularity;
    j["assert_continuity"] = a.continuity;
    return j;
}

template <int N>
SolutionField<N> build_solution(const Options& o, const ProblemArgs& a) {
    const FracOrder order(o.s);
    ProblemData<N> d;
    if (!a.f.empty()) d.f = selectors::parse_field<N>(a.f);
    if (!a.g0.empty()) d.g0 = selectors::parse_boundary<N>(a.g0);
    if (!a.g1.empty()) d.g1 = selectors::parse_boundary<N>(a.g1);
    if (!a.psi.empty()) d.psi = selectors::parse_field<N>(a.psi);
    d.r = a.r;
    d.regularity_asserted = a.regularity;
    d.continuity_asserted = a.continuity;
    if (!d.f && !d.g0 && !d.g1 && !d.psi) throw DomainError("solve: give at least one of --f, --g0, --g1, --psi");
    return solve_full<N>(order, d, o.quad);
}

Table cmd_solve(const Options& o, const ProblemArgs& a, Json& cfg) {
    cfg = problem_json(o, a);
    cfg["grid"] = a.grid;
    cfg["lo"] = a.lo;
    cfg["hi"] = a.hi;
    const auto grid = linspace(a.lo, a.hi, a.grid);
    const auto est = with_dim(o.N, [&](auto dim) {
        constexpr int N = decltype(dim)::value;
        const auto u = build_solution<N>(o, a);
        return parallel_map<Estimate>(grid.size(), [&](std::size_t k) { return u.estimate(on_axis<N>(grid[k])); },
                                      o.threads);
    });
    Table t{{"x", "u", "error"}};
    for (std::size_t k = 0; k < grid.size(); ++k) t.rows.push_back({grid[k], est[k].value, est[k].error});
    return t;
}

Table cmd_trace(const Options& o, const ProblemArgs& a, Json& cfg) {
    cfg = problem_json(o, a);
    cfg["z"] = a.z;
    if (std::abs(a.z) != 1.0) throw DomainError("--z must be 1 or -1 (a point of the sphere on the first axis)");
    const auto tr = with_dim(o.N, [&](auto dim) {
        constexpr int N = decltype(dim)::value;
        const auto u = build_solution<N>(o, a);
        return extract_traces<N>(u, on_axis<N>(a.z), FracOrder(o.s), o.quad);
    });
    Table t{{"z", "d_sm2", "err_sm2", "d_sm1", "err_sm1", "extrapolation_error"}};
    t.rows.push_back({a.z, tr.d_sm2, tr.err_sm2, tr.d_sm1, tr.err_sm1, tr.extrapolation_error});
    return t;
}

// ---- limits ----------------------------------------------------------------------------

struct LimitArgs {
    std::string family = "green";
    std::string path = "to-two";
    std::vector<double> s_grid;
    double x = 0.0, y = 0.5, at = 0.9;
    std::string psi = "chi:2,3";
    double r = 2.0;
    int grid = 21;
};

Table cmd_limits(const Options& o, const LimitArgs& a, Json& cfg) {
    require_line(o.N, "limits");
    LimitFamilySpec fam;
    if (a.family == "green") fam.family = LimitFamily::green;
    else if (a.family == "harmonic-sum") fam.family = LimitFamily::harmonic_sum;
    else if (a.family == "gamma-extension") fam.family = LimitFamily::gamma_extension;
    else throw DomainError("unknown --family '" + a.family + "' (choose green, harmonic-sum, gamma-extension)");
    LimitPath path;
    if (a.path == "to-two") path = LimitPath::to_two;
    else if (a.path == "to-one") path = LimitPath::to_one;
    else throw DomainError("unknown --path '" + a.path + "' (choose to-two, to-one)");
    auto s_grid = a.s_grid;
    if (s_grid.empty())
        s_grid = path == LimitPath::to_two ? std::vector<double>{1.9, 1.99, 1.999} : std::vector<double>{1.1, 1.01, 1.001};
    for (double s : s_grid) (void)FracOrder(s);
    fam.x = a.x;
    fam.y = a.y;
    fam.at = a.at;
    fam.psi = selectors::parse_field<1>(a.psi);
    fam.r = a.r;
    fam.grid = a.grid;
    cfg = Json{{"family", a.family}, {"path", a.path}, {"s_grid", s_grid}};
    if (fam.family == LimitFamily::green) cfg["x"] = a.x, cfg["y"] = a.y;
    if (fam.family == LimitFamily::harmonic_sum) cfg["at"] = a.at;
    if (fam.family == LimitFamily::gamma_extension) cfg["psi"] = a.psi, cfg["r"] = a.r, cfg["grid"] = a.grid;
    const auto rows = parallel_map<LimitRow>(
        s_grid.size(), [&](std::size_t k) { return limit_study(path, fam, {s_grid[k]}, o.quad).rows.front(); },
        o.threads);
    Table t{{"s", "value", "reference", "gap"}};
    bool monotone = true;
    for (std::size_t k = 0; k < rows.size(); ++k) {
        t.rows.push_back({rows[k].s, rows[k].value, rows[k].reference, rows[k].gap});
        if (k == 0) continue;
        if (fam.family == LimitFamily::harmonic_sum && path == LimitPath::to_one)
            monotone = monotone && rows[k].value > rows[k - 1].value;
        else
            monotone = monotone && rows[k].gap < rows[k - 1].gap;
    }
    t.summary = Json{{"monotone", monotone}};
    return t;
}

// ---- mp-experiment ---------------------------------------------------------------------

struct MpArgs {
    std::string f;
    std::string domain = "-1,1;2,4";
    double h = 1.0 / 64.0;
    std::string profile;
    int profile_grid = 401;
};

IntervalUnionDomain parse_domain(const std::string& text) {
    std::vector<Interval> iv;
    std::stringstream ss(text);
    std::string piece;
    while (std::getline(ss, piece, ';')) {
        double a = 0, b = 0;
        char comma = 0, extra = 0;
        std::istringstream is(piece);
        if (!(is >> a >> comma >> b) || comma != ',' || (is >> extra))
            throw DomainError("--domain: expected 'a,b;c,d;...', got '" + piece + "'");
        iv.push_back({a, b});
    }
    return IntervalUnionDomain(iv);
}

Table cmd_mp(const Options& o, const MpArgs& a, Json& cfg) {
    require_line(o.N, "mp-experiment");
    const FracOrder order(o.s);
    const auto domain = parse_domain(a.domain);
    const auto f = a.f.empty() ? mp_default_bump() : selectors::parse_field<1>(a.f);
    if (!(a.h > 0.0)) throw DomainError("--h must be positive");
    cfg = Json{{"s", o.s}, {"domain", a.domain}, {"f", a.f.empty() ? "quartic:3,0.5,1.875" : a.f}, {"h", a.h}};
    const auto rep = max_principle_experiment(order, domain, f, a.h, o.quad, o.threads);
    Table t{{"a", "b", "min", "argmin", "max", "argmax", "min_refined", "max_refined", "change"}};
    for (const auto& e : rep.intervals)
        t.rows.push_back({e.interval.a, e.interval.b, e.min, e.argmin, e.max, e.argmax, e.min_refined, e.max_refined,
                          e.change});
    const auto& left = rep.intervals.front();
    t.summary = Json{{"min_left", left.min},
                     {"argmin_left", left.argmin},
                     {"change_left", left.change},
                     {"left_sign", rep.left_sign},
                     {"solver_residual", rep.solver_residual}};
    if (!a.profile.empty()) {
        const auto u = solve_weak(order, domain, f, a.h, o.quad, o.threads);
        const auto& iv = domain.intervals();
        const auto xs = linspace(iv.front().a - 0.5, iv.back().b + 0.5, a.profile_grid);
        Options po = o;
        po.output = a.profile;
        Table p{{"x", "u"}};
        for (double x : xs) p.rows.push_back({x, u(x)});
        emit(po, "mp-experiment/profile", cfg, p);
    }
    return t;
}

// ---- appendix --------------------------------------------------------------------------

struct AppendixArgs {
    std::string profile;
};

Table cmd_appendix(const Options& o, const AppendixArgs& a, Json& cfg, bool& all_pass) {
    cfg = Json::object();
    Table t{{"check", "value", "error", "threshold", "pass"}};
    auto row = [&](const std::string& name, double value, double error, double threshold, bool pass) {
        t.labels.push_back(name);
        t.rows.push_back({value, error, threshold, pass ? 1.0 : 0.0});
        all_pass = all_pass && pass;
    };
    appendix::WCheck wc;
    bool w_ok = true;
    try {
        (void)appendix::build_w(&wc);
    } catch (const std::logic_error&) {
        w_ok = false;
    }
    row("W_ode_residual", wc.ode_residual, 0.0, 1e-6, w_ok);

    const auto w1 = appendix::build_w1(o.quad, o.threads);
    row("w1_vs_delta_half", w1.residual, 0.0, 1e-6, w1.residual <= 1e-6);

    const auto uvw = appendix::compare_uvw(o.quad, appendix::default_probes(), o.threads);
    for (const auto& r : uvw.item1)
        row("u_4th_at_" + num(r.x), r.value.value, r.value.error, 1e-3, std::abs(r.value.value - 1.0) <= 1e-3);
    for (const auto& r : uvw.item2)
        row("v_composed_at_" + num(r.x), r.value.value, r.value.error, 1e-3, std::abs(r.value.value - 1.0) <= 1e-3);
    for (const auto& r : uvw.item3)
        row("w_composed_at_" + num(r.x), r.value.value, r.value.error, 10.0 * r.value.error,
            std::abs(r.value.value - 1.0) > 10.0 * r.value.error);
    row("w_separated_count", uvw.item3_separated, 0.0, 3.0, uvw.item3_separated >= 3);
    row("trace_v_d_sm1", uvw.trace_v.d_sm1, uvw.trace_v.err_sm1, 1e-3, std::abs(uvw.trace_v.d_sm1 - 0.5) <= 1e-3);

    const auto zeta = appendix::zeta_derivative_check(o.quad, o.threads);
    row("zeta_max_derivative", zeta.max_dZ, zeta.max_dZ_error, 10.0 * zeta.max_dZ_error,
        zeta.derivative_nonzero && zeta.nonconstant);
    t.summary = Json{{"all_pass", all_pass}};

    if (!a.profile.empty()) {
        Options po = o;
        po.output = a.profile;
        Table p{{"x", "u_4th", "u_err", "v_composed", "v_err", "w_composed", "w_err"}};
        for (std::size_t k = 0; k < uvw.item1.size(); ++k)
            p.rows.push_back({uvw.item1[k].x, uvw.item1[k].value.value, uvw.item1[k].value.error,
                              uvw.item2[k].value.value, uvw.item2[k].value.error, uvw.item3[k].value.value,
                              uvw.item3[k].value.error});
        emit(po, "appendix/profile", cfg, p);
    }
    return t;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"fraclap: kernels, operators and Dirichlet solvers for the fractional Laplacian of order s in (0,2]"};
    app.set_version_flag("--version", std::string(FRACLAP_VERSION));
    app.require_subcommand(1);

    Options o;
    auto common = [&](CLI::App* c, bool with_dim) {
        c->add_option("--s", o.s, "fractional order s in (0,2]")->capture_default_str();
        if (with_dim) c->add_option("--N", o.N, "dimension (1, 2 or 3)")->capture_default_str();
        c->add_option("--threads", o.threads, "worker threads (default: FRACLAP_THREADS or 1)");
        c->add_option("--output,-o", o.output, "write CSV here instead of stdout");
        c->add_option("--rel-tol", o.quad.rel_tol, "quadrature relative tolerance")->capture_default_str();
        c->add_option("--abs-tol", o.quad.abs_tol, "quadrature absolute tolerance")->capture_default_str();
        c->add_option("--max-subdivisions", o.quad.max_subdivisions, "adaptive subdivision budget")->capture_default_str();
        c->add_option("--extrap-depth", o.quad.extrap_depth, "Richardson levels")->capture_default_str();
        c->add_option("--sphere-resolution", o.quad.sphere_resolution, "angular nodes for N >= 2")->capture_default_str();
    };

    KernelArgs ka;
    auto* kernel = app.add_subcommand("kernel", "tabulate a kernel on a grid");
    kernel->add_option("name", ka.name, "green | gamma | poisson | eden | harmonic-sum")->required();
    common(kernel, true);
    kernel->add_option("--x", ka.x, "fixed first argument (green, gamma)")->capture_default_str();
    kernel->add_option("--z", ka.z, "boundary point for eden (+1 or -1)")->capture_default_str();
    kernel->add_option("--trace", ka.trace, "eden trace order: sm1 or sm2")->capture_default_str();
    kernel->add_option("--y-grid,--grid", ka.grid, "number of grid points")->capture_default_str();
    kernel->add_option("--lo", ka.lo, "grid start (default depends on kernel)");
    kernel->add_option("--hi", ka.hi, "grid end");

    ApplyArgs aa;
    auto* apply = app.add_subcommand("apply", "evaluate (-Delta)^s u pointwise");
    common(apply, true);
    apply->add_option("--u", aa.u, std::string("field selector: ") + selectors::kGrammar)->capture_default_str();
    apply->add_option("--method", aa.method, "4th | composed | fourier | 2nd")->capture_default_str();
    apply->add_option("--grid", aa.grid)->capture_default_str();
    apply->add_option("--lo", aa.lo)->capture_default_str();
    apply->add_option("--hi", aa.hi)->capture_default_str();

    ProblemArgs pa;
    auto problem = [&](CLI::App* c) {
        common(c, true);
        c->add_option("--f", pa.f, std::string("right-hand side: ") + selectors::kGrammar);
        c->add_option("--g0", pa.g0, "boundary data of order s-2 (field selector or pm:a,b)");
        c->add_option("--g1", pa.g1, "boundary data of order s-1");
        c->add_option("--psi", pa.psi, "exterior data");
        c->add_option("--r", pa.r, "psi vanishes on B_r minus the ball (1: psi reaches the sphere)");
        c->add_flag("--assert-regularity", pa.regularity, "psi is regular enough up to the sphere");
        c->add_flag("--assert-continuity", pa.continuity, "the continuity hypothesis holds");
    };
    auto* solve = app.add_subcommand("solve", "solve the Dirichlet problem and sample u along the first axis");
    problem(solve);
    solve->add_option("--grid", pa.grid)->capture_default_str();
    solve->add_option("--lo", pa.lo)->capture_default_str();
    solve->add_option("--hi", pa.hi)->capture_default_str();
    auto* trace = app.add_subcommand("trace", "weighted boundary traces of the solution at z");
    problem(trace);
    trace->add_option("--z", pa.z, "boundary point on the first axis (+1 or -1)")->capture_default_str();

    LimitArgs la;
    auto* limits = app.add_subcommand("limits", "tabulate a kernel family along s -> 2 or s -> 1");
    common(limits, false);
    limits->add_option("--family", la.family, "green | harmonic-sum | gamma-extension")->capture_default_str();
    limits->add_option("--path", la.path, "to-two | to-one")->capture_default_str();
    limits->add_option("--s-grid", la.s_grid, "orders to visit")->delimiter(',');
    limits->add_option("--x", la.x)->capture_default_str();
    limits->add_option("--y", la.y)->capture_default_str();
    limits->add_option("--at", la.at)->capture_default_str();
    limits->add_option("--psi", la.psi)->capture_default_str();
    limits->add_option("--r", la.r)->capture_default_str();
    limits->add_option("--grid", la.grid)->capture_default_str();

    MpArgs ma;
    auto* mp = app.add_subcommand("mp-experiment", "Galerkin solve on a union of intervals; sign of u on the first");
    mp->set_help_flag("--help", "print this help message and exit");
    common(mp, false);
    mp->add_option("--domain", ma.domain, "intervals 'a,b;c,d;...'")->capture_default_str();
    mp->add_option("--f", ma.f, "nonnegative load vanishing on the first interval (default quartic:3,0.5,1.875)");
    mp->add_option("--h", ma.h, "spline spacing")->capture_default_str();
    mp->add_option("--profile", ma.profile, "also write x,u samples to this file");
    mp->add_option("--profile-grid", ma.profile_grid)->capture_default_str();

    AppendixArgs pp;
    auto* appx = app.add_subcommand("appendix", "run the explicit one-dimensional examples and report pass/fail");
    common(appx, false);
    appx->add_option("--profile", pp.profile, "also write the (i)-(iii) values to this file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : usage;
    }

    try {
        o.quad.validate();
        if (o.threads < 1) throw DomainError("--threads must be positive");
        Json cfg;
        bool all_pass = true;
        Table t;
        std::string name;
        if (*kernel) t = cmd_kernel(o, ka, cfg), name = "kernel";
        else if (*apply) t = cmd_apply(o, aa, cfg), name = "apply";
        else if (*solve) t = cmd_solve(o, pa, cfg), name = "solve";
        else if (*trace) t = cmd_trace(o, pa, cfg), name = "trace";
        else if (*limits) t = cmd_limits(o, la, cfg), name = "limits";
        else if (*mp) t = cmd_mp(o, ma, cfg), name = "mp-experiment";
        else t = cmd_appendix(o, pp, cfg, all_pass), name = "appendix";
        emit(o, name, cfg, t);
        return all_pass ? ok : accuracy;
    } catch (const AccuracyFailure& e) {
        std::cerr << "accuracy failure: " << e.what() << " (estimate " << num(e.estimate()) << ", error bound "
                  << num(e.error_bound()) << ")\n";
        return accuracy;
    } catch (const CapabilityError& e) {
        std::cerr << "not supported: " << e.what() << '\n';
        return capability;
    } catch (const DomainError& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return usage;
    } catch (const IntegrabilityError& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return usage;
    } catch (const DivergenceError& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return usage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return failure;
    }
}
