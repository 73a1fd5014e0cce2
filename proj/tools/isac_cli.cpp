#include "isac/acceptance.hpp"
#include "isac/channel.hpp"
#include "isac/channel_spec.hpp"
#include "isac/csv.hpp"
#include "isac/errors.hpp"
#include "isac/expr.hpp"
#include "isac/inner.hpp"
#include "isac/outer.hpp"
#include "isac/rd.hpp"
#include "isac/sim.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace isac;

constexpr int kExitOk = 0;
constexpr int kExitVerify = 1;
constexpr int kExitUsage = 2;
constexpr int kExitInput = 3;

struct ChannelArgs {
    int example = 0;
    std::string spec;

    void add(CLI::App* app) {
        app->add_option("--example", example, "Built-in example channel (1-4)")->check(CLI::Range(1, 4));
        app->add_option("--spec", spec, "Channel spec file (YAML)");
    }
    IsacChannel load() const {
        if (!spec.empty() && example) throw UsageError("give either --example or --spec, not both");
        if (!spec.empty()) return load_channel_spec(spec);
        if (example) return build_example(example);
        throw UsageError("a channel is required: --example N or --spec FILE");
    }
    std::string describe() const { return spec.empty() ? "example " + std::to_string(example) : spec; }
};

struct InputArgs {
    std::string px1 = "0.5";
    std::string px2 = "0.5";

    void add(CLI::App* app) {
        app->add_option("--px1", px1, "P(X1=1) for binary inputs, or a comma-separated pmf")->capture_default_str();
        app->add_option("--px2", px2, "P(X2=1) for binary inputs, or a comma-separated pmf")->capture_default_str();
    }

    static JointDist law(const std::string& name, const std::string& text, int size) {
        std::vector<double> v;
        std::stringstream ss(text);
        std::string item;
        while (std::getline(ss, item, ',')) {
            std::size_t used = 0;
            double x = 0.0;
            try {
                x = std::stod(item, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used == 0 || used != item.size()) throw UsageError("--p" + name.substr(1) + ": not a number: '" + item + "'");
            v.push_back(x);
        }
        if (v.size() == 1 && size == 2) return JointDist::bernoulli(name, v[0]);
        if (static_cast<int>(v.size()) != size)
            throw UsageError("input law for " + name + " needs " + std::to_string(size) + " probabilities");
        return JointDist::from_pmf(name, v);
    }
    JointDist joint(const IsacChannel& ch) const {
        return product(law("X1", px1, ch.size_of("X1")), law("X2", px2, ch.size_of("X2")));
    }
};

VarList split_list(const std::string& s) {
    VarList out;
    std::string cur;
    for (char c : s) {
        if (c == ',' || c == ' ') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

void emit(const CsvTable& t, const std::string& out) {
    if (out.empty() || out == "-") {
        t.write(std::cout);
        return;
    }
    std::ofstream f(out);
    if (!f) throw Error("cannot open '" + out + "' for writing");
    t.write(f);
}

void emit_gnuplot(const std::string& path, const std::string& csv, const std::string& xcol, const std::string& ycol,
                  const std::string& title) {
    if (path.empty()) return;
    if (csv.empty() || csv == "-") throw UsageError("--gnuplot needs --out so the script can read the data file");
    std::ofstream f(path);
    if (!f) throw Error("cannot open '" + path + "' for writing");
    f << "set datafile separator ','\n"
      << "set key autotitle columnhead\n"
      << "set xlabel '" << xcol << "'\nset ylabel '" << ycol << "'\n"
      << "set title '" << title << "'\n"
      << "plot '" << csv << "' using '" << xcol << "':'" << ycol << "' with linespoints\n";
}

std::vector<double> grid_from(const std::string& spec) {
    // "a:b:n" or a comma list.
    if (spec.find(':') != std::string::npos) {
        double a = 0.0;
        double b = 0.0;
        int n = 0;
        char c1 = 0;
        char c2 = 0;
        std::stringstream ss(spec);
        if (!(ss >> a >> c1 >> b >> c2 >> n) || c1 != ':' || c2 != ':' || n < 1)
            throw UsageError("grid must look like START:STOP:COUNT");
        std::vector<double> v;
        for (int i = 0; i < n; ++i) v.push_back(n == 1 ? a : a + (b - a) * i / (n - 1));
        return v;
    }
    std::vector<double> v;
    for (const auto& item : split_list(spec)) {
        try {
            v.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw UsageError("not a number in grid: '" + item + "'");
        }
    }
    return v;
}

int run_info(const ChannelArgs& ca, const InputArgs& ia, const std::string& expr, const std::string& out) {
    const IsacChannel ch = ca.load();
    JointDist j = assemble_joint(ch, ia.joint(ch));
    VarList known = j.names();
    for (const auto& c : ch.components) known.push_back(c.name);
    const InfoExpr e = parse_info_expr(expr, known);
    VarList comps;
    for (const auto& v : e.variables())
        if (!j.contains(v) && std::find(comps.begin(), comps.end(), v) == comps.end()) comps.push_back(v);
    j = with_components(j, ch, comps);
    CsvTable t;
    t.comments = {"command: info", "channel: " + ca.describe(), "px1: " + ia.px1, "px2: " + ia.px2,
                  "expr: " + e.str(), "units: bits"};
    t.header = {"value"};
    t.add_row({evaluate(e, j)});
    emit(t, out);
    return kExitOk;
}

int run_rd(const ChannelArgs& ca, double p, int user, const std::string& grid, const std::string& out,
           const std::string& gnuplot) {
    RdProblem prob = RdProblem::bernoulli(0.5);
    std::string source;
    if (ca.example || !ca.spec.empty()) {
        prob = sensing_rd_problem(ca.load(), user);
        source = ca.describe() + ", sensing state of user " + std::to_string(user);
    } else {
        prob = RdProblem::bernoulli(p);
        source = "Bernoulli(" + format_number(p) + ") with Hamming distortion";
    }
    std::vector<double> d = grid.empty() ? std::vector<double>{} : grid_from(grid);
    if (d.empty()) {
        const double dmax = rd_max_distortion(prob);
        for (int i = 0; i <= 30; ++i) d.push_back(dmax * i / 30.0);
    }
    std::sort(d.begin(), d.end());
    CsvTable t;
    t.comments = {"command: rd", "source: " + source, "units: D in expected distortion, R in bits"};
    t.header = {"D", "R"};
    for (const auto& pt : rd_curve(prob, d)) t.add_row({pt.D, pt.R});
    emit(t, out);
    emit_gnuplot(gnuplot, out, "D", "R", "rate-distortion");
    return kExitOk;
}

struct RegionArgs {
    std::string scheme = "our";
    int example = 4;
    SweepGrid grid;
    bool no_zoom = false;
    std::string frontier = "all";
    bool symmetric = false;
    int alpha_points = 51;
    std::string d2_grid;
    std::string out;
    std::string gnuplot;
};

int run_region(const RegionArgs& a) {
    CsvTable t;
    t.comments = {"command: region", "scheme: " + a.scheme, "example: " + std::to_string(a.example)};
    if (a.scheme == "outer-our" || a.scheme == "outer-khkc") {
        if (a.example != 4 || !a.symmetric)
            throw UsageError("outer schemes are available as --example 4 --symmetric curves");
        OuterSweepGrid g;
        g.alpha_points = a.alpha_points;
        g.threads = a.grid.threads;
        if (!a.d2_grid.empty()) g.d2 = grid_from(a.d2_grid);
        t.comments.push_back("alpha_points: " + std::to_string(g.alpha_points));
        t.comments.push_back("columns: D2 (expected Hamming distortion), R (symmetric rate, bits/use; nan when infeasible), "
                             "feasible (0/1)");
        t.header = {"D2", "R", "feasible"};
        const bool our = a.scheme == "outer-our";
        for (const auto& p : sweep_example4_outer(g)) {
            const bool ok = our ? p.our_feasible : p.khkc_feasible;
            t.add_row({p.D2, ok ? (our ? p.our_rate : p.khkc_rate) : std::nan(""), ok ? 1.0 : 0.0});
        }
        emit(t, a.out);
        emit_gnuplot(a.gnuplot, a.out, "D2", "R", a.scheme + " symmetric rate");
        return kExitOk;
    }
    if (a.symmetric) throw UsageError("--symmetric applies to outer-our and outer-khkc only");
    const InnerKind kind = parse_inner_kind(a.scheme);
    if (a.frontier != "all" && a.frontier != "r1-d2") throw UsageError("--frontier must be 'all' or 'r1-d2'");
    SweepGrid g = a.grid;
    g.zoom = !a.no_zoom;
    SweepStats st;
    auto pts = sweep_family(build_example(a.example), a.example, kind, g, &st);
    pts = pareto_frontier(pts, a.frontier == "all" ? Objective::all() : Objective::r1_d2());
    sort_points(pts);
    t.comments.push_back("axis_points: " + std::to_string(g.axis_points) + ", pe_points: " + std::to_string(g.pe_points) +
                         ", zoom: " + (g.zoom ? std::to_string(g.zoom_points) : std::string("off")));
    t.comments.push_back("frontier: " + a.frontier + ", evaluations: " + std::to_string(st.evaluations));
    t.comments.push_back("columns: rates in bits/use, distortions in expected Hamming distortion, then scheme parameters");
    t.header = {"R1", "R2", "D1", "D2", "p_u", "p_sigma1", "p_sigma2", "p_theta1", "p_theta2", "p_e"};
    for (const auto& p : pts) {
        std::vector<double> row = {p.R1, p.R2, p.D1, p.D2};
        row.insert(row.end(), p.params.begin(), p.params.end());
        t.add_row(std::move(row));
    }
    emit(t, a.out);
    emit_gnuplot(a.gnuplot, a.out, "D2", "R1", a.scheme + " frontier");
    return kExitOk;
}

int run_simulate(const ChannelArgs& ca, const InputArgs& ia, int user, const std::string& obs, long n,
                 std::uint64_t seed, unsigned threads, const std::string& out) {
    const IsacChannel ch = ca.load();
    SimConfig cfg{ch, ia.joint(ch), user, split_list(obs), std::nullopt, n, seed, threads};
    if (cfg.obs.empty()) throw UsageError("--obs needs at least one variable");
    const SimResult r = simulate(cfg);
    CsvTable t;
    t.comments = {"command: simulate", "channel: " + ca.describe(), "px1: " + ia.px1, "px2: " + ia.px2,
                  "user: " + std::to_string(user), "obs: " + obs, "seed: " + std::to_string(seed),
                  "generator: SplitMix64 (counter-based), inverse-CDF sampling"};
    t.header = {"n", "mean", "stderr", "analytic"};
    t.add_row({static_cast<double>(r.n), r.mean, r.std_error, r.analytic});
    emit(t, out);
    return kExitOk;
}

int run_verify(const std::vector<std::string>& only, double perturb_pn, bool verbose, unsigned threads) {
    AcceptanceOptions opt;
    opt.only = only;
    opt.threads = threads;
    if (!std::isnan(perturb_pn)) opt.example4.p_n = perturb_pn;
    opt.on_result = [&](const CriterionResult& r) { print_result(std::cout, r, verbose); };
    const auto results = run_acceptance(opt);
    int failed = 0;
    for (const auto& r : results) failed += r.pass() ? 0 : 1;
    std::cout << (failed ? "FAILED " : "ALL PASSED ") << results.size() - failed << "/" << results.size() << '\n';
    return failed ? kExitVerify : kExitOk;
}

int run_spec_check(const ChannelArgs& ca, bool print) {
    const IsacChannel ch = ca.load();
    ch.validate();
    if (print) {
        std::cout << serialize_channel_spec(ch);
    } else {
        std::cout << "ok: " << (ch.label.empty() ? ca.describe() : ch.label) << " |S|=" << ch.size_of("S")
                  << " |X1|=" << ch.size_of("X1") << " |X2|=" << ch.size_of("X2") << " |Y|=" << ch.size_of("Y")
                  << " |Z1|=" << ch.size_of("Z1") << " |Z2|=" << ch.size_of("Z2") << '\n';
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Capacity-distortion toolkit for sensing-enabled multiple-access channels"};
    app.require_subcommand(1);

    ChannelArgs info_ch, rd_ch, sim_ch, spec_ch;
    InputArgs info_in, sim_in;
    std::string expr, info_out;
    auto* info = app.add_subcommand("info", "Evaluate I(A;B|C) or H(A|B) on an assembled joint");
    info_ch.add(info);
    info_in.add(info);
    info->add_option("--expr", expr, "Measure expression")->required();
    info->add_option("--out", info_out, "CSV output path (default stdout)");

    double rd_p = 0.3;
    int rd_user = 2;
    std::string rd_grid, rd_out, rd_plot;
    auto* rd = app.add_subcommand("rd", "Rate-distortion curve");
    rd_ch.add(rd);
    rd->add_option("--p", rd_p, "Bernoulli source parameter when no channel is given")->capture_default_str();
    rd->add_option("--user", rd_user, "Sensing user whose state is the source")->check(CLI::Range(1, 2));
    rd->add_option("--grid", rd_grid, "Distortion grid: START:STOP:COUNT or a comma list");
    rd->add_option("--out", rd_out, "CSV output path");
    rd->add_option("--gnuplot", rd_plot, "Also write a gnuplot script");

    RegionArgs ra;
    auto* region = app.add_subcommand("region", "Region sweeps and frontier CSV");
    region->add_option("--scheme", ra.scheme, "our, our-com, awk, kobayashi, outer-our, outer-khkc")->capture_default_str();
    region->add_option("--example", ra.example, "Example channel")->check(CLI::Range(1, 4))->capture_default_str();
    region->add_option("--axis-points", ra.grid.axis_points, "Grid points per input parameter")->capture_default_str();
    region->add_option("--pe-points", ra.grid.pe_points, "Grid points for the quantizer crossover")->capture_default_str();
    region->add_option("--zoom-points", ra.grid.zoom_points, "Refinement points around frontier candidates")
        ->capture_default_str();
    region->add_flag("--no-zoom", ra.no_zoom, "Disable the refinement pass");
    region->add_option("--threads", ra.grid.threads, "Worker threads (0: all cores)");
    region->add_option("--frontier", ra.frontier, "all or r1-d2")->capture_default_str();
    region->add_flag("--symmetric", ra.symmetric, "Symmetric-rate curve (outer schemes)");
    region->add_option("--alpha-points", ra.alpha_points, "Outer alpha grid resolution")->capture_default_str();
    region->add_option("--d2-grid", ra.d2_grid, "Outer D2 grid: START:STOP:COUNT or a comma list");
    region->add_option("--out", ra.out, "CSV output path");
    region->add_option("--gnuplot", ra.gnuplot, "Also write a gnuplot script");

    int sim_user = 2;
    std::string sim_obs, sim_out;
    long sim_n = 100'000;
    std::uint64_t sim_seed = 1;
    unsigned sim_threads = 0;
    auto* sim = app.add_subcommand("simulate", "Monte-Carlo distortion of the optimal estimator");
    sim_ch.add(sim);
    sim_in.add(sim);
    sim->add_option("--user", sim_user, "Sensing user")->check(CLI::Range(1, 2))->capture_default_str();
    sim->add_option("--obs", sim_obs, "Estimator observations, e.g. X2,Z2")->required();
    sim->add_option("--n", sim_n, "Sample count")->check(CLI::PositiveNumber)->capture_default_str();
    sim->add_option("--seed", sim_seed, "Generator seed")->capture_default_str();
    sim->add_option("--threads", sim_threads, "Worker threads (0: all cores)");
    sim->add_option("--out", sim_out, "CSV output path");

    std::vector<std::string> only;
    double perturb_pn = std::nan("");
    bool verbose = false;
    unsigned verify_threads = 0;
    auto* verify = app.add_subcommand("verify", "Run the acceptance suite");
    verify->add_option("--only", only, "Criterion tags or numbers")->delimiter(',');
    verify->add_option("--perturb-pn", perturb_pn, "Override P_N(1) of example 4");
    verify->add_flag("-v,--verbose", verbose, "List every sub-check");
    verify->add_option("--threads", verify_threads, "Worker threads (0: all cores)");

    bool spec_print = false;
    auto* spec_check = app.add_subcommand("spec-check", "Validate a channel spec");
    spec_ch.add(spec_check);
    spec_check->add_flag("--print", spec_print, "Print the canonical serialization");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*info) return run_info(info_ch, info_in, expr, info_out);
        if (*rd) return run_rd(rd_ch, rd_p, rd_user, rd_grid, rd_out, rd_plot);
        if (*region) return run_region(ra);
        if (*sim) return run_simulate(sim_ch, sim_in, sim_user, sim_obs, sim_n, sim_seed, sim_threads, sim_out);
        if (*verify) return run_verify(only, perturb_pn, verbose, verify_threads);
        if (*spec_check) return run_spec_check(spec_ch, spec_print);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const ArgumentError& e) {
        std::cerr << "argument error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << '\n';
        return kExitInput;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    }
    return kExitUsage;
}
