#include "isac/acceptance.hpp"

#include "isac/errors.hpp"
#include "isac/estimator.hpp"
#include "isac/info.hpp"
#include "isac/outer.hpp"
#include "isac/prob.hpp"
#include "isac/rd.hpp"
#include "isac/sim.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <random>
#include <sstream>

namespace isac {

namespace {

// Published reference values.
constexpr double kZChannelInfo = 0.321928094887362;
constexpr double kOneMinusH024 = 0.204959720615478;
constexpr double kRd0138 = 0.3023;
constexpr double kTupleA_D2 = 0.13072;
constexpr double kTupleB_R1 = 0.11697;
constexpr double kTupleB_D2 = 0.1783;
constexpr double kTupleC_R1 = 0.918563;
constexpr double kTupleC_D2 = 0.3;
constexpr double kAwkR1Ceiling = 0.116968374271884;
constexpr double kAwkD2Floor = 0.138;
constexpr double kExample4ConstantEstimate = 0.3;
constexpr double kExample3Floor = 0.11;

std::string fmt(double v, int digits = 9) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

class Ctx {
public:
    explicit Ctx(CriterionResult& r) : r_(r) {}

    bool expect(std::string name, bool ok, std::string detail = {}) {
        r_.checks.push_back({std::move(name), ok, std::move(detail)});
        return ok;
    }
    bool near(std::string name, double got, double want, double tol) {
        const bool ok = std::abs(got - want) <= tol;
        return expect(std::move(name), ok, "got " + fmt(got, 15) + ", want " + fmt(want, 15) + " +- " + fmt(tol, 3));
    }

private:
    CriterionResult& r_;
};

// ---- independent oracles -------------------------------------------------

double oracle_h(double p) {
    if (p <= 0.0 || p >= 1.0) return 0.0;
    return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

double oracle_entropy(const JointDist& d, const VarList& names) {
    std::vector<int> axes;
    for (const auto& n : names) axes.push_back(d.axis(n));
    std::map<std::vector<int>, double> acc;
    std::vector<int> sym(static_cast<std::size_t>(d.rank()));
    std::vector<int> key(axes.size());
    for (Eigen::Index i = 0; i < d.size(); ++i) {
        d.decode(i, sym);
        for (std::size_t j = 0; j < axes.size(); ++j) key[j] = sym[static_cast<std::size_t>(axes[j])];
        acc[key] += d.probs()[i];
    }
    double h = 0.0;
    for (const auto& [k, p] : acc)
        if (p > 0.0) h -= p * std::log2(p);
    return h;
}

VarList cat(VarList a, const VarList& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

double oracle_mi(const JointDist& d, const VarList& a, const VarList& b, const VarList& c) {
    return oracle_entropy(d, cat(a, c)) + oracle_entropy(d, cat(b, c)) - oracle_entropy(d, cat(cat(a, b), c)) -
           oracle_entropy(d, c);
}

// min over estimate of sum_s P(o, s) d(s, est), summed over observations.
double oracle_optimal_distortion(const JointDist& j, const VarList& obs, const std::string& target,
                                 const DistortionFn& d) {
    std::vector<int> oa;
    for (const auto& o : obs) oa.push_back(j.axis(o));
    const int ta = j.axis(target);
    std::map<std::vector<int>, std::vector<double>> mass;
    std::vector<int> sym(static_cast<std::size_t>(j.rank()));
    for (Eigen::Index i = 0; i < j.size(); ++i) {
        j.decode(i, sym);
        std::vector<int> k;
        for (int a : oa) k.push_back(sym[static_cast<std::size_t>(a)]);
        auto& v = mass[k];
        v.resize(static_cast<std::size_t>(j.alphabet(target)), 0.0);
        v[static_cast<std::size_t>(sym[static_cast<std::size_t>(ta)])] += j.probs()[i];
    }
    double total = 0.0;
    for (const auto& [k, v] : mass) {
        double best = INFINITY;
        for (int e = 0; e < d.estimate_size(); ++e) {
            double s = 0.0;
            for (std::size_t t = 0; t < v.size(); ++t) s += v[t] * d(static_cast<int>(t), e);
            best = std::min(best, s);
        }
        total += best;
    }
    return total;
}

// ---- random objects --------------------------------------------------------

using Rng = std::mt19937_64;

Eigen::ArrayXd random_pmf(Rng& g, Eigen::Index n, double zero_prob = 0.2) {
    std::exponential_distribution<double> e(1.0);
    std::bernoulli_distribution zero(zero_prob);
    Eigen::ArrayXd p(n);
    for (Eigen::Index i = 0; i < n; ++i) p[i] = zero(g) ? 0.0 : e(g);
    if (p.sum() <= 0.0) p[0] = 1.0;
    return p / p.sum();
}

JointDist random_joint(Rng& g, std::vector<Variable> vars) {
    const Eigen::Index n = tensor_size(vars);
    return JointDist(std::move(vars), random_pmf(g, n));
}

CondKernel random_kernel(Rng& g, std::vector<Variable> given, Variable out, double zero_prob = 0.0) {
    Eigen::Index gs = tensor_size(given);
    Eigen::ArrayXd p(gs * out.size);
    for (Eigen::Index r = 0; r < gs; ++r) p.segment(r * out.size, out.size) = random_pmf(g, out.size, zero_prob);
    return CondKernel(std::move(given), {std::move(out)}, std::move(p));
}

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> v;
    for (int i = 0; i < n; ++i) v.push_back(n == 1 ? a : a + (b - a) * i / (n - 1));
    return v;
}

OuterScheme random_outer_scheme(Rng& g, int cap) {
    std::uniform_int_distribution<int> tsz(1, cap);
    const int nt = tsz(g);
    std::uniform_int_distribution<int> qpick(0, nt - 1);
    std::vector<int> q_of_t(static_cast<std::size_t>(nt));
    for (auto& q : q_of_t) q = qpick(g) % std::max(1, nt / 2 + 1);
    // Compact q labels so |Q| <= |T|.
    std::vector<int> seen;
    for (auto& q : q_of_t) {
        auto it = std::find(seen.begin(), seen.end(), q);
        if (it == seen.end()) {
            seen.push_back(q);
            q = static_cast<int>(seen.size()) - 1;
        } else {
            q = static_cast<int>(it - seen.begin());
        }
    }
    return make_outer_scheme(random_joint(g, {{"T", nt}, {"X1", 2}, {"X2", 2}}), q_of_t, "random");
}

// ---- criteria --------------------------------------------------------------

struct Shared {
    const AcceptanceOptions& opt;
    IsacChannel ex4;
};

void criterion_constants(Ctx& c, Shared& sh) {
    const IsacChannel& e4 = sh.ex4;
    const JointDist z = with_components(assemble_joint(e4, product_input(e4, 0.4, 0.5)), e4, {"BX1"});
    c.near("I(X1;BX1) at P_X1(1)=0.4", mutual_info(z, {"X1"}, {"BX1"}), kZChannelInfo, 1e-9);
    c.near("I(X1;BX1) oracle", oracle_mi(z, {"X1"}, {"BX1"}, {}), kZChannelInfo, 1e-9);
    const JointDist y = with_components(assemble_joint(e4, product_input(e4, 0.5, 0.5)), e4, {"Y1"});
    c.near("1-h(0.24) as I(X1;Y1)", mutual_info(y, {"X1"}, {"Y1"}), kOneMinusH024, 1e-9);
    const IsacChannel e1 = build_example(1);
    const JointDist s = with_components(assemble_joint(e1, product_input(e1, 0.5, 0.5)), e1, {"S1"});
    c.near("H(S1) of example 1", entropy(s, {"S1"}), 0.5, 1e-3);
}

void criterion_rd(Ctx& c, Shared&) {
    const RdProblem p = RdProblem::bernoulli(0.3);
    c.near("R(0.138) for Bern(0.3)", rd_function(p, 0.138), kRd0138, 5e-4);
    const auto grid = linspace(0.0, 0.3, 31);
    const auto curve = rd_curve(p, grid);
    double worst = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double want = grid[i] < 0.3 ? oracle_h(0.3) - oracle_h(grid[i]) : 0.0;
        worst = std::max(worst, std::abs(curve[i].R - want));
    }
    c.expect("31-point curve vs h(0.3)-h(D)", worst <= 1e-4, "max error " + fmt(worst, 3));

    double bf_worst = 0.0;
    for (double D : {0.05, 0.1, 0.138, 0.2, 0.25})
        bf_worst = std::max(bf_worst, std::abs(brute_force_rd(p, D, 400) - rd_function(p, D)));
    Rng g(11);
    for (int trial = 0; trial < 3; ++trial) {
        const JointDist src = random_joint(g, {{"Z", 2}, {"ST", 2}});
        const RdProblem q{src, {"Z", "ST"}, "ST", DistortionFn::hamming(2)};
        const double dmax = rd_max_distortion(q);
        for (double f : {0.3, 0.6}) {
            const double D = f * dmax;
            bf_worst = std::max(bf_worst, std::abs(brute_force_rd(q, D, 24) - rd_function(q, D)));
        }
    }
    c.expect("brute-force oracle agreement", bf_worst <= 5e-3, "max gap " + fmt(bf_worst, 3));
}

void criterion_example1(Ctx& c, Shared& sh) {
    const IsacChannel e1 = build_example(1);
    const InnerResult r = eval_inner_our(e1, family_scheme(e1, 1, InnerKind::Our, {0.0, 0.0, 0.0, 0.5, 0.5, 0.0}));
    c.expect("our scheme certifies (0,1,0,0)",
             r.polygon.feasible && r.polygon.contains(0.0, 1.0, 1e-9) && r.d1 <= 1e-9 && r.d2 <= 1e-9,
             "r2=" + fmt(r.polygon.r2) + " d1=" + fmt(r.d1) + " d2=" + fmt(r.d2));
    SweepGrid grid = sh.opt.grid;
    grid.threads = sh.opt.threads;
    const auto pts = sweep_family(e1, 1, InnerKind::Awk, grid);
    double max_r2 = 0.0;
    for (const auto& p : pts) max_r2 = std::max(max_r2, p.R2);
    c.expect("awk sweep has feasible points", !pts.empty(), std::to_string(pts.size()) + " points");
    c.expect("awk R2 <= 0.5", max_r2 <= 0.5 + 1e-6, "max R2 " + fmt(max_r2));
    const double one_minus_hs2 = 1.0 - oracle_h(0.11);
    c.expect("awk R2 <= 1 - H(S2)", max_r2 <= one_minus_hs2 + 1e-9,
             "max R2 " + fmt(max_r2) + ", 1 - H(S2) = " + fmt(one_minus_hs2));
}

void criterion_example2(Ctx& c, Shared& sh) {
    const IsacChannel e2 = build_example(2);
    const InnerResult r =
        eval_inner_our(e2, family_scheme(e2, 2, InnerKind::OurCom, {0.0, 0.5, 0.0, 0.0, 0.5, 0.0}));
    c.expect("our-com with V1c=S1 certifies (0,0,0,0)",
             r.polygon.feasible && r.polygon.contains(0.0, 0.0, 1e-9) && r.d1 <= 1e-9 && r.d2 <= 1e-9,
             "d1=" + fmt(r.d1) + " d2=" + fmt(r.d2));

    // Per-scheme estimator information on a coarse family grid.
    const auto full = linspace(0.0, 1.0, 6);
    const auto half = linspace(0.0, 0.4, 3);
    const double q = 0.11;
    const auto pe_grid = linspace(0.0, std::min(q, 1.0 - q), 11);
    long feasible = 0;
    double worst = 0.0;
    for (double pu : half)
        for (double s1 : half)
            for (double s2 : half)
                for (double t1 : full)
                    for (double t2 : full)
                        for (double pe : pe_grid) {
                            const AuxScheme s = family_scheme(e2, 2, InnerKind::Awk, {pu, s1, s2, t1, t2, pe});
                            if (!eval_inner_awk(e2, s).polygon.feasible) continue;
                            ++feasible;
                            const JointDist m = assemble_marginal(e2, s.input_joint(), {s.comp1, s.comp2},
                                                                  {"X2", "U1", "Z2", "V1", "ST2"});
                            const EstimatorMap est = optimal_estimator(m, {"X2", "U1", "Z2", "V1"}, "ST2", e2.d2);
                            const JointDist w = with_estimate(m, est, "SHAT2");
                            worst = std::max(worst, mutual_info(w, {"ST2"}, {"SHAT2"}));
                        }
    c.expect("awk schemes evaluated", feasible > 0, std::to_string(feasible) + " feasible");
    c.expect("I(S1;S_hat_T2) <= 0.25", worst <= 0.25 + 1e-6, "max " + fmt(worst));

    SweepGrid grid = sh.opt.grid;
    grid.threads = sh.opt.threads;
    const auto pts = sweep_family(e2, 2, InnerKind::Awk, grid);
    double min_d2 = INFINITY;
    for (const auto& p : pts) min_d2 = std::min(min_d2, p.D2);
    c.expect("awk frontier has D2 > 0", !pts.empty() && min_d2 > 1e-9, "min D2 " + fmt(min_d2));
}

void criterion_example3(Ctx& c, Shared&) {
    const IsacChannel e3 = build_example(3);
    Rng g(23);
    std::vector<OuterScheme> schemes = {binary_product_scheme({1.0}, {0.5}, {0.5}),
                                        binary_product_scheme({0.3, 0.7}, {0.1, 0.8}, {0.6, 0.2}, {0, 0})};
    for (int i = 0; i < 30; ++i) schemes.push_back(random_outer_scheme(g, outer_cardinality_cap(e3)));
    double w1 = 0.0;
    double w2 = 0.0;
    double genie = 0.0;
    for (const auto& s : schemes) {
        w1 = std::max(w1, std::abs(outer_min_distortion(e3, s, 1) - kExample3Floor));
        w2 = std::max(w2, std::abs(outer_min_distortion(e3, s, 2) - kExample3Floor));
        const KhkcResult k = eval_outer_khkc(e3, s);
        genie = std::max({genie, k.d1_min, k.d2_min});
    }
    c.expect("our-outer D1min = 0.11", w1 <= 1e-6, "max deviation " + fmt(w1, 3));
    c.expect("our-outer D2min = 0.11", w2 <= 1e-6, "max deviation " + fmt(w2, 3));
    c.expect("khkc genie distortions are 0", genie <= 1e-12, "max " + fmt(genie, 3));
    const OuterResult r = eval_outer_our(e3, schemes[0], 0.0, 0.0);
    c.expect("(D1,D2)=(0,0) infeasible in our outer", !r.feasible);
}

bool near_point(const std::vector<RegionPoint>& f, double R1, double D2, double tol) {
    return std::any_of(f.begin(), f.end(), [&](const RegionPoint& p) {
        return std::abs(p.R1 - R1) <= tol && std::abs(p.D2 - D2) <= tol;
    });
}

void criterion_example4_inner(Ctx& c, Shared& sh) {
    SweepGrid grid = sh.opt.grid;
    grid.threads = sh.opt.threads;
    const auto our = sweep_family(sh.ex4, 4, InnerKind::Our, grid);
    const auto com = sweep_family(sh.ex4, 4, InnerKind::OurCom, grid);
    const auto awk = sweep_family(sh.ex4, 4, InnerKind::Awk, grid);
    const auto f_our = pareto_frontier(our, Objective::r1_d2());
    const auto f_com = pareto_frontier(com, Objective::r1_d2());
    const auto f_awk = pareto_frontier(awk, Objective::r1_d2());
    constexpr double tol = 2e-3;

    c.expect("our frontier near (0,0,0.13072)", near_point(f_our, 0.0, kTupleA_D2, tol));
    c.expect("our frontier near (0.11697,0,0.1783)", near_point(f_our, kTupleB_R1, kTupleB_D2, tol));
    c.expect("our frontier near (0.918563,0,0.3)", near_point(f_our, kTupleC_R1, kTupleC_D2, tol));
    c.expect("our-com lacks (0.918563,0,0.3)", !near_point(f_com, kTupleC_R1, kTupleC_D2, tol));
    c.expect("our-com near (0,0,0.13072)", near_point(f_com, 0.0, kTupleA_D2, tol));
    c.expect("our-com near (0.11697,0,0.1783)", near_point(f_com, kTupleB_R1, kTupleB_D2, tol));

    double awk_min_d2 = INFINITY;
    double awk_r1 = 0.0;
    for (const auto& p : f_awk) {
        awk_min_d2 = std::min(awk_min_d2, p.D2);
        if (p.D2 <= kTupleB_D2) awk_r1 = std::max(awk_r1, p.R1);
    }
    c.expect("awk has no point with D2 <= 0.138", awk_min_d2 > kAwkD2Floor, "min D2 " + fmt(awk_min_d2));
    c.expect("awk R1 < 0.116968374271884 at D2 <= 0.1783", awk_r1 < kAwkR1Ceiling, "max R1 " + fmt(awk_r1));
    c.expect("awk attains neither tuple A nor B",
             !near_point(f_awk, 0.0, kTupleA_D2, tol) && !near_point(f_awk, kTupleB_R1, kTupleB_D2, tol));

    // Every frontier point sits inside the genie outer bound of its own input law with T = U.
    long outside = 0;
    const auto frontier = pareto_frontier(our, Objective::all());
    std::map<std::string, KhkcResult> cache;
    for (const auto& p : frontier) {
        const FamilyParams fp{p.params[0], p.params[1], p.params[2], p.params[3], p.params[4], 0.0};
        auto it = cache.find(fp.id());
        if (it == cache.end()) {
            const AuxScheme s = xor_input_scheme(fp.p_u, fp.p_sigma1, fp.p_sigma2, fp.p_theta1, fp.p_theta2);
            const JointDist ux = marginalize(s.input_joint(), {"U", "X1", "X2"});
            const JointDist tx({{"T", 2}, {"X1", 2}, {"X2", 2}}, ux.probs());
            it = cache.emplace(fp.id(), eval_outer_khkc(sh.ex4, make_outer_scheme(tx, {}))).first;
        }
        if (!it->second.admits(p.R1, p.R2, p.D1, p.D2, 1e-6, 1e-6)) ++outside;
    }
    c.expect("inner frontier inside khkc outer", outside == 0,
             std::to_string(outside) + " of " + std::to_string(frontier.size()) + " outside");
}

void criterion_example4_outer(Ctx& c, Shared& sh) {
    OuterSweepGrid grid;
    grid.threads = sh.opt.threads;
    grid.d2 = linspace(0.0, 0.3, 31);
    const auto pts = sweep_example4_outer(grid, sh.opt.example4);
    bool ordered = true;
    bool mono = true;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const auto& p = pts[i];
        if (p.our_feasible && (!p.khkc_feasible || p.our_rate > p.khkc_rate + 1e-12)) ordered = false;
        if (i > 0) {
            const auto& q = pts[i - 1];
            if ((q.our_feasible && (!p.our_feasible || p.our_rate < q.our_rate - 1e-12)) ||
                (q.khkc_feasible && (!p.khkc_feasible || p.khkc_rate < q.khkc_rate - 1e-12)))
                mono = false;
        }
    }
    c.expect("our curve <= khkc curve", ordered);
    c.expect("curves nondecreasing in D2", mono);
    const auto at = [&](double d) {
        for (const auto& p : pts)
            if (std::abs(p.D2 - d) <= 1e-12) return p;
        throw InternalError("outer sweep grid lacks D2 = " + fmt(d));
    };
    const SymmetricPoint z = at(0.0);
    c.expect("(R=0,D2=0) feasible under khkc", z.khkc_feasible);
    c.expect("(R=0,D2=0) infeasible under our", !z.our_feasible);
    const SymmetricPoint e = at(0.3);
    c.expect("curves coincide at D2=0.3", e.our_feasible && e.khkc_feasible && std::abs(e.our_rate - e.khkc_rate) <= 1e-9,
             "our " + fmt(e.our_rate) + ", khkc " + fmt(e.khkc_rate));

    // Generic tensor path: same anchor, and closed form bounds it from above.
    Rng g(31);
    long anchor_bad = 0;
    double excess = -INFINITY;
    const OuterOptions pc{true};
    for (int i = 0; i < 40; ++i) {
        const int nt = 1 + i % 4;
        std::uniform_real_distribution<double> u(0.0, 1.0);
        std::vector<double> kappa(static_cast<std::size_t>(nt));
        std::vector<double> pi1(kappa.size());
        std::vector<double> pi2(kappa.size());
        for (std::size_t t = 0; t < kappa.size(); ++t) {
            kappa[t] = u(g) + 0.05;
            pi1[t] = u(g);
            pi2[t] = u(g);
        }
        double ks = 0.0;
        for (double k : kappa) ks += k;
        for (double& k : kappa) k /= ks;
        const OuterScheme s = binary_product_scheme(kappa, pi1, pi2);
        const OuterResult our = eval_outer_our(sh.ex4, s, 0.5, 0.0, pc);
        const KhkcResult kh = eval_outer_khkc(sh.ex4, s, pc);
        if (our.feasible || !kh.admits(0.0, 0.0, 0.5, 0.0)) ++anchor_bad;
        const ClosedFormBounds cf = example4_outer_closed_form(alpha_of(kappa, pi1, pi2), 0.0, sh.opt.example4);
        excess = std::max({excess, our.polygon.r1 - cf.r1_max, our.polygon.r2 - cf.r2_max,
                           our.polygon.sum12[1] - cf.rsum_max, our.link[1] - cf.link_bound,
                           our.cooperative[1] - cf.cooperative_bound});
    }
    c.expect("generic path: (0,0,D2=0) khkc-only", anchor_bad == 0, std::to_string(anchor_bad) + " schemes disagree");
    c.expect("generic <= closed form", excess <= 1e-9, "max excess " + fmt(excess, 3));
}

void criterion_properties(Ctx& c, Shared& sh) {
    Rng g(2024);
    // prob-core on random joints.
    {
        double chain_err = 0.0;
        double oracle = 0.0;
        long dpi_bad = 0;
        std::uniform_int_distribution<int> sz(1, 4);
        for (int i = 0; i < 200; ++i) {
            const JointDist j = random_joint(g, {{"A", sz(g)}, {"B", sz(g)}, {"C", sz(g)}, {"D", sz(g)}});
            chain_err = std::max(chain_err, std::abs(entropy(j, {"A", "B", "C"}) -
                                             (entropy(j, {"A"}) + entropy(j, {"B"}, {"A"}) + entropy(j, {"C"}, {"A", "B"}))));
            oracle = std::max(oracle, std::abs(mutual_info(j, {"A"}, {"B", "C"}, {"D"}) -
                                               oracle_mi(j, {"A"}, {"B", "C"}, {"D"})));
            oracle = std::max(oracle, std::abs(entropy(j, {"B", "D"}) - oracle_entropy(j, {"B", "D"})));
            InfoTable t(j);
            oracle = std::max(oracle, std::abs(t.I({"A", "C"}, {"D"}, {"B"}) - oracle_mi(j, {"A", "C"}, {"D"}, {"B"})));
            // X -> Y -> Z built by chaining random kernels.
            JointDist m = random_joint(g, {{"X", sz(g)}});
            m = chain(m, random_kernel(g, {{"X", m.alphabet("X")}}, {"Y", sz(g)}));
            m = chain(m, random_kernel(g, {{"Y", m.alphabet("Y")}}, {"Z", sz(g)}));
            if (mutual_info(m, {"X"}, {"Z"}) > mutual_info(m, {"X"}, {"Y"}) + 1e-12) ++dpi_bad;
        }
        c.expect("chain rule (200 joints)", chain_err <= 1e-10, "max error " + fmt(chain_err, 3));
        c.expect("oracle equivalence (200 joints)", oracle <= 1e-10, "max error " + fmt(oracle, 3));
        c.expect("data processing (200 chains)", dpi_bad == 0, std::to_string(dpi_bad) + " violations");
    }
    // Estimator optimality.
    {
        const JointDist j = random_joint(g, {{"O1", 3}, {"O2", 2}, {"T", 3}});
        DistortionFn d;
        d.table.resize(3, 3);
        std::uniform_real_distribution<double> cost(0.0, 1.0);
        for (Eigen::Index i = 0; i < d.table.size(); ++i) d.table.data()[i] = cost(g);
        const double best = optimal_distortion(j, {"O1", "O2"}, "T", d);
        std::uniform_int_distribution<int> pick(0, 2);
        long beaten = 0;
        for (int i = 0; i < 500; ++i) {
            EstimatorMap m{{{"O1", 3}, {"O2", 2}}, std::vector<int>(6), 3};
            for (auto& v : m.table) v = pick(g);
            if (expected_distortion(j, m, "T", d) < best - 1e-12) ++beaten;
        }
        c.expect("estimator beats 500 random maps", beaten == 0, std::to_string(beaten) + " maps did better");
        c.near("estimator matches oracle minimum", best, oracle_optimal_distortion(j, {"O1", "O2"}, "T", d), 1e-12);
    }
    // Inclusion of the awk region in our-com on Example 4.
    {
        long feasible = 0;
        long bad = 0;
        std::bernoulli_distribution coin(0.5);
        for (int i = 0; i < 100; ++i) {
            AuxScheme s = xor_input_scheme(0, 0, 0, 0, 0);
            s.id = "random-awk";
            s.p_u = random_kernel(g, {}, {"U", 2});
            s.p_u1 = random_kernel(g, {{"U", 2}}, {"U1", 2});
            s.p_u2 = random_kernel(g, {{"U", 2}}, {"U2", 2});
            s.p_x1 = random_kernel(g, {{"U", 2}, {"U1", 2}}, {"X1", 2});
            s.p_x2 = random_kernel(g, {{"U", 2}, {"U2", 2}}, {"X2", 2});
            s.comp1 = coin(g) ? random_kernel(g, {{"X1", 2}, {"Z1", 2}}, {"V1", 2}) : trivial_compression(kAwkCompression1);
            s.comp2 = coin(g) ? random_kernel(g, {{"X2", 2}, {"Z2", 4}}, {"V2", 2}) : trivial_compression(kAwkCompression2);
            const InnerResult a = eval_inner_awk(sh.ex4, s);
            const InnerResult o = eval_inner_our(sh.ex4, awk_to_our_com(s));
            if (!a.polygon.feasible) continue;
            ++feasible;
            if (!o.polygon.feasible || !polygon_contains(o.polygon, a.polygon, 1e-9) ||
                std::abs(o.d1 - a.d1) > 1e-12 || std::abs(o.d2 - a.d2) > 1e-12)
                ++bad;
        }
        c.expect("awk -> our-com inclusion (100 schemes)", feasible >= 10 && bad == 0,
                 std::to_string(feasible) + " feasible, " + std::to_string(bad) + " violations");
    }
    // Our outer bound inside khkc, pointwise over the outer grid.
    {
        const auto pis = linspace(0.0, 1.0, 5);
        const auto ds = linspace(0.0, 0.3, 4);
        std::vector<OuterScheme> schemes;
        for (double a : pis)
            for (double b : pis)
                for (double cc : pis)
                    for (double d : pis) schemes.push_back(binary_product_scheme({0.5, 0.5}, {a, b}, {cc, d}));
        for (int i = 0; i < 20; ++i) schemes.push_back(random_outer_scheme(g, outer_cardinality_cap(sh.ex4)));
        long violations = 0;
        long gaps = 0;
        long checked = 0;
        for (const auto& s : schemes) {
            const KhkcResult kh = eval_outer_khkc(sh.ex4, s);
            for (double D1 : ds)
                for (double D2 : ds) {
                    const OuterResult our = eval_outer_our(sh.ex4, s, D1, D2);
                    const double sum = our.polygon.sum_bound();
                    const double r1 = std::max(0.0, std::min(our.polygon.r1, sum));
                    const double r2 = std::max(0.0, std::min(our.polygon.r2, sum));
                    const bool k_ok = kh.admits(r1, std::max(0.0, std::min(r2, sum - r1)), D1, D2) &&
                                      kh.admits(std::max(0.0, std::min(r1, sum - r2)), r2, D1, D2);
                    ++checked;
                    if (our.feasible && !k_ok) ++violations;
                    if (!our.feasible && k_ok) ++gaps;
                }
        }
        c.expect("our outer feasible implies khkc feasible", violations == 0,
                 std::to_string(violations) + " of " + std::to_string(checked) + " grid points");
        c.expect("strict-gap witness exists", gaps > 0, std::to_string(gaps) + " khkc-only grid points");
    }
    // Composite function identity.
    {
        double worst = 0.0;
        for (double t : linspace(0.0, 1.0, 1001))
            worst = std::max(worst, std::abs(oracle_h(composite_omega(2.0 * t * (1.0 - t))) - oracle_h(t)));
        c.expect("h(w(2t(1-t))) = h(t) on 1001 points", worst <= 1e-12, "max error " + fmt(worst, 3));
    }
    // Monte-Carlo agreement.
    {
        const IsacChannel e1 = build_example(1);
        SimConfig a{e1, product_input(e1, 0.5, 0.5), 1, {"X1", "Z1"}, std::nullopt, 100'000, 101, sh.opt.threads};
        const SimResult ra = simulate(a);
        c.expect("example 1 simulation at 0", std::abs(ra.mean) <= 4.0 * ra.std_error,
                 "mean " + fmt(ra.mean) + " se " + fmt(ra.std_error));
        SimConfig b{sh.ex4, product_input(sh.ex4, 0.5, 0.5), 2, {"X2", "Z2"}, std::nullopt, 100'000, 202, sh.opt.threads};
        const SimResult rb = simulate(b);
        c.expect("example 4 constant estimate at 0.3", std::abs(rb.mean - kExample4ConstantEstimate) <= 4.0 * rb.std_error,
                 "mean " + fmt(rb.mean) + " se " + fmt(rb.std_error));
        long off = 0;
        std::uniform_real_distribution<double> u(0.05, 0.95);
        const std::vector<std::pair<int, VarList>> cases = {
            {2, {"X1", "Z1"}}, {3, {"X2", "Z2"}}, {4, {"X1", "Z1", "X2"}}, {2, {"X2"}}, {4, {"Y"}}};
        std::uint64_t seed = 303;
        for (const auto& [ex, obs] : cases) {
            const IsacChannel ch = ex == 4 ? sh.ex4 : build_example(ex);
            for (int user = 1; user <= 2; ++user) {
                SimConfig cfg{ch, product_input(ch, u(g), u(g)), user, obs, std::nullopt, 100'000, seed++, sh.opt.threads};
                const SimResult r = simulate(cfg);
                if (std::abs(r.mean - r.analytic) > 4.0 * r.std_error + 1e-15) ++off;
            }
        }
        c.expect("random pairs within 4 stderr", off == 0, std::to_string(off) + " of " + std::to_string(2 * cases.size()));
    }
}

struct Entry {
    CriterionInfo info;
    double budget_seconds;
    void (*run)(Ctx&, Shared&);
};

const std::vector<Entry>& entries() {
    static const std::vector<Entry> e = {
        {{1, "constants", "exact information constants"}, 1.0, criterion_constants},
        {{2, "rd", "rate-distortion solver"}, 10.0, criterion_rd},
        {{3, "example1", "example 1 private compression"}, 60.0, criterion_example1},
        {{4, "example2", "example 2 common compression"}, 60.0, criterion_example2},
        {{5, "example3", "example 3 outer distortion floors"}, 60.0, criterion_example3},
        {{6, "example4-inner", "example 4 inner sweeps"}, 300.0, criterion_example4_inner},
        {{7, "example4-outer", "example 4 outer curves"}, 60.0, criterion_example4_outer},
        {{8, "properties", "property suites"}, 300.0, criterion_properties},
    };
    return e;
}

bool selected(const Entry& e, const std::vector<std::string>& only) {
    if (only.empty()) return true;
    for (const auto& s : only)
        if (s == e.info.tag || s == std::to_string(e.info.id) || (s == "example4" && e.info.tag.rfind("example4", 0) == 0))
            return true;
    return false;
}

}  // namespace

bool CriterionResult::pass() const {
    return !checks.empty() && std::all_of(checks.begin(), checks.end(), [](const SubCheck& c) { return c.pass; });
}

const std::vector<CriterionInfo>& acceptance_criteria() {
    static const std::vector<CriterionInfo> v = [] {
        std::vector<CriterionInfo> out;
        for (const auto& e : entries()) out.push_back(e.info);
        return out;
    }();
    return v;
}

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt) {
    for (const auto& s : opt.only) {
        const bool known = s == "example4" || std::any_of(entries().begin(), entries().end(), [&](const Entry& e) {
                               return s == e.info.tag || s == std::to_string(e.info.id);
                           });
        if (!known) throw UsageError("unknown criterion selector '" + s + "'");
    }
    Shared sh{opt, build_example4(opt.example4)};
    std::vector<CriterionResult> out;
    for (const auto& e : entries()) {
        if (!selected(e, opt.only)) continue;
        CriterionResult r{e.info.id, e.info.tag, e.info.title, {}, 0.0};
        Ctx ctx(r);
        const auto t0 = std::chrono::steady_clock::now();
        try {
            e.run(ctx, sh);
        } catch (const std::exception& ex) {
            ctx.expect("completes without error", false, ex.what());
        }
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        ctx.expect("runtime budget", r.seconds <= e.budget_seconds,
                   fmt(r.seconds, 3) + " s of " + fmt(e.budget_seconds, 3) + " s");
        if (opt.on_result) opt.on_result(r);
        out.push_back(std::move(r));
    }
    return out;
}

void print_result(std::ostream& os, const CriterionResult& r, bool verbose) {
    char head[160];
    std::snprintf(head, sizeof head, "%s  [%d] %-15s %-36s %8.2f s", r.pass() ? "PASS" : "FAIL", r.id, r.tag.c_str(),
                  r.title.c_str(), r.seconds);
    os << head << '\n';
    for (const auto& c : r.checks)
        if (verbose || !c.pass)
            os << "        " << (c.pass ? "ok   " : "FAIL ") << c.name << (c.detail.empty() ? "" : ": " + c.detail)
               << '\n';
}

}  // namespace isac
