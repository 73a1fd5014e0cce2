#include "isac/outer.hpp"

#include "isac/detail/parallel.hpp"
#include "isac/errors.hpp"
#include "isac/estimator.hpp"
#include "isac/info.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace isac {

namespace {

constexpr double kInfoTol = 1e-9;
constexpr double kDistTol = 1e-6;
constexpr double kRoundOff = 1e-12;  // entropy differences carry about 1e-15 of noise

double h2(double p) { return binary_entropy(p); }

int bar(int user) { return user == 1 ? 2 : 1; }
std::string x_of(int user) { return "X" + std::to_string(user); }
std::string z_of(int user) { return "Z" + std::to_string(user); }

VarList with_pc(VarList v, const OuterOptions& opt) {
    if (opt.parallel_x2) v.push_back("Zpc");
    return v;
}

InfoTable outer_table(const IsacChannel& ch, const OuterScheme& s, const OuterOptions& opt) {
    s.validate(ch);
    VarList keep = {"Q", "T", "X1", "X2", "ST1", "ST2", "SR", "Y", "Z1", "Z2"};
    std::vector<CondKernel> extra;
    if (opt.parallel_x2) {
        const int n2 = ch.size_of("X2");
        extra.push_back(CondKernel::deterministic({{"X2", n2}}, {{"Zpc", n2}},
                                                  [](std::span<const int> g, std::span<int> o) { o[0] = g[0]; }));
        keep.push_back("Zpc");
    }
    return InfoTable(assemble_marginal(ch, s.input, extra, keep));
}

RatePolygon outer_polygon(InfoTable& info, const OuterOptions& opt, double& lhs, double& rhs) {
    const VarList obs = with_pc({"Y", "Z1", "Z2"}, opt);
    RatePolygon p;
    p.r1 = info.I({"X1"}, obs, {"SR", "X2", "T"});
    p.r2 = info.I({"X2"}, obs, {"SR", "X1", "T"});
    p.sum12 = {info.I({"X1", "X2"}, obs, {"SR", "T"}), info.I({"X1", "X2"}, {"Y"}, {"SR"})};
    lhs = info.I({"X1"}, {"X2"}, {"T"});
    rhs = info.I({"X1"}, {"X2"}, with_pc({"Z1", "Z2", "T"}, opt));
    p.slack = {{"balance", rhs - lhs}};
    p.constraints_hold = lhs <= rhs + kInfoTol;
    p.rates_nonnegative = true;
    p.feasible = p.constraints_hold;
    return p;
}

struct SensingTerms {
    std::array<double, 2> link{};
    std::array<double, 2> cooperative{};
};

SensingTerms sensing_terms(InfoTable& info, const OuterOptions& opt) {
    SensingTerms t;
    for (int k = 1; k <= 2; ++k) {
        const auto i = static_cast<std::size_t>(k - 1);
        t.link[i] = info.I({sensing_target(k), x_of(bar(k))}, with_pc({z_of(k)}, opt), {x_of(k), "Q"});
        t.cooperative[i] = info.I({sensing_target(k)}, with_pc({"Z1", "Z2"}, opt), {"X1", "X2", "Q"});
    }
    return t;
}

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = n == 1 ? a : a + (b - a) * i / (n - 1);
    return v;
}

}  // namespace

int outer_cardinality_cap(const IsacChannel& ch) { return ch.size_of("X1") * ch.size_of("X2") + 3; }

void OuterScheme::validate(const IsacChannel& ch) const {
    const auto& v = input.vars();
    if (v.size() != 4 || v[0].name != "Q" || v[1].name != "T" || v[2].name != "X1" || v[3].name != "X2")
        throw SchemaError("outer scheme must be a joint over (Q, T, X1, X2)");
    if (v[2].size != ch.size_of("X1") || v[3].size != ch.size_of("X2"))
        throw SchemaError("outer scheme input alphabets differ from the channel");
    const int nq = v[0].size;
    const int nt = v[1].size;
    if (nt > outer_cardinality_cap(ch))
        throw SchemaError("|T| = " + std::to_string(nt) + " exceeds the cap " + std::to_string(outer_cardinality_cap(ch)));
    if (nq > nt) throw SchemaError("|Q| exceeds |T|");
    if (static_cast<int>(q_of_t.size()) != nt) throw SchemaError("q_of_t must have one entry per symbol of T");
    const Eigen::Index block = input.stride(1);
    for (int q = 0; q < nq; ++q)
        for (int t = 0; t < nt; ++t) {
            if (q == q_of_t[static_cast<std::size_t>(t)]) continue;
            const Eigen::Index start = (static_cast<Eigen::Index>(q) * nt + t) * block;
            if (input.probs().segment(start, block).sum() > 0.0)
                throw SchemaError("Q is not a function of T in the outer scheme");
        }
}

OuterScheme make_outer_scheme(const JointDist& t_x1_x2, std::vector<int> q_of_t, std::string id) {
    const JointDist p = marginalize(t_x1_x2, {"T", "X1", "X2"});
    const int nt = p.alphabet("T");
    if (q_of_t.empty()) {
        q_of_t.resize(static_cast<std::size_t>(nt));
        std::iota(q_of_t.begin(), q_of_t.end(), 0);
    }
    if (static_cast<int>(q_of_t.size()) != nt) throw SchemaError("q_of_t must have one entry per symbol of T");
    int nq = 0;
    for (int q : q_of_t) {
        if (q < 0) throw SchemaError("q_of_t entries must be nonnegative");
        nq = std::max(nq, q + 1);
    }
    const Eigen::Index block = p.stride(0);
    Eigen::ArrayXd probs = Eigen::ArrayXd::Zero(static_cast<Eigen::Index>(nq) * p.size());
    for (int t = 0; t < nt; ++t) {
        const Eigen::Index q = q_of_t[static_cast<std::size_t>(t)];
        probs.segment((q * nt + t) * block, block) = p.probs().segment(t * block, block);
    }
    std::vector<Variable> vars = {{"Q", nq}};
    vars.insert(vars.end(), p.vars().begin(), p.vars().end());
    return OuterScheme{std::move(id), JointDist(std::move(vars), std::move(probs)), std::move(q_of_t)};
}

OuterScheme binary_product_scheme(const std::vector<double>& kappa, const std::vector<double>& pi1,
                                  const std::vector<double>& pi2, std::vector<int> q_of_t) {
    const std::size_t nt = kappa.size();
    if (nt == 0 || pi1.size() != nt || pi2.size() != nt)
        throw ArgumentError("binary_product_scheme: kappa, pi1 and pi2 must have equal nonzero length");
    Eigen::ArrayXd probs(static_cast<Eigen::Index>(nt * 4));
    for (std::size_t t = 0; t < nt; ++t) {
        for (double v : {kappa[t], pi1[t], pi2[t]})
            if (!(v >= 0.0 && v <= 1.0)) throw ArgumentError("binary_product_scheme: probabilities must lie in [0, 1]");
        const double a[2] = {pi1[t], 1.0 - pi1[t]};
        const double b[2] = {pi2[t], 1.0 - pi2[t]};
        for (int x1 = 0; x1 < 2; ++x1)
            for (int x2 = 0; x2 < 2; ++x2)
                probs[static_cast<Eigen::Index>(t * 4 + x1 * 2 + x2)] = kappa[t] * a[x1] * b[x2];
    }
    JointDist txx({{"T", static_cast<int>(nt)}, {"X1", 2}, {"X2", 2}}, std::move(probs));
    return make_outer_scheme(txx, std::move(q_of_t), "product");
}

double OuterResult::sensing_cap(int user) const {
    const auto i = static_cast<std::size_t>(user - 1);
    return std::min(link[i], cooperative[i]);
}

bool KhkcResult::admits(double R1, double R2, double D1, double D2, double tol, double dtol) const {
    return dependence_balance && polygon.contains(R1, R2, tol) && D1 >= d1_min - dtol && D2 >= d2_min - dtol;
}

RdProblem sensing_rd_problem(const IsacChannel& ch, int user) {
    const std::string st = sensing_target(user);
    RdProblem p{marginalize(ch.state, {st}), {st}, st, ch.distortion(user)};
    p.validate();
    return p;
}

OuterResult eval_outer_our(const IsacChannel& ch, const OuterScheme& s, double D1, double D2,
                           const OuterOptions& opt) {
    InfoTable info = outer_table(ch, s, opt);
    OuterResult r;
    r.polygon = outer_polygon(info, opt, r.balance_lhs, r.balance_rhs);
    r.dependence_balance = r.polygon.constraints_hold;
    const SensingTerms t = sensing_terms(info, opt);
    r.link = t.link;
    r.cooperative = t.cooperative;
    const double D[2] = {D1, D2};
    for (int k = 1; k <= 2; ++k) {
        const auto i = static_cast<std::size_t>(k - 1);
        r.f[i] = rd_function(sensing_rd_problem(ch, k), D[i]);
        r.sensing[i] = r.f[i] <= r.sensing_cap(k) + kInfoTol;
    }
    r.feasible = r.dependence_balance && r.sensing[0] && r.sensing[1];
    r.polygon.feasible = r.feasible;
    return r;
}

KhkcResult eval_outer_khkc(const IsacChannel& ch, const OuterScheme& s, const OuterOptions& opt) {
    InfoTable info = outer_table(ch, s, opt);
    KhkcResult r;
    double lhs = 0.0;
    double rhs = 0.0;
    r.polygon = outer_polygon(info, opt, lhs, rhs);
    r.dependence_balance = r.polygon.constraints_hold;
    const VarList genie = {"X1", "X2", "Z1", "Z2"};
    r.d1_min = optimal_distortion(info.marginal({"X1", "X2", "Z1", "Z2", "ST1"}), genie, "ST1", ch.d1);
    r.d2_min = optimal_distortion(info.marginal({"X1", "X2", "Z1", "Z2", "ST2"}), genie, "ST2", ch.d2);
    return r;
}

double outer_min_distortion(const IsacChannel& ch, const OuterScheme& s, int user, const OuterOptions& opt) {
    if (user != 1 && user != 2) throw ArgumentError("user must be 1 or 2");
    InfoTable info = outer_table(ch, s, opt);
    const SensingTerms t = sensing_terms(info, opt);
    const auto i = static_cast<std::size_t>(user - 1);
    double cap = std::min(t.link[i], t.cooperative[i]);
    if (cap < kRoundOff) cap = 0.0;
    return rd_min_distortion_for_rate(sensing_rd_problem(ch, user), cap);
}

double composite_omega(double t) {
    if (!(t >= 0.0 && t <= 1.0)) throw ArgumentError("composite_omega: argument outside [0, 1]");
    return (1.0 - std::sqrt(std::abs(1.0 - 2.0 * t))) / 2.0;
}

void AlphaParams::validate() const {
    if (!(a1 >= 0.0 && a1 <= 0.25) || !(a2 >= 0.0 && a2 <= 0.25))
        throw ArgumentError("alpha1 and alpha2 must lie in [0, 0.25]");
    if (!(a >= 0.0 && a <= 1.0)) throw ArgumentError("alpha must lie in [0, 1]");
}

double ClosedFormBounds::symmetric_rate() const { return std::min({r1_max, r2_max, rsum_max / 2.0}); }

AlphaParams alpha_of(const std::vector<double>& kappa, const std::vector<double>& pi1, const std::vector<double>& pi2) {
    if (pi1.size() != kappa.size() || pi2.size() != kappa.size()) throw ArgumentError("alpha_of: length mismatch");
    AlphaParams p{0.0, 0.0, 0.0};
    for (std::size_t t = 0; t < kappa.size(); ++t) {
        p.a1 += kappa[t] * pi1[t] * (1.0 - pi1[t]);
        p.a2 += kappa[t] * pi2[t] * (1.0 - pi2[t]);
        p.a += kappa[t] * pi1[t];
    }
    return p;
}

ClosedFormBounds example4_outer_closed_form(const AlphaParams& p, double D2, const Example4Constants& c) {
    p.validate();
    if (!(D2 >= 0.0 && D2 <= 1.0)) throw ArgumentError("D2 must lie in [0, 1]");
    ClosedFormBounds b;
    b.r1_max = h2(composite_omega(2.0 * p.a1));
    b.r2_max = h2(composite_omega(2.0 * p.a2));
    b.rsum_max = h2(c.p_s1 + (1.0 - 2.0 * c.p_s1) * p.a) + 1.0 - h2(c.p_s1) - h2(c.p_s2);
    b.link_bound = h2(c.p_b * (1.0 - p.a)) - (1.0 - p.a) * h2(c.p_b);
    b.cooperative_bound = h2(c.p_n);
    const double dmax = std::min(c.p_n, 1.0 - c.p_n);
    b.f = D2 < dmax ? h2(c.p_n) - h2(D2) : 0.0;
    b.sensing_slack = std::min(b.link_bound, b.cooperative_bound) - b.f;
    return b;
}

std::vector<SymmetricPoint> sweep_example4_outer(const OuterSweepGrid& grid, const Example4Constants& c) {
    if (grid.alpha_points < 2) throw ArgumentError("alpha_points must be at least 2");
    std::vector<double> d2 = grid.d2.empty() ? linspace(0.0, std::min(c.p_n, 1.0 - c.p_n), 31) : grid.d2;
    std::sort(d2.begin(), d2.end());
    const auto a_edge = linspace(0.0, 0.25, grid.alpha_points);
    const auto a_mean = linspace(0.0, 1.0, grid.alpha_points);

    // Genie distortion depends on the input law only through P(X1); Q = T is a single symbol here.
    const IsacChannel ch = build_example4(c);
    std::vector<double> genie(a_mean.size());
    for (std::size_t j = 0; j < a_mean.size(); ++j)
        genie[j] = eval_outer_khkc(ch, binary_product_scheme({1.0}, {a_mean[j]}, {0.5})).d2_min;

    std::vector<SymmetricPoint> out(d2.size());
    detail::parallel_for(d2.size(), grid.threads, [&](std::size_t i) {
        SymmetricPoint& pt = out[i];
        pt.D2 = d2[i];
        for (double a1 : a_edge)
            for (double a2 : a_edge)
                for (std::size_t j = 0; j < a_mean.size(); ++j) {
                    if (a_mean[j] < a1) continue;
                    const AlphaParams ap{a1, a2, a_mean[j]};
                    const ClosedFormBounds b = example4_outer_closed_form(ap, pt.D2, c);
                    const double r = b.symmetric_rate();
                    if (b.feasible() && (!pt.our_feasible || r > pt.our_rate)) {
                        pt.our_feasible = true;
                        pt.our_rate = r;
                        pt.our_argmax = ap;
                    }
                    if (pt.D2 >= genie[j] - kDistTol && (!pt.khkc_feasible || r > pt.khkc_rate)) {
                        pt.khkc_feasible = true;
                        pt.khkc_rate = r;
                    }
                }
    });
    return out;
}

}  // namespace isac
