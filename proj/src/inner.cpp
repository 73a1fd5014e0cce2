#include "isac/inner.hpp"

#include "isac/detail/parallel.hpp"
#include "isac/errors.hpp"
#include "isac/estimator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <tuple>

namespace isac {

namespace {

VarList cat(std::initializer_list<VarList> parts) {
    VarList out;
    for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
    return out;
}

std::string user_var(const char* base, int k) { return base + std::to_string(k); }

JointDist kernel_as_joint(const CondKernel& k) {
    if (!k.given().empty()) throw SchemaError("P_U must not have conditioning variables");
    return JointDist(k.out(), k.probs());
}

CondKernel bernoulli_kernel(std::vector<Variable> given, const std::string& out,
                            const std::function<double(std::span<const int>)>& p1) {
    return CondKernel::tabulate(std::move(given), {{out, 2}}, [&](std::span<const int> g, std::span<const int> o) {
        const double p = p1(g);
        return o[0] ? p : 1.0 - p;
    });
}

void require_outputs(const CondKernel& k, const VarList& names, const char* what) {
    if (k.out().size() != names.size()) throw SchemaError(std::string(what) + " has unexpected outputs");
    for (std::size_t i = 0; i < names.size(); ++i)
        if (k.out()[i].name != names[i]) throw SchemaError(std::string(what) + " must produce " + names[i]);
}

double min_of(const std::vector<double>& v) { return *std::min_element(v.begin(), v.end()); }

void finish_polygon(RatePolygon& p) {
    p.constraints_hold = std::all_of(p.slack.begin(), p.slack.end(),
                                     [](const auto& s) { return s.second >= -kConstraintTolerance; });
    p.rates_nonnegative = p.r1 >= -kConstraintTolerance && p.r2 >= -kConstraintTolerance &&
                          p.sum_bound() >= -kConstraintTolerance;
    p.feasible = p.constraints_hold && p.rates_nonnegative;
}

const VarList kCore = {"U", "U1", "U2", "X1", "X2", "ST1", "ST2", "SR", "Y", "Z1", "Z2"};

}  // namespace

std::string to_string(InnerKind k) {
    switch (k) {
        case InnerKind::Our: return "our";
        case InnerKind::OurCom: return "our-com";
        case InnerKind::Awk: return "awk";
        case InnerKind::Kobayashi: return "kobayashi";
    }
    return "?";
}

InnerKind parse_inner_kind(const std::string& s) {
    if (s == "our") return InnerKind::Our;
    if (s == "our-com") return InnerKind::OurCom;
    if (s == "awk") return InnerKind::Awk;
    if (s == "kobayashi") return InnerKind::Kobayashi;
    throw UsageError("unknown inner scheme '" + s + "'");
}

JointDist AuxScheme::input_joint() const {
    JointDist j = kernel_as_joint(p_u);
    j = chain(j, p_u1);
    j = chain(j, p_u2);
    j = chain(j, p_x1);
    return chain(j, p_x2);
}

void AuxScheme::validate(const IsacChannel& ch) const {
    require_outputs(p_u, {"U"}, "P_U");
    require_outputs(p_u1, {"U1"}, "P_U1|U");
    require_outputs(p_u2, {"U2"}, "P_U2|U");
    require_outputs(p_x1, {"X1"}, "P_X1|U,U1");
    require_outputs(p_x2, {"X2"}, "P_X2|U,U2");
    if (p_x1.out()[0].size != ch.size_of("X1") || p_x2.out()[0].size != ch.size_of("X2"))
        throw SchemaError("scheme input alphabets do not match the channel");
    const auto check_given = [](const CondKernel& k, const VarList& allowed, const char* what) {
        for (const auto& v : k.given())
            if (std::find(allowed.begin(), allowed.end(), v.name) == allowed.end())
                throw SchemaError(std::string(what) + " may not depend on " + v.name);
    };
    check_given(p_u1, {"U"}, "P_U1|U");
    check_given(p_u2, {"U"}, "P_U2|U");
    check_given(p_x1, {"U", "U1"}, "P_X1|U,U1");
    check_given(p_x2, {"U", "U2"}, "P_X2|U,U2");
    check_given(comp1, {"U", "U1", "U2", "X1", "Z1"}, "first compression kernel");
    check_given(comp2, {"U", "U1", "U2", "X2", "Z2"}, "second compression kernel");
}

CondKernel trivial_compression(const VarList& outs) {
    std::vector<Variable> vars;
    for (const auto& n : outs) vars.push_back({n, 1});
    return CondKernel({}, std::move(vars), Eigen::ArrayXd::Ones(1));
}

AuxScheme xor_input_scheme(double p_u, double p_sigma1, double p_sigma2, double p_theta1, double p_theta2) {
    for (double p : {p_u, p_sigma1, p_sigma2, p_theta1, p_theta2})
        if (!(p >= 0.0 && p <= 1.0)) throw ArgumentError("auxiliary probabilities must lie in [0, 1]");
    AuxScheme s;
    s.p_u = CondKernel({}, {{"U", 2}}, (Eigen::ArrayXd(2) << 1.0 - p_u, p_u).finished());
    s.p_u1 = bernoulli_kernel({{"U", 2}}, "U1", [&](std::span<const int> g) { return g[0] ? 1.0 - p_sigma1 : p_sigma1; });
    s.p_u2 = bernoulli_kernel({{"U", 2}}, "U2", [&](std::span<const int> g) { return g[0] ? 1.0 - p_sigma2 : p_sigma2; });
    s.p_x1 = bernoulli_kernel({{"U", 2}, {"U1", 2}}, "X1",
                              [&](std::span<const int> g) { return g[1] ? 1.0 - p_theta1 : p_theta1; });
    s.p_x2 = bernoulli_kernel({{"U", 2}, {"U2", 2}}, "X2",
                              [&](std::span<const int> g) { return g[1] ? 1.0 - p_theta2 : p_theta2; });
    s.comp1 = trivial_compression(kOurCompression1);
    s.comp2 = trivial_compression(kOurCompression2);
    return s;
}

double RatePolygon::sum_bound() const { return sum12.empty() ? INFINITY : min_of(sum12); }
double RatePolygon::r1_eff() const { return std::min(r1, sum_bound()); }
double RatePolygon::r2_eff() const { return std::min(r2, sum_bound()); }

bool RatePolygon::contains(double R1, double R2, double tol) const {
    return R1 >= -tol && R2 >= -tol && R1 <= r1 + tol && R2 <= r2 + tol && R1 + R2 <= sum_bound() + tol;
}

bool polygon_contains(const RatePolygon& outer, const RatePolygon& inner, double tol) {
    // Both sets are polymatroid-like pentagons; containment reduces to the corner points.
    const double s = inner.sum_bound();
    const double a = std::max(0.0, std::min(inner.r1, s));
    const double b = std::max(0.0, std::min(inner.r2, s));
    if (a <= tol && b <= tol) return true;
    const std::vector<std::pair<double, double>> corners = {
        {a, std::max(0.0, std::min(b, s - a))}, {std::max(0.0, std::min(a, s - b)), b}, {a, 0.0}, {0.0, b}};
    for (const auto& [x, y] : corners)
        if (!outer.contains(x, y, tol)) return false;
    return true;
}

SchemeInfo::SchemeInfo(const JointDist& full, InfoTable* base) : full_(full), base_(base) {}
SchemeInfo::SchemeInfo(InfoTable full, InfoTable* base) : full_(std::move(full)), base_(base) {}

double SchemeInfo::I(const VarList& a, const VarList& b, const VarList& given) {
    if (base_) {
        const auto is_compressed = [](const std::string& n) { return !n.empty() && n[0] == 'V'; };
        const bool any = std::any_of(a.begin(), a.end(), is_compressed) ||
                         std::any_of(b.begin(), b.end(), is_compressed) ||
                         std::any_of(given.begin(), given.end(), is_compressed);
        if (!any) return base_->I(a, b, given);
    }
    return full_.I(a, b, given);
}

InnerResult eval_our_from_joint(SchemeInfo& info, const IsacChannel& ch) {
    const VarList u = {"U", "U1", "U2"};
    const VarList yr = {"Y", "SR"};
    const VarList x = {"X1", "X2"};
    const VarList vc = {"V1c", "V2c"};

    const double p1 = info.I({"V1p"}, {"Z1"}, cat({u, x, yr, vc}));
    const double p2 = info.I({"V2p"}, {"Z2"}, cat({u, x, yr, vc, {"V1p"}}));
    const double branch2 = info.I(x, cat({yr, vc}), u) - p1 - p2;

    double common[3] = {0, 0, 0};
    double branch1[3] = {0, 0, 0};
    for (int k = 1; k <= 2; ++k) {
        const int o = 3 - k;
        const std::string uk = user_var("U", k), ub = user_var("U", o);
        const std::string xk = user_var("X", k), xb = user_var("X", o);
        const std::string zk = user_var("Z", k), zb = user_var("Z", o);
        const std::string vkc = user_var("V", k) + "c", vkp = user_var("V", k) + "p", vbp = user_var("V", o) + "p";
        common[k] = info.I({uk}, {zb}, {"U", ub, xb}) - info.I({vkc}, {xk, zk}, cat({u, {xb, zb}}));
        branch1[k] = info.I({xk}, cat({{xb}, yr, vc, {vbp}}), u) - info.I({vkp}, {zk}, cat({u, x, yr, vc, {vbp}}));
    }

    RatePolygon poly;
    poly.r1 = common[1] + std::min(branch1[1], branch2);
    poly.r2 = common[2] + std::min(branch1[2], branch2);
    const double sum_a = common[1] + common[2] + branch2;
    const double sum_b = info.I(x, yr) - info.I({"V1c"}, {"Z1"}, cat({u, x, yr})) -
                         info.I({"V2c"}, {"Z2"}, cat({u, x, yr, {"V1c"}})) - p1 - p2;
    poly.sum12 = {sum_a, sum_b};
    poly.slack = {{"common1", common[1]}, {"common2", common[2]}, {"private1", branch1[1]},
                  {"private2", branch1[2]}, {"joint", branch2},     {"total", sum_b}};
    finish_polygon(poly);

    InnerResult r;
    r.polygon = poly;
    r.d1 = optimal_distortion(info.marginal({"X1", "U2", "Z1", "V2c", "ST1"}), {"X1", "U2", "Z1", "V2c"}, "ST1", ch.d1);
    r.d2 = optimal_distortion(info.marginal({"X2", "U1", "Z2", "V1c", "ST2"}), {"X2", "U1", "Z2", "V1c"}, "ST2", ch.d2);
    return r;
}

InnerResult eval_awk_from_joint(SchemeInfo& info, const IsacChannel& ch) {
    const VarList u = {"U", "U1", "U2"};
    const VarList yr = {"Y", "SR"};
    const VarList x = {"X1", "X2"};
    const VarList xyr = cat({x, yr});

    double c[3];
    double ab[3];
    c[1] = info.I({"V1"}, {"X1", "Z1"}, u);
    c[2] = info.I({"V2"}, {"X2", "Z2"}, u);
    ab[1] = info.I({"V1"}, xyr, u) + info.I({"V2"}, cat({xyr, {"V1"}}), u);
    ab[2] = info.I({"V2"}, xyr, u) + info.I({"V1"}, cat({xyr, {"V2"}}), u);
    const double cs = ab[1];
    const double joint_u = info.I(x, yr, {"U"});

    RatePolygon poly;
    double common[3] = {0, 0, 0};
    double single[3] = {0, 0, 0};
    for (int k = 1; k <= 2; ++k) {
        const int o = 3 - k;
        const std::string uk = user_var("U", k), ub = user_var("U", o);
        const std::string xk = user_var("X", k), xb = user_var("X", o);
        const std::string zb = user_var("Z", o);
        const std::string vk = user_var("V", k);
        common[k] = info.I({uk}, {xb, zb}, {"U", ub}) + info.I({vk}, {xb, zb}, u) - c[k];
        single[k] = info.I({xk}, yr, {"U", xb});
        const double b1 = single[k] + ab[k] - c[k];
        const double b2 = info.I(x, yr, {"U", uk}) + ab[k] - c[o];
        const double b3 = joint_u + ab[k] - c[k] - c[o];
        const double b4 = info.I({xk}, cat({yr, {"V1", "V2"}}), cat({u, {xb}}));
        (k == 1 ? poly.r1 : poly.r2) = common[k] + std::min({b1, b2, b3, b4});
    }
    const double sum_a = common[1] + common[2] +
                         std::min({info.I(x, yr, {"U", "U2"}) + cs - c[1], info.I(x, yr, {"U", "U1"}) + cs - c[2],
                                   joint_u + cs - c[1] - c[2], info.I(x, cat({yr, {"V1", "V2"}}), u)});
    const double sum_b = info.I(x, yr) + cs - c[1] - c[2];
    poly.sum12 = {sum_a, sum_b};
    poly.slack = {{"common1", common[1]},
                  {"common2", common[2]},
                  {"relay1", single[1] + cs - c[1]},
                  {"relay2", single[2] + cs - c[2]},
                  {"joint", joint_u + cs - c[1] - c[2]}};
    finish_polygon(poly);

    InnerResult r;
    r.polygon = poly;
    r.d1 = optimal_distortion(info.marginal({"X1", "U2", "Z1", "V2", "ST1"}), {"X1", "U2", "Z1", "V2"}, "ST1", ch.d1);
    r.d2 = optimal_distortion(info.marginal({"X2", "U1", "Z2", "V1", "ST2"}), {"X2", "U1", "Z2", "V1"}, "ST2", ch.d2);
    return r;
}

JointDist assemble_scheme(const IsacChannel& ch, const AuxScheme& s) {
    s.validate(ch);
    VarList keep = kCore;
    for (const auto& v : s.comp1.out()) keep.push_back(v.name);
    for (const auto& v : s.comp2.out()) keep.push_back(v.name);
    return assemble_marginal(ch, s.input_joint(), {s.comp1, s.comp2}, keep);
}

InnerResult eval_inner_our(const IsacChannel& ch, const AuxScheme& s) {
    require_outputs(s.comp1, kOurCompression1, "first compression kernel");
    require_outputs(s.comp2, kOurCompression2, "second compression kernel");
    SchemeInfo info(assemble_scheme(ch, s));
    return eval_our_from_joint(info, ch);
}

InnerResult eval_inner_awk(const IsacChannel& ch, const AuxScheme& s) {
    require_outputs(s.comp1, kAwkCompression1, "first compression kernel");
    require_outputs(s.comp2, kAwkCompression2, "second compression kernel");
    SchemeInfo info(assemble_scheme(ch, s));
    return eval_awk_from_joint(info, ch);
}

InnerResult eval_inner_kobayashi(const IsacChannel& ch, const AuxScheme& s) {
    AuxScheme t = s;
    t.comp1 = trivial_compression(kAwkCompression1);
    t.comp2 = trivial_compression(kAwkCompression2);
    return eval_inner_awk(ch, t);
}

InnerResult eval_inner(InnerKind kind, const IsacChannel& ch, const AuxScheme& s) {
    switch (kind) {
        case InnerKind::Our:
        case InnerKind::OurCom: return eval_inner_our(ch, s);
        case InnerKind::Awk: return eval_inner_awk(ch, s);
        case InnerKind::Kobayashi: return eval_inner_kobayashi(ch, s);
    }
    throw InternalError("unhandled inner scheme");
}

AuxScheme awk_to_our_com(const AuxScheme& awk) {
    require_outputs(awk.comp1, kAwkCompression1, "first compression kernel");
    require_outputs(awk.comp2, kAwkCompression2, "second compression kernel");
    AuxScheme s = awk;
    s.id = awk.id.empty() ? "" : awk.id + ":mapped";
    s.comp1 = CondKernel(awk.comp1.given(), {{"V1c", awk.comp1.out()[0].size}, {"V1p", 1}}, awk.comp1.probs());
    s.comp2 = CondKernel(awk.comp2.given(), {{"V2c", awk.comp2.out()[0].size}, {"V2p", 1}}, awk.comp2.probs());
    return s;
}

std::string FamilyParams::id() const {
    char buf[160];
    std::snprintf(buf, sizeof buf, "pU=%.6g;pSigma1=%.6g;pSigma2=%.6g;pTheta1=%.6g;pTheta2=%.6g;pE=%.6g", p_u,
                  p_sigma1, p_sigma2, p_theta1, p_theta2, p_e);
    return buf;
}

namespace {

// Compression with one informative output (index `active` among `outs`) quantizing bit(given).
CondKernel quantized_compression(std::vector<Variable> given, const VarList& outs, std::size_t active,
                                 const std::function<int(std::span<const int>)>& bit, double q, double p_e) {
    if (!(p_e >= 0.0 && p_e <= 0.5)) throw ArgumentError("quantizer crossover must lie in [0, 0.5]");
    if (p_e > std::min(q, 1.0 - q) + 1e-12)
        throw ArgumentError("quantizer crossover exceeds the smaller probability of the compressed bit");
    const double denom = 1.0 - 2.0 * p_e;
    const double v1 = denom > 0.0 ? std::clamp((q - p_e) / denom, 0.0, 1.0) : 0.0;
    std::vector<Variable> out;
    for (std::size_t i = 0; i < outs.size(); ++i) out.push_back({outs[i], i == active ? 2 : 1});
    return CondKernel::tabulate(std::move(given), std::move(out), [&](std::span<const int> g, std::span<const int> o) {
        const int w = bit(g);
        const int v = o[active];
        const double pw = w ? q : 1.0 - q;
        if (!(pw > 0.0)) return v == w ? 1.0 : 0.0;
        const double pv = v ? v1 : 1.0 - v1;
        const double pe = (v ^ w) ? p_e : 1.0 - p_e;
        return pv * pe / pw;
    });
}

CondKernel exact_compression(std::vector<Variable> given, const VarList& outs, std::size_t active,
                             const std::function<int(std::span<const int>)>& bit) {
    std::vector<Variable> out;
    for (std::size_t i = 0; i < outs.size(); ++i) out.push_back({outs[i], i == active ? 2 : 1});
    return CondKernel::deterministic(std::move(given), std::move(out), [&](std::span<const int> g, std::span<int> o) {
        for (auto& v : o) v = 0;
        o[active] = bit(g);
    });
}

struct FamilyLayout {
    std::vector<Variable> given1;
    std::function<int(std::span<const int>)> bit1;  // compressed echo bit of user 1
    VarList outs1;
    std::size_t active1 = 0;
    bool quantize = true;
    VarList outs2;
    bool exact2 = false;  // user 2 forwards its echo bit exactly
    std::vector<Variable> given2;
    std::function<int(std::span<const int>)> bit2;
};

FamilyLayout family_layout(const IsacChannel& ch, int example, InnerKind kind) {
    if (example == 3) throw UsageError("no inner-bound scheme family is defined for example 3");
    if (example < 1 || example > 4) throw ArgumentError("example must be 1, 2, 3 or 4");
    FamilyLayout f;
    const bool awk = kind == InnerKind::Awk || kind == InnerKind::Kobayashi;
    f.outs1 = awk ? kAwkCompression1 : kOurCompression1;
    f.outs2 = awk ? kAwkCompression2 : kOurCompression2;
    f.quantize = kind != InnerKind::Kobayashi;
    f.given1 = {{"X1", 2}, {"Z1", ch.size_of("Z1")}};
    switch (example) {
        case 1:
            f.bit1 = [](std::span<const int> g) { return g[0] ^ g[1]; };  // S2 = Z1 xor X1
            f.active1 = (kind == InnerKind::Our) ? 1 : 0;
            break;
        case 2:
            f.bit1 = [](std::span<const int> g) { return (g[1] >> 1) ^ g[0]; };  // S1 from the first echo bit
            f.active1 = 0;
            break;
        case 4:
            f.bit1 = [](std::span<const int> g) { return g[0] ^ g[1]; };  // N = Z1 xor X1
            f.active1 = 0;
            if (kind == InnerKind::Our) {
                f.exact2 = true;
                f.given2 = {{"X2", 2}, {"Z2", ch.size_of("Z2")}};
                f.bit2 = [](std::span<const int> g) { return (g[1] & 1) ^ g[0]; };  // S1 = second echo bit xor X2
            }
            break;
    }
    return f;
}

double echo_bit_probability(const JointDist& base, const FamilyLayout& f) {
    const JointDist m = marginalize(base, {"X1", "Z1"});
    const int nz = m.alphabet("Z1");
    double q = 0.0;
    int g[2];
    for (g[0] = 0; g[0] < 2; ++g[0])
        for (g[1] = 0; g[1] < nz; ++g[1])
            if (f.bit1(std::span<const int>(g, 2))) q += m.probs()[g[0] * nz + g[1]];
    return std::clamp(q, 0.0, 1.0);
}

std::pair<CondKernel, CondKernel> family_compressions(const FamilyLayout& f, double q, double p_e) {
    CondKernel c1 = f.quantize ? quantized_compression(f.given1, f.outs1, f.active1, f.bit1, q, p_e)
                               : trivial_compression(f.outs1);
    CondKernel c2 = f.exact2 ? exact_compression(f.given2, f.outs2, 1, f.bit2) : trivial_compression(f.outs2);
    return {std::move(c1), std::move(c2)};
}

VarList base_keep() { return kCore; }

}  // namespace

CondKernel quantizer_kernel(std::vector<Variable> given, const std::string& out,
                            const std::function<int(std::span<const int>)>& bit, double q, double p_e) {
    return quantized_compression(std::move(given), {out}, 0, bit, q, p_e);
}

AuxScheme family_scheme(const IsacChannel& ch, int example, InnerKind kind, const FamilyParams& p) {
    const FamilyLayout f = family_layout(ch, example, kind);
    AuxScheme s = xor_input_scheme(p.p_u, p.p_sigma1, p.p_sigma2, p.p_theta1, p.p_theta2);
    s.id = to_string(kind) + ":" + p.id();
    const JointDist base = assemble_marginal(ch, s.input_joint(), {}, {"X1", "Z1"});
    auto [c1, c2] = family_compressions(f, echo_bit_probability(base, f), p.p_e);
    s.comp1 = std::move(c1);
    s.comp2 = std::move(c2);
    return s;
}

namespace {

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> v;
    if (n <= 1) return {a};
    for (int i = 0; i < n; ++i) v.push_back(a + (b - a) * i / (n - 1));
    return v;
}

struct TupleTask {
    FamilyParams p;               // p_e ignored
    std::vector<double> pe_grid;  // empty: use the default grid
};

struct TupleResult {
    std::vector<RegionPoint> points;
    long evaluations = 0;
    double min_feasible_pe = INFINITY;
    double pe_step = 0.0;
};

TupleResult evaluate_tuple(const IsacChannel& ch, const FamilyLayout& f, InnerKind kind, const TupleTask& task,
                           int pe_points) {
    TupleResult out;
    const FamilyParams& p = task.p;
    const AuxScheme s = xor_input_scheme(p.p_u, p.p_sigma1, p.p_sigma2, p.p_theta1, p.p_theta2);
    const JointDist base = assemble_marginal(ch, s.input_joint(), {}, base_keep());
    InfoTable base_table(base);
    const double q = echo_bit_probability(base, f);
    const double pe_max = std::min(q, 1.0 - q);
    std::vector<double> grid = task.pe_grid;
    if (grid.empty()) grid = f.quantize ? linspace(0.0, pe_max, pe_points) : std::vector<double>{0.0};
    out.pe_step = pe_max / (pe_points - 1);
    const bool awk = kind == InnerKind::Awk || kind == InnerKind::Kobayashi;
    for (double pe : grid) {
        if (pe < 0.0 || pe > pe_max) continue;
        auto [c1, c2] = family_compressions(f, q, pe);
        SchemeInfo info(base_table.extend(c1).extend(c2), &base_table);
        const InnerResult r = awk ? eval_awk_from_joint(info, ch) : eval_our_from_joint(info, ch);
        ++out.evaluations;
        if (!r.polygon.feasible) continue;
        FamilyParams fp = p;
        fp.p_e = f.quantize ? pe : 0.0;
        RegionPoint pt;
        pt.R1 = std::max(0.0, r.polygon.r1_eff());
        pt.R2 = std::max(0.0, r.polygon.r2_eff());
        pt.D1 = r.d1;
        pt.D2 = r.d2;
        pt.scheme_id = to_string(kind) + ":" + fp.id();
        pt.params = fp.as_vector();
        out.min_feasible_pe = std::min(out.min_feasible_pe, pe);
        // Corner points of the polygon: both single-user extremes and the sum-rate corners.
        const double sum = r.polygon.sum_bound();
        std::vector<std::pair<double, double>> corners = {{pt.R1, 0.0}, {0.0, pt.R2}};
        corners.emplace_back(pt.R1, std::max(0.0, std::min(pt.R2, sum - pt.R1)));
        corners.emplace_back(std::max(0.0, std::min(pt.R1, sum - pt.R2)), pt.R2);
        for (const auto& [a, b] : corners) {
            RegionPoint c = pt;
            c.R1 = a;
            c.R2 = b;
            out.points.push_back(c);
        }
    }
    out.points = pareto_frontier(out.points);
    return out;
}

}  // namespace

std::vector<RegionPoint> sweep_family(const IsacChannel& ch, int example, InnerKind kind, const SweepGrid& grid,
                                      SweepStats* stats) {
    if (grid.axis_points < 2 || grid.pe_points < 2) throw ArgumentError("sweep resolutions must be at least 2");
    const FamilyLayout f = family_layout(ch, example, kind);
    const std::vector<double> full = linspace(0.0, 1.0, grid.axis_points);
    std::vector<double> half;
    for (double v : full)
        if (v <= 0.5 + 1e-12) half.push_back(v);

    // Relabeling U, or (Sigma_k, Theta_k) jointly, leaves every measure unchanged.
    std::vector<TupleTask> tasks;
    for (double pu : half)
        for (double s1 : half)
            for (double s2 : half)
                for (double t1 : full)
                    for (double t2 : full) tasks.push_back({{pu, s1, s2, t1, t2, 0.0}, {}});

    std::vector<TupleResult> results(tasks.size());
    detail::parallel_for(tasks.size(), grid.threads,
                         [&](std::size_t i) { results[i] = evaluate_tuple(ch, f, kind, tasks[i], grid.pe_points); });

    SweepStats st;
    std::vector<RegionPoint> all;
    for (const auto& r : results) {
        st.evaluations += r.evaluations;
        all.insert(all.end(), r.points.begin(), r.points.end());
    }

    if (grid.zoom && f.quantize && !all.empty()) {
        // Refine pE tenfold around frontier candidates and around the smallest feasible pE.
        std::map<std::string, std::size_t> index_of;
        for (std::size_t i = 0; i < tasks.size(); ++i) index_of[tasks[i].p.id()] = i;
        const auto tuple_index = [&](const RegionPoint& pt) {
            const FamilyParams key{pt.params[0], pt.params[1], pt.params[2], pt.params[3], pt.params[4], 0.0};
            return index_of.at(key.id());
        };
        std::map<std::size_t, std::set<double>> centers;
        for (const auto& obj : {Objective::all(), Objective::r1_d2()})
            for (const auto& pt : pareto_frontier(all, obj)) centers[tuple_index(pt)].insert(pt.params[5]);
        double global_min = INFINITY;
        double widest_step = 0.0;
        for (const auto& r : results) {
            global_min = std::min(global_min, r.min_feasible_pe);
            widest_step = std::max(widest_step, r.pe_step);
        }
        for (std::size_t i = 0; i < results.size(); ++i)
            if (results[i].min_feasible_pe <= global_min + widest_step + 1e-12)
                centers[i].insert(results[i].min_feasible_pe);

        std::vector<TupleTask> zoom;
        for (const auto& [i, pes] : centers) {
            std::set<double> pts;
            const double step = results[i].pe_step;
            for (double c : pes)
                for (double v : linspace(c - step, c + step, grid.zoom_points)) pts.insert(std::max(0.0, v));
            TupleTask t = tasks[i];
            t.pe_grid.assign(pts.begin(), pts.end());
            zoom.push_back(std::move(t));
        }
        std::vector<TupleResult> zres(zoom.size());
        detail::parallel_for(zoom.size(), grid.threads,
                             [&](std::size_t i) { zres[i] = evaluate_tuple(ch, f, kind, zoom[i], grid.pe_points); });
        for (const auto& r : zres) {
            st.evaluations += r.evaluations;
            all.insert(all.end(), r.points.begin(), r.points.end());
        }
    }
    st.feasible = static_cast<long>(all.size());
    if (stats) *stats = st;
    sort_points(all);
    return all;
}

std::vector<RegionPoint> sweep_example4(InnerKind kind, const SweepGrid& grid, const Example4Constants& c,
                                        SweepStats* stats) {
    return sweep_family(build_example4(c), 4, kind, grid, stats);
}

std::vector<RegionPoint> pareto_frontier(const std::vector<RegionPoint>& points, const Objective& obj) {
    if (points.empty()) return {};
    std::vector<int> dims;
    const std::array<bool, 4> use = {obj.r1, obj.r2, obj.d1, obj.d2};
    const auto cost = [](const RegionPoint& p, int d) {
        switch (d) {
            case 0: return -p.R1;
            case 1: return -p.R2;
            case 2: return p.D1;
            default: return p.D2;
        }
    };
    for (int d = 0; d < 4; ++d) {
        if (!use[d]) continue;
        const double first = cost(points[0], d);
        const bool varies = std::any_of(points.begin(), points.end(), [&](const RegionPoint& p) { return cost(p, d) != first; });
        if (varies) dims.push_back(d);
    }
    std::vector<std::size_t> order(points.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    const auto key = [&](std::size_t i) {
        std::array<double, 4> k{};
        for (std::size_t j = 0; j < dims.size(); ++j) k[j] = cost(points[i], dims[j]);
        return k;
    };
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return key(a) < key(b); });

    std::vector<RegionPoint> out;
    if (dims.empty()) {
        out.push_back(points[order[0]]);
        return out;
    }
    std::array<double, 4> last{};
    bool have_last = false;
    if (dims.size() <= 3) {
        // Sweep in lexicographic order; a staircase over the trailing two costs answers dominance.
        std::map<double, double> stair;  // c2 -> min c3, c3 strictly decreasing in c2
        for (std::size_t i : order) {
            const auto k = key(i);
            if (have_last && k == last) continue;
            const double a = dims.size() >= 2 ? k[1] : 0.0;
            const double b = dims.size() >= 3 ? k[2] : 0.0;
            bool dominated = false;
            auto it = stair.upper_bound(a);
            if (it != stair.begin()) {
                --it;
                dominated = it->second <= b;
            }
            if (dims.size() == 1 && have_last) dominated = true;
            have_last = true;
            last = k;
            if (dominated) continue;
            out.push_back(points[i]);
            auto pos = stair.lower_bound(a);
            while (pos != stair.end() && pos->second >= b) pos = stair.erase(pos);
            stair[a] = b;
        }
        return out;
    }
    std::vector<std::array<double, 4>> kept;
    for (std::size_t i : order) {
        const auto k = key(i);
        if (have_last && k == last) continue;
        have_last = true;
        last = k;
        bool dominated = false;
        for (const auto& f : kept) {
            bool le = true;
            for (std::size_t j = 0; j < dims.size() && le; ++j) le = f[j] <= k[j];
            if (le) {
                dominated = true;
                break;
            }
        }
        if (dominated) continue;
        kept.push_back(k);
        out.push_back(points[i]);
    }
    return out;
}

void sort_points(std::vector<RegionPoint>& points) {
    std::stable_sort(points.begin(), points.end(), [](const RegionPoint& a, const RegionPoint& b) {
        return std::tie(a.D2, a.D1, b.R1, b.R2, a.scheme_id) < std::tie(b.D2, b.D1, a.R1, a.R2, b.scheme_id);
    });
}

}  // namespace isac
