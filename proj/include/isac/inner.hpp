#pragma once

#include "isac/channel.hpp"
#include "isac/info.hpp"
#include "isac/prob.hpp"

#include <string>
#include <utility>
#include <vector>

namespace isac {

enum class InnerKind { Our, OurCom, Awk, Kobayashi };

std::string to_string(InnerKind k);
InnerKind parse_inner_kind(const std::string& s);

// Compression outputs by region family. Absent auxiliaries stay in the joint as singletons.
inline const VarList kOurCompression1 = {"V1c", "V1p"};
inline const VarList kOurCompression2 = {"V2c", "V2p"};
inline const VarList kAwkCompression1 = {"V1"};
inline const VarList kAwkCompression2 = {"V2"};

// P_U P_{U1|U} P_{U2|U} P_{X1|U U1} P_{X2|U U2} plus one compression kernel per user.
// comp_k may depend on any subset of (U, U1, U2, X_k, Z_k).
struct AuxScheme {
    std::string id;
    CondKernel p_u;
    CondKernel p_u1;
    CondKernel p_u2;
    CondKernel p_x1;
    CondKernel p_x2;
    CondKernel comp1;
    CondKernel comp2;

    JointDist input_joint() const;
    void validate(const IsacChannel& ch) const;
};

// Deterministic single-symbol compression kernel producing `outs` (all singletons).
CondKernel trivial_compression(const VarList& outs);

// Binary auxiliaries; inputs X_k = U xor Sigma_k xor Theta_k with U_k = U xor Sigma_k.
AuxScheme xor_input_scheme(double p_u, double p_sigma1, double p_sigma2, double p_theta1, double p_theta2);

struct RatePolygon {
    double r1 = 0.0;
    double r2 = 0.0;
    std::vector<double> sum12;
    bool constraints_hold = false;
    bool rates_nonnegative = false;
    bool feasible = false;
    std::vector<std::pair<std::string, double>> slack;

    double sum_bound() const;
    // Effective single-user bounds after intersecting with the sum constraints.
    double r1_eff() const;
    double r2_eff() const;
    bool contains(double R1, double R2, double tol = 1e-9) const;
};

// True when `outer` contains `inner` as polygons, within tol.
bool polygon_contains(const RatePolygon& outer, const RatePolygon& inner, double tol = 1e-9);

struct InnerResult {
    RatePolygon polygon;
    double d1 = 0.0;
    double d2 = 0.0;
};

inline constexpr double kConstraintTolerance = 1e-9;

// Entropy source for one scheme: terms free of compression variables may be served by a
// cached base table shared across schemes that differ only in their compression kernels.
class SchemeInfo {
public:
    explicit SchemeInfo(const JointDist& full, InfoTable* base = nullptr);
    SchemeInfo(InfoTable full, InfoTable* base);
    double I(const VarList& a, const VarList& b, const VarList& given = {});
    JointDist marginal(const VarList& keep) const { return full_.marginal(keep); }

private:
    InfoTable full_;
    InfoTable* base_;
};

// Region constants from an already-assembled joint that carries the named compression variables.
InnerResult eval_our_from_joint(SchemeInfo& info, const IsacChannel& ch);
InnerResult eval_awk_from_joint(SchemeInfo& info, const IsacChannel& ch);

InnerResult eval_inner_our(const IsacChannel& ch, const AuxScheme& s);
InnerResult eval_inner_awk(const IsacChannel& ch, const AuxScheme& s);
InnerResult eval_inner_kobayashi(const IsacChannel& ch, const AuxScheme& s);
InnerResult eval_inner(InnerKind kind, const IsacChannel& ch, const AuxScheme& s);

// V_kc := V_k, V_kp := singleton.
AuxScheme awk_to_our_com(const AuxScheme& awk);

// Joint over inputs, auxiliaries, ST1, ST2, SR, Y, Z1, Z2 and compression outputs.
JointDist assemble_scheme(const IsacChannel& ch, const AuxScheme& s);

struct RegionPoint {
    double R1 = 0.0;
    double R2 = 0.0;
    double D1 = 0.0;
    double D2 = 0.0;
    std::string scheme_id;
    std::vector<double> params;
};

// Parameters of the xor family; p_e is the quantizer crossover of the compressed echo bit.
struct FamilyParams {
    double p_u = 0.0;
    double p_sigma1 = 0.0;
    double p_sigma2 = 0.0;
    double p_theta1 = 0.0;
    double p_theta2 = 0.0;
    double p_e = 0.0;

    std::vector<double> as_vector() const { return {p_u, p_sigma1, p_sigma2, p_theta1, p_theta2, p_e}; }
    std::string id() const;
};
using Example4Params = FamilyParams;

// W = V xor E with E ~ Bern(p_e) independent of V; returns P(V | the bits W is computed from).
// `bit` extracts W from the given assignment; `q` is P(W = 1).
CondKernel quantizer_kernel(std::vector<Variable> given, const std::string& out,
                            const std::function<int(std::span<const int>)>& bit, double q, double p_e);

// Scheme of the xor family for examples 1, 2 and 4. Throws UsageError for example 3.
AuxScheme family_scheme(const IsacChannel& ch, int example, InnerKind kind, const FamilyParams& p);

struct SweepGrid {
    int axis_points = 11;
    int pe_points = 31;
    bool zoom = true;
    int zoom_points = 21;
    unsigned threads = 0;  // 0: hardware concurrency
};

struct SweepStats {
    long evaluations = 0;
    long feasible = 0;
};

// Feasible points of the family over the grid (before frontier extraction).
std::vector<RegionPoint> sweep_family(const IsacChannel& ch, int example, InnerKind kind, const SweepGrid& grid,
                                      SweepStats* stats = nullptr);
std::vector<RegionPoint> sweep_example4(InnerKind kind, const SweepGrid& grid = {},
                                        const Example4Constants& c = {}, SweepStats* stats = nullptr);

// Which coordinates take part in dominance. Rates are maximized, distortions minimized.
struct Objective {
    bool r1 = true;
    bool r2 = true;
    bool d1 = true;
    bool d2 = true;

    static Objective all() { return {}; }
    static Objective r1_d2() { return {true, false, false, true}; }
};

std::vector<RegionPoint> pareto_frontier(const std::vector<RegionPoint>& points, const Objective& obj = {});

// Canonical output order: by D2, then D1, then descending R1, R2.
void sort_points(std::vector<RegionPoint>& points);

}  // namespace isac
