#pragma once

#include "isac/channel.hpp"
#include "isac/inner.hpp"
#include "isac/prob.hpp"
#include "isac/rd.hpp"

#include <array>
#include <string>
#include <vector>

namespace isac {

// Joint P(Q, T, X1, X2) where Q is a coordinate of T: q = q_of_t[t].
struct OuterScheme {
    std::string id;
    JointDist input;  // variables Q, T, X1, X2 in that order
    std::vector<int> q_of_t;

    void validate(const IsacChannel& ch) const;
};

// Builds the scheme from P(T, X1, X2) and the coordinate map t -> q.
OuterScheme make_outer_scheme(const JointDist& t_x1_x2, std::vector<int> q_of_t, std::string id = {});

// P(T) P(X1|T) P(X2|T) for binary inputs; pi_k[t] = P(X_k = 0 | T = t).
OuterScheme binary_product_scheme(const std::vector<double>& kappa, const std::vector<double>& pi1,
                                  const std::vector<double>& pi2, std::vector<int> q_of_t = {});

int outer_cardinality_cap(const IsacChannel& ch);

struct OuterOptions {
    bool parallel_x2 = false;  // adds Zpc = X2 to every observation set
};

struct OuterResult {
    RatePolygon polygon;
    double balance_lhs = 0.0;  // I(X1;X2|T)
    double balance_rhs = 0.0;  // I(X1;X2|Z1 Z2 [Zpc] T)
    bool dependence_balance = false;
    std::array<double, 2> f{};            // f_k(D_k)
    std::array<double, 2> link{};         // I(ST_k X_kbar; Z_k [Zpc] | X_k Q)
    std::array<double, 2> cooperative{};  // I(ST_k; Z1 Z2 [Zpc] | X1 X2 Q)
    std::array<bool, 2> sensing{};
    bool feasible = false;

    double sensing_cap(int user) const;
    bool admits(double R1, double R2, double tol = 1e-9) const { return feasible && polygon.contains(R1, R2, tol); }
};

struct KhkcResult {
    RatePolygon polygon;
    bool dependence_balance = false;
    double d1_min = 0.0;
    double d2_min = 0.0;

    bool admits(double R1, double R2, double D1, double D2, double tol = 1e-9, double dtol = 1e-6) const;
};

// Rate-distortion function of the sensing state alone, shared by both outer bounds.
RdProblem sensing_rd_problem(const IsacChannel& ch, int user);

OuterResult eval_outer_our(const IsacChannel& ch, const OuterScheme& s, double D1, double D2,
                           const OuterOptions& opt = {});
KhkcResult eval_outer_khkc(const IsacChannel& ch, const OuterScheme& s, const OuterOptions& opt = {});

// Smallest D_k the sensing constraints of eval_outer_our admit under scheme s.
double outer_min_distortion(const IsacChannel& ch, const OuterScheme& s, int user, const OuterOptions& opt = {});

double composite_omega(double t);

struct AlphaParams {
    double a1 = 0.25;
    double a2 = 0.25;
    double a = 0.5;

    void validate() const;
};

struct ClosedFormBounds {
    double r1_max = 0.0;
    double r2_max = 0.0;
    double rsum_max = 0.0;
    double link_bound = 0.0;         // h(P_B(1)(1-a)) - (1-a) H(B)
    double cooperative_bound = 0.0;  // H(N)
    double f = 0.0;                  // f_2(D2)
    double sensing_slack = 0.0;

    double symmetric_rate() const;
    bool feasible(double tol = 1e-9) const { return sensing_slack >= -tol; }
};

// (a1, a2, a) from a binary product scheme, with pi = P(X = 0 | T).
AlphaParams alpha_of(const std::vector<double>& kappa, const std::vector<double>& pi1, const std::vector<double>& pi2);

ClosedFormBounds example4_outer_closed_form(const AlphaParams& p, double D2, const Example4Constants& c = {});

struct OuterSweepGrid {
    int alpha_points = 51;
    std::vector<double> d2 = {};  // empty: 31 points on [0, P_N(1)]
    unsigned threads = 0;
};

struct SymmetricPoint {
    double D2 = 0.0;
    bool our_feasible = false;
    double our_rate = 0.0;
    bool khkc_feasible = false;
    double khkc_rate = 0.0;
    AlphaParams our_argmax;
};

// Upper envelope of the symmetric rate over the alpha box, for both outer bounds.
std::vector<SymmetricPoint> sweep_example4_outer(const OuterSweepGrid& grid = {}, const Example4Constants& c = {});

}  // namespace isac
