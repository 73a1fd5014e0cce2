#pragma once

#include "isac/channel.hpp"
#include "isac/prob.hpp"

#include <Eigen/Core>

#include <string>
#include <vector>

namespace isac {

// min I(target; S_hat) over kernels P(S_hat | cond_vars) with E[d(target, S_hat)] <= D.
struct RdProblem {
    JointDist source;  // over cond_vars; must contain target
    VarList cond_vars;
    std::string target;
    DistortionFn d;

    static RdProblem bernoulli(double p1);
    // Source P(X_k, Z_k, [extra...], ST_k) taken from an assembled joint.
    static RdProblem from_joint(const JointDist& joint, const VarList& cond_vars, const std::string& target,
                                const DistortionFn& d);
    void validate() const;
};

struct RdCurvePoint {
    double D = 0.0;
    double R = 0.0;
    double multiplier = 0.0;  // slope magnitude, bits per unit distortion
};

struct RdSolution {
    double rate = 0.0;
    double distortion = 0.0;
    double multiplier = 0.0;
    int iterations = 0;
    Eigen::MatrixXd kernel;  // P(S_hat | target); lifts to any conditioning set containing the target
};

inline constexpr int kRdMaxIterations = 100'000;
inline constexpr int kBruteForceMaxParams = 12;

double rd_min_distortion(const RdProblem& p);
double rd_max_distortion(const RdProblem& p);

RdSolution rd_solve(const RdProblem& p, double D);
double rd_function(const RdProblem& p, double D);
std::vector<RdCurvePoint> rd_curve(const RdProblem& p, const std::vector<double>& grid);

// Grid search over kernels on the full conditioning set; upper-bounds rd_function.
double brute_force_rd(const RdProblem& p, double D, int resolution);

// Smallest D with rd_function(D) <= budget (bisection).
double rd_min_distortion_for_rate(const RdProblem& p, double budget, double tol = 1e-10);

}  // namespace isac
