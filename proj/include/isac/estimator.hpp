#pragma once

#include "isac/channel.hpp"
#include "isac/prob.hpp"

#include <string>
#include <vector>

namespace isac {

// Symbol-wise estimator: one estimate per observation assignment (row-major over obs_vars).
struct EstimatorMap {
    std::vector<Variable> obs_vars;
    std::vector<int> table;
    int estimate_size = 1;

    int operator()(std::span<const int> obs) const;
};

// Posterior-risk minimizer; ties go to the lowest estimate index, unseen observations to 0.
EstimatorMap optimal_estimator(const JointDist& joint, const VarList& obs, const std::string& target,
                               const DistortionFn& d);

double expected_distortion(const JointDist& joint, const EstimatorMap& est, const std::string& target,
                           const DistortionFn& d);

// Convenience: optimal estimator's expected distortion.
double optimal_distortion(const JointDist& joint, const VarList& obs, const std::string& target, const DistortionFn& d);

// Appends the estimate as a deterministic function of the observations.
JointDist with_estimate(const JointDist& joint, const EstimatorMap& est, const std::string& name);

}  // namespace isac
