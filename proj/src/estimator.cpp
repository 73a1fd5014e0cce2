#include "isac/estimator.hpp"

#include "isac/errors.hpp"

#include <algorithm>
#include <cmath>

namespace isac {

namespace {

constexpr double kTieTolerance = 1e-12;

void check_target(const JointDist& joint, const VarList& obs, const std::string& target, const DistortionFn& d) {
    if (!joint.contains(target)) throw NameError("estimator target '" + target + "' not in joint");
    if (std::find(obs.begin(), obs.end(), target) != obs.end())
        throw ArgumentError("estimator target '" + target + "' must not be observed");
    if (d.true_size() != joint.alphabet(target))
        throw SchemaError("distortion table rows do not match the alphabet of '" + target + "'");
}

}  // namespace

int EstimatorMap::operator()(std::span<const int> obs) const {
    Eigen::Index idx = 0;
    for (std::size_t a = 0; a < obs_vars.size(); ++a) idx = idx * obs_vars[a].size + obs[a];
    return table[static_cast<std::size_t>(idx)];
}

EstimatorMap optimal_estimator(const JointDist& joint, const VarList& obs, const std::string& target,
                               const DistortionFn& d) {
    check_target(joint, obs, target, d);
    VarList keep = obs;
    keep.push_back(target);
    const JointDist m = marginalize(joint, keep);
    const int ns = joint.alphabet(target);
    const int ne = d.estimate_size();

    EstimatorMap est;
    est.estimate_size = ne;
    for (const auto& n : obs) est.obs_vars.push_back({n, joint.alphabet(n)});
    const Eigen::Index n_obs = m.size() / ns;
    est.table.assign(static_cast<std::size_t>(n_obs), 0);
    std::vector<double> risk(static_cast<std::size_t>(ne));
    for (Eigen::Index o = 0; o < n_obs; ++o) {
        const double mass = m.probs().segment(o * ns, ns).sum();
        if (!(mass > 0.0)) continue;
        double best = INFINITY;
        for (int e = 0; e < ne; ++e) {
            double r = 0.0;
            for (int s = 0; s < ns; ++s) r += m.probs()[o * ns + s] * d(s, e);
            risk[static_cast<std::size_t>(e)] = r;
            best = std::min(best, r);
        }
        const double tol = kTieTolerance * std::max(mass, best);
        for (int e = 0; e < ne; ++e) {
            if (risk[static_cast<std::size_t>(e)] <= best + tol) {
                est.table[static_cast<std::size_t>(o)] = e;
                break;
            }
        }
    }
    return est;
}

double expected_distortion(const JointDist& joint, const EstimatorMap& est, const std::string& target,
                           const DistortionFn& d) {
    VarList keep;
    for (const auto& v : est.obs_vars) {
        if (joint.alphabet(v.name) != v.size) throw SchemaError("estimator alphabet differs from joint for '" + v.name + "'");
        keep.push_back(v.name);
    }
    check_target(joint, keep, target, d);
    keep.push_back(target);
    const JointDist m = marginalize(joint, keep);
    const int ns = joint.alphabet(target);
    const Eigen::Index n_obs = m.size() / ns;
    double total = 0.0;
    for (Eigen::Index o = 0; o < n_obs; ++o) {
        const int e = est.table[static_cast<std::size_t>(o)];
        for (int s = 0; s < ns; ++s) total += m.probs()[o * ns + s] * d(s, e);
    }
    return std::clamp(total, 0.0, d.bound());
}

double optimal_distortion(const JointDist& joint, const VarList& obs, const std::string& target, const DistortionFn& d) {
    return expected_distortion(joint, optimal_estimator(joint, obs, target, d), target, d);
}

JointDist with_estimate(const JointDist& joint, const EstimatorMap& est, const std::string& name) {
    return chain(joint, CondKernel::deterministic(est.obs_vars, {{name, est.estimate_size}},
                                                  [&](std::span<const int> g, std::span<int> o) { o[0] = est(g); }));
}

}  // namespace isac
