#include "isac/sim.hpp"

#include "isac/detail/parallel.hpp"
#include "isac/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace isac {

std::uint64_t splitmix64(std::uint64_t seed, std::uint64_t counter) {
    std::uint64_t z = seed + (counter + 1) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double uniform01(std::uint64_t seed, std::uint64_t counter) {
    return static_cast<double>(splitmix64(seed, counter) >> 11) * 0x1.0p-53;
}

SimResult simulate(const SimConfig& cfg) {
    if (cfg.n < 1) throw ArgumentError("sample count must be at least 1");
    if (cfg.user != 1 && cfg.user != 2) throw ArgumentError("user must be 1 or 2");
    const IsacChannel& ch = cfg.channel;
    const std::string target = sensing_target(cfg.user);
    const DistortionFn& d = ch.distortion(cfg.user);

    JointDist joint = assemble_joint(ch, cfg.input);
    VarList comps;
    for (const auto& o : cfg.obs)
        if (!joint.contains(o)) comps.push_back(o);
    joint = with_components(joint, ch, comps);

    const EstimatorMap est = cfg.estimator ? *cfg.estimator : optimal_estimator(joint, cfg.obs, target, d);
    std::vector<int> obs_axes;
    for (const auto& v : est.obs_vars) obs_axes.push_back(joint.axis(v.name));
    const int target_axis = joint.axis(target);

    std::vector<double> cdf(static_cast<std::size_t>(joint.size()));
    std::partial_sum(joint.probs().begin(), joint.probs().end(), cdf.begin());
    const double total = cdf.back();

    const long blocks = (cfg.n + kSimBlock - 1) / kSimBlock;
    std::vector<double> sum(static_cast<std::size_t>(blocks));
    std::vector<double> sum_sq(static_cast<std::size_t>(blocks));
    detail::parallel_for(static_cast<std::size_t>(blocks), cfg.threads, [&](std::size_t b) {
        std::vector<int> sym(static_cast<std::size_t>(joint.rank()));
        std::vector<int> obs(obs_axes.size());
        const long lo = static_cast<long>(b) * kSimBlock;
        const long hi = std::min(cfg.n, lo + kSimBlock);
        double s = 0.0;
        double s2 = 0.0;
        for (long i = lo; i < hi; ++i) {
            const double u = uniform01(cfg.seed, static_cast<std::uint64_t>(i)) * total;
            auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
            if (it == cdf.end()) --it;
            joint.decode(it - cdf.begin(), sym);
            for (std::size_t j = 0; j < obs_axes.size(); ++j) obs[j] = sym[static_cast<std::size_t>(obs_axes[j])];
            const double x = d(sym[static_cast<std::size_t>(target_axis)], est(obs));
            s += x;
            s2 += x * x;
        }
        sum[b] = s;
        sum_sq[b] = s2;
    });

    SimResult r;
    r.n = cfg.n;
    const double n = static_cast<double>(cfg.n);
    const double s = std::accumulate(sum.begin(), sum.end(), 0.0);
    const double s2 = std::accumulate(sum_sq.begin(), sum_sq.end(), 0.0);
    r.mean = s / n;
    r.std_error = cfg.n > 1 ? std::sqrt(std::max(0.0, (s2 - n * r.mean * r.mean) / (n - 1.0)) / n) : 0.0;
    r.analytic = expected_distortion(joint, est, target, d);
    return r;
}

}  // namespace isac
