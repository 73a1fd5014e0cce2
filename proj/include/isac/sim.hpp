#pragma once

#include "isac/channel.hpp"
#include "isac/estimator.hpp"
#include "isac/prob.hpp"

#include <cstdint>
#include <optional>

namespace isac {

// SplitMix64 evaluated at a counter: the i-th draw depends only on (seed, i).
std::uint64_t splitmix64(std::uint64_t seed, std::uint64_t counter);
double uniform01(std::uint64_t seed, std::uint64_t counter);

struct SimConfig {
    IsacChannel channel;
    JointDist input;  // over X1, X2 (and any auxiliary inputs)
    int user = 2;
    VarList obs;                              // estimator observations
    std::optional<EstimatorMap> estimator;    // defaults to the optimal map for obs
    long n = 100'000;
    std::uint64_t seed = 1;
    unsigned threads = 0;
};

struct SimResult {
    double mean = 0.0;
    double std_error = 0.0;  // sample standard deviation (n-1) over sqrt(n)
    double analytic = 0.0;   // exact expected distortion of the same estimator
    long n = 0;
};

inline constexpr long kSimBlock = 4096;

SimResult simulate(const SimConfig& cfg);

}  // namespace isac
