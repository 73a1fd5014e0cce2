#pragma once

#include "isac/channel.hpp"
#include "isac/prob.hpp"

#include <Eigen/Core>

#include <cmath>
#include <map>
#include <random>
#include <vector>

namespace isac::testing {

using Rng = std::mt19937_64;

inline double h2(double p) {
    double v = 0.0;
    for (double q : {p, 1.0 - p})
        if (q > 0.0) v -= q * std::log2(q);
    return v;
}

inline Eigen::ArrayXd random_pmf(Rng& g, Eigen::Index n, double zero_prob = 0.2) {
    std::exponential_distribution<double> e(1.0);
    std::bernoulli_distribution zero(zero_prob);
    Eigen::ArrayXd p(n);
    for (Eigen::Index i = 0; i < n; ++i) p[i] = zero(g) ? 0.0 : e(g);
    if (p.sum() <= 0.0) p[0] = 1.0;
    return p / p.sum();
}

inline JointDist random_joint(Rng& g, std::vector<Variable> vars, double zero_prob = 0.2) {
    const Eigen::Index n = tensor_size(vars);
    return JointDist(std::move(vars), random_pmf(g, n, zero_prob));
}

inline CondKernel random_kernel(Rng& g, std::vector<Variable> given, Variable out) {
    const Eigen::Index gs = tensor_size(given);
    Eigen::ArrayXd p(gs * out.size);
    for (Eigen::Index r = 0; r < gs; ++r) p.segment(r * out.size, out.size) = random_pmf(g, out.size, 0.0);
    return CondKernel(std::move(given), {std::move(out)}, std::move(p));
}

// Odometer over every assignment of a joint, yielding (symbols, probability).
template <class F>
void for_each_cell(const JointDist& d, F&& f) {
    std::vector<int> sym(static_cast<std::size_t>(d.rank()), 0);
    for (Eigen::Index i = 0; i < d.size(); ++i) {
        Eigen::Index r = i;
        for (int a = d.rank() - 1; a >= 0; --a) {
            const int n = d.vars()[static_cast<std::size_t>(a)].size;
            sym[static_cast<std::size_t>(a)] = static_cast<int>(r % n);
            r /= n;
        }
        f(sym, d.probs()[i]);
    }
}

inline std::map<std::vector<int>, double> marginal_map(const JointDist& d, const VarList& names) {
    std::vector<int> axes;
    for (const auto& n : names) axes.push_back(d.axis(n));
    std::map<std::vector<int>, double> m;
    for_each_cell(d, [&](const std::vector<int>& s, double p) {
        std::vector<int> k;
        for (int a : axes) k.push_back(s[static_cast<std::size_t>(a)]);
        m[k] += p;
    });
    return m;
}

inline double oracle_entropy(const JointDist& d, const VarList& names) {
    double h = 0.0;
    for (const auto& [k, p] : marginal_map(d, names))
        if (p > 0.0) h -= p * std::log2(p);
    return h;
}

inline VarList join(VarList a, const VarList& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

// Sum of p(a,b,c) log p(a,b,c) p(c) / (p(a,c) p(b,c)).
inline double oracle_mi(const JointDist& d, const VarList& a, const VarList& b, const VarList& c) {
    const auto abc = marginal_map(d, join(join(a, b), c));
    const auto ac = marginal_map(d, join(a, c));
    const auto bc = marginal_map(d, join(b, c));
    const auto cc = marginal_map(d, c);
    const std::size_t na = a.size();
    const std::size_t nb = b.size();
    double v = 0.0;
    for (const auto& [k, p] : abc) {
        if (!(p > 0.0)) continue;
        std::vector<int> ka(k.begin(), k.begin() + static_cast<long>(na));
        std::vector<int> kb(k.begin() + static_cast<long>(na), k.begin() + static_cast<long>(na + nb));
        std::vector<int> kc(k.begin() + static_cast<long>(na + nb), k.end());
        std::vector<int> kac = ka;
        kac.insert(kac.end(), kc.begin(), kc.end());
        std::vector<int> kbc = kb;
        kbc.insert(kbc.end(), kc.begin(), kc.end());
        v += p * std::log2(p * cc.at(kc) / (ac.at(kac) * bc.at(kbc)));
    }
    return v;
}

}  // namespace isac::testing
