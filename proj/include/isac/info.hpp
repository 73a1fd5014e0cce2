#pragma once

#include "isac/prob.hpp"

#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

namespace isac {

// Memoized entropies over the support of one joint. Every variable subset is
// keyed by a bitmask of axes; repeated terms in long formulas cost one lookup.
// Not thread-safe; build one per evaluation.
class InfoTable {
public:
    explicit InfoTable(const JointDist& d);

    const std::vector<Variable>& vars() const { return vars_; }
    int axis(std::string_view name) const;
    std::uint64_t mask(const VarList& names) const;
    std::size_t support_size() const { return weights_.size(); }

    double entropy_of(std::uint64_t axes);
    double H(const VarList& of, const VarList& given = {});
    double I(const VarList& a, const VarList& b, const VarList& given = {});

    // Dense marginal over `keep`, accumulated from the support.
    JointDist marginal(const VarList& keep) const;

    // Table of chain(joint, k) built row by row from the support.
    InfoTable extend(const CondKernel& k) const;

private:
    InfoTable() = default;
    void init_fields();
    int symbol(std::size_t row, int axis) const;
    double compute(std::uint64_t axes);

    std::vector<Variable> vars_;
    std::optional<JointDist> dense_;  // kept only when keys cannot be packed
    bool packed_ = false;
    std::vector<std::uint64_t> field_;
    std::vector<int> shift_;
    std::vector<std::uint64_t> keys_;
    std::vector<double> weights_;
    std::vector<double> scratch_;
    std::vector<std::uint32_t> touched_;
    std::unordered_map<std::uint64_t, double> memo_;
};

}  // namespace isac
