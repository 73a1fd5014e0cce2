#pragma once

#include <Eigen/Core>

#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace isac {

// A named finite alphabet; symbols are 0..size-1. Size 1 models an absent variable.
struct Variable {
    std::string name;
    int size = 1;

    friend bool operator==(const Variable&, const Variable&) = default;
};

using VarList = std::vector<std::string>;
using Assignment = std::vector<std::pair<std::string, int>>;

inline constexpr Eigen::Index kMaxTensorSize = 100'000'000;
inline constexpr double kNormTolerance = 1e-12;
inline constexpr double kMiFloor = -1e-9;

// Dense row-major probability tensor; the last variable varies fastest.
class JointDist {
public:
    JointDist();
    JointDist(std::vector<Variable> vars, Eigen::ArrayXd probs);

    static JointDist uniform(std::vector<Variable> vars);
    static JointDist point_mass(std::vector<Variable> vars, std::span<const int> symbols);
    static JointDist bernoulli(std::string name, double p1);
    static JointDist from_pmf(std::string name, std::span<const double> pmf);

    const std::vector<Variable>& vars() const { return vars_; }
    VarList names() const;
    const Eigen::ArrayXd& probs() const { return probs_; }
    Eigen::Index size() const { return probs_.size(); }
    int rank() const { return static_cast<int>(vars_.size()); }

    bool contains(std::string_view name) const;
    int axis(std::string_view name) const;
    int alphabet(std::string_view name) const { return vars_[axis(name)].size; }
    Eigen::Index stride(int axis) const { return strides_[axis]; }

    Eigen::Index flat_index(std::span<const int> symbols) const;
    void decode(Eigen::Index flat, std::span<int> symbols) const;
    double at(std::span<const int> symbols) const { return probs_[flat_index(symbols)]; }

    // Skips validation; for results of operations that preserve the invariants.
    static JointDist trusted(std::vector<Variable> vars, Eigen::ArrayXd probs);

private:
    struct Trusted {};
    JointDist(Trusted, std::vector<Variable> vars, Eigen::ArrayXd probs);
    void init_strides();

    std::vector<Variable> vars_;
    std::vector<Eigen::Index> strides_;
    Eigen::ArrayXd probs_;
};

// P(out | given), stored given-major: probs[g * out_size + o].
class CondKernel {
public:
    using Rule = std::function<void(std::span<const int> given, std::span<int> out)>;
    using Density = std::function<double(std::span<const int> given, std::span<const int> out)>;

    CondKernel() = default;
    CondKernel(std::vector<Variable> given, std::vector<Variable> out, Eigen::ArrayXd probs);

    static CondKernel deterministic(std::vector<Variable> given, std::vector<Variable> out, const Rule& rule);
    static CondKernel tabulate(std::vector<Variable> given, std::vector<Variable> out, const Density& density);

    const std::vector<Variable>& given() const { return given_; }
    const std::vector<Variable>& out() const { return out_; }
    const Eigen::ArrayXd& probs() const { return probs_; }
    Eigen::Index given_size() const { return given_size_; }
    Eigen::Index out_size() const { return out_size_; }
    double at(Eigen::Index g, Eigen::Index o) const { return probs_[g * out_size_ + o]; }

private:
    std::vector<Variable> given_;
    std::vector<Variable> out_;
    Eigen::Index given_size_ = 1;
    Eigen::Index out_size_ = 1;
    Eigen::ArrayXd probs_;
};

Eigen::Index tensor_size(std::span<const Variable> vars);

// Result variables follow the order of `keep`.
JointDist marginalize(const JointDist& d, const VarList& keep);

// Normalized slice; conditioned axes stay in place as point masses.
JointDist condition(const JointDist& d, const Assignment& on);

JointDist chain(const JointDist& prior, const CondKernel& k);

// marginalize(chain(prior, k), keep) without materializing the full product.
JointDist chain_marginal(const JointDist& prior, const CondKernel& k, const VarList& keep);

JointDist product(const JointDist& a, const JointDist& b);

double entropy(const JointDist& d, const VarList& of, const VarList& given = {});
double mutual_info(const JointDist& d, const VarList& a, const VarList& b, const VarList& given = {});

double binary_entropy(double p);

// Applies the round-off floor: values in [kMiFloor, 0) become 0, lower values throw InternalError.
double clamp_information(double value, std::string_view what);

}  // namespace isac
