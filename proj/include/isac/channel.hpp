#pragma once

#include "isac/prob.hpp"

#include <Eigen/Core>

#include <string>
#include <vector>

namespace isac {

// Per-letter distortion d(s, s_hat): rows are true symbols, columns estimates.
struct DistortionFn {
    Eigen::MatrixXd table;

    static DistortionFn hamming(int n);
    double operator()(int s, int s_hat) const { return table(s, s_hat); }
    double bound() const;
    int true_size() const { return static_cast<int>(table.rows()); }
    int estimate_size() const { return static_cast<int>(table.cols()); }
    void validate() const;
};

// Named deterministic projection of one channel variable, e.g. a primitive
// noise bit packed inside the enlarged state S.
struct Component {
    std::string name;
    std::string source;
    std::vector<int> map;  // source symbol -> component symbol
    int size = 1;
};

// State kernel over (S, ST1, ST2, SR) and channel kernel (Y, Z1, Z2 | X1, X2, S).
// Variable names are fixed; the tensors are stored in that canonical order.
struct IsacChannel {
    std::string label;
    JointDist state;
    CondKernel channel;
    DistortionFn d1;
    DistortionFn d2;
    std::vector<Component> components;

    int size_of(std::string_view var) const;
    const DistortionFn& distortion(int user) const { return user == 1 ? d1 : d2; }
    const Component* component(std::string_view name) const;
    void validate() const;
};

inline const VarList kStateVars = {"S", "ST1", "ST2", "SR"};
inline const VarList kChannelInputs = {"X1", "X2", "S"};
inline const VarList kChannelOutputs = {"Y", "Z1", "Z2"};

inline std::string sensing_target(int user) { return user == 1 ? "ST1" : "ST2"; }

// Constants of the fourth example channel; exposed so sensitivity checks can perturb them.
struct Example4Constants {
    double p_s1 = 0.24;
    double p_s2 = 0.05;
    double p_n = 0.3;
    double p_b = 0.5;
};

IsacChannel build_example(int n);
IsacChannel build_example4(const Example4Constants& c);

// Product of the input law and the state kernel, chained with the channel kernel
// and then with each extra kernel in order.
JointDist assemble_joint(const IsacChannel& ch, const JointDist& input, const std::vector<CondKernel>& extra = {});

// Same joint restricted to `keep`; intermediate variables are summed out as soon
// as no later kernel needs them.
JointDist assemble_marginal(const IsacChannel& ch, const JointDist& input, const std::vector<CondKernel>& extra,
                            const VarList& keep);

// Appends the named channel components as deterministic functions of their sources.
JointDist with_components(const JointDist& joint, const IsacChannel& ch, const VarList& names);

// Independent inputs X1 ~ Bern(p1), X2 ~ Bern(p2) for binary-input channels.
JointDist product_input(const IsacChannel& ch, double p1, double p2);

}  // namespace isac
