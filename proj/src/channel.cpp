#include "isac/channel.hpp"

#include "isac/errors.hpp"

#include <algorithm>
#include <functional>

namespace isac {

namespace {

struct Noise {
    std::string name;
    double p1;
};

struct Outputs {
    int y = 0;
    int z1 = 0;
    int z2 = 0;
};

// Packs independent binary noises into S (first noise is the most significant bit).
struct NoiseSpace {
    std::vector<Noise> noises;

    int size() const { return 1 << noises.size(); }
    int bit(int s, std::string_view name) const {
        const int n = static_cast<int>(noises.size());
        for (int i = 0; i < n; ++i)
            if (noises[i].name == name) return (s >> (n - 1 - i)) & 1;
        throw InternalError("unknown noise " + std::string(name));
    }
    double prob(int s) const {
        const int n = static_cast<int>(noises.size());
        double p = 1.0;
        for (int i = 0; i < n; ++i) {
            const int b = (s >> (n - 1 - i)) & 1;
            p *= b ? noises[i].p1 : 1.0 - noises[i].p1;
        }
        return p;
    }
    std::vector<Component> components() const {
        std::vector<Component> out;
        for (const auto& nz : noises) {
            Component c{nz.name, "S", {}, 2};
            for (int s = 0; s < size(); ++s) c.map.push_back(bit(s, nz.name));
            out.push_back(std::move(c));
        }
        return out;
    }
};

Component pair_component(std::string name, std::string source, bool high) {
    Component c{std::move(name), std::move(source), {}, 2};
    for (int v = 0; v < 4; ++v) c.map.push_back(high ? v >> 1 : v & 1);
    return c;
}

IsacChannel build_binary_example(std::string label, const NoiseSpace& ns, const std::string& st1,
                                 const std::string& st2, int y_size, int z1_size, int z2_size,
                                 const std::function<Outputs(int, int, int)>& law) {
    const int ns_size = ns.size();
    std::vector<Variable> svars = {{"S", ns_size}, {"ST1", 2}, {"ST2", 2}, {"SR", 1}};
    Eigen::ArrayXd sp = Eigen::ArrayXd::Zero(tensor_size(svars));
    for (int s = 0; s < ns_size; ++s) {
        const int a = ns.bit(s, st1);
        const int b = ns.bit(s, st2);
        sp[(s * 2 + a) * 2 + b] = ns.prob(s);
    }
    IsacChannel ch;
    ch.label = std::move(label);
    ch.state = JointDist(std::move(svars), std::move(sp));
    ch.channel = CondKernel::deterministic({{"X1", 2}, {"X2", 2}, {"S", ns_size}},
                                           {{"Y", y_size}, {"Z1", z1_size}, {"Z2", z2_size}},
                                           [&](std::span<const int> g, std::span<int> o) {
                                               const Outputs r = law(g[0], g[1], g[2]);
                                               o[0] = r.y;
                                               o[1] = r.z1;
                                               o[2] = r.z2;
                                           });
    ch.d1 = DistortionFn::hamming(2);
    ch.d2 = DistortionFn::hamming(2);
    ch.components = ns.components();
    return ch;
}

IsacChannel example1() {
    NoiseSpace ns{{{"S1", 0.11}, {"S2", 0.11}}};
    auto ch = build_binary_example("example1", ns, "S2", "S1", 4, 2, 2, [ns](int x1, int x2, int s) {
        const int s1 = ns.bit(s, "S1");
        const int s2 = ns.bit(s, "S2");
        return Outputs{((x1 ^ s1) << 1) | (x2 ^ s2), x1 ^ s2, x2 ^ s1};
    });
    ch.components.push_back(pair_component("Y1", "Y", true));
    ch.components.push_back(pair_component("Y2", "Y", false));
    return ch;
}

IsacChannel example2() {
    NoiseSpace ns{{{"S1", 0.11}, {"S2", 0.11}, {"B", 0.11}, {"N", 0.5}}};
    auto ch = build_binary_example("example2", ns, "S2", "S1", 4, 4, 2, [ns](int x1, int x2, int s) {
        const int s1 = ns.bit(s, "S1");
        const int s2 = ns.bit(s, "S2");
        const int b = ns.bit(s, "B");
        const int n = ns.bit(s, "N");
        return Outputs{((x1 ^ s1 ^ n) << 1) | (x2 ^ s2), ((x1 ^ s1) << 1) | (x1 ^ s2), x1 ^ b};
    });
    ch.components.push_back(pair_component("Y1", "Y", true));
    ch.components.push_back(pair_component("Y2", "Y", false));
    ch.components.push_back(pair_component("Z1a", "Z1", true));
    ch.components.push_back(pair_component("Z1b", "Z1", false));
    return ch;
}

IsacChannel example3() {
    NoiseSpace ns{{{"S1", 0.11}, {"S2", 0.11}}};
    return build_binary_example("example3", ns, "S2", "S1", 3, 2, 2, [ns](int x1, int x2, int s) {
        const int s1 = ns.bit(s, "S1");
        const int s2 = ns.bit(s, "S2");
        return Outputs{s1 * x1 + s2 * x2, x1 ^ s1, x2 ^ s2};
    });
}

}  // namespace

DistortionFn DistortionFn::hamming(int n) {
    DistortionFn d;
    d.table = Eigen::MatrixXd::Ones(n, n) - Eigen::MatrixXd::Identity(n, n);
    return d;
}

double DistortionFn::bound() const { return table.size() ? table.maxCoeff() : 0.0; }

void DistortionFn::validate() const {
    if (table.rows() < 1 || table.cols() < 1) throw SchemaError("distortion table is empty");
    if (!table.allFinite() || (table.array() < 0.0).any())
        throw SchemaError("distortion table must be finite and nonnegative");
}

int IsacChannel::size_of(std::string_view var) const {
    if (state.contains(var)) return state.alphabet(var);
    for (const auto& v : channel.given())
        if (v.name == var) return v.size;
    for (const auto& v : channel.out())
        if (v.name == var) return v.size;
    if (const Component* c = component(var)) return c->size;
    throw NameError("channel has no variable '" + std::string(var) + "'");
}

const Component* IsacChannel::component(std::string_view name) const {
    for (const auto& c : components)
        if (c.name == name) return &c;
    return nullptr;
}

void IsacChannel::validate() const {
    if (state.names() != kStateVars) throw SchemaError("state kernel must be over (S, ST1, ST2, SR)");
    VarList given;
    for (const auto& v : channel.given()) given.push_back(v.name);
    VarList out;
    for (const auto& v : channel.out()) out.push_back(v.name);
    if (given != kChannelInputs) throw SchemaError("channel kernel must condition on (X1, X2, S)");
    if (out != kChannelOutputs) throw SchemaError("channel kernel must produce (Y, Z1, Z2)");
    if (channel.given()[2].size != state.alphabet("S")) throw SchemaError("alphabet of S differs between kernels");
    d1.validate();
    d2.validate();
    if (d1.true_size() != state.alphabet("ST1")) throw SchemaError("distortion1 rows must match the ST1 alphabet");
    if (d2.true_size() != state.alphabet("ST2")) throw SchemaError("distortion2 rows must match the ST2 alphabet");
    for (const auto& c : components) {
        const int src = size_of(c.source);
        if (static_cast<int>(c.map.size()) != src) throw SchemaError("component '" + c.name + "' map has wrong length");
        for (int v : c.map)
            if (v < 0 || v >= c.size) throw SchemaError("component '" + c.name + "' maps outside its alphabet");
    }
}

IsacChannel build_example4(const Example4Constants& c) {
    NoiseSpace ns{{{"S1", c.p_s1}, {"S2", c.p_s2}, {"N", c.p_n}, {"B", c.p_b}}};
    auto ch = build_binary_example("example4", ns, "N", "N", 4, 2, 4, [ns](int x1, int x2, int s) {
        const int s1 = ns.bit(s, "S1");
        const int s2 = ns.bit(s, "S2");
        const int n = ns.bit(s, "N");
        const int b = ns.bit(s, "B");
        return Outputs{((x1 ^ s1) << 1) | (x2 ^ s2), x1 ^ n, ((b & x1) << 1) | (x2 ^ s1)};
    });
    ch.components.push_back(pair_component("Y1", "Y", true));
    ch.components.push_back(pair_component("Y2", "Y", false));
    ch.components.push_back(pair_component("BX1", "Z2", true));
    ch.components.push_back(pair_component("Z2b", "Z2", false));
    return ch;
}

IsacChannel build_example(int n) {
    switch (n) {
        case 1: return example1();
        case 2: return example2();
        case 3: return example3();
        case 4: return build_example4({});
        default: throw ArgumentError("example id must be in 1..4");
    }
}

namespace {

void check_inputs(const IsacChannel& ch, const JointDist& input) {
    for (int k = 0; k < 2; ++k) {
        const std::string& name = kChannelInputs[k];
        if (!input.contains(name)) throw SchemaError("input distribution lacks " + name);
        if (input.alphabet(name) != ch.channel.given()[k].size)
            throw SchemaError("alphabet of " + name + " differs between input and channel");
    }
}

VarList keep_needed(const JointDist& current, const std::vector<Variable>& added, const VarList& needed) {
    VarList out;
    auto want = [&](const std::string& n) { return std::find(needed.begin(), needed.end(), n) != needed.end(); };
    for (const auto& v : current.vars())
        if (want(v.name)) out.push_back(v.name);
    for (const auto& v : added)
        if (want(v.name)) out.push_back(v.name);
    return out;
}

}  // namespace

JointDist assemble_joint(const IsacChannel& ch, const JointDist& input, const std::vector<CondKernel>& extra) {
    check_inputs(ch, input);
    JointDist j = chain(product(input, ch.state), ch.channel);
    for (const auto& k : extra) j = chain(j, k);
    return j;
}

JointDist assemble_marginal(const IsacChannel& ch, const JointDist& input, const std::vector<CondKernel>& extra,
                            const VarList& keep) {
    check_inputs(ch, input);
    std::vector<VarList> needed_after(extra.size() + 1, keep);
    for (int i = static_cast<int>(extra.size()) - 1; i >= 0; --i) {
        needed_after[i] = needed_after[i + 1];
        for (const auto& v : extra[i].given()) needed_after[i].push_back(v.name);
    }
    JointDist j = product(input, ch.state);
    j = chain_marginal(j, ch.channel, keep_needed(j, ch.channel.out(), needed_after[0]));
    for (std::size_t i = 0; i < extra.size(); ++i)
        j = chain_marginal(j, extra[i], keep_needed(j, extra[i].out(), needed_after[i + 1]));
    return marginalize(j, keep);
}

JointDist with_components(const JointDist& joint, const IsacChannel& ch, const VarList& names) {
    JointDist j = joint;
    for (const auto& name : names) {
        const Component* c = ch.component(name);
        if (!c) throw NameError("channel has no component '" + name + "'");
        if (!j.contains(c->source)) throw NameError("joint lacks '" + c->source + "' needed for component '" + name + "'");
        const Variable src{c->source, j.alphabet(c->source)};
        const auto& map = c->map;
        j = chain(j, CondKernel::deterministic({src}, {{c->name, c->size}},
                                               [&](std::span<const int> g, std::span<int> o) { o[0] = map[g[0]]; }));
    }
    return j;
}

JointDist product_input(const IsacChannel& ch, double p1, double p2) {
    if (ch.size_of("X1") != 2 || ch.size_of("X2") != 2) throw ArgumentError("product_input requires binary inputs");
    return product(JointDist::bernoulli("X1", p1), JointDist::bernoulli("X2", p2));
}

}  // namespace isac
