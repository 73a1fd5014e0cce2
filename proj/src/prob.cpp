#include "isac/prob.hpp"

#include "isac/detail/odometer.hpp"
#include "isac/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

namespace isac {

using Eigen::Index;

namespace {

void check_vars(std::span<const Variable> vars, std::string_view what) {
    std::unordered_set<std::string> seen;
    for (const auto& v : vars) {
        if (v.size < 1) throw SchemaError(std::string(what) + ": variable '" + v.name + "' has empty alphabet");
        if (!seen.insert(v.name).second) throw NameError(std::string(what) + ": duplicate variable '" + v.name + "'");
    }
}

void check_probs(const Eigen::ArrayXd& p, std::string_view what) {
    for (Index i = 0; i < p.size(); ++i) {
        if (!(p[i] >= 0.0) || !std::isfinite(p[i]))
            throw SchemaError(std::string(what) + ": negative or non-finite probability");
    }
}

double plog2p(double p) { return p > 0.0 ? p * std::log2(p) : 0.0; }

double entropy_of_probs(const Eigen::ArrayXd& p) {
    double h = 0.0;
    for (Index i = 0; i < p.size(); ++i) h -= plog2p(p[i]);
    return std::max(h, 0.0);
}

std::vector<int> axes_of(const JointDist& d, const VarList& names) {
    std::vector<int> out;
    out.reserve(names.size());
    for (const auto& n : names) out.push_back(d.axis(n));
    return out;
}

std::vector<int> sizes_of(const JointDist& d) {
    std::vector<int> s;
    for (const auto& v : d.vars()) s.push_back(v.size);
    return s;
}

VarList set_union(const VarList& a, const VarList& b) {
    VarList out = a;
    for (const auto& n : b)
        if (std::find(out.begin(), out.end(), n) == out.end()) out.push_back(n);
    return out;
}

void require_disjoint(const VarList& a, const VarList& b, std::string_view what) {
    for (const auto& n : a)
        if (std::find(b.begin(), b.end(), n) != b.end())
            throw ArgumentError(std::string(what) + ": variable '" + n + "' appears in two argument sets");
}

void require_unique(const VarList& a, std::string_view what) {
    std::unordered_set<std::string> seen;
    for (const auto& n : a)
        if (!seen.insert(n).second) throw ArgumentError(std::string(what) + ": repeated variable '" + n + "'");
}

double set_entropy(const JointDist& d, const VarList& vars) {
    if (vars.empty()) return 0.0;
    return entropy_of_probs(marginalize(d, vars).probs());
}

}  // namespace

Index tensor_size(std::span<const Variable> vars) {
    Index n = 1;
    for (const auto& v : vars) {
        if (v.size < 1) throw SchemaError("variable '" + v.name + "' has empty alphabet");
        if (n > kMaxTensorSize / v.size) throw TooLarge("tensor exceeds 1e8 entries");
        n *= v.size;
    }
    return n;
}

JointDist::JointDist() : probs_(Eigen::ArrayXd::Ones(1)) {}

JointDist::JointDist(std::vector<Variable> vars, Eigen::ArrayXd probs)
    : vars_(std::move(vars)), probs_(std::move(probs)) {
    check_vars(vars_, "JointDist");
    if (probs_.size() != tensor_size(vars_)) throw SchemaError("JointDist: tensor size does not match alphabets");
    check_probs(probs_, "JointDist");
    if (std::abs(probs_.sum() - 1.0) > kNormTolerance) throw SchemaError("JointDist: probabilities do not sum to 1");
    init_strides();
}

JointDist::JointDist(Trusted, std::vector<Variable> vars, Eigen::ArrayXd probs)
    : vars_(std::move(vars)), probs_(std::move(probs)) {
    init_strides();
}

JointDist JointDist::trusted(std::vector<Variable> vars, Eigen::ArrayXd probs) {
    return JointDist(Trusted{}, std::move(vars), std::move(probs));
}

void JointDist::init_strides() {
    strides_.assign(vars_.size(), 1);
    for (int a = rank() - 2; a >= 0; --a) strides_[a] = strides_[a + 1] * vars_[a + 1].size;
}

JointDist JointDist::uniform(std::vector<Variable> vars) {
    const Index n = tensor_size(vars);
    return JointDist(std::move(vars), Eigen::ArrayXd::Constant(n, 1.0 / static_cast<double>(n)));
}

JointDist JointDist::point_mass(std::vector<Variable> vars, std::span<const int> symbols) {
    const Index n = tensor_size(vars);
    JointDist d(Trusted{}, std::move(vars), Eigen::ArrayXd::Zero(n));
    check_vars(d.vars_, "JointDist");
    d.probs_[d.flat_index(symbols)] = 1.0;
    return d;
}

JointDist JointDist::bernoulli(std::string name, double p1) {
    if (!(p1 >= 0.0 && p1 <= 1.0)) throw ArgumentError("bernoulli: parameter outside [0,1]");
    Eigen::ArrayXd p(2);
    p << 1.0 - p1, p1;
    return JointDist({{std::move(name), 2}}, p);
}

JointDist JointDist::from_pmf(std::string name, std::span<const double> pmf) {
    Eigen::ArrayXd p(static_cast<Index>(pmf.size()));
    for (std::size_t i = 0; i < pmf.size(); ++i) p[static_cast<Index>(i)] = pmf[i];
    return JointDist({{std::move(name), static_cast<int>(pmf.size())}}, p);
}

VarList JointDist::names() const {
    VarList out;
    for (const auto& v : vars_) out.push_back(v.name);
    return out;
}

bool JointDist::contains(std::string_view name) const {
    return std::any_of(vars_.begin(), vars_.end(), [&](const Variable& v) { return v.name == name; });
}

int JointDist::axis(std::string_view name) const {
    for (int a = 0; a < rank(); ++a)
        if (vars_[a].name == name) return a;
    throw NameError("unknown variable '" + std::string(name) + "'");
}

Index JointDist::flat_index(std::span<const int> symbols) const {
    if (static_cast<int>(symbols.size()) != rank()) throw ArgumentError("symbol vector has wrong length");
    Index idx = 0;
    for (int a = 0; a < rank(); ++a) {
        if (symbols[a] < 0 || symbols[a] >= vars_[a].size)
            throw ArgumentError("symbol out of range for variable '" + vars_[a].name + "'");
        idx += symbols[a] * strides_[a];
    }
    return idx;
}

void JointDist::decode(Index flat, std::span<int> symbols) const {
    for (int a = 0; a < rank(); ++a) {
        symbols[a] = static_cast<int>((flat / strides_[a]) % vars_[a].size);
    }
}

CondKernel::CondKernel(std::vector<Variable> given, std::vector<Variable> out, Eigen::ArrayXd probs)
    : given_(std::move(given)), out_(std::move(out)), probs_(std::move(probs)) {
    std::vector<Variable> all = given_;
    all.insert(all.end(), out_.begin(), out_.end());
    check_vars(all, "CondKernel");
    given_size_ = tensor_size(given_);
    out_size_ = tensor_size(out_);
    if (probs_.size() != given_size_ * out_size_) throw SchemaError("CondKernel: tensor size does not match alphabets");
    check_probs(probs_, "CondKernel");
    for (Index g = 0; g < given_size_; ++g) {
        const double s = probs_.segment(g * out_size_, out_size_).sum();
        if (std::abs(s - 1.0) > kNormTolerance) throw SchemaError("CondKernel: conditional slice does not sum to 1");
    }
}

CondKernel CondKernel::deterministic(std::vector<Variable> given, std::vector<Variable> out, const Rule& rule) {
    const Index gs = tensor_size(given);
    const Index os = tensor_size(out);
    Eigen::ArrayXd p = Eigen::ArrayXd::Zero(gs * os);
    std::vector<int> gsym(given.size(), 0);
    std::vector<int> osym(out.size(), 0);
    for (Index g = 0; g < gs; ++g) {
        Index rem = g;
        for (int a = static_cast<int>(given.size()) - 1; a >= 0; --a) {
            gsym[a] = static_cast<int>(rem % given[a].size);
            rem /= given[a].size;
        }
        rule(gsym, osym);
        Index o = 0;
        for (std::size_t a = 0; a < out.size(); ++a) {
            if (osym[a] < 0 || osym[a] >= out[a].size)
                throw SchemaError("deterministic kernel produced out-of-range symbol for '" + out[a].name + "'");
            o = o * out[a].size + osym[a];
        }
        p[g * os + o] = 1.0;
    }
    return CondKernel(std::move(given), std::move(out), std::move(p));
}

CondKernel CondKernel::tabulate(std::vector<Variable> given, std::vector<Variable> out, const Density& density) {
    const Index gs = tensor_size(given);
    const Index os = tensor_size(out);
    Eigen::ArrayXd p(gs * os);
    std::vector<int> gsym(given.size(), 0);
    std::vector<int> osym(out.size(), 0);
    for (Index g = 0; g < gs; ++g) {
        Index rem = g;
        for (int a = static_cast<int>(given.size()) - 1; a >= 0; --a) {
            gsym[a] = static_cast<int>(rem % given[a].size);
            rem /= given[a].size;
        }
        for (Index o = 0; o < os; ++o) {
            Index r = o;
            for (int a = static_cast<int>(out.size()) - 1; a >= 0; --a) {
                osym[a] = static_cast<int>(r % out[a].size);
                r /= out[a].size;
            }
            p[g * os + o] = density(gsym, osym);
        }
    }
    return CondKernel(std::move(given), std::move(out), std::move(p));
}

JointDist marginalize(const JointDist& d, const VarList& keep) {
    require_unique(keep, "marginalize");
    const std::vector<int> axes = axes_of(d, keep);
    std::vector<Variable> out_vars;
    for (int a : axes) out_vars.push_back(d.vars()[a]);
    const Index n_out = tensor_size(out_vars);

    detail::Odometer<1> od(sizes_of(d));
    Index m = 1;
    for (int i = static_cast<int>(axes.size()) - 1; i >= 0; --i) {
        od.set_multiplier(0, axes[i], m);
        m *= out_vars[i].size;
    }
    Eigen::ArrayXd out = Eigen::ArrayXd::Zero(n_out);
    const Eigen::ArrayXd& p = d.probs();
    Index i = 0;
    do {
        if (p[i] != 0.0) out[od.value(0)] += p[i];
        ++i;
    } while (od.next());
    return JointDist::trusted(std::move(out_vars), std::move(out));
}

JointDist condition(const JointDist& d, const Assignment& on) {
    std::vector<int> fixed(d.rank(), -1);
    for (const auto& [name, sym] : on) {
        const int a = d.axis(name);
        if (sym < 0 || sym >= d.vars()[a].size) throw ArgumentError("condition: symbol out of range for '" + name + "'");
        if (fixed[a] >= 0 && fixed[a] != sym) throw DegenerateEvent("condition: contradictory assignment");
        fixed[a] = sym;
    }
    Eigen::ArrayXd out = Eigen::ArrayXd::Zero(d.size());
    detail::Odometer<1> od(sizes_of(d));
    const Eigen::ArrayXd& p = d.probs();
    double mass = 0.0;
    Index i = 0;
    do {
        bool match = true;
        for (int a = 0; a < d.rank() && match; ++a) match = fixed[a] < 0 || od.symbol(a) == fixed[a];
        if (match) {
            out[i] = p[i];
            mass += p[i];
        }
        ++i;
    } while (od.next());
    if (!(mass > 0.0)) throw DegenerateEvent("condition: conditioning event has zero probability");
    out /= mass;
    return JointDist::trusted(d.vars(), std::move(out));
}

namespace {

void check_chain_schema(const JointDist& prior, const CondKernel& k, std::vector<int>& given_axes) {
    for (const auto& v : k.given()) {
        const int a = prior.axis(v.name);
        if (prior.vars()[a].size != v.size)
            throw SchemaError("chain: alphabet of '" + v.name + "' differs between prior and kernel");
        given_axes.push_back(a);
    }
    for (const auto& v : k.out())
        if (prior.contains(v.name)) throw NameError("chain: output variable '" + v.name + "' already in prior");
}

}  // namespace

JointDist chain(const JointDist& prior, const CondKernel& k) {
    std::vector<int> given_axes;
    check_chain_schema(prior, k, given_axes);
    std::vector<Variable> vars = prior.vars();
    vars.insert(vars.end(), k.out().begin(), k.out().end());
    const Index os = k.out_size();
    const Index total = tensor_size(vars);

    detail::Odometer<1> od(sizes_of(prior));
    Index m = 1;
    for (int i = static_cast<int>(given_axes.size()) - 1; i >= 0; --i) {
        od.set_multiplier(0, given_axes[i], m);
        m *= k.given()[i].size;
    }
    Eigen::ArrayXd out = Eigen::ArrayXd::Zero(total);
    const Eigen::ArrayXd& p = prior.probs();
    const Eigen::ArrayXd& kp = k.probs();
    Index i = 0;
    do {
        const double w = p[i];
        if (w != 0.0) {
            const Index g = od.value(0) * os;
            for (Index o = 0; o < os; ++o) out[i * os + o] = w * kp[g + o];
        }
        ++i;
    } while (od.next());
    return JointDist::trusted(std::move(vars), std::move(out));
}

JointDist chain_marginal(const JointDist& prior, const CondKernel& k, const VarList& keep) {
    require_unique(keep, "chain_marginal");
    std::vector<int> given_axes;
    check_chain_schema(prior, k, given_axes);

    // Locate each kept variable either in the prior or in the kernel output.
    std::vector<Variable> out_vars;
    std::vector<int> prior_pos;
    std::vector<int> kernel_pos;
    for (const auto& name : keep) {
        if (prior.contains(name)) {
            const int a = prior.axis(name);
            out_vars.push_back(prior.vars()[a]);
            prior_pos.push_back(a);
            kernel_pos.push_back(-1);
            continue;
        }
        auto it = std::find_if(k.out().begin(), k.out().end(), [&](const Variable& v) { return v.name == name; });
        if (it == k.out().end()) throw NameError("unknown variable '" + name + "'");
        out_vars.push_back(*it);
        prior_pos.push_back(-1);
        kernel_pos.push_back(static_cast<int>(it - k.out().begin()));
    }
    const Index n_out = tensor_size(out_vars);

    std::vector<Index> out_mult(keep.size(), 1);
    for (int i = static_cast<int>(keep.size()) - 2; i >= 0; --i) out_mult[i] = out_mult[i + 1] * out_vars[i + 1].size;

    detail::Odometer<2> od(sizes_of(prior));
    Index m = 1;
    for (int i = static_cast<int>(given_axes.size()) - 1; i >= 0; --i) {
        od.set_multiplier(0, given_axes[i], m);
        m *= k.given()[i].size;
    }
    for (std::size_t i = 0; i < keep.size(); ++i)
        if (prior_pos[i] >= 0) od.set_multiplier(1, prior_pos[i], out_mult[i]);

    // Contribution of each kernel output index to the kept index.
    const Index os = k.out_size();
    std::vector<Index> kout_contrib(static_cast<std::size_t>(os), 0);
    {
        std::vector<int> ksizes;
        for (const auto& v : k.out()) ksizes.push_back(v.size);
        detail::Odometer<1> ko(ksizes);
        for (std::size_t i = 0; i < keep.size(); ++i)
            if (kernel_pos[i] >= 0) ko.set_multiplier(0, kernel_pos[i], out_mult[i]);
        Index o = 0;
        do {
            kout_contrib[static_cast<std::size_t>(o++)] = ko.value(0);
        } while (ko.next());
    }

    Eigen::ArrayXd out = Eigen::ArrayXd::Zero(n_out);
    const Eigen::ArrayXd& p = prior.probs();
    const Eigen::ArrayXd& kp = k.probs();
    Index i = 0;
    do {
        const double w = p[i];
        if (w != 0.0) {
            const Index g = od.value(0) * os;
            const Index base = od.value(1);
            for (Index o = 0; o < os; ++o) {
                const double q = kp[g + o];
                if (q != 0.0) out[base + kout_contrib[static_cast<std::size_t>(o)]] += w * q;
            }
        }
        ++i;
    } while (od.next());
    return JointDist::trusted(std::move(out_vars), std::move(out));
}

JointDist product(const JointDist& a, const JointDist& b) {
    std::vector<Variable> vars = a.vars();
    for (const auto& v : b.vars()) {
        if (a.contains(v.name)) throw NameError("product: variable '" + v.name + "' in both factors");
        vars.push_back(v);
    }
    const Index total = tensor_size(vars);
    Eigen::ArrayXd out(total);
    for (Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a.probs()[i] * b.probs();
    return JointDist::trusted(std::move(vars), std::move(out));
}

double entropy(const JointDist& d, const VarList& of, const VarList& given) {
    require_unique(of, "entropy");
    require_unique(given, "entropy");
    require_disjoint(of, given, "entropy");
    for (const auto& n : of) d.axis(n);
    for (const auto& n : given) d.axis(n);
    const double h = set_entropy(d, set_union(given, of)) - set_entropy(d, given);
    return std::max(h, 0.0);
}

double mutual_info(const JointDist& d, const VarList& a, const VarList& b, const VarList& given) {
    require_unique(a, "mutual_info");
    require_unique(b, "mutual_info");
    require_unique(given, "mutual_info");
    require_disjoint(a, b, "mutual_info");
    require_disjoint(a, given, "mutual_info");
    require_disjoint(b, given, "mutual_info");
    for (const auto* s : {&a, &b, &given})
        for (const auto& n : *s) d.axis(n);
    const VarList ag = set_union(given, a);
    const VarList bg = set_union(given, b);
    const VarList abg = set_union(ag, b);
    const double v = set_entropy(d, ag) + set_entropy(d, bg) - set_entropy(d, abg) - set_entropy(d, given);
    return clamp_information(v, "mutual_info");
}

double binary_entropy(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw ArgumentError("binary_entropy: argument outside [0,1]");
    return -plog2p(p) - plog2p(1.0 - p);
}

double clamp_information(double value, std::string_view what) {
    if (value < kMiFloor)
        throw InternalError(std::string(what) + ": negative information " + std::to_string(value) + " below round-off floor");
    return value < 0.0 ? 0.0 : value;
}

}  // namespace isac
