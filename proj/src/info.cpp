#include "isac/info.hpp"

#include "isac/detail/odometer.hpp"
#include "isac/errors.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#if defined(__BMI2__)
#include <immintrin.h>
#endif

namespace isac {

namespace {

constexpr int kDenseBits = 20;

std::uint64_t extract_bits(std::uint64_t key, std::uint64_t bits) {
#if defined(__BMI2__)
    return _pext_u64(key, bits);
#else
    std::uint64_t out = 0;
    int pos = 0;
    while (bits) {
        const std::uint64_t low = bits & (~bits + 1);
        if (key & low) out |= std::uint64_t{1} << pos;
        ++pos;
        bits ^= low;
    }
    return out;
#endif
}

double neg_plog2p(double p) { return p > 0.0 ? -p * std::log2(p) : 0.0; }

}  // namespace

void InfoTable::init_fields() {
    if (vars_.size() > 64) throw TooLarge("InfoTable: more than 64 variables");
    field_.assign(vars_.size(), 0);
    shift_.assign(vars_.size(), 0);
    int shift = 0;
    for (std::size_t a = 0; a < vars_.size(); ++a) {
        const int width = vars_[a].size <= 1 ? 0 : std::bit_width(static_cast<unsigned>(vars_[a].size - 1));
        shift_[a] = shift;
        if (width > 0 && shift + width <= 64) field_[a] = ((std::uint64_t{1} << width) - 1) << shift;
        shift += width;
    }
    packed_ = shift <= 64;
}

InfoTable::InfoTable(const JointDist& d) : vars_(d.vars()) {
    init_fields();
    if (!packed_) {
        dense_ = d;
        return;
    }
    std::vector<int> sizes;
    for (const auto& v : d.vars()) sizes.push_back(v.size);
    detail::Odometer<0> od(sizes);
    const Eigen::ArrayXd& p = d.probs();
    Eigen::Index i = 0;
    do {
        if (p[i] > 0.0) {
            std::uint64_t key = 0;
            for (int a = 0; a < d.rank(); ++a) key |= static_cast<std::uint64_t>(od.symbol(a)) << shift_[a];
            keys_.push_back(key);
            weights_.push_back(p[i]);
        }
        ++i;
    } while (od.next());
}

int InfoTable::axis(std::string_view name) const {
    for (std::size_t a = 0; a < vars_.size(); ++a)
        if (vars_[a].name == name) return static_cast<int>(a);
    throw NameError("unknown variable '" + std::string(name) + "'");
}

int InfoTable::symbol(std::size_t row, int a) const {
    return static_cast<int>((keys_[row] & field_[static_cast<std::size_t>(a)]) >> shift_[static_cast<std::size_t>(a)]);
}

JointDist InfoTable::marginal(const VarList& keep) const {
    if (dense_) return isac::marginalize(*dense_, keep);
    std::vector<Variable> out;
    std::vector<int> axes;
    for (const auto& n : keep) {
        axes.push_back(axis(n));
        out.push_back(vars_[static_cast<std::size_t>(axes.back())]);
    }
    Eigen::ArrayXd probs = Eigen::ArrayXd::Zero(tensor_size(out));
    for (std::size_t r = 0; r < keys_.size(); ++r) {
        Eigen::Index idx = 0;
        for (std::size_t j = 0; j < axes.size(); ++j) idx = idx * out[j].size + symbol(r, axes[j]);
        probs[idx] += weights_[r];
    }
    return JointDist::trusted(std::move(out), std::move(probs));
}

InfoTable InfoTable::extend(const CondKernel& k) const {
    for (const auto& v : k.out())
        for (const auto& w : vars_)
            if (v.name == w.name) throw NameError("kernel output '" + v.name + "' already present");
    if (dense_) return InfoTable(chain(*dense_, k));
    InfoTable t;
    t.vars_ = vars_;
    t.vars_.insert(t.vars_.end(), k.out().begin(), k.out().end());
    t.init_fields();
    if (!t.packed_) {
        VarList all;
        for (const auto& v : vars_) all.push_back(v.name);
        return InfoTable(chain(marginal(all), k));
    }
    std::vector<int> given_axes;
    for (const auto& g : k.given()) {
        given_axes.push_back(axis(g.name));
        if (vars_[static_cast<std::size_t>(given_axes.back())].size != g.size)
            throw SchemaError("kernel alphabet for '" + g.name + "' differs from the table");
    }
    const std::size_t n_out = k.out().size();
    const std::size_t base = vars_.size();
    t.keys_.reserve(keys_.size() * static_cast<std::size_t>(k.out_size()));
    t.weights_.reserve(t.keys_.capacity());
    for (std::size_t r = 0; r < keys_.size(); ++r) {
        Eigen::Index g = 0;
        for (std::size_t j = 0; j < given_axes.size(); ++j) g = g * k.given()[j].size + symbol(r, given_axes[j]);
        for (Eigen::Index o = 0; o < k.out_size(); ++o) {
            const double q = k.at(g, o);
            if (!(q > 0.0)) continue;
            std::uint64_t key = keys_[r];
            Eigen::Index rest = o;
            for (std::size_t j = n_out; j-- > 0;) {
                const int size = k.out()[j].size;
                key |= static_cast<std::uint64_t>(rest % size) << t.shift_[base + j];
                rest /= size;
            }
            t.keys_.push_back(key);
            t.weights_.push_back(weights_[r] * q);
        }
    }
    return t;
}

std::uint64_t InfoTable::mask(const VarList& names) const {
    std::uint64_t m = 0;
    for (const auto& n : names) m |= std::uint64_t{1} << axis(n);
    return m;
}

double InfoTable::entropy_of(std::uint64_t axes) {
    // Singleton alphabets carry no information; drop them so equal sets share a key.
    std::uint64_t norm = 0;
    for (std::uint64_t rest = axes; rest; rest &= rest - 1) {
        const int a = std::countr_zero(rest);
        if (vars_[static_cast<std::size_t>(a)].size > 1) norm |= std::uint64_t{1} << a;
    }
    if (norm == 0) return 0.0;
    if (auto it = memo_.find(norm); it != memo_.end()) return it->second;
    const double h = compute(norm);
    memo_.emplace(norm, h);
    return h;
}

double InfoTable::compute(std::uint64_t axes) {
    if (!packed_) {
        VarList names;
        for (std::uint64_t rest = axes; rest; rest &= rest - 1)
            names.push_back(vars_[static_cast<std::size_t>(std::countr_zero(rest))].name);
        return entropy(*dense_, names);
    }
    std::uint64_t bits = 0;
    for (std::uint64_t rest = axes; rest; rest &= rest - 1) bits |= field_[std::countr_zero(rest)];
    const int nbits = std::popcount(bits);
    double h = 0.0;
    if (nbits <= kDenseBits) {
        const std::size_t need = std::size_t{1} << nbits;
        if (scratch_.size() < need) scratch_.assign(need, 0.0);
        for (std::size_t r = 0; r < keys_.size(); ++r) {
            const auto k = static_cast<std::uint32_t>(extract_bits(keys_[r], bits));
            if (scratch_[k] == 0.0) touched_.push_back(k);
            scratch_[k] += weights_[r];
        }
        for (auto k : touched_) {
            h += neg_plog2p(scratch_[k]);
            scratch_[k] = 0.0;
        }
        touched_.clear();
    } else {
        std::vector<std::pair<std::uint64_t, double>> rows;
        rows.reserve(keys_.size());
        for (std::size_t r = 0; r < keys_.size(); ++r) rows.emplace_back(keys_[r] & bits, weights_[r]);
        std::sort(rows.begin(), rows.end());
        for (std::size_t r = 0; r < rows.size();) {
            double s = 0.0;
            std::size_t q = r;
            for (; q < rows.size() && rows[q].first == rows[r].first; ++q) s += rows[q].second;
            h += neg_plog2p(s);
            r = q;
        }
    }
    return std::max(h, 0.0);
}

double InfoTable::H(const VarList& of, const VarList& given) {
    const std::uint64_t g = mask(given);
    const std::uint64_t o = mask(of);
    if (o & g) throw ArgumentError("InfoTable::H: argument sets overlap");
    return std::max(entropy_of(o | g) - entropy_of(g), 0.0);
}

double InfoTable::I(const VarList& a, const VarList& b, const VarList& given) {
    const std::uint64_t ma = mask(a);
    const std::uint64_t mb = mask(b);
    const std::uint64_t mg = mask(given);
    if ((ma & mb) || (ma & mg) || (mb & mg)) throw ArgumentError("InfoTable::I: argument sets overlap");
    const double v = entropy_of(ma | mg) + entropy_of(mb | mg) - entropy_of(ma | mb | mg) - entropy_of(mg);
    return clamp_information(v, "InfoTable::I");
}

}  // namespace isac
