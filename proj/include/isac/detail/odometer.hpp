#pragma once

#include <Eigen/Core>

#include <array>
#include <vector>

namespace isac::detail {

// Walks a mixed-radix index space in row-major order while maintaining
// up to N linear projections of the current symbol vector.
template <int N>
class Odometer {
public:
    explicit Odometer(std::vector<int> sizes) : sizes_(std::move(sizes)), symbols_(sizes_.size(), 0) {
        for (auto& m : mult_) m.assign(sizes_.size(), 0);
        value_.fill(0);
    }

    void set_multiplier(int tracker, int axis, Eigen::Index m) { mult_[tracker][axis] = m; }

    Eigen::Index value(int tracker) const { return value_[tracker]; }
    int symbol(int axis) const { return symbols_[axis]; }
    const std::vector<int>& symbols() const { return symbols_; }

    // Returns false after wrapping past the last index.
    bool next() {
        for (int a = static_cast<int>(sizes_.size()) - 1; a >= 0; --a) {
            if (++symbols_[a] < sizes_[a]) {
                for (int t = 0; t < N; ++t) value_[t] += mult_[t][a];
                return true;
            }
            symbols_[a] = 0;
            for (int t = 0; t < N; ++t) value_[t] -= mult_[t][a] * (sizes_[a] - 1);
        }
        return false;
    }

private:
    std::vector<int> sizes_;
    std::vector<int> symbols_;
    std::array<std::vector<Eigen::Index>, N> mult_;
    std::array<Eigen::Index, N> value_;
};

}  // namespace isac::detail
