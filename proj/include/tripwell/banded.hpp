#pragma once

#include <cstddef>
#include <vector>

namespace tripwell {

// Symmetric pentadiagonal matrix: d = diagonal, e = first, f = second
// super-diagonal.
struct Pentadiagonal {
    std::vector<double> d, e, f;
    explicit Pentadiagonal(std::size_t n = 0) : d(n, 0.0), e(n, 0.0), f(n, 0.0) {}
    std::size_t size() const { return d.size(); }
};

// In-place LDL^T of (A + shift*diag(weight)). Returns false when a pivot is
// not safely positive, i.e. the shifted matrix is not positive definite.
class PentaLDL {
public:
    bool factor(const Pentadiagonal& a, double shift, const std::vector<double>& weight,
                double pivot_floor) {
        const std::size_t n = a.size();
        D_.assign(n, 0.0);
        L1_.assign(n, 0.0);
        L2_.assign(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            double di = a.d[i] + shift * weight[i];
            if (i >= 1) di -= L1_[i - 1] * L1_[i - 1] * D_[i - 1];
            if (i >= 2) di -= L2_[i - 2] * L2_[i - 2] * D_[i - 2];
            if (!(di > pivot_floor * (weight[i] > 0 ? weight[i] : 1.0))) return false;
            D_[i] = di;
            if (i + 1 < n) {
                double s = a.e[i];
                if (i >= 1) s -= L2_[i - 1] * L1_[i - 1] * D_[i - 1];
                L1_[i] = s / di;
            }
            if (i + 2 < n) L2_[i] = a.f[i] / di;
        }
        return true;
    }

    // Solve (L D L^T) x = b.
    std::vector<double> solve(const std::vector<double>& b) const {
        const std::size_t n = D_.size();
        std::vector<double> y(b);
        for (std::size_t i = 0; i < n; ++i) {
            if (i >= 1) y[i] -= L1_[i - 1] * y[i - 1];
            if (i >= 2) y[i] -= L2_[i - 2] * y[i - 2];
        }
        for (std::size_t i = 0; i < n; ++i) y[i] /= D_[i];
        for (std::size_t i = n; i-- > 0;) {
            if (i + 1 < n) y[i] -= L1_[i] * y[i + 1];
            if (i + 2 < n) y[i] -= L2_[i] * y[i + 2];
        }
        return y;
    }

private:
    std::vector<double> D_, L1_, L2_;
};

}  // namespace tripwell
