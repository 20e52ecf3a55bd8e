#pragma once

// Small dense LU factorization with partial pivoting for the fixed-size
// boundary-condition systems (2x2, 4x4, 6x6).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>

#include "uds/error.hpp"

namespace uds::linalg {

template <std::size_t N>
using Matrix = std::array<std::array<double, N>, N>;

template <std::size_t N>
using Vector = std::array<double, N>;

inline constexpr double kMaxCondition = 1e12;

template <std::size_t N>
[[nodiscard]] double norm1(const Matrix<N>& a) {
    double best = 0.0;
    for (std::size_t j = 0; j < N; ++j) {
        double col = 0.0;
        for (std::size_t i = 0; i < N; ++i) col += std::abs(a[i][j]);
        best = std::max(best, col);
    }
    return best;
}

template <std::size_t N>
class LuFactorization {
public:
    /// Factors `a`. Throws DegenerateDuration when a pivot vanishes or the
    /// 1-norm condition number exceeds kMaxCondition.
    explicit LuFactorization(const Matrix<N>& a) : lu_(a) {
        for (std::size_t i = 0; i < N; ++i) perm_[i] = i;

        for (std::size_t k = 0; k < N; ++k) {
            std::size_t pivot = k;
            double best = std::abs(lu_[k][k]);
            for (std::size_t i = k + 1; i < N; ++i) {
                if (std::abs(lu_[i][k]) > best) {
                    best = std::abs(lu_[i][k]);
                    pivot = i;
                }
            }
            if (!(best > 0.0) || !std::isfinite(best)) {
                throw Error(ErrorCode::DegenerateDuration, "singular boundary-condition matrix");
            }
            if (pivot != k) {
                std::swap(lu_[pivot], lu_[k]);
                std::swap(perm_[pivot], perm_[k]);
            }
            for (std::size_t i = k + 1; i < N; ++i) {
                const double f = lu_[i][k] / lu_[k][k];
                lu_[i][k] = f;
                for (std::size_t j = k + 1; j < N; ++j) lu_[i][j] -= f * lu_[k][j];
            }
        }

        // Exact inverse columns are cheap at these sizes.
        Matrix<N> inv{};
        for (std::size_t j = 0; j < N; ++j) {
            Vector<N> e{};
            e[j] = 1.0;
            const auto col = solve(e);
            for (std::size_t i = 0; i < N; ++i) inv[i][j] = col[i];
        }
        condition_ = norm1(a) * norm1(inv);
        if (!(condition_ <= kMaxCondition)) {
            throw Error(ErrorCode::DegenerateDuration,
                        "ill-conditioned boundary-condition matrix (condition " + std::to_string(condition_) + ")");
        }
    }

    [[nodiscard]] Vector<N> solve(const Vector<N>& b) const {
        Vector<N> x{};
        for (std::size_t i = 0; i < N; ++i) {
            double s = b[perm_[i]];
            for (std::size_t j = 0; j < i; ++j) s -= lu_[i][j] * x[j];
            x[i] = s;
        }
        for (std::size_t i = N; i-- > 0;) {
            double s = x[i];
            for (std::size_t j = i + 1; j < N; ++j) s -= lu_[i][j] * x[j];
            x[i] = s / lu_[i][i];
        }
        return x;
    }

    /// 1-norm condition number of the factored matrix.
    [[nodiscard]] double condition() const noexcept { return condition_; }

private:
    Matrix<N> lu_;
    std::array<std::size_t, N> perm_{};
    double condition_ = 1.0;
};

}  // namespace uds::linalg
