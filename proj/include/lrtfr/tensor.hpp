#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <vector>

#include "lrtfr/errors.hpp"

namespace lrtfr {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = std::int64_t;
using Dims3 = std::array<Index, 3>;

/// Dense third-order tensor of doubles. Element (i,j,k) lives at linear
/// index (i*n2 + j)*n3 + k, i.e. the last mode varies fastest.
class DenseTensor3 {
public:
    DenseTensor3() : dims_{0, 0, 0} {}
    DenseTensor3(Index n1, Index n2, Index n3, double fill = 0.0);

    /// Takes ownership of `data`; length must equal n1*n2*n3 and every entry
    /// must be finite.
    static DenseTensor3 from_data(Dims3 dims, std::vector<double> data);

    const Dims3& dims() const { return dims_; }
    Index dim(int mode) const {
        if (mode < 1 || mode > 3) throw DimensionError("tensor mode must be 1, 2, or 3");
        return dims_[static_cast<std::size_t>(mode - 1)];
    }
    Index size() const { return static_cast<Index>(data_.size()); }

    double operator()(Index i, Index j, Index k) const {
        return data_[static_cast<std::size_t>((i * dims_[1] + j) * dims_[2] + k)];
    }
    double& operator()(Index i, Index j, Index k) {
        return data_[static_cast<std::size_t>((i * dims_[1] + j) * dims_[2] + k)];
    }

    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

    bool same_dims(const DenseTensor3& other) const { return dims_ == other.dims_; }
    bool all_finite() const;

private:
    Dims3 dims_;
    std::vector<double> data_;
};

/// Binary observation mask over the same layout as DenseTensor3.
/// Entries are exactly 0.0 or 1.0.
class Mask3 {
public:
    Mask3() = default;
    Mask3(Index n1, Index n2, Index n3, double fill = 0.0);
    static Mask3 from_data(Dims3 dims, std::vector<double> data);
    static Mask3 from_tensor(const DenseTensor3& t);

    const Dims3& dims() const { return tensor_.dims(); }
    Index size() const { return tensor_.size(); }
    double operator()(Index i, Index j, Index k) const { return tensor_(i, j, k); }
    void set(Index i, Index j, Index k, bool observed);
    const DenseTensor3& as_tensor() const { return tensor_; }
    Index count_observed() const;

private:
    DenseTensor3 tensor_;
};

// Mode-m unfolding, m in {1,2,3}. Column order is frozen:
//   mode 1: (i, j*n3 + k), mode 2: (j, i*n3 + k), mode 3: (k, i*n2 + j).
Matrix unfold(const DenseTensor3& t, int mode);

// Exact inverse of unfold for the layout above.
DenseTensor3 fold(const Matrix& m, int mode, Dims3 dims);

// Tensor-matrix product along `mode`: fold(a * unfold(t, mode), mode, ...).
// a must have as many columns as t's mode-`mode` size.
DenseTensor3 mode_product(const DenseTensor3& t, const Matrix& a, int mode);

double frobenius_norm(const DenseTensor3& t);
double l1_norm(const DenseTensor3& t);

// Anisotropic l1 total variation of the first two (spatial) modes, summed
// over frontal slices. No differences along mode 3, no wrap-around.
double tv_seminorm(const DenseTensor3& t);

// Elementwise sgn(x) * max(|x| - v, 0); exact minimizer of (x-s)^2 + 2v|s|.
DenseTensor3 soft_threshold(const DenseTensor3& t, double v);

// Per-mode count of singular values of unfold(t, mode) above
// rel_tol * sigma_max. The zero tensor has rank (0,0,0).
std::array<Index, 3> numerical_tucker_rank(const DenseTensor3& t, double rel_tol = 1e-8);

}  // namespace lrtfr
