#include "lrtfr/tensor.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <string>

namespace lrtfr {

namespace {

void check_mode(int mode) {
    if (mode < 1 || mode > 3) {
        throw DimensionError("tensor mode must be 1, 2, or 3, got " + std::to_string(mode));
    }
}

void check_dims(Dims3 dims) {
    if (dims[0] < 1 || dims[1] < 1 || dims[2] < 1) {
        throw DimensionError("tensor dims must be positive");
    }
}

}  // namespace

DenseTensor3::DenseTensor3(Index n1, Index n2, Index n3, double fill) : dims_{n1, n2, n3} {
    check_dims(dims_);
    data_.assign(static_cast<std::size_t>(n1 * n2 * n3), fill);
}

DenseTensor3 DenseTensor3::from_data(Dims3 dims, std::vector<double> data) {
    check_dims(dims);
    if (static_cast<Index>(data.size()) != dims[0] * dims[1] * dims[2]) {
        throw DimensionError("data length does not match tensor dims");
    }
    DenseTensor3 t;
    t.dims_ = dims;
    t.data_ = std::move(data);
    if (!t.all_finite()) {
        throw NumericalError("tensor contains non-finite entries");
    }
    return t;
}

bool DenseTensor3::all_finite() const {
    for (double x : data_) {
        if (!std::isfinite(x)) return false;
    }
    return true;
}

Mask3::Mask3(Index n1, Index n2, Index n3, double fill) : tensor_(n1, n2, n3, fill) {
    if (fill != 0.0 && fill != 1.0) {
        throw DimensionError("mask entries must be 0 or 1");
    }
}

Mask3 Mask3::from_data(Dims3 dims, std::vector<double> data) {
    return from_tensor(DenseTensor3::from_data(dims, std::move(data)));
}

Mask3 Mask3::from_tensor(const DenseTensor3& t) {
    for (double x : t.data()) {
        if (x != 0.0 && x != 1.0) {
            throw FormatError("mask entries must be exactly 0 or 1");
        }
    }
    Mask3 m;
    m.tensor_ = t;
    return m;
}

void Mask3::set(Index i, Index j, Index k, bool observed) {
    tensor_(i, j, k) = observed ? 1.0 : 0.0;
}

Index Mask3::count_observed() const {
    Index n = 0;
    for (double x : tensor_.data()) {
        n += (x != 0.0);
    }
    return n;
}

Matrix unfold(const DenseTensor3& t, int mode) {
    check_mode(mode);
    const auto [n1, n2, n3] = t.dims();
    Matrix m;
    switch (mode) {
        case 1:
            m.resize(n1, n2 * n3);
            for (Index i = 0; i < n1; ++i)
                for (Index j = 0; j < n2; ++j)
                    for (Index k = 0; k < n3; ++k) m(i, j * n3 + k) = t(i, j, k);
            break;
        case 2:
            m.resize(n2, n1 * n3);
            for (Index i = 0; i < n1; ++i)
                for (Index j = 0; j < n2; ++j)
                    for (Index k = 0; k < n3; ++k) m(j, i * n3 + k) = t(i, j, k);
            break;
        default:
            m.resize(n3, n1 * n2);
            for (Index i = 0; i < n1; ++i)
                for (Index j = 0; j < n2; ++j)
                    for (Index k = 0; k < n3; ++k) m(k, i * n2 + j) = t(i, j, k);
            break;
    }
    return m;
}

DenseTensor3 fold(const Matrix& m, int mode, Dims3 dims) {
    check_mode(mode);
    check_dims(dims);
    const auto [n1, n2, n3] = dims;
    const Index rows = dims[static_cast<std::size_t>(mode - 1)];
    const Index cols = n1 * n2 * n3 / rows;
    if (m.rows() != rows || m.cols() != cols) {
        throw DimensionError("fold: matrix shape does not match requested dims");
    }
    DenseTensor3 t(n1, n2, n3);
    switch (mode) {
        case 1:
            for (Index i = 0; i < n1; ++i)
                for (Index j = 0; j < n2; ++j)
                    for (Index k = 0; k < n3; ++k) t(i, j, k) = m(i, j * n3 + k);
            break;
        case 2:
            for (Index i = 0; i < n1; ++i)
                for (Index j = 0; j < n2; ++j)
                    for (Index k = 0; k < n3; ++k) t(i, j, k) = m(j, i * n3 + k);
            break;
        default:
            for (Index i = 0; i < n1; ++i)
                for (Index j = 0; j < n2; ++j)
                    for (Index k = 0; k < n3; ++k) t(i, j, k) = m(k, i * n2 + j);
            break;
    }
    return t;
}

DenseTensor3 mode_product(const DenseTensor3& t, const Matrix& a, int mode) {
    check_mode(mode);
    if (a.cols() != t.dim(mode)) {
        throw DimensionError("mode_product: matrix has " + std::to_string(a.cols()) +
                             " cols, tensor mode size is " + std::to_string(t.dim(mode)));
    }
    Dims3 dims = t.dims();
    dims[static_cast<std::size_t>(mode - 1)] = a.rows();
    return fold(a * unfold(t, mode), mode, dims);
}

double frobenius_norm(const DenseTensor3& t) {
    double s = 0.0;
    for (double x : t.data()) s += x * x;
    return std::sqrt(s);
}

double l1_norm(const DenseTensor3& t) {
    double s = 0.0;
    for (double x : t.data()) s += std::abs(x);
    return s;
}

double tv_seminorm(const DenseTensor3& t) {
    const auto [n1, n2, n3] = t.dims();
    double s = 0.0;
    for (Index k = 0; k < n3; ++k) {
        for (Index i = 0; i + 1 < n1; ++i)
            for (Index j = 0; j < n2; ++j) s += std::abs(t(i + 1, j, k) - t(i, j, k));
        for (Index i = 0; i < n1; ++i)
            for (Index j = 0; j + 1 < n2; ++j) s += std::abs(t(i, j + 1, k) - t(i, j, k));
    }
    return s;
}

DenseTensor3 soft_threshold(const DenseTensor3& t, double v) {
    if (v < 0.0) {
        throw std::invalid_argument("soft_threshold: threshold must be nonnegative");
    }
    DenseTensor3 out = t;
    for (double& x : out.data()) {
        const double mag = std::abs(x) - v;
        x = mag > 0.0 ? (x > 0.0 ? mag : -mag) : 0.0;
    }
    return out;
}

std::array<Index, 3> numerical_tucker_rank(const DenseTensor3& t, double rel_tol) {
    if (rel_tol <= 0.0) {
        throw std::invalid_argument("numerical_tucker_rank: rel_tol must be positive");
    }
    std::array<Index, 3> ranks{0, 0, 0};
    for (int mode = 1; mode <= 3; ++mode) {
        const Matrix m = unfold(t, mode);
        Eigen::BDCSVD<Matrix> svd(m);
        if (svd.info() != Eigen::Success) {
            throw NumericalError("SVD did not converge on mode " + std::to_string(mode));
        }
        const Vector& sv = svd.singularValues();
        if (sv.size() == 0 || sv(0) == 0.0) continue;
        const double cut = rel_tol * sv(0);
        Index r = 0;
        for (Eigen::Index i = 0; i < sv.size(); ++i) r += (sv(i) > cut);
        ranks[static_cast<std::size_t>(mode - 1)] = r;
    }
    return ranks;
}

}  // namespace lrtfr
