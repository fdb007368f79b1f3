#pragma once

#include <cstdint>
#include <vector>

#include "lrtfr/tensor.hpp"

namespace lrtfr {

/// Gradients shape-mirroring Mlp::weights, layer order.
using MlpGrad = std::vector<Matrix>;

/// Intermediate states of one forward pass, reusable by backward.
/// pre[i] and act[i] belong to activated layer i+1 (there are depth-1 of them).
struct MlpCache {
    std::vector<Matrix> pre;  // n x h pre-activations
    std::vector<Matrix> act;  // sin(omega0 * pre)
};

/// Bias-free sine MLP mapping a scalar coordinate to an out_dim vector:
///   f(x) = H_d * s(H_{d-1} * ... * s(H_1 * x)),  s(t) = sin(omega0 * t).
/// weights[0] is h x 1, middle layers h x h, weights[d-1] is r x h.
struct Mlp {
    double omega0 = 1.0;
    std::vector<Matrix> weights;

    int depth() const { return static_cast<int>(weights.size()); }
    Index hidden() const { return weights.front().rows(); }
    Index out_dim() const { return weights.back().rows(); }

    /// Throws DimensionError/NumericalError if the layer chain is malformed,
    /// omega0 <= 0, or any weight is non-finite.
    void validate() const;

    /// Row i of the result is f(coords[i]). Fills *cache when given.
    Matrix forward(const Vector& coords, MlpCache* cache = nullptr) const;

    /// Gradient of <upstream, forward(coords)> w.r.t. every weight matrix.
    /// The cache must come from forward() on the same coords.
    MlpGrad backward(const Vector& coords, const Matrix& upstream, const MlpCache& cache) const;
    MlpGrad backward(const Vector& coords, const Matrix& upstream) const;

    /// max over layers of the entrywise l1 sum (dominates the induced l1
    /// norm, so budgets built from it stay valid).
    double entrywise_l1_max() const;
};

/// Deterministic init: layer 1 uniform [-1,1], deeper layers uniform
/// [-sqrt(6/h)/omega0, sqrt(6/h)/omega0] (keeps pre-activations in the sine's
/// useful range).
Mlp init_mlp(Index r, Index h, int d, double omega0, std::uint64_t seed);

/// eta^(3d+1) * kappa^(3d-3) * zeta^2. On overflow returns +Inf and sets
/// *overflow when provided.
double lipschitz_budget(double eta, double kappa, int d, double zeta, bool* overflow = nullptr);

}  // namespace lrtfr
