#pragma once

#include <array>
#include <cstdint>

#include "lrtfr/mlp.hpp"
#include "lrtfr/tensor.hpp"

namespace lrtfr {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

/// Sampling coordinates per axis; repetition is allowed.
struct CoordinateGrid {
    Vector xs, ys, zs;
};

/// Continuous tensor representation: core contracted with three
/// coordinate-wise sine MLPs. `domain` records the trained region per axis;
/// coordinates are affinely mapped to [-1,1] before entering the MLPs
/// (degenerate intervals map to 0), so callers always pass external
/// coordinates.
struct LrtfrModel {
    DenseTensor3 core;  // r1 x r2 x r3
    Mlp mlp_x, mlp_y, mlp_z;
    std::array<Interval, 3> domain{};

    Dims3 ranks() const { return core.dims(); }
    void validate() const;

    /// axis in {0,1,2}; maps external coordinate to [-1,1].
    double normalize(int axis, double c) const;
    /// Throws DomainError when c lies outside the axis interval.
    void check_domain(int axis, double c) const;
};

/// Fresh model: core entries i.i.d. N(0, 0.1), MLPs via init_mlp, all three
/// sharing omega0 and depth.
LrtfrModel init_model(Dims3 ranks, Index hidden, int depth, double omega0,
                      std::array<Interval, 3> domain, std::uint64_t seed);

double evaluate_point(const LrtfrModel& m, double x, double y, double z, bool extrapolate = false);

/// Factor matrices are built once per axis, then core x1 U x2 V x3 W; this is
/// why evaluation cost scales with n1+n2+n3 MLP passes, not n1*n2*n3.
DenseTensor3 evaluate_grid(const LrtfrModel& m, const CoordinateGrid& g, bool extrapolate = false);

/// Same as evaluate_grid; named for drawing members of the sampled tensor set.
DenseTensor3 sample_tensor(const LrtfrModel& m, const CoordinateGrid& g, bool extrapolate = false);

/// Scattered evaluation: points is n x 3, result element i is the value at
/// row i. Shares the once-per-coordinate factor evaluation.
Vector evaluate_points(const LrtfrModel& m, const Matrix& points, bool extrapolate = false);

struct ModelGrad {
    DenseTensor3 core;
    MlpGrad x, y, z;
};

/// Gradients of <upstream, evaluate_grid(m, g)> w.r.t. core and all MLP
/// weights. Core gradient is upstream x1 U^T x2 V^T x3 W^T.
ModelGrad model_gradients(const LrtfrModel& m, const CoordinateGrid& g,
                          const DenseTensor3& upstream, bool extrapolate = false);

/// Scattered counterpart: gradients of sum_i upstream[i] * f(points row i).
ModelGrad point_gradients(const LrtfrModel& m, const Matrix& points, const Vector& upstream,
                          bool extrapolate = false);

/// n evenly spaced values spanning [lo, hi] with exact endpoints; n == 1
/// yields the left endpoint.
Vector even_grid(double lo, double hi, Index n);

/// Evaluate on the even grid of target_dims points per axis over the domain.
DenseTensor3 superresolve(const LrtfrModel& m, Dims3 target_dims);

struct RankReport {
    Dims3 model_ranks{};
    std::array<Index, 3> max_observed{};
    Index trials = 0;
    Index violations = 0;
    bool ok() const { return violations == 0; }
};

/// Draws `trials` random grids (sizes in [1, max_dim], coordinates uniform in
/// the domain, repetition allowed) and checks numerical Tucker rank of every
/// sampled tensor against the model ranks.
RankReport verify_rank_bound(const LrtfrModel& m, Index trials, Index max_dim, double tol,
                             std::uint64_t seed);

struct LipschitzReport {
    double eta = 0.0;
    double kappa = 0.0;
    double zeta = 0.0;
    double delta = 0.0;
    int depth = 0;
    bool overflow = false;
    std::array<double, 3> max_ratio{};
    Index pairs = 0;
    Index violations = 0;
    bool ok() const { return violations == 0 && !overflow; }
};

/// Empirical per-axis |delta f| / |delta coord| over random single-axis
/// perturbed pairs in normalized space, against the budget
/// eta^(3d+1) kappa^(3d-3) zeta^2 with eta measured from the core and weight
/// matrices, kappa = shared omega0, zeta = max |drawn coordinate|. MLPs with
/// differing depth or omega0 are rejected.
LipschitzReport verify_lipschitz(const LrtfrModel& m, Index pairs, std::uint64_t seed);

/// Lookup-backed tensor function on the integer grid {0..n1-1} x {0..n2-1} x
/// {0..n3-1}: f(i,j,k) = t(i,j,k). Non-integer or out-of-range coordinates
/// throw DomainError.
class TensorLookup {
public:
    explicit TensorLookup(DenseTensor3 t) : data_(std::move(t)) {}

    const Dims3& dims() const { return data_.dims(); }
    double operator()(double x, double y, double z) const;
    DenseTensor3 resample(const CoordinateGrid& g) const;

private:
    DenseTensor3 data_;
};

TensorLookup discretize_as_tensor_function(const DenseTensor3& x);

}  // namespace lrtfr
