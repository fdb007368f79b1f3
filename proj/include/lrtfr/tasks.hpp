#pragma once

#include <array>
#include <functional>
#include <utility>

#include "lrtfr/optim.hpp"
#include "lrtfr/tensor.hpp"

namespace lrtfr {

/// Hyperparameter axes of a performance tensor: axis values per index
/// (strictly monotone) for the first two modes; mode 3 counts datasets.
struct HpoGrid {
    Vector axis1, axis2;
    Index dataset_count = 0;

    void validate(const Dims3& perf_dims) const;
};

struct Recommendation {
    double axis1_value = 0.0;
    double axis2_value = 0.0;
    double predicted_score = 0.0;
    int grid_scale = 1;
    Index row = 0, col = 0;  // argmax position in the (scaled) slice
};

/// Points are n x 3 rows; center/scale record the normalization applied so
/// outputs can be mapped back.
struct PointCloud {
    Matrix points;
    std::array<double, 3> center{0.0, 0.0, 0.0};
    double scale = 1.0;
};

/// fit_inpainting then the recovery rule; observed entries pass through
/// bitwise.
DenseTensor3 inpaint(const DenseTensor3& obs, const Mask3& mask, const FitConfig& cfg);

/// fit_denoising; returns the reconstruction T.
DenseTensor3 denoise(const DenseTensor3& obs, const FitConfig& cfg);

/// Completes the performance tensor, then recommends the argmax of the
/// new-dataset slice (mode-3 index new_slice; negative counts from the end).
/// scale in {1,2,4}: above 1 the two hyperparameter modes are resampled at
/// s*(n-1)+1 evenly spaced points (original nodes preserved); the dataset
/// mode is never scaled. Off-grid axis values interpolate geometrically
/// between neighbors (linearly when values are not all positive). A fully
/// unobserved new slice proceeds with a warning on stderr.
std::pair<DenseTensor3, Recommendation> hpo_complete(const DenseTensor3& perf, const Mask3& mask,
                                                     const HpoGrid& grid, const FitConfig& cfg,
                                                     int scale, Index new_slice = -1);

using ScalarField = std::function<double(double, double, double)>;

/// Values of `field` on the grid_n^3 even grid over [-1,1]^3.
DenseTensor3 field_on_grid(const ScalarField& field, Index grid_n);

/// Points of the grid_n^3 even grid where |values| < tau, as n x 3 rows in
/// grid order.
Matrix select_level_set(const DenseTensor3& values, Index grid_n, double tau);

/// Normalizes the cloud (centroid removed, 1.1 x max abs coordinate scale),
/// fits an SDF, scans the sdf_grid^3 even grid, keeps |s| < tau growing tau
/// by doubling from tau_init until at least target_points survive (returns
/// fewer with a warning when the grid is exhausted), and maps the kept points
/// back to the input frame.
PointCloud upsample_pointcloud(const PointCloud& pc, const FitConfig& cfg);

}  // namespace lrtfr
