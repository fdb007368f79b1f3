#pragma once

#include <utility>

#include "lrtfr/tensor.hpp"

namespace lrtfr {

/// 10 log10(peak^2 / MSE); +Inf when the tensors are identical.
double psnr(const DenseTensor3& x, const DenseTensor3& ref, double peak = 1.0);

/// ||x - ref||_F / ||ref||_F; zero ref rejected.
double nrmse(const DenseTensor3& x, const DenseTensor3& ref);

/// Mean structural similarity over all 8x8 sliding windows of every frontal
/// slice (uniform window, K1 = 0.01, K2 = 0.03, dynamic range 1, biased
/// moments). Slices smaller than the window fall back to one window covering
/// the slice.
double ssim(const DenseTensor3& x, const DenseTensor3& ref);

/// Sum of both directional mean nearest-neighbor distances (unsquared
/// Euclidean) between n x 3 point sets.
double chamfer(const Matrix& p, const Matrix& q);

/// Harmonic mean of precision (fraction of p within d of q) and recall
/// (fraction of q within d of p); 0 when either vanishes.
double f_score(const Matrix& p, const Matrix& q, double d);

/// 1% of the bounding-box diagonal of ref — the default f_score threshold.
double default_fscore_threshold(const Matrix& ref);

/// (ACA, ARA): mean recommended score, and mean(recommended/best) * 100.
std::pair<double, double> ara_aca(const Vector& recommended, const Vector& best);

}  // namespace lrtfr
