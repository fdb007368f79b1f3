#pragma once

#include <string>

#include "lrtfr/model.hpp"
#include "lrtfr/tasks.hpp"
#include "lrtfr/tensor.hpp"

namespace lrtfr {

// All writers are atomic: the payload goes to a temp file in the target
// directory, then rename. Multi-byte fields are little-endian.

/// Tensor container: magic "LRT1", three u64 dims, then n1*n2*n3 float64
/// values in layout order. Masks use the same container with 0.0/1.0 values.
DenseTensor3 load_tensor(const std::string& path);
void save_tensor(const DenseTensor3& t, const std::string& path);
Mask3 load_mask(const std::string& path);
void save_mask(const Mask3& m, const std::string& path);

/// Model container: magic "LRF1", u64 r1,r2,r3, core float64 payload, three
/// MLP checkpoints (each: magic "LRM1", u64 matrix count, per matrix u64
/// rows, u64 cols, row-major float64 payload), six float64 domain bounds
/// (lo,hi per axis), three float64 omega0, three u64 depths.
LrtfrModel load_model(const std::string& path);
void save_model(const LrtfrModel& m, const std::string& path);

/// Point cloud text: one point per line, three '%.17g' floats separated by
/// single spaces, '.' decimal separator, LF line endings.
Matrix load_pointcloud(const std::string& path);
void save_pointcloud(const Matrix& points, const std::string& path);

/// Two lines of comma-separated axis values; dataset_count is taken from the
/// performance tensor by the caller.
HpoGrid load_hpo_grid(const std::string& path, Index dataset_count);

/// Worker cap: LRTFR_THREADS when set (>= 1), else hardware concurrency.
int worker_cap();

}  // namespace lrtfr
