#include "lrtfr/tasks.hpp"

#include <cmath>
#include <iostream>
#include <limits>
#include <vector>

namespace lrtfr {

namespace {

CoordinateGrid integer_grid(const Dims3& dims) {
    CoordinateGrid g;
    g.xs = even_grid(0.0, static_cast<double>(dims[0] - 1), dims[0]);
    g.ys = even_grid(0.0, static_cast<double>(dims[1] - 1), dims[1]);
    g.zs = even_grid(0.0, static_cast<double>(dims[2] - 1), dims[2]);
    return g;
}

void check_monotone(const Vector& v, const char* name) {
    if (v.size() < 1) throw std::invalid_argument(std::string(name) + " must be nonempty");
    if (v.size() == 1) return;
    const bool up = v(1) > v(0);
    for (Index i = 0; i + 1 < v.size(); ++i) {
        const bool step_up = v(i + 1) > v(i);
        if (v(i + 1) == v(i) || step_up != up) {
            throw std::invalid_argument(std::string(name) + " values must be strictly monotone");
        }
    }
}

/// Axis value at fractional grid index q: geometric interpolation between
/// neighbors when every value is positive (the axes are exponent grids),
/// linear otherwise.
double decode_axis(const Vector& axis, double q) {
    const Index i0 = static_cast<Index>(std::floor(q));
    const double f = q - static_cast<double>(i0);
    if (f == 0.0) return axis(i0);
    const double a = axis(i0), b = axis(i0 + 1);
    if (axis.minCoeff() > 0.0) return std::exp((1.0 - f) * std::log(a) + f * std::log(b));
    return (1.0 - f) * a + f * b;
}

}  // namespace

void HpoGrid::validate(const Dims3& perf_dims) const {
    check_monotone(axis1, "axis1");
    check_monotone(axis2, "axis2");
    if (axis1.size() != perf_dims[0] || axis2.size() != perf_dims[1] ||
        dataset_count != perf_dims[2]) {
        throw DimensionError("hyperparameter grid does not match the performance tensor dims");
    }
}

DenseTensor3 inpaint(const DenseTensor3& obs, const Mask3& mask, const FitConfig& cfg) {
    const LrtfrModel model = fit_inpainting(obs, mask, cfg);
    return complete(obs, mask, model);
}

DenseTensor3 denoise(const DenseTensor3& obs, const FitConfig& cfg) {
    const auto fitted = fit_denoising(obs, cfg);
    return evaluate_grid(fitted.first, integer_grid(obs.dims()));
}

std::pair<DenseTensor3, Recommendation> hpo_complete(const DenseTensor3& perf, const Mask3& mask,
                                                     const HpoGrid& grid, const FitConfig& cfg,
                                                     int scale, Index new_slice) {
    grid.validate(perf.dims());
    if (scale != 1 && scale != 2 && scale != 4) {
        throw std::invalid_argument("hpo scale must be 1, 2, or 4");
    }
    const auto [n1, n2, n3] = perf.dims();
    const Index ns = new_slice < 0 ? n3 + new_slice : new_slice;
    if (ns < 0 || ns >= n3) throw std::invalid_argument("new-dataset slice index out of range");

    bool any_observed = false;
    for (Index i = 0; i < n1 && !any_observed; ++i) {
        for (Index j = 0; j < n2 && !any_observed; ++j) any_observed = mask(i, j, ns) != 0.0;
    }
    if (!any_observed) {
        std::cerr << "warning: new-dataset slice has no observed entries; "
                     "recommendation is pure transfer from the other slices\n";
    }

    const LrtfrModel model = fit_inpainting(perf, mask, cfg);
    DenseTensor3 out = scale == 1
                           ? complete(perf, mask, model)
                           : superresolve(model, Dims3{static_cast<Index>(scale) * (n1 - 1) + 1,
                                                       static_cast<Index>(scale) * (n2 - 1) + 1,
                                                       n3});

    Recommendation rec;
    rec.grid_scale = scale;
    double best = -std::numeric_limits<double>::infinity();
    for (Index i = 0; i < out.dim(1); ++i) {
        for (Index j = 0; j < out.dim(2); ++j) {
            const double v = out(i, j, ns);
            if (v > best) {
                best = v;
                rec.row = i;
                rec.col = j;
            }
        }
    }
    rec.predicted_score = best;
    rec.axis1_value = decode_axis(grid.axis1, static_cast<double>(rec.row) / scale);
    rec.axis2_value = decode_axis(grid.axis2, static_cast<double>(rec.col) / scale);
    return {std::move(out), rec};
}

DenseTensor3 field_on_grid(const ScalarField& field, Index grid_n) {
    if (grid_n < 2) throw std::invalid_argument("grid_n must be >= 2");
    const Vector ax = even_grid(-1.0, 1.0, grid_n);
    DenseTensor3 vals(grid_n, grid_n, grid_n);
    for (Index i = 0; i < grid_n; ++i) {
        for (Index j = 0; j < grid_n; ++j) {
            for (Index k = 0; k < grid_n; ++k) vals(i, j, k) = field(ax(i), ax(j), ax(k));
        }
    }
    return vals;
}

Matrix select_level_set(const DenseTensor3& values, Index grid_n, double tau) {
    if (values.dims() != Dims3{grid_n, grid_n, grid_n}) {
        throw DimensionError("level-set values must be grid_n^3");
    }
    const Vector ax = even_grid(-1.0, 1.0, grid_n);
    std::vector<std::array<double, 3>> kept;
    for (Index i = 0; i < grid_n; ++i) {
        for (Index j = 0; j < grid_n; ++j) {
            for (Index k = 0; k < grid_n; ++k) {
                if (std::abs(values(i, j, k)) < tau) kept.push_back({ax(i), ax(j), ax(k)});
            }
        }
    }
    Matrix out(static_cast<Index>(kept.size()), 3);
    for (Index r = 0; r < out.rows(); ++r) {
        out(r, 0) = kept[static_cast<std::size_t>(r)][0];
        out(r, 1) = kept[static_cast<std::size_t>(r)][1];
        out(r, 2) = kept[static_cast<std::size_t>(r)][2];
    }
    return out;
}

PointCloud upsample_pointcloud(const PointCloud& pc, const FitConfig& cfg) {
    if (pc.points.rows() < 1 || pc.points.cols() != 3) {
        throw std::invalid_argument("point cloud must be a nonempty n x 3 set");
    }
    if (!pc.points.allFinite()) throw NumericalError("point cloud has non-finite coordinates");

    std::array<double, 3> center{};
    Matrix norm = pc.points;
    for (int a = 0; a < 3; ++a) {
        center[static_cast<std::size_t>(a)] = norm.col(a).mean();
        norm.col(a).array() -= center[static_cast<std::size_t>(a)];
    }
    double scale = 1.1 * norm.cwiseAbs().maxCoeff();
    if (scale == 0.0) scale = 1.0;  // all points coincide
    norm /= scale;

    const LrtfrModel model = fit_sdf(norm, cfg);

    const Index g = cfg.sdf_grid;
    const DenseTensor3 vals = superresolve(model, Dims3{g, g, g});
    const Index total = g * g * g;
    double tau = cfg.tau_init > 0.0 ? cfg.tau_init : 1e-6;
    Matrix kept;
    for (;;) {
        kept = select_level_set(vals, g, tau);
        if (kept.rows() >= cfg.target_points || kept.rows() == total) break;
        tau *= 2.0;
    }
    if (kept.rows() < cfg.target_points) {
        std::cerr << "warning: level-set scan found only " << kept.rows() << " points below tau "
                  << tau << "\n";
    }

    PointCloud out;
    out.center = center;
    out.scale = scale;
    out.points = kept * scale;
    for (int a = 0; a < 3; ++a) out.points.col(a).array() += center[static_cast<std::size_t>(a)];
    return out;
}

}  // namespace lrtfr
