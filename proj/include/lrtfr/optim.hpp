#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lrtfr/model.hpp"
#include "lrtfr/tensor.hpp"

namespace lrtfr {

/// One contiguous view a parameter update acts on.
struct ParamBlock {
    double* param = nullptr;
    const double* grad = nullptr;
    Index size = 0;
};

/// Adam with coupled weight decay (decay added to the gradient before the
/// moment updates). Moment buffers are sized on first use and must keep their
/// shapes afterwards.
struct AdamState {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    double weight_decay = 0.0;
    std::int64_t t = 0;
    std::vector<std::vector<double>> m, v;
};

/// g = grad + weight_decay * param; EMA moments with bias correction;
/// param -= lr * m_hat / (sqrt(v_hat) + eps). NaN gradients abort with
/// NumericalError naming the block.
void adam_step(std::span<const ParamBlock> blocks, AdamState& state);

/// All training hyperparameters. gamma1/gamma2 weigh the sparse and TV terms
/// for denoising, and the eikonal and off-surface terms for SDF fitting.
struct FitConfig {
    Dims3 ranks{1, 1, 1};
    double omega0 = 4.0;
    int depth = 3;
    Index hidden = 256;
    double lr = 1e-3;
    Index iters = 5000;
    double weight_decay = 0.0;
    double gamma1 = 0.0;
    double gamma2 = 0.0;
    std::uint64_t seed = 0;
    // point-cloud extras
    double tau_init = 0.01;
    Index mc_uniform = 5000;
    double offsurface_margin = 0.01;
    double eikonal_step = 1e-3;
    Index sdf_grid = 128;
    Index target_points = 10000;
    std::string loss_log;  // per-iteration CSV when non-empty

    void validate() const;
};

/// Exposes the model parameters in fixed order (core, mlp_x, mlp_y, mlp_z
/// layer by layer) for adam_step.
std::vector<ParamBlock> model_param_blocks(LrtfrModel& m, ModelGrad& g);

/// Minimizes the masked squared error || mask o (obs - T) ||_F^2 over the
/// integer grid. Requires at least one observed entry.
LrtfrModel fit_inpainting(const DenseTensor3& obs, const Mask3& mask, const FitConfig& cfg);

/// Recovery rule: observed entries verbatim from obs, the rest from the
/// model reconstruction.
DenseTensor3 complete(const DenseTensor3& obs, const Mask3& mask, const LrtfrModel& model);

/// Alternating scheme for || obs - T - S ||_F^2 + gamma1 |S|_l1
/// + gamma2 TV(T): per iteration one Adam step on the model holding S fixed,
/// then the exact S update soft_threshold(obs - T, gamma1 / 2). gamma1 == 0
/// pins S to zero. Returns the model and final S.
std::pair<LrtfrModel, DenseTensor3> fit_denoising(const DenseTensor3& obs, const FitConfig& cfg);

/// |grad s|^2 - 1 residual magnitude at (x,y,z) via central differences.
double eikonal_residual(const std::function<double(double, double, double)>& s, double x, double y,
                        double z, double step);

/// Fits a signed distance function to points pre-normalized into [-1,1]^3
/// (n x 3). Per iteration: mean |s| on the points, gamma1 * mean eikonal
/// residual and gamma2 * mean exp(-|s|) on mc_uniform fresh uniform samples
/// (off-surface samples exclude margin-balls around the points), one Adam
/// step on the whole batch.
LrtfrModel fit_sdf(const Matrix& points, const FitConfig& cfg);

}  // namespace lrtfr
