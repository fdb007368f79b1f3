#include "lrtfr/optim.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

#include "lrtfr/rng.hpp"

namespace lrtfr {

namespace {

constexpr std::uint64_t kMcStride = 0xC2B2AE3D27D4EB4FULL;  // separates the MC stream from init

double sgn(double x) { return static_cast<double>(x > 0.0) - static_cast<double>(x < 0.0); }

std::string g17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::ofstream open_loss_log(const std::string& path, const char* header) {
    std::ofstream os;
    if (path.empty()) return os;
    os.open(path, std::ios::trunc);
    if (!os) throw IoError("cannot open loss log " + path);
    os << header << '\n';
    return os;
}

CoordinateGrid integer_grid(const Dims3& dims) {
    CoordinateGrid g;
    g.xs = even_grid(0.0, static_cast<double>(dims[0] - 1), dims[0]);
    g.ys = even_grid(0.0, static_cast<double>(dims[1] - 1), dims[1]);
    g.zs = even_grid(0.0, static_cast<double>(dims[2] - 1), dims[2]);
    return g;
}

std::array<Interval, 3> index_domain(const Dims3& dims) {
    return {{{0.0, static_cast<double>(dims[0] - 1)},
             {0.0, static_cast<double>(dims[1] - 1)},
             {0.0, static_cast<double>(dims[2] - 1)}}};
}

/// Adds gamma2 * d(TV)/d(t) into up, with sign(0) = 0.
void add_tv_subgradient(const DenseTensor3& t, double gamma2, DenseTensor3& up) {
    const auto [n1, n2, n3] = t.dims();
    for (Index k = 0; k < n3; ++k) {
        for (Index i = 0; i + 1 < n1; ++i) {
            for (Index j = 0; j < n2; ++j) {
                const double s = gamma2 * sgn(t(i + 1, j, k) - t(i, j, k));
                up(i + 1, j, k) += s;
                up(i, j, k) -= s;
            }
        }
        for (Index i = 0; i < n1; ++i) {
            for (Index j = 0; j + 1 < n2; ++j) {
                const double s = gamma2 * sgn(t(i, j + 1, k) - t(i, j, k));
                up(i, j + 1, k) += s;
                up(i, j, k) -= s;
            }
        }
    }
}

}  // namespace

void adam_step(std::span<const ParamBlock> blocks, AdamState& st) {
    if (st.m.empty()) {
        st.m.resize(blocks.size());
        st.v.resize(blocks.size());
        for (std::size_t b = 0; b < blocks.size(); ++b) {
            st.m[b].assign(static_cast<std::size_t>(blocks[b].size), 0.0);
            st.v[b].assign(static_cast<std::size_t>(blocks[b].size), 0.0);
        }
    }
    if (st.m.size() != blocks.size()) throw DimensionError("adam state does not match block count");
    ++st.t;
    const double bc1 = 1.0 - std::pow(st.beta1, static_cast<double>(st.t));
    const double bc2 = 1.0 - std::pow(st.beta2, static_cast<double>(st.t));
    for (std::size_t b = 0; b < blocks.size(); ++b) {
        const ParamBlock& blk = blocks[b];
        if (static_cast<Index>(st.m[b].size()) != blk.size) {
            throw DimensionError("adam moment shape changed for block " + std::to_string(b));
        }
        for (Index i = 0; i < blk.size; ++i) {
            const double raw = blk.grad[i];
            if (!std::isfinite(raw)) {
                throw NumericalError("non-finite gradient in block " + std::to_string(b) +
                                     " at element " + std::to_string(i));
            }
            const double g = raw + st.weight_decay * blk.param[i];
            auto& m = st.m[b][static_cast<std::size_t>(i)];
            auto& v = st.v[b][static_cast<std::size_t>(i)];
            m = st.beta1 * m + (1.0 - st.beta1) * g;
            v = st.beta2 * v + (1.0 - st.beta2) * g * g;
            blk.param[i] -= st.lr * (m / bc1) / (std::sqrt(v / bc2) + st.eps);
        }
    }
}

void FitConfig::validate() const {
    if (ranks[0] < 1 || ranks[1] < 1 || ranks[2] < 1) throw std::invalid_argument("ranks must be >= 1");
    if (iters < 1) throw std::invalid_argument("iters must be >= 1");
    if (gamma1 < 0.0 || gamma2 < 0.0) throw std::invalid_argument("gammas must be >= 0");
    if (!(lr > 0.0)) throw std::invalid_argument("learning rate must be positive");
    if (weight_decay < 0.0) throw std::invalid_argument("weight decay must be >= 0");
    if (hidden < 1) throw std::invalid_argument("hidden width must be >= 1");
    if (depth < 2) throw std::invalid_argument("depth must be >= 2");
    if (!(omega0 > 0.0)) throw std::invalid_argument("omega0 must be positive");
    if (mc_uniform < 1) throw std::invalid_argument("mc_uniform must be >= 1");
    if (!(eikonal_step > 0.0)) throw std::invalid_argument("eikonal step must be positive");
    if (sdf_grid < 2) throw std::invalid_argument("sdf grid must be >= 2");
    if (target_points < 1) throw std::invalid_argument("target points must be >= 1");
    if (offsurface_margin < 0.0) throw std::invalid_argument("off-surface margin must be >= 0");
}

std::vector<ParamBlock> model_param_blocks(LrtfrModel& m, ModelGrad& g) {
    std::vector<ParamBlock> blocks;
    blocks.push_back({m.core.data().data(), g.core.data().data(), m.core.size()});
    const auto add = [&blocks](Mlp& mlp, MlpGrad& mg) {
        for (std::size_t l = 0; l < mlp.weights.size(); ++l) {
            blocks.push_back({mlp.weights[l].data(), mg[l].data(),
                              static_cast<Index>(mlp.weights[l].size())});
        }
    };
    add(m.mlp_x, g.x);
    add(m.mlp_y, g.y);
    add(m.mlp_z, g.z);
    return blocks;
}

LrtfrModel fit_inpainting(const DenseTensor3& obs, const Mask3& mask, const FitConfig& cfg) {
    cfg.validate();
    if (mask.dims() != obs.dims()) throw DimensionError("mask dims must match the tensor");
    if (mask.count_observed() == 0) {
        throw std::invalid_argument("inpainting needs at least one observed entry");
    }
    const Dims3 dims = obs.dims();
    LrtfrModel model = init_model(cfg.ranks, cfg.hidden, cfg.depth, cfg.omega0,
                                  index_domain(dims), cfg.seed);
    const CoordinateGrid g = integer_grid(dims);
    AdamState st;
    st.lr = cfg.lr;
    st.weight_decay = cfg.weight_decay;
    std::ofstream log = open_loss_log(cfg.loss_log, "iter,total");
    const auto& mk = mask.as_tensor().data();
    const auto& ob = obs.data();
    for (Index it = 0; it < cfg.iters; ++it) {
        const DenseTensor3 t = evaluate_grid(model, g);
        DenseTensor3 up(dims[0], dims[1], dims[2]);
        double loss = 0.0;
        for (Index i = 0; i < t.size(); ++i) {
            const std::size_t s = static_cast<std::size_t>(i);
            const double r = mk[s] * (t.data()[s] - ob[s]);
            loss += r * r;
            up.data()[s] = 2.0 * mk[s] * (t.data()[s] - ob[s]);
        }
        ModelGrad grad = model_gradients(model, g, up);
        const auto blocks = model_param_blocks(model, grad);
        adam_step(blocks, st);
        if (log.is_open()) log << it << ',' << g17(loss) << '\n';
    }
    return model;
}

DenseTensor3 complete(const DenseTensor3& obs, const Mask3& mask, const LrtfrModel& model) {
    if (mask.dims() != obs.dims()) throw DimensionError("mask dims must match the tensor");
    const DenseTensor3 rec = evaluate_grid(model, integer_grid(obs.dims()));
    DenseTensor3 out = obs;
    const auto& mk = mask.as_tensor().data();
    for (Index i = 0; i < out.size(); ++i) {
        const std::size_t s = static_cast<std::size_t>(i);
        if (mk[s] == 0.0) out.data()[s] = rec.data()[s];
    }
    return out;
}

std::pair<LrtfrModel, DenseTensor3> fit_denoising(const DenseTensor3& obs, const FitConfig& cfg) {
    cfg.validate();
    const Dims3 dims = obs.dims();
    LrtfrModel model = init_model(cfg.ranks, cfg.hidden, cfg.depth, cfg.omega0,
                                  index_domain(dims), cfg.seed);
    const CoordinateGrid g = integer_grid(dims);
    AdamState st;
    st.lr = cfg.lr;
    st.weight_decay = cfg.weight_decay;
    std::ofstream log = open_loss_log(cfg.loss_log, "iter,total,fidelity,sparse,tv");
    const auto& ob = obs.data();
    const bool sparse_on = cfg.gamma1 > 0.0;
    DenseTensor3 sp(dims[0], dims[1], dims[2]);  // S starts at zero; pinned there when gamma1 == 0
    for (Index it = 0; it < cfg.iters; ++it) {
        const DenseTensor3 t = evaluate_grid(model, g);
        DenseTensor3 up(dims[0], dims[1], dims[2]);
        double fid = 0.0;
        for (Index i = 0; i < t.size(); ++i) {
            const std::size_t s = static_cast<std::size_t>(i);
            const double r = ob[s] - t.data()[s] - sp.data()[s];
            fid += r * r;
            up.data()[s] = -2.0 * r;
        }
        double tv = 0.0;
        if (cfg.gamma2 > 0.0) {
            tv = tv_seminorm(t);
            add_tv_subgradient(t, cfg.gamma2, up);
        }
        const double l1s = sparse_on ? l1_norm(sp) : 0.0;
        ModelGrad grad = model_gradients(model, g, up);
        const auto blocks = model_param_blocks(model, grad);
        adam_step(blocks, st);
        if (log.is_open()) {
            log << it << ',' << g17(fid + cfg.gamma1 * l1s + cfg.gamma2 * tv) << ',' << g17(fid)
                << ',' << g17(cfg.gamma1 * l1s) << ',' << g17(cfg.gamma2 * tv) << '\n';
        }
        if (sparse_on) {
            DenseTensor3 resid = obs;
            for (Index i = 0; i < resid.size(); ++i) {
                resid.data()[static_cast<std::size_t>(i)] -= t.data()[static_cast<std::size_t>(i)];
            }
            sp = soft_threshold(resid, cfg.gamma1 / 2.0);
        }
    }
    if (sparse_on) {
        // refresh S against the final model so the returned pair solves the
        // S-subproblem exactly
        const DenseTensor3 t = evaluate_grid(model, g);
        DenseTensor3 resid = obs;
        for (Index i = 0; i < resid.size(); ++i) {
            resid.data()[static_cast<std::size_t>(i)] -= t.data()[static_cast<std::size_t>(i)];
        }
        sp = soft_threshold(resid, cfg.gamma1 / 2.0);
    }
    return {std::move(model), std::move(sp)};
}

double eikonal_residual(const std::function<double(double, double, double)>& s, double x, double y,
                        double z, double step) {
    if (!(step > 0.0)) throw std::invalid_argument("eikonal step must be positive");
    const double gx = (s(x + step, y, z) - s(x - step, y, z)) / (2.0 * step);
    const double gy = (s(x, y + step, z) - s(x, y - step, z)) / (2.0 * step);
    const double gz = (s(x, y, z + step) - s(x, y, z - step)) / (2.0 * step);
    return std::abs(gx * gx + gy * gy + gz * gz - 1.0);
}

LrtfrModel fit_sdf(const Matrix& points, const FitConfig& cfg) {
    cfg.validate();
    if (points.rows() < 1 || points.cols() != 3) {
        throw std::invalid_argument("fit_sdf needs a nonempty n x 3 point set");
    }
    if (!points.allFinite() || points.cwiseAbs().maxCoeff() > 1.0) {
        throw DomainError("fit_sdf points must lie in [-1,1]^3");
    }
    const std::array<Interval, 3> dom{{{-1.0, 1.0}, {-1.0, 1.0}, {-1.0, 1.0}}};
    LrtfrModel model = init_model(cfg.ranks, cfg.hidden, cfg.depth, cfg.omega0, dom, cfg.seed);
    AdamState st;
    st.lr = cfg.lr;
    st.weight_decay = cfg.weight_decay;
    std::ofstream log = open_loss_log(cfg.loss_log, "iter,total,surface,eikonal,offsurface");
    Rng rng(cfg.seed + kMcStride);

    const Index n_obs = points.rows();
    const Index mc = cfg.mc_uniform;
    const double h = cfg.eikonal_step;
    const double margin2 = cfg.offsurface_margin * cfg.offsurface_margin;
    const Index rows = n_obs + 6 * mc + mc;
    Matrix batch(rows, 3);
    batch.topRows(n_obs) = points;

    for (Index it = 0; it < cfg.iters; ++it) {
        for (Index j = 0; j < mc; ++j) {
            const double cx = rng.uniform(-1.0, 1.0);
            const double cy = rng.uniform(-1.0, 1.0);
            const double cz = rng.uniform(-1.0, 1.0);
            const Index base = n_obs + 6 * j;
            batch.row(base + 0) << cx + h, cy, cz;
            batch.row(base + 1) << cx - h, cy, cz;
            batch.row(base + 2) << cx, cy + h, cz;
            batch.row(base + 3) << cx, cy - h, cz;
            batch.row(base + 4) << cx, cy, cz + h;
            batch.row(base + 5) << cx, cy, cz - h;
        }
        for (Index j = 0; j < mc; ++j) {
            double px = 0.0, py = 0.0, pz = 0.0;
            for (int attempt = 0; attempt < 64; ++attempt) {
                px = rng.uniform(-1.0, 1.0);
                py = rng.uniform(-1.0, 1.0);
                pz = rng.uniform(-1.0, 1.0);
                double best = 4.0 * margin2 + 1.0;
                for (Index o = 0; o < n_obs && best >= margin2; ++o) {
                    const double dx = px - points(o, 0);
                    const double dy = py - points(o, 1);
                    const double dz = pz - points(o, 2);
                    best = std::min(best, dx * dx + dy * dy + dz * dz);
                }
                if (best >= margin2) break;
            }
            batch.row(n_obs + 6 * mc + j) << px, py, pz;
        }

        const Vector s = evaluate_points(model, batch, /*extrapolate=*/true);
        Vector up = Vector::Zero(rows);
        double surf = 0.0;
        for (Index i = 0; i < n_obs; ++i) {
            surf += std::abs(s(i));
            up(i) = sgn(s(i)) / static_cast<double>(n_obs);
        }
        surf /= static_cast<double>(n_obs);
        double eik = 0.0;
        for (Index j = 0; j < mc; ++j) {
            const Index base = n_obs + 6 * j;
            double q = -1.0;
            double grads[3];
            for (int a = 0; a < 3; ++a) {
                grads[a] = (s(base + 2 * a) - s(base + 2 * a + 1)) / (2.0 * h);
                q += grads[a] * grads[a];
            }
            eik += std::abs(q);
            const double w = cfg.gamma1 / static_cast<double>(mc) * sgn(q);
            for (int a = 0; a < 3; ++a) {
                const double t = w * grads[a] / h;
                up(base + 2 * a) += t;
                up(base + 2 * a + 1) -= t;
            }
        }
        eik = cfg.gamma1 * eik / static_cast<double>(mc);
        double off = 0.0;
        for (Index j = 0; j < mc; ++j) {
            const Index i = n_obs + 6 * mc + j;
            const double e = std::exp(-std::abs(s(i)));
            off += e;
            up(i) = cfg.gamma2 / static_cast<double>(mc) * e * (-sgn(s(i)));
        }
        off = cfg.gamma2 * off / static_cast<double>(mc);

        ModelGrad grad = point_gradients(model, batch, up, /*extrapolate=*/true);
        const auto blocks = model_param_blocks(model, grad);
        adam_step(blocks, st);
        if (log.is_open()) {
            log << it << ',' << g17(surf + eik + off) << ',' << g17(surf) << ',' << g17(eik) << ','
                << g17(off) << '\n';
        }
    }
    return model;
}

}  // namespace lrtfr
