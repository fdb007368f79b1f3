#include "lrtfr/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lrtfr/rng.hpp"

namespace lrtfr {

namespace {

constexpr std::uint64_t kSeedStride = 0x9E3779B97F4A7C15ULL;  // distinct streams per part

Vector normalize_axis(const LrtfrModel& m, int axis, const Vector& v, bool extrapolate) {
    Vector out(v.size());
    for (Index i = 0; i < v.size(); ++i) {
        if (!extrapolate) m.check_domain(axis, v(i));
        out(i) = m.normalize(axis, v(i));
    }
    return out;
}

/// Row i of the result is core contracted with row i of u, v, w.
Vector contract_rows(const DenseTensor3& core, const Matrix& u, const Matrix& v, const Matrix& w) {
    const auto [r1, r2, r3] = core.dims();
    const Matrix p = u * unfold(core, 1);  // n x (r2*r3)
    Vector out(u.rows());
    for (Index i = 0; i < u.rows(); ++i) {
        double s = 0.0;
        for (Index b = 0; b < r2; ++b) {
            double t = 0.0;
            for (Index c = 0; c < r3; ++c) t += p(i, b * r3 + c) * w(i, c);
            s += t * v(i, b);
        }
        out(i) = s;
    }
    return out;
}

}  // namespace

void LrtfrModel::validate() const {
    mlp_x.validate();
    mlp_y.validate();
    mlp_z.validate();
    const Dims3 r = core.dims();
    if (mlp_x.out_dim() != r[0] || mlp_y.out_dim() != r[1] || mlp_z.out_dim() != r[2]) {
        throw DimensionError("factor MLP output sizes must match core dims");
    }
    if (!core.all_finite()) throw NumericalError("core tensor contains non-finite entries");
    for (const Interval& iv : domain) {
        if (!std::isfinite(iv.lo) || !std::isfinite(iv.hi) || iv.hi < iv.lo) {
            throw DomainError("model domain intervals must be finite with hi >= lo");
        }
    }
}

double LrtfrModel::normalize(int axis, double c) const {
    const Interval& iv = domain[static_cast<std::size_t>(axis)];
    if (iv.hi == iv.lo) return 0.0;
    return 2.0 * (c - iv.lo) / (iv.hi - iv.lo) - 1.0;
}

void LrtfrModel::check_domain(int axis, double c) const {
    const Interval& iv = domain[static_cast<std::size_t>(axis)];
    if (!std::isfinite(c) || c < iv.lo || c > iv.hi) {
        throw DomainError("coordinate " + std::to_string(c) + " outside axis-" +
                          std::to_string(axis + 1) + " domain [" + std::to_string(iv.lo) + ", " +
                          std::to_string(iv.hi) + "]");
    }
}

LrtfrModel init_model(Dims3 ranks, Index hidden, int depth, double omega0,
                      std::array<Interval, 3> domain, std::uint64_t seed) {
    LrtfrModel m;
    m.core = DenseTensor3(ranks[0], ranks[1], ranks[2]);
    Rng rng(seed);
    for (double& c : m.core.data()) c = rng.normal(0.0, 0.1);
    m.mlp_x = init_mlp(ranks[0], hidden, depth, omega0, seed + kSeedStride);
    m.mlp_y = init_mlp(ranks[1], hidden, depth, omega0, seed + 2 * kSeedStride);
    m.mlp_z = init_mlp(ranks[2], hidden, depth, omega0, seed + 3 * kSeedStride);
    m.domain = domain;
    return m;
}

double evaluate_point(const LrtfrModel& m, double x, double y, double z, bool extrapolate) {
    Vector vx(1), vy(1), vz(1);
    vx(0) = x;
    vy(0) = y;
    vz(0) = z;
    return evaluate_grid(m, CoordinateGrid{vx, vy, vz}, extrapolate)(0, 0, 0);
}

DenseTensor3 evaluate_grid(const LrtfrModel& m, const CoordinateGrid& g, bool extrapolate) {
    if (g.xs.size() < 1 || g.ys.size() < 1 || g.zs.size() < 1) {
        throw DimensionError("grid axes must be nonempty");
    }
    const Matrix u = m.mlp_x.forward(normalize_axis(m, 0, g.xs, extrapolate));
    const Matrix v = m.mlp_y.forward(normalize_axis(m, 1, g.ys, extrapolate));
    const Matrix w = m.mlp_z.forward(normalize_axis(m, 2, g.zs, extrapolate));
    return mode_product(mode_product(mode_product(m.core, u, 1), v, 2), w, 3);
}

DenseTensor3 sample_tensor(const LrtfrModel& m, const CoordinateGrid& g, bool extrapolate) {
    return evaluate_grid(m, g, extrapolate);
}

Vector evaluate_points(const LrtfrModel& m, const Matrix& points, bool extrapolate) {
    if (points.cols() != 3) throw DimensionError("points must be n x 3");
    const Matrix u = m.mlp_x.forward(normalize_axis(m, 0, points.col(0), extrapolate));
    const Matrix v = m.mlp_y.forward(normalize_axis(m, 1, points.col(1), extrapolate));
    const Matrix w = m.mlp_z.forward(normalize_axis(m, 2, points.col(2), extrapolate));
    return contract_rows(m.core, u, v, w);
}

ModelGrad model_gradients(const LrtfrModel& m, const CoordinateGrid& g,
                          const DenseTensor3& upstream, bool extrapolate) {
    const Dims3 gd{g.xs.size(), g.ys.size(), g.zs.size()};
    if (upstream.dims() != gd) throw DimensionError("upstream dims must match the grid");
    const Vector nx = normalize_axis(m, 0, g.xs, extrapolate);
    const Vector ny = normalize_axis(m, 1, g.ys, extrapolate);
    const Vector nz = normalize_axis(m, 2, g.zs, extrapolate);
    MlpCache cx, cy, cz;
    const Matrix u = m.mlp_x.forward(nx, &cx);
    const Matrix v = m.mlp_y.forward(ny, &cy);
    const Matrix w = m.mlp_z.forward(nz, &cz);

    ModelGrad out;
    out.core = mode_product(
        mode_product(mode_product(upstream, Matrix(u.transpose()), 1), Matrix(v.transpose()), 2),
        Matrix(w.transpose()), 3);

    const DenseTensor3 cvw = mode_product(mode_product(m.core, v, 2), w, 3);  // r1 x n2 x n3
    const Matrix du = unfold(upstream, 1) * unfold(cvw, 1).transpose();
    out.x = m.mlp_x.backward(nx, du, cx);

    const DenseTensor3 cuw = mode_product(mode_product(m.core, u, 1), w, 3);  // n1 x r2 x n3
    const Matrix dv = unfold(upstream, 2) * unfold(cuw, 2).transpose();
    out.y = m.mlp_y.backward(ny, dv, cy);

    const DenseTensor3 cuv = mode_product(mode_product(m.core, u, 1), v, 2);  // n1 x n2 x r3
    const Matrix dw = unfold(upstream, 3) * unfold(cuv, 3).transpose();
    out.z = m.mlp_z.backward(nz, dw, cz);
    return out;
}

ModelGrad point_gradients(const LrtfrModel& m, const Matrix& points, const Vector& upstream,
                          bool extrapolate) {
    if (points.cols() != 3) throw DimensionError("points must be n x 3");
    if (upstream.size() != points.rows()) throw DimensionError("upstream must have one value per point");
    const Index n = points.rows();
    const Vector nx = normalize_axis(m, 0, points.col(0), extrapolate);
    const Vector ny = normalize_axis(m, 1, points.col(1), extrapolate);
    const Vector nz = normalize_axis(m, 2, points.col(2), extrapolate);
    MlpCache cx, cy, cz;
    const Matrix u = m.mlp_x.forward(nx, &cx);
    const Matrix v = m.mlp_y.forward(ny, &cy);
    const Matrix w = m.mlp_z.forward(nz, &cz);
    const auto [r1, r2, r3] = m.core.dims();

    ModelGrad out;
    out.core = DenseTensor3(r1, r2, r3);
    Matrix du = Matrix::Zero(n, r1), dv = Matrix::Zero(n, r2), dw = Matrix::Zero(n, r3);
    for (Index i = 0; i < n; ++i) {
        const double s = upstream(i);
        for (Index a = 0; a < r1; ++a) {
            const double ua = u(i, a);
            double acc_a = 0.0;
            for (Index b = 0; b < r2; ++b) {
                const double vb = v(i, b);
                const double uavb = ua * vb;
                double dot_c = 0.0;
                for (Index c = 0; c < r3; ++c) {
                    const double core = m.core(a, b, c);
                    const double wc = w(i, c);
                    dot_c += core * wc;
                    out.core(a, b, c) += s * uavb * wc;
                    dw(i, c) += s * core * uavb;
                }
                acc_a += dot_c * vb;
                dv(i, b) += s * dot_c * ua;
            }
            du(i, a) = s * acc_a;
        }
    }
    out.x = m.mlp_x.backward(nx, du, cx);
    out.y = m.mlp_y.backward(ny, dv, cy);
    out.z = m.mlp_z.backward(nz, dw, cz);
    return out;
}

Vector even_grid(double lo, double hi, Index n) {
    if (n < 1) throw DimensionError("even_grid: need at least one point");
    Vector v(n);
    if (n == 1) {
        v(0) = lo;
        return v;
    }
    const double step = (hi - lo) / static_cast<double>(n - 1);
    for (Index i = 0; i < n; ++i) v(i) = lo + step * static_cast<double>(i);
    v(n - 1) = hi;  // exact endpoint regardless of rounding
    return v;
}

DenseTensor3 superresolve(const LrtfrModel& m, Dims3 target_dims) {
    CoordinateGrid g{even_grid(m.domain[0].lo, m.domain[0].hi, target_dims[0]),
                     even_grid(m.domain[1].lo, m.domain[1].hi, target_dims[1]),
                     even_grid(m.domain[2].lo, m.domain[2].hi, target_dims[2])};
    return evaluate_grid(m, g);
}

RankReport verify_rank_bound(const LrtfrModel& m, Index trials, Index max_dim, double tol,
                             std::uint64_t seed) {
    if (trials < 1 || max_dim < 1) {
        throw std::invalid_argument("verify_rank_bound: trials and max_dim must be >= 1");
    }
    Rng rng(seed);
    RankReport rep;
    rep.model_ranks = m.core.dims();
    rep.trials = trials;
    for (Index t = 0; t < trials; ++t) {
        CoordinateGrid g;
        Vector* axes[3] = {&g.xs, &g.ys, &g.zs};
        for (int a = 0; a < 3; ++a) {
            const Interval& iv = m.domain[static_cast<std::size_t>(a)];
            const Index n = 1 + rng.uniform_index(max_dim);
            Vector& ax = *axes[a];
            ax.resize(n);
            for (Index i = 0; i < n; ++i) ax(i) = rng.uniform(iv.lo, iv.hi);
            if (n >= 2 && t % 3 == 0) ax(n - 1) = ax(0);  // exercise repeated coordinates
        }
        const auto r = numerical_tucker_rank(sample_tensor(m, g), tol);
        for (int a = 0; a < 3; ++a) {
            rep.max_observed[static_cast<std::size_t>(a)] =
                std::max(rep.max_observed[static_cast<std::size_t>(a)], r[static_cast<std::size_t>(a)]);
            if (r[static_cast<std::size_t>(a)] > rep.model_ranks[static_cast<std::size_t>(a)]) {
                ++rep.violations;
            }
        }
    }
    return rep;
}

LipschitzReport verify_lipschitz(const LrtfrModel& m, Index pairs, std::uint64_t seed) {
    if (pairs < 1) throw std::invalid_argument("verify_lipschitz: pairs must be >= 1");
    m.validate();
    const int d = m.mlp_x.depth();
    if (m.mlp_y.depth() != d || m.mlp_z.depth() != d) {
        throw DomainError("lipschitz verification requires equal factor depths");
    }
    const double w0 = m.mlp_x.omega0;
    if (m.mlp_y.omega0 != w0 || m.mlp_z.omega0 != w0) {
        throw DomainError("lipschitz verification requires a shared omega0");
    }

    LipschitzReport rep;
    rep.depth = d;
    rep.kappa = w0;
    rep.pairs = pairs;
    rep.eta = std::max({l1_norm(m.core), m.mlp_x.entrywise_l1_max(), m.mlp_y.entrywise_l1_max(),
                        m.mlp_z.entrywise_l1_max()});

    // Draw everything first (normalized space): base points, perturbed values,
    // round-robin axis. zeta is the max |coordinate| actually evaluated.
    Rng rng(seed);
    Matrix base(pairs, 3), pert(pairs, 3);
    std::array<std::vector<Index>, 3> rows_by_axis;
    for (Index i = 0; i < pairs; ++i) {
        const int axis = static_cast<int>(i % 3);
        for (int a = 0; a < 3; ++a) base(i, a) = rng.uniform(-1.0, 1.0);
        pert.row(i) = base.row(i);
        double alt = rng.uniform(-1.0, 1.0);
        while (std::abs(alt - base(i, axis)) < 1e-12) alt = rng.uniform(-1.0, 1.0);
        pert(i, axis) = alt;
        rows_by_axis[static_cast<std::size_t>(axis)].push_back(i);
    }
    rep.zeta = std::max(base.cwiseAbs().maxCoeff(), pert.cwiseAbs().maxCoeff());

    if (rep.eta == 0.0 || rep.zeta == 0.0) {
        rep.delta = 0.0;  // identically zero network
    } else {
        rep.delta = lipschitz_budget(rep.eta, rep.kappa, d, rep.zeta, &rep.overflow);
    }

    const auto eval_raw = [&](const Matrix& pts) {
        const Matrix u = m.mlp_x.forward(pts.col(0));
        const Matrix v = m.mlp_y.forward(pts.col(1));
        const Matrix w = m.mlp_z.forward(pts.col(2));
        return contract_rows(m.core, u, v, w);
    };
    const Vector f_base = eval_raw(base);
    const Vector f_pert = eval_raw(pert);

    for (int axis = 0; axis < 3; ++axis) {
        double worst = 0.0;
        for (const Index i : rows_by_axis[static_cast<std::size_t>(axis)]) {
            const double num = std::abs(f_pert(i) - f_base(i));
            const double den = std::abs(pert(i, axis) - base(i, axis));
            worst = std::max(worst, num / den);
        }
        rep.max_ratio[static_cast<std::size_t>(axis)] = worst;
        if (worst > rep.delta) ++rep.violations;
    }
    return rep;
}

double TensorLookup::operator()(double x, double y, double z) const {
    const double coords[3] = {x, y, z};
    Index idx[3];
    for (int a = 0; a < 3; ++a) {
        const double c = coords[a];
        if (!std::isfinite(c) || std::round(c) != c) {
            throw DomainError("discrete tensor function takes integer coordinates, got " +
                              std::to_string(c));
        }
        const Index i = static_cast<Index>(c);
        if (i < 0 || i >= data_.dim(a + 1)) {
            throw DomainError("integer coordinate " + std::to_string(i) + " outside axis " +
                              std::to_string(a + 1));
        }
        idx[a] = i;
    }
    return data_(idx[0], idx[1], idx[2]);
}

DenseTensor3 TensorLookup::resample(const CoordinateGrid& g) const {
    DenseTensor3 out(g.xs.size(), g.ys.size(), g.zs.size());
    for (Index i = 0; i < g.xs.size(); ++i) {
        for (Index j = 0; j < g.ys.size(); ++j) {
            for (Index k = 0; k < g.zs.size(); ++k) out(i, j, k) = (*this)(g.xs(i), g.ys(j), g.zs(k));
        }
    }
    return out;
}

TensorLookup discretize_as_tensor_function(const DenseTensor3& x) { return TensorLookup(x); }

}  // namespace lrtfr
