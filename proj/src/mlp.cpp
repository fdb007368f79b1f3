#include "lrtfr/mlp.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "lrtfr/rng.hpp"

namespace lrtfr {

void Mlp::validate() const {
    if (weights.size() < 2) {
        throw DimensionError("mlp needs depth >= 2");
    }
    if (!(omega0 > 0.0) || !std::isfinite(omega0)) {
        throw DomainError("mlp omega0 must be positive and finite");
    }
    const Index h = weights.front().rows();
    if (h < 1 || weights.front().cols() != 1) {
        throw DimensionError("mlp first layer must be h x 1");
    }
    for (std::size_t l = 1; l + 1 < weights.size(); ++l) {
        if (weights[l].rows() != h || weights[l].cols() != h) {
            throw DimensionError("mlp hidden layer " + std::to_string(l + 1) + " must be " +
                                 std::to_string(h) + " x " + std::to_string(h));
        }
    }
    if (weights.back().cols() != h || weights.back().rows() < 1) {
        throw DimensionError("mlp output layer must be r x " + std::to_string(h));
    }
    for (const Matrix& w : weights) {
        if (!w.allFinite()) throw NumericalError("mlp weight contains non-finite entries");
    }
}

Matrix Mlp::forward(const Vector& coords, MlpCache* cache) const {
    if (!coords.allFinite()) throw NumericalError("mlp forward: non-finite coordinates");
    const int d = depth();
    if (cache) {
        cache->pre.clear();
        cache->act.clear();
        cache->pre.reserve(d - 1);
        cache->act.reserve(d - 1);
    }
    Matrix z = coords * weights[0].transpose();  // n x h
    Matrix a = (omega0 * z.array()).sin().matrix();
    if (cache) {
        cache->pre.push_back(z);
        cache->act.push_back(a);
    }
    for (int l = 1; l + 1 < d; ++l) {
        z.noalias() = a * weights[static_cast<std::size_t>(l)].transpose();
        a = (omega0 * z.array()).sin().matrix();
        if (cache) {
            cache->pre.push_back(z);
            cache->act.push_back(a);
        }
    }
    return a * weights.back().transpose();  // n x r, no activation on the last layer
}

MlpGrad Mlp::backward(const Vector& coords, const Matrix& upstream, const MlpCache& cache) const {
    const int d = depth();
    if (upstream.rows() != coords.size() || upstream.cols() != out_dim()) {
        throw DimensionError("mlp backward: upstream must be n x out_dim");
    }
    if (static_cast<int>(cache.pre.size()) != d - 1 || static_cast<int>(cache.act.size()) != d - 1) {
        throw DimensionError("mlp backward: cache does not match depth");
    }
    MlpGrad g(weights.size());
    g.back().noalias() = upstream.transpose() * cache.act[static_cast<std::size_t>(d - 2)];
    Matrix da = upstream * weights.back();  // gradient w.r.t. act[d-2]
    for (int l = d - 2; l >= 1; --l) {
        const Matrix& z = cache.pre[static_cast<std::size_t>(l)];
        const Matrix dz = (da.array() * (omega0 * (omega0 * z.array()).cos())).matrix();
        g[static_cast<std::size_t>(l)].noalias() =
            dz.transpose() * cache.act[static_cast<std::size_t>(l - 1)];
        da.noalias() = dz * weights[static_cast<std::size_t>(l)];
    }
    const Matrix dz1 = (da.array() * (omega0 * (omega0 * cache.pre[0].array()).cos())).matrix();
    g[0].noalias() = dz1.transpose() * coords;
    return g;
}

MlpGrad Mlp::backward(const Vector& coords, const Matrix& upstream) const {
    MlpCache cache;
    forward(coords, &cache);
    return backward(coords, upstream, cache);
}

double Mlp::entrywise_l1_max() const {
    double best = 0.0;
    for (const Matrix& w : weights) best = std::max(best, w.cwiseAbs().sum());
    return best;
}

Mlp init_mlp(Index r, Index h, int d, double omega0, std::uint64_t seed) {
    if (r < 1 || h < 1) throw DimensionError("init_mlp: r and h must be >= 1");
    if (d < 2) throw DimensionError("init_mlp: depth must be >= 2");
    if (!(omega0 > 0.0) || !std::isfinite(omega0)) {
        throw DomainError("init_mlp: omega0 must be positive and finite");
    }
    Rng rng(seed);
    Mlp mlp;
    mlp.omega0 = omega0;
    mlp.weights.reserve(static_cast<std::size_t>(d));
    const double deep = std::sqrt(6.0 / static_cast<double>(h)) / omega0;
    for (int l = 0; l < d; ++l) {
        const Index rows = (l == d - 1) ? r : h;
        const Index cols = (l == 0) ? 1 : h;
        const double b = (l == 0) ? 1.0 : deep;
        Matrix w(rows, cols);
        for (Index i = 0; i < rows; ++i) {
            for (Index j = 0; j < cols; ++j) w(i, j) = rng.uniform(-b, b);
        }
        mlp.weights.push_back(std::move(w));
    }
    return mlp;
}

double lipschitz_budget(double eta, double kappa, int d, double zeta, bool* overflow) {
    if (!(eta > 0.0) || !(kappa > 0.0) || !(zeta > 0.0)) {
        throw DomainError("lipschitz_budget: eta, kappa, zeta must be positive");
    }
    if (d < 2) throw DimensionError("lipschitz_budget: depth must be >= 2");
    const double v = std::pow(eta, 3.0 * d + 1.0) * std::pow(kappa, 3.0 * d - 3.0) * zeta * zeta;
    if (overflow) *overflow = std::isinf(v);
    return v;
}

}  // namespace lrtfr
