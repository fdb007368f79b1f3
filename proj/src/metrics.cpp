#include "lrtfr/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace lrtfr {

namespace {

void check_same_dims(const DenseTensor3& x, const DenseTensor3& ref) {
    if (!x.same_dims(ref)) throw DimensionError("tensors must have the same dims");
}

void check_cloud(const Matrix& p, const char* name) {
    if (p.cols() != 3) throw DimensionError(std::string(name) + " must be n x 3");
    if (p.rows() == 0) throw std::invalid_argument(std::string(name) + " must be nonempty");
}

double nearest_sq(const Matrix& from, Index i, const Matrix& to) {
    double best = std::numeric_limits<double>::infinity();
    const double x = from(i, 0), y = from(i, 1), z = from(i, 2);
    for (Index j = 0; j < to.rows(); ++j) {
        const double dx = x - to(j, 0), dy = y - to(j, 1), dz = z - to(j, 2);
        best = std::min(best, dx * dx + dy * dy + dz * dz);
    }
    return best;
}

}  // namespace

double psnr(const DenseTensor3& x, const DenseTensor3& ref, double peak) {
    check_same_dims(x, ref);
    if (!(peak > 0.0)) throw std::invalid_argument("psnr peak must be positive");
    double mse = 0.0;
    for (Index i = 0; i < x.size(); ++i) {
        const double d = x.data()[static_cast<std::size_t>(i)] -
                         ref.data()[static_cast<std::size_t>(i)];
        mse += d * d;
    }
    mse /= static_cast<double>(x.size());
    if (mse == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(peak * peak / mse);
}

double nrmse(const DenseTensor3& x, const DenseTensor3& ref) {
    check_same_dims(x, ref);
    const double denom = frobenius_norm(ref);
    if (denom == 0.0) throw DomainError("nrmse undefined for a zero reference");
    double num = 0.0;
    for (Index i = 0; i < x.size(); ++i) {
        const double d = x.data()[static_cast<std::size_t>(i)] -
                         ref.data()[static_cast<std::size_t>(i)];
        num += d * d;
    }
    return std::sqrt(num) / denom;
}

double ssim(const DenseTensor3& x, const DenseTensor3& ref) {
    check_same_dims(x, ref);
    const auto [n1, n2, n3] = x.dims();
    const Index wr = std::min<Index>(8, n1);  // slices smaller than 8 use one full-extent window
    const Index wc = std::min<Index>(8, n2);
    const double c1 = 0.01 * 0.01;
    const double c2 = 0.03 * 0.03;
    const double npix = static_cast<double>(wr * wc);
    double acc = 0.0;
    Index count = 0;
    for (Index k = 0; k < n3; ++k) {
        for (Index i0 = 0; i0 + wr <= n1; ++i0) {
            for (Index j0 = 0; j0 + wc <= n2; ++j0) {
                double sx = 0.0, sy = 0.0, sxx = 0.0, syy = 0.0, sxy = 0.0;
                for (Index i = i0; i < i0 + wr; ++i) {
                    for (Index j = j0; j < j0 + wc; ++j) {
                        const double a = x(i, j, k);
                        const double b = ref(i, j, k);
                        sx += a;
                        sy += b;
                        sxx += a * a;
                        syy += b * b;
                        sxy += a * b;
                    }
                }
                const double mx = sx / npix, my = sy / npix;
                const double vx = sxx / npix - mx * mx;
                const double vy = syy / npix - my * my;
                const double cxy = sxy / npix - mx * my;
                acc += ((2.0 * mx * my + c1) * (2.0 * cxy + c2)) /
                       ((mx * mx + my * my + c1) * (vx + vy + c2));
                ++count;
            }
        }
    }
    return acc / static_cast<double>(count);
}

double chamfer(const Matrix& p, const Matrix& q) {
    check_cloud(p, "point cloud p");
    check_cloud(q, "point cloud q");
    double sp = 0.0;
    for (Index i = 0; i < p.rows(); ++i) sp += std::sqrt(nearest_sq(p, i, q));
    double sq = 0.0;
    for (Index j = 0; j < q.rows(); ++j) sq += std::sqrt(nearest_sq(q, j, p));
    return sp / static_cast<double>(p.rows()) + sq / static_cast<double>(q.rows());
}

double f_score(const Matrix& p, const Matrix& q, double d) {
    check_cloud(p, "point cloud p");
    check_cloud(q, "point cloud q");
    if (!(d > 0.0)) throw std::invalid_argument("f_score threshold must be positive");
    const double d2 = d * d;
    Index hit_p = 0;
    for (Index i = 0; i < p.rows(); ++i) hit_p += (nearest_sq(p, i, q) <= d2);
    Index hit_q = 0;
    for (Index j = 0; j < q.rows(); ++j) hit_q += (nearest_sq(q, j, p) <= d2);
    const double prec = static_cast<double>(hit_p) / static_cast<double>(p.rows());
    const double rec = static_cast<double>(hit_q) / static_cast<double>(q.rows());
    if (prec == 0.0 || rec == 0.0) return 0.0;
    return 2.0 * prec * rec / (prec + rec);
}

double default_fscore_threshold(const Matrix& ref) {
    check_cloud(ref, "reference cloud");
    const Vector lo = ref.colwise().minCoeff().transpose();
    const Vector hi = ref.colwise().maxCoeff().transpose();
    const double diag = (hi - lo).norm();
    return 0.01 * diag;
}

std::pair<double, double> ara_aca(const Vector& recommended, const Vector& best) {
    if (recommended.size() != best.size()) throw DimensionError("score vectors must match in length");
    if (recommended.size() == 0) throw std::invalid_argument("score vectors must be nonempty");
    double aca = 0.0, ara = 0.0;
    for (Index i = 0; i < recommended.size(); ++i) {
        if (!(best(i) > 0.0)) throw DomainError("best scores must be positive");
        aca += recommended(i);
        ara += recommended(i) / best(i);
    }
    const double n = static_cast<double>(recommended.size());
    return {aca / n, ara / n * 100.0};
}

}  // namespace lrtfr
