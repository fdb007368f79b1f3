#include <cmath>
#include <limits>

#include "doctest.h"
#include "lrtfr/errors.hpp"
#include "lrtfr/metrics.hpp"
#include "lrtfr/rng.hpp"

using namespace lrtfr;

namespace {

DenseTensor3 random_tensor(Index n1, Index n2, Index n3, std::uint64_t seed) {
    DenseTensor3 t(n1, n2, n3);
    Rng rng(seed);
    for (double& v : t.data()) v = rng.uniform(0.0, 1.0);
    return t;
}

// direct SSIM over 4x4 windows of one 4x4x1 tensor pair (single window)
double ssim_oracle_single_window(const DenseTensor3& x, const DenseTensor3& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
    for (Index i = 0; i < x.size(); ++i) {
        const double a = x.data()[static_cast<std::size_t>(i)];
        const double b = y.data()[static_cast<std::size_t>(i)];
        sx += a;
        sy += b;
        sxx += a * a;
        syy += b * b;
        sxy += a * b;
    }
    const double mx = sx / n, my = sy / n;
    const double vx = sxx / n - mx * mx, vy = syy / n - my * my;
    const double c = sxy / n - mx * my;
    const double c1 = 1e-4, c2 = 9e-4;
    return ((2 * mx * my + c1) * (2 * c + c2)) / ((mx * mx + my * my + c1) * (vx + vy + c2));
}

}  // namespace

TEST_SUITE("metrics") {

TEST_CASE("psnr closed forms") {
    const DenseTensor3 a = random_tensor(4, 4, 2, 1);
    CHECK(psnr(a, a) == std::numeric_limits<double>::infinity());

    DenseTensor3 b = a;
    for (double& v : b.data()) v += 0.1;  // constant offset: MSE = 0.01
    CHECK(psnr(b, a, 1.0) == doctest::Approx(20.0).epsilon(1e-12));
    // doubling the peak adds 20*log10(2)
    CHECK(psnr(b, a, 2.0) == doctest::Approx(20.0 + 20.0 * std::log10(2.0)).epsilon(1e-12));

    // depends only on the difference
    DenseTensor3 c = a, d = a;
    for (Index i = 0; i < c.size(); ++i) {
        c.data()[static_cast<std::size_t>(i)] += 0.25;
        d.data()[static_cast<std::size_t>(i)] += 0.25;
    }
    CHECK(psnr(c, d) == psnr(a, a));

    CHECK_THROWS_AS(psnr(a, a, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(psnr(a, random_tensor(4, 4, 3, 2)), DimensionError);
}

TEST_CASE("nrmse is relative and scale covariant") {
    DenseTensor3 ref(1, 1, 2);
    ref(0, 0, 0) = 3.0;
    ref(0, 0, 1) = 4.0;
    DenseTensor3 x = ref;
    x(0, 0, 0) = 3.0 + 1.0;
    CHECK(nrmse(x, ref) == doctest::Approx(1.0 / 5.0).epsilon(1e-15));
    CHECK(nrmse(ref, ref) == 0.0);

    const DenseTensor3 a = random_tensor(5, 4, 3, 3);
    const DenseTensor3 r = random_tensor(5, 4, 3, 4);
    DenseTensor3 a2 = a, r2 = r;
    for (Index i = 0; i < a.size(); ++i) {
        a2.data()[static_cast<std::size_t>(i)] *= 7.5;
        r2.data()[static_cast<std::size_t>(i)] *= 7.5;
    }
    CHECK(nrmse(a2, r2) == doctest::Approx(nrmse(a, r)).epsilon(1e-13));

    const DenseTensor3 zero(5, 4, 3, 0.0);
    CHECK_THROWS_AS(nrmse(a, zero), DomainError);
}

TEST_CASE("ssim: identity, degradation ordering, and a single-window oracle") {
    const DenseTensor3 a = random_tensor(16, 16, 2, 5);
    CHECK(ssim(a, a) == doctest::Approx(1.0).epsilon(1e-12));

    Rng rng(6);
    DenseTensor3 mild = a, harsh = a;
    for (Index i = 0; i < a.size(); ++i) {
        const double n = rng.normal();
        mild.data()[static_cast<std::size_t>(i)] += 0.02 * n;
        harsh.data()[static_cast<std::size_t>(i)] += 0.3 * n;
    }
    const double s_mild = ssim(mild, a);
    const double s_harsh = ssim(harsh, a);
    CHECK(s_mild < 1.0);
    CHECK(s_harsh < s_mild);

    // tensors smaller than the window fall back to one full-extent window
    const DenseTensor3 x = random_tensor(4, 4, 1, 7);
    const DenseTensor3 y = random_tensor(4, 4, 1, 8);
    CHECK(ssim(x, y) == doctest::Approx(ssim_oracle_single_window(x, y)).epsilon(1e-13));
}

TEST_CASE("chamfer distance: hand value, symmetry, identity") {
    Matrix p(2, 3), q(1, 3);
    p << 0, 0, 0, 1, 0, 0;
    q << 0, 0, 0;
    // p->q mean distance = (0 + 1)/2, q->p = 0
    CHECK(chamfer(p, q) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(chamfer(q, p) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(chamfer(p, p) == 0.0);

    Rng rng(9);
    Matrix a(40, 3), b(25, 3);
    for (Index i = 0; i < a.rows(); ++i)
        for (Index j = 0; j < 3; ++j) a(i, j) = rng.uniform(-1.0, 1.0);
    for (Index i = 0; i < b.rows(); ++i)
        for (Index j = 0; j < 3; ++j) b(i, j) = rng.uniform(-1.0, 1.0);
    CHECK(chamfer(a, b) == doctest::Approx(chamfer(b, a)).epsilon(1e-13));
    CHECK(chamfer(a, b) > 0.0);

    Matrix empty(0, 3);
    CHECK_THROWS_AS(chamfer(empty, b), std::invalid_argument);
    Matrix wide(3, 4);
    wide.setZero();
    CHECK_THROWS_AS(chamfer(wide, b), DimensionError);
}

TEST_CASE("f-score: hand precision/recall case and monotonicity in the threshold") {
    Matrix p(2, 3), q(1, 3);
    p << 0, 0, 0, 1, 0, 0;
    q << 0, 0, 0;
    // d=0.5: precision 1/2, recall 1 -> F = 2/3
    CHECK(f_score(p, q, 0.5) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(f_score(p, q, 1.0) == doctest::Approx(1.0).epsilon(1e-15));  // boundary counts
    CHECK(f_score(p, q, 1e-9) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));

    Rng rng(10);
    Matrix a(30, 3), b(20, 3);
    for (Index i = 0; i < a.rows(); ++i)
        for (Index j = 0; j < 3; ++j) a(i, j) = rng.uniform(-1.0, 1.0);
    for (Index i = 0; i < b.rows(); ++i)
        for (Index j = 0; j < 3; ++j) b(i, j) = rng.uniform(-1.0, 1.0);
    double prev = -1.0;
    for (const double d : {0.01, 0.05, 0.2, 0.5, 1.0, 4.0}) {
        const double f = f_score(a, b, d);
        CHECK(f >= prev);
        prev = f;
    }
    CHECK(prev == doctest::Approx(1.0).epsilon(1e-15));  // huge threshold saturates
    CHECK_THROWS_AS(f_score(a, b, 0.0), std::invalid_argument);
}

TEST_CASE("default f-score threshold is 1% of the bbox diagonal") {
    Matrix corners(2, 3);
    corners << 0, 0, 0, 1, 1, 1;
    CHECK(default_fscore_threshold(corners) == doctest::Approx(0.01 * std::sqrt(3.0)).epsilon(1e-14));
}

TEST_CASE("recommendation accuracy aggregates") {
    Vector rec(3), best(3);
    rec << 0.8, 0.9, 1.0;
    best << 1.0, 1.0, 1.0;
    const auto [aca, ara] = ara_aca(rec, best);
    CHECK(aca == doctest::Approx(0.9).epsilon(1e-15));
    CHECK(ara == doctest::Approx(90.0).epsilon(1e-13));

    Vector bad(3);
    bad << 1.0, 0.0, 1.0;
    CHECK_THROWS_AS(ara_aca(rec, bad), DomainError);
    Vector shorter(2);
    shorter << 1.0, 1.0;
    CHECK_THROWS_AS(ara_aca(rec, shorter), DimensionError);
}

}  // TEST_SUITE
