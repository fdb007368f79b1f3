#include "lrtfr/search.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iostream>
#include <limits>
#include <mutex>
#include <thread>
#include <vector>

#include "lrtfr/metrics.hpp"
#include "lrtfr/rng.hpp"

namespace lrtfr {

namespace {

constexpr std::uint64_t kSplitStride = 0x9E3779B97F4A7C15ULL;

struct ValidationSplit {
    Mask3 train;
    std::vector<Index> held_out;  // linear indices scored against obs
};

/// Withholds ~10% of observed entries (at least one, never all) with a
/// deterministic shuffle.
ValidationSplit make_split(const DenseTensor3& obs, const Mask3& mask, std::uint64_t seed) {
    std::vector<Index> observed;
    for (Index i = 0; i < mask.size(); ++i) {
        if (mask.as_tensor().data()[static_cast<std::size_t>(i)] != 0.0) observed.push_back(i);
    }
    if (observed.size() < 2) {
        throw std::invalid_argument("validation search needs at least two observed entries");
    }
    Rng rng(seed + kSplitStride);
    for (std::size_t i = observed.size(); i > 1; --i) {
        const Index j = rng.uniform_index(static_cast<Index>(i));
        std::swap(observed[i - 1], observed[static_cast<std::size_t>(j)]);
    }
    std::size_t n_val = observed.size() / 10;
    if (n_val == 0) n_val = 1;
    if (n_val >= observed.size()) n_val = observed.size() - 1;
    ValidationSplit split;
    split.train = mask;
    const auto dims = obs.dims();
    for (std::size_t i = 0; i < n_val; ++i) {
        const Index lin = observed[i];
        const Index n2 = dims[1], n3 = dims[2];
        split.train.set(lin / (n2 * n3), (lin / n3) % n2, lin % n3, false);
        split.held_out.push_back(lin);
    }
    return split;
}

double denoise_loss(const DenseTensor3& obs, const LrtfrModel& model, const DenseTensor3& sp,
                    const FitConfig& cfg) {
    CoordinateGrid g;
    g.xs = even_grid(0.0, static_cast<double>(obs.dim(1) - 1), obs.dim(1));
    g.ys = even_grid(0.0, static_cast<double>(obs.dim(2) - 1), obs.dim(2));
    g.zs = even_grid(0.0, static_cast<double>(obs.dim(3) - 1), obs.dim(3));
    const DenseTensor3 t = evaluate_grid(model, g);
    double fid = 0.0;
    for (Index i = 0; i < obs.size(); ++i) {
        const std::size_t s = static_cast<std::size_t>(i);
        const double r = obs.data()[s] - t.data()[s] - sp.data()[s];
        fid += r * r;
    }
    return fid + cfg.gamma1 * l1_norm(sp) + cfg.gamma2 * tv_seminorm(t);
}

}  // namespace

SearchResult grid_search(SearchTask task, const DenseTensor3& obs, const Mask3* mask,
                         const FitConfig& base, const std::vector<Index>& s_set,
                         const std::vector<Index>& s3_set, const std::vector<double>& omega_set,
                         const DenseTensor3* oracle_ref, int threads) {
    if (s_set.empty() || s3_set.empty() || omega_set.empty()) {
        throw std::invalid_argument("search sets must be nonempty");
    }
    if (task == SearchTask::Inpaint && mask == nullptr) {
        throw std::invalid_argument("inpainting search needs a mask");
    }
    if (oracle_ref && !oracle_ref->same_dims(obs)) {
        throw DimensionError("oracle reference dims must match the observation");
    }
    const auto [n1, n2, n3] = obs.dims();

    SearchResult res;
    for (const Index s : s_set) {
        for (const Index s3 : s3_set) {
            if (s < 1 || s3 < 1) throw std::invalid_argument("rank divisors must be >= 1");
            for (const double w0 : omega_set) {
                SearchCandidate c;
                c.s = s;
                c.s3 = s3;
                c.omega0 = w0;
                c.ranks = Dims3{std::max<Index>(1, n1 / s), std::max<Index>(1, n2 / s),
                                std::max<Index>(1, n3 / s3)};
                res.table.push_back(c);
            }
        }
    }

    ValidationSplit split;
    bool use_split = false;
    if (task == SearchTask::Inpaint) {
        if (oracle_ref) {
            res.criterion = "psnr_ref";
        } else {
            split = make_split(obs, *mask, base.seed);
            use_split = true;
            res.criterion = "psnr_val";
        }
    } else {
        res.criterion = "loss";
    }

    const auto run_one = [&](SearchCandidate& cand) -> void {
        FitConfig cfg = base;
        cfg.ranks = cand.ranks;
        cfg.omega0 = cand.omega0;
        cfg.loss_log.clear();
        try {
            if (task == SearchTask::Inpaint) {
                if (oracle_ref) {
                    const LrtfrModel model = fit_inpainting(obs, *mask, cfg);
                    cand.score = psnr(complete(obs, *mask, model), *oracle_ref);
                } else {
                    const LrtfrModel model = fit_inpainting(obs, split.train, cfg);
                    const DenseTensor3 rec = complete(obs, split.train, model);
                    double mse = 0.0;
                    for (const Index lin : split.held_out) {
                        const double d = rec.data()[static_cast<std::size_t>(lin)] -
                                         obs.data()[static_cast<std::size_t>(lin)];
                        mse += d * d;
                    }
                    mse /= static_cast<double>(split.held_out.size());
                    cand.score = mse == 0.0 ? std::numeric_limits<double>::infinity()
                                            : 10.0 * std::log10(1.0 / mse);
                }
            } else {
                const auto fitted = fit_denoising(obs, cfg);
                cand.score = denoise_loss(obs, fitted.first, fitted.second, cfg);
            }
        } catch (const NumericalError&) {
            // diverged candidate: worst possible score, search continues
            cand.score = task == SearchTask::Denoise ? std::numeric_limits<double>::infinity()
                                                     : -std::numeric_limits<double>::infinity();
        }
    };

    const int workers = std::max(1, std::min<int>(threads, static_cast<int>(res.table.size())));
    if (workers == 1) {
        for (auto& cand : res.table) run_one(cand);
    } else {
        std::atomic<std::size_t> next{0};
        std::mutex err_mutex;
        std::exception_ptr first_error;
        const auto worker = [&]() {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= res.table.size()) return;
                try {
                    run_one(res.table[i]);
                } catch (...) {
                    const std::lock_guard<std::mutex> lock(err_mutex);
                    if (!first_error) first_error = std::current_exception();
                }
            }
        };
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int i = 0; i < workers; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
        if (first_error) std::rethrow_exception(first_error);
    }

    const bool minimize = res.criterion == "loss";
    std::size_t best_i = res.table.size();
    for (std::size_t i = 0; i < res.table.size(); ++i) {
        const double sc = res.table[i].score;
        if (std::isnan(sc) || (minimize && sc == std::numeric_limits<double>::infinity()) ||
            (!minimize && sc == -std::numeric_limits<double>::infinity())) {
            continue;
        }
        if (best_i == res.table.size() || (minimize ? sc < res.table[best_i].score
                                                    : sc > res.table[best_i].score)) {
            best_i = i;
        }
    }
    if (best_i == res.table.size()) throw NumericalError("every search candidate diverged");
    res.best = res.table[best_i];

    // retrain the winner (same seed, bitwise-identical model) so that only one
    // model is ever held in memory
    FitConfig cfg = base;
    cfg.ranks = res.best.ranks;
    cfg.omega0 = res.best.omega0;
    cfg.loss_log.clear();
    if (task == SearchTask::Inpaint) {
        res.model = fit_inpainting(obs, use_split ? split.train : *mask, cfg);
    } else {
        res.model = fit_denoising(obs, cfg).first;
    }
    return res;
}

}  // namespace lrtfr
