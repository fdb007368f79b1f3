#include <cinttypes>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "lrtfr/io.hpp"
#include "lrtfr/metrics.hpp"
#include "lrtfr/model.hpp"
#include "lrtfr/optim.hpp"
#include "lrtfr/rng.hpp"
#include "lrtfr/search.hpp"
#include "lrtfr/tasks.hpp"

namespace {

using namespace lrtfr;

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

struct FitFlags {
    std::vector<Index> rank;
    double omega0 = 4.0;
    int depth = 3;
    Index hidden = 256;
    double lr = 1e-3;
    Index iters = 5000;
    double weight_decay = 0.0;
    std::uint64_t seed = 0;
    std::string loss_log;
    std::string save_model;
};

void add_fit_flags(CLI::App* cmd, FitFlags& f, double wd_default, int depth_default,
                   Index iters_default, bool rank_required) {
    f.weight_decay = wd_default;
    f.depth = depth_default;
    f.iters = iters_default;
    if (rank_required) {
        cmd->add_option("--rank", f.rank, "target ranks r1,r2,r3")->required()->delimiter(',');
    }
    cmd->add_option("--omega0", f.omega0, "sine activation frequency");
    cmd->add_option("--depth", f.depth, "factor MLP depth");
    cmd->add_option("--hidden", f.hidden, "factor MLP hidden width");
    cmd->add_option("--lr", f.lr, "Adam learning rate");
    cmd->add_option("--iters", f.iters, "training iterations");
    cmd->add_option("--weight-decay", f.weight_decay, "Adam weight decay");
    cmd->add_option("--seed", f.seed, "RNG seed");
    cmd->add_option("--loss-log", f.loss_log, "per-iteration loss CSV path");
    cmd->add_option("--save-model", f.save_model, "write the trained model here");
}

FitConfig to_config(const FitFlags& f, bool need_rank = true) {
    FitConfig cfg;
    if (need_rank) {
        if (f.rank.size() != 3 || f.rank[0] < 1 || f.rank[1] < 1 || f.rank[2] < 1) {
            throw std::invalid_argument("--rank needs three values >= 1");
        }
        cfg.ranks = {f.rank[0], f.rank[1], f.rank[2]};
    }
    cfg.omega0 = f.omega0;
    cfg.depth = f.depth;
    cfg.hidden = f.hidden;
    cfg.lr = f.lr;
    cfg.iters = f.iters;
    cfg.weight_decay = f.weight_decay;
    cfg.seed = f.seed;
    cfg.loss_log = f.loss_log;
    return cfg;
}

std::vector<Index> parse_divisors(const std::vector<Index>& v, const char* name) {
    if (v.empty()) throw std::invalid_argument(std::string(name) + " must be nonempty");
    for (const Index s : v) {
        if (s < 1) throw std::invalid_argument(std::string(name) + " entries must be >= 1");
    }
    return v;
}

int run_verify(const std::string& model_path, Index trials, Index max_dim, double tol, Index pairs,
               Index grad_params, std::uint64_t seed) {
    const LrtfrModel model = load_model(model_path);
    bool all_ok = true;

    const RankReport rr = verify_rank_bound(model, trials, max_dim, tol, seed);
    std::cout << "rank_bound: trials=" << rr.trials << " bound=(" << rr.model_ranks[0] << ","
              << rr.model_ranks[1] << "," << rr.model_ranks[2] << ") max_observed=("
              << rr.max_observed[0] << "," << rr.max_observed[1] << "," << rr.max_observed[2]
              << ") violations=" << rr.violations << (rr.ok() ? " OK" : " FAIL") << "\n";
    all_ok = all_ok && rr.ok();

    const LipschitzReport lr = verify_lipschitz(model, pairs, seed + 1);
    std::cout << "lipschitz: pairs=" << lr.pairs << " eta=" << fmt(lr.eta) << " kappa="
              << fmt(lr.kappa) << " zeta=" << fmt(lr.zeta) << " delta=" << fmt(lr.delta)
              << " max_ratio=(" << fmt(lr.max_ratio[0]) << "," << fmt(lr.max_ratio[1]) << ","
              << fmt(lr.max_ratio[2]) << ") violations=" << lr.violations
              << (lr.overflow ? " OVERFLOW" : "") << (lr.ok() ? " OK" : " FAIL") << "\n";
    all_ok = all_ok && lr.ok();

    // spot gradient check against central differences on a small random grid
    Rng rng(seed + 2);
    CoordinateGrid g;
    Vector* axes[3] = {&g.xs, &g.ys, &g.zs};
    for (int a = 0; a < 3; ++a) {
        axes[a]->resize(3);
        for (Index i = 0; i < 3; ++i) {
            (*axes[a])(i) = rng.uniform(model.domain[static_cast<std::size_t>(a)].lo,
                                        model.domain[static_cast<std::size_t>(a)].hi);
        }
    }
    DenseTensor3 up(3, 3, 3);
    for (double& u : up.data()) u = rng.uniform(-1.0, 1.0);
    LrtfrModel probe = model;
    ModelGrad analytic = model_gradients(probe, g, up);
    auto blocks = model_param_blocks(probe, analytic);
    const auto loss = [&]() {
        const DenseTensor3 t = evaluate_grid(probe, g);
        double s = 0.0;
        for (Index i = 0; i < t.size(); ++i) {
            s += up.data()[static_cast<std::size_t>(i)] * t.data()[static_cast<std::size_t>(i)];
        }
        return s;
    };
    Index total = 0;
    for (const auto& b : blocks) total += b.size;
    double worst = 0.0;
    const Index samples = std::min<Index>(grad_params, total);
    for (Index s = 0; s < samples; ++s) {
        const Index flat = rng.uniform_index(total);
        Index off = flat;
        std::size_t bi = 0;
        while (off >= blocks[bi].size) {
            off -= blocks[bi].size;
            ++bi;
        }
        double* p = blocks[bi].param + off;
        const double an = blocks[bi].grad[off];
        const double keep = *p;
        const double h = 1e-6 * std::max(1.0, std::abs(keep));
        *p = keep + h;
        const double lp = loss();
        *p = keep - h;
        const double lm = loss();
        *p = keep;
        const double fd = (lp - lm) / (2.0 * h);
        const double scale = std::max(std::abs(fd), std::abs(an));
        if (scale > 1e-8) worst = std::max(worst, std::abs(fd - an) / scale);
    }
    const bool grad_ok = worst <= 1e-5;
    std::cout << "gradients: sampled=" << samples << " max_rel_err=" << fmt(worst)
              << (grad_ok ? " OK" : " FAIL") << "\n";
    all_ok = all_ok && grad_ok;

    if (!all_ok) throw NumericalError("verification failed");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"low-rank tensor function representation toolkit"};
    app.require_subcommand(1);

    // ---- inpaint ----
    auto* c_inp = app.add_subcommand("inpaint", "complete a partially observed tensor");
    std::string inp_in, inp_mask, inp_out;
    FitFlags inp_flags;
    c_inp->add_option("--in", inp_in, "observed tensor (t3b)")->required();
    c_inp->add_option("--mask", inp_mask, "binary observation mask (t3b)")->required();
    c_inp->add_option("--out", inp_out, "recovered tensor path")->required();
    add_fit_flags(c_inp, inp_flags, 1.0, 3, 5000, true);
    c_inp->callback([&]() {
        const DenseTensor3 obs = load_tensor(inp_in);
        const Mask3 mask = load_mask(inp_mask);
        const FitConfig cfg = to_config(inp_flags);
        const LrtfrModel model = fit_inpainting(obs, mask, cfg);
        save_tensor(complete(obs, mask, model), inp_out);
        if (!inp_flags.save_model.empty()) save_model(model, inp_flags.save_model);
    });

    // ---- denoise ----
    auto* c_den = app.add_subcommand("denoise", "remove mixed noise from a tensor");
    std::string den_in, den_out, den_sparse_out;
    bool den_sparse = false;
    double den_gamma1 = -1.0, den_gamma2 = 1e-5;
    FitFlags den_flags;
    c_den->add_option("--in", den_in, "noisy tensor (t3b)")->required();
    c_den->add_option("--out", den_out, "denoised tensor path")->required();
    c_den->add_option("--sparse-out", den_sparse_out, "write the sparse component here");
    c_den->add_flag("--sparse", den_sparse, "expect sparse (impulse) noise");
    c_den->add_option("--gamma1", den_gamma1, "sparse weight (default 0.1 with --sparse, else 10)");
    c_den->add_option("--gamma2", den_gamma2, "TV weight (1e-5 suits MSI, 1e-6 HSI)");
    add_fit_flags(c_den, den_flags, 0.1, 3, 5000, true);
    c_den->callback([&]() {
        const DenseTensor3 obs = load_tensor(den_in);
        FitConfig cfg = to_config(den_flags);
        cfg.gamma1 = den_gamma1 >= 0.0 ? den_gamma1 : (den_sparse ? 0.1 : 10.0);
        cfg.gamma2 = den_gamma2;
        const auto fitted = fit_denoising(obs, cfg);
        const CoordinateGrid g{even_grid(0.0, static_cast<double>(obs.dim(1) - 1), obs.dim(1)),
                               even_grid(0.0, static_cast<double>(obs.dim(2) - 1), obs.dim(2)),
                               even_grid(0.0, static_cast<double>(obs.dim(3) - 1), obs.dim(3))};
        save_tensor(evaluate_grid(fitted.first, g), den_out);
        if (!den_sparse_out.empty()) save_tensor(fitted.second, den_sparse_out);
        if (!den_flags.save_model.empty()) save_model(fitted.first, den_flags.save_model);
    });

    // ---- hpo ----
    auto* c_hpo = app.add_subcommand("hpo", "complete a hyperparameter performance surface");
    std::string hpo_in, hpo_mask, hpo_grid, hpo_out;
    int hpo_scale = 1;
    Index hpo_slice = -1;
    FitFlags hpo_flags;
    c_hpo->add_option("--in", hpo_in, "performance tensor (t3b)")->required();
    c_hpo->add_option("--mask", hpo_mask, "observation mask (t3b)")->required();
    c_hpo->add_option("--grid", hpo_grid, "axis-value file (two comma-separated lines)")->required();
    c_hpo->add_option("--out", hpo_out, "completed tensor path")->required();
    c_hpo->add_option("--scale", hpo_scale, "super-resolution factor 1, 2, or 4");
    c_hpo->add_option("--new-slice", hpo_slice, "mode-3 index of the new dataset (default last)");
    add_fit_flags(c_hpo, hpo_flags, 0.5, 3, 5000, true);
    c_hpo->callback([&]() {
        const DenseTensor3 perf = load_tensor(hpo_in);
        const Mask3 mask = load_mask(hpo_mask);
        const HpoGrid grid = load_hpo_grid(hpo_grid, perf.dim(3));
        const FitConfig cfg = to_config(hpo_flags);
        const auto [completed, rec] = hpo_complete(perf, mask, grid, cfg, hpo_scale, hpo_slice);
        save_tensor(completed, hpo_out);
        std::cout << "recommend_axis1=" << fmt(rec.axis1_value) << "\n"
                  << "recommend_axis2=" << fmt(rec.axis2_value) << "\n"
                  << "recommend_score=" << fmt(rec.predicted_score) << "\n"
                  << "recommend_row=" << rec.row << "\n"
                  << "recommend_col=" << rec.col << "\n"
                  << "scale=" << rec.grid_scale << "\n";
    });

    // ---- pcu ----
    auto* c_pcu = app.add_subcommand("pcu", "upsample a sparse point cloud through an SDF");
    std::string pcu_in, pcu_out;
    double pcu_tau = 0.01, pcu_margin = 0.01, pcu_eik = 1e-3;
    double pcu_gamma1 = 1e-6, pcu_gamma2 = 1e-2;
    Index pcu_grid = 128, pcu_target = 10000, pcu_mc = 5000;
    FitFlags pcu_flags;
    c_pcu->add_option("--in", pcu_in, "sparse point cloud (text)")->required();
    c_pcu->add_option("--out", pcu_out, "dense point cloud path")->required();
    c_pcu->add_option("--tau", pcu_tau, "initial level-set threshold");
    c_pcu->add_option("--grid-n", pcu_grid, "dense scan resolution per axis");
    c_pcu->add_option("--target-points", pcu_target, "minimum output size");
    c_pcu->add_option("--mc", pcu_mc, "Monte Carlo samples per integral term");
    c_pcu->add_option("--margin", pcu_margin, "off-surface exclusion radius");
    c_pcu->add_option("--eik-step", pcu_eik, "finite-difference step for the eikonal term");
    c_pcu->add_option("--gamma1", pcu_gamma1, "eikonal weight");
    c_pcu->add_option("--gamma2", pcu_gamma2, "off-surface weight");
    add_fit_flags(c_pcu, pcu_flags, 0.5, 4, 10000, true);
    c_pcu->callback([&]() {
        PointCloud pc;
        pc.points = load_pointcloud(pcu_in);
        FitConfig cfg = to_config(pcu_flags);
        cfg.gamma1 = pcu_gamma1;
        cfg.gamma2 = pcu_gamma2;
        cfg.tau_init = pcu_tau;
        cfg.sdf_grid = pcu_grid;
        cfg.target_points = pcu_target;
        cfg.mc_uniform = pcu_mc;
        cfg.offsurface_margin = pcu_margin;
        cfg.eikonal_step = pcu_eik;
        const PointCloud dense = upsample_pointcloud(pc, cfg);
        save_pointcloud(dense.points, pcu_out);
        std::cout << "points=" << dense.points.rows() << "\n";
    });

    // ---- eval ----
    auto* c_eval = app.add_subcommand("eval", "compare tensors or point clouds");
    std::string ev_x, ev_ref, ev_pc, ev_ref_pc;
    double ev_peak = 1.0, ev_fd = 0.0;
    bool ev_json = false;
    c_eval->add_option("--x", ev_x, "tensor under test (t3b)");
    c_eval->add_option("--ref", ev_ref, "reference tensor (t3b)");
    c_eval->add_option("--pc", ev_pc, "point cloud under test (text)");
    c_eval->add_option("--ref-pc", ev_ref_pc, "reference point cloud (text)");
    c_eval->add_option("--peak", ev_peak, "PSNR peak value");
    c_eval->add_option("--fscore-d", ev_fd, "F-score threshold (default 1% of ref bbox diagonal)");
    c_eval->add_flag("--json", ev_json, "emit JSON lines instead of key=value");
    c_eval->callback([&]() {
        const bool tensors = !ev_x.empty() || !ev_ref.empty();
        const bool clouds = !ev_pc.empty() || !ev_ref_pc.empty();
        if (tensors == clouds) {
            throw std::invalid_argument("eval needs either --x/--ref or --pc/--ref-pc");
        }
        if (tensors) {
            if (ev_x.empty() || ev_ref.empty()) {
                throw std::invalid_argument("eval needs both --x and --ref");
            }
            const DenseTensor3 x = load_tensor(ev_x);
            const DenseTensor3 ref = load_tensor(ev_ref);
            const double p = psnr(x, ref, ev_peak);
            const double n = nrmse(x, ref);
            const double s = ssim(x, ref);
            if (ev_json) {
                std::cout << nlohmann::json{{"name", "psnr"}, {"value", p}, {"peak", ev_peak}}
                          << "\n"
                          << nlohmann::json{{"name", "nrmse"}, {"value", n}} << "\n"
                          << nlohmann::json{{"name", "ssim"}, {"value", s}, {"window", 8}} << "\n";
            } else {
                std::cout << "psnr=" << fmt(p) << "\nnrmse=" << fmt(n) << "\nssim=" << fmt(s)
                          << "\n";
            }
        } else {
            if (ev_pc.empty() || ev_ref_pc.empty()) {
                throw std::invalid_argument("eval needs both --pc and --ref-pc");
            }
            const Matrix p = load_pointcloud(ev_pc);
            const Matrix q = load_pointcloud(ev_ref_pc);
            const double d = ev_fd > 0.0 ? ev_fd : default_fscore_threshold(q);
            const double cd = chamfer(p, q);
            const double fs = f_score(p, q, d);
            if (ev_json) {
                std::cout << nlohmann::json{{"name", "chamfer"}, {"value", cd}} << "\n"
                          << nlohmann::json{{"name", "fscore"}, {"value", fs}, {"threshold", d}}
                          << "\n";
            } else {
                std::cout << "chamfer=" << fmt(cd) << "\nfscore=" << fmt(fs)
                          << "\nfscore_d=" << fmt(d) << "\n";
            }
        }
    });

    // ---- verify ----
    auto* c_ver = app.add_subcommand("verify", "run rank, smoothness, and gradient checks");
    std::string ver_model;
    Index ver_trials = 200, ver_maxdim = 12, ver_pairs = 10000, ver_grad = 100;
    double ver_tol = 1e-8;
    std::uint64_t ver_seed = 0;
    c_ver->add_option("--model", ver_model, "model file (lrf1)")->required();
    c_ver->add_option("--trials", ver_trials, "random sampling trials for the rank bound");
    c_ver->add_option("--max-dim", ver_maxdim, "max sampled grid size per mode");
    c_ver->add_option("--pairs", ver_pairs, "coordinate pairs for the smoothness bound");
    c_ver->add_option("--grad-params", ver_grad, "parameters to spot-check by finite differences");
    c_ver->add_option("--tol", ver_tol, "numerical rank tolerance");
    c_ver->add_option("--seed", ver_seed, "RNG seed");
    c_ver->callback([&]() {
        run_verify(ver_model, ver_trials, ver_maxdim, ver_tol, ver_pairs, ver_grad, ver_seed);
    });

    // ---- search ----
    auto* c_sea = app.add_subcommand("search", "grid-search ranks and omega0");
    std::string sea_task, sea_in, sea_mask, sea_oracle, sea_out;
    std::vector<Index> sea_s{1, 2, 4, 8, 16, 32}, sea_s3{1, 2, 4, 8, 16, 32};
    std::vector<double> sea_omega{1, 2, 4, 8, 16, 32};
    FitFlags sea_flags;
    double sea_gamma1 = 10.0, sea_gamma2 = 1e-5;
    c_sea->add_option("--task", sea_task, "inpaint or denoise")->required();
    c_sea->add_option("--in", sea_in, "observed tensor (t3b)")->required();
    c_sea->add_option("--mask", sea_mask, "observation mask (t3b, inpainting)");
    c_sea->add_option("--oracle-ref", sea_oracle, "ground truth for oracle scoring");
    c_sea->add_option("--s-set", sea_s, "spatial rank divisors")->delimiter(',');
    c_sea->add_option("--s3-set", sea_s3, "mode-3 rank divisors")->delimiter(',');
    c_sea->add_option("--omega-set", sea_omega, "omega0 candidates")->delimiter(',');
    c_sea->add_option("--out", sea_out, "write the winning reconstruction here");
    c_sea->add_option("--gamma1", sea_gamma1, "denoising sparse weight");
    c_sea->add_option("--gamma2", sea_gamma2, "denoising TV weight");
    add_fit_flags(c_sea, sea_flags, 1.0, 3, 5000, false);
    c_sea->callback([&]() {
        SearchTask task;
        if (sea_task == "inpaint") {
            task = SearchTask::Inpaint;
        } else if (sea_task == "denoise") {
            task = SearchTask::Denoise;
        } else {
            throw std::invalid_argument("--task must be inpaint or denoise");
        }
        const DenseTensor3 obs = load_tensor(sea_in);
        Mask3 mask;
        const bool have_mask = !sea_mask.empty();
        if (have_mask) mask = load_mask(sea_mask);
        DenseTensor3 oracle;
        const bool have_oracle = !sea_oracle.empty();
        if (have_oracle) oracle = load_tensor(sea_oracle);
        FitConfig base = to_config(sea_flags, /*need_rank=*/false);
        if (task == SearchTask::Denoise) {
            base.gamma1 = sea_gamma1;
            base.gamma2 = sea_gamma2;
        }
        const SearchResult res = grid_search(
            task, obs, have_mask ? &mask : nullptr, base, parse_divisors(sea_s, "--s-set"),
            parse_divisors(sea_s3, "--s3-set"), sea_omega, have_oracle ? &oracle : nullptr,
            worker_cap());
        std::cout << "s,s3,omega0,r1,r2,r3," << res.criterion << "\n";
        for (const auto& c : res.table) {
            std::cout << c.s << ',' << c.s3 << ',' << fmt(c.omega0) << ',' << c.ranks[0] << ','
                      << c.ranks[1] << ',' << c.ranks[2] << ',' << fmt(c.score) << "\n";
        }
        std::cout << "best: s=" << res.best.s << " s3=" << res.best.s3
                  << " omega0=" << fmt(res.best.omega0) << " ranks=(" << res.best.ranks[0] << ","
                  << res.best.ranks[1] << "," << res.best.ranks[2]
                  << ") score=" << fmt(res.best.score) << "\n";
        if (!sea_out.empty()) {
            if (task == SearchTask::Inpaint) {
                save_tensor(complete(obs, mask, res.model), sea_out);
            } else {
                const CoordinateGrid g{
                    even_grid(0.0, static_cast<double>(obs.dim(1) - 1), obs.dim(1)),
                    even_grid(0.0, static_cast<double>(obs.dim(2) - 1), obs.dim(2)),
                    even_grid(0.0, static_cast<double>(obs.dim(3) - 1), obs.dim(3))};
                save_tensor(evaluate_grid(res.model, g), sea_out);
            }
        }
        if (!sea_flags.save_model.empty()) save_model(res.model, sea_flags.save_model);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const FormatError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const NumericalError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const DimensionError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
    return 0;
}
