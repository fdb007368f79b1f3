#pragma once

#include <string>
#include <vector>

#include "lrtfr/model.hpp"
#include "lrtfr/optim.hpp"
#include "lrtfr/tensor.hpp"

namespace lrtfr {

enum class SearchTask { Inpaint, Denoise };

struct SearchCandidate {
    Index s = 1, s3 = 1;  // rank divisors: ranks = (n1/s, n2/s, n3/s3), floored, min 1
    double omega0 = 1.0;
    Dims3 ranks{1, 1, 1};
    double score = 0.0;  // criterion value (see SearchResult::criterion)
};

struct SearchResult {
    LrtfrModel model;
    SearchCandidate best;
    std::vector<SearchCandidate> table;  // configuration order
    std::string criterion;               // "psnr_val" | "psnr_ref" | "loss"
};

/// Trains one model per (s, s3, omega0) and returns the best by criterion:
/// inpainting scores PSNR on a withheld 10% of observed entries (the winner
/// is trained on the remaining 90%), or PSNR against *oracle_ref over all
/// entries when given; denoising scores the final loss (lower wins). mask is
/// required for inpainting, ignored for denoising. Candidates run on up to
/// `threads` workers; seeds and table order depend only on the configuration
/// list, so results are reproducible for any thread count.
SearchResult grid_search(SearchTask task, const DenseTensor3& obs, const Mask3* mask,
                         const FitConfig& base, const std::vector<Index>& s_set,
                         const std::vector<Index>& s3_set, const std::vector<double>& omega_set,
                         const DenseTensor3* oracle_ref, int threads);

}  // namespace lrtfr
