#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "spx/coding.hpp"
#include "spx/media.hpp"
#include "spx/tensor.hpp"

namespace spx {

struct ReconstructionError {
    double re1 = 0.0; // modes 1 and 2
    double re2 = 0.0; // mode 3
    double total = 0.0;
};

// Residuals of the centered candidate X = J - M:
//   RE1 = sum_{i=1,2} |X_(i) - [X x1 U1 U1^T x2 U2 U2^T]_(i)|^2
//   RE2 = |X_(3) - X_(3) V3 V3^T|^2
//   RE  = gamma * RE1 + (1 - gamma) * RE2
ReconstructionError reconstruction_terms(const Eigen::MatrixXd& candidate,
                                         const SubspaceModel& model, double gamma);
double reconstruction_error(const Tensor3& candidate, const SubspaceModel& model, double gamma);

// Log of the unnormalized likelihood exp(RE- - RE+); -RE+ while there is no
// negative model.
double log_likelihood(double re_pos, std::optional<double> re_neg);

// Everything needed to turn an affine state into a code slice.
struct PoolingContext {
    const SparseCoder* coder = nullptr;
    int template_w = 32;
    int template_h = 32;
    int superpixels = 30;
    double compactness = 20.0;
    int bins = 8;
    double lambda = 0.01;

    CodeSlice pool(const ImageRGB& frame, const AffineState& state) const;
};

struct Annulus {
    double inner = 8.0;
    double outer = 16.0;
};

// Centers drawn uniformly (by area) from the annulus around `best`; the
// remaining affine parameters are copied from `best`.
std::vector<AffineState> sample_annulus(const ImageRGB& frame, const AffineState& best, int count,
                                        const Annulus& ring, std::uint64_t rng_seed);

Tensor3 collect_negatives(const ImageRGB& frame, const AffineState& best, int count,
                          const Annulus& ring, const PoolingContext& pipeline,
                          std::uint64_t rng_seed);

struct AppearanceModel {
    SubspaceModel positive;
    std::optional<SubspaceModel> negative;
    double gamma = 0.5;
    std::vector<CodeSlice> pending;
    int update_rate = 5;
    double threshold = 0.0;
    double forgetting = 0.99;
};

// HOSVD of the negative samples with ranks capped at the tensor extents.
SubspaceModel learn_negative_model(const Tensor3& negatives, const Ranks& ranks);

struct UpdateOutcome {
    bool accepted = false;
    bool positive_updated = false;
};

// Gate on best_loglik > threshold. An accepted slice joins the pending
// buffer and the negative model is rebuilt from `negatives`; a full buffer of
// update_rate slices is folded into the positive model. A rejected candidate
// returns the model unchanged.
AppearanceModel maybe_update(const AppearanceModel& model, const CodeSlice& best_slice,
                             double best_loglik, const Tensor3& negatives,
                             UpdateOutcome* outcome = nullptr);

} // namespace spx
