#include "spx/appearance.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "spx/snic.hpp"

namespace spx {

ReconstructionError reconstruction_terms(const Eigen::MatrixXd& candidate,
                                         const SubspaceModel& model, double gamma)
{
    if (candidate.rows() != model.d1() || candidate.cols() != model.d2())
        throw Error(ErrorCode::Parameter, "candidate does not match the subspace model");

    const Eigen::MatrixXd x = candidate - model.mean.slice(0);

    // X x1 P1 x2 P2 for a single slice is P1 X P2; its mode-1 and mode-2
    // unfoldings are the matrix and its transpose.
    const Eigen::MatrixXd core = model.u1.transpose() * x * model.u2;
    const Eigen::MatrixXd resid = x - model.u1 * core * model.u2.transpose();
    const Eigen::MatrixXd resid_t = resid.transpose();

    const Eigen::Map<const Eigen::RowVectorXd> row(x.data(), x.size());
    const Eigen::RowVectorXd resid3 = row - (row * model.v3) * model.v3.transpose();

    ReconstructionError re;
    re.re1 = resid.squaredNorm() + resid_t.squaredNorm();
    re.re2 = resid3.squaredNorm();
    re.total = gamma * re.re1 + (1.0 - gamma) * re.re2;
    return re;
}

double reconstruction_error(const Tensor3& candidate, const SubspaceModel& model, double gamma)
{
    if (candidate.dim(3) != 1)
        throw Error(ErrorCode::Parameter, "candidate tensor must hold a single slice");
    return reconstruction_terms(candidate.slice(0), model, gamma).total;
}

double log_likelihood(double re_pos, std::optional<double> re_neg)
{
    return re_neg ? *re_neg - re_pos : -re_pos;
}

CodeSlice PoolingContext::pool(const ImageRGB& frame, const AffineState& state) const
{
    if (!coder)
        throw Error(ErrorCode::InvalidArgument, "pooling context has no dictionary");
    const Patch patch = extract_template(frame, state, template_w, template_h);
    const LabelMap labels = segment(patch, superpixels, compactness);
    return pool_candidate(patch, labels, *coder, lambda, bins);
}

std::vector<AffineState> sample_annulus(const ImageRGB& frame, const AffineState& best, int count,
                                        const Annulus& ring, std::uint64_t rng_seed)
{
    if (count < 1)
        throw Error(ErrorCode::Parameter, "negative sample count must be at least 1");
    if (!(ring.inner > 0.0 && ring.inner < ring.outer))
        throw Error(ErrorCode::Parameter, "annulus needs 0 < inner < outer");

    // Distance from the center to the nearest frame point.
    const double gx = std::max({0.0 - best.x, 0.0, best.x - (frame.width() - 1)});
    const double gy = std::max({0.0 - best.y, 0.0, best.y - (frame.height() - 1)});
    if (std::hypot(gx, gy) > ring.outer)
        throw Error(ErrorCode::DegenerateGeometry, "negative sampling annulus lies outside the frame");

    std::mt19937_64 rng(rng_seed);
    std::uniform_real_distribution<double> radius_sq(ring.inner * ring.inner, ring.outer * ring.outer);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);

    std::vector<AffineState> states;
    states.reserve(count);
    for (int n = 0; n < count; ++n) {
        const double r = std::sqrt(radius_sq(rng));
        const double a = angle(rng);
        AffineState s = best;
        s.x = best.x + r * std::cos(a);
        s.y = best.y + r * std::sin(a);
        states.push_back(s);
    }
    return states;
}

Tensor3 collect_negatives(const ImageRGB& frame, const AffineState& best, int count,
                          const Annulus& ring, const PoolingContext& pipeline,
                          std::uint64_t rng_seed)
{
    const auto states = sample_annulus(frame, best, count, ring, rng_seed);
    std::vector<Eigen::MatrixXd> slices;
    slices.reserve(states.size());
    for (const auto& s : states)
        slices.push_back(pipeline.pool(frame, s));
    return Tensor3::from_slices(slices);
}

SubspaceModel learn_negative_model(const Tensor3& negatives, const Ranks& ranks)
{
    const auto cap = [](int r, Eigen::Index d) { return static_cast<int>(std::min<Eigen::Index>(r, d)); };
    return hosvd(negatives, {cap(ranks.r1, negatives.dim(1)), cap(ranks.r2, negatives.dim(2)),
                             cap(ranks.r3, negatives.dim(3))});
}

AppearanceModel maybe_update(const AppearanceModel& model, const CodeSlice& best_slice,
                             double best_loglik, const Tensor3& negatives, UpdateOutcome* outcome)
{
    UpdateOutcome result;
    if (!(best_loglik > model.threshold)) {
        if (outcome)
            *outcome = result;
        return model;
    }

    AppearanceModel next = model;
    result.accepted = true;
    next.pending.push_back(best_slice);
    next.negative = learn_negative_model(negatives, next.positive.ranks);

    if (static_cast<int>(next.pending.size()) >= next.update_rate) {
        next.positive = incremental_update(next.positive, Tensor3::from_slices(next.pending),
                                           next.forgetting);
        next.pending.clear();
        result.positive_updated = true;
    }
    if (outcome)
        *outcome = result;
    return next;
}

} // namespace spx
