#include "spx/coding.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <limits>
#include <random>
#include <sstream>

namespace spx {

namespace {

Eigen::MatrixXd stack_samples(const std::vector<FeatureVector>& samples)
{
    const Eigen::Index b = samples.front().size();
    Eigen::MatrixXd x(b, static_cast<Eigen::Index>(samples.size()));
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (samples[i].size() != b)
            throw Error(ErrorCode::Parameter, "feature vectors differ in length");
        x.col(static_cast<Eigen::Index>(i)) = samples[i];
    }
    return x;
}

// Squared distances, one row per center and one column per sample.
Eigen::MatrixXd squared_distances(const Eigen::MatrixXd& centers, const Eigen::MatrixXd& x,
                                  const Eigen::RowVectorXd& x_norms)
{
    Eigen::MatrixXd d = -2.0 * centers.transpose() * x;
    d.colwise() += centers.colwise().squaredNorm().transpose();
    d.rowwise() += x_norms;
    return d.cwiseMax(0.0);
}

Eigen::MatrixXd kmeanspp_init(const Eigen::MatrixXd& x, int z, std::mt19937_64& rng)
{
    const Eigen::Index n = x.cols();
    Eigen::MatrixXd centers(x.rows(), z);
    std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
    centers.col(0) = x.col(pick(rng));

    Eigen::VectorXd nearest = (x.colwise() - centers.col(0)).colwise().squaredNorm().transpose();
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int c = 1; c < z; ++c) {
        const double total = nearest.sum();
        Eigen::Index chosen = 0;
        if (total > 0.0) {
            const double target = unit(rng) * total;
            double run = 0.0;
            chosen = n - 1;
            for (Eigen::Index i = 0; i < n; ++i) {
                run += nearest[i];
                if (run > target && nearest[i] > 0.0) {
                    chosen = i;
                    break;
                }
            }
        } else {
            chosen = pick(rng);
        }
        centers.col(c) = x.col(chosen);
        nearest = nearest.cwiseMin(
            (x.colwise() - centers.col(c)).colwise().squaredNorm().transpose());
    }
    return centers;
}

double soft_threshold(double v, double t)
{
    if (v > t)
        return v - t;
    if (v < -t)
        return v + t;
    return 0.0;
}

bool all_finite(const Eigen::MatrixXd& m)
{
    return m.allFinite();
}

} // namespace

Dictionary learn_dictionary(const std::vector<FeatureVector>& samples, int z,
                            std::uint64_t rng_seed, const KMeansOptions& options)
{
    if (z < 1)
        throw Error(ErrorCode::Parameter, "dictionary size must be at least 1");
    if (samples.size() < static_cast<std::size_t>(z))
        throw Error(ErrorCode::Parameter, "fewer samples than dictionary atoms");

    const Eigen::MatrixXd x = stack_samples(samples);
    if (!all_finite(x))
        throw Error(ErrorCode::InvalidArgument, "non-finite feature vector");
    const Eigen::Index n = x.cols();
    const Eigen::RowVectorXd x_norms = x.colwise().squaredNorm();

    std::mt19937_64 rng(rng_seed);
    Eigen::MatrixXd centers = kmeanspp_init(x, z, rng);
    std::vector<int> assign(n, 0);

    for (int iter = 0; iter < options.max_iterations; ++iter) {
        const Eigen::MatrixXd d = squared_distances(centers, x, x_norms);
        Eigen::VectorXd own(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            Eigen::Index best = 0;
            own[i] = d.col(i).minCoeff(&best);
            assign[i] = static_cast<int>(best);
        }

        Eigen::MatrixXd next = Eigen::MatrixXd::Zero(x.rows(), z);
        std::vector<int> counts(z, 0);
        for (Eigen::Index i = 0; i < n; ++i) {
            next.col(assign[i]) += x.col(i);
            ++counts[assign[i]];
        }
        for (int c = 0; c < z; ++c) {
            if (counts[c] > 0) {
                next.col(c) /= counts[c];
                continue;
            }
            // Empty cluster: move it onto the sample worst served so far.
            Eigen::Index far = 0;
            own.maxCoeff(&far);
            next.col(c) = x.col(far);
            own[far] = 0.0;
        }

        const double moved = (next - centers).colwise().norm().maxCoeff();
        centers = std::move(next);
        if (moved < options.tolerance)
            break;
    }

    for (int c = 0; c < z; ++c) {
        const double norm = centers.col(c).norm();
        if (norm > 0.0) {
            centers.col(c) /= norm;
        } else {
            centers.col(c).setZero();
            centers(c % centers.rows(), c) = 1.0;
        }
    }
    return Dictionary{std::move(centers)};
}

SparseCoder::SparseCoder(Dictionary dict, LassoOptions options)
    : dict_(std::move(dict)), options_(options)
{
    if (dict_.atoms.cols() < 1 || dict_.atoms.rows() < 1)
        throw Error(ErrorCode::Parameter, "empty dictionary");
    if (!all_finite(dict_.atoms))
        throw Error(ErrorCode::InvalidArgument, "non-finite dictionary");
    gram_ = dict_.atoms.transpose() * dict_.atoms;
}

SparseCode SparseCoder::encode(const FeatureVector& a, double lambda,
                               std::vector<double>* objective_trace) const
{
    if (a.size() != dict_.atoms.rows())
        throw Error(ErrorCode::Parameter, "feature length does not match dictionary");
    if (!(lambda >= 0.0) || !std::isfinite(lambda) || !a.allFinite())
        throw Error(ErrorCode::InvalidArgument, "non-finite sparse coding input");

    const Eigen::Index z = gram_.cols();
    const Eigen::VectorXd c = dict_.atoms.transpose() * a;
    SparseCode h = SparseCode::Zero(z);
    // q tracks G h.
    Eigen::VectorXd q = Eigen::VectorXd::Zero(z);
    const double half_lambda = lambda / 2.0;

    // The active-set search usually certifies the optimum from zero; sweeps
    // only run when it cannot.
    if (options_.polish_every > 0 && polish(c, lambda, h, q)) {
        if (objective_trace)
            objective_trace->push_back(lasso_objective(a, dict_, h, lambda));
        return h;
    }

    for (int sweep = 0; sweep < options_.max_sweeps; ++sweep) {
        double max_change = 0.0;
        for (Eigen::Index j = 0; j < z; ++j) {
            const double gjj = gram_(j, j);
            if (gjj <= 0.0)
                continue;
            const double rho = c[j] - (q[j] - gjj * h[j]);
            const double updated = soft_threshold(rho, half_lambda) / gjj;
            const double delta = updated - h[j];
            if (delta != 0.0) {
                q.noalias() += delta * gram_.col(j);
                h[j] = updated;
                max_change = std::max(max_change, std::abs(delta));
            }
        }
        bool done = max_change < options_.tolerance;
        if (!done && options_.polish_every > 0 && (sweep + 1) % options_.polish_every == 0)
            done = polish(c, lambda, h, q);
        if (objective_trace)
            objective_trace->push_back(lasso_objective(a, dict_, h, lambda));
        if (done)
            break;
    }
    return h;
}

// Feature-sign search warm-started from h. Each round solves the
// stationarity system on the active set under fixed signs, then takes the
// best point of a discrete line search over the sign changes on the way, so
// the objective never increases. Returns true once every optimality condition
// holds.
bool SparseCoder::polish(const Eigen::VectorXd& c, double lambda, SparseCode& h,
                         Eigen::VectorXd& q) const
{
    const Eigen::Index z = h.size();
    const double half_lambda = lambda / 2.0;
    const double tol = options_.kkt_tolerance * std::max(1.0, c.cwiseAbs().maxCoeff());
    Eigen::VectorXd sign = h.cwiseSign();
    std::vector<Eigen::Index> active;
    active.reserve(static_cast<std::size_t>(z));

    for (int round = 0; round < 4 * static_cast<int>(z) + 10; ++round) {
        // half gradient of the smooth part
        bool support_optimal = true;
        for (Eigen::Index j = 0; j < z && support_optimal; ++j)
            if (sign[j] != 0.0 && std::abs(q[j] - c[j] + half_lambda * sign[j]) > tol)
                support_optimal = false;

        if (support_optimal) {
            Eigen::Index worst = -1;
            double worst_excess = tol;
            for (Eigen::Index j = 0; j < z; ++j) {
                if (sign[j] != 0.0)
                    continue;
                const double excess = std::abs(q[j] - c[j]) - half_lambda;
                if (excess > worst_excess) {
                    worst_excess = excess;
                    worst = j;
                }
            }
            if (worst < 0)
                return true;
            sign[worst] = q[worst] > c[worst] ? -1.0 : 1.0;
        }

        active.clear();
        for (Eigen::Index j = 0; j < z; ++j)
            if (sign[j] != 0.0)
                active.push_back(j);
        const auto n = static_cast<Eigen::Index>(active.size());

        Eigen::MatrixXd gaa(n, n);
        Eigen::VectorXd ca(n), sa(n), from(n);
        for (Eigen::Index r = 0; r < n; ++r) {
            for (Eigen::Index k = 0; k < n; ++k)
                gaa(r, k) = gram_(active[r], active[k]);
            ca[r] = c[active[r]];
            sa[r] = sign[active[r]];
            from[r] = h[active[r]];
        }

        // Every point considered lies in the active coordinates.
        const auto objective = [&](const Eigen::VectorXd& x) {
            return x.dot(gaa * x) - 2.0 * ca.dot(x) + lambda * x.lpNorm<1>();
        };
        Eigen::VectorXd best;
        double best_obj = std::numeric_limits<double>::infinity();

        const Eigen::LLT<Eigen::MatrixXd> llt(gaa);
        if (n <= dict_.atoms.rows() && llt.info() == Eigen::Success) {
            const Eigen::VectorXd target = llt.solve(ca - half_lambda * sa);
            if (!target.allFinite())
                return false;
            best = target;
            best_obj = objective(target);
            for (Eigen::Index r = 0; r < n; ++r) {
                if (from[r] == 0.0 || (from[r] > 0.0) == (target[r] > 0.0))
                    continue;
                const double t = from[r] / (from[r] - target[r]);
                Eigen::VectorXd point = from + t * (target - from);
                point[r] = 0.0;
                const double obj = objective(point);
                if (obj < best_obj) {
                    best_obj = obj;
                    best = std::move(point);
                }
            }
        } else {
            // Dependent atoms: along a null direction of the active atoms
            // only the L1 term changes, and it is minimized where some
            // coordinate reaches zero.
            const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gaa);
            const Eigen::VectorXd v = eig.eigenvectors().col(0);
            for (Eigen::Index r = 0; r < n; ++r) {
                if (v[r] == 0.0)
                    continue;
                Eigen::VectorXd point = from - (from[r] / v[r]) * v;
                point[r] = 0.0;
                const double obj = objective(point);
                if (obj < best_obj) {
                    best_obj = obj;
                    best = std::move(point);
                }
            }
            if (best.size() == 0)
                return false;
        }
        if (best_obj > objective(from))
            return false;

        for (Eigen::Index r = 0; r < n; ++r) {
            const double delta = best[r] - h[active[r]];
            if (delta != 0.0) {
                q.noalias() += delta * gram_.col(active[r]);
                h[active[r]] = best[r];
            }
            sign[active[r]] = best[r] > 0.0 ? 1.0 : (best[r] < 0.0 ? -1.0 : 0.0);
        }
    }
    return false;
}

SparseCode sparse_encode(const FeatureVector& a, const Dictionary& dict, double lambda,
                         const LassoOptions& options)
{
    return SparseCoder(dict, options).encode(a, lambda);
}

double lasso_objective(const FeatureVector& a, const Dictionary& dict, const SparseCode& h,
                       double lambda)
{
    return (a - dict.atoms * h).squaredNorm() + lambda * h.lpNorm<1>();
}

CodeSlice pool_candidate(const Patch& patch, const LabelMap& labels, const SparseCoder& coder,
                         double lambda, int n_bins)
{
    const auto features = all_superpixel_features(patch, labels, n_bins);
    CodeSlice slice(coder.dictionary().size(), labels.k);
    for (int j = 0; j < labels.k; ++j)
        slice.col(j) = coder.encode(flatten(features[j]), lambda);
    return slice;
}

CodeSlice pool_candidate(const Patch& patch, const LabelMap& labels, const Dictionary& dict,
                         double lambda, int n_bins)
{
    return pool_candidate(patch, labels, SparseCoder(dict), lambda, n_bins);
}

void save_dictionary_binary(const std::filesystem::path& path, const Dictionary& dict)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error(ErrorCode::Io, "cannot open for writing: " + path.string());
    for (Eigen::Index atom = 0; atom < dict.atoms.cols(); ++atom) {
        for (Eigen::Index i = 0; i < dict.atoms.rows(); ++i) {
            auto bits = std::bit_cast<std::uint64_t>(dict.atoms(i, atom));
            unsigned char bytes[8];
            for (int b = 0; b < 8; ++b)
                bytes[b] = static_cast<unsigned char>(bits >> (8 * b));
            out.write(reinterpret_cast<const char*>(bytes), 8);
        }
    }
    if (!out)
        throw Error(ErrorCode::Io, "write failed: " + path.string());
}

Dictionary load_dictionary_binary(const std::filesystem::path& path, int feature_length)
{
    if (feature_length < 1)
        throw Error(ErrorCode::Parameter, "feature length must be positive");
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorCode::Io, "cannot open dictionary: " + path.string());
    std::vector<unsigned char> raw((std::istreambuf_iterator<char>(in)), {});
    const std::size_t row_bytes = static_cast<std::size_t>(feature_length) * 8;
    if (raw.empty() || raw.size() % row_bytes != 0)
        throw Error(ErrorCode::Io, "dictionary file size does not match feature length: " +
                                       path.string());
    const auto z = static_cast<Eigen::Index>(raw.size() / row_bytes);
    Dictionary dict{Eigen::MatrixXd(feature_length, z)};
    std::size_t pos = 0;
    for (Eigen::Index atom = 0; atom < z; ++atom) {
        for (Eigen::Index i = 0; i < feature_length; ++i) {
            std::uint64_t bits = 0;
            for (int b = 0; b < 8; ++b)
                bits |= static_cast<std::uint64_t>(raw[pos++]) << (8 * b);
            dict.atoms(i, atom) = std::bit_cast<double>(bits);
        }
    }
    return dict;
}

void save_dictionary_text(const std::filesystem::path& path, const Dictionary& dict)
{
    std::ofstream out(path);
    if (!out)
        throw Error(ErrorCode::Io, "cannot open for writing: " + path.string());
    out << std::setprecision(17);
    for (Eigen::Index atom = 0; atom < dict.atoms.cols(); ++atom) {
        for (Eigen::Index i = 0; i < dict.atoms.rows(); ++i)
            out << (i ? " " : "") << dict.atoms(i, atom);
        out << '\n';
    }
}

Dictionary load_dictionary_text(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorCode::Io, "cannot open dictionary: " + path.string());
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ss(line);
        std::vector<double> row;
        double v;
        while (ss >> v)
            row.push_back(v);
        if (!ss.eof())
            throw Error(ErrorCode::Io, "malformed dictionary row in " + path.string());
        if (row.empty())
            continue;
        if (!rows.empty() && row.size() != rows.front().size())
            throw Error(ErrorCode::Io, "ragged dictionary rows in " + path.string());
        rows.push_back(std::move(row));
    }
    if (rows.empty())
        throw Error(ErrorCode::Io, "empty dictionary file: " + path.string());
    Dictionary dict{Eigen::MatrixXd(rows.front().size(), rows.size())};
    for (std::size_t atom = 0; atom < rows.size(); ++atom)
        for (std::size_t i = 0; i < rows[atom].size(); ++i)
            dict.atoms(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(atom)) = rows[atom][i];
    return dict;
}

} // namespace spx
