#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include <Eigen/Dense>

#include "spx/cues.hpp"
#include "spx/snic.hpp"

namespace spx {

// B x z matrix whose columns (atoms) have unit Euclidean norm.
struct Dictionary {
    Eigen::MatrixXd atoms;

    int feature_length() const { return static_cast<int>(atoms.rows()); }
    int size() const { return static_cast<int>(atoms.cols()); }
};

using SparseCode = Eigen::VectorXd;

// z x s matrix; column j is the code of superpixel slot j.
using CodeSlice = Eigen::MatrixXd;

struct KMeansOptions {
    int max_iterations = 100;
    double tolerance = 1e-6;
};

// k-means++ seeded by rng_seed, Lloyd iterations until no centroid moves more
// than the tolerance, then each centroid is scaled to unit norm.
Dictionary learn_dictionary(const std::vector<FeatureVector>& samples, int z,
                            std::uint64_t rng_seed, const KMeansOptions& options = {});

struct LassoOptions {
    double tolerance = 1e-8;
    int max_sweeps = 1000;
    // Active-set (feature-sign) search: tried from h = 0 before any sweep and
    // again after every polish_every sweeps until it certifies optimality.
    // 0 leaves plain coordinate descent.
    int polish_every = 5;
    // Scaled by max(1, |D^T a|_inf).
    double kkt_tolerance = 1e-9;
};

// Solves min_h |a - D h|^2 + lambda |h|_1. Cyclic coordinate descent with
// soft thresholding, zero-initialized, backs up an exact active-set search;
// the dictionary's Gram matrix is often near singular and sweeps alone crawl.
// Holds the Gram matrix so repeated encodes only pay for D^T a.
class SparseCoder {
public:
    explicit SparseCoder(Dictionary dict, LassoOptions options = {});

    const Dictionary& dictionary() const { return dict_; }
    const Eigen::MatrixXd& gram() const { return gram_; }

    // If objective_trace is given, the objective after each sweep (or after
    // the first active-set search, if that certifies) is appended.
    SparseCode encode(const FeatureVector& a, double lambda,
                      std::vector<double>* objective_trace = nullptr) const;

private:
    bool polish(const Eigen::VectorXd& c, double lambda, SparseCode& h, Eigen::VectorXd& q) const;

    Dictionary dict_;
    Eigen::MatrixXd gram_;
    LassoOptions options_;
};

SparseCode sparse_encode(const FeatureVector& a, const Dictionary& dict, double lambda,
                         const LassoOptions& options = {});

double lasso_objective(const FeatureVector& a, const Dictionary& dict, const SparseCode& h,
                       double lambda);

// Features -> flatten -> encode for every region, assembled in slot order.
CodeSlice pool_candidate(const Patch& patch, const LabelMap& labels, const SparseCoder& coder,
                         double lambda, int n_bins);
CodeSlice pool_candidate(const Patch& patch, const LabelMap& labels, const Dictionary& dict,
                         double lambda, int n_bins);

// Flat z x B row-major little-endian float64 file; z is recovered from the
// file size.
void save_dictionary_binary(const std::filesystem::path& path, const Dictionary& dict);
Dictionary load_dictionary_binary(const std::filesystem::path& path, int feature_length);

// One atom per line, B values each.
void save_dictionary_text(const std::filesystem::path& path, const Dictionary& dict);
Dictionary load_dictionary_text(const std::filesystem::path& path);

} // namespace spx
