#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "spx/media.hpp"
#include "spx/snic.hpp"

namespace spx {

// Cue column order inside a feature matrix.
enum Cue : int { CueH = 0, CueS, CueI, CueR, CueG, CueB, CueX, CueY };
inline constexpr int kCueCount = 8;

// Normalized histogram: bin i holds the fraction of values in [i/n, (i+1)/n),
// the last bin also takes 1.0.
using HistVec = Eigen::VectorXd;

// n_bins x 8 matrix, one histogram column per cue.
using FeatureMatrix = Eigen::MatrixXd;

// Column-major flattening of a FeatureMatrix, length n_bins * 8.
using FeatureVector = Eigen::VectorXd;

int histogram_bin(double value, int n_bins);

HistVec channel_histogram(std::span<const double> values, int n_bins);

FeatureMatrix superpixel_features(const Patch& patch, const LabelMap& labels, int region_id,
                                  int n_bins);

// Same result as calling superpixel_features for every region, in one pass.
std::vector<FeatureMatrix> all_superpixel_features(const Patch& patch, const LabelMap& labels,
                                                   int n_bins);

FeatureVector flatten(const FeatureMatrix& fm);
FeatureMatrix unflatten(const FeatureVector& a, int n_bins);

} // namespace spx
