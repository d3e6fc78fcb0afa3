#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <vector>

#include <Eigen/Dense>

#include "spx/error.hpp"

namespace spx {

using Dims3 = std::array<Eigen::Index, 3>;

// Dense third-order tensor stored with the first index varying fastest.
class Tensor3 {
public:
    Tensor3() = default;
    explicit Tensor3(const Dims3& dims);
    Tensor3(const Dims3& dims, std::vector<double> data);

    // Stacks equally sized d1 x d2 matrices along mode 3.
    static Tensor3 from_slices(const std::vector<Eigen::MatrixXd>& slices);
    static Tensor3 from_slice(const Eigen::MatrixXd& slice);

    const Dims3& dims() const { return dims_; }
    Eigen::Index dim(int mode) const { return dims_.at(static_cast<std::size_t>(mode - 1)); }
    std::size_t size() const { return data_.size(); }

    double& operator()(Eigen::Index i, Eigen::Index j, Eigen::Index k)
    {
        return data_[static_cast<std::size_t>(i + dims_[0] * (j + dims_[1] * k))];
    }
    double operator()(Eigen::Index i, Eigen::Index j, Eigen::Index k) const
    {
        return data_[static_cast<std::size_t>(i + dims_[0] * (j + dims_[1] * k))];
    }

    const std::vector<double>& data() const { return data_; }

    // Frontal slice k as a d1 x d2 matrix.
    Eigen::MatrixXd slice(Eigen::Index k) const;

    bool operator==(const Tensor3&) const = default;

private:
    Dims3 dims_{0, 0, 0};
    std::vector<double> data_;
};

// Mode-n unfolding (n = 1, 2, 3): the mode-n fibers become columns, the two
// remaining indices cycle with the lower-numbered one fastest.
Eigen::MatrixXd unfold(const Tensor3& t, int mode);
Tensor3 fold(const Eigen::MatrixXd& m, int mode, const Dims3& dims);

// fold(m * unfold(t, mode), mode); the mode extent becomes m.rows().
Tensor3 mode_product(const Tensor3& t, const Eigen::MatrixXd& m, int mode);

struct Ranks {
    int r1 = 8;
    int r2 = 8;
    int r3 = 5;
};

// Mean slice plus orthonormal bases for modes 1 and 2 (column spaces of the
// centered unfoldings) and mode 3 (row space of the centered mode-3
// unfolding, i.e. a basis of vectorized slices).
struct SubspaceModel {
    Tensor3 mean;
    Eigen::MatrixXd u1;
    Eigen::MatrixXd u2;
    Eigen::MatrixXd v3;
    Eigen::VectorXd sv1;
    Eigen::VectorXd sv2;
    Eigen::VectorXd sv3;
    Ranks ranks;
    long long n_obs = 0;
    // Forgetting-weighted sample count used for mean blending.
    double effective_count = 0.0;

    Eigen::Index d1() const { return mean.dim(1); }
    Eigen::Index d2() const { return mean.dim(2); }
};

// Model with the given mean and empty bases; nothing absorbed yet.
SubspaceModel empty_model(const Eigen::MatrixXd& mean_slice, const Ranks& ranks);

Tensor3 mean_slice(const Tensor3& t);

SubspaceModel hosvd(const Tensor3& t, const Ranks& ranks);

// Sequential Karhunen-Loeve update of all three mode bases with the batch
// slices, blending the mean with forgetting-weighted averaging and appending
// the mean-correction column block.
SubspaceModel incremental_update(const SubspaceModel& model, const Tensor3& batch,
                                 double forgetting);

// Top-r left singular vectors and values of m; r may exceed the thin count up
// to m.rows().
void top_left_singular(const Eigen::MatrixXd& m, int r, Eigen::MatrixXd& basis,
                       Eigen::VectorXd& values);

void write_matrix_text(const std::filesystem::path& path, const Eigen::MatrixXd& m);

} // namespace spx
