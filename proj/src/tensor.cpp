#include "spx/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>

namespace spx {

namespace {

std::size_t element_count(const Dims3& dims)
{
    for (auto d : dims)
        if (d < 0)
            throw Error(ErrorCode::Parameter, "negative tensor extent");
    return static_cast<std::size_t>(dims[0] * dims[1] * dims[2]);
}

void check_mode(int mode)
{
    if (mode < 1 || mode > 3)
        throw Error(ErrorCode::Parameter, "tensor mode must be 1, 2 or 3");
}

// Row and column of element (i, j, k) in the mode-n unfolding.
struct UnfoldIndex {
    Eigen::Index row;
    Eigen::Index col;
};

UnfoldIndex unfold_index(int mode, const Dims3& d, Eigen::Index i, Eigen::Index j, Eigen::Index k)
{
    switch (mode) {
    case 1:
        return {i, j + d[1] * k};
    case 2:
        return {j, i + d[0] * k};
    default:
        return {k, i + d[0] * j};
    }
}

Dims3 unfold_shape(int mode, const Dims3& d)
{
    switch (mode) {
    case 1:
        return {d[0], d[1] * d[2], 0};
    case 2:
        return {d[1], d[0] * d[2], 0};
    default:
        return {d[2], d[0] * d[1], 0};
    }
}

double relative_cutoff(const Eigen::VectorXd& sv)
{
    return sv.size() ? sv.maxCoeff() * 1e-10 : 0.0;
}

struct Basis {
    Eigen::MatrixXd vectors;
    Eigen::VectorXd values;
};

// One sequential Karhunen-Loeve step: the old basis scaled by its
// (forgotten) singular values is augmented with the new columns, the part of
// the new columns outside the basis is orthogonalized by a rank-revealing QR,
// and the small core [f*S, U^T X; 0, R] is re-decomposed.
Basis sequential_kl(const Basis& old, const Eigen::MatrixXd& data, double forgetting, int rank)
{
    const Eigen::Index dim = data.rows();
    const Eigen::Index r = old.vectors.cols();

    Eigen::MatrixXd proj = old.vectors.transpose() * data;
    Eigen::MatrixXd resid = data - old.vectors * proj;
    // Second Gram-Schmidt pass keeps the residual orthogonal to the basis.
    const Eigen::MatrixXd again = old.vectors.transpose() * resid;
    resid -= old.vectors * again;
    proj += again;

    Eigen::MatrixXd q_new(dim, 0);
    const double scale = std::max(old.values.size() ? old.values.maxCoeff() : 0.0,
                                  data.cols() ? data.colwise().norm().maxCoeff() : 0.0);
    if (resid.cols() > 0 && scale > 0.0) {
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(resid);
        const Eigen::Index diag = std::min(resid.rows(), resid.cols());
        Eigen::Index rk = 0;
        while (rk < diag && std::abs(qr.matrixQR()(rk, rk)) > 1e-12 * scale)
            ++rk;
        rk = std::min<Eigen::Index>(rk, dim - r);
        q_new = qr.householderQ() * Eigen::MatrixXd::Identity(dim, rk);
        const Eigen::MatrixXd back = old.vectors.transpose() * q_new;
        q_new -= old.vectors * back;
        for (Eigen::Index c = 0; c < q_new.cols(); ++c)
            q_new.col(c).normalize();
    }

    const Eigen::Index extra = q_new.cols();
    Eigen::MatrixXd core = Eigen::MatrixXd::Zero(r + extra, r + data.cols());
    core.topLeftCorner(r, r) = (forgetting * old.values).asDiagonal();
    core.topRightCorner(r, data.cols()) = proj;
    core.bottomRightCorner(extra, data.cols()) = q_new.transpose() * resid;
    if (core.rows() == 0) // no energy yet: nothing to span
        return {Eigen::MatrixXd(dim, 0), Eigen::VectorXd(0)};

    Eigen::BDCSVD<Eigen::MatrixXd> svd(core, Eigen::ComputeThinU);
    const Eigen::VectorXd& sv = svd.singularValues();
    const double cutoff = relative_cutoff(sv);
    Eigen::Index keep = 0;
    while (keep < sv.size() && keep < rank && sv[keep] > cutoff)
        ++keep;

    Eigen::MatrixXd frame(dim, r + extra);
    frame << old.vectors, q_new;
    Basis out;
    out.vectors = frame * svd.matrixU().leftCols(keep);
    out.values = sv.head(keep);
    return out;
}

} // namespace

Tensor3::Tensor3(const Dims3& dims) : dims_(dims), data_(element_count(dims), 0.0) {}

Tensor3::Tensor3(const Dims3& dims, std::vector<double> data) : dims_(dims), data_(std::move(data))
{
    if (data_.size() != element_count(dims))
        throw Error(ErrorCode::Parameter, "tensor data length does not match its extents");
    for (double v : data_)
        if (!std::isfinite(v))
            throw Error(ErrorCode::InvalidArgument, "tensor entries must be finite");
}

Tensor3 Tensor3::from_slices(const std::vector<Eigen::MatrixXd>& slices)
{
    if (slices.empty())
        throw Error(ErrorCode::Parameter, "no slices to stack");
    const Eigen::Index d1 = slices.front().rows();
    const Eigen::Index d2 = slices.front().cols();
    std::vector<double> data;
    data.reserve(static_cast<std::size_t>(d1 * d2) * slices.size());
    for (const auto& s : slices) {
        if (s.rows() != d1 || s.cols() != d2)
            throw Error(ErrorCode::Parameter, "slices differ in shape");
        data.insert(data.end(), s.data(), s.data() + s.size());
    }
    return Tensor3({d1, d2, static_cast<Eigen::Index>(slices.size())}, std::move(data));
}

Tensor3 Tensor3::from_slice(const Eigen::MatrixXd& slice)
{
    return from_slices({slice});
}

Eigen::MatrixXd Tensor3::slice(Eigen::Index k) const
{
    if (k < 0 || k >= dims_[2])
        throw Error(ErrorCode::Parameter, "slice index out of range");
    const auto offset = static_cast<std::size_t>(dims_[0] * dims_[1] * k);
    return Eigen::Map<const Eigen::MatrixXd>(data_.data() + offset, dims_[0], dims_[1]);
}

Eigen::MatrixXd unfold(const Tensor3& t, int mode)
{
    check_mode(mode);
    const Dims3& d = t.dims();
    if (mode == 1)
        return Eigen::Map<const Eigen::MatrixXd>(t.data().data(), d[0], d[1] * d[2]);

    const Dims3 shape = unfold_shape(mode, d);
    Eigen::MatrixXd m(shape[0], shape[1]);
    for (Eigen::Index k = 0; k < d[2]; ++k)
        for (Eigen::Index j = 0; j < d[1]; ++j)
            for (Eigen::Index i = 0; i < d[0]; ++i) {
                const auto at = unfold_index(mode, d, i, j, k);
                m(at.row, at.col) = t(i, j, k);
            }
    return m;
}

Tensor3 fold(const Eigen::MatrixXd& m, int mode, const Dims3& dims)
{
    check_mode(mode);
    const Dims3 shape = unfold_shape(mode, dims);
    if (m.rows() != shape[0] || m.cols() != shape[1])
        throw Error(ErrorCode::Parameter, "matrix shape does not match the requested folding");
    Tensor3 t(dims);
    for (Eigen::Index k = 0; k < dims[2]; ++k)
        for (Eigen::Index j = 0; j < dims[1]; ++j)
            for (Eigen::Index i = 0; i < dims[0]; ++i) {
                const auto at = unfold_index(mode, dims, i, j, k);
                t(i, j, k) = m(at.row, at.col);
            }
    return t;
}

Tensor3 mode_product(const Tensor3& t, const Eigen::MatrixXd& m, int mode)
{
    check_mode(mode);
    if (m.cols() != t.dim(mode))
        throw Error(ErrorCode::Parameter, "matrix columns must equal the tensor mode extent");
    Dims3 dims = t.dims();
    dims[static_cast<std::size_t>(mode - 1)] = m.rows();
    return fold(m * unfold(t, mode), mode, dims);
}

void top_left_singular(const Eigen::MatrixXd& m, int r, Eigen::MatrixXd& basis,
                       Eigen::VectorXd& values)
{
    if (r < 0 || r > m.rows())
        throw Error(ErrorCode::Parameter, "rank exceeds the row dimension");
    const bool full = r > std::min(m.rows(), m.cols());
    Eigen::BDCSVD<Eigen::MatrixXd> svd(m, full ? Eigen::ComputeFullU : Eigen::ComputeThinU);
    basis = svd.matrixU().leftCols(r);
    values = Eigen::VectorXd::Zero(r);
    const Eigen::Index n = std::min<Eigen::Index>(r, svd.singularValues().size());
    values.head(n) = svd.singularValues().head(n);
}

Tensor3 mean_slice(const Tensor3& t)
{
    if (t.dim(3) < 1)
        throw Error(ErrorCode::Parameter, "tensor has no slices");
    const Eigen::MatrixXd unfolded = unfold(t, 3);
    const Eigen::RowVectorXd mean = unfolded.colwise().mean();
    return Tensor3({t.dim(1), t.dim(2), 1}, std::vector<double>(mean.data(), mean.data() + mean.size()));
}

SubspaceModel empty_model(const Eigen::MatrixXd& mean, const Ranks& ranks)
{
    SubspaceModel model;
    model.mean = Tensor3::from_slice(mean);
    model.u1 = Eigen::MatrixXd(mean.rows(), 0);
    model.u2 = Eigen::MatrixXd(mean.cols(), 0);
    model.v3 = Eigen::MatrixXd(mean.size(), 0);
    model.sv1 = model.sv2 = model.sv3 = Eigen::VectorXd(0);
    model.ranks = ranks;
    return model;
}

namespace {

Tensor3 centered(const Tensor3& t, const Tensor3& mean)
{
    const Eigen::Index plane = t.dim(1) * t.dim(2);
    std::vector<double> data = t.data();
    for (std::size_t n = 0; n < data.size(); ++n)
        data[n] -= mean.data()[n % static_cast<std::size_t>(plane)];
    return Tensor3(t.dims(), std::move(data));
}

void check_ranks(const Ranks& ranks, const Dims3& d)
{
    if (ranks.r1 < 1 || ranks.r2 < 1 || ranks.r3 < 1)
        throw Error(ErrorCode::Parameter, "ranks must be at least 1");
    if (ranks.r1 > d[0] || ranks.r2 > d[1] || ranks.r3 > d[2] || ranks.r3 > d[0] * d[1])
        throw Error(ErrorCode::Parameter, "rank exceeds tensor extent");
}

} // namespace

SubspaceModel hosvd(const Tensor3& t, const Ranks& ranks)
{
    check_ranks(ranks, t.dims());
    SubspaceModel model;
    model.ranks = ranks;
    model.mean = mean_slice(t);
    const Tensor3 x = centered(t, model.mean);
    top_left_singular(unfold(x, 1), ranks.r1, model.u1, model.sv1);
    top_left_singular(unfold(x, 2), ranks.r2, model.u2, model.sv2);
    // Right singular vectors of the mode-3 unfolding.
    top_left_singular(unfold(x, 3).transpose(), ranks.r3, model.v3, model.sv3);
    model.n_obs = t.dim(3);
    model.effective_count = static_cast<double>(t.dim(3));
    return model;
}

SubspaceModel incremental_update(const SubspaceModel& model, const Tensor3& batch,
                                 double forgetting)
{
    if (!(forgetting > 0.0 && forgetting <= 1.0))
        throw Error(ErrorCode::Parameter, "forgetting factor must lie in (0, 1]");
    if (batch.dim(1) != model.d1() || batch.dim(2) != model.d2() || batch.dim(3) < 1)
        throw Error(ErrorCode::Parameter, "batch slices do not match the model");

    const double n_old = model.effective_count;
    const double u = static_cast<double>(batch.dim(3));
    const Tensor3 batch_mean = mean_slice(batch);
    const Tensor3 x = centered(batch, batch_mean);

    SubspaceModel out = model;
    const double total = forgetting * n_old + u;
    std::vector<double> blended(batch_mean.size());
    for (std::size_t n = 0; n < blended.size(); ++n)
        blended[n] = (forgetting * n_old * model.mean.data()[n] + u * batch_mean.data()[n]) / total;
    out.mean = Tensor3(model.mean.dims(), std::move(blended));

    // Mean-correction block: the shift between the old and batch means,
    // weighted so the combined scatter is exact.
    const double weight = n_old > 0.0 ? std::sqrt(n_old * u / (n_old + u)) : 0.0;
    const Eigen::MatrixXd shift = weight * (batch_mean.slice(0) - model.mean.slice(0));

    auto with_shift = [](const Eigen::MatrixXd& data, const Eigen::MatrixXd& extra) {
        Eigen::MatrixXd m(data.rows(), data.cols() + extra.cols());
        m << data, extra;
        return m;
    };

    const Eigen::Map<const Eigen::VectorXd> shift_vec(shift.data(), shift.size());
    const Basis b1 = sequential_kl({model.u1, model.sv1}, with_shift(unfold(x, 1), shift),
                                   forgetting, model.ranks.r1);
    const Basis b2 = sequential_kl({model.u2, model.sv2},
                                   with_shift(unfold(x, 2), shift.transpose()), forgetting,
                                   model.ranks.r2);
    const Basis b3 = sequential_kl({model.v3, model.sv3},
                                   with_shift(unfold(x, 3).transpose(), shift_vec), forgetting,
                                   model.ranks.r3);
    out.u1 = b1.vectors;
    out.sv1 = b1.values;
    out.u2 = b2.vectors;
    out.sv2 = b2.values;
    out.v3 = b3.vectors;
    out.sv3 = b3.values;
    out.n_obs = model.n_obs + batch.dim(3);
    out.effective_count = total;
    return out;
}

void write_matrix_text(const std::filesystem::path& path, const Eigen::MatrixXd& m)
{
    std::ofstream out(path);
    if (!out)
        throw Error(ErrorCode::Io, "cannot open for writing: " + path.string());
    out << std::setprecision(17);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            out << (j ? " " : "") << m(i, j);
        out << '\n';
    }
}

} // namespace spx
