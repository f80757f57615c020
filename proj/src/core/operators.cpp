#include "hinv/core/operators.hpp"

#include <string>

#include "hinv/core/error.hpp"

namespace hinv {

namespace {

void require_same_space(const BasisSpace& a, const BasisSpace& b, const char* what) {
    if (!(a == b)) throw InvalidArgument(std::string(what) + ": basis spaces differ");
}

}  // namespace

void require_finite(const Eigen::MatrixXd& mat, const char* what) {
    if (!mat.allFinite()) throw NumericalError(std::string(what) + ": non-finite entries");
}

// ---------------------------------------------------------------------------
// Curve

Curve::Curve(BasisSpace space, Eigen::VectorXd coeffs)
    : space_(space), coeffs_(std::move(coeffs)) {
    if (coeffs_.size() != space_.dim()) throw InvalidArgument("Curve: coefficient length != dim");
    require_finite(coeffs_, "Curve");
}

Curve Curve::zero(BasisSpace space) { return Curve(space, Eigen::VectorXd::Zero(space.dim())); }

Curve Curve::unit(BasisSpace space, int j) {
    if (j < 0 || j >= space.dim()) throw InvalidArgument("Curve::unit: index out of range");
    Eigen::VectorXd v = Eigen::VectorXd::Zero(space.dim());
    v[j] = 1.0;
    return Curve(space, std::move(v));
}

double Curve::inner(const Curve& other) const {
    require_same_space(space_, other.space_, "Curve::inner");
    return coeffs_.dot(other.coeffs_);
}

// ---------------------------------------------------------------------------
// StackedCurve

StackedCurve::StackedCurve(BasisSpace space, int depth, Eigen::VectorXd coeffs)
    : space_(space), depth_(depth), coeffs_(std::move(coeffs)) {
    if (depth_ < 1) throw InvalidArgument("StackedCurve: depth must be >= 1");
    if (coeffs_.size() != static_cast<Eigen::Index>(depth_) * space_.dim())
        throw InvalidArgument("StackedCurve: coefficient length != depth * dim");
    require_finite(coeffs_, "StackedCurve");
}

StackedCurve StackedCurve::stack(std::span<const Curve> blocks) {
    if (blocks.empty()) throw InvalidArgument("StackedCurve::stack: no blocks");
    const BasisSpace space = blocks.front().space();
    const int d = space.dim();
    Eigen::VectorXd v(static_cast<Eigen::Index>(blocks.size()) * d);
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        require_same_space(space, blocks[i].space(), "StackedCurve::stack");
        v.segment(static_cast<Eigen::Index>(i) * d, d) = blocks[i].coeffs();
    }
    return StackedCurve(space, static_cast<int>(blocks.size()), std::move(v));
}

Curve StackedCurve::block(int i) const {
    if (i < 0 || i >= depth_) throw InvalidArgument("StackedCurve::block: index out of range");
    const int d = space_.dim();
    return Curve(space_, coeffs_.segment(static_cast<Eigen::Index>(i) * d, d));
}

// ---------------------------------------------------------------------------
// LinearOp

LinearOp::LinearOp(BasisSpace space, Eigen::MatrixXd mat) : space_(space), mat_(std::move(mat)) {
    if (mat_.rows() != space_.dim() || mat_.cols() != space_.dim())
        throw InvalidArgument("LinearOp: matrix must be dim x dim");
    require_finite(mat_, "LinearOp");
}

LinearOp LinearOp::zero(BasisSpace space) {
    return LinearOp(space, Eigen::MatrixXd::Zero(space.dim(), space.dim()));
}

LinearOp LinearOp::identity(BasisSpace space) {
    return LinearOp(space, Eigen::MatrixXd::Identity(space.dim(), space.dim()));
}

Curve LinearOp::apply(const Curve& x) const {
    require_same_space(space_, x.space(), "LinearOp::apply");
    return Curve(space_, mat_ * x.coeffs());
}

LinearOp LinearOp::adjoint() const { return LinearOp(space_, mat_.transpose()); }

LinearOp operator+(const LinearOp& a, const LinearOp& b) {
    require_same_space(a.space_, b.space_, "LinearOp +");
    return LinearOp(a.space_, a.mat_ + b.mat_);
}

LinearOp operator-(const LinearOp& a, const LinearOp& b) {
    require_same_space(a.space_, b.space_, "LinearOp -");
    return LinearOp(a.space_, a.mat_ - b.mat_);
}

LinearOp operator*(const LinearOp& a, const LinearOp& b) {
    require_same_space(a.space_, b.space_, "LinearOp *");
    return LinearOp(a.space_, a.mat_ * b.mat_);
}

LinearOp operator*(double s, const LinearOp& a) { return LinearOp(a.space_, s * a.mat_); }

// ---------------------------------------------------------------------------
// BlockOp

BlockOp::BlockOp(BasisSpace space, int rows, int cols, Eigen::MatrixXd mat)
    : space_(space), rows_(rows), cols_(cols), mat_(std::move(mat)) {
    if (rows_ < 1 || cols_ < 1) throw InvalidArgument("BlockOp: block counts must be >= 1");
    const int d = space_.dim();
    if (mat_.rows() != static_cast<Eigen::Index>(rows_) * d ||
        mat_.cols() != static_cast<Eigen::Index>(cols_) * d)
        throw InvalidArgument("BlockOp: matrix shape does not match block grid");
    require_finite(mat_, "BlockOp");
}

BlockOp BlockOp::zero(BasisSpace space, int rows, int cols) {
    const int d = space.dim();
    return BlockOp(space, rows, cols, Eigen::MatrixXd::Zero(rows * d, cols * d));
}

BlockOp BlockOp::identity(BasisSpace space, int n) {
    const int d = space.dim();
    return BlockOp(space, n, n, Eigen::MatrixXd::Identity(n * d, n * d));
}

LinearOp BlockOp::block(int i, int j) const {
    if (i < 0 || i >= rows_ || j < 0 || j >= cols_)
        throw InvalidArgument("BlockOp::block: index out of range");
    const int d = space_.dim();
    return LinearOp(space_, mat_.block(i * d, j * d, d, d));
}

BlockOp BlockOp::adjoint() const { return BlockOp(space_, cols_, rows_, mat_.transpose()); }

BlockOp operator*(const BlockOp& a, const BlockOp& b) {
    require_same_space(a.space_, b.space_, "BlockOp *");
    if (a.cols_ != b.rows_) throw InvalidArgument("BlockOp *: inner block counts differ");
    return BlockOp(a.space_, a.rows_, b.cols_, a.mat_ * b.mat_);
}

BlockOp operator+(const BlockOp& a, const BlockOp& b) {
    require_same_space(a.space_, b.space_, "BlockOp +");
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw InvalidArgument("BlockOp +: shapes differ");
    return BlockOp(a.space_, a.rows_, a.cols_, a.mat_ + b.mat_);
}

BlockOp operator-(const BlockOp& a, const BlockOp& b) {
    require_same_space(a.space_, b.space_, "BlockOp -");
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw InvalidArgument("BlockOp -: shapes differ");
    return BlockOp(a.space_, a.rows_, a.cols_, a.mat_ - b.mat_);
}

BlockOp operator*(double s, const BlockOp& a) {
    return BlockOp(a.space_, a.rows_, a.cols_, s * a.mat_);
}

BlockOp block_assemble(const BlockGrid& grid) {
    if (grid.empty() || grid.front().empty()) throw InvalidArgument("block_assemble: empty grid");
    const auto cols = grid.front().size();
    const BasisSpace space = grid.front().front().space();
    const int d = space.dim();
    Eigen::MatrixXd mat(static_cast<Eigen::Index>(grid.size()) * d,
                        static_cast<Eigen::Index>(cols) * d);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (grid[i].size() != cols) throw InvalidArgument("block_assemble: ragged grid");
        for (std::size_t j = 0; j < cols; ++j) {
            require_same_space(space, grid[i][j].space(), "block_assemble");
            mat.block(static_cast<Eigen::Index>(i) * d, static_cast<Eigen::Index>(j) * d, d, d) =
                grid[i][j].mat();
        }
    }
    return BlockOp(space, static_cast<int>(grid.size()), static_cast<int>(cols), std::move(mat));
}

LinearOp block_extract(const BlockOp& op, int i, int j) { return op.block(i, j); }

BlockOp block_row(std::span<const LinearOp> ops) {
    if (ops.empty()) throw InvalidArgument("block_row: no operators");
    BlockGrid grid(1);
    grid[0].assign(ops.begin(), ops.end());
    return block_assemble(grid);
}

std::vector<LinearOp> split_row(const BlockOp& row) {
    if (row.rows() != 1) throw InvalidArgument("split_row: expected a 1 x n block row");
    std::vector<LinearOp> out;
    out.reserve(row.cols());
    for (int j = 0; j < row.cols(); ++j) out.push_back(row.block(0, j));
    return out;
}

BlockOp as_block(const LinearOp& op) { return BlockOp(op.space(), 1, 1, op.mat()); }

LinearOp tensor_product(const Curve& x, const Curve& y) {
    require_same_space(x.space(), y.space(), "tensor_product");
    return LinearOp(x.space(), y.coeffs() * x.coeffs().transpose());
}

OperatorNorms norms(const Eigen::MatrixXd& mat) {
    require_finite(mat, "norms");
    OperatorNorms out;
    out.hs = mat.norm();
    if (mat.size() == 0 || out.hs == 0.0) return out;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(mat);
    const auto& sv = svd.singularValues();
    out.op = sv.size() > 0 ? sv[0] : 0.0;
    out.nuclear = sv.sum();
    return out;
}

OperatorNorms norms(const LinearOp& op) { return norms(op.mat()); }
OperatorNorms norms(const BlockOp& op) { return norms(op.mat()); }

double op_norm(const Eigen::MatrixXd& mat) { return norms(mat).op; }

}  // namespace hinv
