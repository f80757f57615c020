#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "hinv/core/basis.hpp"

namespace hinv {

/// Element of the discretized space: coefficients in the orthonormal basis.
class Curve {
public:
    Curve(BasisSpace space, Eigen::VectorXd coeffs);
    static Curve zero(BasisSpace space);
    static Curve unit(BasisSpace space, int j);

    [[nodiscard]] const BasisSpace& space() const noexcept { return space_; }
    [[nodiscard]] const Eigen::VectorXd& coeffs() const noexcept { return coeffs_; }
    [[nodiscard]] double norm() const { return coeffs_.norm(); }
    [[nodiscard]] double inner(const Curve& other) const;

private:
    BasisSpace space_;
    Eigen::VectorXd coeffs_;
};

/// Cartesian-power element (X_k, X_{k-1}, ..., X_{k-L+1}).
class StackedCurve {
public:
    StackedCurve(BasisSpace space, int depth, Eigen::VectorXd coeffs);
    static StackedCurve stack(std::span<const Curve> blocks);

    [[nodiscard]] const BasisSpace& space() const noexcept { return space_; }
    [[nodiscard]] int depth() const noexcept { return depth_; }
    [[nodiscard]] const Eigen::VectorXd& coeffs() const noexcept { return coeffs_; }
    [[nodiscard]] Curve block(int i) const;
    [[nodiscard]] double norm() const { return coeffs_.norm(); }

private:
    BasisSpace space_;
    int depth_;
    Eigen::VectorXd coeffs_;
};

/**
 * @brief Bounded operator on the discretized space, y = mat * x.
 *
 * All entries are finite; the Hilbert-Schmidt norm is the Frobenius norm of mat.
 */
class LinearOp {
public:
    LinearOp(BasisSpace space, Eigen::MatrixXd mat);
    static LinearOp zero(BasisSpace space);
    static LinearOp identity(BasisSpace space);

    [[nodiscard]] const BasisSpace& space() const noexcept { return space_; }
    [[nodiscard]] const Eigen::MatrixXd& mat() const noexcept { return mat_; }
    [[nodiscard]] int dim() const noexcept { return space_.dim(); }

    [[nodiscard]] Curve apply(const Curve& x) const;
    [[nodiscard]] LinearOp adjoint() const;
    [[nodiscard]] double hs_norm() const { return mat_.norm(); }

    friend LinearOp operator+(const LinearOp& a, const LinearOp& b);
    friend LinearOp operator-(const LinearOp& a, const LinearOp& b);
    friend LinearOp operator*(const LinearOp& a, const LinearOp& b);
    friend LinearOp operator*(double s, const LinearOp& a);

private:
    BasisSpace space_;
    Eigen::MatrixXd mat_;
};

/**
 * @brief Operator between Cartesian powers H^cols -> H^rows.
 *
 * Stored as one dense (rows*dim) x (cols*dim) matrix; block (i, j) is the
 * dim x dim submatrix at offset (i*dim, j*dim). Indices are 0-based.
 */
class BlockOp {
public:
    BlockOp(BasisSpace space, int rows, int cols, Eigen::MatrixXd mat);
    static BlockOp zero(BasisSpace space, int rows, int cols);
    static BlockOp identity(BasisSpace space, int n);

    [[nodiscard]] const BasisSpace& space() const noexcept { return space_; }
    [[nodiscard]] int rows() const noexcept { return rows_; }
    [[nodiscard]] int cols() const noexcept { return cols_; }
    [[nodiscard]] int dim() const noexcept { return space_.dim(); }
    [[nodiscard]] const Eigen::MatrixXd& mat() const noexcept { return mat_; }

    [[nodiscard]] LinearOp block(int i, int j) const;
    [[nodiscard]] BlockOp adjoint() const;
    [[nodiscard]] double hs_norm() const { return mat_.norm(); }

    /// Composition; inner block counts must agree.
    friend BlockOp operator*(const BlockOp& a, const BlockOp& b);
    friend BlockOp operator+(const BlockOp& a, const BlockOp& b);
    friend BlockOp operator-(const BlockOp& a, const BlockOp& b);
    friend BlockOp operator*(double s, const BlockOp& a);

private:
    BasisSpace space_;
    int rows_;
    int cols_;
    Eigen::MatrixXd mat_;
};

/// Grid of blocks, row-major: grid[i][j] is block (i, j).
using BlockGrid = std::vector<std::vector<LinearOp>>;

[[nodiscard]] BlockOp block_assemble(const BlockGrid& grid);
[[nodiscard]] LinearOp block_extract(const BlockOp& op, int i, int j);
/// 1 x n block row (A_1 ... A_n).
[[nodiscard]] BlockOp block_row(std::span<const LinearOp> ops);
/// Components of a 1 x n block row.
[[nodiscard]] std::vector<LinearOp> split_row(const BlockOp& row);
[[nodiscard]] BlockOp as_block(const LinearOp& op);

/// x (x) y := <x, .> y, whose matrix is y x^T.
[[nodiscard]] LinearOp tensor_product(const Curve& x, const Curve& y);

struct OperatorNorms {
    double op = 0.0;
    double hs = 0.0;
    double nuclear = 0.0;
};

/// Operator, Hilbert-Schmidt and nuclear norms. Throws NumericalError on non-finite entries.
[[nodiscard]] OperatorNorms norms(const Eigen::MatrixXd& mat);
[[nodiscard]] OperatorNorms norms(const LinearOp& op);
[[nodiscard]] OperatorNorms norms(const BlockOp& op);
[[nodiscard]] double op_norm(const Eigen::MatrixXd& mat);

void require_finite(const Eigen::MatrixXd& mat, const char* what);

}  // namespace hinv
