#pragma once

#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace hinv {

enum class BasisKind { Fourier, IndicatorGrid };

[[nodiscard]] std::string_view to_string(BasisKind kind);
[[nodiscard]] BasisKind parse_basis_kind(std::string_view name);

/**
 * @brief Finite-resolution model of the separable Hilbert space H.
 *
 * Elements are coefficient vectors with respect to a fixed orthonormal basis,
 * so inner products are Euclidean dot products. The basis kind only matters
 * when a curve is evaluated on [0, 1].
 */
class BasisSpace {
public:
    explicit BasisSpace(int dim, BasisKind kind = BasisKind::Fourier);

    [[nodiscard]] int dim() const noexcept { return dim_; }
    [[nodiscard]] BasisKind kind() const noexcept { return kind_; }

    /// Value of the j'th basis function (0-based) at t in [0, 1].
    [[nodiscard]] double basis_value(int j, double t) const;

    /// Evaluates sum_j coeffs[j] e_j(t) at each grid point.
    [[nodiscard]] Eigen::VectorXd evaluate(const Eigen::VectorXd& coeffs,
                                           const Eigen::VectorXd& grid) const;

    friend bool operator==(const BasisSpace&, const BasisSpace&) = default;

private:
    int dim_;
    BasisKind kind_;
};

}  // namespace hinv
