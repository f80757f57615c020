#include "hinv/core/basis.hpp"

#include <cmath>
#include <numbers>

#include "hinv/core/error.hpp"

namespace hinv {

std::string_view to_string(BasisKind kind) {
    switch (kind) {
        case BasisKind::Fourier: return "fourier";
        case BasisKind::IndicatorGrid: return "indicator-grid";
    }
    return "unknown";
}

BasisKind parse_basis_kind(std::string_view name) {
    if (name == "fourier") return BasisKind::Fourier;
    if (name == "indicator-grid" || name == "indicator_grid") return BasisKind::IndicatorGrid;
    throw InvalidArgument("unknown basis kind '" + std::string(name) + "'");
}

BasisSpace::BasisSpace(int dim, BasisKind kind) : dim_(dim), kind_(kind) {
    if (dim < 1) throw InvalidArgument("BasisSpace: dim must be >= 1");
}

double BasisSpace::basis_value(int j, double t) const {
    if (j < 0 || j >= dim_) throw InvalidArgument("basis index out of range");
    if (kind_ == BasisKind::IndicatorGrid) {
        // e_j = sqrt(dim) * 1[j/dim, (j+1)/dim); the right endpoint belongs to the last cell.
        int cell = static_cast<int>(std::floor(t * dim_));
        if (cell == dim_) cell = dim_ - 1;
        return cell == j ? std::sqrt(static_cast<double>(dim_)) : 0.0;
    }
    // 1, sqrt2 cos(2 pi t), sqrt2 sin(2 pi t), sqrt2 cos(4 pi t), ...
    if (j == 0) return 1.0;
    const int freq = (j + 1) / 2;
    const double arg = 2.0 * std::numbers::pi * freq * t;
    return std::numbers::sqrt2 * (j % 2 == 1 ? std::cos(arg) : std::sin(arg));
}

Eigen::VectorXd BasisSpace::evaluate(const Eigen::VectorXd& coeffs,
                                     const Eigen::VectorXd& grid) const {
    if (coeffs.size() != dim_) throw InvalidArgument("evaluate: coefficient length != dim");
    Eigen::VectorXd out = Eigen::VectorXd::Zero(grid.size());
    for (Eigen::Index g = 0; g < grid.size(); ++g) {
        for (int j = 0; j < dim_; ++j) out[g] += coeffs[j] * basis_value(j, grid[g]);
    }
    return out;
}

}  // namespace hinv
