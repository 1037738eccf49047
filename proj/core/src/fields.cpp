#include "qtensor/fields.hpp"

#include <cmath>

namespace qtensor {

Real spectral_norm(const Vector& coeffs, const Vector& eigenvalues, NormKind kind) {
    require(coeffs.size() == eigenvalues.size(), "spectral_norm: size mismatch");
    switch (kind) {
        case NormKind::L2:
            return coeffs.norm();
        case NormKind::H1:
            return std::sqrt(
                (coeffs.array().square() * (1.0 + eigenvalues.array())).sum());
        case NormKind::H2:
            return std::sqrt(
                (coeffs.array().square() * (1.0 + eigenvalues.array()).square()).sum());
        case NormKind::Linf:
            throw std::invalid_argument("spectral_norm: Linf needs grid synthesis");
    }
    return 0.0;
}

}  // namespace qtensor
