#ifndef QTENSOR_FIELDS_HPP
#define QTENSOR_FIELDS_HPP

#include "qtensor/basis.hpp"
#include "qtensor/tensor_ops.hpp"

namespace qtensor {

// Coefficient-space fields. The basis tables carry the geometry, quadrature
// and (for Q) the static harmonic extension; synthesis is on demand.
struct TensorField {
    Vector coeffs;
    std::shared_ptr<const TensorBasisTables> tables;

    S0Grid grid() const { return tables->synth(coeffs); }
    std::vector<S0Grid> grad_grid() const { return tables->synth_grad(coeffs); }
};

struct VelocityField {
    Vector coeffs;
    std::shared_ptr<const VelocityBasisTables> tables;

    VecGrid grid() const { return tables->synth(coeffs); }
    MatGrid grad_grid() const { return tables->synth_grad(coeffs); }
};

struct SimState {
    Real t = 0.0;
    VelocityField u;
    TensorField q;
    ModelParams params;
};

enum class NormKind { L2, H1, H2, Linf };

// Parseval norms with eigenvalue weights 1, (1+lambda), (1+lambda)^2 on the
// coefficients of a field in a basis span. Linf needs grid synthesis and is
// provided by the callers that hold tables.
Real spectral_norm(const Vector& coeffs, const Vector& eigenvalues, NormKind kind);

}  // namespace qtensor

#endif
