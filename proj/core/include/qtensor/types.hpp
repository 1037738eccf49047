#ifndef QTENSOR_TYPES_HPP
#define QTENSOR_TYPES_HPP

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace qtensor {

using Real = double;

// Small d x d matrices, d in {2,3}. Bounded dynamic size keeps them on the
// stack while allowing the spatial dimension to be a runtime parameter.
using MatD = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic, 0, 3, 3>;
using VecDim = Eigen::Matrix<Real, Eigen::Dynamic, 1, 0, 3, 1>;

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline int s0_dim(int d) { return d * (d + 1) / 2 - 1; }

// Orthonormal basis of S0 (symmetric trace-free d x d matrices) under the
// Frobenius inner product. Fixed deterministic ordering.
const std::vector<MatD>& s0_basis(int d);

inline MatD identity(int d) { return MatD::Identity(d, d); }

// Expand coordinates in the s0_basis into a matrix.
MatD s0_from_coords(const Eigen::Ref<const Vector>& c, int d);

// Coordinates of a (symmetric trace-free) matrix in the s0_basis.
Vector s0_coords(const MatD& m);

inline void require(bool cond, const char* msg) {
    if (!cond)
        throw std::invalid_argument(msg);
}

}  // namespace qtensor

#endif
