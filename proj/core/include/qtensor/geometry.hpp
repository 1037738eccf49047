#ifndef QTENSOR_GEOMETRY_HPP
#define QTENSOR_GEOMETRY_HPP

#include "qtensor/types.hpp"

#include <array>
#include <string>

namespace qtensor {

enum class GeometryMode { PeriodicTorus, Rectangle };

// Axis-aligned boundary faces of the rectangle, low/high side per axis.
enum class Face : int { X0 = 0, X1 = 1, Y0 = 2, Y1 = 3 };

Face face_from_string(const std::string& s);
std::string face_to_string(Face f);

struct Geometry {
    GeometryMode mode = GeometryMode::PeriodicTorus;
    int d = 2;
    std::vector<Real> lengths;        // d entries
    std::vector<Face> dirichlet_faces;  // rectangle mode; the rest are Neumann

    bool is_dirichlet(Face f) const;
    Real volume() const;
    void validate() const;

    // 1D boundary condition pair along an axis (rectangle mode):
    // {low side is Dirichlet, high side is Dirichlet}.
    std::array<bool, 2> axis_bc(int axis) const;
};

Geometry make_torus(std::vector<Real> lengths);
Geometry make_rectangle(std::vector<Real> lengths, std::vector<Face> dirichlet_faces);

// Tensor-product quadrature grid. Periodic directions use the uniform
// trapezoidal rule (exact for trigonometric polynomials below the grid
// Nyquist frequency); rectangle directions use Gauss-Legendre with enough
// points that all assembled integrals of truncated products are exact to
// machine precision.
struct Quadrature {
    std::vector<Vector> nodes_1d;    // per direction
    std::vector<Vector> weights_1d;  // per direction
    std::vector<int> shape;          // points per direction
    Matrix points;                   // n x d, row-major over the grid
    Vector weights;                  // n

    int n() const { return static_cast<int>(weights.size()); }
    int dim() const { return static_cast<int>(shape.size()); }
};

// max_index: largest per-direction wavenumber / 1D mode index that must be
// integrated exactly in quartic products.
Quadrature make_quadrature(const Geometry& geom, int max_index);

// Gauss-Legendre rule with n points on (-1, 1).
void gauss_legendre(int n, Vector& nodes, Vector& weights);

}  // namespace qtensor

#endif
