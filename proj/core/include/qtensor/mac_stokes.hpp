#ifndef QTENSOR_MAC_STOKES_HPP
#define QTENSOR_MAC_STOKES_HPP

// Numeric Stokes eigenmodes on a d=2 rectangle with no-slip walls, computed
// from a second-order staggered (MAC) discretization of (-Laplace, div) as a
// generalized eigenproblem on the discretely divergence-free subspace.

#include "qtensor/geometry.hpp"
#include "qtensor/types.hpp"

namespace qtensor {

class MacStokesModes {
  public:
    // n_modes smallest eigenpairs at `resolution` cells per direction.
    MacStokesModes(const Geometry& geom, int n_modes, int resolution);

    int count() const { return n_; }
    int resolution() const { return nx_; }
    const Vector& eigenvalues() const { return omega_; }
    // Residual of the discrete constrained eigenproblem per mode,
    // || P_df (A x - omega x) ||_M (small once the iteration has converged;
    // the distance to the continuum eigenpair is O(h^2) on top of it).
    const Vector& residuals() const { return residual_; }

    // Bilinear interpolation of the staggered fields (second order).
    VecDim value(int mode, const VecDim& x) const;
    MatD gradient(int mode, const VecDim& x) const;  // (i,c) entry = d_i u_c

    // Discrete (hx hy weighted) L2 inner product of two modes.
    Real mac_inner(int a, int b) const;
    // Max |div u| over cells in the MAC divergence.
    Real mac_divergence_linf(int mode) const;

  private:
    struct Lattice {
        Vector xs, ys;
        Matrix v;  // v(i,j) at (xs[i], ys[j])
    };
    struct ModeData {
        Lattice u, v;          // velocity components
        Lattice dux, duy;      // derivatives of u
        Lattice dvx, dvy;      // derivatives of v
        Vector raw;            // staggered unknown vector (Nu+Nv)
    };

    Geometry geom_;
    int n_ = 0, nx_ = 0, ny_ = 0;
    Real hx_ = 0, hy_ = 0;
    int nu_ = 0, nv_ = 0;
    Vector omega_;
    Vector residual_;
    std::vector<ModeData> modes_;

    void solve_eigenproblem();
    ModeData build_mode(const Vector& x) const;
};

// Smallest n eigenvalues at one resolution (for convergence scans).
Vector mac_stokes_eigenvalues(const Geometry& geom, int n, int resolution);

}  // namespace qtensor

#endif
