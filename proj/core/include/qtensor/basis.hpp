#ifndef QTENSOR_BASIS_HPP
#define QTENSOR_BASIS_HPP

// Orthonormal eigenbases of the S0-valued Laplacian (mixed Dirichlet/Neumann)
// and of the Stokes operator, together with the projection and synthesis
// machinery used by the Galerkin solver.
//
// Torus: analytic plane-wave modes for both operators.
// Rectangle (d=2): separable trig modes for the Laplacian; Stokes modes come
// from a staggered-grid discretization (see mac_stokes.hpp).

#include "qtensor/geometry.hpp"
#include "qtensor/types.hpp"

#include <array>
#include <memory>
#include <optional>

namespace qtensor {

enum class BasisKind { LaplaceS0, Stokes };

// One scalar eigenfunction of the (scalar) Laplacian.
//  Torus:      norm * {1 | cos(kappa.x) | sin(kappa.x)},  kappa_i = 2 pi k_i / L_i.
//  Rectangle:  norm * prod_i f_i(x_i) with f_i the 1D trig factor of index k_i
//              determined by the axis boundary conditions.
struct ScalarMode {
    std::array<int, 3> k{0, 0, 0};
    int trig = 0;  // torus: 0 = const, 1 = cos, 2 = sin (unused for rectangle)
    Real norm = 1.0;
    Real eigenvalue = 0.0;
};

struct StokesMode {
    std::array<int, 3> k{0, 0, 0};
    int trig = 0;       // 0 = const (omega = 0), 1 = cos, 2 = sin
    int pol = 0;        // polarization index; for const modes the axis
    VecDim polvec;      // unit polarization vector (torus)
    Real omega = 0.0;
    int mac_index = -1;  // rectangle: index into the numeric mode set
};

class MacStokesModes;  // mac_stokes.hpp

struct BasisSet {
    BasisKind kind = BasisKind::LaplaceS0;
    Geometry geom;
    int count = 0;

    // LaplaceS0: flat mode i = (profile p, S0 direction m); eigenvalues repeat
    // across directions. profiles.size() * s0_dim(d) >= count.
    std::vector<ScalarMode> profiles;
    std::vector<int> prof_of;  // flat -> profile index
    std::vector<int> dir_of;   // flat -> S0 direction index

    // Stokes
    std::vector<StokesMode> vmodes;
    std::shared_ptr<const MacStokesModes> mac;  // rectangle mode only

    Vector eigenvalues;  // flat, ascending

    int size() const { return count; }
    // Largest per-direction 1D index among retained modes (quadrature sizing).
    int max_index_1d() const;
};

BasisSet make_laplace_basis(const Geometry& geom, int n);

// mac_resolution: cells per direction of the staggered discretization used in
// rectangle mode (>= 64 for production use; smaller grids are for tests).
BasisSet make_stokes_basis(const Geometry& geom, int n, int mac_resolution = 64);

// --- Grid field containers --------------------------------------------------
// S0-valued fields are stored by coordinates in s0_basis(d): n_pts x s.
// Vector fields: n_pts x d. Full matrix fields: n_pts x d*d with column
// j = i*d + c holding the (i,c) entry (for gradients: d_i u_c).
using S0Grid = Matrix;
using VecGrid = Matrix;
using MatGrid = Matrix;

MatD s0_at(const S0Grid& f, int p, int d);
void set_s0_at(S0Grid& f, int p, const MatD& m);
MatD mat_at(const MatGrid& f, int p, int d);
void set_mat_at(MatGrid& f, int p, const MatD& m);

// --- Harmonic extension of Dirichlet boundary data ---------------------------
// Data on a Dirichlet face: amplitude * [tangential trig factor of index m]
// * s0_basis[s0_dir]; the tangential family is the one induced by the
// tangential axis boundary conditions, with unit-amplitude (unnormalized)
// trig factors.
struct BoundaryTerm {
    Face face = Face::X0;
    int m = 0;
    int s0_dir = 0;
    Real amplitude = 0.0;
};
using BoundaryData = std::vector<BoundaryTerm>;

class HarmonicExtension {
  public:
    HarmonicExtension() = default;
    HarmonicExtension(const Geometry& geom, const BoundaryData& data);

    bool empty() const { return terms_.empty(); }
    MatD value(const VecDim& x) const;
    std::vector<MatD> gradient(const VecDim& x) const;  // d entries
    // Laplacian is identically zero by construction.

    S0Grid sample(const Quadrature& quad) const;
    std::vector<S0Grid> sample_gradient(const Quadrature& quad) const;

    const Geometry& geometry() const { return geom_; }

  private:
    struct Term {
        int axis;  // normal axis of the profile
        int m;     // tangential 1D index
        int s0_dir;
        Real mu;             // tangential frequency
        Real alpha, beta;    // alpha cosh(mu x) + beta sinh(mu x), or alpha + beta x
    };
    Geometry geom_;
    std::vector<Term> terms_;
    int d_ = 2;

    Real profile(const Term& t, Real x) const;
    Real profile_deriv(const Term& t, Real x) const;
    Real tangential(const Term& t, Real y) const;
    Real tangential_deriv(const Term& t, Real y) const;
};

// 1D trig factor of the rectangle Laplace basis along an axis. Returns the
// angular frequency; *is_sin tells sin vs cos. Used for traces and assembly.
Real rect_factor_frequency(const Geometry& geom, int axis, int m, bool* is_sin);

// --- Evaluation tables -------------------------------------------------------

class TensorBasisTables {
  public:
    TensorBasisTables(const BasisSet& basis, const Quadrature& quad,
                      const HarmonicExtension* tilde = nullptr);

    int n_modes() const { return basis_.count; }
    int n_points() const { return n_pts_; }
    int dim() const { return d_; }
    int s() const { return s_; }
    const BasisSet& basis() const { return basis_; }
    const Quadrature& quad() const { return *quad_; }
    const Vector& weights() const { return quad_->weights; }
    bool has_tilde() const { return has_tilde_; }

    // Q = tilde + sum_i h_i e_i
    S0Grid synth(const Vector& h) const;
    // homogeneous part only
    S0Grid synth_homog(const Vector& h) const;
    std::vector<S0Grid> synth_grad(const Vector& h) const;
    // Laplacian of the full field (tilde is harmonic): sum_i -lambda_i h_i e_i
    S0Grid synth_laplacian(const Vector& h) const;
    Vector laplacian_coeffs(const Vector& h) const;

    // coeffs_i = (f, e_i)_L2
    Vector project(const S0Grid& f) const;

    Real inner(const S0Grid& f, const S0Grid& g) const;
    Real norm_l2(const S0Grid& f) const;

    const S0Grid& tilde_values() const { return tilde_val_; }
    const std::vector<S0Grid>& tilde_gradient() const { return tilde_grad_; }

  private:
    BasisSet basis_;
    std::shared_ptr<const Quadrature> quad_;
    int d_, s_, n_pts_, n_prof_;
    bool has_tilde_ = false;
    Matrix prof_val_;                // n_pts x n_prof
    std::vector<Matrix> prof_grad_;  // d of n_pts x n_prof
    S0Grid tilde_val_;
    std::vector<S0Grid> tilde_grad_;
};

class VelocityBasisTables {
  public:
    VelocityBasisTables(const BasisSet& basis, const Quadrature& quad);

    int n_modes() const { return basis_.count; }
    int n_points() const { return n_pts_; }
    int dim() const { return d_; }
    const BasisSet& basis() const { return basis_; }
    const Quadrature& quad() const { return *quad_; }
    const Vector& weights() const { return quad_->weights; }

    VecGrid synth(const Vector& coeffs) const;
    MatGrid synth_grad(const Vector& coeffs) const;  // col i*d+c = d_i u_c

    // coeffs_k = (f, v_k)
    Vector project(const VecGrid& f) const;
    // coeffs_k = (G, grad v_k) = sum_{i,c} int G_ic d_i v_c
    Vector project_gradtest(const MatGrid& g) const;

    Real inner(const VecGrid& f, const VecGrid& g) const;
    Real norm_l2(const VecGrid& f) const;

    const Matrix& value_table(int comp) const { return val_[comp]; }
    const Matrix& grad_table(int i, int comp) const { return grad_[i * d_ + comp]; }

  private:
    BasisSet basis_;
    std::shared_ptr<const Quadrature> quad_;
    int d_, n_pts_;
    std::vector<Matrix> val_;   // per component: n_pts x n
    std::vector<Matrix> grad_;  // per (i, c): n_pts x n
};

// --- Helmholtz/Leray projection ----------------------------------------------
// Torus: exact full-spectrum FFT projection. The grid must be the uniform
// quadrature grid. Rectangle: expansion in the numeric Stokes modes.
VecGrid leray_project(const VecGrid& v, const Quadrature& quad, const Geometry& geom);
VecGrid leray_project(const VecGrid& v, const VelocityBasisTables& tables);

// Spectral divergence magnitude of a velocity sample grid, max over modes
// (torus only; used by tests and invariant checks).
Real divergence_linf(const VecGrid& v, const Quadrature& quad, const Geometry& geom);

}  // namespace qtensor

#endif
