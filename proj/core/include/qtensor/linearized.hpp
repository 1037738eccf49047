#ifndef QTENSOR_LINEARIZED_HPP
#define QTENSOR_LINEARIZED_HPP

// Linearization about a static tensor field Q0: the principal operator of the
// coupled system, an implicit-midpoint evolution solver for the linear
// equation, the shifted nonlinear operator with homogeneous data, and the
// Picard fixed-point driver with contraction diagnostics.

#include "qtensor/galerkin.hpp"

#include <random>

namespace qtensor {

// Trajectories on the uniform time grid t_j = j T / nt, j = 0..nt.
struct StatePair {
    Real T = 0;
    int nt = 0;
    Matrix u;  // n_u x (nt+1)
    Matrix q;  // n_q x (nt+1)

    static StatePair zero(int n_u, int n_q, Real T, int nt);
    StatePair operator-(const StatePair& o) const;
};

// Right-hand sides sampled at grid times and at step midpoints (the midpoint
// samples drive the implicit-midpoint solve, keeping the Picard fixed point
// on exactly the same discretization as the direct Galerkin run).
struct RhsPair {
    Real T = 0;
    int nt = 0;
    Matrix f, g;          // n x (nt+1)
    Matrix f_mid, g_mid;  // n x nt
    bool compatible_initial = true;  // g(0) has zero Gamma_D trace
    Real initial_trace_residual = 0.0;
};

class LinearizedOperators {
  public:
    // q0: tensor coefficients of the expansion point (full homogeneous part;
    // the harmonic extension of the system is included automatically);
    // u0: velocity coefficients of the shifted initial data.
    LinearizedOperators(const GalerkinSystem& sys, Vector u0, Vector q0);

    const GalerkinSystem& system() const { return sys_; }

    // principal part applied to a single-time coefficient pair:
    //   u_rhs_k = -(nu(Q0) Du, Dv_k) - ((sigma + xi tau2)(Q0, lambda dQ)
    //             - (2 xi / d) lambda dQ, grad v_k)
    //   q_rhs_l = (Gamma lambda dQ + S(grad u, Q0), e_l)
    void apply_principal(const Vector& u, const Vector& q, Vector& u_rhs, Vector& q_rhs) const;

    // dense matrix of the principal operator on [u; q]
    const Matrix& principal_matrix() const;

    // solves x' - S(Q0) x = rhs with x(0) = 0 by implicit midpoint on the
    // coefficient ODE (unconditionally stable; the factorization is reused).
    StatePair solve_linear(const RhsPair& rhs) const;

    // shifted nonlinear operator: N0(x) = full_rhs(x + x0) - S(x); at x = 0 it
    // returns the full Galerkin right-hand side at (u0, Q0).
    RhsPair apply_N0(const StatePair& xhat) const;

    // one Picard map application: x -> L^{-1} N0(x)
    StatePair picard_map(const StatePair& xhat) const;

    // discrete X-norm: sup_t (||u||_H1 + ||q||_H2)
    //                  + L2-in-time of the finite-difference time derivatives.
    Real x_norm(const StatePair& x) const;

    const Vector& u0() const { return u0_; }
    const Vector& q0() const { return q0_; }

  private:
    const GalerkinSystem& sys_;
    Vector u0_, q0_;
    S0Grid q0_grid_;
    std::vector<S0Grid> q0_grad_;
    Vector nu0_pt_;  // nu(Q0) per quadrature point
    mutable Matrix principal_;
    mutable bool principal_built_ = false;

    void principal_single(const Vector& u, const Vector& q, Vector& out) const;
    void full_rhs_single(const Vector& u, const Vector& q, Vector& out) const;
};

struct PicardResult {
    StatePair solution;        // full trajectories (x0 + fixed point)
    StatePair homogeneous;     // the fixed point itself
    Vector distances;          // ||x_{k+1} - x_k||_X per iteration
    bool converged = false;
    bool contraction_lost = false;  // distance ratio >= 1 three times in a row
    int iterations = 0;
};

PicardResult picard_solve(const GalerkinSystem& sys, const Vector& u0, const Vector& q0,
                          Real T, int nt, Real tol, int max_iter);

// max over n_pairs random pairs in the X-ball of radius R of
// ||Phi(x1) - Phi(x2)||_X / ||x1 - x2||_X with Phi = L^{-1} N0.
// Bit-reproducible for a fixed seed; degenerate pairs are skipped.
Real contraction_ratio(const GalerkinSystem& sys, const Vector& u0, const Vector& q0, Real T,
                       int nt, Real R, int n_pairs, std::uint64_t seed);

// Both sides of the coercivity-structure identity obtained by pairing the
// principal operator with its own argument under the (lambda-weighted) H1
// Riesz pairing in the Q slot:
//   lhs = -<S(v,P), (v,P)>_weighted
//   rhs = int nu(Q0)|Dv|^2 + lambda^2 int |dP|^2 - int (lambda dP + S(grad v, Q0)) : P
// The coupling cross terms cancel through the algebraic identity; the two
// numbers agree to quadrature precision.
std::pair<Real, Real> coercivity_identity(const GalerkinSystem& sys, const Vector& q0,
                                          const Vector& v, const Vector& p);

}  // namespace qtensor

#endif
