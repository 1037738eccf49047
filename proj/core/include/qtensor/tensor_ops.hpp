#ifndef QTENSOR_TENSOR_OPS_HPP
#define QTENSOR_TENSOR_OPS_HPP

// Pointwise algebra of the Q-tensor model: the constitutive tensors
// sigma, tau_2, S_1, S_2, S, the elastic stress, the Landau-de Gennes bulk
// potential and its gradient, and the cancellation identity that makes the
// Galerkin scheme dissipative. All functions are pure.

#include "qtensor/types.hpp"

#include <optional>
#include <utility>

namespace qtensor {

enum class ViscosityKind { Constant, Rational };

// nu(Q) = nu0                      (Constant)
// nu(Q) = nu0 + nu1 / (1 + tr Q^2) (Rational), nu0 > 0, nu1 >= 0.
struct Viscosity {
    ViscosityKind kind = ViscosityKind::Constant;
    Real nu0 = 1.0;
    Real nu1 = 0.0;

    Real operator()(const MatD& q) const {
        if (kind == ViscosityKind::Constant)
            return nu0;
        return nu0 + nu1 / (1.0 + q.squaredNorm());
    }
    Real lower_bound() const { return nu0; }
    Real upper_bound() const { return kind == ViscosityKind::Constant ? nu0 : nu0 + nu1; }
};

struct ModelParams {
    Real xi = 0.0;
    Real gamma = 1.0;   // relaxation rate Gamma > 0
    Real lambda = 1.0;  // elastic constant > 0
    Real a = 1.0;       // bulk coefficients; c > 0 keeps f_B bounded below
    Real b = 1.0;
    Real c = 1.0;
    Viscosity viscosity;

    void validate() const;
};

// Symmetric trace-free part of an arbitrary matrix: (M + M^T)/2 - tr(M)/d I.
// Idempotent; fixes S0 matrices. Throws on non-finite entries.
MatD s0_project(const MatD& m);

bool is_s0(const MatD& m, Real tol = 1e-12);

// Splits a velocity gradient into stretch Du (symmetric) and vorticity
// Wu (skew). Convention: (grad u)_ij = d_i u_j.
std::pair<MatD, MatD> sym_skew_split(const MatD& grad_u);

// sigma(Q,H) = QH - HQ (skew).
MatD sigma_tensor(const MatD& q, const MatD& h);

// tau_2(Q,H) = -QH - HQ + 2 (Q + I/d) tr(QH) (symmetric).
MatD tau2_tensor(const MatD& q, const MatD& h);

// S_1 = Wu Q - Q Wu.
MatD s1_tensor(const MatD& grad_u, const MatD& q);

// S_2 = Du Q + Q Du - 2 (Q + I/d) tr(Q grad u).
MatD s2_tensor(const MatD& grad_u, const MatD& q);

// S = S_1 + xi S_2 + (2 xi / d) Du.
MatD s_tensor(const MatD& grad_u, const MatD& q, const ModelParams& p);

// Closed form of S straight from its definition,
//   (xi Du + Wu)(Q + I/d) + (Q + I/d)(xi Du - Wu) - 2 xi (Q + I/d) tr(Q grad u),
// kept as an independent algebraic route for cross-checks.
MatD s_tensor_direct(const MatD& grad_u, const MatD& q, const ModelParams& p);

// Elastic stress -lambda (d_i Q : d_j Q)_ij. The isotropic parts of tau_1
// are dropped; they vanish against divergence-free test functions.
MatD elastic_stress(const std::vector<MatD>& grad_q, const ModelParams& p);

// f_B(Q) = a/2 tr Q^2 - b/3 tr Q^3 + c/4 tr Q^4.
Real bulk_energy(const MatD& q, const ModelParams& p);

// L(Q) = -aQ + b(Q^2 - tr(Q^2)/d I) - c tr(Q^2) Q = -D f_B(Q) restricted to S0.
MatD bulk_force(const MatD& q, const ModelParams& p);

// H(Q) = lambda * laplace_q + L(Q), for a pointwise Laplacian value.
MatD molecular_field_pointwise(const MatD& q, const MatD& laplace_q, const ModelParams& p);

// Left-hand side of the cancellation identity
//   S(grad u, Q1):Q2 + (sigma(Q1,Q2) + xi tau_2(Q1,Q2) - (2 xi / d) Q2):grad u,
// which vanishes identically when tr(grad u) = 0. Throws if the trace
// precondition is violated beyond tolerance.
Real cancellation_residual(const MatD& q1, const MatD& q2, const MatD& grad_u,
                           const ModelParams& p);

}  // namespace qtensor

#endif
