#ifndef QTENSOR_GALERKIN_HPP
#define QTENSOR_GALERKIN_HPP

// Assembly and time integration of the Galerkin coefficient ODE for the
// coupled Navier-Stokes / Q-tensor system, with the exact discrete energy
// accounting that comes with projecting the molecular field.

#include "qtensor/fields.hpp"
#include "qtensor/integrators.hpp"

namespace qtensor {

struct EnergyReport {
    Real t = 0;
    Real kinetic = 0, elastic = 0, bulk = 0, total = 0;
    Real diss_visc = 0;  // cumulative  int_0^t int nu(Q)|Du|^2
    Real diss_H = 0;     // cumulative  Gamma int_0^t int |pi_n H|^2
    Real identity_residual = 0;  // change of E + diss_visc + diss_H over the last interval
    Real diss_H_unprojected = 0;  // cumulative Gamma int |H|^2 (diagnostic, not in the CSV)
};

class GalerkinSystem {
  public:
    // n_velocity may be zero (pure Q relaxation with u = 0).
    GalerkinSystem(const Geometry& geom, const ModelParams& params, int n_velocity,
                   int n_tensor, const BoundaryData& dirichlet_data = {},
                   int mac_resolution = 64);

    const Geometry& geometry() const { return geom_; }
    const ModelParams& params() const { return params_; }
    int n_velocity() const { return n_u_; }
    int n_tensor() const { return n_q_; }
    int n_total() const { return n_u_ + n_q_; }

    std::shared_ptr<const TensorBasisTables> tensor_tables() const { return qtab_; }
    std::shared_ptr<const VelocityBasisTables> velocity_tables() const { return utab_; }
    const HarmonicExtension& tilde() const { return tilde_; }

    // Coefficient packing: y = [velocity coeffs ; tensor coeffs].
    Eigen::Ref<const Vector> u_part(const Vector& y) const { return y.head(n_u_); }
    Eigen::Ref<const Vector> q_part(const Vector& y) const { return y.segment(n_u_, n_q_); }
    Vector pack(const Vector& d, const Vector& h) const;

    // The coefficient ODE y' = f(y) of the Galerkin system.
    void rhs(Real t, const Vector& y, Vector& dy) const;
    OdeRhs ode() const;

    // Spatial weak-form functionals, with the sign they carry on the left
    // side of the weak formulation (so rhs = -[mom ; qforce]):
    //   mom_k    = ((u.grad)u + (pi_n H):grad Q, v_k)
    //              + (nu(Q) Du + (sigma + xi tau2)(Q, pi_n H) - (2xi/d) pi_n H, grad v_k)
    //   qforce_l = ((u.grad)Q - S(grad u, Q), e_l) - Gamma (H, e_l)
    void weak_functionals(const Vector& y, Vector& mom, Vector& qforce) const;

    struct EnergyBreakdown {
        Real kinetic = 0, elastic = 0, bulk = 0, total = 0;
    };
    EnergyBreakdown energies(const Vector& y) const;

    struct DissipationRates {
        Real visc = 0, H = 0, H_unprojected = 0;
    };
    DissipationRates dissipation(const Vector& y) const;

    // H(Q) on the grid and its projected coefficients, for the given tensor
    // coefficients.
    std::pair<S0Grid, Vector> molecular_field(const Vector& h) const;

    // Projection of initial data; throws when Q0 leaves S0 beyond tolerance.
    Vector init_coeffs(const std::function<VecDim(const VecDim&)>& u0,
                       const std::function<MatD(const VecDim&)>& q0) const;
    SimState make_state(Real t, const Vector& y) const;

  private:
    Geometry geom_;
    ModelParams params_;
    int n_u_, n_q_;
    HarmonicExtension tilde_;
    std::shared_ptr<const TensorBasisTables> qtab_;
    std::shared_ptr<const VelocityBasisTables> utab_;

    struct Fields {
        VecGrid u;
        MatGrid grad_u;
        S0Grid q;
        std::vector<S0Grid> grad_q;
        S0Grid h_grid;
        Vector pih;
        S0Grid pih_grid;
    };
    Fields assemble_fields(const Vector& y) const;

    friend class LinearizedOperators;
};

enum class IntegratorKind { ImplicitMidpoint, Rk45 };

struct RunOptions {
    IntegratorKind integrator = IntegratorKind::ImplicitMidpoint;
    Real t_end = 1.0;
    Real dt = 1e-2;                  // midpoint step
    Real rk45_tol = 1e-10;
    Real rk45_dt_init = 1e-3;
    Real midpoint_inner_tol = 1e-11;
    int midpoint_max_iter = 50;
};

struct Trajectory {
    std::vector<Real> times;
    std::vector<Vector> states;  // coefficient vectors, one per accepted step
    bool uniform_dt = false;
    Real dt = 0;
};

struct RunResult {
    Trajectory trajectory;
    std::vector<EnergyReport> reports;
};

// Integrates the Galerkin ODE with the dissipation integrals carried as
// augmented quadrature states, so the energy-identity residual measures pure
// time-integration error.
RunResult run(const GalerkinSystem& sys, const Vector& y0, const RunOptions& opts);

// Single step (convenience wrapper used by tests and the linear solver).
Vector step_coeffs(const GalerkinSystem& sys, Real t, const Vector& y, Real dt,
                   IntegratorKind kind, const RunOptions& opts = {});

// Per-interval residuals of the discrete Lyapunov identity:
//   r_k = [E + D_visc + D_H](t_{k+1}) - [E + D_visc + D_H](t_k).
Vector energy_identity_residuals(const std::vector<EnergyReport>& reports);

}  // namespace qtensor

#endif
