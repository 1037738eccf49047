#ifndef QTENSOR_INTEGRATORS_HPP
#define QTENSOR_INTEGRATORS_HPP

#include "qtensor/types.hpp"

#include <functional>

namespace qtensor {

using OdeRhs = std::function<void(Real t, const Vector& y, Vector& dy)>;

struct MidpointOptions {
    Real fixed_point_tol = 1e-11;
    int max_fixed_point_iter = 50;
    Real damping = 1.0;
};

struct MidpointStats {
    int iterations = 0;
    Real residual = 0.0;
    bool used_newton = false;
};

// One implicit-midpoint step. The stage equation is solved by damped
// fixed-point iteration; if that stalls, a finite-difference Newton solve on
// the stage residual takes over. Throws when neither converges.
Vector midpoint_step(const OdeRhs& f, Real t, const Vector& y, Real dt,
                     const MidpointOptions& opts, MidpointStats* stats = nullptr);

// Returns the midpoint stage state (y_j + y_{j+1})/2 of the last midpoint_step
// when recomputed from its endpoints.
inline Vector midpoint_stage(const Vector& y0, const Vector& y1) { return 0.5 * (y0 + y1); }

using StepCallback = std::function<void(Real t, const Vector& y)>;

// Fixed-step implicit midpoint from t0 to t1 (n_steps uniform steps); invokes
// on_step after every accepted step (and once at t0).
void integrate_midpoint(const OdeRhs& f, Real t0, Real t1, int n_steps, Vector& y,
                        const MidpointOptions& opts, const StepCallback& on_step,
                        std::vector<MidpointStats>* stats = nullptr);

struct Rk45Options {
    Real tol = 1e-10;         // absolute and relative
    Real dt_init = 1e-3;
    Real dt_min = 1e-12;
    Real safety = 0.9;
    Real max_growth = 5.0;
};

// Adaptive Dormand-Prince 5(4). Steps land exactly on t1. on_step is invoked
// at t0 and after each accepted step.
void integrate_rk45(const OdeRhs& f, Real t0, Real t1, Vector& y, const Rk45Options& opts,
                    const StepCallback& on_step);

}  // namespace qtensor

#endif
