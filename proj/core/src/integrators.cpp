#include "qtensor/integrators.hpp"

#include <Eigen/Dense>

#include <cmath>

namespace qtensor {

Vector midpoint_step(const OdeRhs& f, Real t, const Vector& y, Real dt,
                     const MidpointOptions& opts, MidpointStats* stats) {
    require(dt > 0, "midpoint_step: dt must be positive");
    const int n = static_cast<int>(y.size());
    const Real tm = t + 0.5 * dt;
    const Real scale = std::max<Real>(1.0, y.norm());

    // stage equation k = f(tm, y + dt/2 k)
    Vector k(n), knew(n);
    f(t, y, k);  // explicit Euler predictor for the stage slope
    Real res = 0;
    int it = 0;
    for (; it < opts.max_fixed_point_iter; ++it) {
        f(tm, y + (0.5 * dt) * k, knew);
        res = (knew - k).norm() * 0.5 * dt;
        if (opts.damping != 1.0)
            knew = opts.damping * knew + (1.0 - opts.damping) * k;
        k = knew;
        if (res <= opts.fixed_point_tol * scale) {
            if (stats) {
                stats->iterations = it + 1;
                stats->residual = res;
                stats->used_newton = false;
            }
            return y + dt * k;
        }
    }

    // Newton fallback on g(k) = k - f(tm, y + dt/2 k), finite-difference Jacobian
    Matrix jac(n, n);
    Vector g0(n), gp(n), kp(n);
    for (int newton = 0; newton < 20; ++newton) {
        f(tm, y + (0.5 * dt) * k, g0);
        g0 = k - g0;
        if (g0.norm() * 0.5 * dt <= opts.fixed_point_tol * scale) {
            if (stats) {
                stats->iterations = it + newton;
                stats->residual = g0.norm() * 0.5 * dt;
                stats->used_newton = true;
            }
            return y + dt * k;
        }
        const Real h = 1e-7 * std::max<Real>(1.0, k.norm());
        for (int c = 0; c < n; ++c) {
            kp = k;
            kp[c] += h;
            f(tm, y + (0.5 * dt) * kp, gp);
            gp = kp - gp;
            jac.col(c) = (gp - g0) / h;
        }
        k -= jac.partialPivLu().solve(g0);
    }
    throw std::runtime_error("midpoint_step: stage solve did not converge (residual " +
                             std::to_string(res) + ")");
}

void integrate_midpoint(const OdeRhs& f, Real t0, Real t1, int n_steps, Vector& y,
                        const MidpointOptions& opts, const StepCallback& on_step,
                        std::vector<MidpointStats>* stats) {
    require(n_steps >= 1, "integrate_midpoint: n_steps >= 1");
    const Real dt = (t1 - t0) / n_steps;
    if (on_step)
        on_step(t0, y);
    for (int j = 0; j < n_steps; ++j) {
        MidpointStats st;
        y = midpoint_step(f, t0 + j * dt, y, dt, opts, &st);
        if (stats)
            stats->push_back(st);
        if (on_step)
            on_step(t0 + (j + 1) * dt, y);
    }
}

void integrate_rk45(const OdeRhs& f, Real t0, Real t1, Vector& y, const Rk45Options& opts,
                    const StepCallback& on_step) {
    // Dormand-Prince 5(4)
    static const Real c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static const Real a21 = 1.0 / 5;
    static const Real a31 = 3.0 / 40, a32 = 9.0 / 40;
    static const Real a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static const Real a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                      a54 = -212.0 / 729;
    static const Real a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                      a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static const Real b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                      b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static const Real e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                      e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    const int n = static_cast<int>(y.size());
    Vector k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ynew(n), err(n);
    Real t = t0;
    Real dt = std::min(opts.dt_init, t1 - t0);
    if (on_step)
        on_step(t0, y);
    f(t, y, k1);
    while (t < t1 - 1e-14 * (t1 - t0)) {
        dt = std::min(dt, t1 - t);
        f(t + c2 * dt, y + dt * (a21 * k1), k2);
        f(t + c3 * dt, y + dt * (a31 * k1 + a32 * k2), k3);
        f(t + c4 * dt, y + dt * (a41 * k1 + a42 * k2 + a43 * k3), k4);
        f(t + c5 * dt, y + dt * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4), k5);
        f(t + dt, y + dt * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5), k6);
        ynew = y + dt * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        f(t + dt, ynew, k7);  // FSAL
        err = dt * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

        Real sc = 0;
        for (int i = 0; i < n; ++i) {
            const Real tol_i = opts.tol + opts.tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
            sc = std::max(sc, std::abs(err[i]) / tol_i);
        }
        if (sc <= 1.0) {
            t += dt;
            y = ynew;
            k1 = k7;
            if (on_step)
                on_step(t, y);
        }
        const Real factor =
            sc > 0 ? opts.safety * std::pow(sc, -0.2) : opts.max_growth;
        dt *= std::clamp(factor, 0.2, opts.max_growth);
        if (dt < opts.dt_min)
            throw std::runtime_error("integrate_rk45: step size underflow");
    }
}

}  // namespace qtensor
