#include "qtensor/galerkin.hpp"

#include <cmath>

namespace qtensor {

GalerkinSystem::GalerkinSystem(const Geometry& geom, const ModelParams& params, int n_velocity,
                               int n_tensor, const BoundaryData& dirichlet_data,
                               int mac_resolution)
    : geom_(geom), params_(params), n_u_(n_velocity), n_q_(n_tensor) {
    geom_.validate();
    params_.validate();
    require(n_tensor >= 1, "GalerkinSystem: need at least one tensor mode");
    require(n_velocity >= 0, "GalerkinSystem: negative velocity mode count");

    BasisSet qbasis = make_laplace_basis(geom_, n_q_);
    BasisSet ubasis;
    int max_idx = qbasis.max_index_1d();
    if (n_u_ > 0) {
        ubasis = make_stokes_basis(geom_, n_u_, mac_resolution);
        max_idx = std::max(max_idx, ubasis.max_index_1d());
    }
    Quadrature quad = make_quadrature(geom_, max_idx);

    if (!dirichlet_data.empty())
        tilde_ = HarmonicExtension(geom_, dirichlet_data);
    qtab_ = std::make_shared<TensorBasisTables>(qbasis, quad, tilde_.empty() ? nullptr : &tilde_);
    if (n_u_ > 0)
        utab_ = std::make_shared<VelocityBasisTables>(ubasis, quad);
}

Vector GalerkinSystem::pack(const Vector& d, const Vector& h) const {
    require(d.size() == n_u_ && h.size() == n_q_, "pack: size mismatch");
    Vector y(n_u_ + n_q_);
    y.head(n_u_) = d;
    y.tail(n_q_) = h;
    return y;
}

GalerkinSystem::Fields GalerkinSystem::assemble_fields(const Vector& y) const {
    require(y.size() == n_total(), "assemble_fields: coefficient size mismatch");
    Fields f;
    const Vector h = q_part(y);
    f.q = qtab_->synth(h);
    f.grad_q = qtab_->synth_grad(h);

    // H = lambda * Delta Q + L(Q); Delta Q comes from the eigenvalue multiply
    // (the harmonic extension drops out).
    S0Grid lap = qtab_->synth_laplacian(h);
    const int npts = qtab_->n_points();
    const int d = geom_.d;
    f.h_grid.resize(npts, qtab_->s());
    for (int p = 0; p < npts; ++p) {
        MatD qp = s0_at(f.q, p, d);
        MatD hp = params_.lambda * s0_at(lap, p, d) + bulk_force(qp, params_);
        set_s0_at(f.h_grid, p, hp);
    }
    f.pih = qtab_->project(f.h_grid);
    f.pih_grid = qtab_->synth_homog(f.pih);

    if (n_u_ > 0) {
        const Vector dvec = u_part(y);
        f.u = utab_->synth(dvec);
        f.grad_u = utab_->synth_grad(dvec);
    }
    return f;
}

void GalerkinSystem::weak_functionals(const Vector& y, Vector& mom, Vector& qforce) const {
    Fields f = assemble_fields(y);
    const int npts = qtab_->n_points();
    const int d = geom_.d;
    const int s = qtab_->s();

    // tensor equation: ((u.grad)Q - S, e_l) - Gamma (H, e_l)
    S0Grid g = S0Grid::Zero(npts, s);
    if (n_u_ > 0) {
        for (int m = 0; m < s; ++m) {
            for (int i = 0; i < d; ++i)
                g.col(m).array() += f.u.col(i).array() * f.grad_q[i].col(m).array();
        }
        for (int p = 0; p < npts; ++p) {
            MatD gu = mat_at(f.grad_u, p, d);
            MatD qp = s0_at(f.q, p, d);
            MatD sten = s_tensor(gu, qp, params_);
            for (int m = 0; m < s; ++m)
                g(p, m) -= (sten.array() * s0_basis(d)[m].array()).sum();
        }
    }
    qforce = qtab_->project(g) - params_.gamma * f.pih;

    if (n_u_ > 0) {
        // velocity equation: advection + transport as vector tests, the
        // stress as a gradient test
        VecGrid adv(npts, d);
        for (int c = 0; c < d; ++c) {
            adv.col(c).setZero();
            for (int i = 0; i < d; ++i)
                adv.col(c).array() += f.u.col(i).array() * f.grad_u.col(i * d + c).array();
        }
        // transport: ((pi_n H) : grad Q)_j, an S0-coordinate dot product
        for (int j = 0; j < d; ++j) {
            Vector t = (f.pih_grid.array() * f.grad_q[j].array()).rowwise().sum();
            adv.col(j) += t;
        }
        MatGrid stress(npts, d * d);
        for (int p = 0; p < npts; ++p) {
            MatD qp = s0_at(f.q, p, d);
            MatD pih = s0_at(f.pih_grid, p, d);
            MatD gu = mat_at(f.grad_u, p, d);
            MatD du = 0.5 * (gu + gu.transpose());
            MatD m = params_.viscosity(qp) * du + sigma_tensor(qp, pih);
            if (params_.xi != 0.0)
                m += params_.xi * tau2_tensor(qp, pih) - (2.0 * params_.xi / d) * pih;
            set_mat_at(stress, p, m);
        }
        mom = utab_->project(adv) + utab_->project_gradtest(stress);
    } else {
        mom.resize(0);
    }
}

void GalerkinSystem::rhs(Real, const Vector& y, Vector& dy) const {
    Vector mom, qforce;
    weak_functionals(y, mom, qforce);
    dy.resize(n_total());
    dy.head(n_u_) = -mom;
    dy.tail(n_q_) = -qforce;
}

OdeRhs GalerkinSystem::ode() const {
    return [this](Real t, const Vector& y, Vector& dy) { rhs(t, y, dy); };
}

GalerkinSystem::EnergyBreakdown GalerkinSystem::energies(const Vector& y) const {
    Fields f = assemble_fields(y);
    const Vector& w = qtab_->weights();
    const int npts = qtab_->n_points();
    const int d = geom_.d;

    EnergyBreakdown e;
    if (n_u_ > 0)
        e.kinetic = 0.5 * ((f.u.array().square()).rowwise().sum() * w.array()).sum();
    Real grad2 = 0;
    for (int i = 0; i < d; ++i)
        grad2 += ((f.grad_q[i].array().square()).rowwise().sum() * w.array()).sum();
    e.elastic = 0.5 * params_.lambda * grad2;
    Real fb = 0;
    for (int p = 0; p < npts; ++p)
        fb += w[p] * bulk_energy(s0_at(f.q, p, d), params_);
    e.bulk = fb;
    e.total = e.kinetic + e.elastic + e.bulk;
    return e;
}

GalerkinSystem::DissipationRates GalerkinSystem::dissipation(const Vector& y) const {
    Fields f = assemble_fields(y);
    const Vector& w = qtab_->weights();
    const int npts = qtab_->n_points();
    const int d = geom_.d;

    DissipationRates r;
    if (n_u_ > 0) {
        for (int p = 0; p < npts; ++p) {
            MatD gu = mat_at(f.grad_u, p, d);
            MatD du = 0.5 * (gu + gu.transpose());
            r.visc += w[p] * params_.viscosity(s0_at(f.q, p, d)) * du.squaredNorm();
        }
    }
    r.H = params_.gamma * ((f.pih_grid.array().square()).rowwise().sum() * w.array()).sum();
    r.H_unprojected =
        params_.gamma * ((f.h_grid.array().square()).rowwise().sum() * w.array()).sum();
    return r;
}

std::pair<S0Grid, Vector> GalerkinSystem::molecular_field(const Vector& h) const {
    Vector y = Vector::Zero(n_total());
    y.tail(n_q_) = h;
    Fields f = assemble_fields(y);
    return {f.h_grid, f.pih};
}

Vector GalerkinSystem::init_coeffs(const std::function<VecDim(const VecDim&)>& u0,
                                   const std::function<MatD(const VecDim&)>& q0) const {
    const Quadrature& quad = qtab_->quad();
    const int npts = quad.n();
    const int d = geom_.d;
    const int s = qtab_->s();

    S0Grid q0g(npts, s);
    for (int p = 0; p < npts; ++p) {
        VecDim x = quad.points.row(p).transpose();
        MatD m = q0(x);
        require(is_s0(m, 1e-10), "init_coeffs: Q0 samples must be symmetric trace-free");
        set_s0_at(q0g, p, m);
    }
    // Q = tilde + pi_n(Q0 - tilde)
    S0Grid homog = q0g - qtab_->tilde_values();
    Vector h = qtab_->project(homog);

    Vector dvec(n_u_);
    if (n_u_ > 0) {
        VecGrid u0g(npts, d);
        for (int p = 0; p < npts; ++p) {
            VecDim x = quad.points.row(p).transpose();
            u0g.row(p) = u0(x).transpose();
        }
        dvec = utab_->project(u0g);
    }
    return pack(dvec, h);
}

SimState GalerkinSystem::make_state(Real t, const Vector& y) const {
    SimState st;
    st.t = t;
    st.params = params_;
    st.u.coeffs = u_part(y);
    st.u.tables = utab_;
    st.q.coeffs = q_part(y);
    st.q.tables = qtab_;
    return st;
}

namespace {

// augmented system: [y ; D_visc ; D_H ; D_H_unprojected]
OdeRhs augmented_ode(const GalerkinSystem& sys) {
    return [&sys](Real t, const Vector& ya, Vector& dya) {
        const int n = sys.n_total();
        Vector y = ya.head(n);
        Vector dy;
        sys.rhs(t, y, dy);
        auto diss = sys.dissipation(y);
        dya.resize(n + 3);
        dya.head(n) = dy;
        dya[n] = diss.visc;
        dya[n + 1] = diss.H;
        dya[n + 2] = diss.H_unprojected;
    };
}

}  // namespace

RunResult run(const GalerkinSystem& sys, const Vector& y0, const RunOptions& opts) {
    require(y0.size() == sys.n_total(), "run: coefficient size mismatch");
    require(opts.t_end >= 0, "run: t_end must be nonnegative");
    const int n = sys.n_total();

    RunResult out;
    Real prev_conserved = 0;
    bool first = true;
    auto record = [&](Real t, const Vector& ya) {
        Vector y = ya.head(n);
        auto e = sys.energies(y);
        EnergyReport rep;
        rep.t = t;
        rep.kinetic = e.kinetic;
        rep.elastic = e.elastic;
        rep.bulk = e.bulk;
        rep.total = e.total;
        rep.diss_visc = ya[n];
        rep.diss_H = ya[n + 1];
        rep.diss_H_unprojected = ya[n + 2];
        const Real conserved = rep.total + rep.diss_visc + rep.diss_H;
        rep.identity_residual = first ? 0.0 : conserved - prev_conserved;
        prev_conserved = conserved;
        first = false;
        out.reports.push_back(rep);
        out.trajectory.times.push_back(t);
        out.trajectory.states.push_back(y);
    };

    Vector ya = Vector::Zero(n + 3);
    ya.head(n) = y0;
    OdeRhs f = augmented_ode(sys);

    if (opts.t_end == 0) {
        record(0.0, ya);
        return out;
    }

    if (opts.integrator == IntegratorKind::ImplicitMidpoint) {
        const int steps = std::max(1, static_cast<int>(std::llround(opts.t_end / opts.dt)));
        MidpointOptions mo;
        mo.fixed_point_tol = opts.midpoint_inner_tol;
        mo.max_fixed_point_iter = opts.midpoint_max_iter;
        integrate_midpoint(f, 0.0, opts.t_end, steps, ya, mo, record);
        out.trajectory.uniform_dt = true;
        out.trajectory.dt = opts.t_end / steps;
    } else {
        Rk45Options ro;
        ro.tol = opts.rk45_tol;
        ro.dt_init = opts.rk45_dt_init;
        integrate_rk45(f, 0.0, opts.t_end, ya, ro, record);
    }
    return out;
}

Vector step_coeffs(const GalerkinSystem& sys, Real t, const Vector& y, Real dt,
                   IntegratorKind kind, const RunOptions& opts) {
    Vector out = y;
    if (kind == IntegratorKind::ImplicitMidpoint) {
        MidpointOptions mo;
        mo.fixed_point_tol = opts.midpoint_inner_tol;
        mo.max_fixed_point_iter = opts.midpoint_max_iter;
        out = midpoint_step(sys.ode(), t, y, dt, mo);
    } else {
        Rk45Options ro;
        ro.tol = opts.rk45_tol;
        ro.dt_init = dt;
        integrate_rk45(sys.ode(), t, t + dt, out, ro, nullptr);
    }
    return out;
}

Vector energy_identity_residuals(const std::vector<EnergyReport>& reports) {
    if (reports.size() < 2)
        return Vector();
    Vector r(static_cast<Eigen::Index>(reports.size()) - 1);
    for (size_t k = 1; k < reports.size(); ++k)
        r[static_cast<Eigen::Index>(k - 1)] = reports[k].identity_residual;
    return r;
}

}  // namespace qtensor
