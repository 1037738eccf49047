#include "qtensor/mac_stokes.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <random>

namespace qtensor {

namespace {

using SpMat = Eigen::SparseMatrix<Real>;
using Triplet = Eigen::Triplet<Real>;

struct MacOperators {
    int nx, ny, nu, nv, np;
    Real hx, hy;

    int uid(int i, int j) const { return (i - 1) * ny + j; }          // i in [1,nx-1]
    int vid(int i, int j) const { return nu + i * (ny - 1) + j - 1; }  // j in [1,ny-1]
    int pid(int i, int j) const { return i * ny + j; }

    SpMat a;    // negative vector Laplacian on (u,v), no-slip
    SpMat div;  // np x (nu+nv)
    SpMat kkt;  // [[A, -div^T],[div, 0]] with one pressure cell pinned
};

MacOperators build_operators(const Geometry& geom, int resolution) {
    MacOperators op;
    op.nx = resolution;
    op.ny = resolution;
    op.hx = geom.lengths[0] / op.nx;
    op.hy = geom.lengths[1] / op.ny;
    op.nu = (op.nx - 1) * op.ny;
    op.nv = op.nx * (op.ny - 1);
    op.np = op.nx * op.ny;
    const Real ihx2 = 1.0 / (op.hx * op.hx), ihy2 = 1.0 / (op.hy * op.hy);

    std::vector<Triplet> ta, tdiv;
    // u momentum: nodes (i*hx, (j+1/2)hy), i in [1,nx-1], j in [0,ny-1].
    // Normal walls hold u = 0 exactly; tangential walls enter through the
    // ghost reflection u_ghost = -u (wall lies halfway to the ghost node),
    // which turns the 2/hy^2 diagonal contribution into 3/hy^2.
    for (int i = 1; i <= op.nx - 1; ++i)
        for (int j = 0; j < op.ny; ++j) {
            const int r = op.uid(i, j);
            const bool wall_lo = (j == 0), wall_hi = (j == op.ny - 1);
            if (i > 1)
                ta.emplace_back(r, op.uid(i - 1, j), -ihx2);
            if (i < op.nx - 1)
                ta.emplace_back(r, op.uid(i + 1, j), -ihx2);
            if (!wall_lo)
                ta.emplace_back(r, op.uid(i, j - 1), -ihy2);
            if (!wall_hi)
                ta.emplace_back(r, op.uid(i, j + 1), -ihy2);
            const Real diag =
                2.0 * ihx2 + (2.0 + (wall_lo ? 1.0 : 0.0) + (wall_hi ? 1.0 : 0.0)) * ihy2;
            ta.emplace_back(r, r, diag);
        }
    // v momentum: nodes ((i+1/2)hx, j*hy), i in [0,nx-1], j in [1,ny-1]
    for (int i = 0; i < op.nx; ++i)
        for (int j = 1; j <= op.ny - 1; ++j) {
            const int r = op.vid(i, j);
            const bool wall_lo = (i == 0), wall_hi = (i == op.nx - 1);
            if (j > 1)
                ta.emplace_back(r, op.vid(i, j - 1), -ihy2);
            if (j < op.ny - 1)
                ta.emplace_back(r, op.vid(i, j + 1), -ihy2);
            if (!wall_lo)
                ta.emplace_back(r, op.vid(i - 1, j), -ihx2);
            if (!wall_hi)
                ta.emplace_back(r, op.vid(i + 1, j), -ihx2);
            const Real diag =
                2.0 * ihy2 + (2.0 + (wall_lo ? 1.0 : 0.0) + (wall_hi ? 1.0 : 0.0)) * ihx2;
            ta.emplace_back(r, r, diag);
        }

    // divergence: cells (i,j)
    for (int i = 0; i < op.nx; ++i)
        for (int j = 0; j < op.ny; ++j) {
            const int r = op.pid(i, j);
            if (i + 1 <= op.nx - 1)
                tdiv.emplace_back(r, op.uid(i + 1, j), 1.0 / op.hx);
            if (i >= 1)
                tdiv.emplace_back(r, op.uid(i, j), -1.0 / op.hx);
            if (j + 1 <= op.ny - 1)
                tdiv.emplace_back(r, op.vid(i, j + 1), 1.0 / op.hy);
            if (j >= 1)
                tdiv.emplace_back(r, op.vid(i, j), -1.0 / op.hy);
        }

    const int nuv = op.nu + op.nv;
    op.a.resize(nuv, nuv);
    op.a.setFromTriplets(ta.begin(), ta.end());
    op.div.resize(op.np, nuv);
    op.div.setFromTriplets(tdiv.begin(), tdiv.end());

    // KKT with the first pressure cell pinned (gauge fixing); the dropped
    // continuity row is implied by the others, so solutions stay exactly
    // divergence free.
    std::vector<Triplet> tk;
    for (int k = 0; k < op.a.outerSize(); ++k)
        for (SpMat::InnerIterator it(op.a, k); it; ++it)
            tk.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
    for (int k = 0; k < op.div.outerSize(); ++k)
        for (SpMat::InnerIterator it(op.div, k); it; ++it) {
            const int prow = static_cast<int>(it.row());
            // gradient block: -div^T
            tk.emplace_back(static_cast<int>(it.col()), nuv + prow, -it.value());
            if (prow != 0)
                tk.emplace_back(nuv + prow, static_cast<int>(it.col()), it.value());
        }
    tk.emplace_back(nuv, nuv, 1.0);
    op.kkt.resize(nuv + op.np, nuv + op.np);
    op.kkt.setFromTriplets(tk.begin(), tk.end());
    return op;
}

// second-order derivative of a rectilinear lattice along x (nonuniform nodes)
Matrix lattice_ddx(const Vector& xs, const Matrix& v) {
    const int nx = static_cast<int>(xs.size());
    const int ny = static_cast<int>(v.cols());
    Matrix out(nx, ny);
    for (int i = 0; i < nx; ++i) {
        int i0 = std::clamp(i, 1, nx - 2);
        const Real x0 = xs[i0 - 1], x1 = xs[i0], x2 = xs[i0 + 1];
        for (int j = 0; j < ny; ++j) {
            const Real f0 = v(i0 - 1, j), f1 = v(i0, j), f2 = v(i0 + 1, j);
            // derivative of the interpolating parabola, evaluated at xs[i]
            const Real x = xs[i];
            const Real d0 = ((x - x1) + (x - x2)) / ((x0 - x1) * (x0 - x2));
            const Real d1 = ((x - x0) + (x - x2)) / ((x1 - x0) * (x1 - x2));
            const Real d2 = ((x - x0) + (x - x1)) / ((x2 - x0) * (x2 - x1));
            out(i, j) = f0 * d0 + f1 * d1 + f2 * d2;
        }
    }
    return out;
}

Matrix lattice_ddy(const Vector& ys, const Matrix& v) {
    return lattice_ddx(ys, v.transpose()).transpose();
}

Real bilinear(const Vector& xs, const Vector& ys, const Matrix& v, Real x, Real y) {
    const int nx = static_cast<int>(xs.size()), ny = static_cast<int>(ys.size());
    auto cell = [](const Vector& c, Real t, int n) {
        int i = static_cast<int>(std::upper_bound(c.data(), c.data() + n, t) - c.data()) - 1;
        return std::clamp(i, 0, n - 2);
    };
    const int i = cell(xs, x, nx), j = cell(ys, y, ny);
    const Real tx = (x - xs[i]) / (xs[i + 1] - xs[i]);
    const Real ty = (y - ys[j]) / (ys[j + 1] - ys[j]);
    return (1 - tx) * (1 - ty) * v(i, j) + tx * (1 - ty) * v(i + 1, j) +
           (1 - tx) * ty * v(i, j + 1) + tx * ty * v(i + 1, j + 1);
}

}  // namespace

MacStokesModes::MacStokesModes(const Geometry& geom, int n_modes, int resolution)
    : geom_(geom), n_(n_modes), nx_(resolution), ny_(resolution) {
    geom.validate();
    require(geom.mode == GeometryMode::Rectangle && geom.d == 2,
            "MacStokesModes: d=2 rectangle only");
    require(resolution >= 8, "MacStokesModes: resolution too small");
    hx_ = geom.lengths[0] / nx_;
    hy_ = geom.lengths[1] / ny_;
    nu_ = (nx_ - 1) * ny_;
    nv_ = nx_ * (ny_ - 1);
    require(n_modes >= 1 && n_modes <= nu_ + nv_ - 8, "MacStokesModes: too many modes");
    solve_eigenproblem();
}

void MacStokesModes::solve_eigenproblem() {
    MacOperators op = build_operators(geom_, nx_);
    const int nuv = nu_ + nv_;
    const Real mass = hx_ * hy_;

    Eigen::SparseLU<SpMat> lu;
    lu.analyzePattern(op.kkt);
    lu.factorize(op.kkt);
    require(lu.info() == Eigen::Success, "MacStokesModes: KKT factorization failed");

    const int nb = std::min(nuv, n_ + 8);
    Matrix x(nuv, nb);
    std::mt19937 rng(0x5f3759dfu);
    std::uniform_real_distribution<Real> unif(-1.0, 1.0);
    for (int c = 0; c < nb; ++c)
        for (int r = 0; r < nuv; ++r)
            x(r, c) = unif(rng);

    Vector kr = Vector::Zero(nuv + op.np);
    Vector prev = Vector::Zero(n_);
    Matrix t(nb, nb);
    for (int iter = 0; iter < 400; ++iter) {
        // inverse iteration through the saddle-point solve
        for (int c = 0; c < nb; ++c) {
            kr.head(nuv) = x.col(c);
            kr.tail(op.np).setZero();
            Vector sol = lu.solve(kr);
            x.col(c) = sol.head(nuv);
        }
        // M-orthonormalize (modified Gram-Schmidt)
        for (int c = 0; c < nb; ++c) {
            for (int b = 0; b < c; ++b)
                x.col(c) -= (mass * x.col(b).dot(x.col(c))) * x.col(b);
            const Real nrm = std::sqrt(mass * x.col(c).squaredNorm());
            require(nrm > 1e-300, "MacStokesModes: basis collapse");
            x.col(c) /= nrm;
        }
        // Rayleigh-Ritz on the divergence-free iterates
        Matrix ax = op.a * x;
        t.noalias() = mass * (x.transpose() * ax);
        Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (t + t.transpose()));
        x = (x * es.eigenvectors()).eval();
        Vector vals = es.eigenvalues().head(n_);
        if (iter > 3 && ((vals - prev).cwiseAbs().array() <=
                         1e-13 * vals.array().abs().max(1.0))
                            .all()) {
            prev = vals;
            break;
        }
        prev = vals;
    }
    omega_ = prev;

    // residual of the constrained eigenproblem: project A x - omega x back to
    // the divergence-free subspace through the same saddle-point solve
    residual_.resize(n_);
    modes_.clear();
    for (int k = 0; k < n_; ++k) {
        Vector ax = op.a * x.col(k) - omega_[k] * x.col(k);
        kr.head(nuv) = ax;
        kr.tail(op.np).setZero();
        Vector sol = lu.solve(kr);
        // K [w;p] = [r;0] gives w with A w - div^T p = r on the df subspace;
        // measure the projected residual as || r + div^T p ||
        Vector proj = ax;
        for (int c = 0; c < op.div.outerSize(); ++c)
            for (SpMat::InnerIterator it(op.div, c); it; ++it)
                proj[it.col()] -= it.value() * sol[nuv + it.row()];
        residual_[k] = std::sqrt(mass) * proj.norm();
        modes_.push_back(build_mode(x.col(k)));
    }
}

MacStokesModes::ModeData MacStokesModes::build_mode(const Vector& x) const {
    ModeData md;
    md.raw = x;

    // u lattice: (nx+1) x (ny+2) including wall zeros
    md.u.xs.resize(nx_ + 1);
    for (int i = 0; i <= nx_; ++i)
        md.u.xs[i] = i * hx_;
    md.u.ys.resize(ny_ + 2);
    md.u.ys[0] = 0.0;
    for (int j = 0; j < ny_; ++j)
        md.u.ys[j + 1] = (j + 0.5) * hy_;
    md.u.ys[ny_ + 1] = geom_.lengths[1];
    md.u.v = Matrix::Zero(nx_ + 1, ny_ + 2);
    for (int i = 1; i <= nx_ - 1; ++i)
        for (int j = 0; j < ny_; ++j)
            md.u.v(i, j + 1) = x[(i - 1) * ny_ + j];

    md.v.xs.resize(nx_ + 2);
    md.v.xs[0] = 0.0;
    for (int i = 0; i < nx_; ++i)
        md.v.xs[i + 1] = (i + 0.5) * hx_;
    md.v.xs[nx_ + 1] = geom_.lengths[0];
    md.v.ys.resize(ny_ + 1);
    for (int j = 0; j <= ny_; ++j)
        md.v.ys[j] = j * hy_;
    md.v.v = Matrix::Zero(nx_ + 2, ny_ + 1);
    for (int i = 0; i < nx_; ++i)
        for (int j = 1; j <= ny_ - 1; ++j)
            md.v.v(i + 1, j) = x[nu_ + i * (ny_ - 1) + j - 1];

    md.dux = {md.u.xs, md.u.ys, lattice_ddx(md.u.xs, md.u.v)};
    md.duy = {md.u.xs, md.u.ys, lattice_ddy(md.u.ys, md.u.v)};
    md.dvx = {md.v.xs, md.v.ys, lattice_ddx(md.v.xs, md.v.v)};
    md.dvy = {md.v.xs, md.v.ys, lattice_ddy(md.v.ys, md.v.v)};
    return md;
}

VecDim MacStokesModes::value(int mode, const VecDim& x) const {
    const ModeData& md = modes_.at(mode);
    VecDim out(2);
    out[0] = bilinear(md.u.xs, md.u.ys, md.u.v, x[0], x[1]);
    out[1] = bilinear(md.v.xs, md.v.ys, md.v.v, x[0], x[1]);
    return out;
}

MatD MacStokesModes::gradient(int mode, const VecDim& x) const {
    const ModeData& md = modes_.at(mode);
    MatD g(2, 2);
    // (i,c) = d_i u_c
    g(0, 0) = bilinear(md.dux.xs, md.dux.ys, md.dux.v, x[0], x[1]);
    g(1, 0) = bilinear(md.duy.xs, md.duy.ys, md.duy.v, x[0], x[1]);
    g(0, 1) = bilinear(md.dvx.xs, md.dvx.ys, md.dvx.v, x[0], x[1]);
    g(1, 1) = bilinear(md.dvy.xs, md.dvy.ys, md.dvy.v, x[0], x[1]);
    return g;
}

Real MacStokesModes::mac_inner(int a, int b) const {
    return hx_ * hy_ * modes_.at(a).raw.dot(modes_.at(b).raw);
}

Real MacStokesModes::mac_divergence_linf(int mode) const {
    const Vector& x = modes_.at(mode).raw;
    Real dmax = 0;
    for (int i = 0; i < nx_; ++i)
        for (int j = 0; j < ny_; ++j) {
            Real div = 0;
            if (i + 1 <= nx_ - 1)
                div += x[i * ny_ + j] / hx_;  // uid(i+1,j)
            if (i >= 1)
                div -= x[(i - 1) * ny_ + j] / hx_;
            if (j + 1 <= ny_ - 1)
                div += x[nu_ + i * (ny_ - 1) + j] / hy_;  // vid(i,j+1)
            if (j >= 1)
                div -= x[nu_ + i * (ny_ - 1) + j - 1] / hy_;
            dmax = std::max(dmax, std::abs(div));
        }
    return dmax;
}

Vector mac_stokes_eigenvalues(const Geometry& geom, int n, int resolution) {
    MacStokesModes modes(geom, n, resolution);
    return modes.eigenvalues();
}

}  // namespace qtensor
