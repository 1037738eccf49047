#include "qtensor/basis.hpp"

#include "qtensor/mac_stokes.hpp"
#include "qtensor/tensor_ops.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <tuple>

namespace qtensor {

namespace {

constexpr Real kPi = 3.14159265358979323846;

// --- torus wavevector enumeration -------------------------------------------

struct TorusCandidate {
    std::array<int, 3> k;
    int trig;  // 0 const, 1 cos, 2 sin
    Real eigenvalue;
};

bool candidate_less(const TorusCandidate& a, const TorusCandidate& b) {
    if (a.eigenvalue != b.eigenvalue)
        return a.eigenvalue < b.eigenvalue;
    if (a.k != b.k)
        return a.k < b.k;
    return a.trig < b.trig;
}

// k = 0 plus a half-space of Z^d (first nonzero component positive), cos and
// sin per nonzero wavevector. Enumeration cap grows until the first n_needed
// candidates are provably complete.
std::vector<TorusCandidate> torus_scalar_modes(const Geometry& geom, int n_needed) {
    const int d = geom.d;
    Real lmax = *std::max_element(geom.lengths.begin(), geom.lengths.end());
    for (int cap = 2;; cap *= 2) {
        std::vector<TorusCandidate> cands;
        std::array<int, 3> k{0, 0, 0};
        std::array<int, 3> lo{0, 0, 0}, hi{0, 0, 0};
        for (int i = 0; i < d; ++i) {
            lo[i] = -cap;
            hi[i] = cap;
        }
        // iterate the integer box
        k = lo;
        while (true) {
            bool zero = true, leading_positive = false;
            for (int i = 0; i < d; ++i) {
                if (k[i] != 0) {
                    zero = false;
                    leading_positive = k[i] > 0;
                    break;
                }
            }
            if (zero) {
                cands.push_back({k, 0, 0.0});
            } else if (leading_positive) {
                Real lam = 0;
                for (int i = 0; i < d; ++i) {
                    const Real kap = 2.0 * kPi * k[i] / geom.lengths[i];
                    lam += kap * kap;
                }
                cands.push_back({k, 1, lam});
                cands.push_back({k, 2, lam});
            }
            // advance
            int i = d - 1;
            while (i >= 0 && ++k[i] > hi[i]) {
                k[i] = lo[i];
                --i;
            }
            if (i < 0)
                break;
        }
        std::sort(cands.begin(), cands.end(), candidate_less);
        if (static_cast<int>(cands.size()) >= n_needed) {
            const Real lam_edge = std::pow(2.0 * kPi * cap / lmax, 2);
            if (cands[n_needed - 1].eigenvalue <= lam_edge) {
                cands.resize(n_needed);
                return cands;
            }
        }
    }
}

// --- rectangle 1D factors ----------------------------------------------------
// Families by (low Dirichlet, high Dirichlet):
//   NN: cos(m pi x / L),        m >= 0
//   DD: sin(m pi x / L),        m >= 1
//   DN: sin((m+1/2) pi x / L),  m >= 0
//   ND: cos((m+1/2) pi x / L),  m >= 0

struct RectFactor {
    Real freq;
    bool is_sin;
    Real norm;
    bool valid;
};

RectFactor rect_factor(const Geometry& geom, int axis, int m) {
    const auto bc = geom.axis_bc(axis);
    const Real len = geom.lengths[axis];
    RectFactor f{0.0, false, std::sqrt(2.0 / len), true};
    if (!bc[0] && !bc[1]) {  // NN
        f.freq = m * kPi / len;
        f.is_sin = false;
        if (m == 0)
            f.norm = std::sqrt(1.0 / len);
    } else if (bc[0] && bc[1]) {  // DD
        if (m < 1)
            f.valid = false;
        f.freq = m * kPi / len;
        f.is_sin = true;
    } else if (bc[0] && !bc[1]) {  // DN
        f.freq = (m + 0.5) * kPi / len;
        f.is_sin = true;
    } else {  // ND
        f.freq = (m + 0.5) * kPi / len;
        f.is_sin = false;
    }
    return f;
}

std::vector<ScalarMode> rectangle_scalar_modes(const Geometry& geom, int n_needed) {
    struct Cand {
        std::array<int, 3> k;
        Real eigenvalue;
        Real norm;
    };
    for (int cap = 4;; cap *= 2) {
        std::vector<Cand> cands;
        for (int mx = 0; mx <= cap; ++mx) {
            RectFactor fx = rect_factor(geom, 0, mx);
            if (!fx.valid)
                continue;
            for (int my = 0; my <= cap; ++my) {
                RectFactor fy = rect_factor(geom, 1, my);
                if (!fy.valid)
                    continue;
                Cand c;
                c.k = {mx, my, 0};
                c.eigenvalue = fx.freq * fx.freq + fy.freq * fy.freq;
                c.norm = fx.norm * fy.norm;
                cands.push_back(c);
            }
        }
        std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
            if (a.eigenvalue != b.eigenvalue)
                return a.eigenvalue < b.eigenvalue;
            return a.k < b.k;
        });
        if (static_cast<int>(cands.size()) >= n_needed) {
            Real lmin = std::min(geom.lengths[0], geom.lengths[1]);
            const Real lam_edge = std::pow(cap * kPi / lmin, 2);
            if (cands[n_needed - 1].eigenvalue <= lam_edge) {
                std::vector<ScalarMode> out(n_needed);
                for (int i = 0; i < n_needed; ++i) {
                    out[i].k = cands[i].k;
                    out[i].trig = 0;
                    out[i].norm = cands[i].norm;
                    out[i].eigenvalue = cands[i].eigenvalue;
                }
                return out;
            }
        }
    }
}

// Deterministic orthonormal pair spanning the plane orthogonal to kappa (d=3).
std::pair<VecDim, VecDim> orthogonal_polarizations(const VecDim& kappa) {
    VecDim khat = kappa / kappa.norm();
    int axis = 0;
    for (int i = 1; i < 3; ++i)
        if (std::abs(khat[i]) < std::abs(khat[axis]))
            axis = i;
    VecDim e = VecDim::Zero(3);
    e[axis] = 1.0;
    VecDim p1 = e - e.dot(khat) * khat;
    p1 /= p1.norm();
    VecDim p2(3);
    p2[0] = khat[1] * p1[2] - khat[2] * p1[1];
    p2[1] = khat[2] * p1[0] - khat[0] * p1[2];
    p2[2] = khat[0] * p1[1] - khat[1] * p1[0];
    return {p1, p2};
}

VecDim torus_kappa(const Geometry& geom, const std::array<int, 3>& k) {
    VecDim kap(geom.d);
    for (int i = 0; i < geom.d; ++i)
        kap[i] = 2.0 * kPi * k[i] / geom.lengths[i];
    return kap;
}

}  // namespace

Real rect_factor_frequency(const Geometry& geom, int axis, int m, bool* is_sin) {
    RectFactor f = rect_factor(geom, axis, m);
    require(f.valid, "rect_factor_frequency: index not in family");
    if (is_sin)
        *is_sin = f.is_sin;
    return f.freq;
}

int BasisSet::max_index_1d() const {
    int m = 0;
    if (kind == BasisKind::LaplaceS0) {
        for (const auto& p : profiles)
            for (int i = 0; i < geom.d; ++i)
                m = std::max(m, std::abs(p.k[i]) + 1);
    } else {
        for (const auto& v : vmodes)
            for (int i = 0; i < geom.d; ++i)
                m = std::max(m, std::abs(v.k[i]) + 1);
        if (mac)
            m = std::max(m, 8);
    }
    return m;
}

BasisSet make_laplace_basis(const Geometry& geom, int n) {
    geom.validate();
    require(n >= 1, "make_laplace_basis: n >= 1");
    BasisSet b;
    b.kind = BasisKind::LaplaceS0;
    b.geom = geom;
    b.count = n;
    const int s = s0_dim(geom.d);
    const int n_prof = (n + s - 1) / s;

    if (geom.mode == GeometryMode::PeriodicTorus) {
        auto cands = torus_scalar_modes(geom, n_prof);
        const Real vol = geom.volume();
        for (const auto& c : cands) {
            ScalarMode m;
            m.k = c.k;
            m.trig = c.trig;
            m.eigenvalue = c.eigenvalue;
            m.norm = c.trig == 0 ? std::sqrt(1.0 / vol) : std::sqrt(2.0 / vol);
            b.profiles.push_back(m);
        }
    } else {
        b.profiles = rectangle_scalar_modes(geom, n_prof);
    }

    b.eigenvalues.resize(n);
    b.prof_of.resize(n);
    b.dir_of.resize(n);
    for (int i = 0; i < n; ++i) {
        b.prof_of[i] = i / s;
        b.dir_of[i] = i % s;
        b.eigenvalues[i] = b.profiles[i / s].eigenvalue;
    }
    return b;
}

BasisSet make_stokes_basis(const Geometry& geom, int n, int mac_resolution) {
    geom.validate();
    require(n >= 1, "make_stokes_basis: n >= 1");
    BasisSet b;
    b.kind = BasisKind::Stokes;
    b.geom = geom;
    b.count = n;

    if (geom.mode == GeometryMode::PeriodicTorus) {
        const int d = geom.d;
        const int pols = d - 1;
        // constant modes (omega = 0) plus pols polarizations per wavevector
        const int per_wavevector = 2 * pols;
        const int n_wave = (n - d + per_wavevector - 1) / per_wavevector + 1;
        auto cands = torus_scalar_modes(geom, 2 * n_wave + d + 4);
        const Real vol = geom.volume();
        std::vector<StokesMode> modes;
        for (const auto& c : cands) {
            if (c.trig == 0) {
                for (int ax = 0; ax < d; ++ax) {
                    StokesMode m;
                    m.k = c.k;
                    m.trig = 0;
                    m.pol = ax;
                    m.omega = 0.0;
                    m.polvec = VecDim::Zero(d);
                    m.polvec[ax] = 1.0;
                    modes.push_back(m);
                }
                continue;
            }
            VecDim kap = torus_kappa(geom, c.k);
            if (d == 2) {
                StokesMode m;
                m.k = c.k;
                m.trig = c.trig;
                m.pol = 0;
                m.omega = kap.squaredNorm();
                m.polvec = VecDim(2);
                m.polvec << -kap[1], kap[0];
                m.polvec /= m.polvec.norm();
                modes.push_back(m);
            } else {
                auto [p1, p2] = orthogonal_polarizations(kap);
                for (int pol = 0; pol < 2; ++pol) {
                    StokesMode m;
                    m.k = c.k;
                    m.trig = c.trig;
                    m.pol = pol;
                    m.omega = kap.squaredNorm();
                    m.polvec = pol == 0 ? p1 : p2;
                    modes.push_back(m);
                }
            }
        }
        std::stable_sort(modes.begin(), modes.end(), [](const StokesMode& a, const StokesMode& b) {
            if (a.omega != b.omega)
                return a.omega < b.omega;
            if (a.k != b.k)
                return a.k < b.k;
            if (a.trig != b.trig)
                return a.trig < b.trig;
            return a.pol < b.pol;
        });
        require(static_cast<int>(modes.size()) >= n, "make_stokes_basis: enumeration too small");
        modes.resize(n);
        const Real cnorm = std::sqrt(1.0 / vol), tnorm = std::sqrt(2.0 / vol);
        for (auto& m : modes)
            m.polvec *= (m.trig == 0 ? cnorm : tnorm);
        b.vmodes = std::move(modes);
    } else {
        require(geom.d == 2, "make_stokes_basis: rectangle mode requires d=2");
        auto mac = std::make_shared<MacStokesModes>(geom, n, mac_resolution);
        b.mac = mac;
        for (int i = 0; i < n; ++i) {
            StokesMode m;
            m.mac_index = i;
            m.omega = mac->eigenvalues()[i];
            b.vmodes.push_back(m);
        }
    }

    b.eigenvalues.resize(n);
    for (int i = 0; i < n; ++i)
        b.eigenvalues[i] = b.vmodes[i].omega;
    return b;
}

// --- grid containers ----------------------------------------------------------

MatD s0_at(const S0Grid& f, int p, int d) {
    const auto& basis = s0_basis(d);
    MatD m = MatD::Zero(d, d);
    for (int j = 0; j < static_cast<int>(basis.size()); ++j)
        m += f(p, j) * basis[j];
    return m;
}

void set_s0_at(S0Grid& f, int p, const MatD& m) {
    const int d = static_cast<int>(m.rows());
    const auto& basis = s0_basis(d);
    for (int j = 0; j < static_cast<int>(basis.size()); ++j)
        f(p, j) = (m.array() * basis[j].array()).sum();
}

MatD mat_at(const MatGrid& f, int p, int d) {
    MatD m(d, d);
    for (int i = 0; i < d; ++i)
        for (int c = 0; c < d; ++c)
            m(i, c) = f(p, i * d + c);
    return m;
}

void set_mat_at(MatGrid& f, int p, const MatD& m) {
    const int d = static_cast<int>(m.rows());
    for (int i = 0; i < d; ++i)
        for (int c = 0; c < d; ++c)
            f(p, i * d + c) = m(i, c);
}

// --- scalar profile evaluation -------------------------------------------------

namespace {

// value and gradient of one scalar profile at one point
Real profile_value(const BasisSet& b, const ScalarMode& m, const VecDim& x) {
    const Geometry& g = b.geom;
    if (g.mode == GeometryMode::PeriodicTorus) {
        if (m.trig == 0)
            return m.norm;
        Real phase = 0;
        for (int i = 0; i < g.d; ++i)
            phase += 2.0 * kPi * m.k[i] / g.lengths[i] * x[i];
        return m.norm * (m.trig == 1 ? std::cos(phase) : std::sin(phase));
    }
    Real v = m.norm;
    for (int i = 0; i < g.d; ++i) {
        RectFactor f = rect_factor(g, i, m.k[i]);
        v *= f.is_sin ? std::sin(f.freq * x[i]) : std::cos(f.freq * x[i]);
    }
    return v;
}

VecDim profile_gradient(const BasisSet& b, const ScalarMode& m, const VecDim& x) {
    const Geometry& g = b.geom;
    VecDim grad = VecDim::Zero(g.d);
    if (g.mode == GeometryMode::PeriodicTorus) {
        if (m.trig == 0)
            return grad;
        Real phase = 0;
        VecDim kap(g.d);
        for (int i = 0; i < g.d; ++i) {
            kap[i] = 2.0 * kPi * m.k[i] / g.lengths[i];
            phase += kap[i] * x[i];
        }
        const Real dv = m.trig == 1 ? -std::sin(phase) : std::cos(phase);
        return m.norm * dv * kap;
    }
    std::array<Real, 3> val{}, der{};
    for (int i = 0; i < g.d; ++i) {
        RectFactor f = rect_factor(g, i, m.k[i]);
        const Real c = std::cos(f.freq * x[i]), s = std::sin(f.freq * x[i]);
        val[i] = f.is_sin ? s : c;
        der[i] = f.is_sin ? f.freq * c : -f.freq * s;
    }
    for (int i = 0; i < g.d; ++i) {
        Real gi = m.norm * der[i];
        for (int j = 0; j < g.d; ++j)
            if (j != i)
                gi *= val[j];
        grad[i] = gi;
    }
    return grad;
}

}  // namespace

// --- TensorBasisTables ----------------------------------------------------------

TensorBasisTables::TensorBasisTables(const BasisSet& basis, const Quadrature& quad,
                                     const HarmonicExtension* tilde)
    : basis_(basis), quad_(std::make_shared<Quadrature>(quad)) {
    require(basis.kind == BasisKind::LaplaceS0, "TensorBasisTables: wrong basis kind");
    d_ = basis.geom.d;
    s_ = s0_dim(d_);
    n_pts_ = quad_->n();
    n_prof_ = static_cast<int>(basis.profiles.size());

    prof_val_.resize(n_pts_, n_prof_);
    prof_grad_.assign(d_, Matrix(n_pts_, n_prof_));
    for (int j = 0; j < n_prof_; ++j) {
        const ScalarMode& m = basis.profiles[j];
        for (int p = 0; p < n_pts_; ++p) {
            VecDim x = quad_->points.row(p).transpose();
            prof_val_(p, j) = profile_value(basis, m, x);
            VecDim g = profile_gradient(basis, m, x);
            for (int i = 0; i < d_; ++i)
                prof_grad_[i](p, j) = g[i];
        }
    }

    tilde_val_ = S0Grid::Zero(n_pts_, s_);
    tilde_grad_.assign(d_, S0Grid::Zero(n_pts_, s_));
    if (tilde && !tilde->empty()) {
        has_tilde_ = true;
        tilde_val_ = tilde->sample(*quad_);
        tilde_grad_ = tilde->sample_gradient(*quad_);
    }
}

S0Grid TensorBasisTables::synth_homog(const Vector& h) const {
    require(h.size() == basis_.count, "synth: coefficient count mismatch");
    S0Grid out = S0Grid::Zero(n_pts_, s_);
    for (int i = 0; i < basis_.count; ++i)
        out.col(basis_.dir_of[i]).noalias() += h[i] * prof_val_.col(basis_.prof_of[i]);
    return out;
}

S0Grid TensorBasisTables::synth(const Vector& h) const {
    S0Grid out = synth_homog(h);
    if (has_tilde_)
        out += tilde_val_;
    return out;
}

std::vector<S0Grid> TensorBasisTables::synth_grad(const Vector& h) const {
    require(h.size() == basis_.count, "synth_grad: coefficient count mismatch");
    std::vector<S0Grid> out(d_, S0Grid::Zero(n_pts_, s_));
    for (int dir = 0; dir < d_; ++dir) {
        for (int i = 0; i < basis_.count; ++i)
            out[dir].col(basis_.dir_of[i]).noalias() +=
                h[i] * prof_grad_[dir].col(basis_.prof_of[i]);
        if (has_tilde_)
            out[dir] += tilde_grad_[dir];
    }
    return out;
}

Vector TensorBasisTables::laplacian_coeffs(const Vector& h) const {
    return -basis_.eigenvalues.cwiseProduct(h);
}

S0Grid TensorBasisTables::synth_laplacian(const Vector& h) const {
    return synth_homog(laplacian_coeffs(h));
}

Vector TensorBasisTables::project(const S0Grid& f) const {
    require(f.rows() == n_pts_ && f.cols() == s_, "project: grid shape mismatch");
    Vector out(basis_.count);
    // weighted component fields, then per-mode dots with the shared profiles
    S0Grid wf = f.array().colwise() * quad_->weights.array();
    for (int i = 0; i < basis_.count; ++i)
        out[i] = prof_val_.col(basis_.prof_of[i]).dot(wf.col(basis_.dir_of[i]));
    return out;
}

Real TensorBasisTables::inner(const S0Grid& f, const S0Grid& g) const {
    return ((f.array() * g.array()).rowwise().sum() * quad_->weights.array()).sum();
}

Real TensorBasisTables::norm_l2(const S0Grid& f) const { return std::sqrt(inner(f, f)); }

// --- VelocityBasisTables ---------------------------------------------------------

VelocityBasisTables::VelocityBasisTables(const BasisSet& basis, const Quadrature& quad)
    : basis_(basis), quad_(std::make_shared<Quadrature>(quad)) {
    require(basis.kind == BasisKind::Stokes, "VelocityBasisTables: wrong basis kind");
    d_ = basis.geom.d;
    n_pts_ = quad_->n();
    const int n = basis.count;
    val_.assign(d_, Matrix::Zero(n_pts_, n));
    grad_.assign(d_ * d_, Matrix::Zero(n_pts_, n));

    for (int k = 0; k < n; ++k) {
        const StokesMode& m = basis.vmodes[k];
        if (basis.geom.mode == GeometryMode::PeriodicTorus) {
            VecDim kap = torus_kappa(basis.geom, m.k);
            for (int p = 0; p < n_pts_; ++p) {
                VecDim x = quad_->points.row(p).transpose();
                Real phase = kap.dot(x);
                Real v, dv;
                if (m.trig == 0) {
                    v = 1.0;
                    dv = 0.0;
                } else if (m.trig == 1) {
                    v = std::cos(phase);
                    dv = -std::sin(phase);
                } else {
                    v = std::sin(phase);
                    dv = std::cos(phase);
                }
                for (int c = 0; c < d_; ++c) {
                    val_[c](p, k) = m.polvec[c] * v;
                    for (int i = 0; i < d_; ++i)
                        grad_[i * d_ + c](p, k) = m.polvec[c] * dv * kap[i];
                }
            }
        } else {
            for (int p = 0; p < n_pts_; ++p) {
                VecDim x = quad_->points.row(p).transpose();
                VecDim v = basis.mac->value(m.mac_index, x);
                MatD g = basis.mac->gradient(m.mac_index, x);
                for (int c = 0; c < d_; ++c) {
                    val_[c](p, k) = v[c];
                    for (int i = 0; i < d_; ++i)
                        grad_[i * d_ + c](p, k) = g(i, c);
                }
            }
        }
    }
}

VecGrid VelocityBasisTables::synth(const Vector& coeffs) const {
    require(coeffs.size() == basis_.count, "synth: coefficient count mismatch");
    VecGrid out(n_pts_, d_);
    for (int c = 0; c < d_; ++c)
        out.col(c).noalias() = val_[c] * coeffs;
    return out;
}

MatGrid VelocityBasisTables::synth_grad(const Vector& coeffs) const {
    require(coeffs.size() == basis_.count, "synth_grad: coefficient count mismatch");
    MatGrid out(n_pts_, d_ * d_);
    for (int j = 0; j < d_ * d_; ++j)
        out.col(j).noalias() = grad_[j] * coeffs;
    return out;
}

Vector VelocityBasisTables::project(const VecGrid& f) const {
    require(f.rows() == n_pts_ && f.cols() == d_, "project: grid shape mismatch");
    Vector out = Vector::Zero(basis_.count);
    for (int c = 0; c < d_; ++c)
        out.noalias() += val_[c].transpose() * quad_->weights.cwiseProduct(f.col(c));
    return out;
}

Vector VelocityBasisTables::project_gradtest(const MatGrid& g) const {
    require(g.rows() == n_pts_ && g.cols() == d_ * d_, "project_gradtest: grid shape mismatch");
    Vector out = Vector::Zero(basis_.count);
    for (int j = 0; j < d_ * d_; ++j)
        out.noalias() += grad_[j].transpose() * quad_->weights.cwiseProduct(g.col(j));
    return out;
}

Real VelocityBasisTables::inner(const VecGrid& f, const VecGrid& g) const {
    return ((f.array() * g.array()).rowwise().sum() * quad_->weights.array()).sum();
}

Real VelocityBasisTables::norm_l2(const VecGrid& f) const { return std::sqrt(inner(f, f)); }

// --- harmonic extension -----------------------------------------------------------

HarmonicExtension::HarmonicExtension(const Geometry& geom, const BoundaryData& data)
    : geom_(geom), d_(geom.d) {
    geom.validate();
    require(geom.mode == GeometryMode::Rectangle, "HarmonicExtension: rectangle mode only");

    // group terms by (axis, m, s0_dir); each group solves one 1D profile
    struct Key {
        int axis, m, dir;
        bool operator<(const Key& o) const {
            return std::tie(axis, m, dir) < std::tie(o.axis, o.m, o.dir);
        }
    };
    std::map<Key, std::array<Real, 2>> groups;  // amplitudes on (low, high) face
    for (const auto& t : data) {
        require(geom.is_dirichlet(t.face), "HarmonicExtension: data on a non-Dirichlet face");
        const int axis = (t.face == Face::X0 || t.face == Face::X1) ? 0 : 1;
        const int side = (t.face == Face::X1 || t.face == Face::Y1) ? 1 : 0;
        require(t.s0_dir >= 0 && t.s0_dir < s0_dim(d_), "HarmonicExtension: bad S0 direction");
        Key key{axis, t.m, t.s0_dir};
        groups.try_emplace(key, std::array<Real, 2>{0.0, 0.0});
        groups[key][side] += t.amplitude;
    }

    for (const auto& [key, amps] : groups) {
        const int axis = key.axis;
        const int tan_axis = 1 - axis;
        const Real len = geom.lengths[axis];
        const auto bc = geom.axis_bc(axis);
        RectFactor tf = rect_factor(geom, tan_axis, key.m);
        require(tf.valid, "HarmonicExtension: tangential index not in face family");
        const Real mu = tf.freq;

        Term t;
        t.axis = axis;
        t.m = key.m;
        t.s0_dir = key.dir;
        t.mu = mu;
        const Real a0 = amps[0], a1 = amps[1];
        if (bc[0] && bc[1]) {
            if (mu > 0) {
                t.alpha = a0;
                t.beta = (a1 - a0 * std::cosh(mu * len)) / std::sinh(mu * len);
            } else {
                t.alpha = a0;
                t.beta = (a1 - a0) / len;
            }
        } else if (bc[0]) {  // Dirichlet low, Neumann high
            if (mu > 0) {
                t.alpha = a0;
                t.beta = -a0 * std::tanh(mu * len);
            } else {
                t.alpha = a0;
                t.beta = 0.0;
            }
        } else {  // Neumann low, Dirichlet high
            if (mu > 0) {
                t.alpha = a1 / std::cosh(mu * len);
                t.beta = 0.0;
            } else {
                t.alpha = a1;
                t.beta = 0.0;
            }
        }
        terms_.push_back(t);
    }
}

Real HarmonicExtension::profile(const Term& t, Real x) const {
    if (t.mu > 0)
        return t.alpha * std::cosh(t.mu * x) + t.beta * std::sinh(t.mu * x);
    return t.alpha + t.beta * x;
}

Real HarmonicExtension::profile_deriv(const Term& t, Real x) const {
    if (t.mu > 0)
        return t.mu * (t.alpha * std::sinh(t.mu * x) + t.beta * std::cosh(t.mu * x));
    return t.beta;
}

Real HarmonicExtension::tangential(const Term& t, Real y) const {
    const int tan_axis = 1 - t.axis;
    RectFactor f = rect_factor(geom_, tan_axis, t.m);
    return f.is_sin ? std::sin(f.freq * y) : std::cos(f.freq * y);
}

Real HarmonicExtension::tangential_deriv(const Term& t, Real y) const {
    const int tan_axis = 1 - t.axis;
    RectFactor f = rect_factor(geom_, tan_axis, t.m);
    return f.is_sin ? f.freq * std::cos(f.freq * y) : -f.freq * std::sin(f.freq * y);
}

MatD HarmonicExtension::value(const VecDim& x) const {
    MatD m = MatD::Zero(d_, d_);
    const auto& basis = s0_basis(d_);
    for (const auto& t : terms_)
        m += profile(t, x[t.axis]) * tangential(t, x[1 - t.axis]) * basis[t.s0_dir];
    return m;
}

std::vector<MatD> HarmonicExtension::gradient(const VecDim& x) const {
    std::vector<MatD> g(d_, MatD::Zero(d_, d_));
    const auto& basis = s0_basis(d_);
    for (const auto& t : terms_) {
        g[t.axis] += profile_deriv(t, x[t.axis]) * tangential(t, x[1 - t.axis]) * basis[t.s0_dir];
        g[1 - t.axis] +=
            profile(t, x[t.axis]) * tangential_deriv(t, x[1 - t.axis]) * basis[t.s0_dir];
    }
    return g;
}

S0Grid HarmonicExtension::sample(const Quadrature& quad) const {
    const int s = s0_dim(d_);
    S0Grid out = S0Grid::Zero(quad.n(), s);
    for (int p = 0; p < quad.n(); ++p) {
        VecDim x = quad.points.row(p).transpose();
        for (const auto& t : terms_)
            out(p, t.s0_dir) += profile(t, x[t.axis]) * tangential(t, x[1 - t.axis]);
    }
    return out;
}

std::vector<S0Grid> HarmonicExtension::sample_gradient(const Quadrature& quad) const {
    const int s = s0_dim(d_);
    std::vector<S0Grid> out(d_, S0Grid::Zero(quad.n(), s));
    for (int p = 0; p < quad.n(); ++p) {
        VecDim x = quad.points.row(p).transpose();
        for (const auto& t : terms_) {
            out[t.axis](p, t.s0_dir) +=
                profile_deriv(t, x[t.axis]) * tangential(t, x[1 - t.axis]);
            out[1 - t.axis](p, t.s0_dir) +=
                profile(t, x[t.axis]) * tangential_deriv(t, x[1 - t.axis]);
        }
    }
    return out;
}

// --- Leray projection ----------------------------------------------------------

VecGrid leray_project(const VecGrid& v, const Quadrature& quad, const Geometry& geom) {
    require(geom.mode == GeometryMode::PeriodicTorus,
            "leray_project(quad, geom): torus mode only; use the basis overload in rectangle mode");
    const int d = geom.d;
    require(v.rows() == quad.n() && v.cols() == d, "leray_project: grid shape mismatch");
    std::vector<int> shape = quad.shape;
    int n_real = quad.n();
    // complex spectrum size: last dimension halved (r2c)
    std::vector<int> cshape = shape;
    cshape[d - 1] = shape[d - 1] / 2 + 1;
    int n_cplx = 1;
    for (int s : cshape)
        n_cplx *= s;

    std::vector<std::vector<std::complex<Real>>> spec(d,
                                                      std::vector<std::complex<Real>>(n_cplx));
    std::vector<Real> work(n_real);
    for (int c = 0; c < d; ++c) {
        for (int p = 0; p < n_real; ++p)
            work[p] = v(p, c);
        fftw_plan plan = fftw_plan_dft_r2c(d, shape.data(), work.data(),
                                           reinterpret_cast<fftw_complex*>(spec[c].data()),
                                           FFTW_ESTIMATE);
        fftw_execute(plan);
        fftw_destroy_plan(plan);
    }

    // project each wavevector: vhat -= kappa (kappa . vhat) / |kappa|^2
    for (int idx = 0; idx < n_cplx; ++idx) {
        int rem = idx;
        VecDim kap(d);
        bool zero = true;
        for (int dir = d - 1; dir >= 0; --dir) {
            int i = rem % cshape[dir];
            rem /= cshape[dir];
            int freq = i;
            if (dir < d - 1 && i > shape[dir] / 2)
                freq = i - shape[dir];
            kap[dir] = 2.0 * kPi * freq / geom.lengths[dir];
            if (freq != 0)
                zero = false;
        }
        if (zero)
            continue;
        std::complex<Real> kdotv(0, 0);
        for (int c = 0; c < d; ++c)
            kdotv += kap[c] * spec[c][idx];
        kdotv /= kap.squaredNorm();
        for (int c = 0; c < d; ++c)
            spec[c][idx] -= kap[c] * kdotv;
    }

    VecGrid out(n_real, d);
    for (int c = 0; c < d; ++c) {
        fftw_plan plan = fftw_plan_dft_c2r(d, shape.data(),
                                           reinterpret_cast<fftw_complex*>(spec[c].data()),
                                           work.data(), FFTW_ESTIMATE);
        fftw_execute(plan);
        fftw_destroy_plan(plan);
        for (int p = 0; p < n_real; ++p)
            out(p, c) = work[p] / n_real;
    }
    return out;
}

VecGrid leray_project(const VecGrid& v, const VelocityBasisTables& tables) {
    return tables.synth(tables.project(v));
}

Real divergence_linf(const VecGrid& v, const Quadrature& quad, const Geometry& geom) {
    require(geom.mode == GeometryMode::PeriodicTorus, "divergence_linf: torus mode only");
    const int d = geom.d;
    std::vector<int> shape = quad.shape;
    int n_real = quad.n();
    std::vector<int> cshape = shape;
    cshape[d - 1] = shape[d - 1] / 2 + 1;
    int n_cplx = 1;
    for (int s : cshape)
        n_cplx *= s;

    std::vector<std::vector<std::complex<Real>>> spec(d,
                                                      std::vector<std::complex<Real>>(n_cplx));
    std::vector<Real> work(n_real);
    for (int c = 0; c < d; ++c) {
        for (int p = 0; p < n_real; ++p)
            work[p] = v(p, c);
        fftw_plan plan = fftw_plan_dft_r2c(d, shape.data(), work.data(),
                                           reinterpret_cast<fftw_complex*>(spec[c].data()),
                                           FFTW_ESTIMATE);
        fftw_execute(plan);
        fftw_destroy_plan(plan);
    }
    Real div_max = 0;
    for (int idx = 0; idx < n_cplx; ++idx) {
        int rem = idx;
        VecDim kap(d);
        for (int dir = d - 1; dir >= 0; --dir) {
            int i = rem % cshape[dir];
            rem /= cshape[dir];
            int freq = i;
            if (dir < d - 1 && i > shape[dir] / 2)
                freq = i - shape[dir];
            kap[dir] = 2.0 * kPi * freq / geom.lengths[dir];
        }
        std::complex<Real> div(0, 0);
        for (int c = 0; c < d; ++c)
            div += kap[c] * spec[c][idx];
        div_max = std::max(div_max, std::abs(div) / n_real);
    }
    return div_max;
}

}  // namespace qtensor
