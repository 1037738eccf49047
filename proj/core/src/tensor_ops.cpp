#include "qtensor/tensor_ops.hpp"

#include <cmath>

namespace qtensor {

const std::vector<MatD>& s0_basis(int d) {
    require(d == 2 || d == 3, "s0_basis: d must be 2 or 3");
    static const std::vector<MatD> basis2 = [] {
        const Real r = 1.0 / std::sqrt(2.0);
        MatD e0(2, 2), e1(2, 2);
        e0 << r, 0, 0, -r;
        e1 << 0, r, r, 0;
        return std::vector<MatD>{e0, e1};
    }();
    static const std::vector<MatD> basis3 = [] {
        const Real r2 = 1.0 / std::sqrt(2.0);
        const Real r6 = 1.0 / std::sqrt(6.0);
        MatD e0(3, 3), e1(3, 3), e2(3, 3), e3(3, 3), e4(3, 3);
        e0 << r2, 0, 0, 0, -r2, 0, 0, 0, 0;
        e1 << r6, 0, 0, 0, r6, 0, 0, 0, -2 * r6;
        e2 << 0, r2, 0, r2, 0, 0, 0, 0, 0;
        e3 << 0, 0, r2, 0, 0, 0, r2, 0, 0;
        e4 << 0, 0, 0, 0, 0, r2, 0, r2, 0;
        return std::vector<MatD>{e0, e1, e2, e3, e4};
    }();
    return d == 2 ? basis2 : basis3;
}

MatD s0_from_coords(const Eigen::Ref<const Vector>& c, int d) {
    const auto& basis = s0_basis(d);
    require(c.size() == static_cast<Eigen::Index>(basis.size()),
            "s0_from_coords: coordinate count mismatch");
    MatD m = MatD::Zero(d, d);
    for (size_t k = 0; k < basis.size(); ++k)
        m += c[static_cast<Eigen::Index>(k)] * basis[k];
    return m;
}

Vector s0_coords(const MatD& m) {
    const int d = static_cast<int>(m.rows());
    const auto& basis = s0_basis(d);
    Vector c(static_cast<Eigen::Index>(basis.size()));
    for (size_t k = 0; k < basis.size(); ++k)
        c[static_cast<Eigen::Index>(k)] = (m.array() * basis[k].array()).sum();
    return c;
}

void ModelParams::validate() const {
    require(gamma > 0, "ModelParams: gamma must be > 0");
    require(lambda > 0, "ModelParams: lambda must be > 0");
    require(c > 0, "ModelParams: c must be > 0");
    require(viscosity.nu0 > 0, "ModelParams: nu0 must be > 0");
    require(viscosity.nu1 >= 0, "ModelParams: nu1 must be >= 0");
    require(viscosity.lower_bound() > 0, "ModelParams: viscosity lower bound must be positive");
}

MatD s0_project(const MatD& m) {
    require(m.rows() == m.cols() && (m.rows() == 2 || m.rows() == 3),
            "s0_project: matrix must be d x d with d in {2,3}");
    require(m.allFinite(), "s0_project: non-finite entries");
    const int d = static_cast<int>(m.rows());
    MatD sym = 0.5 * (m + m.transpose());
    sym -= (m.trace() / d) * MatD::Identity(d, d);
    return sym;
}

bool is_s0(const MatD& m, Real tol) {
    if (m.rows() != m.cols())
        return false;
    const Real scale = std::max<Real>(1.0, m.cwiseAbs().maxCoeff());
    return (m - m.transpose()).cwiseAbs().maxCoeff() <= tol * scale &&
           std::abs(m.trace()) <= tol * scale;
}

std::pair<MatD, MatD> sym_skew_split(const MatD& grad_u) {
    MatD du = 0.5 * (grad_u + grad_u.transpose());
    MatD wu = 0.5 * (grad_u - grad_u.transpose());
    return {du, wu};
}

MatD sigma_tensor(const MatD& q, const MatD& h) {
    require(q.rows() == h.rows() && q.cols() == h.cols(), "sigma_tensor: dimension mismatch");
    return q * h - h * q;
}

MatD tau2_tensor(const MatD& q, const MatD& h) {
    require(q.rows() == h.rows() && q.cols() == h.cols(), "tau2_tensor: dimension mismatch");
    const int d = static_cast<int>(q.rows());
    const Real qh = (q.array() * h.array()).sum();  // tr(QH) for symmetric Q,H
    MatD t = -(q * h) - h * q;
    t += 2.0 * qh * (q + MatD::Identity(d, d) / d);
    return t;
}

MatD s1_tensor(const MatD& grad_u, const MatD& q) {
    require(grad_u.rows() == q.rows(), "s1_tensor: dimension mismatch");
    MatD wu = 0.5 * (grad_u - grad_u.transpose());
    return wu * q - q * wu;
}

MatD s2_tensor(const MatD& grad_u, const MatD& q) {
    require(grad_u.rows() == q.rows(), "s2_tensor: dimension mismatch");
    const int d = static_cast<int>(q.rows());
    MatD du = 0.5 * (grad_u + grad_u.transpose());
    const Real qg = (q.transpose() * grad_u).trace();
    MatD t = du * q + q * du;
    t -= 2.0 * qg * (q + MatD::Identity(d, d) / d);
    return t;
}

MatD s_tensor(const MatD& grad_u, const MatD& q, const ModelParams& p) {
    const int d = static_cast<int>(q.rows());
    MatD du = 0.5 * (grad_u + grad_u.transpose());
    MatD s = s1_tensor(grad_u, q);
    if (p.xi != 0.0)
        s += p.xi * s2_tensor(grad_u, q) + (2.0 * p.xi / d) * du;
    return s;
}

MatD s_tensor_direct(const MatD& grad_u, const MatD& q, const ModelParams& p) {
    const int d = static_cast<int>(q.rows());
    auto [du, wu] = sym_skew_split(grad_u);
    MatD qi = q + MatD::Identity(d, d) / d;
    const Real qg = (q.transpose() * grad_u).trace();
    MatD s = (p.xi * du + wu) * qi + qi * (p.xi * du - wu);
    s -= 2.0 * p.xi * qg * qi;
    return s;
}

MatD elastic_stress(const std::vector<MatD>& grad_q, const ModelParams& p) {
    require(!grad_q.empty(), "elastic_stress: empty gradient");
    const int d = static_cast<int>(grad_q.size());
    MatD t(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j <= i; ++j) {
            const Real v = -p.lambda * (grad_q[i].array() * grad_q[j].array()).sum();
            t(i, j) = v;
            t(j, i) = v;
        }
    return t;
}

Real bulk_energy(const MatD& q, const ModelParams& p) {
    const Real tr2 = (q * q).trace();
    const Real tr3 = (q * q * q).trace();
    return 0.5 * p.a * tr2 - p.b / 3.0 * tr3 + 0.25 * p.c * tr2 * tr2;
}

MatD bulk_force(const MatD& q, const ModelParams& p) {
    const int d = static_cast<int>(q.rows());
    const Real tr2 = (q * q).trace();
    MatD l = -p.a * q - p.c * tr2 * q;
    if (p.b != 0.0)
        l += p.b * (q * q - tr2 / d * MatD::Identity(d, d));
    return l;
}

MatD molecular_field_pointwise(const MatD& q, const MatD& laplace_q, const ModelParams& p) {
    return p.lambda * laplace_q + bulk_force(q, p);
}

Real cancellation_residual(const MatD& q1, const MatD& q2, const MatD& grad_u,
                           const ModelParams& p) {
    require(q1.rows() == q2.rows() && q1.rows() == grad_u.rows(),
            "cancellation_residual: dimension mismatch");
    const int d = static_cast<int>(q1.rows());
    const Real scale = std::max<Real>(1.0, grad_u.cwiseAbs().maxCoeff());
    require(std::abs(grad_u.trace()) <= 1e-12 * scale,
            "cancellation_residual: grad_u must be trace-free");
    MatD coupling = sigma_tensor(q1, q2) + p.xi * tau2_tensor(q1, q2) - (2.0 * p.xi / d) * q2;
    const Real lhs = (s_tensor(grad_u, q1, p).array() * q2.array()).sum();
    const Real rhs = (coupling.array() * grad_u.array()).sum();
    return lhs + rhs;
}

}  // namespace qtensor
