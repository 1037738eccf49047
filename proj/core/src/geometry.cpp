#include "qtensor/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace qtensor {

Face face_from_string(const std::string& s) {
    if (s == "x0") return Face::X0;
    if (s == "x1") return Face::X1;
    if (s == "y0") return Face::Y0;
    if (s == "y1") return Face::Y1;
    throw std::invalid_argument("unknown face '" + s + "' (expected x0, x1, y0, y1)");
}

std::string face_to_string(Face f) {
    switch (f) {
        case Face::X0: return "x0";
        case Face::X1: return "x1";
        case Face::Y0: return "y0";
        case Face::Y1: return "y1";
    }
    return "?";
}

bool Geometry::is_dirichlet(Face f) const {
    return std::find(dirichlet_faces.begin(), dirichlet_faces.end(), f) != dirichlet_faces.end();
}

Real Geometry::volume() const {
    Real v = 1.0;
    for (Real l : lengths)
        v *= l;
    return v;
}

std::array<bool, 2> Geometry::axis_bc(int axis) const {
    require(mode == GeometryMode::Rectangle, "axis_bc: rectangle mode only");
    require(axis >= 0 && axis < d, "axis_bc: bad axis");
    const Face lo = axis == 0 ? Face::X0 : Face::Y0;
    const Face hi = axis == 0 ? Face::X1 : Face::Y1;
    return {is_dirichlet(lo), is_dirichlet(hi)};
}

void Geometry::validate() const {
    require(d == 2 || d == 3, "Geometry: d must be 2 or 3");
    require(static_cast<int>(lengths.size()) == d, "Geometry: lengths must have d entries");
    for (Real l : lengths)
        require(l > 0 && std::isfinite(l), "Geometry: lengths must be positive");
    if (mode == GeometryMode::Rectangle) {
        require(d == 2, "Geometry: rectangle mode supports d=2 only");
        for (size_t i = 0; i < dirichlet_faces.size(); ++i)
            for (size_t j = i + 1; j < dirichlet_faces.size(); ++j)
                require(dirichlet_faces[i] != dirichlet_faces[j],
                        "Geometry: duplicate Dirichlet face");
    } else {
        require(dirichlet_faces.empty(), "Geometry: torus has no boundary faces");
    }
}

Geometry make_torus(std::vector<Real> lengths) {
    Geometry g;
    g.mode = GeometryMode::PeriodicTorus;
    g.d = static_cast<int>(lengths.size());
    g.lengths = std::move(lengths);
    g.validate();
    return g;
}

Geometry make_rectangle(std::vector<Real> lengths, std::vector<Face> dirichlet_faces) {
    Geometry g;
    g.mode = GeometryMode::Rectangle;
    g.d = static_cast<int>(lengths.size());
    g.lengths = std::move(lengths);
    g.dirichlet_faces = std::move(dirichlet_faces);
    g.validate();
    return g;
}

void gauss_legendre(int n, Vector& nodes, Vector& weights) {
    require(n >= 1, "gauss_legendre: n >= 1");
    nodes.resize(n);
    weights.resize(n);
    const Real pi = std::acos(-1.0);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        // Newton iteration on P_n starting from the Chebyshev-like guess.
        Real x = std::cos(pi * (i + 0.75) / (n + 0.5));
        Real pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            Real p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                Real p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            pp = n * (x * p1 - p0) / (x * x - 1.0);
            Real dx = p1 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15)
                break;
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        const Real w = 2.0 / ((1.0 - x * x) * pp * pp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) {
        // enforce exact symmetry for the middle node
        nodes[n / 2] = 0.0;
    }
}

Quadrature make_quadrature(const Geometry& geom, int max_index) {
    geom.validate();
    require(max_index >= 0, "make_quadrature: max_index >= 0");
    Quadrature q;
    q.nodes_1d.resize(geom.d);
    q.weights_1d.resize(geom.d);
    q.shape.resize(geom.d);

    for (int dir = 0; dir < geom.d; ++dir) {
        const Real len = geom.lengths[dir];
        if (geom.mode == GeometryMode::PeriodicTorus) {
            // Trapezoidal rule is exact for frequencies below n; quartic
            // products of modes up to max_index reach 4*max_index.
            const int n = 4 * max_index + 4;
            q.shape[dir] = n;
            q.nodes_1d[dir].resize(n);
            q.weights_1d[dir].setConstant(n, len / n);
            for (int i = 0; i < n; ++i)
                q.nodes_1d[dir][i] = len * i / n;
        } else {
            // Single-panel Gauss-Legendre; trig factors of aggregate 1D mode
            // index up to 4*max_index need roughly pi points per wavelength.
            const int n = std::max(24, static_cast<int>(std::ceil(3.3 * max_index)) + 16);
            q.shape[dir] = n;
            Vector x, w;
            gauss_legendre(n, x, w);
            q.nodes_1d[dir] = (x.array() + 1.0) * (0.5 * len);
            q.weights_1d[dir] = w * (0.5 * len);
        }
    }

    int npts = 1;
    for (int s : q.shape)
        npts *= s;
    q.points.resize(npts, geom.d);
    q.weights.resize(npts);
    for (int p = 0; p < npts; ++p) {
        int rem = p;
        Real w = 1.0;
        // row-major: last direction fastest
        for (int dir = geom.d - 1; dir >= 0; --dir) {
            const int i = rem % q.shape[dir];
            rem /= q.shape[dir];
            q.points(p, dir) = q.nodes_1d[dir][i];
            w *= q.weights_1d[dir][i];
        }
        q.weights[p] = w;
    }
    return q;
}

}  // namespace qtensor
