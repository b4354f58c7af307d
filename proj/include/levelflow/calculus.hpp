#pragma once

// Differential operators for an orthogonal metric E dx^2 + G dy^2, acting on
// jets. Conformal charts have E = G = e^{2 phi}; warped charts have E = 1 and
// G = w(t)^2. Each operator consumes jets of order N and returns the order it
// can still certify (one lost per differentiation).
//
//   grad f          = (f_x / E, f_y / G)
//   <a, b>          = E a^x b^x + G a^y b^y
//   div X           = (1/s) [ (s X^x)_x + (s X^y)_y ],     s = sqrt(E G)
//   lap f           = div grad f
//   unit normal     = grad u / |grad u|
//   star grad u     = (u_y, -u_x) / s    (frame components (u_2, -u_1))
//   k               = -div(grad u / |grad u|)
//   h               = div(star grad u / |grad u|)
//
// Christoffel symbols of the orthogonal metric:
//   G^x_xx = E_x/2E   G^x_xy = E_y/2E   G^x_yy = -G_x/2E
//   G^y_xx = -E_y/2G  G^y_xy = G_x/2G   G^y_yy = G_y/2G
// which for E = G = e^{2 phi} reduce to phi_x, phi_y, -phi_x, -phi_y, phi_x, phi_y.

#include "levelflow/jet.hpp"

namespace levelflow {

template <int N>
struct MetricJets {
  Jet<N> E;
  Jet<N> G;

  template <int M>
  MetricJets<M> truncated() const {
    return {truncate<M>(E), truncate<M>(G)};
  }
};

template <int N>
struct Gradient {
  Jet<N> x;
  Jet<N> y;
};

template <int N>
  requires(N >= 1)
Gradient<N - 1> partials(const Jet<N>& f) {
  return {d_dx(f), d_dy(f)};
}

/// |grad f|^2 from coordinate partials.
template <int N>
Jet<N> gradient_norm_sq(const Gradient<N>& df, const MetricJets<N>& m) {
  return df.x * df.x / m.E + df.y * df.y / m.G;
}

/// <grad f, grad g> from coordinate partials.
template <int N>
Jet<N> gradient_inner(const Gradient<N>& df, const Gradient<N>& dg, const MetricJets<N>& m) {
  return df.x * dg.x / m.E + df.y * dg.y / m.G;
}

/// df(star grad u) = <grad f, star grad u> = (f_x u_y - f_y u_x) / sqrt(E G).
template <int N>
Jet<N> star_pairing(const Gradient<N>& df, const Gradient<N>& du, const MetricJets<N>& m) {
  return (df.x * du.y - df.y * du.x) / sqrt(m.E * m.G);
}

/// Divergence of the vector field with coordinate components (vx, vy).
template <int N>
  requires(N >= 1)
Jet<N - 1> divergence(const Jet<N>& vx, const Jet<N>& vy, const MetricJets<N>& m) {
  const Jet<N> s = sqrt(m.E * m.G);
  return (d_dx(s * vx) + d_dy(s * vy)) / truncate<N - 1>(s);
}

template <int N>
  requires(N >= 2)
Jet<N - 2> laplacian(const Jet<N>& f, const MetricJets<N - 1>& m) {
  const auto df = partials(f);
  return divergence<N - 1>(df.x / m.E, df.y / m.G, m);
}

template <int N>
  requires(N >= 1)
Jet<N - 1> gradient_norm(const Jet<N>& u, const MetricJets<N - 1>& m) {
  return sqrt(gradient_norm_sq(partials(u), m));
}

/// Geodesic curvature of the level curves, k = -div(grad u / |grad u|).
template <int N>
  requires(N >= 2)
Jet<N - 2> level_curvature(const Jet<N>& u, const MetricJets<N - 1>& m) {
  const auto du = partials(u);
  const Jet<N - 1> g = sqrt(gradient_norm_sq(du, m));
  return -divergence<N - 1>(du.x / (m.E * g), du.y / (m.G * g), m);
}

/// Curvature of the steepest descent lines, h = div(star grad u / |grad u|).
template <int N>
  requires(N >= 2)
Jet<N - 2> descent_curvature(const Jet<N>& u, const MetricJets<N - 1>& m) {
  const auto du = partials(u);
  const Jet<N - 1> g = sqrt(gradient_norm_sq(du, m));
  const Jet<N - 1> sg = sqrt(m.E * m.G) * g;
  return divergence<N - 1>(du.y / sg, -du.x / sg, m);
}

/// Squared norm of the covariant Hessian, |nabla^2 u|^2 = g^{ia} g^{jb} H_ij H_ab.
template <int N>
  requires(N >= 2)
Jet<N - 2> hessian_norm_sq(const Jet<N>& u, const MetricJets<N - 1>& m) {
  const auto du = partials(u);
  const auto ux = truncate<N - 2>(du.x), uy = truncate<N - 2>(du.y);
  const Jet<N - 2> uxx = d_dx(du.x), uxy = d_dy(du.x), uyy = d_dy(du.y);
  const auto dE = partials(m.E), dG = partials(m.G);
  const auto E = truncate<N - 2>(m.E), G = truncate<N - 2>(m.G);
  const Jet<N - 2> gx_xx = dE.x / (2.0 * E), gx_xy = dE.y / (2.0 * E), gx_yy = -dG.x / (2.0 * E);
  const Jet<N - 2> gy_xx = -dE.y / (2.0 * G), gy_xy = dG.x / (2.0 * G), gy_yy = dG.y / (2.0 * G);
  const Jet<N - 2> hxx = uxx - gx_xx * ux - gy_xx * uy;
  const Jet<N - 2> hxy = uxy - gx_xy * ux - gy_xy * uy;
  const Jet<N - 2> hyy = uyy - gx_yy * ux - gy_yy * uy;
  return hxx * hxx / (E * E) + 2.0 * hxy * hxy / (E * G) + hyy * hyy / (G * G);
}

}  // namespace levelflow
