#pragma once

#include <cmath>
#include <stdexcept>

#include <Eigen/Core>

#include "tslb/lattice.hpp"

namespace tslb {

// Incompressible model: the equilibrium is linear in rho with a constant
// reference density rho0 = 1, so velocity is momentum / rho0.
template <typename T>
struct CollisionParams {
  T omega = T(1);
  T rho0 = T(1);

  T tau() const { return T(1) / omega; }
  T nu() const { return cs2_v<T> * (tau() - T(0.5)); }
};

template <typename T>
T omega_from_nu(T nu) {
  return T(1) / (nu / cs2_v<T> + T(0.5));
}

template <typename T>
T omega_from_tau(T tau) {
  return T(1) / tau;
}

template <typename T>
T nu_from_omega(T omega) {
  return cs2_v<T> * (T(1) / omega - T(0.5));
}

template <class Lat, int A, typename T>
constexpr T weight() {
  return T(Lat::t_rat[A][0]) / T(Lat::t_rat[A][1]);
}

template <class Lat, int A, typename T>
constexpr T bweight() {
  return T(Lat::b_rat[A][0]) / T(Lat::b_rat[A][1]);
}

/// c_a . v with the components folded at compile time (no multiplies by +-1).
template <int CX, int CY, int CZ, typename T>
inline T dot_c(T x, T y, T z) {
  T s = T(0);
  if constexpr (CX == 1) s += x;
  if constexpr (CX == -1) s -= x;
  if constexpr (CY == 1) s += y;
  if constexpr (CY == -1) s -= y;
  if constexpr (CZ == 1) s += z;
  if constexpr (CZ == -1) s -= z;
  return s;
}

/// Everything the per-direction expressions consume, precomputed once per
/// node. Off-diagonal stress enters doubled; trcs2 = cs2 * trace(Pi).
template <typename T>
struct NodeMoments {
  T rho{}, ux{}, uy{}, uz{};
  T usq15{};                     // 1.5 * |u|^2
  T pxx{}, pyy{}, pzz{};
  T pxy2{}, pxz2{}, pyz2{};
  T trcs2{};
};

template <typename T>
inline NodeMoments<T> prepare_node(T rho, T ux, T uy, T uz, T pxx, T pyy,
                                   T pzz, T pxy, T pxz, T pyz) {
  NodeMoments<T> m;
  m.rho = rho;
  m.ux = ux;
  m.uy = uy;
  m.uz = uz;
  m.usq15 = T(1.5) * (ux * ux + uy * uy + uz * uz);
  m.pxx = pxx;
  m.pyy = pyy;
  m.pzz = pzz;
  m.pxy2 = pxy + pxy;
  m.pxz2 = pxz + pxz;
  m.pyz2 = pyz + pyz;
  m.trcs2 = cs2_v<T> * (pxx + pyy + pzz);
  return m;
}

/// Second-order equilibrium of the incompressible model,
/// t_a (rho + 3 c.u + 4.5 (c.u)^2 - 1.5 u.u), for one direction.
template <class Lat, int A, typename T>
inline T equilibrium_dir(const NodeMoments<T>& m) {
  constexpr int CX = Lat::c[A][0], CY = Lat::c[A][1], CZ = Lat::c[A][2];
  constexpr T t = weight<Lat, A, T>();
  const T cu = dot_c<CX, CY, CZ>(m.ux, m.uy, m.uz);
  return t * (m.rho + T(3) * cu + T(4.5) * cu * cu - m.usq15);
}

/// Regularised non-equilibrium part, (t_a / (2 cs^4)) Q_a : Pi^neq with
/// Q_a = c_a c_a - cs^2 I. The full Q contraction reduces to picking stress
/// components by the signs of c_a.
template <class Lat, int A, typename T>
inline T regularized_dir(const NodeMoments<T>& m) {
  constexpr int CX = Lat::c[A][0], CY = Lat::c[A][1], CZ = Lat::c[A][2];
  constexpr T t = weight<Lat, A, T>();
  T s = T(0);
  if constexpr (CX != 0) s += m.pxx;
  if constexpr (CY != 0) s += m.pyy;
  if constexpr (CZ != 0) s += m.pzz;
  if constexpr (CX * CY == 1) s += m.pxy2;
  if constexpr (CX * CY == -1) s -= m.pxy2;
  if constexpr (CX * CZ == 1) s += m.pxz2;
  if constexpr (CX * CZ == -1) s -= m.pxz2;
  if constexpr (CY * CZ == 1) s += m.pyz2;
  if constexpr (CY * CZ == -1) s -= m.pyz2;
  return t * T(4.5) * (s - m.trcs2);
}

/// Post-collision value of one direction: equilibrium plus the retained
/// fraction of the reconstructed non-equilibrium part.
template <class Lat, int A, typename T>
inline T post_collision_dir(const NodeMoments<T>& m, T one_minus_omega) {
  return equilibrium_dir<Lat, A, T>(m) +
         one_minus_omega * regularized_dir<Lat, A, T>(m);
}

// ---- runtime (descriptor-driven) forms, used by tests and analysis ----

template <typename T>
Eigen::VectorX<T> equilibrium_all(const LatticeDescriptor<T>& d, T rho, T ux,
                                  T uy, T uz) {
  Eigen::VectorX<T> fe(d.q);
  const T usq15 = T(1.5) * (ux * ux + uy * uy + uz * uz);
  for (int a = 0; a < d.q; ++a) {
    const T cu = T(d.c(0, a)) * ux + T(d.c(1, a)) * uy + T(d.c(2, a)) * uz;
    fe(a) = d.t(a) * (rho + T(3) * cu + T(4.5) * cu * cu - usq15);
  }
  return fe;
}

/// Nonequilibrium second moment sum_a (f_a - feq_a) c c, dense symmetric.
template <typename T>
Eigen::Matrix<T, 3, 3> pineq_from_f(const LatticeDescriptor<T>& d,
                                    const Eigen::VectorX<T>& f, T rho, T ux,
                                    T uy, T uz) {
  const auto fe = equilibrium_all(d, rho, ux, uy, uz);
  Eigen::Matrix<T, 3, 3> p = Eigen::Matrix<T, 3, 3>::Zero();
  for (int a = 0; a < d.q; ++a) {
    const T df = f(a) - fe(a);
    for (int al = 0; al < 3; ++al)
      for (int be = 0; be < 3; ++be)
        p(al, be) += df * T(d.c(al, a)) * T(d.c(be, a));
  }
  return p;
}

}  // namespace tslb
