#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "tslb/boundary.hpp"
#include "tslb/collision.hpp"
#include "tslb/fields.hpp"
#include "tslb/lattice.hpp"
#include "tslb/parallel.hpp"

namespace tslb {

/// Run f(row_begin, row_end) over [0, nrows) split into one contiguous chunk
/// per worker. Per-node work is independent inside a phase, so the split
/// never changes results.
template <class F>
inline void parallel_rows(std::size_t nrows, WorkerPool* pool, F&& f) {
  if (!pool || pool->size() == 1) {
    f(std::size_t(0), nrows);
    return;
  }
  const int nw = pool->size();
  pool->run([&](int w) {
    const Range r = partition_range(nrows, nw, w);
    f(r.begin, r.end);
  });
}

/// Raw velocity moments of one node, accumulated in fixed direction order.
template <typename T>
struct RawMoments {
  T r{}, jx{}, jy{}, jz{};
  T pxx{}, pyy{}, pzz{}, pxy{}, pxz{}, pyz{};
};

/// Node-local arithmetic always runs in double, whatever the storage scalar:
/// float fields then round once per stored value instead of once per
/// operation, so the directional sums keep telescoping and global mass drift
/// stays far below the storage epsilon. For double storage every conversion
/// is an identity.
template <class Lat, typename T>
inline RawMoments<double> raw_moments(const std::vector<FieldArray<T>>& f,
                                      std::size_t idx) {
  RawMoments<double> m;
  for_each_dir<Lat>([&](auto A) {
    constexpr int a = A.value;
    constexpr int CX = Lat::c[a][0], CY = Lat::c[a][1], CZ = Lat::c[a][2];
    const double fa = double(f[a][Eigen::Index(idx)]);
    m.r += fa;
    if constexpr (CX == 1) m.jx += fa;
    if constexpr (CX == -1) m.jx -= fa;
    if constexpr (CY == 1) m.jy += fa;
    if constexpr (CY == -1) m.jy -= fa;
    if constexpr (CZ == 1) m.jz += fa;
    if constexpr (CZ == -1) m.jz -= fa;
    if constexpr (CX != 0) m.pxx += fa;
    if constexpr (CY != 0) m.pyy += fa;
    if constexpr (CZ != 0) m.pzz += fa;
    if constexpr (CX * CY == 1) m.pxy += fa;
    if constexpr (CX * CY == -1) m.pxy -= fa;
    if constexpr (CX * CZ == 1) m.pxz += fa;
    if constexpr (CX * CZ == -1) m.pxz -= fa;
    if constexpr (CY * CZ == 1) m.pyz += fa;
    if constexpr (CY * CZ == -1) m.pyz -= fa;
  });
  return m;
}

/// Phase 1: per-node density, bare momentum and nonequilibrium stress into
/// the moment arrays. With rho0 = 1 the velocity equals the momentum, and
/// Pi^neq = sum f c c - (cs2 rho I + u u) exactly for this equilibrium.
template <class Lat, typename T>
void compute_moments(FieldSet<T>& s, const NodeGeometry& geo,
                     WorkerPool* pool = nullptr) {
  const GridDims g = s.dims;
  const std::size_t nrows = std::size_t(g.ny) * std::size_t(g.nz);
  parallel_rows(nrows, pool, [&](std::size_t rb, std::size_t re) {
    for (std::size_t row = rb; row < re; ++row) {
      const int j = int(row % std::size_t(g.ny));
      const int k = int(row / std::size_t(g.ny));
      std::size_t idx = linear_index(g, 0, j, k);
      for (int i = 0; i < g.nx; ++i, ++idx) {
        if (geo.solid[idx]) continue;
        const RawMoments<double> m = raw_moments<Lat, T>(s.f, idx);
        const Eigen::Index e = Eigen::Index(idx);
        s.rho[e] = T(m.r);
        s.mom[0][e] = T(m.jx);
        s.mom[1][e] = T(m.jy);
        if constexpr (Lat::dim == 3) {
          s.mom[2][e] = T(m.jz);
          s.pineq[0][e] = T(m.pxx - cs2_v<double> * m.r - m.jx * m.jx);
          s.pineq[1][e] = T(m.pyy - cs2_v<double> * m.r - m.jy * m.jy);
          s.pineq[2][e] = T(m.pzz - cs2_v<double> * m.r - m.jz * m.jz);
          s.pineq[3][e] = T(m.pxy - m.jx * m.jy);
          s.pineq[4][e] = T(m.pxz - m.jx * m.jz);
          s.pineq[5][e] = T(m.pyz - m.jy * m.jz);
        } else {
          s.pineq[0][e] = T(m.pxx - cs2_v<double> * m.r - m.jx * m.jx);
          s.pineq[1][e] = T(m.pyy - cs2_v<double> * m.r - m.jy * m.jy);
          s.pineq[2][e] = T(m.pxy - m.jx * m.jy);
        }
      }
    }
  });
}

template <class Lat, typename T>
inline NodeMoments<double> load_node_moments(const FieldSet<T>& s,
                                             std::size_t idx) {
  const Eigen::Index e = Eigen::Index(idx);
  if constexpr (Lat::dim == 3) {
    return prepare_node(double(s.rho[e]), double(s.mom[0][e]),
                        double(s.mom[1][e]), double(s.mom[2][e]),
                        double(s.pineq[0][e]), double(s.pineq[1][e]),
                        double(s.pineq[2][e]), double(s.pineq[3][e]),
                        double(s.pineq[4][e]), double(s.pineq[5][e]));
  } else {
    return prepare_node(double(s.rho[e]), double(s.mom[0][e]),
                        double(s.mom[1][e]), 0.0, double(s.pineq[0][e]),
                        double(s.pineq[1][e]), 0.0, double(s.pineq[2][e]),
                        0.0, 0.0);
  }
}

/// Momentum correction a population picks up when bouncing off a wall moving
/// at u_wall: 2 t_a rho0 (c_a . u_wall) / cs2 with rho0 = 1.
template <class Lat, int A, typename T>
inline T bounce_correction(const std::array<T, 3>& u_wall) {
  constexpr int CX = Lat::c[A][0], CY = Lat::c[A][1], CZ = Lat::c[A][2];
  constexpr T t = weight<Lat, A, T>();
  return T(6) * t * dot_c<CX, CY, CZ>(u_wall[0], u_wall[1], u_wall[2]);
}

/// Linear offsets idx(x + c_a) - idx(x), valid away from faces.
template <class Lat>
inline std::array<std::ptrdiff_t, Lat::q> push_offsets(const GridDims& g) {
  std::array<std::ptrdiff_t, Lat::q> off{};
  for (int a = 0; a < Lat::q; ++a)
    off[std::size_t(a)] =
        std::ptrdiff_t(Lat::c[a][0]) +
        std::ptrdiff_t(g.nx) *
            (std::ptrdiff_t(Lat::c[a][1]) +
             std::ptrdiff_t(g.ny) * std::ptrdiff_t(Lat::c[a][2]));
  return off;
}

/// Phase 2 of the fused scheme: rebuild each node's post-collision state from
/// (rho, u, Pi^neq) and push it straight into the neighbours' slots of the
/// same distribution arrays. Slot (x, a) has exactly one writer -- the fluid
/// node at x - c_a, or x itself bouncing direction opp(a) off an adjacent
/// wall -- so the in-place update is race-free and needs no second buffer.
template <class Lat, typename T>
void stream_collide_fused(FieldSet<T>& s, const NodeGeometry& geo,
                          const BoundarySpec<T>& spec,
                          const CollisionParams<T>& prm,
                          WorkerPool* pool = nullptr) {
  const GridDims g = s.dims;
  const double om1 = 1.0 - double(prm.omega);
  const auto off = push_offsets<Lat>(g);
  const std::size_t nrows = std::size_t(g.ny) * std::size_t(g.nz);
  parallel_rows(nrows, pool, [&](std::size_t rb, std::size_t re) {
    for (std::size_t row = rb; row < re; ++row) {
      const int j = int(row % std::size_t(g.ny));
      const int k = int(row / std::size_t(g.ny));
      std::size_t idx = linear_index(g, 0, j, k);
      for (int i = 0; i < g.nx; ++i, ++idx) {
        if (geo.solid[idx]) continue;
        const NodeMoments<double> m = load_node_moments<Lat, T>(s, idx);
        const std::uint32_t slow = geo.slow_mask[idx];
        if (slow == 0) {
          for_each_dir<Lat>([&](auto A) {
            constexpr int a = A.value;
            const T out = T(post_collision_dir<Lat, a, double>(m, om1));
            s.f[a][Eigen::Index(idx) + off[a]] = out;
          });
        } else {
          for_each_dir<Lat>([&](auto A) {
            constexpr int a = A.value;
            // round to storage first so the wall path matches the reference
            // step, which stores the collided value before streaming it
            const T out = T(post_collision_dir<Lat, a, double>(m, om1));
            if ((slow >> a) & 1u) {
              std::size_t target = 0;
              std::array<T, 3> uw;
              if (resolve_push<T, Lat>(g, spec, geo.solid, i, j, k, a, target,
                                       uw)) {
                const std::array<double, 3> uwd{double(uw[0]), double(uw[1]),
                                                double(uw[2])};
                s.f[Lat::opp[a]][Eigen::Index(idx)] =
                    T(double(out) - bounce_correction<Lat, a, double>(uwd));
              } else {
                s.f[a][Eigen::Index(target)] = out;
              }
            } else {
              s.f[a][Eigen::Index(idx) + off[a]] = out;
            }
          });
        }
      }
    }
  });
}

/// One fused time step: moments, barrier, fused stream-collide. The barrier
/// lives inside WorkerPool::run, which returns only when every worker has
/// finished its phase.
template <class Lat, typename T>
void fused_step(FieldSet<T>& s, const NodeGeometry& geo,
                const BoundarySpec<T>& spec, const CollisionParams<T>& prm,
                WorkerPool* pool = nullptr) {
  compute_moments<Lat, T>(s, geo, pool);
  stream_collide_fused<Lat, T>(s, geo, spec, prm, pool);
}

/// Pure streaming of the current f into `dst` (push, with wrap and
/// bounce-back). Used by the reference step and by the streaming tests.
template <class Lat, typename T>
void stream_only(FieldSet<T>& s, std::vector<FieldArray<T>>& dst,
                 const NodeGeometry& geo, const BoundarySpec<T>& spec,
                 WorkerPool* pool = nullptr) {
  const GridDims g = s.dims;
  const auto off = push_offsets<Lat>(g);
  const std::size_t nrows = std::size_t(g.ny) * std::size_t(g.nz);
  parallel_rows(nrows, pool, [&](std::size_t rb, std::size_t re) {
    for (std::size_t row = rb; row < re; ++row) {
      const int j = int(row % std::size_t(g.ny));
      const int k = int(row / std::size_t(g.ny));
      std::size_t idx = linear_index(g, 0, j, k);
      for (int i = 0; i < g.nx; ++i, ++idx) {
        if (geo.solid[idx]) continue;
        const std::uint32_t slow = geo.slow_mask[idx];
        for_each_dir<Lat>([&](auto A) {
          constexpr int a = A.value;
          const T out = s.f[a][Eigen::Index(idx)];
          if ((slow >> a) & 1u) {
            std::size_t target = 0;
            std::array<T, 3> uw;
            if (resolve_push<T, Lat>(g, spec, geo.solid, i, j, k, a, target,
                                     uw)) {
              const std::array<double, 3> uwd{double(uw[0]), double(uw[1]),
                                              double(uw[2])};
              dst[Lat::opp[a]][Eigen::Index(idx)] =
                  T(double(out) - bounce_correction<Lat, a, double>(uwd));
            } else {
              dst[a][Eigen::Index(target)] = out;
            }
          } else {
            dst[a][Eigen::Index(idx) + off[a]] = out;
          }
        });
      }
    }
  });
}

/// Two-buffer reference step: identical moment pass, collide in place, then
/// stream into `scratch` and swap. Every per-direction value goes through
/// the same inline expressions as the fused path, in the same order, so the
/// two schemes agree bit for bit.
template <class Lat, typename T>
void reference_step(FieldSet<T>& s, std::vector<FieldArray<T>>& scratch,
                    const NodeGeometry& geo, const BoundarySpec<T>& spec,
                    const CollisionParams<T>& prm,
                    WorkerPool* pool = nullptr) {
  const GridDims g = s.dims;
  const double om1 = 1.0 - double(prm.omega);
  compute_moments<Lat, T>(s, geo, pool);
  const std::size_t nrows = std::size_t(g.ny) * std::size_t(g.nz);
  // collide: overwrite f with the post-collision state
  parallel_rows(nrows, pool, [&](std::size_t rb, std::size_t re) {
    for (std::size_t row = rb; row < re; ++row) {
      const int j = int(row % std::size_t(g.ny));
      const int k = int(row / std::size_t(g.ny));
      std::size_t idx = linear_index(g, 0, j, k);
      for (int i = 0; i < g.nx; ++i, ++idx) {
        if (geo.solid[idx]) continue;
        const NodeMoments<double> m = load_node_moments<Lat, T>(s, idx);
        for_each_dir<Lat>([&](auto A) {
          constexpr int a = A.value;
          s.f[a][Eigen::Index(idx)] =
              T(post_collision_dir<Lat, a, double>(m, om1));
        });
      }
    }
  });
  // stream: copy into the second buffer, bouncing at walls and solids
  stream_only<Lat, T>(s, scratch, geo, spec, pool);
  s.f.swap(scratch);
}

/// Initialise f to the regularised state matching (rho, u, Pi^neq): the
/// equilibrium plus the full reconstructed nonequilibrium part.
template <class Lat, typename T, class F>
void initialize_regularized(FieldSet<T>& s, const NodeGeometry& geo,
                            F&& node_state) {
  const GridDims g = s.dims;
  for (int k = 0; k < g.nz; ++k)
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        const std::size_t idx = linear_index(g, i, j, k);
        if (geo.solid[idx]) continue;
        const NodeMoments<T> m = node_state(i, j, k);
        for_each_dir<Lat>([&](auto A) {
          constexpr int a = A.value;
          s.f[a][Eigen::Index(idx)] =
              equilibrium_dir<Lat, a, T>(m) + regularized_dir<Lat, a, T>(m);
        });
      }
}

}  // namespace tslb
