#pragma once

#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <vector>

#include "tslb/boundary.hpp"
#include "tslb/collision.hpp"
#include "tslb/fields.hpp"
#include "tslb/kernels.hpp"
#include "tslb/lattice.hpp"
#include "tslb/parallel.hpp"

namespace tslb {

/// The perturbation applied at interface nodes. Squared uses
/// t_a (c_a . n)^2 and conserves mass exactly; Linear keeps the first power
/// of c_a . n and is retained for comparison only (its zeroth moment does
/// not vanish).
enum class PerturbationForm { Squared, Linear };

template <typename T>
struct ColorParams {
  T sigma = T(0.01);          // surface tension
  T beta = T(0.7);            // recolouring sharpness in (0, 1]
  T nci_strength = T(0);      // near-contact force amplitude, 0 = off
  int nci_reach = 3;          // film scan range in nodes
  T eps_bulk = T(0.02);       // bulk threshold: phi < -1 + eps is ambient bulk
  T grad_threshold = T(1e-6); // |grad phi| above which a node is interface
  PerturbationForm form = PerturbationForm::Squared;
};

template <class Lat, int A, typename T>
constexpr T inv_cnorm() {
  constexpr int c2 = Lat::c[A][0] * Lat::c[A][0] +
                     Lat::c[A][1] * Lat::c[A][1] +
                     Lat::c[A][2] * Lat::c[A][2];
  if constexpr (c2 == 0)
    return T(0);
  else if constexpr (c2 == 1)
    return T(1);
  else if constexpr (c2 == 2)
    return T(0.70710678118654752440084436210485L);
  else
    return T(0.57735026918962576450914878050196L);
}

/// Phase 1 of the two-fluid step: colour densities, phase field
/// phi = (rho_r - rho_b) / rho, raw colour-blind momentum and raw second
/// moments (Pi^eq is subtracted later, once the velocity shift from the
/// near-contact force is known). Also clears the contact flags, which phase 2
/// re-derives from scratch.
template <class Lat, typename T>
void color_moments(TwoFluidFieldSet<T>& s, const NodeGeometry& geo,
                   WorkerPool* pool = nullptr) {
  const GridDims g = s.dims;
  const std::size_t nrows = std::size_t(g.ny) * std::size_t(g.nz);
  parallel_rows(nrows, pool, [&](std::size_t rb, std::size_t re) {
    for (std::size_t row = rb; row < re; ++row) {
      const int j = int(row % std::size_t(g.ny));
      const int k = int(row / std::size_t(g.ny));
      std::size_t idx = linear_index(g, 0, j, k);
      for (int i = 0; i < g.nx; ++i, ++idx) {
        s.nci_flag[idx] = 0;
        if (geo.solid[idx]) continue;
        const Eigen::Index e = Eigen::Index(idx);
        T rr = T(0), rb2 = T(0);
        RawMoments<T> m;
        for_each_dir<Lat>([&](auto A) {
          constexpr int a = A.value;
          constexpr int CX = Lat::c[a][0], CY = Lat::c[a][1],
                        CZ = Lat::c[a][2];
          const T fra = s.fr[a][e];
          const T fba = s.fb[a][e];
          const T ga = fra + fba;
          rr += fra;
          rb2 += fba;
          m.r += ga;
          if constexpr (CX == 1) m.jx += ga;
          if constexpr (CX == -1) m.jx -= ga;
          if constexpr (CY == 1) m.jy += ga;
          if constexpr (CY == -1) m.jy -= ga;
          if constexpr (CZ == 1) m.jz += ga;
          if constexpr (CZ == -1) m.jz -= ga;
          if constexpr (CX != 0) m.pxx += ga;
          if constexpr (CY != 0) m.pyy += ga;
          if constexpr (CZ != 0) m.pzz += ga;
          if constexpr (CX * CY == 1) m.pxy += ga;
          if constexpr (CX * CY == -1) m.pxy -= ga;
          if constexpr (CX * CZ == 1) m.pxz += ga;
          if constexpr (CX * CZ == -1) m.pxz -= ga;
          if constexpr (CY * CZ == 1) m.pyz += ga;
          if constexpr (CY * CZ == -1) m.pyz -= ga;
        });
        s.rho_r[e] = rr;
        s.rho_b[e] = rb2;
        s.rho[e] = m.r;
        s.phi[e] = (rr - rb2) / m.r;
        s.mom[0][e] = m.jx;
        s.mom[1][e] = m.jy;
        if constexpr (Lat::dim == 3) {
          s.mom[2][e] = m.jz;
          s.pineq[0][e] = m.pxx;
          s.pineq[1][e] = m.pyy;
          s.pineq[2][e] = m.pzz;
          s.pineq[3][e] = m.pxy;
          s.pineq[4][e] = m.pxz;
          s.pineq[5][e] = m.pyz;
        } else {
          s.pineq[0][e] = m.pxx;
          s.pineq[1][e] = m.pyy;
          s.pineq[2][e] = m.pxy;
        }
      }
    }
  });
}

namespace detail {

/// Advance (ci, cj, ck) one step along c. Returns false when the step leaves
/// the fluid (wall face or solid node); periodic axes wrap.
template <typename T>
inline bool advance(const GridDims& g, const BoundarySpec<T>& spec,
                    const std::vector<std::uint8_t>& solid, const int c[3],
                    int& ci, int& cj, int& ck) {
  int tc[3] = {ci + c[0], cj + c[1], ck + c[2]};
  const int nd[3] = {g.nx, g.ny, g.nz};
  for (int ax = 0; ax < 3; ++ax) {
    if (tc[ax] < 0 || tc[ax] >= nd[ax]) {
      const Face<T>& f = spec.faces[2 * ax + (tc[ax] < 0 ? 0 : 1)];
      if (f.kind != FaceKind::Periodic) return false;
      tc[ax] = wrap(tc[ax], nd[ax]);
    }
  }
  if (solid[linear_index(g, tc[0], tc[1], tc[2])]) return false;
  ci = tc[0];
  cj = tc[1];
  ck = tc[2];
  return true;
}

}  // namespace detail

/// Phase 2: isotropic gradient of the phase field,
/// grad phi = (1/cs2) sum_a t_a c_a phi(x + c_a), exact for linear fields;
/// out-of-domain neighbours take phi(x) (zero normal gradient). Then the
/// near-contact scan: every ambient-bulk node probes each +-c_a pair up to
/// nci_reach nodes; when both probes hit a non-bulk node the film is thin
/// there, and both ends get flagged. Flags are set-only, so the relaxed
/// atomic writes commute and the result is independent of the worker split.
template <class Lat, typename T>
void gradient_and_nci(TwoFluidFieldSet<T>& s, const NodeGeometry& geo,
                      const BoundarySpec<T>& spec, const ColorParams<T>& cp,
                      WorkerPool* pool = nullptr) {
  const GridDims g = s.dims;
  const auto off = push_offsets<Lat>(g);
  const bool scan = cp.nci_strength != T(0);
  const T bulk_cut = T(-1) + cp.eps_bulk;
  const std::size_t nrows = std::size_t(g.ny) * std::size_t(g.nz);
  parallel_rows(nrows, pool, [&](std::size_t rb, std::size_t re) {
    for (std::size_t row = rb; row < re; ++row) {
      const int j = int(row % std::size_t(g.ny));
      const int k = int(row / std::size_t(g.ny));
      std::size_t idx = linear_index(g, 0, j, k);
      for (int i = 0; i < g.nx; ++i, ++idx) {
        if (geo.solid[idx]) continue;
        const Eigen::Index e = Eigen::Index(idx);
        const std::uint32_t slow = geo.slow_mask[idx];
        T gx = T(0), gy = T(0), gz = T(0);
        for_each_dir<Lat>([&](auto A) {
          constexpr int a = A.value;
          constexpr int CX = Lat::c[a][0], CY = Lat::c[a][1],
                        CZ = Lat::c[a][2];
          if constexpr (CX != 0 || CY != 0 || CZ != 0) {
            T pn;
            if ((slow >> a) & 1u) {
              std::size_t target = 0;
              std::array<T, 3> uw;
              pn = resolve_push<T, Lat>(g, spec, geo.solid, i, j, k, a,
                                        target, uw)
                       ? s.phi[e]
                       : s.phi[Eigen::Index(target)];
            } else {
              pn = s.phi[e + off[a]];
            }
            const T tp = weight<Lat, a, T>() * pn;
            if constexpr (CX == 1) gx += tp;
            if constexpr (CX == -1) gx -= tp;
            if constexpr (CY == 1) gy += tp;
            if constexpr (CY == -1) gy -= tp;
            if constexpr (CZ == 1) gz += tp;
            if constexpr (CZ == -1) gz -= tp;
          }
        });
        s.gradphi[0][e] = T(3) * gx;
        s.gradphi[1][e] = T(3) * gy;
        if constexpr (Lat::dim == 3) s.gradphi[2][e] = T(3) * gz;

        if (scan && s.phi[e] < bulk_cut) {
          for (int a = 1; a < Lat::q; ++a) {
            if (Lat::opp[a] < a) continue;  // one probe per +-c pair
            const int cp3[3] = {Lat::c[a][0], Lat::c[a][1], Lat::c[a][2]};
            const int cm3[3] = {-cp3[0], -cp3[1], -cp3[2]};
            std::size_t hit_p = 0, hit_m = 0;
            bool found_p = false, found_m = false;
            int ci = i, cj = j, ck = k;
            for (int step = 0; step < cp.nci_reach; ++step) {
              if (!detail::advance(g, spec, geo.solid, cp3, ci, cj, ck))
                break;
              const std::size_t t = linear_index(g, ci, cj, ck);
              if (s.phi[Eigen::Index(t)] >= bulk_cut) {
                hit_p = t;
                found_p = true;
                break;
              }
            }
            if (!found_p) continue;
            ci = i; cj = j; ck = k;
            for (int step = 0; step < cp.nci_reach; ++step) {
              if (!detail::advance(g, spec, geo.solid, cm3, ci, cj, ck))
                break;
              const std::size_t t = linear_index(g, ci, cj, ck);
              if (s.phi[Eigen::Index(t)] >= bulk_cut) {
                hit_m = t;
                found_m = true;
                break;
              }
            }
            if (!found_m) continue;
            std::atomic_ref<std::uint8_t>(s.nci_flag[hit_p])
                .store(1, std::memory_order_relaxed);
            std::atomic_ref<std::uint8_t>(s.nci_flag[hit_m])
                .store(1, std::memory_order_relaxed);
          }
        }
      }
    }
  });
}

/// Near-contact force at a node: zero unless flagged, else
/// F = A rho_r n with n = grad phi / |grad phi|. At a film-facing surface
/// the gradient points from the ambient film into the dispersed phase, so
/// the force drives the flagged interface back away from the film -- a
/// disjoining-pressure push that keeps the film from draining.
template <class Lat, typename T>
inline std::array<T, 3> nci_force_at(const TwoFluidFieldSet<T>& s,
                                     const ColorParams<T>& cp,
                                     std::size_t idx) {
  std::array<T, 3> F = {T(0), T(0), T(0)};
  if (!s.nci_flag[idx]) return F;
  const Eigen::Index e = Eigen::Index(idx);
  const T gx = s.gradphi[0][e];
  const T gy = s.gradphi[1][e];
  const T gz = Lat::dim == 3 ? s.gradphi[2][e] : T(0);
  const T gn = std::sqrt(gx * gx + gy * gy + gz * gz);
  if (gn <= cp.grad_threshold) return F;
  const T scale = cp.nci_strength * s.rho_r[e] / gn;
  F[0] = scale * gx;
  F[1] = scale * gy;
  F[2] = scale * gz;
  return F;
}

/// Phase 3: apply the forcing velocity shift u_eq = j + tau F (rho0 = 1) and
/// turn the raw second moments into Pi^neq = praw - cs2 rho I - u_eq u_eq.
/// After this phase the mom arrays hold u_eq, ready for reconstruction.
template <class Lat, typename T>
void prepare_stress(TwoFluidFieldSet<T>& s, const NodeGeometry& geo,
                    const CollisionParams<T>& prm, const ColorParams<T>& cp,
                    WorkerPool* pool = nullptr) {
  const GridDims g = s.dims;
  const T tau = prm.tau();
  const std::size_t nrows = std::size_t(g.ny) * std::size_t(g.nz);
  parallel_rows(nrows, pool, [&](std::size_t rb, std::size_t re) {
    for (std::size_t row = rb; row < re; ++row) {
      const int j = int(row % std::size_t(g.ny));
      const int k = int(row / std::size_t(g.ny));
      std::size_t idx = linear_index(g, 0, j, k);
      for (int i = 0; i < g.nx; ++i, ++idx) {
        if (geo.solid[idx]) continue;
        const Eigen::Index e = Eigen::Index(idx);
        const std::array<T, 3> F = nci_force_at<Lat, T>(s, cp, idx);
        const T ux = s.mom[0][e] + tau * F[0];
        const T uy = s.mom[1][e] + tau * F[1];
        const T uz = Lat::dim == 3 ? s.mom[2][e] + tau * F[2] : T(0);
        const T r = s.rho[e];
        s.mom[0][e] = ux;
        s.mom[1][e] = uy;
        if constexpr (Lat::dim == 3) {
          s.mom[2][e] = uz;
          s.pineq[0][e] += -cs2_v<T> * r - ux * ux;
          s.pineq[1][e] += -cs2_v<T> * r - uy * uy;
          s.pineq[2][e] += -cs2_v<T> * r - uz * uz;
          s.pineq[3][e] -= ux * uy;
          s.pineq[4][e] -= ux * uz;
          s.pineq[5][e] -= uy * uz;
        } else {
          s.pineq[0][e] += -cs2_v<T> * r - ux * ux;
          s.pineq[1][e] += -cs2_v<T> * r - uy * uy;
          s.pineq[2][e] -= ux * uy;
        }
      }
    }
  });
}

/// Phase 4: reconstruct the colour-blind post-collision state, add the
/// capillary perturbation at interface nodes, split the result between the
/// colours (Latva-Kokko redistribution) and push both straight to the
/// neighbours. Writes stay disjoint exactly as in the single-fluid kernel.
template <class Lat, typename T>
void stream_collide_recolor(TwoFluidFieldSet<T>& s, const NodeGeometry& geo,
                            const BoundarySpec<T>& spec,
                            const CollisionParams<T>& prm,
                            const ColorParams<T>& cp,
                            WorkerPool* pool = nullptr) {
  const GridDims g = s.dims;
  const T om1 = T(1) - prm.omega;
  const T pert_coef = T(2.25) * cp.sigma * prm.omega;
  const auto off = push_offsets<Lat>(g);
  const std::size_t nrows = std::size_t(g.ny) * std::size_t(g.nz);
  parallel_rows(nrows, pool, [&](std::size_t rb, std::size_t re) {
    for (std::size_t row = rb; row < re; ++row) {
      const int j = int(row % std::size_t(g.ny));
      const int k = int(row / std::size_t(g.ny));
      std::size_t idx = linear_index(g, 0, j, k);
      for (int i = 0; i < g.nx; ++i, ++idx) {
        if (geo.solid[idx]) continue;
        const Eigen::Index e = Eigen::Index(idx);
        NodeMoments<T> m;
        if constexpr (Lat::dim == 3) {
          m = prepare_node(s.rho[e], s.mom[0][e], s.mom[1][e], s.mom[2][e],
                           s.pineq[0][e], s.pineq[1][e], s.pineq[2][e],
                           s.pineq[3][e], s.pineq[4][e], s.pineq[5][e]);
        } else {
          m = prepare_node(s.rho[e], s.mom[0][e], s.mom[1][e], T(0),
                           s.pineq[0][e], s.pineq[1][e], T(0), s.pineq[2][e],
                           T(0), T(0));
        }
        const T rr = s.rho_r[e];
        const T rb2 = s.rho_b[e];
        const T r = s.rho[e];
        const T red_frac = rr / r;
        const T rec_amp = cp.beta * (rr * rb2 / r);
        const T gx = s.gradphi[0][e];
        const T gy = s.gradphi[1][e];
        const T gz = Lat::dim == 3 ? s.gradphi[2][e] : T(0);
        const T gn = std::sqrt(gx * gx + gy * gy + gz * gz);
        const bool interface = gn > cp.grad_threshold;
        const T pert_amp = interface ? pert_coef * gn : T(0);
        const T inv_gn = interface ? T(1) / gn : T(0);
        const T nhx = gx * inv_gn, nhy = gy * inv_gn, nhz = gz * inv_gn;
        const std::uint32_t slow = geo.slow_mask[idx];

        for_each_dir<Lat>([&](auto A) {
          constexpr int a = A.value;
          constexpr int CX = Lat::c[a][0], CY = Lat::c[a][1],
                        CZ = Lat::c[a][2];
          constexpr T t = weight<Lat, a, T>();
          constexpr T b = bweight<Lat, a, T>();
          T g_out = post_collision_dir<Lat, a, T>(m, om1);
          T fr_out;
          if (interface) {
            const T cn = dot_c<CX, CY, CZ>(nhx, nhy, nhz);
            const T shape = cp.form == PerturbationForm::Squared
                                ? t * cn * cn - b
                                : t * cn - b;
            g_out += pert_amp * shape;
            fr_out = red_frac * g_out +
                     rec_amp * t * cn * inv_cnorm<Lat, a, T>();
          } else {
            fr_out = red_frac * g_out;
          }
          const T fb_out = g_out - fr_out;

          if ((slow >> a) & 1u) {
            std::size_t target = 0;
            std::array<T, 3> uw;
            if (resolve_push<T, Lat>(g, spec, geo.solid, i, j, k, a, target,
                                     uw)) {
              const T corr = bounce_correction<Lat, a, T>(uw);
              const T corr_r = red_frac * corr;
              s.fr[Lat::opp[a]][e] = fr_out - corr_r;
              s.fb[Lat::opp[a]][e] = fb_out - (corr - corr_r);
            } else {
              s.fr[a][Eigen::Index(target)] = fr_out;
              s.fb[a][Eigen::Index(target)] = fb_out;
            }
          } else {
            s.fr[a][e + off[a]] = fr_out;
            s.fb[a][e + off[a]] = fb_out;
          }
        });
      }
    }
  });
}

/// One two-fluid time step: four phases, a barrier between each (inside
/// WorkerPool::run).
template <class Lat, typename T>
void two_fluid_step(TwoFluidFieldSet<T>& s, const NodeGeometry& geo,
                    const BoundarySpec<T>& spec,
                    const CollisionParams<T>& prm, const ColorParams<T>& cp,
                    WorkerPool* pool = nullptr) {
  color_moments<Lat, T>(s, geo, pool);
  gradient_and_nci<Lat, T>(s, geo, spec, cp, pool);
  prepare_stress<Lat, T>(s, geo, prm, cp, pool);
  stream_collide_recolor<Lat, T>(s, geo, spec, prm, cp, pool);
}

/// Node state for two-fluid initialisation: colour densities and a common
/// velocity.
template <typename T>
struct ColorInit {
  T rho_r{}, rho_b{};
  T ux{}, uy{}, uz{};
};

/// Initialise both colours at a shared equilibrium,
/// f_c = (rho_c / rho) feq(rho, u). Smooth phase profiles come from the
/// caller-provided densities.
template <class Lat, typename T, class F>
void initialize_colors(TwoFluidFieldSet<T>& s, const NodeGeometry& geo,
                       F&& node_state) {
  const GridDims g = s.dims;
  for (int k = 0; k < g.nz; ++k)
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        const std::size_t idx = linear_index(g, i, j, k);
        if (geo.solid[idx]) continue;
        const ColorInit<T> ci = node_state(i, j, k);
        const T r = ci.rho_r + ci.rho_b;
        const NodeMoments<T> m =
            prepare_node(r, ci.ux, ci.uy, ci.uz, T(0), T(0), T(0), T(0),
                         T(0), T(0));
        const T fr_frac = ci.rho_r / r;
        for_each_dir<Lat>([&](auto A) {
          constexpr int a = A.value;
          const T fe = equilibrium_dir<Lat, a, T>(m);
          s.fr[a][Eigen::Index(idx)] = fr_frac * fe;
          s.fb[a][Eigen::Index(idx)] = fe - fr_frac * fe;
        });
      }
}

}  // namespace tslb
