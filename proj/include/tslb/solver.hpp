#pragma once

#include <cmath>
#include <cstdint>
#include <type_traits>
#include <utility>
#include <vector>

#include "tslb/boundary.hpp"
#include "tslb/collision.hpp"
#include "tslb/fields.hpp"
#include "tslb/kernels.hpp"
#include "tslb/lattice.hpp"
#include "tslb/multicomponent.hpp"
#include "tslb/parallel.hpp"

namespace tslb {

/// Call f with the compile-time lattice matching a runtime kind.
template <class F>
decltype(auto) dispatch_lattice(LatticeKind k, F&& f) {
  if (k == LatticeKind::D2Q9) return f(std::type_identity<D2Q9>{});
  return f(std::type_identity<D3Q19>{});
}

template <typename T>
struct StabilityReport {
  bool finite = true;
  T max_speed = T(0);
  T min_rho = T(0);
  T max_rho = T(0);

  /// Everything finite and Mach below ~0.3 (|u| < 0.3 / sqrt(3)).
  bool stable() const {
    return finite && max_speed < T(0.3) * T(0.57735026918962576L);
  }
};

template <typename T>
StabilityReport<T> scan_stability(const GridDims& g,
                                  const std::vector<std::uint8_t>& solid,
                                  const FieldArray<T>& rho,
                                  const std::vector<FieldArray<T>>& mom) {
  StabilityReport<T> rep;
  bool first = true;
  for (std::size_t idx = 0; idx < g.n(); ++idx) {
    if (solid[idx]) continue;
    const Eigen::Index e = Eigen::Index(idx);
    T u2 = T(0);
    for (const auto& m : mom) u2 += m[e] * m[e];
    const T r = rho[e];
    if (!std::isfinite(double(r)) || !std::isfinite(double(u2)))
      rep.finite = false;
    const T sp = std::sqrt(u2);
    if (first) {
      rep.min_rho = rep.max_rho = r;
      first = false;
    } else {
      rep.min_rho = std::min(rep.min_rho, r);
      rep.max_rho = std::max(rep.max_rho, r);
    }
    rep.max_speed = std::max(rep.max_speed, sp);
  }
  return rep;
}

/// Single-component solver: owns the state and geometry, advances with the
/// fused kernel. Moment arrays always describe the state the last phase 1
/// saw; call refresh_moments() before reading observables.
template <class Lat, typename T>
class SingleFluidSim {
 public:
  using Lattice = Lat;
  using Scalar = T;

  SingleFluidSim(const GridDims& g, const CollisionParams<T>& prm,
                 const BoundarySpec<T>& spec,
                 const std::vector<std::uint8_t>& solid = {},
                 WorkerPool* pool = nullptr)
      : dims_(g),
        prm_(prm),
        spec_(spec),
        geo_(classify_nodes<T, Lat>(g, spec, solid)),
        fields_(allocate_fields<T>(g, make_descriptor<T>(Lat::kind))),
        pool_(pool) {}

  void step() {
    fused_step<Lat, T>(fields_, geo_, spec_, prm_, pool_);
    ++steps_;
  }

  void run(long n) {
    for (long s = 0; s < n; ++s) step();
  }

  void refresh_moments() { compute_moments<Lat, T>(fields_, geo_, pool_); }

  StabilityReport<T> stability() const {
    return scan_stability<T>(dims_, geo_.solid, fields_.rho, fields_.mom);
  }

  /// Total mass and momentum over fluid nodes, accumulated serially in index
  /// order by the coordinator (never inside a parallel kernel).
  void totals(T& mass, std::array<T, 3>& momentum) const {
    mass = T(0);
    momentum = {T(0), T(0), T(0)};
    for (std::size_t idx = 0; idx < dims_.n(); ++idx) {
      if (geo_.solid[idx]) continue;
      const Eigen::Index e = Eigen::Index(idx);
      mass += fields_.rho[e];
      for (int d = 0; d < Lat::dim; ++d) momentum[std::size_t(d)] += fields_.mom[d][e];
    }
  }

  GridDims dims() const { return dims_; }
  const CollisionParams<T>& params() const { return prm_; }
  const BoundarySpec<T>& boundary() const { return spec_; }
  const NodeGeometry& geometry() const { return geo_; }
  FieldSet<T>& fields() { return fields_; }
  const FieldSet<T>& fields() const { return fields_; }
  long steps() const { return steps_; }
  WorkerPool* pool() const { return pool_; }

 private:
  GridDims dims_;
  CollisionParams<T> prm_;
  BoundarySpec<T> spec_;
  NodeGeometry geo_;
  FieldSet<T> fields_;
  WorkerPool* pool_;
  long steps_ = 0;
};

/// Two-component colour-gradient solver with optional near-contact forcing.
template <class Lat, typename T>
class TwoFluidSim {
 public:
  using Lattice = Lat;
  using Scalar = T;

  TwoFluidSim(const GridDims& g, const CollisionParams<T>& prm,
              const ColorParams<T>& cp, const BoundarySpec<T>& spec,
              const std::vector<std::uint8_t>& solid = {},
              WorkerPool* pool = nullptr)
      : dims_(g),
        prm_(prm),
        cp_(cp),
        spec_(spec),
        geo_(classify_nodes<T, Lat>(g, spec, solid)),
        fields_(allocate_two_fluid<T>(g, make_descriptor<T>(Lat::kind))),
        pool_(pool) {}

  void step() {
    two_fluid_step<Lat, T>(fields_, geo_, spec_, prm_, cp_, pool_);
    ++steps_;
  }

  void run(long n) {
    for (long s = 0; s < n; ++s) step();
  }

  /// Recompute densities, phi, bare momentum and the gradient for analysis.
  void refresh_moments() {
    color_moments<Lat, T>(fields_, geo_, pool_);
    gradient_and_nci<Lat, T>(fields_, geo_, spec_, cp_, pool_);
  }

  StabilityReport<T> stability() const {
    return scan_stability<T>(dims_, geo_.solid, fields_.rho, fields_.mom);
  }

  void color_masses(T& red, T& blue) const {
    red = T(0);
    blue = T(0);
    for (std::size_t idx = 0; idx < dims_.n(); ++idx) {
      if (geo_.solid[idx]) continue;
      const Eigen::Index e = Eigen::Index(idx);
      red += fields_.rho_r[e];
      blue += fields_.rho_b[e];
    }
  }

  GridDims dims() const { return dims_; }
  const CollisionParams<T>& params() const { return prm_; }
  const ColorParams<T>& colors() const { return cp_; }
  const BoundarySpec<T>& boundary() const { return spec_; }
  const NodeGeometry& geometry() const { return geo_; }
  TwoFluidFieldSet<T>& fields() { return fields_; }
  const TwoFluidFieldSet<T>& fields() const { return fields_; }
  long steps() const { return steps_; }
  WorkerPool* pool() const { return pool_; }

 private:
  GridDims dims_;
  CollisionParams<T> prm_;
  ColorParams<T> cp_;
  BoundarySpec<T> spec_;
  NodeGeometry geo_;
  TwoFluidFieldSet<T> fields_;
  WorkerPool* pool_;
  long steps_ = 0;
};

}  // namespace tslb
