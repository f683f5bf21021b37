#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <numbers>
#include <string>
#include <vector>

#include "tslb/fields.hpp"
#include "tslb/kernels.hpp"
#include "tslb/lattice.hpp"
#include "tslb/solver.hpp"

namespace tslb {

/// Arithmetic and memory cost of one node update (moments pass plus fused
/// stream-collide), derived from the same direction tables the kernel unrolls
/// over. Counting rules: every written add/sub/mul is one flop after constant
/// folding (accumulator seeds and multiplies by compile-time zeros fold
/// away); each field array element moves twice per update, one read and one
/// write, so bytes = 2 * arrays_per_node * element size.
struct KernelCost {
  double flops = 0;
  double bytes = 0;
  double intensity = 0;  // flops / bytes
};

inline KernelCost count_kernel_cost(LatticeKind kind,
                                    std::size_t elem_bytes) {
  const auto d = make_descriptor<double>(kind);
  const int D = d.dim;
  const int np = D * (D + 1) / 2;

  double p1 = 0;  // moments pass
  double p2 = 12; // prepare_node: 6 for 1.5|u|^2, 3 doublings, 3 for cs2 tr
  for (int a = 0; a < d.q; ++a) {
    int nm = 0, pairs = 0;
    for (int ax = 0; ax < 3; ++ax)
      if (d.c(ax, a) != 0) ++nm;
    for (int ax = 0; ax < 3; ++ax)
      for (int bx = ax + 1; bx < 3; ++bx)
        if (d.c(ax, a) != 0 && d.c(bx, a) != 0) ++pairs;
    // moments: one add into rho, one per nonzero component into j and into
    // the diagonal second moments, one per component pair off-diagonal
    p1 += 1 + 2 * nm + pairs;
    if (nm == 0) {
      p2 += 2 + 2 + 2;  // rest direction: both expressions collapse
    } else {
      const double feq = (nm - 1) + 7;         // c.u, then t(rho+3cu+4.5cu^2-q)
      const double rec = (nm + pairs - 1) + 3; // stress picks, sub, two muls
      p2 += feq + rec + 2;                     // + om1 * rec + add
    }
  }
  // Pi^eq subtraction: cs2 rho once, mul + two subs per diagonal, mul + sub
  // per off-diagonal
  p1 += 1 + 3 * D + 2 * (np - D);

  KernelCost c;
  c.flops = p1 + p2;
  const int arrays = d.q + 1 + D + np;
  c.bytes = 2.0 * double(arrays) * double(elem_bytes);
  c.intensity = c.flops / c.bytes;
  return c;
}

/// Roofline throughput bound: min(peak flops, bandwidth * intensity).
struct MachineModel {
  double peak_flops = 0;      // flop/s
  double peak_bandwidth = 0;  // byte/s
};

inline double roofline_bound(const MachineModel& m, double intensity) {
  const double mem = m.peak_bandwidth * intensity;
  return mem < m.peak_flops ? mem : m.peak_flops;
}

// ---------------------------------------------------------------------------
// state digests (bit-identity checks)
// ---------------------------------------------------------------------------

inline std::uint64_t fnv1a(const void* data, std::size_t n,
                           std::uint64_t h = 0xcbf29ce484222325ull) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

template <typename T>
std::uint64_t state_digest(const FieldSet<T>& s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (const auto& a : s.f)
    h = fnv1a(a.data(), std::size_t(a.size()) * sizeof(T), h);
  return h;
}

template <typename T>
std::uint64_t state_digest(const TwoFluidFieldSet<T>& s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (const auto& a : s.fr)
    h = fnv1a(a.data(), std::size_t(a.size()) * sizeof(T), h);
  for (const auto& a : s.fb)
    h = fnv1a(a.data(), std::size_t(a.size()) * sizeof(T), h);
  return h;
}

// ---------------------------------------------------------------------------
// throughput measurement
// ---------------------------------------------------------------------------

struct BenchResult {
  std::string lattice;
  GridDims dims;
  long steps = 0;
  int workers = 1;
  double seconds = 0;
  double glups = 0;   // 1e9 lattice updates / s
  double mlups = 0;
  KernelCost cost;
  std::uint64_t digest = 0;
};

/// Periodic box, uniform density with a gentle shear so the kernel sees
/// nontrivial data. Times `steps` fused steps after `warmup` untimed ones.
template <class Lat, typename T>
BenchResult run_benchmark(const GridDims& g, const CollisionParams<T>& prm,
                          long steps, long warmup, WorkerPool* pool) {
  SingleFluidSim<Lat, T> sim(g, prm, BoundarySpec<T>::all_periodic(), {},
                             pool);
  initialize_regularized<Lat, T>(
      sim.fields(), sim.geometry(), [&](int, int j, int) {
        const T ux = T(0.02) * std::sin(2.0 * std::numbers::pi * j / g.ny);
        return prepare_node(T(1), ux, T(0), T(0), T(0), T(0), T(0), T(0),
                            T(0), T(0));
      });
  sim.run(warmup);
  const auto t0 = std::chrono::steady_clock::now();
  sim.run(steps);
  const auto t1 = std::chrono::steady_clock::now();

  BenchResult r;
  r.lattice = lattice_name(Lat::kind);
  r.dims = g;
  r.steps = steps;
  r.workers = pool ? pool->size() : 1;
  r.seconds = std::chrono::duration<double>(t1 - t0).count();
  const double updates = double(g.n()) * double(steps);
  r.glups = updates / 1e9 / r.seconds;
  r.mlups = updates / 1e6 / r.seconds;
  r.cost = count_kernel_cost(Lat::kind, sizeof(T));
  r.digest = state_digest(sim.fields());
  return r;
}

}  // namespace tslb
