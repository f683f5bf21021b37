#pragma once

#include <cstdint>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "tslb/lattice.hpp"

namespace tslb {

/// Box dimensions in nodes. 2D runs use nz = 1.
struct GridDims {
  int nx = 0, ny = 0, nz = 1;

  std::size_t n() const {
    return std::size_t(nx) * std::size_t(ny) * std::size_t(nz);
  }
  bool valid() const { return nx > 0 && ny > 0 && nz > 0; }
};

/// x-fastest linearisation; all storage below uses this.
inline std::size_t linear_index(const GridDims& g, int i, int j, int k) {
  return std::size_t(i) +
         std::size_t(g.nx) * (std::size_t(j) + std::size_t(g.ny) * std::size_t(k));
}

inline int wrap(int i, int n) {
  i %= n;
  return i < 0 ? i + n : i;
}

template <typename T>
using FieldArray = Eigen::ArrayX<T>;

/// Structure-of-arrays state for the fused solver: one distribution array per
/// direction plus the per-node moments the reconstruction reads back.
/// The moment block replaces the second distribution copy a flip-flop scheme
/// would carry.
template <typename T>
struct FieldSet {
  GridDims dims;
  int q = 0;
  int dim = 0;

  std::vector<FieldArray<T>> f;      // q arrays, one per direction
  FieldArray<T> rho;                 // density
  std::vector<FieldArray<T>> mom;    // dim arrays: sum_a f_a c_a (bare, no force shift)
  std::vector<FieldArray<T>> pineq;  // dim*(dim+1)/2 arrays: xx yy [zz] xy [xz yz]

  std::size_t n() const { return dims.n(); }
  int npineq() const { return dim * (dim + 1) / 2; }
};

/// Two-fluid state: a FieldSet per colour sharing one set of moment arrays
/// (moments of the colour-blind sum), plus the phase field, its gradient and
/// the near-contact flags.
template <typename T>
struct TwoFluidFieldSet {
  GridDims dims;
  int q = 0;
  int dim = 0;

  std::vector<FieldArray<T>> fr;     // red colour distributions
  std::vector<FieldArray<T>> fb;     // blue colour distributions
  FieldArray<T> rho_r;
  FieldArray<T> rho_b;
  FieldArray<T> rho;                 // rho_r + rho_b
  std::vector<FieldArray<T>> mom;    // colour-blind momentum
  std::vector<FieldArray<T>> pineq;
  FieldArray<T> phi;                 // (rho_r - rho_b) / rho
  std::vector<FieldArray<T>> gradphi;
  std::vector<std::uint8_t> nci_flag;  // 1 = interface node facing a near contact

  std::size_t n() const { return dims.n(); }
  int npineq() const { return dim * (dim + 1) / 2; }
};

template <typename T>
FieldSet<T> allocate_fields(const GridDims& g, const LatticeDescriptor<T>& d) {
  if (!g.valid()) throw std::invalid_argument("allocate_fields: bad dims");
  FieldSet<T> s;
  s.dims = g;
  s.q = d.q;
  s.dim = d.dim;
  const auto n = Eigen::Index(g.n());
  s.f.resize(d.q);
  for (auto& a : s.f) a = FieldArray<T>::Zero(n);
  s.rho = FieldArray<T>::Zero(n);
  s.mom.resize(d.dim);
  for (auto& a : s.mom) a = FieldArray<T>::Zero(n);
  s.pineq.resize(s.npineq());
  for (auto& a : s.pineq) a = FieldArray<T>::Zero(n);
  return s;
}

template <typename T>
TwoFluidFieldSet<T> allocate_two_fluid(const GridDims& g,
                                       const LatticeDescriptor<T>& d) {
  if (!g.valid()) throw std::invalid_argument("allocate_two_fluid: bad dims");
  TwoFluidFieldSet<T> s;
  s.dims = g;
  s.q = d.q;
  s.dim = d.dim;
  const auto n = Eigen::Index(g.n());
  s.fr.resize(d.q);
  s.fb.resize(d.q);
  for (auto& a : s.fr) a = FieldArray<T>::Zero(n);
  for (auto& a : s.fb) a = FieldArray<T>::Zero(n);
  s.rho_r = FieldArray<T>::Zero(n);
  s.rho_b = FieldArray<T>::Zero(n);
  s.rho = FieldArray<T>::Zero(n);
  s.mom.resize(d.dim);
  for (auto& a : s.mom) a = FieldArray<T>::Zero(n);
  s.pineq.resize(s.npineq());
  for (auto& a : s.pineq) a = FieldArray<T>::Zero(n);
  s.phi = FieldArray<T>::Zero(n);
  s.gradphi.resize(d.dim);
  for (auto& a : s.gradphi) a = FieldArray<T>::Zero(n);
  s.nci_flag.assign(g.n(), 0);
  return s;
}

/// Per-node array accounting for the fused scheme versus a two-buffer
/// flip-flop, used by the memory report and checked in the tests.
struct ArrayLedger {
  LatticeKind kind{};
  int q = 0;
  int dim = 0;
  int fused_arrays = 0;     // q + 1 + dim + dim*(dim+1)/2
  int flipflop_arrays = 0;  // 2q + 1 + dim
  std::size_t elem_bytes = 0;
  std::size_t fused_bytes_per_node = 0;
  std::size_t flipflop_bytes_per_node = 0;
  std::size_t saved_bytes_per_node = 0;
};

inline ArrayLedger memory_report(LatticeKind kind, std::size_t elem_bytes) {
  ArrayLedger l;
  l.kind = kind;
  l.q = (kind == LatticeKind::D2Q9) ? D2Q9::q : D3Q19::q;
  l.dim = (kind == LatticeKind::D2Q9) ? D2Q9::dim : D3Q19::dim;
  l.fused_arrays = l.q + 1 + l.dim + l.dim * (l.dim + 1) / 2;
  l.flipflop_arrays = 2 * l.q + 1 + l.dim;
  l.elem_bytes = elem_bytes;
  l.fused_bytes_per_node = std::size_t(l.fused_arrays) * elem_bytes;
  l.flipflop_bytes_per_node = std::size_t(l.flipflop_arrays) * elem_bytes;
  l.saved_bytes_per_node = l.flipflop_bytes_per_node - l.fused_bytes_per_node;
  return l;
}

}  // namespace tslb
