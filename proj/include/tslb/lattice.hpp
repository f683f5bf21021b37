#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace tslb {

enum class LatticeKind { D2Q9, D3Q19 };

// Velocity sets use a fixed ordering that tests and file formats rely on:
// rest vector first, then the axis vectors, then the diagonals, with the two
// members of every opposite pair adjacent (a, a+1).
//
// Weights are kept as exact rationals {num, den} and converted once to the
// working scalar type.
struct D2Q9 {
  static constexpr LatticeKind kind = LatticeKind::D2Q9;
  static constexpr int dim = 2;
  static constexpr int q = 9;

  static constexpr std::array<std::array<int, 3>, q> c = {{
      {0, 0, 0},
      {1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0},
      {1, 1, 0}, {-1, -1, 0}, {1, -1, 0}, {-1, 1, 0},
  }};
  static constexpr std::array<std::array<long, 2>, q> t_rat = {{
      {4, 9},
      {1, 9}, {1, 9}, {1, 9}, {1, 9},
      {1, 36}, {1, 36}, {1, 36}, {1, 36},
  }};
  // Perturbation weights for the capillary stress: sum B = cs2, sum B c = 0,
  // sum B cc = cs2 I.
  static constexpr std::array<std::array<long, 2>, q> b_rat = {{
      {-4, 27},
      {2, 27}, {2, 27}, {2, 27}, {2, 27},
      {5, 108}, {5, 108}, {5, 108}, {5, 108},
  }};
  static constexpr std::array<int, q> opp = {0, 2, 1, 4, 3, 6, 5, 8, 7};
};

struct D3Q19 {
  static constexpr LatticeKind kind = LatticeKind::D3Q19;
  static constexpr int dim = 3;
  static constexpr int q = 19;

  static constexpr std::array<std::array<int, 3>, q> c = {{
      {0, 0, 0},
      {1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1},
      {1, 1, 0}, {-1, -1, 0}, {1, -1, 0}, {-1, 1, 0},
      {1, 0, 1}, {-1, 0, -1}, {1, 0, -1}, {-1, 0, 1},
      {0, 1, 1}, {0, -1, -1}, {0, 1, -1}, {0, -1, 1},
  }};
  static constexpr std::array<std::array<long, 2>, q> t_rat = {{
      {1, 3},
      {1, 18}, {1, 18}, {1, 18}, {1, 18}, {1, 18}, {1, 18},
      {1, 36}, {1, 36}, {1, 36}, {1, 36}, {1, 36}, {1, 36},
      {1, 36}, {1, 36}, {1, 36}, {1, 36}, {1, 36}, {1, 36},
  }};
  static constexpr std::array<std::array<long, 2>, q> b_rat = {{
      {-1, 3},
      {1, 18}, {1, 18}, {1, 18}, {1, 18}, {1, 18}, {1, 18},
      {1, 36}, {1, 36}, {1, 36}, {1, 36}, {1, 36}, {1, 36},
      {1, 36}, {1, 36}, {1, 36}, {1, 36}, {1, 36}, {1, 36},
  }};
  static constexpr std::array<int, q> opp = {0,  2,  1,  4,  3,  6,  5,
                                             8,  7,  10, 9,  12, 11, 14,
                                             13, 16, 15, 18, 17};
};

template <typename T>
constexpr T cs2_v = T(1) / T(3);

/// Runtime view of a velocity set: the same tables in Eigen form, convenient
/// for validation and for code that is not templated on the lattice.
template <typename T>
struct LatticeDescriptor {
  LatticeKind kind{};
  int dim = 0;
  int q = 0;
  T cs2 = cs2_v<T>;
  Eigen::Matrix<int, 3, Eigen::Dynamic> c;   // column a = velocity vector (z row zero in 2D)
  Eigen::VectorX<T> t;                       // equilibrium weights
  Eigen::VectorX<T> b;                       // perturbation weights
  Eigen::VectorXi opp;                       // opposite-direction map
  Eigen::Matrix<T, 6, Eigen::Dynamic> q2;    // c_a c_a - cs2 I, symmetric storage xx yy zz xy xz yz
};

namespace detail {

template <typename T, class Lat>
LatticeDescriptor<T> descriptor_from_tables() {
  LatticeDescriptor<T> d;
  d.kind = Lat::kind;
  d.dim = Lat::dim;
  d.q = Lat::q;
  d.c.resize(3, Lat::q);
  d.t.resize(Lat::q);
  d.b.resize(Lat::q);
  d.opp.resize(Lat::q);
  d.q2.resize(6, Lat::q);
  for (int a = 0; a < Lat::q; ++a) {
    for (int k = 0; k < 3; ++k) d.c(k, a) = Lat::c[a][k];
    d.t(a) = T(Lat::t_rat[a][0]) / T(Lat::t_rat[a][1]);
    d.b(a) = T(Lat::b_rat[a][0]) / T(Lat::b_rat[a][1]);
    d.opp(a) = Lat::opp[a];
    const T cx = T(Lat::c[a][0]), cy = T(Lat::c[a][1]), cz = T(Lat::c[a][2]);
    d.q2(0, a) = cx * cx - d.cs2;
    d.q2(1, a) = cy * cy - d.cs2;
    d.q2(2, a) = cz * cz - (Lat::dim == 3 ? d.cs2 : T(0));
    d.q2(3, a) = cx * cy;
    d.q2(4, a) = cx * cz;
    d.q2(5, a) = cy * cz;
  }
  return d;
}

}  // namespace detail

template <typename T = double>
LatticeDescriptor<T> make_descriptor(LatticeKind kind) {
  switch (kind) {
    case LatticeKind::D2Q9:
      return detail::descriptor_from_tables<T, D2Q9>();
    case LatticeKind::D3Q19:
    default:
      return detail::descriptor_from_tables<T, D3Q19>();
  }
}

struct ValidationReport {
  struct Check {
    std::string name;
    double violation = 0.0;
    bool pass = false;
  };
  std::vector<Check> checks;
  double tolerance = 1e-14;

  bool all_pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
};

/// Checks the discrete moment and isotropy conditions by direct summation.
/// Failures are reported, not thrown.
template <typename T>
ValidationReport validate_moments(const LatticeDescriptor<T>& d,
                                  double tol = 1e-14) {
  ValidationReport rep;
  rep.tolerance = tol;
  auto push = [&](const std::string& name, double viol) {
    rep.checks.push_back({name, viol, viol <= tol});
  };
  const int D = d.dim;
  const double cs2 = double(d.cs2);
  const double cs4 = cs2 * cs2;

  double s0 = 0.0;
  for (int a = 0; a < d.q; ++a) s0 += double(d.t(a));
  push("sum t = 1", std::abs(s0 - 1.0));

  double v1 = 0.0;
  for (int al = 0; al < D; ++al) {
    double s = 0.0;
    for (int a = 0; a < d.q; ++a) s += double(d.t(a)) * d.c(al, a);
    v1 = std::max(v1, std::abs(s));
  }
  push("sum t c = 0", v1);

  double v2 = 0.0;
  for (int al = 0; al < D; ++al)
    for (int be = 0; be < D; ++be) {
      double s = 0.0;
      for (int a = 0; a < d.q; ++a)
        s += double(d.t(a)) * d.c(al, a) * d.c(be, a);
      const double want = (al == be) ? cs2 : 0.0;
      v2 = std::max(v2, std::abs(s - want));
    }
  push("sum t cc = cs2 I", v2);

  double v3 = 0.0;
  for (int al = 0; al < D; ++al)
    for (int be = 0; be < D; ++be) {
      double s = 0.0;
      for (int a = 0; a < d.q; ++a)
        s += double(d.t(a)) * d.c(al, a) * d.c(al, a) * d.c(be, a) * d.c(be, a);
      // contraction of the isotropy condition with (al,al,be,be)
      const double want = cs4 * (1.0 + 2.0 * (al == be ? 1.0 : 0.0));
      v3 = std::max(v3, std::abs(s - want));
    }
  for (int al = 0; al < D; ++al)
    for (int be = 0; be < D; ++be)
      for (int ga = 0; ga < D; ++ga)
        for (int de = 0; de < D; ++de) {
          double s = 0.0;
          for (int a = 0; a < d.q; ++a)
            s += double(d.t(a)) * d.c(al, a) * d.c(be, a) * d.c(ga, a) *
                 d.c(de, a);
          const double want =
              cs4 * ((al == be && ga == de ? 1.0 : 0.0) +
                     (al == ga && be == de ? 1.0 : 0.0) +
                     (al == de && be == ga ? 1.0 : 0.0));
          v3 = std::max(v3, std::abs(s - want));
        }
  push("4th-order isotropy", v3);

  double v4 = 0.0;
  for (int a = 0; a < d.q; ++a) {
    if (d.opp(d.opp(a)) != a) v4 = std::max(v4, 1.0);
    for (int al = 0; al < 3; ++al)
      v4 = std::max(v4, double(std::abs(d.c(al, d.opp(a)) + d.c(al, a))));
  }
  push("opp involution, c[opp] = -c", v4);

  double sb = 0.0, vb1 = 0.0;
  for (int a = 0; a < d.q; ++a) sb += double(d.b(a));
  push("sum B = cs2", std::abs(sb - cs2));
  for (int al = 0; al < D; ++al) {
    double s = 0.0;
    for (int a = 0; a < d.q; ++a) s += double(d.b(a)) * d.c(al, a);
    vb1 = std::max(vb1, std::abs(s));
  }
  push("sum B c = 0", vb1);

  double vq = 0.0;
  for (int a = 0; a < d.q; ++a) {
    const double tr = double(d.q2(0, a)) + double(d.q2(1, a)) + double(d.q2(2, a));
    double c2 = 0.0;
    for (int al = 0; al < 3; ++al) c2 += double(d.c(al, a)) * d.c(al, a);
    vq = std::max(vq, std::abs(tr - (c2 - D * cs2)));
  }
  push("trace Q = |c|^2 - D cs2", vq);

  return rep;
}

inline const char* lattice_name(LatticeKind k) {
  return k == LatticeKind::D2Q9 ? "d2q9" : "d3q19";
}

/// Compile-time loop over lattice directions; `f` receives the direction as an
/// integral_constant so velocity components fold to constants.
template <class Lat, class F>
inline void for_each_dir(F&& f) {
  [&]<std::size_t... A>(std::index_sequence<A...>) {
    (f(std::integral_constant<int, int(A)>{}), ...);
  }(std::make_index_sequence<Lat::q>{});
}

}  // namespace tslb
