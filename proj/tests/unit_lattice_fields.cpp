#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <map>
#include <set>

#include <Eigen/Dense>

#include "tslb/fields.hpp"
#include "tslb/lattice.hpp"

using namespace tslb;

namespace {

// Independent oracle: solve for the weight of each speed class from the
// moment conditions sum t = 1, sum t cx^2 = cs2, sum t cx^2 cy^2 = cs2^2
// (the isotropy condition picks the off-diagonal fourth moment).
template <typename T>
std::map<int, double> solve_class_weights(const LatticeDescriptor<T>& d) {
  std::map<int, int> class_count;          // |c|^2 -> members
  std::map<int, double> cx2_sum, cx2cy2;   // per-class coefficient sums
  for (int a = 0; a < d.q; ++a) {
    const int c2 = d.c(0, a) * d.c(0, a) + d.c(1, a) * d.c(1, a) +
                   d.c(2, a) * d.c(2, a);
    class_count[c2] += 1;
    cx2_sum[c2] += d.c(0, a) * d.c(0, a);
    cx2cy2[c2] += d.c(0, a) * d.c(0, a) * d.c(1, a) * d.c(1, a);
  }
  REQUIRE(class_count.size() == 3);
  Eigen::Matrix3d A;
  Eigen::Vector3d b;
  int col = 0;
  std::map<int, int> class_col;
  for (const auto& [c2, n] : class_count) {
    A(0, col) = n;
    A(1, col) = cx2_sum[c2];
    A(2, col) = cx2cy2[c2];
    class_col[c2] = col;
    ++col;
  }
  b << 1.0, 1.0 / 3.0, 1.0 / 9.0;
  const Eigen::Vector3d w = A.fullPivLu().solve(b);
  std::map<int, double> out;
  for (const auto& [c2, cc] : class_col) out[c2] = w(cc);
  return out;
}

}  // namespace

TEST_CASE("equilibrium weights solve the moment system") {
  for (const auto kind : {LatticeKind::D2Q9, LatticeKind::D3Q19}) {
    const auto d = make_descriptor<double>(kind);
    const auto w = solve_class_weights(d);
    for (int a = 0; a < d.q; ++a) {
      const int c2 = d.c(0, a) * d.c(0, a) + d.c(1, a) * d.c(1, a) +
                     d.c(2, a) * d.c(2, a);
      CHECK(d.t(a) == doctest::Approx(w.at(c2)).epsilon(1e-14));
    }
  }
}

TEST_CASE("descriptor matches the compile-time tables") {
  const auto d2 = make_descriptor<double>(LatticeKind::D2Q9);
  CHECK(d2.dim == 2);
  CHECK(d2.q == 9);
  for (int a = 0; a < d2.q; ++a) {
    CHECK(d2.c(0, a) == D2Q9::c[std::size_t(a)][0]);
    CHECK(d2.c(1, a) == D2Q9::c[std::size_t(a)][1]);
    CHECK(d2.c(2, a) == 0);
    CHECK(d2.opp(a) == D2Q9::opp[std::size_t(a)]);
  }
  const auto d3 = make_descriptor<double>(LatticeKind::D3Q19);
  CHECK(d3.dim == 3);
  CHECK(d3.q == 19);
  for (int a = 0; a < d3.q; ++a) {
    CHECK(d3.c(0, a) == D3Q19::c[std::size_t(a)][0]);
    CHECK(d3.c(1, a) == D3Q19::c[std::size_t(a)][1]);
    CHECK(d3.c(2, a) == D3Q19::c[std::size_t(a)][2]);
    CHECK(d3.opp(a) == D3Q19::opp[std::size_t(a)]);
  }
}

TEST_CASE("moment validation passes for both lattices") {
  for (const auto kind : {LatticeKind::D2Q9, LatticeKind::D3Q19}) {
    const auto rep = validate_moments(make_descriptor<double>(kind));
    for (const auto& c : rep.checks) {
      INFO(c.name, " violation ", c.violation);
      CHECK(c.pass);
    }
    CHECK(rep.all_pass());
  }
}

TEST_CASE("moment validation flags injected defects") {
  auto d = make_descriptor<double>(LatticeKind::D2Q9);
  d.t(3) += 1e-6;
  CHECK_FALSE(validate_moments(d).all_pass());

  auto d2 = make_descriptor<double>(LatticeKind::D3Q19);
  d2.opp(5) = 5;
  CHECK_FALSE(validate_moments(d2).all_pass());

  auto d3 = make_descriptor<double>(LatticeKind::D3Q19);
  d3.b(0) += 1e-8;
  CHECK_FALSE(validate_moments(d3).all_pass());
}

TEST_CASE("perturbation weights: brute-force moment identities") {
  for (const auto kind : {LatticeKind::D2Q9, LatticeKind::D3Q19}) {
    const auto d = make_descriptor<double>(kind);
    double s0 = 0;
    for (int a = 0; a < d.q; ++a) s0 += d.b(a);
    CHECK(s0 == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    for (int al = 0; al < d.dim; ++al) {
      double s1 = 0;
      for (int a = 0; a < d.q; ++a) s1 += d.b(a) * d.c(al, a);
      CHECK(std::abs(s1) < 1e-15);
      for (int be = 0; be < d.dim; ++be) {
        double s2 = 0;
        for (int a = 0; a < d.q; ++a)
          s2 += d.b(a) * d.c(al, a) * d.c(be, a);
        const double want = al == be ? 1.0 / 3.0 : 0.0;
        CHECK(s2 == doctest::Approx(want).epsilon(1e-14));
      }
    }
  }
}

TEST_CASE("opposite pairs are adjacent and rest comes first") {
  for (const auto kind : {LatticeKind::D2Q9, LatticeKind::D3Q19}) {
    const auto d = make_descriptor<double>(kind);
    CHECK(d.c(0, 0) == 0);
    CHECK(d.c(1, 0) == 0);
    CHECK(d.c(2, 0) == 0);
    for (int a = 1; a < d.q; a += 2) CHECK(d.opp(a) == a + 1);
  }
}

TEST_CASE("for_each_dir enumerates every direction once, in order") {
  std::vector<int> seen;
  for_each_dir<D2Q9>([&](auto A) { seen.push_back(A.value); });
  REQUIRE(seen.size() == std::size_t(D2Q9::q));
  for (int a = 0; a < D2Q9::q; ++a) CHECK(seen[std::size_t(a)] == a);
}

TEST_CASE("linear index is x-fastest and bijective") {
  const GridDims g{5, 4, 3};
  CHECK(g.n() == 60);
  std::set<std::size_t> all;
  for (int k = 0; k < g.nz; ++k)
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) all.insert(linear_index(g, i, j, k));
  CHECK(all.size() == g.n());
  CHECK(*all.begin() == 0);
  CHECK(*all.rbegin() == g.n() - 1);
  CHECK(linear_index(g, 1, 0, 0) - linear_index(g, 0, 0, 0) == 1);
  CHECK(linear_index(g, 0, 1, 0) - linear_index(g, 0, 0, 0) ==
        std::size_t(g.nx));
  CHECK(linear_index(g, 0, 0, 1) - linear_index(g, 0, 0, 0) ==
        std::size_t(g.nx) * std::size_t(g.ny));
}

TEST_CASE("wrap handles both signs") {
  CHECK(wrap(-1, 8) == 7);
  CHECK(wrap(8, 8) == 0);
  CHECK(wrap(3, 8) == 3);
  CHECK(wrap(-8, 8) == 0);
  CHECK(wrap(17, 8) == 1);
}

TEST_CASE("field allocation sizes and zero init") {
  const GridDims g{6, 5, 4};
  const auto d = make_descriptor<double>(LatticeKind::D3Q19);
  const auto s = allocate_fields<double>(g, d);
  CHECK(s.f.size() == 19);
  CHECK(s.mom.size() == 3);
  CHECK(s.pineq.size() == 6);
  for (const auto& a : s.f) {
    CHECK(a.size() == Eigen::Index(g.n()));
    CHECK(a.abs().maxCoeff() == 0.0);
  }
  const auto t = allocate_two_fluid<double>(g, d);
  CHECK(t.fr.size() == 19);
  CHECK(t.fb.size() == 19);
  CHECK(t.gradphi.size() == 3);
  CHECK(t.nci_flag.size() == g.n());
}

TEST_CASE("per-node array accounting: fused vs flip-flop") {
  // 2D: 15 arrays versus 21; 3D: 29 versus 42. At four-byte elements the
  // fused scheme saves 24 and 52 bytes per node respectively.
  const auto l2 = memory_report(LatticeKind::D2Q9, 4);
  CHECK(l2.fused_arrays == 15);
  CHECK(l2.flipflop_arrays == 21);
  CHECK(l2.saved_bytes_per_node == 24);
  const auto l3 = memory_report(LatticeKind::D3Q19, 4);
  CHECK(l3.fused_arrays == 29);
  CHECK(l3.flipflop_arrays == 42);
  CHECK(l3.saved_bytes_per_node == 52);
  const auto l3d = memory_report(LatticeKind::D3Q19, 8);
  CHECK(l3d.fused_bytes_per_node == 232);
  CHECK(l3d.flipflop_bytes_per_node == 336);
}

TEST_CASE("fused array count formula") {
  // q + 1 + D + D(D+1)/2 distributions-plus-moments, 2q + 1 + D for the
  // two-buffer scheme it replaces
  for (const auto kind : {LatticeKind::D2Q9, LatticeKind::D3Q19}) {
    const auto d = make_descriptor<double>(kind);
    const auto l = memory_report(kind, 8);
    CHECK(l.fused_arrays == d.q + 1 + d.dim + d.dim * (d.dim + 1) / 2);
    CHECK(l.flipflop_arrays == 2 * d.q + 1 + d.dim);
  }
}
