#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <set>

#include "tslb/analysis.hpp"
#include "tslb/bench.hpp"
#include "tslb/solver.hpp"

using namespace tslb;

namespace {

// Wrap-aware union-find over {phi > 0}, an independent oracle for
// count_components.
template <typename T>
int components_by_union_find(const GridDims& g, const FieldArray<T>& phi,
                             int dim) {
  std::vector<std::size_t> parent(g.n());
  for (std::size_t i = 0; i < g.n(); ++i) parent[i] = i;
  std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  auto unite = [&](std::size_t a, std::size_t b) {
    parent[find(a)] = find(b);
  };
  const int nd[3] = {g.nx, g.ny, g.nz};
  for (int k = 0; k < g.nz; ++k)
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        const std::size_t idx = linear_index(g, i, j, k);
        if (!(phi[Eigen::Index(idx)] > 0)) continue;
        const int base[3] = {i, j, k};
        for (int ax = 0; ax < dim; ++ax) {
          int c[3] = {base[0], base[1], base[2]};
          c[ax] = wrap(c[ax] + 1, nd[ax]);
          const std::size_t nb = linear_index(g, c[0], c[1], c[2]);
          if (phi[Eigen::Index(nb)] > 0) unite(idx, nb);
        }
      }
  std::set<std::size_t> roots;
  for (std::size_t i = 0; i < g.n(); ++i)
    if (phi[Eigen::Index(i)] > 0) roots.insert(find(i));
  return int(roots.size());
}

}  // namespace

TEST_CASE("estimate_period recovers the period of a damped sine") {
  const double T0 = 137.25, lambda = 1e-3;
  std::vector<double> t, y;
  for (int i = 0; i <= 800; ++i) {
    t.push_back(i);
    y.push_back(std::exp(-lambda * i) *
                std::sin(2 * std::numbers::pi * i / T0 + 0.3));
  }
  CHECK(estimate_period(t, y) == doctest::Approx(T0).epsilon(1e-4));
  // too short for two crossings
  std::vector<double> ts(t.begin(), t.begin() + 10);
  std::vector<double> ys(y.begin(), y.begin() + 10);
  CHECK_THROWS(estimate_period(ts, ys));
}

TEST_CASE("fit_decay_rate is exact on a pure exponential") {
  const double lambda = 3.7e-3;
  std::vector<double> t, y;
  for (int i = 0; i < 200; ++i) {
    t.push_back(2.0 * i);
    y.push_back(5.0 * std::exp(-lambda * 2.0 * i));
  }
  CHECK(fit_decay_rate(t, y) == doctest::Approx(lambda).epsilon(1e-10));
}

TEST_CASE("oscillation theory: pinned values for a reference drop") {
  OscillationSpec s;
  s.mode = 2;
  s.radius = 40;
  s.sigma = 0.03;
  s.nu_in = s.nu_out = 0.25 / 3.0;  // tau = 0.75
  const auto th = oscillation_theory(s);
  // omega0^2 = 2*3*1*3*0.03 / (40^3 * 5)
  CHECK(th.omega0 == doctest::Approx(std::sqrt(1.6875e-6)).epsilon(1e-12));
  CHECK(th.chi == doctest::Approx(9.0211e-3).epsilon(1e-4));
  CHECK(th.period == doctest::Approx(5431.5).epsilon(2e-4));
  // the two inviscid variants differ by sqrt((m+2)/(m+1))
  CHECK(th.omega0_classical / th.omega0 ==
        doctest::Approx(std::sqrt(4.0 / 3.0)).epsilon(1e-12));
  CHECK(th.period_classical < th.period);
}

TEST_CASE("kinetic energy of a hand-built field") {
  const GridDims g{2, 2, 1};
  std::vector<std::uint8_t> solid(g.n(), 0);
  solid[3] = 1;
  std::vector<FieldArray<double>> mom(2);
  mom[0] = FieldArray<double>::Zero(4);
  mom[1] = FieldArray<double>::Zero(4);
  mom[0] << 0.1, 0.2, 0.0, 9.0;  // the 9 sits on a solid node
  mom[1] << 0.0, 0.1, 0.3, 9.0;
  const double want = 0.5 * (0.01 + (0.04 + 0.01) + 0.09);
  CHECK(kinetic_energy<double>(g, solid, mom) ==
        doctest::Approx(want).epsilon(1e-14));
}

TEST_CASE("profile sampling interpolates linearly") {
  Profile p;
  p.coord = {0.0, 0.5, 1.0};
  p.value = {1.0, 3.0, 2.0};
  CHECK(sample_profile(p, 0.0) == 1.0);
  CHECK(sample_profile(p, 1.0) == 2.0);
  CHECK(sample_profile(p, 0.25) == doctest::Approx(2.0));
  CHECK(sample_profile(p, 0.75) == doctest::Approx(2.5));
  CHECK(sample_profile(p, -1.0) == 1.0);   // clamped
  CHECK(sample_profile(p, 2.0) == 2.0);
}

TEST_CASE("centerline profiles anchor the wall values") {
  const GridDims g{8, 8, 1};
  std::vector<FieldArray<double>> mom(2);
  mom[0] = FieldArray<double>::Zero(Eigen::Index(g.n()));
  mom[1] = FieldArray<double>::Zero(Eigen::Index(g.n()));
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      mom[0][Eigen::Index(linear_index(g, i, j, 0))] = j * 0.01;
  const auto p = centerline_ux<double>(g, mom, 0.0, 0.08);
  CHECK(p.coord.size() == std::size_t(g.ny) + 2);
  CHECK(p.coord.front() == 0.0);
  CHECK(p.value.front() == 0.0);
  CHECK(p.coord.back() == 1.0);
  CHECK(p.value.back() == 0.08);
  CHECK(p.coord[1] == doctest::Approx(0.5 / g.ny));
  CHECK(p.value[1] == doctest::Approx(0.0));
  CHECK(p.value[4] == doctest::Approx(0.03));
}

TEST_CASE("vortex centre found on a synthetic streamfunction") {
  const GridDims g{64, 64, 1};
  std::vector<FieldArray<double>> mom(2);
  mom[0] = FieldArray<double>::Zero(Eigen::Index(g.n()));
  mom[1] = FieldArray<double>::Zero(Eigen::Index(g.n()));
  // psi = exp(-(r - r0)^2 / 2 s^2) centred at (0.6, 0.7): u_x = d psi / dy
  const double xc = 0.6, yc = 0.7, s2 = 0.1 * 0.1;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const double x = (i + 0.5) / g.nx, y = (j + 0.5) / g.ny;
      const double psi =
          std::exp(-((x - xc) * (x - xc) + (y - yc) * (y - yc)) / (2 * s2));
      mom[0][Eigen::Index(linear_index(g, i, j, 0))] =
          -(y - yc) / s2 * psi;
    }
  const auto c = vortex_center<double>(g, mom);
  CHECK(c[0] == doctest::Approx(xc).epsilon(0.02));
  CHECK(c[1] == doctest::Approx(yc).epsilon(0.02));
}

TEST_CASE("droplet radius from the positive-phase volume") {
  const GridDims g2{64, 64, 1};
  FieldArray<double> phi = FieldArray<double>::Constant(Eigen::Index(g2.n()), -1.0);
  const double R = 13.2;
  for (int j = 0; j < g2.ny; ++j)
    for (int i = 0; i < g2.nx; ++i)
      if (std::hypot(i - 31.5, j - 31.5) <= R)
        phi[Eigen::Index(linear_index(g2, i, j, 0))] = 1.0;
  CHECK(droplet_radius<double>(g2, phi, 2) == doctest::Approx(R).epsilon(0.02));

  const GridDims g3{32, 32, 32};
  FieldArray<double> phi3 =
      FieldArray<double>::Constant(Eigen::Index(g3.n()), -1.0);
  const double R3 = 9.4;
  for (int k = 0; k < g3.nz; ++k)
    for (int j = 0; j < g3.ny; ++j)
      for (int i = 0; i < g3.nx; ++i) {
        const double r = std::sqrt((i - 15.5) * (i - 15.5) +
                                   (j - 15.5) * (j - 15.5) +
                                   (k - 15.5) * (k - 15.5));
        if (r <= R3)
          phi3[Eigen::Index(linear_index(g3, i, j, k))] = 1.0;
      }
  CHECK(droplet_radius<double>(g3, phi3, 3) ==
        doctest::Approx(R3).epsilon(0.02));
}

TEST_CASE("phase second moments of a uniform ellipse") {
  const GridDims g{200, 160, 1};
  FieldArray<double> phi = FieldArray<double>::Constant(Eigen::Index(g.n()), -1.0);
  FieldArray<double> rho_r = FieldArray<double>::Zero(Eigen::Index(g.n()));
  const double a = 50, b = 30, cx = 99.5 + 7, cy = 79.5 - 4;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const double X = (i - cx) / a, Y = (j - cy) / b;
      if (X * X + Y * Y <= 1.0) {
        const std::size_t idx = linear_index(g, i, j, 0);
        phi[Eigen::Index(idx)] = 1.0;
        rho_r[Eigen::Index(idx)] = 1.0;
      }
    }
  const auto M = phase_second_moments<double>(g, rho_r, phi);
  // uniform ellipse: Mxx = a^2/4, Myy = b^2/4, cross moments vanish
  CHECK(M[0] == doctest::Approx(a * a / 4).epsilon(0.01));
  CHECK(M[1] == doctest::Approx(b * b / 4).epsilon(0.01));
  CHECK(std::abs(M[3]) < 1.0);
  // the mode-2 signal is positive for a prolate-x shape
  CHECK(M[0] - 0.5 * (M[1] + M[2]) > 0);
}

TEST_CASE("pressure jump between bulk regions") {
  const GridDims g{4, 4, 1};
  FieldArray<double> rho(Eigen::Index(g.n())), phi(Eigen::Index(g.n()));
  for (std::size_t idx = 0; idx < g.n(); ++idx) {
    const bool inside = idx < 6;
    rho[Eigen::Index(idx)] = inside ? 1.06 : 1.0;
    phi[Eigen::Index(idx)] = inside ? 1.0 : -1.0;
  }
  // one interface node on each side must be excluded by the 0.9 cut
  phi[Eigen::Index(6)] = 0.5;
  rho[Eigen::Index(6)] = 42.0;
  CHECK(pressure_jump<double>(g, rho, phi) ==
        doctest::Approx(0.06 / 3.0).epsilon(1e-13));
  FieldArray<double> all_in = FieldArray<double>::Constant(Eigen::Index(g.n()), 1.0);
  CHECK_THROWS(pressure_jump<double>(g, rho, all_in));
}

TEST_CASE("component count: deterministic shapes") {
  const GridDims g{20, 16, 1};
  FieldArray<double> phi = FieldArray<double>::Constant(Eigen::Index(g.n()), -1.0);
  auto set_disc = [&](double cx, double cy, double R) {
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i)
        if (std::hypot(i - cx, j - cy) <= R)
          phi[Eigen::Index(linear_index(g, i, j, 0))] = 1.0;
  };
  CHECK(count_components<double>(g, phi, 2) == 0);
  set_disc(5, 8, 3);
  CHECK(count_components<double>(g, phi, 2) == 1);
  set_disc(14, 8, 3);
  CHECK(count_components<double>(g, phi, 2) == 2);
  // a blob crossing the periodic seam is still one component
  phi.setConstant(-1.0);
  set_disc(0.5, 8, 3);  // spills over x = 0 to the far side
  set_disc(19.5, 8, 3);
  CHECK(count_components<double>(g, phi, 2) == 1);
}

TEST_CASE("component count agrees with union-find on random fields") {
  std::mt19937_64 rng(40);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const GridDims g2{13, 11, 1};
  for (int trial = 0; trial < 40; ++trial) {
    FieldArray<double> phi(Eigen::Index(g2.n()));
    const double p = 0.25 + 0.5 * u(rng);
    for (Eigen::Index i = 0; i < phi.size(); ++i)
      phi[i] = u(rng) < p ? 1.0 : -1.0;
    CHECK(count_components<double>(g2, phi, 2) ==
          components_by_union_find<double>(g2, phi, 2));
  }
  const GridDims g3{7, 6, 5};
  for (int trial = 0; trial < 15; ++trial) {
    FieldArray<double> phi(Eigen::Index(g3.n()));
    for (Eigen::Index i = 0; i < phi.size(); ++i)
      phi[i] = u(rng) < 0.35 ? 1.0 : -1.0;
    CHECK(count_components<double>(g3, phi, 3) ==
          components_by_union_find<double>(g3, phi, 3));
  }
}

TEST_CASE("kernel cost census: pinned flop and byte counts") {
  const auto c3 = count_kernel_cost(LatticeKind::D3Q19, sizeof(double));
  CHECK(c3.flops == 377.0);
  CHECK(c3.bytes == 464.0);
  CHECK(c3.intensity == doctest::Approx(377.0 / 464.0).epsilon(1e-15));

  const auto c3f = count_kernel_cost(LatticeKind::D3Q19, sizeof(float));
  CHECK(c3f.flops == 377.0);
  CHECK(c3f.bytes == 232.0);
  CHECK(c3f.intensity == doctest::Approx(1.625).epsilon(1e-3));
  CHECK(c3f.intensity >= 1.0);
  CHECK(c3f.intensity <= 5.0);

  const auto c2 = count_kernel_cost(LatticeKind::D2Q9, sizeof(double));
  CHECK(c2.flops == 172.0);
  CHECK(c2.bytes == 240.0);
}

TEST_CASE("array ledger: fused state versus flip-flop") {
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

TEST_CASE("roofline bound picks the binding constraint") {
  const MachineModel m{15e12, 900e9};
  CHECK(roofline_bound(m, 2.31) == doctest::Approx(2.079e12).epsilon(1e-12));
  CHECK(roofline_bound(m, 100.0) == 15e12);   // compute bound
  CHECK(roofline_bound(m, 1.0) == 900e9);     // memory bound
}

TEST_CASE("fnv1a digest: reference values and streaming") {
  CHECK(fnv1a("", 0) == 0xcbf29ce484222325ull);
  CHECK(fnv1a("a", 1) == 0xaf63dc4c8601ec8cull);
  // chaining equals one-shot over the concatenation
  const char msg[] = "stream-collide";
  const auto one = fnv1a(msg, sizeof msg - 1);
  const auto two = fnv1a(msg + 6, sizeof msg - 7, fnv1a(msg, 6));
  CHECK(one == two);
  CHECK(fnv1a("b", 1) != fnv1a("a", 1));
}

TEST_CASE("state digest is reproducible and state-sensitive") {
  const GridDims g{12, 12, 1};
  CollisionParams<double> prm;
  prm.omega = 1.3;
  auto make = [&](long steps) {
    SingleFluidSim<D2Q9, double> sim(g, prm,
                                     BoundarySpec<double>::all_periodic());
    initialize_regularized<D2Q9, double>(
        sim.fields(), sim.geometry(), [&](int i, int j, int) {
          return prepare_node(1.0, 0.01 * std::sin(0.5 * i + j), 0.0, 0.0,
                              0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
        });
    sim.run(steps);
    return state_digest(sim.fields());
  };
  CHECK(make(7) == make(7));
  CHECK(make(7) != make(8));
}

TEST_CASE("benchmark harness produces a consistent record") {
  const GridDims g{24, 20, 1};
  CollisionParams<double> prm;
  prm.omega = 1.0;
  const auto r = run_benchmark<D2Q9, double>(g, prm, 30, 5, nullptr);
  CHECK(r.lattice == "d2q9");
  CHECK(r.dims.nx == 24);
  CHECK(r.steps == 30);
  CHECK(r.workers == 1);
  CHECK(r.seconds > 0);
  CHECK(r.glups > 0);
  CHECK(r.mlups == doctest::Approx(r.glups * 1000.0).epsilon(1e-12));
  CHECK(r.cost.flops == 172.0);
  CHECK(r.digest != 0);

  // the timed state is bit-identical for any worker count
  WorkerPool pool(3);
  const auto rp = run_benchmark<D2Q9, double>(g, prm, 30, 5, &pool);
  CHECK(rp.workers == 3);
  CHECK(rp.digest == r.digest);
}
