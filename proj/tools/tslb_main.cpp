// Command-line front end: `run` advances a config and writes fields,
// `validate` executes the built-in verification cases against reference
// data, `bench` times the fused kernel and reports a roofline summary.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "tslb/analysis.hpp"
#include "tslb/bench.hpp"
#include "tslb/cases.hpp"
#include "tslb/config.hpp"
#include "tslb/io.hpp"
#include "tslb/solver.hpp"

#ifdef TSLB_USE_FLOAT
using Scalar = float;
#else
using Scalar = double;
#endif

namespace {

using namespace tslb;

int resolve_workers(int cli_value, int config_value) {
  if (cli_value > 0) return cli_value;
  if (config_value > 0) return config_value;
  return default_worker_count();  // honours TSLB_WORKERS
}

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return parse_config(in, path);
}

template <typename T>
BoundarySpec<T> boundary_from(const Config& c) {
  if (c.boundary == "box") return BoundarySpec<T>::closed_box();
  if (c.boundary == "cavity")
    return BoundarySpec<T>::lid_cavity(T(c.u_lid));
  return BoundarySpec<T>::all_periodic();
}

std::vector<std::uint8_t> mask_from(const Config& c, const GridDims& g) {
  if (c.mask.empty()) return {};
  std::ifstream in(c.mask);
  if (!in) throw std::runtime_error("cannot open mask " + c.mask);
  return load_mask(in, g);
}

std::string frame_name(const std::string& prefix, long step) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "_%06ld.vtk", step);
  return prefix + buf;
}

/// Points at the first non-finite density (or velocity) node so a blown-up
/// run reports where it went wrong, not just that it did.
template <typename T>
[[noreturn]] void abort_non_finite(const GridDims& g, const FieldArray<T>& rho,
                                   const std::vector<FieldArray<T>>& mom,
                                   long step) {
  auto bad = [&](std::size_t idx) {
    const Eigen::Index e = Eigen::Index(idx);
    if (!std::isfinite(double(rho[e]))) return true;
    for (const auto& m : mom)
      if (!std::isfinite(double(m[e]))) return true;
    return false;
  };
  for (std::size_t idx = 0; idx < g.n(); ++idx) {
    if (!bad(idx)) continue;
    const long i = long(idx % std::size_t(g.nx));
    const long j = long((idx / std::size_t(g.nx)) % std::size_t(g.ny));
    const long k = long(idx / (std::size_t(g.nx) * std::size_t(g.ny)));
    throw std::runtime_error("non-finite field at step " +
                             std::to_string(step) + ", node (" +
                             std::to_string(i) + ", " + std::to_string(j) +
                             ", " + std::to_string(k) + ")");
  }
  throw std::runtime_error("non-finite field at step " + std::to_string(step));
}

long series_interval(const Config& c) {
  if (c.output_every > 0) return c.output_every;
  return std::max(1L, c.steps / 100);
}

void emit_summary(const nlohmann::json& j, const Config& c) {
  std::cout << j.dump(2) << "\n";
  if (c.output.empty()) return;
  std::ofstream os(c.output + "_summary.json");
  if (!os) throw std::runtime_error("cannot open " + c.output + "_summary.json");
  os << j.dump(2) << "\n";
}

template <class Lat>
int run_single(const Config& c, WorkerPool* pool) {
  using T = Scalar;
  const GridDims g{c.nx, c.ny, c.nz};
  CollisionParams<T> prm;
  prm.omega = T(c.omega);
  SingleFluidSim<Lat, T> sim(g, prm, boundary_from<T>(c), mask_from(c, g),
                             pool);
  const T amp = c.amplitude != 0 ? T(c.amplitude) : T(0.02);
  initialize_regularized<Lat, T>(
      sim.fields(), sim.geometry(), [&](int, int j, int) {
        T ux = T(0);
        if (c.init == "shear")
          ux = amp * T(std::sin(2.0 * std::numbers::pi * j / c.ny));
        return prepare_node(T(1), ux, T(0), T(0), T(0), T(0), T(0), T(0),
                            T(0), T(0));
      });

  auto dump = [&](long step) {
    if (c.output.empty()) return;
    sim.refresh_moments();
    write_vtk_file<T>(frame_name(c.output, step), g,
                      {{"rho", &sim.fields().rho}},
                      {{"velocity", &sim.fields().mom}});
  };

  const long every = series_interval(c);
  std::vector<std::vector<double>> series;
  double mass0 = 0, mass = 0, max_speed = 0;
  std::array<double, 3> mom0{}, momentum{};
  StabilityReport<T> st;
  auto sample = [&](long step) {
    sim.refresh_moments();
    st = sim.stability();
    if (!st.finite)
      abort_non_finite<T>(g, sim.fields().rho, sim.fields().mom, step);
    T m;
    std::array<T, 3> p;
    sim.totals(m, p);
    mass = double(m);
    for (int d = 0; d < 3; ++d) momentum[std::size_t(d)] = double(p[std::size_t(d)]);
    max_speed = double(st.max_speed);
    if (step == 0) {
      mass0 = mass;
      mom0 = momentum;
    }
    series.push_back({double(step), mass, momentum[0], momentum[1],
                      momentum[2], max_speed});
  };

  const auto t0 = std::chrono::steady_clock::now();
  for (long s = 0; s < c.steps; ++s) {
    if (s % every == 0) sample(s);
    if (c.output_every > 0 && s % c.output_every == 0) dump(s);
    sim.step();
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  sample(c.steps);
  dump(c.steps);

  if (!c.output.empty())
    write_csv_file(c.output + "_series.csv",
                   {"step", "mass", "px", "py", "pz", "max_speed"}, series);

  const double updates = double(g.n()) * double(c.steps);
  nlohmann::json j;
  j["lattice"] = lattice_name(Lat::kind);
  j["dims"] = {c.nx, c.ny, c.nz};
  j["steps"] = sim.steps();
  j["workers"] = pool ? pool->size() : 1;
  j["seconds"] = seconds;
  j["glups"] = seconds > 0 ? updates / 1e9 / seconds : 0.0;
  j["mass"] = mass;
  j["momentum"] = momentum;
  j["mass_drift"] = mass0 != 0 ? std::abs(mass - mass0) / mass0 : 0.0;
  j["momentum_drift"] = {momentum[0] - mom0[0], momentum[1] - mom0[1],
                         momentum[2] - mom0[2]};
  j["max_speed"] = max_speed;
  j["rho_range"] = {double(st.min_rho), double(st.max_rho)};
  j["stable"] = st.stable();
  emit_summary(j, c);
  return 0;
}

template <class Lat>
int run_two_fluid(const Config& c, WorkerPool* pool) {
  using T = Scalar;
  const GridDims g{c.nx, c.ny, c.nz};
  CollisionParams<T> prm;
  prm.omega = T(c.omega);
  ColorParams<T> cp;
  cp.sigma = T(c.sigma);
  cp.beta = T(c.beta);
  cp.nci_strength = T(c.nci_strength);
  cp.nci_reach = c.nci_reach;
  cp.eps_bulk = T(c.nci_eps_bulk);
  TwoFluidSim<Lat, T> sim(g, prm, cp, boundary_from<T>(c), mask_from(c, g),
                          pool);
  const double R =
      c.radius > 0 ? c.radius : std::min({c.nx, c.ny, c.nz * (Lat::dim - 1)}) / 6.0;
  const double sep = c.separation > 0 ? c.separation : 2 * R + 4;
  const double cx = 0.5 * c.nx - 0.5, cy = 0.5 * c.ny - 0.5,
               cz = 0.5 * c.nz - 0.5;
  initialize_colors<Lat, T>(
      sim.fields(), sim.geometry(), [&](int i, int j, int k) {
        const double dz2 =
            Lat::dim == 3 ? (k - cz) * (k - cz) : 0.0;
        double d;
        double dir = 0;
        if (c.init == "two-droplets") {
          const double dl = std::sqrt((i - (cx - 0.5 * sep)) *
                                          (i - (cx - 0.5 * sep)) +
                                      (j - cy) * (j - cy) + dz2);
          const double dr = std::sqrt((i - (cx + 0.5 * sep)) *
                                          (i - (cx + 0.5 * sep)) +
                                      (j - cy) * (j - cy) + dz2);
          d = R - std::min(dl, dr);
          dir = dl < dr ? 1.0 : -1.0;
        } else {
          d = R - std::sqrt((i - cx) * (i - cx) + (j - cy) * (j - cy) + dz2);
        }
        const double prof = 0.5 * (1.0 + std::tanh(d));
        const double ux = dir * 0.5 * c.u_rel * prof;
        return ColorInit<T>{T(prof), T(1.0 - prof), T(ux), T(0), T(0)};
      });

  auto dump = [&](long step) {
    if (c.output.empty()) return;
    sim.refresh_moments();
    write_vtk_file<T>(frame_name(c.output, step), g,
                      {{"rho", &sim.fields().rho},
                       {"phi", &sim.fields().phi}},
                      {{"velocity", &sim.fields().mom}});
  };

  const long every = series_interval(c);
  std::vector<std::vector<double>> series;
  double mass0 = 0, red = 0, blue = 0, max_speed = 0;
  int ncomp = 0;
  StabilityReport<T> st;
  auto sample = [&](long step) {
    sim.refresh_moments();
    st = sim.stability();
    if (!st.finite)
      abort_non_finite<T>(g, sim.fields().rho, sim.fields().mom, step);
    T r, b;
    sim.color_masses(r, b);
    red = double(r);
    blue = double(b);
    max_speed = double(st.max_speed);
    ncomp = count_components(g, sim.fields().phi, Lat::dim);
    if (step == 0) mass0 = red + blue;
    series.push_back(
        {double(step), red, blue, max_speed, double(ncomp)});
  };

  const auto t0 = std::chrono::steady_clock::now();
  for (long s = 0; s < c.steps; ++s) {
    if (s % every == 0) sample(s);
    if (c.output_every > 0 && s % c.output_every == 0) dump(s);
    sim.step();
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  sample(c.steps);
  dump(c.steps);

  if (!c.output.empty())
    write_csv_file(c.output + "_series.csv",
                   {"step", "red_mass", "blue_mass", "max_speed",
                    "components"},
                   series);

  const double updates = double(g.n()) * double(c.steps);
  nlohmann::json j;
  j["lattice"] = lattice_name(Lat::kind);
  j["dims"] = {c.nx, c.ny, c.nz};
  j["steps"] = sim.steps();
  j["workers"] = pool ? pool->size() : 1;
  j["seconds"] = seconds;
  j["glups"] = seconds > 0 ? updates / 1e9 / seconds : 0.0;
  j["red_mass"] = red;
  j["blue_mass"] = blue;
  j["mass_drift"] =
      mass0 != 0 ? std::abs(red + blue - mass0) / mass0 : 0.0;
  j["components"] = ncomp;
  j["max_speed"] = max_speed;
  j["rho_range"] = {double(st.min_rho), double(st.max_rho)};
  j["stable"] = st.stable();
  emit_summary(j, c);
  return 0;
}

int cmd_run(const std::string& cfg_path, int cli_workers) {
  const Config c = load_config(cfg_path);
  WorkerPool pool(resolve_workers(cli_workers, c.workers));
  return dispatch_lattice(c.lattice, [&](auto tag) {
    using Lat = typename decltype(tag)::type;
    if (c.components == 2) return run_two_fluid<Lat>(c, &pool);
    return run_single<Lat>(c, &pool);
  });
}

bool report(const std::string& name, bool pass, const std::string& detail) {
  std::cout << (pass ? "PASS" : "FAIL") << "  " << name << "  " << detail
            << "\n";
  return pass;
}

int cmd_validate(const std::string& name, const std::string& data_dir,
                 int cli_workers) {
  WorkerPool pool(resolve_workers(cli_workers, 0));
  bool ok = true;
  char buf[160];

  if (name == "cavity") {
    CavityOptions o;
    const CavityResult r = cavity_case(o, &pool);
    ok &= report("cavity convergence", r.converged,
                 "residual " + std::to_string(r.residual) + " after " +
                     std::to_string(r.steps) + " steps");
    const auto ghia_u = load_table_file(data_dir + "/ghia_re100_u.dat");
    const auto ghia_v = load_table_file(data_dir + "/ghia_re100_v.dat");
    double du = 0, dv = 0;
    for (const auto& [y, u] : ghia_u)
      du = std::max(du, std::abs(sample_profile(r.ux_centerline, y) - u));
    for (const auto& [x, v] : ghia_v)
      dv = std::max(dv, std::abs(sample_profile(r.uy_centerline, x) - v));
    std::snprintf(buf, sizeof buf, "max dev u %.4f, v %.4f (tol 0.05)", du,
                  dv);
    ok &= report("cavity centreline profiles", du < 0.05 && dv < 0.05, buf);
    const double ex = std::abs(r.vortex[0] - 0.6172);
    const double ey = std::abs(r.vortex[1] - 0.7344);
    const double tol = 2.0 / o.n;
    std::snprintf(buf, sizeof buf,
                  "centre (%.4f, %.4f), reference (0.6172, 0.7344)",
                  r.vortex[0], r.vortex[1]);
    ok &= report("cavity vortex centre", ex < tol && ey < tol, buf);
  } else if (name == "taylor-green") {
    for (const double omega : {0.8, 1.0, 1.5}) {
      const TaylorGreenResult r = taylor_green_case(64, omega, 1500, 5, 50,
                                                    &pool);
      std::snprintf(buf, sizeof buf,
                    "omega %.2f: nu %.6f fit %.6f (err %.3f%%)", omega,
                    r.nu_nominal, r.nu_fit, 100 * r.rel_err);
      ok &= report("taylor-green viscosity", r.rel_err < 0.01, buf);
    }
  } else if (name == "laplace") {
    const LaplaceResult r = laplace_sweep({20, 30, 40}, 0.03, 0, &pool);
    for (const auto& p : r.points) {
      std::snprintf(buf, sizeof buf, "R %.1f -> %.2f, dp %.6g", p.radius_target,
                    p.radius_measured, p.dp);
      std::cout << "      " << buf << "\n";
    }
    std::snprintf(buf, sizeof buf, "slope %.6g vs sigma %.6g (err %.2f%%)",
                  r.slope, r.sigma_in, 100 * r.rel_err);
    ok &= report("laplace pressure slope", r.rel_err < 0.05, buf);
  } else if (name == "oscillation") {
    OscillationOptions o;
    const OscillationResult r = oscillation_case(o, &pool);
    std::snprintf(buf, sizeof buf,
                  "period %.1f vs damped theory %.1f (err %.2f%%)",
                  r.period_measured, r.theory.period, 100 * r.rel_err);
    ok &= report("oscillation period", r.rel_err < 0.10, buf);
  } else if (name == "head-on") {
    HeadOnOptions off_opts;
    off_opts.nci_strength = 0.0;
    const HeadOnResult merged = head_on_case(off_opts, &pool);
    HeadOnOptions on_opts;
    on_opts.nci_strength = 0.1;
    const HeadOnResult kept = head_on_case(on_opts, &pool);
    std::snprintf(buf, sizeof buf,
                  "We %.2f: %d component(s) without forcing, %d with",
                  merged.weber, merged.components_final,
                  kept.components_final);
    ok &= report("head-on near-contact rebound",
                 merged.components_final == 1 && kept.components_final == 2,
                 buf);
  } else {
    std::cerr << "unknown case '" << name
              << "' (cavity, taylor-green, laplace, oscillation, head-on)\n";
    return 2;
  }
  return ok ? 0 : 1;
}

int cmd_bench(const std::string& cfg_path, int cli_workers) {
  const Config c = load_config(cfg_path);
  WorkerPool pool(resolve_workers(cli_workers, c.workers));
  const GridDims g{c.nx, c.ny, c.nz};
  CollisionParams<Scalar> prm;
  prm.omega = Scalar(c.omega);
  const BenchResult r = dispatch_lattice(c.lattice, [&](auto tag) {
    using Lat = typename decltype(tag)::type;
    return run_benchmark<Lat, Scalar>(g, prm, c.steps, c.warmup, &pool);
  });
  MachineModel m;
  m.peak_flops = c.peak_flops;
  m.peak_bandwidth = c.peak_bandwidth;
  const auto j = bench_summary(r, m);
  std::cout << j.dump(2) << "\n";
  if (!c.output.empty()) {
    std::ofstream os(c.output + ".json");
    if (!os) throw std::runtime_error("cannot open " + c.output + ".json");
    os << j.dump(2) << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"shared-memory lattice Boltzmann solver with a fused "
               "stream-collide kernel"};
  app.require_subcommand(1);

  std::string run_cfg, bench_cfg, case_name;
  std::string data_dir = "data";
  int workers = 0;

  auto* run = app.add_subcommand("run", "advance a configuration");
  run->add_option("config", run_cfg, "configuration file")
      ->required()
      ->check(CLI::ExistingFile);
  run->add_option("--workers", workers, "worker thread count");

  auto* val = app.add_subcommand("validate", "run a verification case");
  val->add_option("case", case_name,
                  "cavity | taylor-green | laplace | oscillation | head-on")
      ->required();
  val->add_option("--data", data_dir, "reference table directory");
  val->add_option("--workers", workers, "worker thread count");

  auto* ben = app.add_subcommand("bench", "time the fused kernel");
  ben->add_option("config", bench_cfg, "configuration file")
      ->required()
      ->check(CLI::ExistingFile);
  ben->add_option("--workers", workers, "worker thread count");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(run_cfg, workers);
    if (val->parsed()) return cmd_validate(case_name, data_dir, workers);
    if (ben->parsed()) return cmd_bench(bench_cfg, workers);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
