#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sstream>

#include "tslb/config.hpp"
#include "tslb/io.hpp"

using namespace tslb;

namespace {

Config parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in, "test");
}

std::vector<std::string> parse_errors(const std::string& text) {
  try {
    parse(text);
  } catch (const ConfigError& e) {
    return e.errors();
  }
  return {};
}

bool mentions(const std::vector<std::string>& errs, const std::string& what) {
  for (const auto& e : errs)
    if (e.find(what) != std::string::npos) return true;
  return false;
}

}  // namespace

TEST_CASE("minimal config: one viscosity key and defaults everywhere else") {
  const auto c = parse("omega = 1.2\n");
  CHECK(c.omega == 1.2);
  CHECK(c.lattice == LatticeKind::D2Q9);
  CHECK(c.nx == 64);
  CHECK(c.ny == 64);
  CHECK(c.nz == 1);
  CHECK(c.steps == 1000);
  CHECK(c.components == 1);
  CHECK(c.boundary == "periodic");
  CHECK(c.init == "rest");
  CHECK(c.workers == 0);
}

TEST_CASE("comments, blank lines and padding are tolerated") {
  const auto c = parse(
      "# run setup\n"
      "\n"
      "  lattice = d3q19   # lattice choice\n"
      "\tnx=48\n"
      "ny = 32\n"
      "nz = 24\n"
      "tau = 0.8\n");
  CHECK(c.lattice == LatticeKind::D3Q19);
  CHECK(c.nx == 48);
  CHECK(c.ny == 32);
  CHECK(c.nz == 24);
  CHECK(c.omega == doctest::Approx(1.25).epsilon(1e-15));
}

TEST_CASE("tau and nu are converted to omega on the spot") {
  CHECK(parse("tau = 1\n").omega == 1.0);
  CHECK(parse("nu = 0.16666666666666666\n").omega ==
        doctest::Approx(1.0).epsilon(1e-14));
  // nu = (1/omega - 0.5)/3 round-trips
  const double om = 0.73;
  const double nu = (1.0 / om - 0.5) / 3.0;
  CHECK(parse("nu = " + std::to_string(nu) + "\n").omega ==
        doctest::Approx(om).epsilon(1e-6));
}

TEST_CASE("viscosity must be given exactly once") {
  CHECK(mentions(parse_errors("nx = 8\n"), "exactly one of omega, tau, nu"));
  CHECK(mentions(parse_errors("omega = 1\ntau = 1\n"), "mutually exclusive"));
  CHECK(mentions(parse_errors("omega = 1\nnu = 0.1\ntau = 0.9\n"),
                 "mutually exclusive"));
}

TEST_CASE("every problem is reported with its line number") {
  const auto errs = parse_errors(
      "lattice = d5q33\n"     // line 1
      "nx = fast\n"           // line 2
      "bogus_key = 3\n"       // line 3
      "omega = 1\n"
      "omega = 2\n"           // line 5 duplicate
      "steps\n");             // line 6 no '='
  CHECK(errs.size() == 5);
  CHECK(mentions(errs, "test:1:"));
  CHECK(mentions(errs, "d2q9 or d3q19"));
  CHECK(mentions(errs, "test:2:"));
  CHECK(mentions(errs, "expects an integer"));
  CHECK(mentions(errs, "test:3:"));
  CHECK(mentions(errs, "unknown key"));
  CHECK(mentions(errs, "test:5:"));
  CHECK(mentions(errs, "duplicate key 'omega'"));
  CHECK(mentions(errs, "first set on line 4"));
  CHECK(mentions(errs, "test:6:"));
}

TEST_CASE("semantic constraints") {
  CHECK(mentions(parse_errors("omega = 1\nnx = 0\n"), "must be positive"));
  CHECK(mentions(parse_errors("omega = 1\ncomponents = 3\n"),
                 "'components' must be 1 or 2"));
  CHECK(mentions(parse_errors("omega = 1\nnz = 4\n"), "d2q9 requires nz = 1"));
  CHECK(mentions(parse_errors("omega = 1\nsteps = -5\n"), "nonnegative"));
  CHECK_NOTHROW(parse("omega = 1\nlattice = d3q19\nnz = 4\n"));
}

TEST_CASE("enumerated values are validated") {
  CHECK(mentions(parse_errors("omega = 1\nboundary = open\n"),
                 "periodic, box or cavity"));
  CHECK(mentions(parse_errors("omega = 1\ninit = vortex\n"),
                 "rest, shear, droplet or two-droplets"));
  CHECK(parse("omega = 1\ninit = two-droplets\n").init == "two-droplets");
  CHECK(parse("omega = 1\nboundary = cavity\nu_lid = 0.05\n").u_lid == 0.05);
}

TEST_CASE("serialize/parse round-trip is exact") {
  Config c;
  c.lattice = LatticeKind::D3Q19;
  c.nx = 41;
  c.ny = 23;
  c.nz = 17;
  c.steps = 123456789;
  c.omega = 1.0 / 3.0 + 1e-16;
  c.components = 2;
  c.sigma = 0.0123456789012345678;
  c.beta = 0.7;
  c.nci_strength = 1e-4;
  c.nci_reach = 5;
  c.nci_eps_bulk = 0.125;
  c.boundary = "box";
  c.u_lid = -0.07;
  c.init = "two-droplets";
  c.amplitude = 3.5;
  c.radius = 12.25;
  c.separation = 30.5;
  c.u_rel = 0.11;
  c.mask = "walls.txt";
  c.output = "out/run";
  c.output_every = 250;
  c.workers = 7;
  c.warmup = 3;
  c.peak_flops = 15e12;
  c.peak_bandwidth = 9e11;
  std::istringstream in(serialize_config(c));
  const Config back = parse_config(in, "roundtrip");
  CHECK(back == c);
}

TEST_CASE("VTK writer emits a well-formed structured-points file") {
  const GridDims g{3, 2, 1};
  FieldArray<double> rho(6);
  rho << 1.0, 1.125, 0.875, 1.0, 2.0, 0.5;
  std::vector<FieldArray<double>> mom(2);
  mom[0] = FieldArray<double>::Constant(6, 0.25);
  mom[1] = FieldArray<double>::Constant(6, -0.5);
  std::ostringstream os;
  write_vtk<double>(os, g, {{"rho", &rho}}, {{"velocity", &mom}});
  const std::string out = os.str();

  CHECK(out.find("# vtk DataFile Version 3.0\n") == 0);
  CHECK(out.find("ASCII\n") != std::string::npos);
  CHECK(out.find("DATASET STRUCTURED_POINTS\n") != std::string::npos);
  CHECK(out.find("DIMENSIONS 3 2 1\n") != std::string::npos);
  CHECK(out.find("ORIGIN 0 0 0\n") != std::string::npos);
  CHECK(out.find("SPACING 1 1 1\n") != std::string::npos);
  CHECK(out.find("POINT_DATA 6\n") != std::string::npos);
  CHECK(out.find("SCALARS rho double 1\n") != std::string::npos);
  CHECK(out.find("LOOKUP_TABLE default\n") != std::string::npos);
  // %.9e data, x-fastest: second value is node (1, 0)
  CHECK(out.find("1.125000000e+00\n") != std::string::npos);
  // vectors are zero-padded to three components
  CHECK(out.find("VECTORS velocity double\n") != std::string::npos);
  CHECK(out.find("2.500000000e-01 -5.000000000e-01 0.000000000e+00\n") !=
        std::string::npos);
  // scalars come before vectors, matching declaration order
  CHECK(out.find("SCALARS") < out.find("VECTORS"));
}

TEST_CASE("float fields are declared as float in VTK") {
  const GridDims g{2, 1, 1};
  FieldArray<float> a(2);
  a << 1.0f, 2.0f;
  std::ostringstream os;
  write_vtk<float>(os, g, {{"phi", &a}});
  CHECK(os.str().find("SCALARS phi float 1\n") != std::string::npos);
}

TEST_CASE("CSV writer: header plus %.9e rows") {
  std::ostringstream os;
  write_csv(os, {"t", "energy"}, {{0.0, 1.5}, {1.0, 0.75}});
  CHECK(os.str() ==
        "t,energy\n"
        "0.000000000e+00,1.500000000e+00\n"
        "1.000000000e+00,7.500000000e-01\n");
}

TEST_CASE("reference tables: two columns, comments, hard errors") {
  std::istringstream good(
      "# y  u\n"
      "0.0 0.5   # wall\n"
      "\n"
      "0.5 -0.2\n"
      "1.0 1.0\n");
  const auto rows = load_table(good);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0][0] == 0.0);
  CHECK(rows[0][1] == 0.5);
  CHECK(rows[1][1] == -0.2);
  CHECK(rows[2][0] == 1.0);

  std::istringstream bad("0.0 0.5\noops\n");
  CHECK_THROWS_WITH_AS(load_table(bad),
                       "table line 2: expected two numbers",
                       std::runtime_error);
}

TEST_CASE("bench summary carries the full roofline record") {
  BenchResult r;
  r.lattice = "d3q19";
  r.dims = {128, 128, 128};
  r.steps = 100;
  r.workers = 8;
  r.seconds = 2.5;
  r.glups = 0.084;
  r.mlups = 84.0;
  r.cost = count_kernel_cost(LatticeKind::D3Q19, 4);
  r.digest = 0x1234abcdull;

  const MachineModel m{15e12, 900e9};
  const auto j = bench_summary(r, m);
  CHECK(j["lattice"] == "d3q19");
  CHECK(j["dims"] == nlohmann::json({128, 128, 128}));
  CHECK(j["steps"] == 100);
  CHECK(j["workers"] == 8);
  CHECK(j["seconds"] == 2.5);
  CHECK(j["glups"] == 0.084);
  CHECK(j["flops_per_update"] == 377.0);
  CHECK(j["bytes_per_update"] == 232.0);
  CHECK(j["intensity"].get<double>() ==
        doctest::Approx(1.625).epsilon(1e-3));
  CHECK(j["roofline_bound"].get<double>() ==
        doctest::Approx(900e9 * 377.0 / 232.0).epsilon(1e-12));
  CHECK(j["machine"]["peak_flops"] == 15e12);
  CHECK(j["state_digest"] == 0x1234abcdull);

  // without a machine model the bound is explicitly null
  const auto j0 = bench_summary(r, MachineModel{});
  CHECK(j0["roofline_bound"].is_null());
  CHECK_FALSE(j0.contains("machine"));
}
