#pragma once

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <istream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "tslb/lattice.hpp"

namespace tslb {

/// Run description parsed from `key = value` lines ('#' starts a comment).
/// Exactly one of omega / tau / nu must be given; the other forms are
/// converted on the spot so the struct always carries omega.
struct Config {
  // discretisation
  LatticeKind lattice = LatticeKind::D2Q9;
  int nx = 64, ny = 64, nz = 1;
  long steps = 1000;
  double omega = 1.0;

  // fluid(s)
  int components = 1;
  double sigma = 0.01;
  double beta = 0.7;
  double nci_strength = 0.0;
  int nci_reach = 3;
  double nci_eps_bulk = 0.02;  // |phi| window treated as pure bulk

  // setup
  std::string boundary = "periodic";  // periodic | box | cavity
  double u_lid = 0.0;
  std::string init = "rest";  // rest | shear | droplet | two-droplets
  double amplitude = 0.0;     // shear amplitude or droplet interface width
  double radius = 0.0;
  double separation = 0.0;    // centre distance, two-droplets
  double u_rel = 0.0;         // approach speed, two-droplets
  std::string mask;           // optional geometry file

  // output
  std::string output;         // file prefix; empty = no field output
  long output_every = 0;      // 0 = only final
  int workers = 0;            // 0 = TSLB_WORKERS or hardware default

  // benchmarking
  long warmup = 20;
  double peak_flops = 0.0;      // machine model, flop/s
  double peak_bandwidth = 0.0;  // byte/s

  bool operator==(const Config&) const = default;
};

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> errors)
      : std::runtime_error(join(errors)), errors_(std::move(errors)) {}
  const std::vector<std::string>& errors() const { return errors_; }

 private:
  static std::string join(const std::vector<std::string>& es) {
    std::string s;
    for (const auto& e : es) {
      if (!s.empty()) s += '\n';
      s += e;
    }
    return s;
  }
  std::vector<std::string> errors_;
};

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

inline bool parse_double(const std::string& s, double& out) {
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return end != s.c_str() && *end == '\0';
}

inline bool parse_long(const std::string& s, long& out) {
  char* end = nullptr;
  out = std::strtol(s.c_str(), &end, 10);
  return end != s.c_str() && *end == '\0';
}

inline std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

/// Parses a whole stream, collecting every problem (with its line number)
/// before throwing, so a broken file reports all its errors at once.
inline Config parse_config(std::istream& in,
                           const std::string& source = "config") {
  Config c;
  std::vector<std::string> errors;
  std::map<std::string, int> seen;  // key -> first line
  int viscosity_keys = 0;

  auto err = [&](int line, const std::string& msg) {
    errors.push_back(source + ":" + std::to_string(line) + ": " + msg);
  };

  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      err(lineno, "expected 'key = value', got '" + line + "'");
      continue;
    }
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string val = detail::trim(line.substr(eq + 1));
    if (key.empty() || val.empty()) {
      err(lineno, "empty key or value");
      continue;
    }
    if (auto it = seen.find(key); it != seen.end()) {
      err(lineno, "duplicate key '" + key + "' (first set on line " +
                      std::to_string(it->second) + ")");
      continue;
    }
    seen[key] = lineno;

    auto want_double = [&](double& dst) {
      double v;
      if (detail::parse_double(val, v))
        dst = v;
      else
        err(lineno, "'" + key + "' expects a number, got '" + val + "'");
    };
    auto want_long = [&](long& dst) {
      long v;
      if (detail::parse_long(val, v))
        dst = v;
      else
        err(lineno, "'" + key + "' expects an integer, got '" + val + "'");
    };
    auto want_int = [&](int& dst) {
      long v = dst;  // keep the previous value when parsing fails
      want_long(v);
      dst = int(v);
    };

    if (key == "lattice") {
      if (val == "d2q9")
        c.lattice = LatticeKind::D2Q9;
      else if (val == "d3q19")
        c.lattice = LatticeKind::D3Q19;
      else
        err(lineno, "'lattice' must be d2q9 or d3q19, got '" + val + "'");
    } else if (key == "nx") {
      want_int(c.nx);
    } else if (key == "ny") {
      want_int(c.ny);
    } else if (key == "nz") {
      want_int(c.nz);
    } else if (key == "steps") {
      want_long(c.steps);
    } else if (key == "omega") {
      ++viscosity_keys;
      want_double(c.omega);
    } else if (key == "tau") {
      ++viscosity_keys;
      double tau = 0;
      want_double(tau);
      if (tau != 0) c.omega = 1.0 / tau;
    } else if (key == "nu") {
      ++viscosity_keys;
      double nu = 0;
      want_double(nu);
      c.omega = 1.0 / (3.0 * nu + 0.5);
    } else if (key == "components") {
      want_int(c.components);
    } else if (key == "sigma") {
      want_double(c.sigma);
    } else if (key == "beta") {
      want_double(c.beta);
    } else if (key == "nci_strength") {
      want_double(c.nci_strength);
    } else if (key == "nci_reach") {
      want_int(c.nci_reach);
    } else if (key == "nci_eps_bulk") {
      want_double(c.nci_eps_bulk);
    } else if (key == "boundary") {
      if (val == "periodic" || val == "box" || val == "cavity")
        c.boundary = val;
      else
        err(lineno, "'boundary' must be periodic, box or cavity");
    } else if (key == "u_lid") {
      want_double(c.u_lid);
    } else if (key == "init") {
      if (val == "rest" || val == "shear" || val == "droplet" ||
          val == "two-droplets")
        c.init = val;
      else
        err(lineno, "'init' must be rest, shear, droplet or two-droplets");
    } else if (key == "amplitude") {
      want_double(c.amplitude);
    } else if (key == "radius") {
      want_double(c.radius);
    } else if (key == "separation") {
      want_double(c.separation);
    } else if (key == "u_rel") {
      want_double(c.u_rel);
    } else if (key == "mask") {
      c.mask = val;
    } else if (key == "output") {
      c.output = val;
    } else if (key == "output_every") {
      want_long(c.output_every);
    } else if (key == "workers") {
      want_int(c.workers);
    } else if (key == "warmup") {
      want_long(c.warmup);
    } else if (key == "peak_flops") {
      want_double(c.peak_flops);
    } else if (key == "peak_bandwidth") {
      want_double(c.peak_bandwidth);
    } else {
      err(lineno, "unknown key '" + key + "'");
    }
  }

  if (viscosity_keys == 0)
    errors.push_back(source + ": exactly one of omega, tau, nu is required");
  else if (viscosity_keys > 1)
    errors.push_back(source + ": omega, tau and nu are mutually exclusive");
  if (c.nx < 1 || c.ny < 1 || c.nz < 1)
    errors.push_back(source + ": grid dimensions must be positive");
  if (c.components != 1 && c.components != 2)
    errors.push_back(source + ": 'components' must be 1 or 2");
  if (c.lattice == LatticeKind::D2Q9 && c.nz != 1)
    errors.push_back(source + ": d2q9 requires nz = 1");
  if (c.steps < 0)
    errors.push_back(source + ": 'steps' must be nonnegative");

  if (!errors.empty()) throw ConfigError(std::move(errors));
  return c;
}

/// Canonical text form; parse(serialize(c)) reproduces c exactly (doubles
/// are printed with 17 significant digits).
inline std::string serialize_config(const Config& c) {
  std::ostringstream os;
  os << "lattice = " << lattice_name(c.lattice) << "\n";
  os << "nx = " << c.nx << "\n";
  os << "ny = " << c.ny << "\n";
  os << "nz = " << c.nz << "\n";
  os << "steps = " << c.steps << "\n";
  os << "omega = " << detail::fmt_double(c.omega) << "\n";
  os << "components = " << c.components << "\n";
  os << "sigma = " << detail::fmt_double(c.sigma) << "\n";
  os << "beta = " << detail::fmt_double(c.beta) << "\n";
  os << "nci_strength = " << detail::fmt_double(c.nci_strength) << "\n";
  os << "nci_reach = " << c.nci_reach << "\n";
  os << "nci_eps_bulk = " << detail::fmt_double(c.nci_eps_bulk) << "\n";
  os << "boundary = " << c.boundary << "\n";
  os << "u_lid = " << detail::fmt_double(c.u_lid) << "\n";
  os << "init = " << c.init << "\n";
  os << "amplitude = " << detail::fmt_double(c.amplitude) << "\n";
  os << "radius = " << detail::fmt_double(c.radius) << "\n";
  os << "separation = " << detail::fmt_double(c.separation) << "\n";
  os << "u_rel = " << detail::fmt_double(c.u_rel) << "\n";
  if (!c.mask.empty()) os << "mask = " << c.mask << "\n";
  if (!c.output.empty()) os << "output = " << c.output << "\n";
  os << "output_every = " << c.output_every << "\n";
  os << "workers = " << c.workers << "\n";
  os << "warmup = " << c.warmup << "\n";
  os << "peak_flops = " << detail::fmt_double(c.peak_flops) << "\n";
  os << "peak_bandwidth = " << detail::fmt_double(c.peak_bandwidth) << "\n";
  return os.str();
}

}  // namespace tslb
