#pragma once

#include <array>
#include <cstdint>
#include <istream>
#include <stdexcept>
#include <string>
#include <vector>

#include "tslb/fields.hpp"
#include "tslb/lattice.hpp"

namespace tslb {

/// Walls sit on the box faces, halfway between the outermost node layer and
/// the first ghost layer that a departing population would reach. Node i
/// therefore represents the cell centre (i + 0.5) / nx.
enum class FaceKind { Periodic, NoSlipWall, MovingWall };

enum FaceId { XMin = 0, XMax = 1, YMin = 2, YMax = 3, ZMin = 4, ZMax = 5 };

template <typename T>
struct Face {
  FaceKind kind = FaceKind::Periodic;
  std::array<T, 3> u_wall = {T(0), T(0), T(0)};
};

template <typename T>
struct BoundarySpec {
  std::array<Face<T>, 6> faces;

  static BoundarySpec all_periodic() { return BoundarySpec{}; }

  /// Closed box, every face a resting wall.
  static BoundarySpec closed_box() {
    BoundarySpec s;
    for (auto& f : s.faces) f.kind = FaceKind::NoSlipWall;
    return s;
  }

  /// Closed box with the y-max face sliding at u_lid in +x.
  static BoundarySpec lid_cavity(T u_lid) {
    BoundarySpec s = closed_box();
    s.faces[YMax].kind = FaceKind::MovingWall;
    s.faces[YMax].u_wall = {u_lid, T(0), T(0)};
    return s;
  }
};

/// Per-node geometry the kernels consume. slow_mask bit a is set when the
/// push along direction a cannot use the plain linear offset: the target
/// wraps around a periodic face, lies behind a wall, or is a solid node.
/// Interior nodes have mask 0 and take the branch-free fast path.
struct NodeGeometry {
  GridDims dims;
  std::vector<std::uint8_t> solid;
  std::vector<std::uint32_t> slow_mask;
  std::size_t n_fluid = 0;
};

template <typename T, class Lat>
NodeGeometry classify_nodes(const GridDims& g, const BoundarySpec<T>& spec,
                            const std::vector<std::uint8_t>& solid = {}) {
  static_assert(Lat::q <= 32, "slow_mask holds one bit per direction");
  if (!solid.empty() && solid.size() != g.n())
    throw std::invalid_argument("classify_nodes: mask size mismatch");
  // Periodicity is a property of an axis, not of one face: with a wall on
  // one side and a wrap on the other, populations entering through the wrap
  // would have no writer (the far side bounces instead of pushing), breaking
  // the one-writer-per-slot rule.
  for (int ax = 0; ax < 3; ++ax) {
    const bool lo = spec.faces[2 * ax].kind == FaceKind::Periodic;
    const bool hi = spec.faces[2 * ax + 1].kind == FaceKind::Periodic;
    if (lo != hi)
      throw std::invalid_argument(
          "classify_nodes: axis " + std::to_string(ax) +
          " mixes a periodic face with a wall");
  }
  NodeGeometry geo;
  geo.dims = g;
  geo.solid = solid.empty() ? std::vector<std::uint8_t>(g.n(), 0) : solid;
  geo.slow_mask.assign(g.n(), 0);

  const int nd[3] = {g.nx, g.ny, g.nz};
  for (int k = 0; k < g.nz; ++k)
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        const std::size_t idx = linear_index(g, i, j, k);
        if (geo.solid[idx]) continue;
        ++geo.n_fluid;
        std::uint32_t mask = 0;
        for (int a = 1; a < Lat::q; ++a) {
          const int tc[3] = {i + Lat::c[a][0], j + Lat::c[a][1],
                             k + Lat::c[a][2]};
          bool slow = false;
          int wc[3];
          for (int ax = 0; ax < 3; ++ax) {
            wc[ax] = tc[ax];
            if (tc[ax] < 0 || tc[ax] >= nd[ax]) {
              slow = true;  // wraps or bounces, either way off the fast path
              wc[ax] = wrap(tc[ax], nd[ax]);
            }
          }
          if (!slow && geo.solid[linear_index(g, wc[0], wc[1], wc[2])])
            slow = true;
          if (slow) mask |= (std::uint32_t(1) << a);
        }
        geo.slow_mask[idx] = mask;
      }
  return geo;
}

/// Resolves a slow-path push target. Returns true if the population leaves
/// the fluid (wall face or solid target) and must bounce back; in that case
/// u_wall accumulates the velocities of all crossed wall faces, so corner
/// diagonals pick up the moving-lid term. Otherwise target_idx holds the
/// wrapped destination.
template <typename T, class Lat>
inline bool resolve_push(const GridDims& g, const BoundarySpec<T>& spec,
                         const std::vector<std::uint8_t>& solid, int i, int j,
                         int k, int a, std::size_t& target_idx,
                         std::array<T, 3>& u_wall) {
  const int c[3] = {Lat::c[a][0], Lat::c[a][1], Lat::c[a][2]};
  const int nd[3] = {g.nx, g.ny, g.nz};
  int tc[3] = {i + c[0], j + c[1], k + c[2]};
  bool bounce = false;
  u_wall = {T(0), T(0), T(0)};
  for (int ax = 0; ax < 3; ++ax) {
    if (tc[ax] < 0 || tc[ax] >= nd[ax]) {
      const Face<T>& f = spec.faces[2 * ax + (tc[ax] < 0 ? 0 : 1)];
      if (f.kind == FaceKind::Periodic) {
        tc[ax] = wrap(tc[ax], nd[ax]);
      } else {
        bounce = true;
        for (int d = 0; d < 3; ++d) u_wall[d] += f.u_wall[d];
      }
    }
  }
  if (bounce) return true;
  const std::size_t t = linear_index(g, tc[0], tc[1], tc[2]);
  if (solid[t]) return true;  // resting obstacle, u_wall stays zero
  target_idx = t;
  return false;
}

/// Plain-text geometry mask: '.' fluid, '#' solid. Rows are listed top to
/// bottom (first row is y = ny-1), matching how the domain is drawn; 3D
/// files hold nz such blocks, k = 0 first, separated by blank lines.
inline std::vector<std::uint8_t> load_mask(std::istream& in,
                                           const GridDims& g) {
  std::vector<std::uint8_t> solid(g.n(), 0);
  std::string line;
  int k = 0, row = 0;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' '))
      line.pop_back();
    if (line.empty()) {
      if (row > 0) {
        if (row != g.ny)
          throw std::runtime_error("mask: slab has " + std::to_string(row) +
                                   " rows, expected " + std::to_string(g.ny));
        ++k;
        row = 0;
      }
      continue;
    }
    if (int(line.size()) != g.nx)
      throw std::runtime_error("mask: row width " +
                               std::to_string(line.size()) + ", expected " +
                               std::to_string(g.nx));
    if (k >= g.nz || row >= g.ny) throw std::runtime_error("mask: too many rows");
    const int j = g.ny - 1 - row;
    for (int i = 0; i < g.nx; ++i) {
      const char ch = line[std::size_t(i)];
      if (ch != '.' && ch != '#')
        throw std::runtime_error(std::string("mask: bad character '") + ch +
                                 "'");
      solid[linear_index(g, i, j, k)] = (ch == '#') ? 1 : 0;
    }
    ++row;
  }
  if (row > 0 && row != g.ny)
    throw std::runtime_error("mask: final slab incomplete");
  if (row > 0) ++k;
  if (k != g.nz)
    throw std::runtime_error("mask: " + std::to_string(k) +
                             " slabs, expected " + std::to_string(g.nz));
  return solid;
}

}  // namespace tslb
