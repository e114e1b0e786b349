#ifndef HORST_COMMON_GRID_HPP
#define HORST_COMMON_GRID_HPP

#include <array>
#include <cstdint>
#include <cstdlib>

namespace horst {

/// Regular 3D grid. Storage order is z fastest, then y, then x:
/// index(ix,iy,iz) = (ix*ny + iy)*nz + iz.
struct Grid3 {
  std::array<int, 3> dims{0, 0, 0};          // nx, ny, nz
  std::array<double, 3> spacing{0, 0, 0};    // meters per axis
  std::array<double, 3> origin{0, 0, 0};     // meters

  int nx() const { return dims[0]; }
  int ny() const { return dims[1]; }
  int nz() const { return dims[2]; }
  std::int64_t size() const {
    return std::int64_t(dims[0]) * dims[1] * dims[2];
  }

  std::int64_t index(int ix, int iy, int iz) const {
    return (std::int64_t(ix) * dims[1] + iy) * dims[2] + iz;
  }
  bool contains(int ix, int iy, int iz) const {
    return ix >= 0 && ix < dims[0] && iy >= 0 && iy < dims[1] && iz >= 0 &&
           iz < dims[2];
  }
  std::array<int, 3> cell(std::int64_t idx) const {
    int iz = int(idx % dims[2]);
    std::int64_t r = idx / dims[2];
    int iy = int(r % dims[1]);
    int ix = int(r / dims[1]);
    return {ix, iy, iz};
  }
  std::array<double, 3> coord(int ix, int iy, int iz) const {
    return {origin[0] + ix * spacing[0], origin[1] + iy * spacing[1],
            origin[2] + iz * spacing[2]};
  }
  /// Physical extent per axis, (n-1)*h.
  std::array<double, 3> extent() const {
    return {(dims[0] - 1) * spacing[0], (dims[1] - 1) * spacing[1],
            (dims[2] - 1) * spacing[2]};
  }
};

} // namespace horst

#endif
