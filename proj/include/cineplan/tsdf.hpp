#ifndef CINEPLAN_TSDF_HPP_
#define CINEPLAN_TSDF_HPP_

#include <atomic>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cineplan/geometry.hpp"

namespace cineplan {

struct SphereObstacle {
  Vec3 center = Vec3::Zero();
  double radius = 0.0;
};

struct Environment {
  Vec3 bounds_min = Vec3::Zero();
  Vec3 bounds_max = Vec3::Zero();
  std::optional<double> ground_z;
  std::vector<SphereObstacle> spheres;
};

// Signed distance from p to the nearest environment surface (negative inside
// an obstacle). +infinity when the environment is empty.
double analytic_distance(const Environment& env, const Vec3& p);

// Truncated signed distance field on a uniform voxel grid. Values are stored
// as float32 in x-fastest order and clamped to [-truncation, +truncation].
// origin is the world position of voxel (0,0,0)'s center. Immutable after
// construction apart from the out-of-bounds query counter; concurrent reads
// are safe.
class TsdfGrid {
 public:
  TsdfGrid(const Vec3& origin, double resolution, int nx, int ny, int nz,
           double truncation);

  TsdfGrid(const TsdfGrid& other);
  TsdfGrid& operator=(const TsdfGrid& other);

  const Vec3& origin() const { return origin_; }
  double resolution() const { return resolution_; }
  double truncation() const { return truncation_; }
  int nx() const { return nx_; }
  int ny() const { return ny_; }
  int nz() const { return nz_; }
  std::uint64_t voxel_count() const { return values_.size(); }

  float value(int ix, int iy, int iz) const {
    return values_[index(ix, iy, iz)];
  }
  void set_value(int ix, int iy, int iz, float v) {
    values_[index(ix, iy, iz)] = v;
  }
  Vec3 voxel_center(int ix, int iy, int iz) const {
    return origin_ + resolution_ * Vec3(ix, iy, iz);
  }

  // Trilinear interpolation over the surrounding voxel centers. Queries
  // outside the interpolable region return +truncation (treat unknown space
  // as free) and bump the out-of-bounds counter.
  double distance(const Vec3& p) const;

  // Exact gradient of the trilinear interpolant at p. This matches axis
  // finite differences of distance() for any step that stays inside the
  // cell, without the cell-straddling error a fixed large step would add.
  // Out of bounds and deep free space both give a zero vector.
  Vec3 distance_gradient(const Vec3& p) const;

  std::uint64_t out_of_bounds_queries() const {
    return oob_count_.load(std::memory_order_relaxed);
  }

  const std::vector<float>& raw_values() const { return values_; }
  // Replaces the whole payload (x-fastest order); size must match.
  void set_raw_values(std::vector<float> values);

 private:
  std::size_t index(int ix, int iy, int iz) const {
    return static_cast<std::size_t>(ix) +
           static_cast<std::size_t>(nx_) *
               (static_cast<std::size_t>(iy) +
                static_cast<std::size_t>(ny_) * static_cast<std::size_t>(iz));
  }
  bool locate(const Vec3& p, int cell[3], double frac[3]) const;

  Vec3 origin_;
  double resolution_;
  double truncation_;
  int nx_, ny_, nz_;
  std::vector<float> values_;
  mutable std::atomic<std::uint64_t> oob_count_{0};
};

struct TsdfBuildParams {
  double resolution = 0.25;
  double truncation = 3.0;
  std::uint64_t max_voxels = 100'000'000;
};

// Samples the analytic environment distance at voxel centers. The grid covers
// env bounds with a one-voxel pad on every side so interpolation stays valid
// across the whole bounded region. Throws std::invalid_argument on a
// non-positive resolution/truncation or when the grid would exceed max_voxels.
TsdfGrid build_tsdf(const Environment& env, const TsdfBuildParams& params);

// Binary grid file: magic "TSDF", u32 version, f64 origin xyz, f64 resolution,
// f64 truncation, u32 dims xyz, then nx*ny*nz float32 values in x-fastest
// order, little-endian throughout. Errors throw std::runtime_error.
void save_tsdf(const TsdfGrid& grid, const std::string& path);
TsdfGrid load_tsdf(const std::string& path);

}  // namespace cineplan

#endif  // CINEPLAN_TSDF_HPP_
