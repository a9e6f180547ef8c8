#include "cineplan/tsdf.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace cineplan {

double analytic_distance(const Environment& env, const Vec3& p) {
  double d = std::numeric_limits<double>::infinity();
  for (const SphereObstacle& s : env.spheres) {
    d = std::min(d, (p - s.center).norm() - s.radius);
  }
  if (env.ground_z) d = std::min(d, p.z() - *env.ground_z);
  return d;
}

TsdfGrid::TsdfGrid(const Vec3& origin, double resolution, int nx, int ny, int nz,
                   double truncation)
    : origin_(origin),
      resolution_(resolution),
      truncation_(truncation),
      nx_(nx),
      ny_(ny),
      nz_(nz) {
  if (!(resolution > 0.0)) throw std::invalid_argument("tsdf resolution must be positive");
  if (!(truncation > 0.0)) throw std::invalid_argument("tsdf truncation must be positive");
  if (nx < 2 || ny < 2 || nz < 2) throw std::invalid_argument("tsdf needs at least 2 voxels per axis");
  values_.assign(static_cast<std::size_t>(nx) * ny * nz,
                 static_cast<float>(truncation));
}

TsdfGrid::TsdfGrid(const TsdfGrid& other)
    : origin_(other.origin_),
      resolution_(other.resolution_),
      truncation_(other.truncation_),
      nx_(other.nx_),
      ny_(other.ny_),
      nz_(other.nz_),
      values_(other.values_),
      oob_count_(other.out_of_bounds_queries()) {}

TsdfGrid& TsdfGrid::operator=(const TsdfGrid& other) {
  if (this != &other) {
    origin_ = other.origin_;
    resolution_ = other.resolution_;
    truncation_ = other.truncation_;
    nx_ = other.nx_;
    ny_ = other.ny_;
    nz_ = other.nz_;
    values_ = other.values_;
    oob_count_.store(other.out_of_bounds_queries(), std::memory_order_relaxed);
  }
  return *this;
}

void TsdfGrid::set_raw_values(std::vector<float> values) {
  if (values.size() != values_.size()) {
    throw std::invalid_argument("tsdf payload size does not match grid dimensions");
  }
  values_ = std::move(values);
}

bool TsdfGrid::locate(const Vec3& p, int cell[3], double frac[3]) const {
  const Vec3 g = (p - origin_) / resolution_;
  const int dims[3] = {nx_, ny_, nz_};
  for (int a = 0; a < 3; ++a) {
    if (!(g[a] >= 0.0 && g[a] <= dims[a] - 1)) return false;
    int i = static_cast<int>(std::floor(g[a]));
    i = std::min(i, dims[a] - 2);
    cell[a] = i;
    frac[a] = g[a] - i;
  }
  return true;
}

double TsdfGrid::distance(const Vec3& p) const {
  int c[3];
  double f[3];
  if (!locate(p, c, f)) {
    oob_count_.fetch_add(1, std::memory_order_relaxed);
    return truncation_;
  }
  double v = 0.0;
  for (int dz = 0; dz < 2; ++dz) {
    for (int dy = 0; dy < 2; ++dy) {
      for (int dx = 0; dx < 2; ++dx) {
        const double w = (dx ? f[0] : 1.0 - f[0]) * (dy ? f[1] : 1.0 - f[1]) *
                         (dz ? f[2] : 1.0 - f[2]);
        v += w * values_[index(c[0] + dx, c[1] + dy, c[2] + dz)];
      }
    }
  }
  return v;
}

Vec3 TsdfGrid::distance_gradient(const Vec3& p) const {
  int c[3];
  double f[3];
  if (!locate(p, c, f)) {
    oob_count_.fetch_add(1, std::memory_order_relaxed);
    return Vec3::Zero();
  }
  double corner[2][2][2];
  for (int dz = 0; dz < 2; ++dz)
    for (int dy = 0; dy < 2; ++dy)
      for (int dx = 0; dx < 2; ++dx)
        corner[dx][dy][dz] = values_[index(c[0] + dx, c[1] + dy, c[2] + dz)];

  const double fx = f[0], fy = f[1], fz = f[2];
  auto lerp = [](double a, double b, double t) { return a + (b - a) * t; };

  // Differentiate the trilinear form along each axis: interpolate the corner
  // differences over the other two axes.
  const double dx_val =
      lerp(lerp(corner[1][0][0] - corner[0][0][0], corner[1][1][0] - corner[0][1][0], fy),
           lerp(corner[1][0][1] - corner[0][0][1], corner[1][1][1] - corner[0][1][1], fy),
           fz);
  const double dy_val =
      lerp(lerp(corner[0][1][0] - corner[0][0][0], corner[1][1][0] - corner[1][0][0], fx),
           lerp(corner[0][1][1] - corner[0][0][1], corner[1][1][1] - corner[1][0][1], fx),
           fz);
  const double dz_val =
      lerp(lerp(corner[0][0][1] - corner[0][0][0], corner[1][0][1] - corner[1][0][0], fx),
           lerp(corner[0][1][1] - corner[0][1][0], corner[1][1][1] - corner[1][1][0], fx),
           fy);
  return Vec3(dx_val, dy_val, dz_val) / resolution_;
}

TsdfGrid build_tsdf(const Environment& env, const TsdfBuildParams& params) {
  if (!(params.resolution > 0.0)) throw std::invalid_argument("tsdf resolution must be positive");
  if (!(params.truncation > 0.0)) throw std::invalid_argument("tsdf truncation must be positive");
  const Vec3 span = env.bounds_max - env.bounds_min;
  if (!(span.minCoeff() > 0.0)) throw std::invalid_argument("environment bounds are empty");

  int dims[3];
  for (int a = 0; a < 3; ++a) {
    dims[a] = static_cast<int>(std::ceil(span[a] / params.resolution)) + 3;
  }
  const std::uint64_t total = static_cast<std::uint64_t>(dims[0]) * dims[1] * dims[2];
  if (total > params.max_voxels) {
    throw std::invalid_argument("tsdf grid of " + std::to_string(total) +
                                " voxels exceeds the cap of " +
                                std::to_string(params.max_voxels));
  }

  const Vec3 origin = env.bounds_min - Vec3::Constant(params.resolution);
  TsdfGrid grid(origin, params.resolution, dims[0], dims[1], dims[2], params.truncation);
  for (int iz = 0; iz < dims[2]; ++iz) {
    for (int iy = 0; iy < dims[1]; ++iy) {
      for (int ix = 0; ix < dims[0]; ++ix) {
        const double d = analytic_distance(env, grid.voxel_center(ix, iy, iz));
        grid.set_value(ix, iy, iz,
                       static_cast<float>(std::clamp(d, -params.truncation,
                                                     params.truncation)));
      }
    }
  }
  return grid;
}

namespace {

constexpr char kMagic[4] = {'T', 'S', 'D', 'F'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void write_raw(std::ofstream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_raw(std::ifstream& in, const char* what) {
  T v;
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw std::runtime_error(std::string("tsdf file truncated reading ") + what);
  return v;
}

}  // namespace

void save_tsdf(const TsdfGrid& grid, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out.write(kMagic, 4);
  write_raw(out, kVersion);
  for (int a = 0; a < 3; ++a) write_raw(out, grid.origin()[a]);
  write_raw(out, grid.resolution());
  write_raw(out, grid.truncation());
  write_raw(out, static_cast<std::uint32_t>(grid.nx()));
  write_raw(out, static_cast<std::uint32_t>(grid.ny()));
  write_raw(out, static_cast<std::uint32_t>(grid.nz()));
  out.write(reinterpret_cast<const char*>(grid.raw_values().data()),
            static_cast<std::streamsize>(grid.raw_values().size() * sizeof(float)));
  if (!out) throw std::runtime_error("short write to " + path);
}

TsdfGrid load_tsdf(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0) {
    throw std::runtime_error(path + " is not a tsdf file (bad magic)");
  }
  const auto version = read_raw<std::uint32_t>(in, "version");
  if (version != kVersion) {
    throw std::runtime_error("unsupported tsdf version " + std::to_string(version));
  }
  Vec3 origin;
  for (int a = 0; a < 3; ++a) origin[a] = read_raw<double>(in, "origin");
  const double resolution = read_raw<double>(in, "resolution");
  const double truncation = read_raw<double>(in, "truncation");
  const auto nx = read_raw<std::uint32_t>(in, "dims");
  const auto ny = read_raw<std::uint32_t>(in, "dims");
  const auto nz = read_raw<std::uint32_t>(in, "dims");

  TsdfGrid grid(origin, resolution, static_cast<int>(nx), static_cast<int>(ny),
                static_cast<int>(nz), truncation);
  std::vector<float> values(static_cast<std::size_t>(nx) * ny * nz);
  in.read(reinterpret_cast<char*>(values.data()),
          static_cast<std::streamsize>(values.size() * sizeof(float)));
  if (static_cast<std::size_t>(in.gcount()) != values.size() * sizeof(float)) {
    throw std::runtime_error(path + " payload does not match its declared dimensions");
  }
  grid.set_raw_values(std::move(values));
  return grid;
}

}  // namespace cineplan
