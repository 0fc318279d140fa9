#include "socnav/features.hpp"

#include <algorithm>
#include <cmath>

#include "socnav/error.hpp"

namespace socnav {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// 1-D squared distance transform of a sampled function (lower envelope of
// parabolas). f holds squared distances in cell units, +inf where no site.
void dt_1d(const std::vector<double>& f, std::vector<double>& d, std::vector<int>& v, std::vector<double>& z) {
  const int n = static_cast<int>(f.size());
  int k = -1;
  for (int q = 0; q < n; ++q) {
    if (f[q] == kInf) continue;
    if (k < 0) {
      k = 0;
      v[0] = q;
      z[0] = -kInf;
      z[1] = kInf;
      continue;
    }
    double s;
    while (true) {
      const int p = v[k];
      s = ((f[q] + double(q) * q) - (f[p] + double(p) * p)) / (2.0 * q - 2.0 * p);
      if (s <= z[k]) {
        --k;
        if (k < 0) break;
      } else {
        break;
      }
    }
    ++k;
    v[k] = q;
    z[k] = k == 0 ? -kInf : s;
    z[k + 1] = kInf;
  }
  if (k < 0) {
    std::fill(d.begin(), d.end(), kInf);
    return;
  }
  int j = 0;
  for (int q = 0; q < n; ++q) {
    while (z[j + 1] < q) ++j;
    const double diff = double(q) - v[j];
    d[q] = diff * diff + f[v[j]];
  }
}

}  // namespace

DistanceField DistanceField::build(const OccupancyGrid& grid) {
  return build_from_sites(grid.width, grid.height, grid.resolution, grid.cells);
}

DistanceField DistanceField::build_from_sites(int width, int height, double resolution,
                                              const std::vector<std::uint8_t>& site) {
  DistanceField out;
  out.width_ = width;
  out.height_ = height;
  out.resolution_ = resolution;
  const std::size_t n = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  std::vector<double> sq(n);
  for (std::size_t i = 0; i < n; ++i) sq[i] = site[i] ? 0.0 : kInf;

  const int m = std::max(width, height);
  std::vector<double> f(m), d(m), z(m + 1);
  std::vector<int> v(m);

  // columns
  f.resize(height);
  d.resize(height);
  for (int x = 0; x < width; ++x) {
    for (int y = 0; y < height; ++y) f[y] = sq[static_cast<std::size_t>(y) * width + x];
    dt_1d(f, d, v, z);
    for (int y = 0; y < height; ++y) sq[static_cast<std::size_t>(y) * width + x] = d[y];
  }
  // rows
  f.resize(width);
  d.resize(width);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) f[x] = sq[static_cast<std::size_t>(y) * width + x];
    dt_1d(f, d, v, z);
    for (int x = 0; x < width; ++x) sq[static_cast<std::size_t>(y) * width + x] = d[x];
  }

  out.dist_.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.dist_[i] = sq[i] == kInf ? kInf : std::sqrt(sq[i]) * resolution;
  return out;
}

double DistanceField::at(Vec2 p) const {
  const int cx = std::clamp(static_cast<int>(std::floor(p.x / resolution_)), 0, width_ - 1);
  const int cy = std::clamp(static_cast<int>(std::floor(p.y / resolution_)), 0, height_ - 1);
  return at(cx, cy);
}

void FeatureConfig::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw Error(errc::invalid_config, name, "must be a positive finite number");
  };
  positive(sigma_front, "sigma_front");
  positive(sigma_back, "sigma_back");
  positive(sigma_side, "sigma_side");
  positive(sigma_side_lon, "sigma_side_lon");
  positive(d_clamp, "d_clamp");
}

std::array<double, 3> pedestrian_features(const std::vector<Pedestrian>& pedestrians, Vec2 p,
                                          const FeatureConfig& config) {
  std::array<double, 3> out{0.0, 0.0, 0.0};
  auto gauss = [](double u, double su, double w, double sw) {
    return std::exp(-(u * u / (2.0 * su * su) + w * w / (2.0 * sw * sw)));
  };
  for (const Pedestrian& ped : pedestrians) {
    const double dx = p.x - ped.x;
    const double dy = p.y - ped.y;
    const double c = std::cos(ped.heading);
    const double s = std::sin(ped.heading);
    const double fwd = dx * c + dy * s;
    const double left = -dx * s + dy * c;
    if (fwd >= 0.0) {
      out[0] = std::max(out[0], gauss(fwd, config.sigma_front, left, config.sigma_side));
    } else {
      out[1] = std::max(out[1], gauss(fwd, config.sigma_back, left, config.sigma_side));
    }
    if (config.lateral_symmetric || left <= 0.0) {
      out[2] = std::max(out[2], gauss(fwd, config.sigma_side_lon, left, config.sigma_side));
    }
  }
  return out;
}

FeatureVector extract_features(const Scenario& scenario, const DistanceField& field, Vec2 p,
                               const FeatureConfig& config) {
  FeatureVector f{};
  f[0] = std::clamp(distance(p, scenario.goal) / scenario.grid.diagonal(), 0.0, 1.0);
  f[1] = std::min(field.at(p), config.d_clamp) / config.d_clamp;
  const auto ped = pedestrian_features(scenario.pedestrians, p, config);
  f[2] = ped[0];
  f[3] = ped[1];
  f[4] = ped[2];
  return f;
}

}  // namespace socnav
