#include "p2m/camera.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace p2m {

Intrinsics Intrinsics::from_fov(double fov_deg, const Vec2& image_size) {
  if (fov_deg <= 0 || fov_deg >= 180) throw std::invalid_argument("fov_deg out of (0, 180)");
  Intrinsics k;
  k.fov_deg = fov_deg;
  k.image_size = image_size;
  k.focal = 0.5 * image_size.y() / std::tan(0.5 * fov_deg * M_PI / 180.0);
  k.principal_point = 0.5 * image_size;
  return k;
}

bool Intrinsics::consistent(double tol) const {
  if (focal <= 0) return false;
  const double expected = 0.5 * image_size.y() / std::tan(0.5 * fov_deg * M_PI / 180.0);
  return std::abs(expected - focal) <= tol * std::max(1.0, focal);
}

Extrinsics Extrinsics::look_at(const Vec3& eye, const Vec3& target) {
  Vec3 z = target - eye;
  const double len = z.norm();
  if (len < 1e-12) throw std::invalid_argument("look_at: eye equals target");
  z /= len;
  Vec3 up = std::abs(z.y()) > 0.999999 ? Vec3(1, 0, 0) : Vec3(0, 1, 0);
  Vec3 x = up.cross(z).normalized();
  Vec3 y = z.cross(x);
  Extrinsics e;
  e.R.row(0) = x;
  e.R.row(1) = y;
  e.R.row(2) = z;
  e.T = -e.R * eye;
  return e;
}

Projection project_point(const Vec3& point, const Intrinsics& intr, const Extrinsics& extr) {
  Projection out;
  const Vec3 pc = extr.R * point + extr.T;
  out.depth = pc.z();
  if (pc.z() <= 0) return out;
  out.pixel = intr.focal * Vec2(pc.x() / pc.z(), pc.y() / pc.z()) + intr.principal_point;
  out.valid = true;
  return out;
}

std::vector<Projection> project(const std::vector<Vec3>& points, const Intrinsics& intr,
                                const Extrinsics& extr) {
  std::vector<Projection> out(points.size());
  for (size_t i = 0; i < points.size(); ++i) out[i] = project_point(points[i], intr, extr);
  return out;
}

Vec3 lift_point(const Vec2& pixel, double depth, const Intrinsics& intr, const Extrinsics& extr) {
  if (depth <= 0) throw std::invalid_argument("lift_point: depth must be positive");
  const Vec2 n = (pixel - intr.principal_point) / intr.focal;
  const Vec3 pc(n.x() * depth, n.y() * depth, depth);
  return extr.R.transpose() * (pc - extr.T);
}

std::vector<Vec3> box_filter_track(const std::vector<Vec3>& track, int half_window) {
  std::vector<Vec3> out(track.size());
  const int n = static_cast<int>(track.size());
  for (int i = 0; i < n; ++i) {
    const int lo = std::max(0, i - half_window);
    const int hi = std::min(n - 1, i + half_window);
    Vec3 acc = Vec3::Zero();
    for (int j = lo; j <= hi; ++j) acc += track[j];
    out[i] = acc / (hi - lo + 1);
  }
  return out;
}

namespace {

double smoothstep(double u) { return u * u * (3.0 - 2.0 * u); }

// Piecewise-smooth interpolation over equally spaced waypoint values.
double waypoint_interp(const std::vector<double>& values, double s) {
  const int segs = static_cast<int>(values.size()) - 1;
  if (segs <= 0) return values[0];
  const double x = std::clamp(s, 0.0, 1.0) * segs;
  const int k = std::min(static_cast<int>(x), segs - 1);
  return values[k] + (values[k + 1] - values[k]) * smoothstep(x - k);
}

}  // namespace

CameraTrajectory sample_trajectory(std::uint64_t rng_seed, int num_frames,
                                   const std::vector<Vec3>& subject_centroid_track, double fps,
                                   const TrajectoryRanges& ranges) {
  if (num_frames < 1) throw std::invalid_argument("sample_trajectory: num_frames must be >= 1");
  if (static_cast<int>(subject_centroid_track.size()) != num_frames)
    throw std::invalid_argument("sample_trajectory: centroid track length != num_frames");

  std::mt19937_64 rng(rng_seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * u01(rng); };

  CameraTrajectory traj;
  traj.intrinsics =
      Intrinsics::from_fov(uniform(ranges.fov_min_deg, ranges.fov_max_deg), ranges.image_size);

  const int wp = std::max(2, ranges.waypoints);
  std::vector<double> azimuth(wp), dist(wp), height(wp);
  for (int k = 0; k < wp; ++k) {
    azimuth[k] = uniform(0.0, 2.0 * M_PI);
    dist[k] = uniform(ranges.dist_min, ranges.dist_max);
    height[k] = uniform(ranges.height_min, ranges.height_max);
    // keep consecutive azimuths on the short way around
    if (k > 0) azimuth[k] = azimuth[k - 1] + std::remainder(azimuth[k] - azimuth[k - 1], 2.0 * M_PI);
  }

  const int half_window = std::max(1, static_cast<int>(std::lround(0.5 * fps)));
  const std::vector<Vec3> target = box_filter_track(subject_centroid_track, half_window);

  constexpr double kMinRadius = 0.3;  // keeps the horizontal placement well posed
  traj.frames.resize(num_frames);
  for (int f = 0; f < num_frames; ++f) {
    const double s = num_frames == 1 ? 0.0 : static_cast<double>(f) / (num_frames - 1);
    const double a = waypoint_interp(azimuth, s);
    const double d = waypoint_interp(dist, s);
    const double h = waypoint_interp(height, s);
    const Vec3& c = target[f];
    const double dy = h - c.y();
    const double r2 = d * d - dy * dy;
    const double r = std::sqrt(std::max(r2, kMinRadius * kMinRadius));
    const Vec3 eye(c.x() + r * std::sin(a), h, c.z() + r * std::cos(a));
    traj.frames[f] = Extrinsics::look_at(eye, c);
  }
  return traj;
}

}  // namespace p2m
