#include "cadseq/render.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "cadseq/error.hpp"

namespace cadseq {

Image Image::filled(int width, int height, float value) {
  Image img;
  img.width = width;
  img.height = height;
  img.pixels.assign(static_cast<std::size_t>(width) * height, value);
  return img;
}

namespace {

constexpr double kNear = 1e-3;

struct View {
  Vec3 eye;
  Vec3 forward;
  Vec3 right;
  Vec3 up;
  double focal = 0.0;
  double cx = 0.0;
  double cy = 0.0;
};

struct Projected {
  double x, y;   // pixel coordinates
  double inv_z;  // 1 / camera depth
};

View make_view(const Camera& camera, int width, int height) {
  Vec3 dir = camera.target - camera.eye;
  if (length(dir) == 0.0) throw Error(ErrorCode::RangeError, "camera eye equals target");
  View v;
  v.eye = camera.eye;
  v.forward = normalized(dir);
  Vec3 side = cross(v.forward, camera.up);
  if (length(side) < 1e-12) throw Error(ErrorCode::RangeError, "camera up is parallel to the view direction");
  v.right = normalized(side);
  v.up = cross(v.right, v.forward);
  double half_fov = camera.fov_y_deg * std::numbers::pi / 360.0;
  if (!(half_fov > 0.0 && half_fov < std::numbers::pi / 2)) throw Error(ErrorCode::RangeError, "field of view out of range");
  v.focal = 0.5 * height / std::tan(half_fov);
  v.cx = 0.5 * width;
  v.cy = 0.5 * height;
  return v;
}

}  // namespace

Image render(const SolidScene& scene, const Camera& camera, int width, int height) {
  if (width <= 0 || height <= 0 || width > 8192 || height > 8192) {
    throw Error(ErrorCode::RangeError, "image size out of range");
  }
  const View view = make_view(camera, width, height);
  Image img = Image::filled(width, height, kBackground);
  std::vector<double> depth(img.pixels.size(), 0.0);  // stores 1/z; 0 = infinitely far

  for (const Body& body : scene.bodies) {
    const Mesh& mesh = body.mesh;
    std::vector<Projected> proj(mesh.vertices.size());
    std::vector<bool> visible(mesh.vertices.size());
    for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
      Vec3 d = mesh.vertices[i] - view.eye;
      double z = dot(d, view.forward);
      visible[i] = z > kNear;
      if (!visible[i]) continue;
      proj[i] = {view.cx + view.focal * dot(d, view.right) / z, view.cy - view.focal * dot(d, view.up) / z, 1.0 / z};
    }
    for (const auto& tri : mesh.triangles) {
      if (!visible[tri[0]] || !visible[tri[1]] || !visible[tri[2]]) continue;
      Vec3 n = cross(mesh.vertices[tri[1]] - mesh.vertices[tri[0]], mesh.vertices[tri[2]] - mesh.vertices[tri[0]]);
      double n_len = length(n);
      if (n_len == 0.0) continue;
      double lambert = std::abs(dot(n, view.forward)) / n_len;
      auto shade = static_cast<float>(kShadeLo + (kShadeHi - kShadeLo) * lambert);

      const Projected& a = proj[tri[0]];
      const Projected& b = proj[tri[1]];
      const Projected& c = proj[tri[2]];
      double area = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
      if (area == 0.0) continue;
      int x0 = std::max(0, static_cast<int>(std::floor(std::min({a.x, b.x, c.x}))));
      int x1 = std::min(width - 1, static_cast<int>(std::ceil(std::max({a.x, b.x, c.x}))));
      int y0 = std::max(0, static_cast<int>(std::floor(std::min({a.y, b.y, c.y}))));
      int y1 = std::min(height - 1, static_cast<int>(std::ceil(std::max({a.y, b.y, c.y}))));
      for (int y = y0; y <= y1; ++y) {
        double py = y + 0.5;
        for (int x = x0; x <= x1; ++x) {
          double px = x + 0.5;
          double w0 = ((b.x - px) * (c.y - py) - (b.y - py) * (c.x - px)) / area;
          double w1 = ((c.x - px) * (a.y - py) - (c.y - py) * (a.x - px)) / area;
          double w2 = 1.0 - w0 - w1;
          if (w0 < 0 || w1 < 0 || w2 < 0) continue;
          double inv_z = w0 * a.inv_z + w1 * b.inv_z + w2 * c.inv_z;
          std::size_t idx = static_cast<std::size_t>(y) * width + x;
          if (inv_z > depth[idx]) {
            depth[idx] = inv_z;
            img.pixels[idx] = shade;
          }
        }
      }
    }
  }
  return img;
}

double image_mse(const Image& a, const Image& b) {
  if (a.width != b.width || a.height != b.height || a.pixels.size() != b.pixels.size()) {
    throw Error(ErrorCode::DimensionMismatch, "images differ in size");
  }
  if (a.pixels.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < a.pixels.size(); ++i) {
    double d = static_cast<double>(a.pixels[i]) - static_cast<double>(b.pixels[i]);
    sum += d * d;
  }
  return sum / static_cast<double>(a.pixels.size());
}

}  // namespace cadseq
