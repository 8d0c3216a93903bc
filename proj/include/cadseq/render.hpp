#pragma once

#include <vector>

#include "cadseq/geom.hpp"
#include "cadseq/vec.hpp"

namespace cadseq {

struct Camera {
  Vec3 eye{20.0, 20.0, 20.0};
  Vec3 target{0.0, 0.0, 0.0};
  Vec3 up{0.0, 0.0, 1.0};
  double fov_y_deg = 40.0;
};

inline constexpr int kDefaultImageSize = 128;
inline constexpr int kMaxImageSize = 512;
inline constexpr float kBackground = 1.0f;
inline constexpr float kShadeLo = 0.1f;
inline constexpr float kShadeHi = 0.9f;

// Grayscale raster, row-major from the top-left corner, values in [0, 1].
struct Image {
  int width = 0;
  int height = 0;
  std::vector<float> pixels;

  static Image filled(int width, int height, float value);
  float at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
  friend bool operator==(const Image&, const Image&) = default;
};

// Z-buffered rasterization of every body mesh, Lambertian shading with the
// light along the view direction. A scene without bodies renders as
// background. Throws RangeError for a degenerate camera or size.
Image render(const SolidScene& scene, const Camera& camera = {}, int width = kDefaultImageSize,
             int height = kDefaultImageSize);

// Throws DimensionMismatch.
double image_mse(const Image& a, const Image& b);

}  // namespace cadseq
