#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gait/geometry.hpp"

namespace gait {

// Grayscale image, row-major, intensities in [0, 1].
struct Image {
    int width = 0;
    int height = 0;
    std::vector<double> pixels;

    double at(int x, int y) const { return pixels[static_cast<size_t>(y) * width + x]; }
    double& at(int x, int y) { return pixels[static_cast<size_t>(y) * width + x]; }
};

Image make_image(int width, int height, double fill = 1.0);

struct Detection {
    std::optional<PixelPoint> center;
    double confidence = 0.0;
    bool found = false;
};

struct MarkerRenderParams {
    int image_size = 128;          // square frame
    PixelPoint center{64.0, 64.0};
    double scale = 8.0;            // pixels per cm; marker is 3x3 cm
    double rotation = 0.0;         // radians
    double noise_sigma = 0.0;      // additive Gaussian intensity noise
    uint64_t seed = 0;
};

// Renders the square-border-plus-cross marker with 4x4 supersampled
// anti-aliasing. Dark pattern on a light background; parts outside the frame
// are clipped. Deterministic given seed.
Image render_marker(const MarkerRenderParams& params);

// Threshold -> largest dark connected component -> normalized cross-correlation
// against the ideal marker template -> quadratic sub-pixel peak interpolation.
// found = false below confidence 0.5; a blank image is a value, not an error.
Detection detect_center(const Image& img);

// Binary PGM (P5) round trip, 8-bit.
void write_pgm(const Image& img, const std::string& path);
Image read_pgm(const std::string& path);

}  // namespace gait
