#include "gait/marker.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <random>

namespace gait {

Image make_image(int width, int height, double fill) {
    Image img;
    img.width = width;
    img.height = height;
    img.pixels.assign(static_cast<size_t>(width) * height, fill);
    return img;
}

namespace {

constexpr double kMarkerCm = 3.0;        // physical marker side
constexpr double kBorderFrac = 0.18;     // border thickness, fraction of half-side
constexpr double kCrossFrac = 0.14;      // cross bar half-thickness, fraction of half-side

// Pattern intensity in marker-local coordinates normalized to [-1, 1].
// Dark (0) on the border frame and the centered cross, light (1) elsewhere.
double pattern(double u, double v) {
    const double m = std::max(std::abs(u), std::abs(v));
    if (m > 1.0) return 1.0;                        // outside the marker
    if (m >= 1.0 - kBorderFrac) return 0.0;         // square border
    if (std::abs(u) <= kCrossFrac || std::abs(v) <= kCrossFrac) return 0.0;  // cross
    return 1.0;
}

}  // namespace

Image render_marker(const MarkerRenderParams& params) {
    const double half_side = kMarkerCm * params.scale / 2.0;
    if (2.0 * half_side < 8.0)
        throw ArgumentError("render_marker: marker must be at least 8 px wide");

    Image img = make_image(params.image_size, params.image_size);
    const double c = std::cos(-params.rotation), s = std::sin(-params.rotation);

    // Bounding box of the rotated marker, padded by one pixel for AA.
    const double reach = half_side * (std::abs(c) + std::abs(s)) + 1.0;
    const int x0 = std::max(0, static_cast<int>(std::floor(params.center.u - reach)));
    const int x1 = std::min(params.image_size - 1, static_cast<int>(std::ceil(params.center.u + reach)));
    const int y0 = std::max(0, static_cast<int>(std::floor(params.center.v - reach)));
    const int y1 = std::min(params.image_size - 1, static_cast<int>(std::ceil(params.center.v + reach)));

    constexpr int kSS = 4;  // supersampling grid per axis
    for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) {
            double acc = 0.0;
            for (int sy = 0; sy < kSS; ++sy) {
                for (int sx = 0; sx < kSS; ++sx) {
                    const double px = x + (sx + 0.5) / kSS - params.center.u;
                    const double py = y + (sy + 0.5) / kSS - params.center.v;
                    const double u = (c * px - s * py) / half_side;
                    const double v = (s * px + c * py) / half_side;
                    acc += pattern(u, v);
                }
            }
            img.at(x, y) = acc / (kSS * kSS);
        }
    }

    if (params.noise_sigma > 0.0) {
        std::mt19937_64 rng(params.seed);
        std::normal_distribution<double> noise(0.0, params.noise_sigma);
        for (double& p : img.pixels)
            p = std::clamp(p + noise(rng), 0.0, 1.0);
    }
    return img;
}

namespace {

struct Component {
    int min_x = 1 << 30, max_x = -1, min_y = 1 << 30, max_y = -1;
    int size = 0;
};

// Largest dark 4-connected component, or nullopt when nothing qualifies.
std::optional<Component> largest_dark_component(const Image& img, double threshold, int min_size) {
    std::vector<uint8_t> visited(img.pixels.size(), 0);
    std::optional<Component> best;
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            const size_t i = static_cast<size_t>(y) * img.width + x;
            if (visited[i] || img.pixels[i] >= threshold) continue;
            Component comp;
            std::deque<std::pair<int, int>> queue{{x, y}};
            visited[i] = 1;
            while (!queue.empty()) {
                auto [cx, cy] = queue.front();
                queue.pop_front();
                ++comp.size;
                comp.min_x = std::min(comp.min_x, cx);
                comp.max_x = std::max(comp.max_x, cx);
                comp.min_y = std::min(comp.min_y, cy);
                comp.max_y = std::max(comp.max_y, cy);
                const int nbr[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
                for (auto [dx, dy] : nbr) {
                    const int nx = cx + dx, ny = cy + dy;
                    if (nx < 0 || ny < 0 || nx >= img.width || ny >= img.height) continue;
                    const size_t ni = static_cast<size_t>(ny) * img.width + nx;
                    if (!visited[ni] && img.pixels[ni] < threshold) {
                        visited[ni] = 1;
                        queue.emplace_back(nx, ny);
                    }
                }
            }
            if (comp.size >= min_size && (!best || comp.size > best->size)) best = comp;
        }
    }
    return best;
}

// Zero-normalized cross-correlation of the template centered at (cx, cy).
double zncc_at(const Image& img, const Image& tmpl, int cx, int cy) {
    const int hw = tmpl.width / 2, hh = tmpl.height / 2;
    double sum_i = 0, sum_t = 0, sum_ii = 0, sum_tt = 0, sum_it = 0;
    int n = 0;
    for (int ty = 0; ty < tmpl.height; ++ty) {
        for (int tx = 0; tx < tmpl.width; ++tx) {
            const int x = cx - hw + tx, y = cy - hh + ty;
            if (x < 0 || y < 0 || x >= img.width || y >= img.height) continue;
            const double iv = img.at(x, y), tv = tmpl.at(tx, ty);
            sum_i += iv; sum_t += tv;
            sum_ii += iv * iv; sum_tt += tv * tv;
            sum_it += iv * tv;
            ++n;
        }
    }
    if (n < 16) return -1.0;
    const double var_i = sum_ii - sum_i * sum_i / n;
    const double var_t = sum_tt - sum_t * sum_t / n;
    if (var_i <= 1e-12 || var_t <= 1e-12) return -1.0;
    return (sum_it - sum_i * sum_t / n) / std::sqrt(var_i * var_t);
}

// Sub-pixel offset of a quadratic through three equally spaced samples.
double quadratic_peak(double left, double mid, double right) {
    const double denom = left - 2.0 * mid + right;
    if (std::abs(denom) <= 1e-15) return 0.0;
    return std::clamp(0.5 * (left - right) / denom, -1.0, 1.0);
}

}  // namespace

Detection detect_center(const Image& img) {
    Detection det;
    const auto comp = largest_dark_component(img, 0.5, 30);
    if (!comp) return det;

    const double est_cx = (comp->min_x + comp->max_x) / 2.0;
    const double est_cy = (comp->min_y + comp->max_y) / 2.0;
    const double bbox = std::max(comp->max_x - comp->min_x, comp->max_y - comp->min_y) + 1.0;

    MarkerRenderParams tp;
    tp.image_size = static_cast<int>(std::ceil(bbox)) + 9;
    tp.center = {tp.image_size / 2.0, tp.image_size / 2.0};

    // Coarse rotation search: pick the template orientation that correlates
    // best at the component center, then refine the position with it. The
    // bounding box of a rotated square grows by |cos| + |sin|, so the scale
    // estimate depends on the candidate angle.
    const int cx0 = static_cast<int>(std::lround(est_cx));
    const int cy0 = static_cast<int>(std::lround(est_cy));
    Image tmpl;
    double best_rot_score = -2.0;
    for (int deg = -24; deg <= 24; deg += 4) {
        const double rot = deg * M_PI / 180.0;
        const double grow = std::abs(std::cos(rot)) + std::abs(std::sin(rot));
        tp.rotation = rot;
        tp.scale = std::max(8.0 / kMarkerCm, bbox / grow / kMarkerCm);
        Image cand = render_marker(tp);
        const double score = zncc_at(img, cand, cx0, cy0);
        if (score > best_rot_score) {
            best_rot_score = score;
            tmpl = std::move(cand);
        }
    }

    // Correlation peak over a small window around the component center,
    // then quadratic interpolation for the sub-pixel position.
    const int search = 5;
    int best_x = 0, best_y = 0;
    double best = -2.0;
    for (int dy = -search; dy <= search; ++dy) {
        for (int dx = -search; dx <= search; ++dx) {
            const int x = static_cast<int>(std::lround(est_cx)) + dx;
            const int y = static_cast<int>(std::lround(est_cy)) + dy;
            const double score = zncc_at(img, tmpl, x, y);
            if (score > best) {
                best = score;
                best_x = x;
                best_y = y;
            }
        }
    }
    if (best < -1.0) return det;

    const double sl = zncc_at(img, tmpl, best_x - 1, best_y);
    const double sr = zncc_at(img, tmpl, best_x + 1, best_y);
    const double su = zncc_at(img, tmpl, best_x, best_y - 1);
    const double sd = zncc_at(img, tmpl, best_x, best_y + 1);

    det.confidence = std::clamp(best, 0.0, 1.0);
    if (det.confidence < 0.5) return det;
    det.found = true;
    det.center = PixelPoint{best_x + quadratic_peak(sl, best, sr),
                            best_y + quadratic_peak(su, best, sd)};
    return det;
}

void write_pgm(const Image& img, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw ParseError(path, "cannot write PGM");
    out << "P5\n" << img.width << " " << img.height << "\n255\n";
    for (double p : img.pixels)
        out.put(static_cast<char>(std::lround(std::clamp(p, 0.0, 1.0) * 255.0)));
}

Image read_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ParseError(path, "cannot open PGM");
    std::string magic;
    int w = 0, h = 0, maxval = 0;
    in >> magic >> w >> h >> maxval;
    if (magic != "P5" || w <= 0 || h <= 0 || maxval != 255)
        throw ParseError(path, "expected binary 8-bit P5 PGM");
    in.get();  // single whitespace after header
    Image img = make_image(w, h);
    for (double& p : img.pixels) {
        const int c = in.get();
        if (c == EOF)
            throw ParseError(path, "truncated pixel data");
        p = c / 255.0;
    }
    return img;
}

}  // namespace gait
