#include <doctest.h>

#include <cmath>
#include <random>

#include "gait/marker.hpp"

using namespace gait;

TEST_CASE("render_marker") {
    SUBCASE("deterministic given seed") {
        MarkerRenderParams p;
        p.noise_sigma = 0.03;
        p.seed = 42;
        const Image a = render_marker(p);
        const Image b = render_marker(p);
        CHECK(a.pixels == b.pixels);
    }

    SUBCASE("noiseless pattern is 180-degree symmetric about the center") {
        MarkerRenderParams p;
        p.center = {64.0, 64.0};
        const Image img = render_marker(p);
        for (int y = 0; y < img.height; ++y)
            for (int x = 0; x < img.width; ++x) {
                const int mx = 127 - x, my = 127 - y;
                if (mx < 0 || mx >= img.width || my < 0 || my >= img.height) continue;
                CHECK(std::abs(img.at(x, y) - img.at(mx, my)) < 1e-6);
            }
    }

    SUBCASE("clipping at the border keeps the visible fraction only") {
        MarkerRenderParams p;
        p.center = {-4.0, 64.0};  // mostly off the left edge
        const Image img = render_marker(p);
        double dark_left = 0.0, dark_right = 0.0;
        for (int y = 0; y < img.height; ++y)
            for (int x = 0; x < img.width; ++x) {
                if (x < img.width / 2) dark_left += 1.0 - img.at(x, y);
                else dark_right += 1.0 - img.at(x, y);
            }
        CHECK(dark_left > 1.0);
        CHECK(dark_right == doctest::Approx(0.0));
    }

    SUBCASE("marker below 8 px is rejected") {
        MarkerRenderParams p;
        p.scale = 1.0;  // 3 px wide
        CHECK_THROWS_AS(render_marker(p), ArgumentError);
    }
}

TEST_CASE("detect_center") {
    SUBCASE("blank image: found = false, center absent") {
        const Detection det = detect_center(make_image(128, 128, 1.0));
        CHECK_FALSE(det.found);
        CHECK_FALSE(det.center.has_value());
    }

    SUBCASE("clean render is recovered within a pixel") {
        MarkerRenderParams p;
        p.center = {61.4, 70.6};
        const Detection det = detect_center(render_marker(p));
        REQUIRE(det.found);
        CHECK(std::abs(det.center->u - 61.4) < 1.0);
        CHECK(std::abs(det.center->v - 70.6) < 1.0);
    }

    SUBCASE("translation equivariance under integer shifts") {
        MarkerRenderParams p;
        p.center = {52.25, 60.75};
        const Detection base = detect_center(render_marker(p));
        REQUIRE(base.found);
        for (const auto& [du, dv] : std::vector<std::pair<int, int>>{{5, 0}, {0, 7}, {-6, 9}}) {
            MarkerRenderParams q = p;
            q.center = {p.center.u + du, p.center.v + dv};
            const Detection shifted = detect_center(render_marker(q));
            REQUIRE(shifted.found);
            CHECK(std::abs(shifted.center->u - base.center->u - du) < 0.1);
            CHECK(std::abs(shifted.center->v - base.center->v - dv) < 0.1);
        }
    }

    SUBCASE("200 random poses: error stays within a pixel per axis") {
        std::mt19937_64 rng(43);
        std::uniform_real_distribution<double> pos(40.0, 88.0);
        std::uniform_real_distribution<double> rot(-20.0 * M_PI / 180.0, 20.0 * M_PI / 180.0);
        std::uniform_real_distribution<double> noise(0.0, 0.05);
        std::vector<double> eu, ev;
        for (int i = 0; i < 200; ++i) {
            MarkerRenderParams p;
            p.center = {pos(rng), pos(rng)};
            p.rotation = rot(rng);
            p.noise_sigma = noise(rng);
            p.seed = 1000 + i;
            const Detection det = detect_center(render_marker(p));
            REQUIRE(det.found);
            eu.push_back(std::abs(det.center->u - p.center.u));
            ev.push_back(std::abs(det.center->v - p.center.v));
        }
        std::sort(eu.begin(), eu.end());
        std::sort(ev.begin(), ev.end());
        CHECK(eu[189] <= 1.0);  // 95th percentile
        CHECK(ev[189] <= 1.0);
    }
}

TEST_CASE("PGM round trip") {
    MarkerRenderParams p;
    p.noise_sigma = 0.02;
    p.seed = 7;
    const Image img = render_marker(p);
    write_pgm(img, "marker_roundtrip.pgm");
    const Image back = read_pgm("marker_roundtrip.pgm");
    REQUIRE(back.width == img.width);
    REQUIRE(back.height == img.height);
    for (size_t i = 0; i < img.pixels.size(); ++i)
        CHECK(std::abs(back.pixels[i] - img.pixels[i]) <= 1.0 / 255.0 + 1e-12);

    CHECK_THROWS_AS(read_pgm("no_such_image.pgm"), ParseError);
}
