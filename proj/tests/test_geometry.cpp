#include <doctest.h>

#include <Eigen/Dense>
#include <fstream>
#include <random>

#include "gait/geometry.hpp"

using namespace gait;

namespace {

Intrinsics default_K() { return {600.0, 600.0, 320.0, 240.0}; }

StereoRig six_cm_rig() {
    Extrinsics ext;
    ext.t = Vec3(-0.06, 0.0, 0.0);
    return build_rig(default_K(), default_K(), ext);
}

Mat3 axis_angle(const Vec3& axis, double angle) {
    return Eigen::AngleAxisd(angle, axis.normalized()).toRotationMatrix();
}

// Independent DLT oracle: stacks the Eq.-9 style rows with the homogeneous
// pixel points scaled by (l1, l2) and solves via Eigen's SVD directly.
Vec3 dlt_oracle(const StereoRig& rig, const PixelPoint& o1, const PixelPoint& o2,
                double l1, double l2) {
    Eigen::Matrix4d A;
    A.row(0) = l1 * (o1.u * rig.P1.row(2) - rig.P1.row(0));
    A.row(1) = l1 * (o1.v * rig.P1.row(2) - rig.P1.row(1));
    A.row(2) = l2 * (o2.u * rig.P2.row(2) - rig.P2.row(0));
    A.row(3) = l2 * (o2.v * rig.P2.row(2) - rig.P2.row(1));
    Eigen::JacobiSVD<Eigen::Matrix4d> svd(A, Eigen::ComputeFullV);
    Eigen::Vector4d X = svd.matrixV().col(3);
    CHECK(std::abs(X.norm() - 1.0) < 1e-12);  // unit singular vector
    return X.head<3>() / X(3);
}

}  // namespace

TEST_CASE("build_rig composes projection matrices and baseline") {
    const StereoRig rig = six_cm_rig();
    CHECK(rig.baseline == doctest::Approx(0.06).epsilon(1e-12));

    // P1 = K [I | 0]
    CHECK(rig.P1(0, 0) == doctest::Approx(600.0));
    CHECK(rig.P1(0, 2) == doctest::Approx(320.0));
    CHECK(rig.P1(2, 3) == doctest::Approx(0.0));

    SUBCASE("zero baseline is rejected") {
        Extrinsics degenerate;  // R = I, t = 0
        CHECK_THROWS_AS(build_rig(default_K(), default_K(), degenerate), CalibrationError);
    }

    SUBCASE("non-orthonormal rotation is rejected") {
        Extrinsics bad;
        bad.R(0, 0) = 1.5;
        bad.t = Vec3(-0.06, 0.0, 0.0);
        CHECK_THROWS_AS(build_rig(default_K(), default_K(), bad), CalibrationError);
    }

    SUBCASE("P2 equals K2 [R | t] entry-wise") {
        std::mt19937_64 rng(5);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        for (int i = 0; i < 200; ++i) {
            Extrinsics ext;
            ext.R = axis_angle(Vec3(u(rng), u(rng), u(rng)), 0.01);
            ext.t = Vec3(-0.06, 0.0, 0.0);
            const Intrinsics K{500.0 + 200.0 * u(rng), 500.0 + 200.0 * u(rng),
                               320.0 + 10.0 * u(rng), 240.0 + 10.0 * u(rng)};
            const StereoRig rig2 = build_rig(default_K(), K, ext);
            Mat34 Rt;
            Rt.block<3, 3>(0, 0) = ext.R;
            Rt.col(3) = ext.t;
            const Mat34 expect = K.matrix() * Rt;
            CHECK((rig2.P2 - expect).cwiseAbs().maxCoeff() < 1e-12);
        }
    }
}

TEST_CASE("project: pinhole dehomogenization") {
    const StereoRig rig = six_cm_rig();
    const PixelPoint axis = project(rig.P1, {0.0, 0.0, 1.0, Frame::Camera});
    CHECK(axis.u == doctest::Approx(320.0).epsilon(1e-12));
    CHECK(axis.v == doctest::Approx(240.0).epsilon(1e-12));

    const PixelPoint off = project(rig.P1, {0.1, 0.0, 1.0, Frame::Camera});
    CHECK(off.u == doctest::Approx(380.0).epsilon(1e-12));
    CHECK(off.v == doctest::Approx(240.0).epsilon(1e-12));

    SUBCASE("principal-plane point is rejected") {
        CHECK_THROWS_AS(project(rig.P1, {0.1, 0.1, 0.0, Frame::Camera}), IllConditionedError);
    }

    SUBCASE("matches hand-rolled K(RX + t)") {
        std::mt19937_64 rng(7);
        std::uniform_real_distribution<double> u(-0.3, 0.3);
        Extrinsics ext;
        ext.R = axis_angle(Vec3(0.2, 1.0, 0.1), 0.01);
        ext.t = Vec3(-0.06, 0.0, 0.0);
        const StereoRig rig2 = build_rig(default_K(), default_K(), ext);
        for (int i = 0; i < 200; ++i) {
            const Vec3 X(u(rng), u(rng), 0.25 + std::abs(u(rng)));
            const Vec3 hom = default_K().matrix() * (ext.R * X + ext.t);
            const PixelPoint p = project(rig2.P2, {X.x(), X.y(), X.z(), Frame::Camera});
            CHECK(p.u == doctest::Approx(hom.x() / hom.z()).epsilon(1e-9));
            CHECK(p.v == doctest::Approx(hom.y() / hom.z()).epsilon(1e-9));
        }
    }
}

TEST_CASE("triangulate: noiseless round trip and degeneracies") {
    const StereoRig rig = six_cm_rig();
    const WorldPoint X{0.05, -0.02, 0.65, Frame::Camera};
    const WorldPoint back = triangulate(rig, project(rig.P1, X), project(rig.P2, X));
    CHECK(std::abs(back.x - X.x) < 1e-9);
    CHECK(std::abs(back.y - X.y) < 1e-9);
    CHECK(std::abs(back.z - X.z) < 1e-9);
    CHECK(back.frame == Frame::Camera);

    SUBCASE("parallel rays are ill-conditioned") {
        CHECK_THROWS_AS(triangulate(rig, {320.0, 240.0}, {320.0, 240.0}), IllConditionedError);
    }

    SUBCASE("behind-camera detection raises cheirality") {
        // crossing rays: swap the horizontal disparity direction
        const PixelPoint o1 = project(rig.P1, X);
        const PixelPoint o2 = project(rig.P2, X);
        CHECK_THROWS_AS(triangulate(rig, o2, o1), CheiralityError);
    }

    SUBCASE("round trip property, 200 random poses") {
        std::mt19937_64 rng(11);
        std::uniform_real_distribution<double> u(-0.2, 0.2);
        std::uniform_real_distribution<double> z(0.3, 1.2);
        for (int i = 0; i < 200; ++i) {
            const WorldPoint p{u(rng), u(rng), z(rng), Frame::Camera};
            const WorldPoint q = triangulate(rig, project(rig.P1, p), project(rig.P2, p));
            CHECK(std::abs(q.x - p.x) < 1e-6);
            CHECK(std::abs(q.y - p.y) < 1e-6);
            CHECK(std::abs(q.z - p.z) < 1e-6);
        }
    }

    SUBCASE("matches the DLT oracle; homogeneous scaling is a no-op") {
        std::mt19937_64 rng(13);
        std::uniform_real_distribution<double> u(-0.15, 0.15);
        std::uniform_real_distribution<double> z(0.3, 1.0);
        std::uniform_real_distribution<double> lambda(0.1, 10.0);
        for (int i = 0; i < 200; ++i) {
            const WorldPoint p{u(rng), u(rng), z(rng), Frame::Camera};
            const PixelPoint o1 = project(rig.P1, p);
            const PixelPoint o2 = project(rig.P2, p);
            const WorldPoint q = triangulate(rig, o1, o2);
            const Vec3 plain = dlt_oracle(rig, o1, o2, 1.0, 1.0);
            const Vec3 scaled = dlt_oracle(rig, o1, o2, lambda(rng), lambda(rng));
            CHECK((q.vec() - plain).norm() < 1e-9);
            CHECK((plain - scaled).norm() < 1e-9);
            // Eq.-9 rows annihilate the true homogeneous point
            Eigen::Vector4d Xh(p.x, p.y, p.z, 1.0);
            Eigen::Matrix4d A;
            A.row(0) = o1.u * rig.P1.row(2) - rig.P1.row(0);
            A.row(1) = o1.v * rig.P1.row(2) - rig.P1.row(1);
            A.row(2) = o2.u * rig.P2.row(2) - rig.P2.row(0);
            A.row(3) = o2.v * rig.P2.row(2) - rig.P2.row(1);
            CHECK((A * Xh).cwiseAbs().maxCoeff() < 1e-9);
        }
    }

    SUBCASE("0.5 px noise at 0.45 m: 95th percentile error < 5 mm") {
        // collection-scale sensor: 1400 px focal, 6 cm baseline
        Extrinsics ext;
        ext.t = Vec3(-0.06, 0.0, 0.0);
        const Intrinsics dense{1400.0, 1400.0, 820.0, 616.0};
        const StereoRig dense_rig = build_rig(dense, dense, ext);
        std::mt19937_64 rng(17);
        std::normal_distribution<double> noise(0.0, 0.5);
        const WorldPoint p{0.02, -0.01, 0.45, Frame::Camera};
        std::vector<double> errs;
        for (int i = 0; i < 1000; ++i) {
            PixelPoint o1 = project(dense_rig.P1, p);
            PixelPoint o2 = project(dense_rig.P2, p);
            o1.u += noise(rng); o1.v += noise(rng);
            o2.u += noise(rng); o2.v += noise(rng);
            const WorldPoint q = triangulate(dense_rig, o1, o2);
            errs.push_back((q.vec() - p.vec()).norm());
        }
        std::sort(errs.begin(), errs.end());
        CHECK(errs[949] < 0.005);
    }
}

TEST_CASE("to_ground: Eq.-10 rotation on the horizontal pair") {
    const WorldPoint cam{0.03, -0.05, 0.7, Frame::Camera};

    SUBCASE("theta = 0 relabels axes only") {
        const WorldPoint g = to_ground(cam, 0.0);
        CHECK(g.frame == Frame::Ground);
        CHECK(g.x == doctest::Approx(cam.z).epsilon(1e-12));  // walkway
        CHECK(g.y == doctest::Approx(cam.x).epsilon(1e-12));  // lateral
        CHECK(g.z == doctest::Approx(cam.y).epsilon(1e-12));  // height
    }

    SUBCASE("quarter turn maps walkway onto lateral") {
        const WorldPoint g = to_ground({0.0, 0.0, 1.0, Frame::Camera}, M_PI / 2.0);
        CHECK(std::abs(g.x - 0.0) < 1e-12);
        CHECK(std::abs(g.y - 1.0) < 1e-12);
    }

    SUBCASE("matches a hand-rolled rotation matrix and inverts exactly") {
        std::mt19937_64 rng(19);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        for (int i = 0; i < 200; ++i) {
            const double theta = u(rng);
            const WorldPoint p{u(rng), u(rng), 0.3 + std::abs(u(rng)), Frame::Camera};
            const WorldPoint g = to_ground(p, theta);
            const double c = std::cos(theta), s = std::sin(theta);
            CHECK(g.x == doctest::Approx(c * p.z - s * p.x).epsilon(1e-12));
            CHECK(g.y == doctest::Approx(s * p.z + c * p.x).epsilon(1e-12));
            CHECK(g.z == doctest::Approx(p.y).epsilon(1e-12));

            const WorldPoint back = ground_to_camera(g, theta);
            CHECK(std::abs(back.x - p.x) < 1e-12);
            CHECK(std::abs(back.y - p.y) < 1e-12);
            CHECK(std::abs(back.z - p.z) < 1e-12);
        }
    }
}

TEST_CASE("reprojection_error") {
    const StereoRig rig = six_cm_rig();
    std::vector<WorldPoint> pts{{0.02, 0.01, 0.5, Frame::Camera}, {-0.04, 0.0, 0.7, Frame::Camera}};
    std::vector<std::pair<PixelPoint, PixelPoint>> obs;
    for (const WorldPoint& p : pts) obs.push_back({project(rig.P1, p), project(rig.P2, p)});

    CHECK(reprojection_error(rig, pts, obs).rms == doctest::Approx(0.0).epsilon(1e-9));

    SUBCASE("uniform (0.3, 0.4) px offset gives RMS 0.5") {
        for (auto& [o1, o2] : obs) {
            o1.u += 0.3; o1.v += 0.4;
            o2.u += 0.3; o2.v += 0.4;
        }
        CHECK(reprojection_error(rig, pts, obs).rms == doctest::Approx(0.5).epsilon(1e-9));
    }

    SUBCASE("empty lists are rejected") {
        CHECK_THROWS_AS(reprojection_error(rig, {}, {}), ArgumentError);
    }
}

TEST_CASE("calibration file round trip and diagnostics") {
    Calibration calib;
    Extrinsics ext;
    ext.R = axis_angle(Vec3(0.1, 1.0, 0.0), 0.02);
    ext.t = Vec3(-0.06, 0.001, 0.0);
    calib.rig = build_rig(default_K(), {610.0, 605.0, 321.0, 239.0}, ext);
    calib.theta_rad = 0.35;
    calib.image_width = 640;
    calib.image_height = 480;

    const std::string path = "calib_roundtrip.json";
    save_calibration(calib, path);
    const Calibration back = load_calibration(path);
    CHECK(back.rig.K1.fx == doctest::Approx(600.0).epsilon(1e-12));
    CHECK(back.rig.K2.cx == doctest::Approx(321.0).epsilon(1e-12));
    CHECK((back.rig.ext2.R - ext.R).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(back.theta_rad == doctest::Approx(0.35).epsilon(1e-12));
    CHECK(back.image_width == 640);

    SUBCASE("missing field names the field") {
        std::ofstream("calib_bad.json") << "{\"fx1\": 600.0}";
        try {
            load_calibration("calib_bad.json");
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(std::string(e.what()).find("fy1") != std::string::npos);
        }
    }

    SUBCASE("invalid rotation is rejected on load") {
        std::ofstream("calib_rot.json")
            << R"({"fx1":600,"fy1":600,"cx1":320,"cy1":240,"fx2":600,"fy2":600,"cx2":320,"cy2":240,)"
            << R"("R2":[2,0,0,0,1,0,0,0,1],"t2":[-0.06,0,0],"theta_rad":0.0,)"
            << R"("image_width":640,"image_height":480})";
        // rig-level problems surface as file-level ParseError from the loader
        CHECK_THROWS_AS(load_calibration("calib_rot.json"), ParseError);
    }
}
