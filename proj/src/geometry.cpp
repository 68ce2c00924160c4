#include "gait/geometry.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace gait {

namespace {
constexpr double kOrthoTol = 1e-9;
constexpr double kMinRayAngle = 1e-4;          // radians
constexpr double kSingularRatioFloor = 1e3;    // sigma3/sigma4 below this + small angle => degenerate
}  // namespace

Mat3 Intrinsics::matrix() const {
    Mat3 K;
    K << fx, 0.0, cx,
         0.0, fy, cy,
         0.0, 0.0, 1.0;
    return K;
}

void Intrinsics::validate() const {
    if (!(fx > 0.0) || !(fy > 0.0))
        throw CalibrationError("intrinsics: focal lengths must be positive");
    if (!std::isfinite(cx) || !std::isfinite(cy))
        throw CalibrationError("intrinsics: principal point must be finite");
}

void Extrinsics::validate() const {
    const double ortho = (R.transpose() * R - Mat3::Identity()).cwiseAbs().maxCoeff();
    if (ortho > kOrthoTol)
        throw CalibrationError("extrinsics: R is not orthonormal (|R^T R - I| = " +
                               std::to_string(ortho) + ")");
    if (std::abs(R.determinant() - 1.0) > kOrthoTol)
        throw CalibrationError("extrinsics: det(R) != 1 (reflection or scale)");
    if (!t.allFinite())
        throw CalibrationError("extrinsics: t must be finite");
}

StereoRig build_rig(const Intrinsics& K1, const Intrinsics& K2, const Extrinsics& ext2) {
    K1.validate();
    K2.validate();
    ext2.validate();

    StereoRig rig;
    rig.K1 = K1;
    rig.K2 = K2;
    rig.ext2 = ext2;

    rig.P1.setZero();
    rig.P1.leftCols<3>() = K1.matrix();

    Mat34 Rt;
    Rt.leftCols<3>() = ext2.R;
    Rt.col(3) = ext2.t;
    rig.P2 = K2.matrix() * Rt;

    rig.baseline = (-ext2.R.transpose() * ext2.t).norm();
    if (!(rig.baseline > 0.0))
        throw CalibrationError("rig: zero baseline (camera centers coincide)");
    return rig;
}

PixelPoint project(const Mat34& P, const WorldPoint& X) {
    const Eigen::Vector4d Xh(X.x, X.y, X.z, 1.0);
    const Vec3 x = P * Xh;
    if (std::abs(x.z()) <= 1e-12)
        throw IllConditionedError("project: point at infinity (on the principal plane)");
    return {x.x() / x.z(), x.y() / x.z()};
}

namespace {

// Unit ray direction in the reference camera frame for a pixel on camera i.
Vec3 ray_direction(const StereoRig& rig, const PixelPoint& o, int cam) {
    const Vec3 pix(o.u, o.v, 1.0);
    if (cam == 1)
        return (rig.K1.matrix().inverse() * pix).normalized();
    return (rig.ext2.R.transpose() * (rig.K2.matrix().inverse() * pix)).normalized();
}

}  // namespace

WorldPoint triangulate(const StereoRig& rig, const PixelPoint& o1, const PixelPoint& o2) {
    Eigen::Matrix4d A;
    A.row(0) = o1.u * rig.P1.row(2) - rig.P1.row(0);
    A.row(1) = o1.v * rig.P1.row(2) - rig.P1.row(1);
    A.row(2) = o2.u * rig.P2.row(2) - rig.P2.row(0);
    A.row(3) = o2.v * rig.P2.row(2) - rig.P2.row(1);

    Eigen::JacobiSVD<Eigen::Matrix4d> svd(A, Eigen::ComputeFullV);
    const Eigen::Vector4d sv = svd.singularValues();

    const double angle = std::acos(std::clamp(
        ray_direction(rig, o1, 1).dot(ray_direction(rig, o2, 2)), -1.0, 1.0));
    const double ratio = sv(3) > 0.0 ? sv(2) / sv(3) : std::numeric_limits<double>::infinity();
    if (angle < kMinRayAngle && ratio < kSingularRatioFloor)
        throw IllConditionedError("triangulate: near-parallel rays (angle " +
                                  std::to_string(angle) + " rad)");

    const Eigen::Vector4d Xh = svd.matrixV().col(3);
    if (std::abs(Xh(3)) <= 1e-15)
        throw IllConditionedError("triangulate: solution at infinity");

    WorldPoint X{Xh(0) / Xh(3), Xh(1) / Xh(3), Xh(2) / Xh(3), Frame::Camera};
    if (X.z <= 0.0)
        throw CheiralityError("triangulate: negative depth in reference camera");
    return X;
}

WorldPoint to_ground(const WorldPoint& cam_pt, double theta) {
    if (cam_pt.frame != Frame::Camera)
        throw ArgumentError("to_ground: input must be in the camera frame");
    const double wx = cam_pt.z;  // walkway, pre-rotation
    const double wy = cam_pt.x;  // lateral, pre-rotation
    const double c = std::cos(theta), s = std::sin(theta);
    return {c * wx - s * wy, s * wx + c * wy, cam_pt.y, Frame::Ground};
}

WorldPoint ground_to_camera(const WorldPoint& ground_pt, double theta) {
    if (ground_pt.frame != Frame::Ground)
        throw ArgumentError("ground_to_camera: input must be in the ground frame");
    const double c = std::cos(theta), s = std::sin(theta);
    const double wx = c * ground_pt.x + s * ground_pt.y;
    const double wy = -s * ground_pt.x + c * ground_pt.y;
    return {wy, ground_pt.z, wx, Frame::Camera};
}

ReprojectionStats reprojection_error(const StereoRig& rig,
                                     const std::vector<WorldPoint>& world_pts,
                                     const std::vector<std::pair<PixelPoint, PixelPoint>>& observed) {
    if (world_pts.empty() || world_pts.size() != observed.size())
        throw ArgumentError("reprojection_error: need equal nonempty point lists");

    double sum_sq = 0.0, max_err = 0.0;
    for (size_t i = 0; i < world_pts.size(); ++i) {
        const PixelPoint p1 = project(rig.P1, world_pts[i]);
        const PixelPoint p2 = project(rig.P2, world_pts[i]);
        const double e1 = std::hypot(p1.u - observed[i].first.u, p1.v - observed[i].first.v);
        const double e2 = std::hypot(p2.u - observed[i].second.u, p2.v - observed[i].second.v);
        sum_sq += e1 * e1 + e2 * e2;
        max_err = std::max({max_err, e1, e2});
    }
    return {std::sqrt(sum_sq / (2.0 * world_pts.size())), max_err};
}

namespace {

double require_number(const nlohmann::json& j, const std::string& field, const std::string& origin) {
    if (!j.contains(field))
        throw ParseError(origin, "missing field '" + field + "'");
    if (!j[field].is_number())
        throw ParseError(origin + ":" + field, "expected a number");
    return j[field].get<double>();
}

}  // namespace

Calibration parse_calibration(const std::string& text, const std::string& origin) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(origin, e.what());
    }

    Intrinsics K1{require_number(j, "fx1", origin), require_number(j, "fy1", origin),
                  require_number(j, "cx1", origin), require_number(j, "cy1", origin)};
    Intrinsics K2{require_number(j, "fx2", origin), require_number(j, "fy2", origin),
                  require_number(j, "cx2", origin), require_number(j, "cy2", origin)};

    if (!j.contains("R2") || !j["R2"].is_array() || j["R2"].size() != 9)
        throw ParseError(origin + ":R2", "expected 9-element row-major array");
    if (!j.contains("t2") || !j["t2"].is_array() || j["t2"].size() != 3)
        throw ParseError(origin + ":t2", "expected 3-element array");

    Extrinsics ext2;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c)
            ext2.R(r, c) = j["R2"][3 * r + c].get<double>();
    for (int r = 0; r < 3; ++r)
        ext2.t(r) = j["t2"][r].get<double>();

    Calibration calib;
    calib.theta_rad = require_number(j, "theta_rad", origin);
    calib.image_width = static_cast<int>(require_number(j, "image_width", origin));
    calib.image_height = static_cast<int>(require_number(j, "image_height", origin));
    if (calib.image_width <= 0 || calib.image_height <= 0)
        throw ParseError(origin + ":image_width", "image dimensions must be positive");

    try {
        calib.rig = build_rig(K1, K2, ext2);
    } catch (const CalibrationError& e) {
        throw ParseError(origin, e.what());
    }
    return calib;
}

Calibration load_calibration(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ParseError(path, "cannot open calibration file");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_calibration(ss.str(), path);
}

void save_calibration(const Calibration& calib, const std::string& path) {
    nlohmann::json j;
    j["fx1"] = calib.rig.K1.fx; j["fy1"] = calib.rig.K1.fy;
    j["cx1"] = calib.rig.K1.cx; j["cy1"] = calib.rig.K1.cy;
    j["fx2"] = calib.rig.K2.fx; j["fy2"] = calib.rig.K2.fy;
    j["cx2"] = calib.rig.K2.cx; j["cy2"] = calib.rig.K2.cy;
    std::vector<double> R(9), t(3);
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c)
            R[3 * r + c] = calib.rig.ext2.R(r, c);
    for (int r = 0; r < 3; ++r) t[r] = calib.rig.ext2.t(r);
    j["R2"] = R;
    j["t2"] = t;
    j["theta_rad"] = calib.theta_rad;
    j["image_width"] = calib.image_width;
    j["image_height"] = calib.image_height;
    std::ofstream out(path);
    if (!out)
        throw ParseError(path, "cannot write calibration file");
    out << j.dump(2) << "\n";
}

}  // namespace gait
