#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "gait/errors.hpp"

namespace gait {

using Mat3 = Eigen::Matrix3d;
using Mat34 = Eigen::Matrix<double, 3, 4>;
using Vec3 = Eigen::Vector3d;

struct Intrinsics {
    double fx = 0.0;
    double fy = 0.0;
    double cx = 0.0;
    double cy = 0.0;
    // Skew is fixed at zero for modern sensors; kept for the K-matrix layout.

    Mat3 matrix() const;
    void validate() const;  // throws CalibrationError
};

struct Extrinsics {
    Mat3 R = Mat3::Identity();
    Vec3 t = Vec3::Zero();

    void validate() const;  // throws CalibrationError
};

struct PixelPoint {
    double u = 0.0;
    double v = 0.0;
};

enum class Frame { Camera, Ground };

struct WorldPoint {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
    Frame frame = Frame::Camera;

    Vec3 vec() const { return {x, y, z}; }
};

struct StereoRig {
    Intrinsics K1, K2;
    Extrinsics ext2;  // camera 2 relative to camera 1
    Mat34 P1 = Mat34::Zero();
    Mat34 P2 = Mat34::Zero();
    double baseline = 0.0;  // meters
};

// P1 = K1 [I | 0], P2 = K2 [R | t], baseline = ||-R^T t||.
// Throws CalibrationError for invalid intrinsics, non-orthonormal R,
// or a zero baseline.
StereoRig build_rig(const Intrinsics& K1, const Intrinsics& K2, const Extrinsics& ext2);

// Dehomogenized pinhole projection x = PX. Throws IllConditionedError when
// the point lies on the principal plane (|w| <= 1e-12).
PixelPoint project(const Mat34& P, const WorldPoint& X);

// DLT triangulation: least-squares null vector of the 4x4 stacked
// cross-product constraints, via SVD. Result is in the reference camera
// frame with positive depth. Throws IllConditionedError for near-parallel
// rays and CheiralityError for behind-camera solutions.
WorldPoint triangulate(const StereoRig& rig, const PixelPoint& o1, const PixelPoint& o2);

// Camera-to-ground transform. Axis relabeling (the one place it is defined):
//   camera z (optical axis) -> walkway component, pre-rotation
//   camera x (lateral)      -> lateral component, pre-rotation
//   camera y (vertical, up) -> height, unchanged
// then the horizontal pair is rotated by theta, the mounting yaw between the
// camera's line of sight and the walking direction.
WorldPoint to_ground(const WorldPoint& cam_pt, double theta);

// Exact inverse of to_ground; used by the simulator to synthesize camera-frame
// marker positions.
WorldPoint ground_to_camera(const WorldPoint& ground_pt, double theta);

struct ReprojectionStats {
    double rms = 0.0;  // pixels, over both cameras and all points
    double max = 0.0;
};

// RMS/max pixel distance between projections of world_pts and the observed
// pixel pairs (.first from camera 1, .second from camera 2).
ReprojectionStats reprojection_error(const StereoRig& rig,
                                     const std::vector<WorldPoint>& world_pts,
                                     const std::vector<std::pair<PixelPoint, PixelPoint>>& observed);

struct Calibration {
    StereoRig rig;
    double theta_rad = 0.0;
    int image_width = 0;
    int image_height = 0;
};

// Calibration file loader (JSON). Field names are fixed:
// fx1,fy1,cx1,cy1,fx2,fy2,cx2,cy2,R2 (9 row-major),t2 (3),theta_rad,
// image_width,image_height. Throws ParseError naming the offending field.
Calibration load_calibration(const std::string& path);
Calibration parse_calibration(const std::string& text, const std::string& origin);
void save_calibration(const Calibration& calib, const std::string& path);

}  // namespace gait
