#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string_view>

namespace mobdyn {

using Mat2 = Eigen::Matrix2d;
using Vec2 = Eigen::Vector2d;

Mat2 rotation_matrix(double angle);
// Polar angle of a plane vector, in (-pi, pi].
double vector_angle(const Vec2& v);

// sigma_max / sigma_min - 1. Throws std::domain_error for det <= 0.
double conformal_defect(const Mat2& a);

enum class SaddleCase { defective, distinct_eigenvalues };
std::string_view to_string(SaddleCase c);

// rho * R^-1 * R2 * R1 * A * R = diag(lambda, 1/lambda), rotation factors
// stored as angles.
struct SaddleFactorization {
    double r1 = 0.0;
    double r2 = 0.0;
    double r = 0.0;
    double rho = 1.0;
    double lambda = 1.0;
    SaddleCase case_tag = SaddleCase::distinct_eigenvalues;
    double phi0 = 0.0;      // root of the frame-angle function
    double xi_at_root = 0.0;

    Mat2 normal_form() const;  // diag(lambda, 1/lambda)
    Mat2 apply_to(const Mat2& a) const;  // rho R^-1 R2 R1 a R
};

struct SaddleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline constexpr double kConformalTol = 1e-9;
inline constexpr double kDefectiveTol = 1e-10;

// Throws SaddleError("conformal input") when conformal_defect(a) <= 1e-9.
SaddleFactorization saddle_normalize(const Mat2& a);

// Cosine of the angle between A x_phi and A y_phi for the frame spanned by
// (u, w), u and w orthonormal.
double frame_cosine(const Mat2& a, const Vec2& u, const Vec2& w, double phi);

double reconstruction_residual(const Mat2& a, const SaddleFactorization& f);

}  // namespace mobdyn
