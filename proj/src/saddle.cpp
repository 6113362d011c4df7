#include "mobdyn/saddle.hpp"

#include <cmath>
#include <numbers>

namespace mobdyn {

Mat2 rotation_matrix(double angle) {
    const double c = std::cos(angle), s = std::sin(angle);
    Mat2 m;
    m << c, -s, s, c;
    return m;
}

double vector_angle(const Vec2& v) { return std::atan2(v.y(), v.x()); }

double conformal_defect(const Mat2& a) {
    const double det = a.determinant();
    if (!(det > 0.0)) throw std::domain_error("conformal_defect: matrix must have positive determinant");
    const Eigen::JacobiSVD<Mat2> svd(a);
    const auto s = svd.singularValues();
    return s(0) / s(1) - 1.0;
}

std::string_view to_string(SaddleCase c) {
    return c == SaddleCase::defective ? "defective" : "distinct_eigenvalues";
}

Mat2 SaddleFactorization::normal_form() const {
    Mat2 m;
    m << lambda, 0.0, 0.0, 1.0 / lambda;
    return m;
}

Mat2 SaddleFactorization::apply_to(const Mat2& a) const {
    return rho * rotation_matrix(-r) * rotation_matrix(r2) * rotation_matrix(r1) * a * rotation_matrix(r);
}

double reconstruction_residual(const Mat2& a, const SaddleFactorization& f) {
    return (f.apply_to(a) - f.normal_form()).cwiseAbs().maxCoeff();
}

double frame_cosine(const Mat2& a, const Vec2& u, const Vec2& w, double phi) {
    const double c = std::cos(phi), s = std::sin(phi);
    const Vec2 x = c * u + s * w;
    const Vec2 y = -s * u + c * w;
    const Vec2 ax = a * x, ay = a * y;
    return ax.dot(ay) / (ax.norm() * ay.norm());
}

namespace {

Vec2 perp(const Vec2& v) { return {-v.y(), v.x()}; }

// Eigenvector for a real eigenvalue l, taken from the better conditioned row.
Vec2 eigenvector(const Mat2& a, double l) {
    const Vec2 v1(a(0, 1), l - a(0, 0));
    const Vec2 v2(l - a(1, 1), a(1, 0));
    const Vec2 v = v1.norm() >= v2.norm() ? v1 : v2;
    return v.normalized();
}

double relative_discriminant(const Mat2& a) {
    const double tr = a.trace();
    return (tr * tr - 4.0 * a.determinant()) / a.determinant();
}

}  // namespace

SaddleFactorization saddle_normalize(const Mat2& a) {
    if (!a.allFinite()) throw std::domain_error("saddle_normalize: non-finite entries");
    if (conformal_defect(a) <= kConformalTol) throw SaddleError("conformal input");

    SaddleFactorization out;

    // u: an eigenvector when A has real spectrum, otherwise any unit vector.
    Vec2 u(1.0, 0.0);
    const double disc = relative_discriminant(a);
    if (disc >= -kDefectiveTol) {
        const double tr = a.trace();
        const double root = std::sqrt(std::max(disc, 0.0) * a.determinant());
        const double l = 0.5 * (tr + std::copysign(root, tr));
        u = eigenvector(a, l);
    }
    const Vec2 au = a * u;
    out.r1 = vector_angle(u) - vector_angle(au);
    const Mat2 a1 = rotation_matrix(out.r1) * a;

    // Second frame vector, oriented so (u, w) is positive.
    Vec2 w = perp(u);
    const double disc1 = relative_discriminant(a1);
    if (std::abs(disc1) <= kDefectiveTol) {
        out.case_tag = SaddleCase::defective;
    } else {
        out.case_tag = SaddleCase::distinct_eigenvalues;
        const double l1 = (a1 * u).dot(u);
        const double l2 = a1.determinant() / l1;
        const Vec2 e2 = eigenvector(a1, l2);
        const Vec2 g = e2 - (e2.dot(u) / u.dot(u)) * u;
        if (g.norm() > 0.0) w = g.normalized();
        if (u.x() * w.y() - u.y() * w.x() < 0.0) w = -w;
    }

    double lo = 0.0, hi = std::numbers::pi / 2;
    double flo = frame_cosine(a1, u, w, lo);
    double fhi = frame_cosine(a1, u, w, hi);
    if (flo * fhi > 0.0) throw SaddleError("saddle_normalize: frame-angle bisection has no sign change");
    double phi0 = lo;
    if (flo == 0.0) {
        phi0 = lo;
    } else if (fhi == 0.0) {
        phi0 = hi;
    } else {
        while (hi - lo > 1e-14) {
            const double mid = 0.5 * (lo + hi);
            const double fm = frame_cosine(a1, u, w, mid);
            if (fm == 0.0) {
                lo = hi = mid;
                break;
            }
            if ((fm > 0.0) == (flo > 0.0)) {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
                fhi = fm;
            }
        }
        phi0 = std::abs(flo) <= std::abs(fhi) ? lo : hi;
    }
    out.phi0 = phi0;
    out.xi_at_root = frame_cosine(a1, u, w, phi0);

    Vec2 xh = std::cos(phi0) * u + std::sin(phi0) * w;
    Vec2 yh = -std::sin(phi0) * u + std::cos(phi0) * w;
    double nu1 = (a1 * xh).norm();
    double nu2 = (a1 * yh).norm();
    if (nu1 > nu2) {
        const Vec2 t = xh;
        xh = yh;
        yh = -t;
        std::swap(nu1, nu2);
    }
    out.r2 = vector_angle(xh) - vector_angle(a1 * xh);
    out.rho = 1.0 / std::sqrt(nu1 * nu2);
    out.lambda = std::sqrt(nu1 / nu2);
    out.r = vector_angle(xh);
    return out;
}

}  // namespace mobdyn
