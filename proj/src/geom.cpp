#include "mobdyn/geom.hpp"

#include <cmath>
#include <numbers>

namespace mobdyn {

ExtPoint::ExtPoint(double re, double im) : z_(re, im) {
    if (!std::isfinite(re) || !std::isfinite(im))
        throw std::domain_error("ExtPoint: non-finite coordinate");
}

ExtPoint::ExtPoint(cplx z) : ExtPoint(z.real(), z.imag()) {}

cplx ExtPoint::value() const {
    if (inf_) throw std::domain_error("ExtPoint: value() at infinity");
    return z_;
}

Cone::Cone(double alpha) : alpha_(alpha) {
    if (!(alpha > 0.0 && alpha < std::numbers::pi / 2))
        throw std::invalid_argument("Cone: half-angle must lie in (0, pi/2)");
}

GammaArc::GammaArc(ExtPoint a_, ExtPoint b_, bool through_inf)
    : a(a_), b(b_), through_infinity(through_inf) {
    if (a == b) throw std::invalid_argument("GammaArc: coincident endpoints");
    if (!on_gamma(a) || !on_gamma(b)) throw std::invalid_argument("GammaArc: endpoint off the meridian");
    if (through_inf && (a.is_infinite() || b.is_infinite()))
        throw std::invalid_argument("GammaArc: an arc ending at infinity cannot pass through it");
}

bool GammaArc::contains(const ExtPoint& z) const {
    if (z == a || z == b) return false;
    if (z.is_infinite()) return through_infinity;
    const double x = z.re();
    if (a.is_infinite() || b.is_infinite()) {
        const double e = a.is_infinite() ? b.re() : a.re();
        // Arc ending at infinity: run along the real axis in the increasing
        // sense from a to b.
        return a.is_infinite() ? x < e : x > e;
    }
    const double lo = std::min(a.re(), b.re()), hi = std::max(a.re(), b.re());
    const bool inside = x > lo && x < hi;
    return through_infinity ? !inside : inside;
}

SpherePoint stereo_inv(const ExtPoint& z) {
    if (z.is_infinite()) return {0.0, 0.0, 1.0};
    const double x = z.re(), y = z.im();
    const double r2 = x * x + y * y;
    const double s = 1.0 + r2;
    return {2.0 * x / s, 2.0 * y / s, (r2 - 1.0) / s};
}

ExtPoint stereo(const SpherePoint& p) {
    const double den = 1.0 - p.z;
    if (den <= 0.0 || (p.x == 0.0 && p.y == 0.0 && p.z > 0.0)) return ExtPoint::infinity();
    // Use the lower-hemisphere form when it is the better conditioned one.
    if (p.z > 0.0) {
        const double rho2 = p.x * p.x + p.y * p.y;
        const double k = (1.0 + p.z) / rho2;
        return ExtPoint(p.x * k, p.y * k);
    }
    return ExtPoint(p.x / den, p.y / den);
}

double chordal_dist(const ExtPoint& z, const ExtPoint& w) {
    if (z.is_infinite() && w.is_infinite()) return 0.0;
    if (z.is_infinite() || w.is_infinite()) {
        const cplx v = z.is_infinite() ? w.value() : z.value();
        return 2.0 / std::sqrt(1.0 + std::norm(v));
    }
    const cplx a = z.value(), b = w.value();
    return 2.0 * std::abs(a - b) / std::sqrt((1.0 + std::norm(a)) * (1.0 + std::norm(b)));
}

double polar_angle(cplx z) {
    if (z == cplx(0.0, 0.0)) return 0.0;
    return std::atan2(z.imag(), z.real());
}

bool cone_contains(const Cone& c, cplx z) {
    const double th = polar_angle(z);
    const double a = c.alpha();
    return std::abs(th) <= a || std::abs(std::abs(th) - std::numbers::pi) <= a;
}

bool cone_contains(const Cone& c, const ExtPoint& z) {
    if (z.is_infinite()) throw std::domain_error("cone_contains: cones are planar, got infinity");
    return cone_contains(c, z.value());
}

Hemisphere hemisphere(const ExtPoint& z) {
    if (z.is_infinite() || z.im() == 0.0) return Hemisphere::gamma;
    return z.im() > 0.0 ? Hemisphere::plus : Hemisphere::minus;
}

bool on_gamma(const ExtPoint& z, double tol) {
    return z.is_infinite() || std::abs(z.im()) <= tol;
}

double angle_between(cplx z, cplx w) {
    const double c = (z.real() * w.real() + z.imag() * w.imag());
    const double s = (z.real() * w.imag() - z.imag() * w.real());
    return std::abs(std::atan2(s, c));
}

}  // namespace mobdyn
