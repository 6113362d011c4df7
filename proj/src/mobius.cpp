#include "mobdyn/mobius.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mobdyn {

std::string_view to_string(MobiusClass c) {
    switch (c) {
        case MobiusClass::identity: return "identity";
        case MobiusClass::parabolic: return "parabolic";
        case MobiusClass::elliptic: return "elliptic";
        case MobiusClass::hyperbolic: return "hyperbolic";
        case MobiusClass::loxodromic: return "loxodromic";
    }
    return "?";
}

MobiusMap::MobiusMap(cplx a, cplx b, cplx c, cplx d) : a_(a), b_(b), c_(c), d_(d) {
    normalize();
}

void MobiusMap::normalize() {
    const cplx det = a_ * d_ - b_ * c_;
    if (std::abs(det) == 0.0 || !std::isfinite(std::abs(det)))
        throw std::invalid_argument("MobiusMap: degenerate coefficients");
    const cplx s = std::sqrt(det);
    a_ /= s;
    b_ /= s;
    c_ /= s;
    d_ /= s;
}

MobiusMap MobiusMap::rotation(double angle) {
    return scaling(std::polar(1.0, angle));
}

MobiusMap MobiusMap::scaling(cplx k) {
    return {k, 0.0, 0.0, 1.0};
}

ExtPoint MobiusMap::operator()(const ExtPoint& z) const {
    if (z.is_infinite()) {
        if (c_ == cplx(0.0)) return ExtPoint::infinity();
        return ExtPoint(a_ / c_);
    }
    const cplx w = z.value();
    // Far out, divide through by z so small imaginary parts of the image survive.
    const bool far = std::abs(w) > 1.0;
    const cplx v = far ? 1.0 / w : w;
    const cplx num = far ? a_ + b_ * v : a_ * v + b_;
    const cplx den = far ? c_ + d_ * v : c_ * v + d_;
    // A denominator at rounding level of its own terms is a pole.
    const double scale = far ? std::abs(c_) + std::abs(d_ * v) : std::abs(c_ * v) + std::abs(d_);
    if (std::abs(den) <= 4.0 * std::numeric_limits<double>::epsilon() * scale) return ExtPoint::infinity();
    const cplx r = num / den;
    if (!std::isfinite(r.real()) || !std::isfinite(r.imag())) return ExtPoint::infinity();
    return ExtPoint(r);
}

cplx MobiusMap::derivative(cplx z) const {
    const cplx den = c_ * z + d_;
    return 1.0 / (den * den);
}

MobiusMap MobiusMap::inverse() const {
    return {d_, -b_, -c_, a_};
}

MobiusMap compose(const MobiusMap& f, const MobiusMap& g) {
    return {f.a_ * g.a_ + f.b_ * g.c_, f.a_ * g.b_ + f.b_ * g.d_,
            f.c_ * g.a_ + f.d_ * g.c_, f.c_ * g.b_ + f.d_ * g.d_};
}

bool MobiusMap::approx_equal(const MobiusMap& o, double tol) const {
    auto dist = [&](double sgn) {
        return std::max({std::abs(a_ - sgn * o.a_), std::abs(b_ - sgn * o.b_),
                         std::abs(c_ - sgn * o.c_), std::abs(d_ - sgn * o.d_)});
    };
    return std::min(dist(1.0), dist(-1.0)) <= tol;
}

MobiusClass classify(const MobiusMap& m, double tol) {
    if (m.is_identity(tol)) return MobiusClass::identity;
    const cplx tr = m.a() + m.d();
    const cplx t2 = tr * tr;
    if (std::abs(t2 - 4.0) <= tol) return MobiusClass::parabolic;
    if (std::abs(t2.imag()) <= tol) {
        const double x = t2.real();
        if (x >= 0.0 && x < 4.0) return MobiusClass::elliptic;
        if (x > 4.0) return MobiusClass::hyperbolic;
    }
    return MobiusClass::loxodromic;
}

MobiusMap three_point_map(const ExtPoint& a, const ExtPoint& b, const ExtPoint& c) {
    if (a == b || b == c || a == c) throw std::invalid_argument("three_point_map: coincident points");
    // z -> ((z - a)(b - c)) / ((z - c)(b - a)), with the infinite factor dropped.
    if (a.is_infinite()) {
        const cplx B = b.value(), C = c.value();
        return {0.0, B - C, 1.0, -C};
    }
    if (b.is_infinite()) {
        const cplx A = a.value(), C = c.value();
        return {1.0, -A, 1.0, -C};
    }
    if (c.is_infinite()) {
        const cplx A = a.value(), B = b.value();
        return {1.0, -A, 0.0, B - A};
    }
    const cplx A = a.value(), B = b.value(), C = c.value();
    return {B - C, -A * (B - C), B - A, -C * (B - A)};
}

MobiusMap pole_fixing_map(const ExtPoint& x, const ExtPoint& y) {
    if (x.is_infinite() || y.is_infinite() || x.value() == cplx(0.0) || y.value() == cplx(0.0))
        throw std::invalid_argument("pole_fixing_map: points must be finite and nonzero");
    return MobiusMap::scaling(y.value() / x.value());
}

MobiusMap normalize_to_one(const ExtPoint& z) {
    return pole_fixing_map(z, ExtPoint(1.0, 0.0));
}

ExtPoint ref_point(RefPoint p) {
    switch (p) {
        case RefPoint::zero: return ExtPoint(0.0, 0.0);
        case RefPoint::one: return ExtPoint(1.0, 0.0);
        case RefPoint::infinity: break;
    }
    return ExtPoint::infinity();
}

MobiusMap swap_map(RefPoint p, RefPoint q) {
    if (p == q) throw std::invalid_argument("swap_map: points must differ");
    const bool has0 = p == RefPoint::zero || q == RefPoint::zero;
    const bool has1 = p == RefPoint::one || q == RefPoint::one;
    if (has0 && has1) return {-1.0, 1.0, 0.0, 1.0};             // 1 - z
    if (has0) return {0.0, 1.0, 1.0, 0.0};                      // 1 / z
    return {1.0, 0.0, 1.0, -1.0};                               // z / (z - 1)
}

}  // namespace mobdyn
