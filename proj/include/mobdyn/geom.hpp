#pragma once

#include <complex>
#include <stdexcept>

namespace mobdyn {

using cplx = std::complex<double>;

// Point of the extended plane. Infinity is a tag, never a large float.
class ExtPoint {
public:
    constexpr ExtPoint() = default;
    ExtPoint(double re, double im);
    explicit ExtPoint(cplx z);

    static ExtPoint infinity() {
        ExtPoint p;
        p.inf_ = true;
        return p;
    }

    bool is_infinite() const { return inf_; }
    bool is_finite() const { return !inf_; }
    // Throws std::domain_error at infinity.
    cplx value() const;
    double re() const { return z_.real(); }
    double im() const { return z_.imag(); }

    friend bool operator==(const ExtPoint& a, const ExtPoint& b) {
        if (a.inf_ || b.inf_) return a.inf_ == b.inf_;
        return a.z_ == b.z_;
    }

private:
    cplx z_{0.0, 0.0};
    bool inf_ = false;
};

struct SpherePoint {
    double x = 0.0, y = 0.0, z = -1.0;
};

// Half-angle alpha in (0, pi/2); the double cone around the real axis.
class Cone {
public:
    explicit Cone(double alpha);
    double alpha() const { return alpha_; }

private:
    double alpha_;
};

enum class Hemisphere { plus, minus, gamma };

// Arc of the real meridian between two points of it; `through_infinity`
// picks which of the two complementary arcs.
struct GammaArc {
    ExtPoint a, b;
    bool through_infinity = false;
    GammaArc(ExtPoint a_, ExtPoint b_, bool through_inf);
    // Interior membership for a point already known to be on the meridian.
    bool contains(const ExtPoint& z) const;
};

SpherePoint stereo_inv(const ExtPoint& z);
ExtPoint stereo(const SpherePoint& p);
double chordal_dist(const ExtPoint& z, const ExtPoint& w);

// Polar angle with the convention arg(0) = 0.
double polar_angle(cplx z);
// Throws std::domain_error for z = infinity.
bool cone_contains(const Cone& c, const ExtPoint& z);
bool cone_contains(const Cone& c, cplx z);
Hemisphere hemisphere(const ExtPoint& z);
bool on_gamma(const ExtPoint& z, double tol = 0.0);

// Unsigned angle between two nonzero vectors, in [0, pi].
double angle_between(cplx z, cplx w);

}  // namespace mobdyn
