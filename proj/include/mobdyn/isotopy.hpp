#pragma once

#include "mobdyn/sphere_map.hpp"

#include <functional>
#include <string>
#include <vector>

namespace mobdyn {

// Time-indexed family of sphere maps on [t0, t1] with t0 <= 0 <= t1 and the
// identity at time 0. Values are rebuilt symbolically at each query.
class Isotopy {
public:
    using Family = std::function<SphereMap(double)>;

    Isotopy(double t0, double t1, Family f);
    static Isotopy constant_identity(double t0 = 0.0, double t1 = 1.0);

    // Throws std::out_of_range outside [t0, t1].
    SphereMap at(double t) const;
    ExtPoint trace(double t, const ExtPoint& z) const { return at(t)(z); }
    double t0() const { return t0_; }
    double t1() const { return t1_; }

private:
    double t0_, t1_;
    Family f_;
};

// ---- algebra ---------------------------------------------------------------

// M o f_t o M^-1.
Isotopy conjugate(const SphereMap& m, const Isotopy& f);
// t -> f_{-t} on the mirrored interval.
Isotopy reverse(const Isotopy& f);
// t -> f_{origin + t} o f_origin^-1 on [s0 - origin, s1 - origin].
Isotopy restrict_shift(const Isotopy& f, double s0, double s1, double origin);
// t -> f_{sigma(t)} on [t0, t1], where sigma(0) must be 0.
Isotopy reparametrize(const Isotopy& f, double t0, double t1, std::function<double(double)> sigma);

// Three-piece concatenation on [0, 1] through a meeting point f_a(z) = h_b(w):
//   [0, 1/3]   f_{3at}
//   [1/3, 2/3] h_{(2-3t)b} o h_b^-1 o f_a
//   [2/3, 1]   g_{3t-2} o h_b^-1 o f_a
// Throws std::out_of_range when a or b lies outside its isotopy's interval.
Isotopy concat_through_meeting(const Isotopy& f, double a, const Isotopy& h, double b, const Isotopy& g);

// ---- the extension isotopy -------------------------------------------------

struct ExtensionIsotopy {
    Isotopy isotopy;
    SphereMap normalized;   // conjugated map with differential diag(mu, 1/mu) at 0
    SaddleFactorization factorization;
    double mu = 1.0;
};

// Polar angle of diag(mu,1/mu)^-1 R_s diag(mu,1/mu) e_x, continuous in s.
double extension_angle(double mu, double s);
// Dg_t(0) of the extension isotopy for normalized saddle rate mu.
Mat2 extension_differential(double mu, double t);

// Throws SaddleError("conformal input") when Dh(0) is conformal, and
// std::domain_error when h moves 0 or infinity.
ExtensionIsotopy extension_isotopy(const SphereMap& h);

// ---- verification ----------------------------------------------------------

// Deterministic near-uniform points on the sphere, including neither pole.
std::vector<ExtPoint> verification_points(int n = 100);

double identity_defect(const SphereMap& f, const std::vector<ExtPoint>& pts);
// Largest sup-chordal displacement between consecutive grid times.
double continuity_modulus(const Isotopy& f, double step, const std::vector<ExtPoint>& pts);

// C^1 distance between s -> g(r e^{2 pi i s}) / r and s -> Dg(0) e^{2 pi i s}
// on [0, 1], with a 1024-point grid and central differences of step 1/4096.
double rescaled_circle_c1_gap(const SphereMap& g, double r);

}  // namespace mobdyn

namespace mobdyn {

// A model diffeo (power of a single admissible one) whose saddle
// normalization has rate mu in (0, 1). Shear: total strength 1/mu - mu.
// Stretch: total factor 1/mu^2.
SphereMap model_with_rate(ModelKind kind, double mu, double radius);

}  // namespace mobdyn
