#pragma once

#include "mobdyn/isotopy.hpp"

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mobdyn {

// Sampled curve in the finite plane that can be re-evaluated anywhere.
class PlanarCurve {
public:
    using Eval = std::function<ExtPoint(double)>;

    // n evenly spaced parameters over [s0, s1]; a closed curve omits s1 since
    // it repeats s0. Throws std::invalid_argument for n < 2, s1 <= s0 or an
    // infinite sample.
    static PlanarCurve sample(Eval eval, double s0, double s1, int n, bool closed);
    // Given increasing parameters starting at s0; s1 is the period end for a
    // closed curve and the last parameter otherwise.
    static PlanarCurve from_params(Eval eval, std::vector<double> params, double s1, bool closed);
    // The circle r e^{2 pi i s}, s in [0, 1).
    static PlanarCurve circle(double r, int n, cplx center = {0.0, 0.0});
    // f applied to the circle of radius r.
    static PlanarCurve mapped_circle(const SphereMap& f, double r, int n);

    const std::vector<double>& params() const { return params_; }
    const std::vector<ExtPoint>& points() const { return points_; }
    std::size_t size() const { return params_.size(); }
    bool closed() const { return closed_; }
    double s0() const { return s0_; }
    double s1() const { return s1_; }
    ExtPoint operator()(double s) const { return eval_(s); }
    // Maps a parameter into [s0, s1) for closed curves, clamps otherwise.
    double wrap(double s) const;

private:
    PlanarCurve() = default;
    std::vector<double> params_;
    std::vector<ExtPoint> points_;
    Eval eval_;
    double s0_ = 0.0, s1_ = 1.0;
    bool closed_ = false;
};

struct Intersection {
    ExtPoint point;
    double s = 0.0;  // parameter on the first curve
    double t = 0.0;  // parameter on the second curve
    double transversality = 0.0;  // |sin| of the crossing angle
};

struct CrossingCertificate {
    std::vector<Intersection> points;

    std::size_t size() const { return points.size(); }
    double min_transversality() const;
};

inline constexpr int kMinCurveSamples = 256;
inline constexpr double kTransversalityFloor = 1e-3;
inline constexpr double kDedupChordal = 1e-8;
inline constexpr double kOnCurveChordal = 1e-9;

class TangentialIntersection : public std::runtime_error {
public:
    TangentialIntersection(const std::string& what, ExtPoint where)
        : std::runtime_error(what), where_(where) {}
    ExtPoint where() const { return where_; }

private:
    ExtPoint where_;
};

class CrossingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Segment crossings of the two polylines, each refined on the true curves.
// Throws std::invalid_argument below kMinCurveSamples samples,
// TangentialIntersection on an overlap or a crossing below the floor, and
// CrossingError if a refined point does not sit on both curves.
CrossingCertificate curve_intersections(const PlanarCurve& c1, const PlanarCurve& c2);

// A point where a closed curve on the sphere crosses the real meridian.
struct MeridianHit {
    double s = 0.0;
    ExtPoint point;
};

// Sign changes of the stereographic y-coordinate along s in [0, 1), each
// bisected to machine width. The curve must not pass through a grid point
// on the meridian.
std::vector<MeridianHit> meridian_crossings(const std::function<ExtPoint(double)>& curve, int samples = 4096);

struct FourPointIsotopy {
    Isotopy k = Isotopy::constant_identity();
    double r0 = 0.0;
    int halvings = 0;
    CrossingCertificate circle_cert;  // S_r0 against g(S_r0)
    ExtPoint a, b, c, d;              // preimages, anticlockwise
    MobiusMap start;                  // M_0, sends (0, 1, inf) to (a, b, c)
    std::vector<MeridianHit> image_hits;  // k_1(Gamma) against Gamma
    ExtPoint w0;                      // the fourth point of k_1(Gamma) on Gamma
};

inline constexpr int kRadiusSearchSteps = 30;
inline constexpr int kCircleSamples = 512;

// Count of transversal crossings of S_r and g(S_r).
CrossingCertificate circle_image_intersections(const SphereMap& g, double r, int samples = kCircleSamples);

// g is an isotopy on [0, 1] from the identity to a map with a saddle at 0.
// Radii 0.5 2^-j for j < kRadiusSearchSteps; throws CrossingError when no
// radius gives exactly four transversal crossings.
FourPointIsotopy four_point_isotopy(const Isotopy& g);

struct Ejection {
    Isotopy h = Isotopy::constant_identity();
    bool conjugated = false;  // went through M_{1 inf 0}
};

inline constexpr double kEjectMargin = 1e-6;

// Pushes the real point z0 off the meridian. Throws std::invalid_argument
// unless z0 is finite, real and outside {0, 1}; CrossingError if neither k
// nor its conjugate moves it far enough.
Ejection eject_from_gamma(const FourPointIsotopy& fp, const ExtPoint& z0);

// Where the trapped arc of the meridian was moved to (0, 1).
enum class TrappedArc { zero_one, one_infinity, infinity_zero };

struct CrossingAudit {
    double step = 0.0;
    long samples = 0;
    long near_real = 0;     // samples with |Im| < 1e-9
    long sign_changes = 0;  // consecutive samples in opposite open hemispheres
    bool only_zero_one = false;
    bool endpoints_ok = false;
};

struct CrossingIsotopy {
    Isotopy j = Isotopy::constant_identity(-1.0, 1.0);
    ExtPoint z_hat;   // in (0, 1)
    ExtPoint z0;      // the ejected real point
    bool ejected_by_conjugate = false;
    ExtPoint u0;
    double perturbation = 0.0;
    double t_minus = 0.0, t_plus = 0.0, delta = 0.0;
    TrappedArc arc = TrappedArc::zero_one;
    bool time_reversed = false;  // h_1(z0) landed in the lower half-plane
    CrossingAudit coarse, fine;
};

inline constexpr double kCrossingGrid = 1e-4;

// Throws CrossingError when the perturbation search or the certification
// fails.
CrossingIsotopy crossing_isotopy(const FourPointIsotopy& fp, const ExtPoint& z0 = ExtPoint(0.37, 0.0));

// Samples J_t(z_hat) every `step` over [-1, 1].
CrossingAudit audit_crossing(const Isotopy& j, const ExtPoint& z_hat, double step);

}  // namespace mobdyn
