#pragma once

#include "mobdyn/isotopy.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>

namespace mobdyn {

// Search caps and sample sizes shared by the cone searches.
inline constexpr double kConeSearchCap = 1.0;   // largest radius ever tried
inline constexpr int kConeSamples = 10000;
inline constexpr int kConeTimes = 101;
inline constexpr int kOmegaSteps = 64;
inline constexpr int kShrinkBudget = 20;
inline constexpr double kSafetyMargin = 1.1;
inline constexpr long kEscapeCap = 100000;
inline constexpr int kStableStay = 50;

// Angular distance from the polar angle of z to the x-axis, in [0, pi/2].
double folded_angle(cplx z);

struct TauDelta {
    double tau = 0.0;
    double delta = 0.0;
    int omega_steps = kOmegaSteps;  // resolution of the rotation grid
    int samples = kConeSamples;
};

struct ConeConstants {
    double alpha = 0.0;
    double beta_minus = 0.0;
    double beta_plus = 0.0;
    double rho = 0.0;
    // Resolution the constants were verified at.
    int samples = kConeSamples;
    int times = kConeTimes;
    int halvings = 0;
};

struct ConeAudit {
    long checked = 0;
    long violations = 0;         // any failure of the two implications
    long strict_violations = 0;  // failures beyond the 10% margin band
    double rate() const { return checked ? static_cast<double>(violations) / checked : 0.0; }
};

struct EscapeRecord {
    ExtPoint point;
    long n = 0;
    long bound = kEscapeCap;
};

// Raised when a search runs out of budget; carries the offending sample.
class ConeSearchError : public std::runtime_error {
public:
    ConeSearchError(const std::string& what, cplx sample, double time)
        : std::runtime_error(what), sample_(sample), time_(time) {}
    cplx sample() const { return sample_; }
    double time() const { return time_; }

private:
    cplx sample_;
    double time_;
};

class EscapeCapExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Largest grid-verified (tau, delta) with R_w(g(z)) outside C_alpha for every
// sampled z outside C_alpha with |z| < delta and |w| < tau. Throws
// std::invalid_argument unless Dg(0) = diag(l, 1/l), 0 < l < 1, within 1e-8.
TauDelta find_tau_delta(const SphereMap& g, double alpha, std::uint64_t seed = 1);

// Cone constants for an isotopy fixing 0 whose differential at 0 keeps the
// x-axis: for |z| < rho, z outside C_alpha stays outside C_beta+, and z in
// C_beta- stays in C_beta+. Shrinks rho by halves, at most 20 times.
ConeConstants find_cone_constants(const Isotopy& f, double alpha, std::uint64_t seed = 1);

// Re-checks both implications on a fresh sample over 101 times.
ConeAudit audit_cone_constants(const Isotopy& f, const ConeConstants& c, std::uint64_t seed,
                               int samples = kConeSamples);

// Angle of the stable manifold of g's saddle at 0 on the circle of radius r,
// by escape-side bisection inside the disk of radius rho0. Throws
// std::runtime_error if no sign bracket exists within |angle| <= pi/4 or the
// result does not stay 50 iterates.
double stable_manifold_angle(const SphereMap& g, double r, double rho0);

// First n with |g^n(z)| > rho0. Throws EscapeCapExceeded past `cap`.
EscapeRecord escape_time(const SphereMap& g, const ExtPoint& z, double rho0, long cap = kEscapeCap);

// Max escape time over 512 points of the circle |z| = rho1 outside the open
// cone C_alpha, plus 2.
long escape_bound(const SphereMap& g, double rho0, double rho1, double alpha);

}  // namespace mobdyn
