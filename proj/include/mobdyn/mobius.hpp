#pragma once

#include "mobdyn/geom.hpp"

#include <string_view>

namespace mobdyn {

enum class MobiusClass { identity, parabolic, elliptic, hyperbolic, loxodromic };
std::string_view to_string(MobiusClass c);

// z -> (a z + b) / (c z + d), stored with ad - bc = 1.
class MobiusMap {
public:
    MobiusMap() = default;
    // Throws std::invalid_argument when ad - bc vanishes.
    MobiusMap(cplx a, cplx b, cplx c, cplx d);

    static MobiusMap identity() { return {}; }
    static MobiusMap rotation(double angle);  // z -> e^{i angle} z
    static MobiusMap scaling(cplx k);          // z -> k z

    cplx a() const { return a_; }
    cplx b() const { return b_; }
    cplx c() const { return c_; }
    cplx d() const { return d_; }

    ExtPoint operator()(const ExtPoint& z) const;
    cplx derivative(cplx z) const;  // complex derivative at a finite non-pole point

    MobiusMap inverse() const;
    friend MobiusMap compose(const MobiusMap& outer, const MobiusMap& inner);

    // Equality up to the sign ambiguity of the normalized coefficients.
    bool approx_equal(const MobiusMap& other, double tol) const;
    bool is_identity(double tol = 1e-12) const { return approx_equal(identity(), tol); }

private:
    void normalize();
    cplx a_{1.0}, b_{0.0}, c_{0.0}, d_{1.0};
};

MobiusMap compose(const MobiusMap& outer, const MobiusMap& inner);
MobiusClass classify(const MobiusMap& m, double tol = 1e-9);

// Sends a -> 0, b -> 1, c -> infinity.
MobiusMap three_point_map(const ExtPoint& a, const ExtPoint& b, const ExtPoint& c);
// w -> (y/x) w.
MobiusMap pole_fixing_map(const ExtPoint& x, const ExtPoint& y);
// w -> w / z, the pole-fixing map taking z to 1.
MobiusMap normalize_to_one(const ExtPoint& z);

enum class RefPoint { zero, one, infinity };
ExtPoint ref_point(RefPoint p);
// The involution exchanging two of {0, 1, infinity} and fixing the third.
MobiusMap swap_map(RefPoint p, RefPoint q);

}  // namespace mobdyn
