#pragma once

#include "mobdyn/geom.hpp"
#include "mobdyn/mobius.hpp"
#include "mobdyn/saddle.hpp"

#include <memory>
#include <variant>
#include <vector>

namespace mobdyn {

enum class ModelKind { shear, stretch };

// Bump-supported perturbation of the identity:
//   shear:   (x, y) -> (x + eps b(|z|) y, y)
//   stretch: (x, y) -> (x (1 + eps b(|z|)), y)
// with b = 1 on [0, R/2], 0 on [R, inf), C^1 smoothstep between.
class ModelDiffeo {
public:
    // Throws std::invalid_argument unless 0 < eps < eps_max(kind, R) and the
    // Jacobian stays positive on a sample grid.
    ModelDiffeo(ModelKind kind, double eps, double radius);

    static double eps_max(ModelKind kind, double radius);
    static double bump(double s, double radius);
    static double bump_slope(double s, double radius);

    ModelKind kind() const { return kind_; }
    double eps() const { return eps_; }
    double radius() const { return radius_; }

    cplx forward(cplx z) const;
    cplx backward(cplx z) const;
    Mat2 jacobian(cplx z) const;

private:
    ModelKind kind_;
    double eps_;
    double radius_;
};

// Real-linear map of the plane, fixing infinity. Only C^1 at infinity when
// conformal, so the differential query there is refused.
struct LinearPrim {
    Mat2 m;
};

struct ModelPrim {
    ModelDiffeo model;
    bool inverted = false;
};

class SphereMap;

struct PowerPrim {
    std::shared_ptr<const SphereMap> base;
    std::shared_ptr<const SphereMap> base_inv;
    long exponent = 0;
};

using Primitive = std::variant<MobiusMap, LinearPrim, ModelPrim, PowerPrim>;

// Orientation-preserving self-map of the sphere kept as a list of primitives
// in application order (front is applied first).
class SphereMap {
public:
    SphereMap() = default;
    SphereMap(const MobiusMap& m);  // NOLINT: implicit promotion is intended
    static SphereMap identity() { return {}; }
    static SphereMap linear(const Mat2& m);
    static SphereMap model(const ModelDiffeo& d);
    // g^n; negative exponents iterate the inverse.
    static SphereMap power(const SphereMap& g, long n);

    ExtPoint operator()(const ExtPoint& z) const;
    cplx operator()(cplx z) const;  // throws if the image is infinite

    // Jacobian in charts: standard coordinates at finite points, w = 1/z at
    // infinity, on both source and target sides.
    Mat2 differential(const ExtPoint& p) const;
    Mat2 differential_at_origin() const { return differential(ExtPoint(0.0, 0.0)); }

    SphereMap inverse() const;
    friend SphereMap compose(const SphereMap& outer, const SphereMap& inner);

    const std::vector<Primitive>& primitives() const { return prims_; }
    bool is_identity_list() const { return prims_.empty(); }
    // Set when the whole list collapsed to one Möbius map.
    const MobiusMap* as_mobius() const;

private:
    void push(Primitive p);
    std::vector<Primitive> prims_;
};

SphereMap compose(const SphereMap& outer, const SphereMap& inner);
inline SphereMap operator*(const SphereMap& f, const SphereMap& g) { return compose(f, g); }

// Complex derivative as a real 2x2 matrix.
Mat2 complex_as_matrix(cplx d);

// Chart Jacobian of a Möbius map at p.
Mat2 mobius_chart_jacobian(const MobiusMap& m, const ExtPoint& p);

// Central finite-difference Jacobian at a finite point with finite image.
Mat2 finite_difference_jacobian(const SphereMap& g, cplx z, double h = 1e-6);

double sup_chordal_distance(const SphereMap& f, const SphereMap& g, const std::vector<ExtPoint>& pts);

}  // namespace mobdyn
