#include "mobdyn/sphere_map.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace mobdyn {

// ---- model diffeomorphisms -------------------------------------------------

double ModelDiffeo::bump(double s, double radius) {
    const double half = 0.5 * radius;
    if (s <= half) return 1.0;
    if (s >= radius) return 0.0;
    const double u = (s - half) / half;
    return 1.0 - u * u * (3.0 - 2.0 * u);
}

double ModelDiffeo::bump_slope(double s, double radius) {
    const double half = 0.5 * radius;
    if (s <= half || s >= radius) return 0.0;
    const double u = (s - half) / half;
    return -6.0 * u * (1.0 - u) / half;
}

double ModelDiffeo::eps_max(ModelKind kind, double radius) {
    // The smoothstep has slope bound 3/R; the Jacobian determinant is
    // 1 + eps * (bounded term) with the bound below.
    const double lip = 3.0 / radius;
    return kind == ModelKind::shear ? 2.0 / (lip * radius) : 1.0 / (lip * radius);
}

ModelDiffeo::ModelDiffeo(ModelKind kind, double eps, double radius)
    : kind_(kind), eps_(eps), radius_(radius) {
    if (!(radius > 0.0) || !std::isfinite(radius)) throw std::invalid_argument("ModelDiffeo: radius must be positive");
    if (!(eps > 0.0) || !(eps < eps_max(kind, radius)))
        throw std::invalid_argument("ModelDiffeo: eps outside (0, eps_max)");
    for (int i = 1; i <= 64; ++i) {
        const double s = radius * i / 64.0;
        for (int j = 0; j < 128; ++j) {
            const double th = 2.0 * std::numbers::pi * j / 128.0;
            if (!(jacobian(std::polar(s, th)).determinant() > 0.0))
                throw std::invalid_argument("ModelDiffeo: Jacobian sign check failed");
        }
    }
}

cplx ModelDiffeo::forward(cplx z) const {
    const double b = bump(std::abs(z), radius_);
    if (b == 0.0) return z;
    if (kind_ == ModelKind::shear) return {z.real() + eps_ * b * z.imag(), z.imag()};
    return {z.real() * (1.0 + eps_ * b), z.imag()};
}

Mat2 ModelDiffeo::jacobian(cplx z) const {
    const double x = z.real(), y = z.imag();
    const double r = std::abs(z);
    Mat2 j = Mat2::Identity();
    if (r >= radius_) return j;
    const double b = bump(r, radius_);
    const double bp = bump_slope(r, radius_);
    const double gx = bp == 0.0 ? 0.0 : bp * x / r;  // d b / dx
    const double gy = bp == 0.0 ? 0.0 : bp * y / r;  // d b / dy
    if (kind_ == ModelKind::shear) {
        j(0, 0) = 1.0 + eps_ * gx * y;
        j(0, 1) = eps_ * (b + gy * y);
    } else {
        j(0, 0) = 1.0 + eps_ * (b + gx * x);
        j(0, 1) = eps_ * gy * x;
    }
    return j;
}

cplx ModelDiffeo::backward(cplx w) const {
    if (std::abs(w) >= radius_) return w;
    const double xt = w.real(), y = w.imag();
    double lo, hi;
    if (kind_ == ModelKind::shear) {
        lo = xt - eps_ * std::abs(y);
        hi = xt + eps_ * std::abs(y);
    } else {
        lo = std::min(xt, xt / (1.0 + eps_));
        hi = std::max(xt, xt / (1.0 + eps_));
    }
    if (lo == hi) return {lo, y};
    double x = std::clamp(xt, lo, hi);
    // Relative stopping rule: small points must keep full relative accuracy.
    const double scale = std::abs(xt) + eps_ * std::abs(y);
    for (int it = 0; it < 200; ++it) {
        const cplx z(x, y);
        const double f = forward(z).real() - xt;
        if (std::abs(f) <= 0.5 * std::numeric_limits<double>::epsilon() * scale) break;
        if (f > 0.0) hi = x; else lo = x;
        const double d = jacobian(z)(0, 0);
        double xn = x - f / d;
        if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);
        if (xn == x) break;
        x = xn;
    }
    return {x, y};
}

// ---- sphere maps -----------------------------------------------------------

Mat2 complex_as_matrix(cplx d) {
    Mat2 m;
    m << d.real(), -d.imag(), d.imag(), d.real();
    return m;
}

Mat2 mobius_chart_jacobian(const MobiusMap& m, const ExtPoint& p) {
    const cplx a = m.a(), b = m.b(), c = m.c(), d = m.d();
    const ExtPoint q = m(p);
    cplx deriv;
    if (p.is_finite() && q.is_finite()) {
        deriv = m.derivative(p.value());
    } else if (p.is_infinite() && q.is_finite()) {
        deriv = -1.0 / (c * c);          // z = 1/w
    } else if (p.is_finite()) {
        const cplx s = a * p.value() + b;  // chart 1/M(z)
        deriv = -1.0 / (s * s);
    } else {
        deriv = d / a;                    // 1/M(1/w) near w = 0
    }
    return complex_as_matrix(deriv);
}

SphereMap::SphereMap(const MobiusMap& m) { prims_.push_back(m); }

SphereMap SphereMap::linear(const Mat2& m) {
    if (!(m.determinant() > 0.0)) throw std::invalid_argument("SphereMap::linear: determinant must be positive");
    SphereMap s;
    s.prims_.push_back(LinearPrim{m});
    return s;
}

SphereMap SphereMap::model(const ModelDiffeo& d) {
    SphereMap s;
    s.prims_.push_back(ModelPrim{d, false});
    return s;
}

SphereMap SphereMap::power(const SphereMap& g, long n) {
    if (n == 0) return identity();
    if (n == 1) return g;
    if (n == -1) return g.inverse();
    if (const MobiusMap* m = g.as_mobius()) {
        MobiusMap acc;
        const MobiusMap step = n > 0 ? *m : m->inverse();
        for (long i = 0; i < std::abs(n); ++i) acc = compose(step, acc);
        return SphereMap(acc);
    }
    SphereMap s;
    s.prims_.push_back(PowerPrim{std::make_shared<const SphereMap>(g),
                                 std::make_shared<const SphereMap>(g.inverse()), n});
    return s;
}

const MobiusMap* SphereMap::as_mobius() const {
    if (prims_.size() != 1) return nullptr;
    return std::get_if<MobiusMap>(&prims_.front());
}

namespace {

// |A|_F^2 / |det A|; a Mobius matrix far above 1 mixes wildly different scales.
double conditioning(const MobiusMap& m) {
    return (std::norm(m.a()) + std::norm(m.b()) + std::norm(m.c()) + std::norm(m.d())) /
           std::abs(m.a() * m.d() - m.b() * m.c());
}

// Fusing a huge rescaling into its neighbour cancels the small parts of the
// image, so such factors are kept apart and applied one after the other.
constexpr double kFuseConditioning = 1e6;

}  // namespace

void SphereMap::push(Primitive p) {
    if (!prims_.empty()) {
        auto* last = std::get_if<MobiusMap>(&prims_.back());
        const auto* next = std::get_if<MobiusMap>(&p);
        if (last && next && conditioning(*last) < kFuseConditioning && conditioning(*next) < kFuseConditioning) {
            *last = compose(*next, *last);
            return;
        }
    }
    prims_.push_back(std::move(p));
}

SphereMap compose(const SphereMap& outer, const SphereMap& inner) {
    SphereMap s = inner;
    for (const auto& p : outer.prims_) s.push(p);
    return s;
}

namespace {

struct Evaluator {
    ExtPoint z;
    ExtPoint operator()(const MobiusMap& m) const { return m(z); }
    ExtPoint operator()(const LinearPrim& l) const {
        if (z.is_infinite()) return z;
        const Vec2 v = l.m * Vec2(z.re(), z.im());
        return ExtPoint(v.x(), v.y());
    }
    ExtPoint operator()(const ModelPrim& m) const {
        if (z.is_infinite()) return z;
        return ExtPoint(m.inverted ? m.model.backward(z.value()) : m.model.forward(z.value()));
    }
    ExtPoint operator()(const PowerPrim& p) const {
        const SphereMap& step = p.exponent > 0 ? *p.base : *p.base_inv;
        ExtPoint w = z;
        for (long i = 0; i < std::abs(p.exponent); ++i) w = step(w);
        return w;
    }
};

struct Differentiator {
    ExtPoint z;
    Mat2 operator()(const MobiusMap& m) const { return mobius_chart_jacobian(m, z); }
    Mat2 operator()(const LinearPrim& l) const {
        if (z.is_infinite()) throw std::domain_error("differential: real-linear map is not C^1 at infinity");
        return l.m;
    }
    Mat2 operator()(const ModelPrim& m) const {
        if (z.is_infinite()) return Mat2::Identity();
        if (!m.inverted) return m.model.jacobian(z.value());
        return m.model.jacobian(m.model.backward(z.value())).inverse();
    }
    Mat2 operator()(const PowerPrim& p) const {
        const SphereMap& step = p.exponent > 0 ? *p.base : *p.base_inv;
        ExtPoint w = z;
        Mat2 j = Mat2::Identity();
        for (long i = 0; i < std::abs(p.exponent); ++i) {
            j = step.differential(w) * j;
            w = step(w);
        }
        return j;
    }
};

struct Inverter {
    Primitive operator()(const MobiusMap& m) const { return m.inverse(); }
    Primitive operator()(const LinearPrim& l) const { return LinearPrim{l.m.inverse()}; }
    Primitive operator()(const ModelPrim& m) const { return ModelPrim{m.model, !m.inverted}; }
    Primitive operator()(const PowerPrim& p) const { return PowerPrim{p.base, p.base_inv, -p.exponent}; }
};

}  // namespace

ExtPoint SphereMap::operator()(const ExtPoint& z) const {
    ExtPoint w = z;
    for (const auto& p : prims_) w = std::visit(Evaluator{w}, p);
    return w;
}

cplx SphereMap::operator()(cplx z) const {
    return (*this)(ExtPoint(z)).value();
}

Mat2 SphereMap::differential(const ExtPoint& p) const {
    ExtPoint w = p;
    Mat2 j = Mat2::Identity();
    for (const auto& prim : prims_) {
        j = std::visit(Differentiator{w}, prim) * j;
        w = std::visit(Evaluator{w}, prim);
    }
    return j;
}

SphereMap SphereMap::inverse() const {
    SphereMap s;
    for (auto it = prims_.rbegin(); it != prims_.rend(); ++it) s.push(std::visit(Inverter{}, *it));
    return s;
}

Mat2 finite_difference_jacobian(const SphereMap& g, cplx z, double h) {
    const cplx fx = (g(z + cplx(h, 0.0)) - g(z - cplx(h, 0.0))) / (2.0 * h);
    const cplx fy = (g(z + cplx(0.0, h)) - g(z - cplx(0.0, h))) / (2.0 * h);
    Mat2 j;
    j << fx.real(), fy.real(), fx.imag(), fy.imag();
    return j;
}

double sup_chordal_distance(const SphereMap& f, const SphereMap& g, const std::vector<ExtPoint>& pts) {
    double worst = 0.0;
    for (const auto& p : pts) worst = std::max(worst, chordal_dist(f(p), g(p)));
    return worst;
}

}  // namespace mobdyn
