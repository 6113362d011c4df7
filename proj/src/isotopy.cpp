#include "mobdyn/isotopy.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace mobdyn {

Isotopy::Isotopy(double t0, double t1, Family f) : t0_(t0), t1_(t1), f_(std::move(f)) {
    if (!(t0 <= 0.0 && 0.0 <= t1)) throw std::invalid_argument("Isotopy: interval must contain 0");
    if (!f_) throw std::invalid_argument("Isotopy: empty family");
}

Isotopy Isotopy::constant_identity(double t0, double t1) {
    return {t0, t1, [](double) { return SphereMap::identity(); }};
}

SphereMap Isotopy::at(double t) const {
    if (!(t >= t0_ && t <= t1_)) throw std::out_of_range("Isotopy: time outside the interval");
    return f_(t);
}

Isotopy conjugate(const SphereMap& m, const Isotopy& f) {
    const SphereMap minv = m.inverse();
    return {f.t0(), f.t1(), [m, minv, f](double t) { return m * f.at(t) * minv; }};
}

Isotopy reverse(const Isotopy& f) {
    return {-f.t1(), -f.t0(), [f](double t) { return f.at(-t); }};
}

Isotopy restrict_shift(const Isotopy& f, double s0, double s1, double origin) {
    if (!(s0 <= origin && origin <= s1) || s0 < f.t0() || s1 > f.t1())
        throw std::out_of_range("restrict_shift: window outside the interval");
    const SphereMap base_inv = f.at(origin).inverse();
    return {s0 - origin, s1 - origin, [f, origin, base_inv](double t) { return f.at(origin + t) * base_inv; }};
}

Isotopy reparametrize(const Isotopy& f, double t0, double t1, std::function<double(double)> sigma) {
    if (std::abs(sigma(0.0)) > 0.0) throw std::invalid_argument("reparametrize: sigma(0) must be 0");
    return {t0, t1, [f, sigma](double t) { return f.at(sigma(t)); }};
}

Isotopy concat_through_meeting(const Isotopy& f, double a, const Isotopy& h, double b, const Isotopy& g) {
    if (a < f.t0() || a > f.t1()) throw std::out_of_range("concat_through_meeting: a outside f's interval");
    if (b < h.t0() || b > h.t1()) throw std::out_of_range("concat_through_meeting: b outside h's interval");
    if (g.t0() > 0.0 || g.t1() < 1.0) throw std::out_of_range("concat_through_meeting: g must cover [0, 1]");
    const SphereMap hinv_fa = h.at(b).inverse() * f.at(a);
    return {0.0, 1.0, [=](double t) {
                if (t <= 1.0 / 3.0) return f.at(3.0 * a * t);
                if (t <= 2.0 / 3.0) return h.at((2.0 - 3.0 * t) * b) * hinv_fa;
                return g.at(3.0 * t - 2.0) * hinv_fa;
            }};
}

double extension_angle(double mu, double s) {
    return std::atan2(mu * mu * std::sin(s), std::cos(s));
}

Mat2 extension_differential(double mu, double t) {
    const double s = std::numbers::pi * t / 2.0;
    Mat2 ahat = Mat2::Zero();
    ahat(0, 0) = mu;
    ahat(1, 1) = 1.0 / mu;
    return rotation_matrix(-extension_angle(mu, s)) * ahat.inverse() * rotation_matrix(s) * ahat;
}

ExtensionIsotopy extension_isotopy(const SphereMap& h) {
    const ExtPoint zero(0.0, 0.0);
    if (chordal_dist(h(zero), zero) > 1e-12 || chordal_dist(h(ExtPoint::infinity()), ExtPoint::infinity()) > 1e-12)
        throw std::domain_error("extension_isotopy: map must fix 0 and infinity");
    const SaddleFactorization fac = saddle_normalize(h.differential_at_origin());

    const SphereMap pre = SphereMap(MobiusMap::rotation(fac.r));
    const SphereMap post = SphereMap(compose(MobiusMap::rotation(-fac.r),
                                             compose(MobiusMap::scaling(fac.rho),
                                                     MobiusMap::rotation(fac.r2 + fac.r1))));
    const SphereMap ghat = post * h * pre;
    const SphereMap ghat_inv = ghat.inverse();
    const double mu = fac.lambda;

    Isotopy iso(0.0, 1.0, [ghat, ghat_inv, mu](double t) {
        const double s = std::numbers::pi * t / 2.0;
        return SphereMap(MobiusMap::rotation(-extension_angle(mu, s))) * ghat_inv *
               SphereMap(MobiusMap::rotation(s)) * ghat;
    });
    return {std::move(iso), ghat, fac, mu};
}

std::vector<ExtPoint> verification_points(int n) {
    std::vector<ExtPoint> pts;
    pts.reserve(n);
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < n; ++i) {
        const double z = 1.0 - (2.0 * i + 1.0) / n;
        const double rad = std::sqrt(1.0 - z * z);
        const double th = golden * i;
        pts.push_back(stereo(SpherePoint{rad * std::cos(th), rad * std::sin(th), z}));
    }
    return pts;
}

double identity_defect(const SphereMap& f, const std::vector<ExtPoint>& pts) {
    double worst = 0.0;
    for (const auto& p : pts) worst = std::max(worst, chordal_dist(f(p), p));
    return worst;
}

double continuity_modulus(const Isotopy& f, double step, const std::vector<ExtPoint>& pts) {
    const long n = std::max(1L, std::lround((f.t1() - f.t0()) / step));
    double worst = 0.0;
    SphereMap prev = f.at(f.t0());
    for (long i = 1; i <= n; ++i) {
        const double t = i == n ? f.t1() : f.t0() + (f.t1() - f.t0()) * static_cast<double>(i) / n;
        SphereMap cur = f.at(t);
        worst = std::max(worst, sup_chordal_distance(prev, cur, pts));
        prev = std::move(cur);
    }
    return worst;
}

double rescaled_circle_c1_gap(const SphereMap& g, double r) {
    const Mat2 d = g.differential_at_origin();
    const auto err = [&](double s) {
        const cplx e = std::polar(1.0, 2.0 * std::numbers::pi * s);
        const cplx lhs = g(r * e) / r;
        const Vec2 rhs = d * Vec2(e.real(), e.imag());
        return lhs - cplx(rhs.x(), rhs.y());
    };
    constexpr int kGrid = 1024;
    constexpr double kStep = 1.0 / 4096.0;
    double value_gap = 0.0, slope_gap = 0.0;
    for (int i = 0; i < kGrid; ++i) {
        const double s = static_cast<double>(i) / kGrid;
        value_gap = std::max(value_gap, std::abs(err(s)));
        slope_gap = std::max(slope_gap, std::abs((err(s + kStep) - err(s - kStep)) / (2.0 * kStep)));
    }
    return value_gap + slope_gap;
}

}  // namespace mobdyn

namespace mobdyn {

SphereMap model_with_rate(ModelKind kind, double mu, double radius) {
    if (!(mu > 0.0 && mu < 1.0)) throw std::invalid_argument("model_with_rate: mu must lie in (0, 1)");
    const double cap = 0.95 * ModelDiffeo::eps_max(kind, radius);
    if (kind == ModelKind::shear) {
        // Shears add: n copies of strength eps give strength n eps.
        const double total = 1.0 / mu - mu;
        const long n = static_cast<long>(std::ceil(total / cap));
        return SphereMap::power(SphereMap::model(ModelDiffeo(kind, total / n, radius)), n);
    }
    // Stretches multiply near 0: (1 + eps)^n = 1 / mu^2.
    const double log_total = -2.0 * std::log(mu);
    const long n = static_cast<long>(std::ceil(log_total / std::log1p(cap)));
    return SphereMap::power(SphereMap::model(ModelDiffeo(kind, std::expm1(log_total / n), radius)), n);
}

}  // namespace mobdyn
