#include "mobdyn/crossing.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace mobdyn {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double cross(cplx u, cplx v) { return u.real() * v.imag() - u.imag() * v.real(); }
double dot(cplx u, cplx v) { return u.real() * v.real() + u.imag() * v.imag(); }

cplx finite_at(const PlanarCurve& c, double s) {
    const ExtPoint p = c(c.wrap(s));
    if (p.is_infinite()) throw CrossingError("curve evaluation reached infinity");
    return p.value();
}

cplx tangent(const PlanarCurve& c, double s) {
    const double h = 1e-6 * (c.s1() - c.s0());
    return (finite_at(c, s + h) - finite_at(c, s - h)) / (2.0 * h);
}

struct Segment {
    cplx p, q;
    double s, ds;
};

std::vector<Segment> segments(const PlanarCurve& c) {
    std::vector<Segment> out;
    const auto& pts = c.points();
    const auto& par = c.params();
    const std::size_t n = pts.size();
    const std::size_t m = c.closed() ? n : n - 1;
    out.reserve(m);
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t j = (i + 1) % n;
        const double next = j == 0 ? c.s1() : par[j];
        out.push_back({pts[i].value(), pts[j].value(), par[i], next - par[i]});
    }
    return out;
}

// Newton on c1(s) - c2(t) = 0 with finite-difference tangents.
void refine(const PlanarCurve& c1, const PlanarCurve& c2, double& s, double& t) {
    const double span1 = c1.s1() - c1.s0(), span2 = c2.s1() - c2.s0();
    for (int it = 0; it < 40; ++it) {
        const cplx f = finite_at(c1, s) - finite_at(c2, t);
        const cplx a = tangent(c1, s), b = -tangent(c2, t);
        const double det = cross(a, b);
        if (det == 0.0) return;
        // Solve a ds + b dt = -f.
        const double ds = cross(-f, b) / det, dt = cross(a, -f) / det;
        s = c1.wrap(s + ds);
        t = c2.wrap(t + dt);
        if (std::abs(ds) <= 1e-16 * span1 && std::abs(dt) <= 1e-16 * span2) return;
    }
}

}  // namespace

// ---- curves ----------------------------------------------------------------

PlanarCurve PlanarCurve::sample(Eval eval, double s0, double s1, int n, bool closed) {
    if (n < 2 || !(s1 > s0)) throw std::invalid_argument("PlanarCurve: need n >= 2 and s1 > s0");
    PlanarCurve c;
    c.eval_ = std::move(eval);
    c.s0_ = s0;
    c.s1_ = s1;
    c.closed_ = closed;
    const int denom = closed ? n : n - 1;
    for (int i = 0; i < n; ++i) {
        const double s = (!closed && i == n - 1) ? s1 : s0 + (s1 - s0) * i / denom;
        const ExtPoint p = c.eval_(s);
        if (p.is_infinite()) throw std::invalid_argument("PlanarCurve: sample at infinity");
        c.params_.push_back(s);
        c.points_.push_back(p);
    }
    return c;
}

PlanarCurve PlanarCurve::from_params(Eval eval, std::vector<double> params, double s1, bool closed) {
    if (params.size() < 2) throw std::invalid_argument("PlanarCurve: need at least two parameters");
    for (std::size_t i = 1; i < params.size(); ++i)
        if (!(params[i] > params[i - 1])) throw std::invalid_argument("PlanarCurve: parameters must increase");
    if (closed ? !(s1 > params.back()) : s1 != params.back())
        throw std::invalid_argument("PlanarCurve: bad end parameter");
    PlanarCurve c;
    c.eval_ = std::move(eval);
    c.s0_ = params.front();
    c.s1_ = s1;
    c.closed_ = closed;
    for (double s : params) {
        const ExtPoint p = c.eval_(s);
        if (p.is_infinite()) throw std::invalid_argument("PlanarCurve: sample at infinity");
        c.points_.push_back(p);
    }
    c.params_ = std::move(params);
    return c;
}

PlanarCurve PlanarCurve::circle(double r, int n, cplx center) {
    if (!(r > 0.0)) throw std::invalid_argument("PlanarCurve::circle: radius must be positive");
    return sample([r, center](double s) { return ExtPoint(center + std::polar(r, kTwoPi * s)); }, 0.0, 1.0, n, true);
}

PlanarCurve PlanarCurve::mapped_circle(const SphereMap& f, double r, int n) {
    if (!(r > 0.0)) throw std::invalid_argument("PlanarCurve::mapped_circle: radius must be positive");
    return sample([f, r](double s) { return f(ExtPoint(std::polar(r, kTwoPi * s))); }, 0.0, 1.0, n, true);
}

double PlanarCurve::wrap(double s) const {
    if (!closed_) return std::clamp(s, s0_, s1_);
    const double span = s1_ - s0_;
    double w = std::fmod(s - s0_, span);
    if (w < 0.0) w += span;
    return s0_ + w;
}

double CrossingCertificate::min_transversality() const {
    double m = 1.0;
    for (const auto& p : points) m = std::min(m, p.transversality);
    return m;
}

CrossingCertificate curve_intersections(const PlanarCurve& c1, const PlanarCurve& c2) {
    if (c1.size() < kMinCurveSamples || c2.size() < kMinCurveSamples)
        throw std::invalid_argument("curve_intersections: each curve needs at least 256 samples");
    const auto s1 = segments(c1), s2 = segments(c2);
    CrossingCertificate cert;
    for (const Segment& u : s1) {
        const cplx r = u.q - u.p;
        const double ux0 = std::min(u.p.real(), u.q.real()), ux1 = std::max(u.p.real(), u.q.real());
        const double uy0 = std::min(u.p.imag(), u.q.imag()), uy1 = std::max(u.p.imag(), u.q.imag());
        for (const Segment& v : s2) {
            if (std::max(v.p.real(), v.q.real()) < ux0 || std::min(v.p.real(), v.q.real()) > ux1 ||
                std::max(v.p.imag(), v.q.imag()) < uy0 || std::min(v.p.imag(), v.q.imag()) > uy1)
                continue;
            const cplx q = v.q - v.p, diff = v.p - u.p;
            const double denom = cross(r, q);
            const double lr = std::abs(r), lq = std::abs(q);
            if (std::abs(denom) <= 1e-12 * lr * lq) {
                // Parallel: an overlap of positive length is a tangency.
                if (std::abs(cross(diff, r)) > 1e-12 * lr * std::max(lr, std::abs(diff))) continue;
                const double l0 = dot(v.p - u.p, r) / (lr * lr), l1 = dot(v.q - u.p, r) / (lr * lr);
                const double lo = std::max(0.0, std::min(l0, l1)), hi = std::min(1.0, std::max(l0, l1));
                if (hi - lo > 1e-9) throw TangentialIntersection("curve_intersections: curves overlap", ExtPoint(u.p));
                continue;
            }
            const double lam = cross(diff, q) / denom, mu = cross(diff, r) / denom;
            if (lam < 0.0 || lam > 1.0 || mu < 0.0 || mu > 1.0) continue;
            double s = c1.wrap(u.s + lam * u.ds), t = c2.wrap(v.s + mu * v.ds);
            refine(c1, c2, s, t);
            const ExtPoint p1 = c1(s), p2 = c2(t);
            if (chordal_dist(p1, p2) > kOnCurveChordal)
                throw CrossingError("curve_intersections: refined point is not on both curves");
            const bool seen = std::any_of(cert.points.begin(), cert.points.end(), [&](const Intersection& x) {
                return chordal_dist(x.point, p1) < kDedupChordal;
            });
            if (seen) continue;
            const cplx a = tangent(c1, s), b = tangent(c2, t);
            const double sine = std::abs(cross(a, b)) / (std::abs(a) * std::abs(b));
            if (sine < kTransversalityFloor)
                throw TangentialIntersection("curve_intersections: tangential intersection", p1);
            cert.points.push_back({p1, s, t, sine});
        }
    }
    std::sort(cert.points.begin(), cert.points.end(), [](const Intersection& x, const Intersection& y) { return x.s < y.s; });
    return cert;
}

std::vector<MeridianHit> meridian_crossings(const std::function<ExtPoint(double)>& curve, int samples) {
    if (samples < 8) throw std::invalid_argument("meridian_crossings: too few samples");
    const auto height = [&](double s) { return stereo_inv(curve(s)).y; };
    std::vector<double> y(samples);
    for (int i = 0; i < samples; ++i) {
        y[i] = height(static_cast<double>(i) / samples);
        if (y[i] == 0.0) throw CrossingError("meridian_crossings: a grid point lies on the meridian");
    }
    std::vector<MeridianHit> hits;
    for (int i = 0; i < samples; ++i) {
        const int j = (i + 1) % samples;
        if ((y[i] > 0.0) == (y[j] > 0.0)) continue;
        double lo = static_cast<double>(i) / samples, hi = static_cast<double>(i + 1) / samples;
        const bool lo_up = y[i] > 0.0;
        for (int it = 0; it < 80; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (mid <= lo || mid >= hi) break;
            const double ym = height(mid);
            if (ym == 0.0) {
                lo = hi = mid;
                break;
            }
            ((ym > 0.0) == lo_up ? lo : hi) = mid;
        }
        const double s = 0.5 * (lo + hi);
        hits.push_back({s >= 1.0 ? s - 1.0 : s, curve(s >= 1.0 ? s - 1.0 : s)});
    }
    return hits;
}

// ---- four crossings --------------------------------------------------------

CrossingCertificate circle_image_intersections(const SphereMap& g, double r, int samples) {
    return curve_intersections(PlanarCurve::circle(r, samples), PlanarCurve::mapped_circle(g, r, samples));
}

FourPointIsotopy four_point_isotopy(const Isotopy& g) {
    if (g.t0() != 0.0 || g.t1() != 1.0) throw std::invalid_argument("four_point_isotopy: g must live on [0, 1]");
    const SphereMap g1 = g.at(1.0);
    FourPointIsotopy fp;
    bool found = false;
    double r = 0.5;
    for (int j = 0; j < kRadiusSearchSteps && !found; ++j, r /= 2.0) {
        try {
            fp.circle_cert = circle_image_intersections(g1, r);
        } catch (const TangentialIntersection&) {
            continue;
        }
        if (fp.circle_cert.size() == 4) {
            fp.r0 = r;
            fp.halvings = j;
            found = true;
        }
    }
    if (!found) throw CrossingError("four_point_isotopy: no radius with exactly four transversal crossings");

    // Second-curve parameters are the preimage angles, already anticlockwise.
    std::vector<double> angles;
    for (const auto& p : fp.circle_cert.points) angles.push_back(p.t);
    std::sort(angles.begin(), angles.end());
    const auto pre = [&](int i) { return ExtPoint(std::polar(fp.r0, kTwoPi * angles[i])); };
    fp.a = pre(0);
    fp.b = pre(1);
    fp.c = pre(2);
    fp.d = pre(3);
    fp.start = three_point_map(fp.a, fp.b, fp.c).inverse();

    const ExtPoint a = fp.a, b = fp.b, c = fp.c;
    const SphereMap start(fp.start);
    fp.k = Isotopy(0.0, 1.0, [g, a, b, c, start](double t) {
        const SphereMap gt = g.at(t);
        return SphereMap(three_point_map(gt(a), gt(b), gt(c))) * gt * start;
    });

    // Re-certify on Gamma itself, parametrized through M_abc of the circle.
    const SphereMap k1 = fp.k.at(1.0);
    const MobiusMap to_gamma = three_point_map(fp.a, fp.b, fp.c);
    const double r0 = fp.r0;
    fp.image_hits = meridian_crossings([&](double s) { return k1(to_gamma(ExtPoint(std::polar(r0, kTwoPi * s)))); });
    if (fp.image_hits.size() != 4) throw CrossingError("four_point_isotopy: k_1(Gamma) does not meet Gamma four times");
    const ExtPoint refs[] = {ExtPoint(0.0, 0.0), ExtPoint(1.0, 0.0), ExtPoint::infinity()};
    double far = -1.0;
    for (const auto& h : fp.image_hits) {
        double near = 2.0;
        for (const auto& q : refs) near = std::min(near, chordal_dist(h.point, q));
        if (near > far) {
            far = near;
            fp.w0 = h.point;
        }
    }
    return fp;
}

// ---- off the meridian ------------------------------------------------------

Ejection eject_from_gamma(const FourPointIsotopy& fp, const ExtPoint& z0) {
    if (z0.is_infinite() || z0.im() != 0.0 || z0.re() == 0.0 || z0.re() == 1.0)
        throw std::invalid_argument("eject_from_gamma: z0 must be real and outside {0, 1, infinity}");
    if (std::abs(fp.k.trace(1.0, z0).im()) > kEjectMargin) return {fp.k, false};
    // z0 sits on the fourth crossing; M_{1 inf 0} moves Gamma without fixed points.
    const SphereMap m(three_point_map(ExtPoint(1.0, 0.0), ExtPoint::infinity(), ExtPoint(0.0, 0.0)));
    Isotopy h = conjugate(m, fp.k);
    const ExtPoint w = h.trace(1.0, z0);
    if (w.is_infinite() || std::abs(w.im()) <= kEjectMargin)
        throw CrossingError("eject_from_gamma: neither k nor its conjugate moves z0 off Gamma");
    return {std::move(h), true};
}

// ---- the crossing isotopy --------------------------------------------------

namespace {

int side_of(const ExtPoint& z) {
    switch (hemisphere(z)) {
        case Hemisphere::plus: return 1;
        case Hemisphere::minus: return -1;
        default: return 0;
    }
}

}  // namespace

CrossingAudit audit_crossing(const Isotopy& j, const ExtPoint& z_hat, double step) {
    CrossingAudit a;
    a.step = step;
    const long n = std::lround((j.t1() - j.t0()) / step);
    bool ok = true;
    ExtPoint prev;
    for (long i = 0; i <= n; ++i) {
        const double t = i == n ? j.t1() : j.t0() + step * static_cast<double>(i);
        const ExtPoint z = j.trace(t, z_hat);
        ++a.samples;
        if (z.is_infinite()) {
            ok = false;
            prev = z;
            continue;
        }
        if (std::abs(z.im()) < 1e-9) {
            ++a.near_real;
            ok = ok && z.re() > 0.0 && z.re() < 1.0;
        }
        if (i > 0 && prev.is_finite() && side_of(prev) * side_of(z) < 0) {
            ++a.sign_changes;
            // Where the chord between the samples meets the real axis.
            const double x = prev.re() + (z.re() - prev.re()) * prev.im() / (prev.im() - z.im());
            ok = ok && x > 0.0 && x < 1.0;
        }
        prev = z;
    }
    a.only_zero_one = ok;
    a.endpoints_ok = hemisphere(j.trace(j.t0(), z_hat)) == Hemisphere::minus &&
                     hemisphere(j.trace(j.t1(), z_hat)) == Hemisphere::plus;
    return a;
}

CrossingIsotopy crossing_isotopy(const FourPointIsotopy& fp, const ExtPoint& z0) {
    CrossingIsotopy out;
    out.z0 = z0;
    const Ejection ej = eject_from_gamma(fp, z0);
    out.ejected_by_conjugate = ej.conjugated;
    const Isotopy& h = ej.h;
    const int target = side_of(h.trace(1.0, z0));
    const int start = -target;
    out.time_reversed = target < 0;

    // u0 on the other side of Gamma, close enough to follow z0.
    bool found = false;
    for (double eps = 1e-2; eps > 1e-14 && !found; eps /= 2.0) {
        const ExtPoint u(z0.re(), start * eps);
        if (side_of(h.trace(1.0, u)) == target) {
            out.u0 = u;
            out.perturbation = eps;
            found = true;
        }
    }
    if (!found) throw CrossingError("crossing_isotopy: no perturbation of z0 keeps h_1 on the same side");

    const ExtPoint u0 = out.u0;
    const auto side_at = [&](double t) { return side_of(h.trace(t, u0)); };
    const long n = std::lround(1.0 / kCrossingGrid);
    std::vector<double> ts(n + 1);
    std::vector<int> sides(n + 1);
    for (long i = 0; i <= n; ++i) {
        ts[i] = i == n ? 1.0 : kCrossingGrid * static_cast<double>(i);
        sides[i] = side_at(ts[i]);
    }
    long im = -1;
    for (long i = 0; i <= n; ++i)
        if (sides[i] == start) im = i;
    if (im < 0 || im == n) throw CrossingError("crossing_isotopy: path never leaves its starting hemisphere");
    long ip = im + 1;
    while (ip <= n && sides[ip] != target) ++ip;
    if (ip > n) throw CrossingError("crossing_isotopy: path never reaches the target hemisphere");

    // Last instant on the starting side, first instant on the target side.
    double lo = ts[im], hi = ts[im + 1];
    for (int it = 0; it < 100 && hi - lo > 0.0; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (side_at(mid) == start ? lo : hi) = mid;
    }
    out.t_minus = lo;
    lo = ts[ip - 1];
    hi = ts[ip];
    if (ip - 1 == im) lo = out.t_minus;
    for (int it = 0; it < 100 && hi - lo > 0.0; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (side_at(mid) == target ? hi : lo) = mid;
    }
    out.t_plus = std::max(hi, out.t_minus);

    // Half the gap to the neighbouring grid change on each side, symmetric.
    long before = im;
    while (before >= 0 && sides[before] == start) --before;
    long after = ip;
    while (after <= n && sides[after] == target) ++after;
    const double gap_minus = out.t_minus - (before < 0 ? 0.0 : ts[before]);
    const double gap_plus = (after > n ? 1.0 : ts[after]) - out.t_plus;
    out.delta = 0.5 * std::min(gap_minus, gap_plus);
    if (!(out.delta > 0.0)) throw CrossingError("crossing_isotopy: no room around the crossing window");

    const double mid = 0.5 * (out.t_minus + out.t_plus);
    const double half = 0.5 * (out.t_plus - out.t_minus) + out.delta;
    const SphereMap back = h.at(mid).inverse();
    Isotopy jt(-1.0, 1.0, [h, back, mid, half](double t) { return h.at(mid + half * t) * back; });

    const ExtPoint on = h.trace(mid, u0);
    if (on.is_infinite() || std::abs(on.im()) > 1e-9)
        throw CrossingError("crossing_isotopy: the crossing instant is not on Gamma");
    const double x = on.re();
    ExtPoint z_tilde(x, 0.0);
    if (x == 0.0 || x == 1.0) throw CrossingError("crossing_isotopy: crossing through a fixed reference point");
    if (x > 0.0 && x < 1.0) {
        out.arc = TrappedArc::zero_one;
        out.z_hat = z_tilde;
        out.j = std::move(jt);
    } else {
        const ExtPoint zero(0.0, 0.0), one(1.0, 0.0), inf = ExtPoint::infinity();
        out.arc = x > 1.0 ? TrappedArc::one_infinity : TrappedArc::infinity_zero;
        // M_abc sends the arc (a, b) onto (0, 1) preserving orientation.
        const MobiusMap m = x > 1.0 ? three_point_map(one, inf, zero) : three_point_map(inf, zero, one);
        out.z_hat = m(z_tilde);
        out.j = conjugate(SphereMap(m), jt);
    }
    if (out.time_reversed) out.j = reverse(out.j);

    out.coarse = audit_crossing(out.j, out.z_hat, 1e-3);
    out.fine = audit_crossing(out.j, out.z_hat, 1e-4);
    if (!out.coarse.endpoints_ok || !out.fine.endpoints_ok)
        throw CrossingError("crossing_isotopy: endpoint hemispheres are wrong");
    if (!out.coarse.only_zero_one || !out.fine.only_zero_one)
        throw CrossingError("crossing_isotopy: the trajectory meets Gamma outside (0, 1)");
    return out;
}

}  // namespace mobdyn
