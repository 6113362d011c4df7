#include "mobdyn/homotopy8.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace mobdyn {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr std::size_t kSampleCap = 400000;
constexpr int kZoomPoints = 8;
constexpr int kZoomRounds = 60;
constexpr int kBisections = 80;
constexpr int kMeetingPairs = 4;

const ExtPoint kZero(0.0, 0.0), kOne(1.0, 0.0);

bool usable(const ExtPoint& z) {
    return z.is_finite() && std::abs(z.value()) <= kClipRadius;
}

bool needs_split(const ExtPoint& a, const ExtPoint& b, double max_gap) {
    if (chordal_dist(a, b) > max_gap) return true;
    if (a.is_infinite() || b.is_infinite()) return false;
    const double small = std::min(std::abs(a.value()), std::abs(b.value()));
    return small < kClipRadius && std::abs(a.value() - b.value()) > max_gap * (1.0 + small);
}

// Crossing of segments p0p1 and q0q1 as fractions along each; half-open
// unless `closed`, so a shared vertex is counted once.
bool segment_cross(cplx p0, cplx p1, cplx q0, cplx q1, double& u, double& v, bool closed = false) {
    const cplx r = p1 - p0, s = q1 - q0, d = q0 - p0;
    const double den = r.real() * s.imag() - r.imag() * s.real();
    if (den == 0.0) return false;
    u = (d.real() * s.imag() - d.imag() * s.real()) / den;
    v = (d.real() * r.imag() - d.imag() * r.real()) / den;
    if (closed) return u >= 0.0 && u <= 1.0 && v >= 0.0 && v <= 1.0;
    return u >= 0.0 && u < 1.0 && v >= 0.0 && v < 1.0;
}

struct Box {
    double x0, x1, y0, y1;
    static Box of(cplx a, cplx b) {
        return {std::min(a.real(), b.real()), std::max(a.real(), b.real()), std::min(a.imag(), b.imag()),
                std::max(a.imag(), b.imag())};
    }
    bool overlaps(const Box& o) const { return !(o.x1 < x0 || o.x0 > x1 || o.y1 < y0 || o.y0 > y1); }
};

struct Seg {
    std::size_t i;
    cplx a, b;
    Box box;
};

std::vector<Seg> clipped_segments(const PathSamples& p) {
    std::vector<Seg> out;
    for (std::size_t i = 0; i + 1 < p.size(); ++i)
        if (usable(p.z[i]) && usable(p.z[i + 1])) {
            const cplx a = p.z[i].value(), b = p.z[i + 1].value();
            out.push_back({i, a, b, Box::of(a, b)});
        }
    return out;
}

// Shrinks both parameter windows around a polyline crossing, resampling the
// true paths each round. Derivative free, so kinks in time are harmless.
bool zoom(const PathSamples& p, const PathSamples& q, double sa, double sb, double ta, double tb, Meeting& out) {
    double s = sa, t = ta;
    for (int round = 0; round < kZoomRounds; ++round) {
        std::vector<cplx> ps, qs;
        for (int k = 0; k <= kZoomPoints; ++k) {
            const ExtPoint a = p.eval(sa + (sb - sa) * k / kZoomPoints);
            const ExtPoint b = q.eval(ta + (tb - ta) * k / kZoomPoints);
            if (a.is_infinite() || b.is_infinite()) return false;
            ps.push_back(a.value());
            qs.push_back(b.value());
        }
        bool found = false;
        double best = std::numeric_limits<double>::infinity();
        double nsa = sa, nsb = sb, nta = ta, ntb = tb, ns = s, nt = t;
        for (int i = 0; i < kZoomPoints; ++i)
            for (int j = 0; j < kZoomPoints; ++j) {
                double u, v;
                // Closed here: the crossing may sit on a window edge.
                if (!segment_cross(ps[i], ps[i + 1], qs[j], qs[j + 1], u, v, true)) continue;
                const double c0 = sa + (sb - sa) * i / kZoomPoints, c1 = sa + (sb - sa) * (i + 1) / kZoomPoints;
                const double d0 = ta + (tb - ta) * j / kZoomPoints, d1 = ta + (tb - ta) * (j + 1) / kZoomPoints;
                const double cs = c0 + u * (c1 - c0), ct = d0 + v * (d1 - d0);
                const double dist = std::abs(cs - s) / (sb - sa) + std::abs(ct - t) / (tb - ta);
                if (dist < best) {
                    best = dist;
                    found = true;
                    nsa = c0, nsb = c1, nta = d0, ntb = d1, ns = cs, nt = ct;
                }
            }
        if (!found) break;
        s = ns, t = nt;
        const bool done = (nsb - nsa) <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(s)) &&
                          (ntb - nta) <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t));
        sa = nsa, sb = nsb, ta = nta, tb = ntb;
        if (done) break;
    }
    const ExtPoint a = p.eval(s), b = q.eval(t);
    out = {s, t, a, chordal_dist(a, b)};
    return out.residual < kMeetingResidual;
}

double nearest_approach(const PathSamples& p, const PathSamples& q) {
    double best = 2.0;
    for (const ExtPoint& a : p.z)
        for (const ExtPoint& b : q.z) best = std::min(best, chordal_dist(a, b));
    return best;
}

// [0, 1/2] runs f, [1/2, 1] runs g after f_1. Both on [0, 1].
Isotopy sequence(const Isotopy& f, const Isotopy& g) {
    const SphereMap f1 = f.at(1.0);
    return {0.0, 1.0, [f, g, f1](double t) { return t <= 0.5 ? f.at(2.0 * t) : g.at(2.0 * t - 1.0) * f1; }};
}

// t -> f_{1-t} o f_1^-1: undoes f along its own path.
Isotopy backwards(const Isotopy& f) {
    const SphereMap inv = f.at(1.0).inverse();
    return {0.0, 1.0, [f, inv](double t) { return t == 0.0 ? SphereMap::identity() : f.at(1.0 - t) * inv; }};
}

double stereo_height(const ExtPoint& z) {
    return stereo_inv(z).y;
}

// Times where the path passes through the meridian, located on the true path.
std::vector<double> gamma_hits(const PathSamples& p) {
    std::vector<double> hits;
    std::vector<double> y(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        y[i] = stereo_height(p.z[i]);
        if (y[i] == 0.0) hits.push_back(p.t[i]);
    }
    for (std::size_t i = 0; i + 1 < p.size(); ++i) {
        if (y[i] == 0.0 || y[i + 1] == 0.0 || (y[i] > 0.0) == (y[i + 1] > 0.0)) continue;
        double lo = p.t[i], hi = p.t[i + 1];
        const bool lo_up = y[i] > 0.0;
        for (int it = 0; it < kBisections; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (mid <= lo || mid >= hi) break;
            const double ym = stereo_height(p.eval(mid));
            if (ym == 0.0) {
                lo = hi = mid;
                break;
            }
            ((ym > 0.0) == lo_up ? lo : hi) = mid;
        }
        hits.push_back(0.5 * (lo + hi));
    }
    std::sort(hits.begin(), hits.end());
    return hits;
}

std::string point_str(const ExtPoint& z) {
    std::ostringstream os;
    if (z.is_infinite())
        os << "inf";
    else
        os << z.re() << (z.im() < 0.0 ? " - " : " + ") << std::abs(z.im()) << "i";
    return os.str();
}

}  // namespace

// ---- sampled paths ---------------------------------------------------------

double PathSamples::max_chordal_gap() const {
    double worst = 0.0;
    for (std::size_t i = 0; i + 1 < z.size(); ++i) worst = std::max(worst, chordal_dist(z[i], z[i + 1]));
    return worst;
}

PathSamples sample_path(std::function<ExtPoint(double)> eval, double t0, double t1, int base_samples,
                        double max_gap) {
    if (base_samples < 2 || !(t1 > t0) || !(max_gap > 0.0))
        throw std::invalid_argument("sample_path: need two samples, t1 > t0 and a positive gap");
    PathSamples p;
    p.eval = std::move(eval);
    for (int i = 0; i <= base_samples; ++i) {
        const double t = i == base_samples ? t1 : t0 + (t1 - t0) * i / base_samples;
        p.t.push_back(t);
        p.z.push_back(p.eval(t));
    }
    const double min_dt = 1e-12 * (t1 - t0);
    for (bool changed = true; changed && p.size() < kSampleCap;) {
        changed = false;
        std::vector<double> ts;
        std::vector<ExtPoint> zs;
        for (std::size_t i = 0; i < p.size(); ++i) {
            ts.push_back(p.t[i]);
            zs.push_back(p.z[i]);
            if (i + 1 == p.size() || p.t[i + 1] - p.t[i] < min_dt || !needs_split(p.z[i], p.z[i + 1], max_gap)) continue;
            const double mid = 0.5 * (p.t[i] + p.t[i + 1]);
            ts.push_back(mid);
            zs.push_back(p.eval(mid));
            changed = true;
        }
        p.t = std::move(ts);
        p.z = std::move(zs);
    }
    return p;
}

std::vector<Meeting> path_meetings(const PathSamples& p, const PathSamples& q) {
    const auto sp = clipped_segments(p), sq = clipped_segments(q);
    std::vector<Meeting> out;
    for (const Seg& a : sp)
        for (const Seg& b : sq) {
            if (!a.box.overlaps(b.box)) continue;
            double u, v;
            if (!segment_cross(a.a, a.b, b.a, b.b, u, v)) continue;
            Meeting m;
            if (!zoom(p, q, p.t[a.i], p.t[a.i + 1], q.t[b.i], q.t[b.i + 1], m)) continue;
            const bool dup = std::any_of(out.begin(), out.end(), [&](const Meeting& o) {
                return std::abs(o.s - m.s) < 1e-9 && std::abs(o.t - m.t) < 1e-9;
            });
            if (!dup) out.push_back(m);
        }
    return out;
}

// ---- the continuum ---------------------------------------------------------

bool ContinuumChi::meets_gamma_only_in_zero_one() const {
    for (double t : gamma_hits(samples)) {
        const ExtPoint z = samples.eval(t);
        if (z.is_infinite() || !(z.re() > 0.0 && z.re() < 1.0)) return false;
    }
    return true;
}

bool ContinuumChi::meets(const std::vector<cplx>& polyline) const {
    const auto segs = clipped_segments(samples);
    for (std::size_t k = 0; k + 1 < polyline.size(); ++k) {
        const Box box = Box::of(polyline[k], polyline[k + 1]);
        for (const Seg& s : segs) {
            double u, v;
            if (box.overlaps(s.box) && segment_cross(polyline[k], polyline[k + 1], s.a, s.b, u, v)) return true;
        }
    }
    return false;
}

ContinuumChi build_chi(const SaddleSetup& setup, const CrossingIsotopy& crossing, int stages) {
    ContinuumChi chi;
    const Isotopy j = crossing.j;
    const SphereMap jm = j.at(-1.0), jp = j.at(1.0);
    chi.z_hat = crossing.z_hat;
    chi.z_minus = jm(chi.z_hat);
    chi.z_plus = jp(chi.z_hat);
    auto bwd = std::make_shared<const FundamentalIsotopy>(setup, chi.z_minus, stages);
    auto fwd = std::make_shared<const FundamentalIsotopy>(setup, chi.z_plus, stages);
    chi.backward = bwd;
    chi.forward = fwd;
    const double t0 = -1.0 - static_cast<double>(bwd->build().total_time());
    const double t1 = 1.0 + static_cast<double>(fwd->build().total_time());
    chi.k = Isotopy(t0, t1, [j, jm, jp, bwd, fwd](double t) {
        if (t < -1.0) return bwd->at(-1.0 - t) * jm;
        if (t > 1.0) return fwd->at(t - 1.0) * jp;
        return j.at(t);
    });
    const auto pts = verification_points();
    chi.splice_minus = sup_chordal_distance(bwd->at(0.0) * jm, jm, pts);
    chi.splice_plus = sup_chordal_distance(fwd->at(0.0) * jp, jp, pts);
    const Isotopy k = chi.k;
    const ExtPoint z = chi.z_hat;
    chi.samples = sample_path([k, z](double t) { return k.trace(t, z); }, t0, t1,
                              static_cast<int>(40.0 * (t1 - t0)));
    chi.end_minus = chordal_dist(chi.samples.z.front(), ExtPoint::infinity());
    chi.end_plus = chordal_dist(chi.samples.z.back(), ExtPoint::infinity());
    chi.max_gap = chi.samples.max_chordal_gap();
    return chi;
}

// ---- loop words ------------------------------------------------------------

LoopWord::LoopWord(const std::vector<Letter>& letters) {
    for (const Letter& l : letters) {
        if (l.sign != 1 && l.sign != -1) throw std::invalid_argument("LoopWord: letter exponent must be +-1");
        if (!letters_.empty() && letters_.back().around == l.around && letters_.back().sign == -l.sign)
            letters_.pop_back();
        else
            letters_.push_back(l);
    }
}

LoopWord LoopWord::inverse() const {
    std::vector<Letter> inv(letters_.rbegin(), letters_.rend());
    for (Letter& l : inv) l.sign = -l.sign;
    return LoopWord(inv);
}

bool LoopWord::conjugate_to(const LoopWord& other) const {
    const auto cyclic = [](std::vector<Letter> w) {
        while (w.size() >= 2 && w.front().around == w.back().around && w.front().sign == -w.back().sign) {
            w.pop_back();
            w.erase(w.begin());
        }
        return w;
    };
    const auto a = cyclic(letters_), b = cyclic(other.letters_);
    if (a.size() != b.size()) return false;
    if (a.empty()) return true;
    std::vector<Letter> rot = a;
    for (std::size_t r = 0; r < a.size(); ++r) {
        if (rot == b) return true;
        std::rotate(rot.begin(), rot.begin() + 1, rot.end());
    }
    return false;
}

std::string LoopWord::str() const {
    if (letters_.empty()) return "1";
    std::string s;
    for (const Letter& l : letters_) {
        if (!s.empty()) s += ' ';
        s += l.around == Puncture::zero ? "a0" : "a1";
        if (l.sign < 0) s += "^-1";
    }
    return s;
}

LoopWord loop_word(const PlanarCurve& loop, const ExtPoint& basepoint, double closure_tol) {
    const auto& pts = loop.points();
    const auto& ps = loop.params();
    if (chordal_dist(pts.front(), basepoint) > closure_tol)
        throw std::invalid_argument("loop_word: loop does not start at the base point");
    if (!loop.closed() && chordal_dist(pts.front(), pts.back()) > closure_tol)
        throw std::invalid_argument("loop_word: loop does not close");
    for (const ExtPoint& z : pts)
        if (chordal_dist(z, kZero) < kPunctureClearance || chordal_dist(z, kOne) < kPunctureClearance)
            throw std::invalid_argument("loop_word: loop passes through a puncture");

    const auto up = [](const ExtPoint& z) { return z.im() >= 0.0; };
    std::vector<Letter> letters;
    const std::size_t n = pts.size();
    const std::size_t edges = loop.closed() ? n : n - 1;
    for (std::size_t i = 0; i < edges; ++i) {
        const std::size_t j = (i + 1) % n;
        const bool from_up = up(pts[i]);
        if (from_up == up(pts[j])) continue;
        double x;
        if (loop.closed() || j != 0) {
            double lo = ps[i], hi = j == 0 ? loop.s1() : ps[j];
            ExtPoint zlo = pts[i], zhi = pts[j];
            for (int it = 0; it < kBisections; ++it) {
                const double mid = 0.5 * (lo + hi);
                if (mid <= lo || mid >= hi) break;
                const ExtPoint zm = loop(mid);
                if (up(zm) == from_up)
                    lo = mid, zlo = zm;
                else
                    hi = mid, zhi = zm;
            }
            x = 0.5 * (zlo.re() + zhi.re());
        } else {
            const cplx a = pts[i].value(), b = pts[j].value();
            x = a.real() + (b.real() - a.real()) * a.imag() / (a.imag() - b.imag());
        }
        const ExtPoint where(x, 0.0);
        if (chordal_dist(where, kZero) < kPunctureClearance || chordal_dist(where, kOne) < kPunctureClearance)
            throw CrossingError("loop_word: crossing of the meridian too close to a puncture at " + point_str(where));
        if (x > 0.0 && x < 1.0) continue;  // tree edge
        letters.push_back({x < 0.0 ? Puncture::zero : Puncture::one, from_up ? -1 : 1});
    }
    return LoopWord(letters);
}

PlanarCurve prototype_figure_eight(int samples) {
    // Sticks take 1/20 of the parameter each, circles 2/5.
    const auto eval = [](double s) {
        const auto lerp = [](double a, double b, double u) { return ExtPoint(a + (b - a) * u, 0.0); };
        if (s < 0.05) return lerp(0.5, 0.75, s / 0.05);
        if (s < 0.45) return ExtPoint(1.0 + std::polar(0.25, std::numbers::pi + kTwoPi * (s - 0.05) / 0.4));
        if (s < 0.5) return lerp(0.75, 0.5, (s - 0.45) / 0.05);
        if (s < 0.55) return lerp(0.5, 0.25, (s - 0.5) / 0.05);
        if (s < 0.95) return ExtPoint(std::polar(0.25, -kTwoPi * (s - 0.55) / 0.4));
        return lerp(0.25, 0.5, (s - 0.95) / 0.05);
    };
    return PlanarCurve::sample(eval, 0.0, 1.0, samples, true);
}

// ---- assemblies ------------------------------------------------------------

Assembly::Assembly(SaddleSetup setup, int stages, double crossing_seed_point) {
    FourPointIsotopy fp = four_point_isotopy(setup.ext.isotopy);
    CrossingIsotopy cr = crossing_isotopy(fp, ExtPoint(crossing_seed_point, 0.0));
    ContinuumChi chi = build_chi(setup, cr, stages);
    data_ = std::make_shared<const Data>(Data{std::move(setup), stages, std::move(fp), std::move(cr), std::move(chi)});
}

namespace {

// One end of an accessible path: the point pushed off the meridian if needed,
// its two-ended trajectory from 0 to 1, and where that meets chi.
struct Leg {
    Isotopy pre = Isotopy::constant_identity();
    bool ejected = false;
    Isotopy path = Isotopy::constant_identity();
    std::vector<Meeting> meetings;
    double nearest = 2.0;
};

Leg make_leg(const SaddleSetup& setup, const FourPointIsotopy& fp, const ContinuumChi& chi, int stages,
             const ExtPoint& z) {
    Leg leg;
    ExtPoint moved = z;
    if (z.im() == 0.0) {
        leg.pre = eject_from_gamma(fp, z).h;
        leg.ejected = true;
        moved = leg.pre.trace(1.0, z);
    }
    leg.path = two_ended_isotopy(setup, moved, RefPoint::zero, RefPoint::one, stages).isotopy;
    const Isotopy path = leg.path;
    const PathSamples ps = sample_path([path, moved](double t) { return path.trace(t, moved); }, path.t0(), path.t1(),
                                       static_cast<int>(20.0 * (path.t1() - path.t0())));
    leg.meetings = path_meetings(ps, chi.samples);
    std::sort(leg.meetings.begin(), leg.meetings.end(), [](const Meeting& a, const Meeting& b) {
        return std::abs(a.s) + std::abs(a.t) < std::abs(b.s) + std::abs(b.t);
    });
    if (leg.meetings.empty()) leg.nearest = nearest_approach(ps, chi.samples);
    return leg;
}

void check_accessible(const ExtPoint& z) {
    if (z.is_infinite() || chordal_dist(z, kZero) == 0.0 || chordal_dist(z, kOne) == 0.0)
        throw std::invalid_argument("accessible_path: endpoints must avoid 0, 1 and infinity");
}

}  // namespace

AccessiblePath Assembly::accessible_path(const ExtPoint& z0, const ExtPoint& w0) const {
    check_accessible(z0);
    check_accessible(w0);
    AccessiblePath out;
    out.z0 = z0;
    out.w0 = w0;
    if (z0 == w0) return out;

    const Data& d = *data_;
    const Leg start = make_leg(d.setup, d.four_point, d.chi, d.stages, z0);
    const Leg end = make_leg(d.setup, d.four_point, d.chi, d.stages, w0);
    if (start.meetings.empty() || end.meetings.empty()) {
        const double nearest = start.meetings.empty() ? start.nearest : end.nearest;
        std::ostringstream os;
        os << "accessible_path: trajectory of " << point_str(start.meetings.empty() ? z0 : w0)
           << " never meets chi; nearest chordal approach " << nearest;
        throw AccessibilityError(os.str(), nearest);
    }

    struct Pair {
        std::size_t i, j;
        double cost;
    };
    std::vector<Pair> pairs;
    for (std::size_t i = 0; i < std::min<std::size_t>(kMeetingPairs, start.meetings.size()); ++i)
        for (std::size_t j = 0; j < std::min<std::size_t>(kMeetingPairs, end.meetings.size()); ++j) {
            const Meeting &a = start.meetings[i], &b = end.meetings[j];
            pairs.push_back({i, j, std::abs(a.s) + std::abs(a.t) + std::abs(b.s) + std::abs(b.t)});
        }
    std::stable_sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) { return a.cost < b.cost; });

    double best = std::numeric_limits<double>::infinity();
    for (const Pair& pr : pairs) {
        const Meeting &mz = start.meetings[pr.i], &mw = end.meetings[pr.j];
        const Isotopy to_w = concat_through_meeting(d.chi.k, mw.t, end.path, mw.s, Isotopy::constant_identity());
        Isotopy f = concat_through_meeting(start.path, mz.s, d.chi.k, mz.t, to_w);
        if (start.ejected) f = sequence(start.pre, f);
        if (end.ejected) f = sequence(f, backwards(end.pre));
        const double residual = chordal_dist(f.trace(1.0, z0), w0);
        best = std::min(best, residual);
        if (residual < kEndpointTolerance) {
            out.f = f;
            out.residual = residual;
            out.ejected_start = start.ejected;
            out.ejected_end = end.ejected;
            out.start_meeting = mz;
            out.end_meeting = mw;
            return out;
        }
    }
    std::ostringstream os;
    os << "accessible_path: no meeting pair reaches " << point_str(w0) << " from " << point_str(z0)
       << "; best chordal residual " << best;
    throw AccessibilityError(os.str(), best);
}

Transitivity Assembly::four_transitivity(const std::array<ExtPoint, 4>& src, const std::array<ExtPoint, 4>& dst) const {
    for (const auto* tuple : {&src, &dst})
        for (int i = 0; i < 4; ++i)
            for (int j = i + 1; j < 4; ++j)
                if (chordal_dist((*tuple)[i], (*tuple)[j]) < 1e-12)
                    throw std::invalid_argument("four_transitivity: points of a tuple must be distinct");
    // Send the first three points of each tuple to 0, 1, infinity.
    const MobiusMap from_src = three_point_map(src[0], src[1], src[2]);
    const MobiusMap from_dst = three_point_map(dst[0], dst[1], dst[2]);
    Transitivity out;
    out.path = accessible_path(from_src(src[3]), from_dst(dst[3]));
    out.map = SphereMap(from_dst.inverse()) * out.path.f.at(1.0) * SphereMap(from_src);
    for (int i = 0; i < 4; ++i) out.residual = std::max(out.residual, chordal_dist(out.map(src[i]), dst[i]));
    return out;
}

FigureEightCertificate Assembly::build_figure_eight() const {
    const Data& d = *data_;
    const ContinuumChi& chi = d.chi;
    const Isotopy k = chi.k;
    const SphereMap swap(swap_map(RefPoint::zero, RefPoint::infinity));
    const Isotopy l(k.t0(), k.t1(), [k, swap](double t) { return swap * k.at(t) * swap; });
    FigureEightCertificate cert;

    // lambda = T o kappa, sampled at the same times.
    PathSamples lambda = chi.samples;
    const ExtPoint z_hat = chi.z_hat;
    lambda.eval = [k, swap, z_hat](double t) { return swap(k.trace(t, z_hat)); };
    for (ExtPoint& z : lambda.z) z = swap(z);

    const std::vector<double> hits = gamma_hits(chi.samples);
    const auto first = std::find_if(hits.begin(), hits.end(), [](double t) { return t > -1.0; });
    const auto last = std::find_if(hits.rbegin(), hits.rend(), [](double t) { return t < 1.0; });
    if (first == hits.end() || last == hits.rend() || *first >= 1.0 || *last <= -1.0)
        throw CrossingError("build_figure_eight: kappa does not pass through the meridian inside (-1, 1)");
    cert.t_tilde_first = *first;
    cert.t_tilde_last = *last;

    const std::vector<Meeting> meets = path_meetings(lambda, chi.samples);
    const Meeting* before = nullptr;
    const Meeting* after = nullptr;
    for (const Meeting& m : meets) {
        if (m.s <= cert.t_tilde_first && (!before || m.s > before->s)) before = &m;
        if (m.s >= cert.t_tilde_last && (!after || m.s < after->s)) after = &m;
    }
    if (!before || !after) {
        const double nearest = nearest_approach(lambda, chi.samples);
        throw AccessibilityError("build_figure_eight: lambda and kappa do not meet on both sides of the crossing",
                                 nearest);
    }
    cert.t_minus = before->s;
    cert.b = before->t;
    cert.t_plus = after->s;
    cert.a = after->t;

    // Base point: kappa(c) on (0, 1) with c between a and b.
    const double lo = std::min(cert.a, cert.b), hi = std::max(cert.a, cert.b);
    if (lo <= 0.0 && 0.0 <= hi) {
        cert.c = 0.0;
    } else {
        const auto c = std::find_if(hits.begin(), hits.end(), [&](double t) {
            const ExtPoint z = chi.samples.eval(t);
            return t > lo && t < hi && z.is_finite() && z.re() > 0.0 && z.re() < 1.0;
        });
        if (c == hits.end()) throw CrossingError("build_figure_eight: kappa misses (0, 1) between the seams");
        cert.c = *c;
    }
    const ExtPoint on_gamma = k.trace(cert.c, z_hat);
    cert.w_hat = ExtPoint(on_gamma.re(), 0.0);
    const double a = cert.a, b = cert.b, c = cert.c, tm = cert.t_minus, tp = cert.t_plus;

    const SphereMap kc_inv = k.at(c).inverse();
    const SphereMap mid_base = l.at(tm).inverse() * k.at(b) * kc_inv;
    const SphereMap end_base = k.at(a).inverse() * l.at(tp) * mid_base;
    const Isotopy phi(0.0, 1.0, [=](double t) {
        if (t == 0.0) return SphereMap::identity();
        if (t <= 1.0 / 3.0) return k.at(c + 3.0 * t * (b - c)) * kc_inv;
        if (t <= 2.0 / 3.0) return l.at(2.0 * tm - tp + 3.0 * t * (tp - tm)) * mid_base;
        return k.at(3.0 * a - 2.0 * c + 3.0 * t * (c - a)) * end_base;
    });
    const SphereMap phi1 = phi.at(1.0);
    cert.phi_closure = chordal_dist(phi1(cert.w_hat), cert.w_hat);

    const ExtPoint w_mirror(1.0 - cert.w_hat.re(), 0.0);
    const SphereMap h = accessible_path(cert.w_hat, w_mirror).f.at(1.0);
    const SphereMap flip(MobiusMap(cplx(-1.0), cplx(1.0), cplx(0.0), cplx(1.0)));
    cert.h_residual = chordal_dist(h(cert.w_hat), w_mirror);
    const SphereMap outer = h.inverse() * flip, inner = flip * h;
    const Isotopy psi(0.0, 1.0, [phi, outer, inner](double t) {
        return t == 0.0 ? SphereMap::identity() : outer * phi.at(t) * inner;
    });

    const SphereMap phi1_inv = phi1.inverse();
    cert.f = Isotopy(0.0, 1.0, [phi, psi, phi1_inv](double t) {
        if (t == 0.0) return SphereMap::identity();
        return t <= 0.5 ? phi.at(1.0 - 2.0 * t) * phi1_inv : psi.at(2.0 * t - 1.0) * phi1_inv;
    });
    const SphereMap f1 = cert.f.at(1.0);
    cert.fixed = {cert.w_hat, kZero, kOne, ExtPoint::infinity()};
    for (int i = 0; i < 4; ++i) cert.residuals[i] = chordal_dist(f1(cert.fixed[i]), cert.fixed[i]);

    const Isotopy f = cert.f;
    const ExtPoint w = cert.w_hat;
    const PathSamples orbit = sample_path([f, w](double t) { return f.trace(t, w); }, 0.0, 1.0, 600);
    const PlanarCurve loop = PlanarCurve::from_params(orbit.eval, orbit.t, 1.0, false);
    cert.word = loop_word(loop, w, kEndpointTolerance);
    cert.prototype = loop_word(prototype_figure_eight(), ExtPoint(0.5, 0.0));

    const bool fixed_ok = std::all_of(cert.residuals.begin(), cert.residuals.end(),
                                      [](double r) { return r < kEndpointTolerance; });
    const bool seams_ok = hemisphere(lambda.eval(tm)) == Hemisphere::plus &&
                          hemisphere(lambda.eval(tp)) == Hemisphere::minus;
    cert.certified = fixed_ok && seams_ok && cert.word == cert.prototype && cert.word.length() == 2;
    if (!cert.certified) {
        std::ostringstream os;
        os << "build_figure_eight: certificate refused; word " << cert.word.str() << " against prototype "
           << cert.prototype.str() << ", fixed-point residuals " << cert.residuals[0] << ' ' << cert.residuals[1] << ' '
           << cert.residuals[2] << ' ' << cert.residuals[3] << (seams_ok ? "" : ", seams on the wrong sides");
        throw CertificateRefused(os.str(), std::move(cert));
    }
    return cert;
}

}  // namespace mobdyn
