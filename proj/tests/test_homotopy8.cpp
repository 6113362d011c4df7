#include "catch_amalgamated.hpp"

#include "mobdyn/homotopy8.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace mobdyn;
using Catch::Matchers::WithinAbs;

namespace {

constexpr double kPi = std::numbers::pi;
const ExtPoint kZero(0.0, 0.0), kOne(1.0, 0.0), kInf = ExtPoint::infinity();

const Assembly& assembly() {
    static const Assembly as(make_setup());
    return as;
}

const FigureEightCertificate& figure_eight() {
    static const FigureEightCertificate cert = assembly().build_figure_eight();
    return cert;
}

bool fixes_references(const SphereMap& m, double tol) {
    return chordal_dist(m(kZero), kZero) < tol && chordal_dist(m(kOne), kOne) < tol && chordal_dist(m(kInf), kInf) < tol;
}

Letter a0(int sign = 1) { return {Puncture::zero, sign}; }
Letter a1(int sign = 1) { return {Puncture::one, sign}; }

// Circle with the given centre and radius, starting at angle `phase` and
// running anticlockwise unless `clockwise`.
PlanarCurve circle_loop(cplx centre, double r, double phase, bool clockwise, int n = 1001) {
    const double dir = clockwise ? -1.0 : 1.0;
    return PlanarCurve::sample(
        [=](double s) { return ExtPoint(centre + std::polar(r, phase + dir * 2.0 * kPi * s)); }, 0.0, 1.0, n, true);
}

}  // namespace

TEST_CASE("adaptive sampling meets the gap bound", "[homotopy8][paths]") {
    const auto circle = [](double t) { return ExtPoint(std::polar(3.0, 2.0 * kPi * t)); };
    const PathSamples p = sample_path(circle, 0.0, 1.0, 4);
    CHECK(p.t.front() == 0.0);
    CHECK(p.t.back() == 1.0);
    CHECK(p.max_chordal_gap() <= kPathGap);
    for (std::size_t i = 0; i + 1 < p.size(); ++i) REQUIRE(std::abs(p.z[i].value() - p.z[i + 1].value()) <= 4.0 * kPathGap);
    CHECK_THROWS_AS(sample_path(circle, 1.0, 0.0, 4), std::invalid_argument);
}

TEST_CASE("meetings of two paths", "[homotopy8][paths]") {
    // s (1 + i) against (1 - t) + i t: they meet at s = t = 1/2.
    const PathSamples diag = sample_path([](double s) { return ExtPoint(s, s); }, 0.0, 1.0, 7);
    const PathSamples anti = sample_path([](double t) { return ExtPoint(1.0 - t, t); }, 0.0, 1.0, 5);
    const auto m = path_meetings(diag, anti);
    REQUIRE(m.size() == 1);
    CHECK_THAT(m[0].s, WithinAbs(0.5, 1e-14));
    CHECK_THAT(m[0].t, WithinAbs(0.5, 1e-14));

    // Parabola (s, s^2) against the kinked path (t, 1/4 + |t - 0.1| / 10):
    // real meetings solve s^2 = 1/4 + |s - 0.1| / 10.
    const PathSamples par = sample_path([](double s) { return ExtPoint(s, s * s); }, -1.0, 1.0, 13);
    const PathSamples kink =
        sample_path([](double t) { return ExtPoint(t, 0.25 + std::abs(t - 0.1) / 10.0); }, -1.0, 1.0, 9);
    const auto k = path_meetings(par, kink);
    REQUIRE(k.size() == 2);
    for (const Meeting& mm : k) {
        const double s = mm.s, expect = 0.25 + std::abs(s - 0.1) / 10.0;
        CHECK_THAT(s * s, WithinAbs(expect, 1e-13));
        CHECK_THAT(mm.t, WithinAbs(s, 1e-13));
        CHECK(mm.residual < kMeetingResidual);
    }
}

TEST_CASE("free reduction of loop words", "[homotopy8][words]") {
    CHECK(LoopWord({a0(), a0(-1), a1()}) == LoopWord({a1()}));
    CHECK(LoopWord({a1(), a0(), a0(-1), a1(-1)}).length() == 0);
    const LoopWord w({a1(), a0()});
    CHECK(w.str() == "a1 a0");
    CHECK(w.inverse() == LoopWord({a0(-1), a1(-1)}));
    CHECK(LoopWord({a0(), a1()}).conjugate_to(w));
    CHECK(LoopWord({a0(-1), a1(), a0(), a0()}).conjugate_to(w));
    CHECK_FALSE(LoopWord({a1(), a0(-1)}).conjugate_to(w));
    CHECK_THROWS_AS(LoopWord({{Puncture::zero, 2}}), std::invalid_argument);
}

TEST_CASE("words of simple loops", "[homotopy8][words]") {
    // Anticlockwise around 1 from 1/2: one upward crossing of (1, inf).
    CHECK(loop_word(circle_loop({1.0, 0.0}, 0.5, kPi, false), ExtPoint(0.5, 0.0)) == LoopWord({a1()}));
    // Clockwise around 0 from 1/2: one upward crossing of (-inf, 0).
    CHECK(loop_word(circle_loop({0.0, 0.0}, 0.5, 0.0, true), ExtPoint(0.5, 0.0)) == LoopWord({a0()}));
    // A loop around neither puncture.
    CHECK(loop_word(circle_loop({0.5, 0.0}, 0.2, 0.0, false), ExtPoint(0.7, 0.0)).length() == 0);
    // Around both from 3/2: down through -1/2, then up through 3/2 to close.
    CHECK(loop_word(circle_loop({0.5, 0.0}, 1.0, 0.0, false), ExtPoint(1.5, 0.0)) == LoopWord({a0(-1), a1()}));
}

TEST_CASE("prototype figure eight", "[homotopy8][words]") {
    const PlanarCurve proto = prototype_figure_eight();
    const LoopWord w = loop_word(proto, ExtPoint(0.5, 0.0));
    CHECK(w == LoopWord({a1(), a0()}));
    CHECK(w.length() == 2);
    const PlanarCurve back =
        PlanarCurve::sample([&](double s) { return proto(s == 0.0 ? 0.0 : 1.0 - s); }, 0.0, 1.0, 2048, true);
    CHECK(loop_word(back, ExtPoint(0.5, 0.0)) == w.inverse());
}

TEST_CASE("word changes only by conjugation with the starting point", "[homotopy8][words][property]") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const PlanarCurve proto = prototype_figure_eight();
    const LoopWord w = loop_word(proto, ExtPoint(0.5, 0.0));
    for (int trial = 0; trial < 20; ++trial) {
        const double shift = u(rng);
        const PlanarCurve moved = PlanarCurve::sample(
            [&](double s) { return proto(std::fmod(s + shift, 1.0)); }, 0.0, 1.0, 2048, true);
        REQUIRE(loop_word(moved, proto(shift)).conjugate_to(w));
    }
}

TEST_CASE("loop word input checks", "[homotopy8][words]") {
    const PlanarCurve c = circle_loop({1.0, 0.0}, 0.5, kPi, false);
    CHECK_THROWS_AS(loop_word(c, ExtPoint(0.6, 0.0)), std::invalid_argument);
    // Open curve: closes only within the tolerance given.
    const PlanarCurve open = PlanarCurve::sample(
        [](double s) { return ExtPoint(1.0 + std::polar(0.5, kPi + 2.0 * kPi * s * (1.0 - 1e-7))); }, 0.0, 1.0, 1001,
        false);
    CHECK_THROWS_AS(loop_word(open, ExtPoint(0.5, 0.0)), std::invalid_argument);
    CHECK(loop_word(open, ExtPoint(0.5, 0.0), 1e-5) == LoopWord({a1()}));
    // Passing through the puncture 1.
    CHECK_THROWS_AS(loop_word(circle_loop({1.5, 0.0}, 0.5, kPi, false, 1000), ExtPoint(1.0, 0.0)),
                    std::invalid_argument);
    // Crossing the meridian 5e-8 away from 0, between samples.
    CHECK_THROWS_AS(loop_word(circle_loop({-0.5 + 5e-8, 0.0}, 0.5, kPi, false, 257), ExtPoint(-1.0 + 5e-8, 0.0)),
                    CrossingError);
}

TEST_CASE("the continuum", "[homotopy8][chi]") {
    const ContinuumChi& chi = assembly().chi();
    CHECK(chi.k.t0() < -1.0);
    CHECK(chi.k.t1() > 1.0);
    CHECK(chi.end_minus < 0.1);
    CHECK(chi.end_plus < 0.1);
    CHECK(chi.max_gap <= kPathGap);
    CHECK(chi.splice_minus < 1e-12);
    CHECK(chi.splice_plus < 1e-12);
    CHECK(chi.meets_gamma_only_in_zero_one());
    CHECK(hemisphere(chi.z_minus) == Hemisphere::minus);
    CHECK(hemisphere(chi.z_plus) == Hemisphere::plus);
    for (double t : {-5.5, -1.0, 0.0, 1.0, 7.25}) REQUIRE(fixes_references(chi.k.at(t), 1e-9));
    // Far out the composite stretches a neighbourhood of 1 by ~1e12, so the
    // pieces are checked on their own there.
    const double nb = static_cast<double>(chi.backward->build().total_time());
    const double nf = static_cast<double>(chi.forward->build().total_time());
    CHECK(chi.k.t0() == -1.0 - nb);
    CHECK(chi.k.t1() == 1.0 + nf);
    REQUIRE(fixes_references(chi.backward->at(nb), 1e-9));
    REQUIRE(fixes_references(chi.forward->at(nf), 1e-9));
    REQUIRE(fixes_references(assembly().crossing().j.at(-1.0), 1e-12));
    REQUIRE(fixes_references(assembly().crossing().j.at(1.0), 1e-12));
    CHECK(identity_defect(chi.k.at(0.0), verification_points()) < 1e-10);
}

TEST_CASE("the continuum separates the outer arcs of the meridian", "[homotopy8][chi][property]") {
    const ContinuumChi& chi = assembly().chi();
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> box(-3.0, 3.0), left(-3.0, -0.05), right(1.05, 3.0);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<cplx> poly{{left(rng), 0.0}};
        for (int k = 0; k < 4; ++k) poly.emplace_back(box(rng), box(rng));
        poly.emplace_back(right(rng), 0.0);
        REQUIRE(chi.meets(poly));
    }
}

TEST_CASE("accessible paths", "[homotopy8][accessible]") {
    const Assembly& as = assembly();
    const ExtPoint z(-0.8, 1.3), w(2.1, -0.4);
    const AccessiblePath p = as.accessible_path(z, w);
    CHECK(p.residual < kEndpointTolerance);
    CHECK(chordal_dist(p.f.trace(1.0, z), w) < kEndpointTolerance);
    CHECK(identity_defect(p.f.at(0.0), verification_points()) < 1e-10);
    for (int i = 0; i <= 12; ++i) REQUIRE(fixes_references(p.f.at(i / 12.0), 1e-9));
    CHECK(p.start_meeting.residual < kMeetingResidual);
    CHECK(p.end_meeting.residual < kMeetingResidual);

    // Endpoints on the meridian are pushed off first.
    const ExtPoint x(-1.7, 0.0), y(0.3, 0.0);
    const AccessiblePath q = as.accessible_path(x, y);
    CHECK(q.ejected_start);
    CHECK(q.ejected_end);
    CHECK(chordal_dist(q.f.trace(1.0, x), y) < kEndpointTolerance);
    for (int i = 0; i <= 12; ++i) REQUIRE(fixes_references(q.f.at(i / 12.0), 1e-9));

    CHECK(identity_defect(as.accessible_path(z, z).f.at(1.0), verification_points()) == 0.0);
    CHECK_THROWS_AS(as.accessible_path(kZero, w), std::invalid_argument);
    CHECK_THROWS_AS(as.accessible_path(z, kInf), std::invalid_argument);
}

TEST_CASE("four-point transitivity", "[homotopy8][accessible]") {
    const Assembly& as = assembly();
    const std::array<ExtPoint, 4> src{kZero, kOne, kInf, ExtPoint(0.0, 1.0)};
    const std::array<ExtPoint, 4> dst{ExtPoint(0.4, -1.1), ExtPoint(-2.0, 0.5), ExtPoint(1.5, 1.5), ExtPoint(-0.3, -0.2)};
    const Transitivity tr = as.four_transitivity(src, dst);
    CHECK(tr.residual < kEndpointTolerance);
    for (int i = 0; i < 4; ++i) CHECK(chordal_dist(tr.map(src[i]), dst[i]) < kEndpointTolerance);
    const std::array<ExtPoint, 4> twice{kZero, kOne, kZero, ExtPoint(0.0, 1.0)};
    CHECK_THROWS_AS(as.four_transitivity(twice, dst), std::invalid_argument);
}

TEST_CASE("figure-eight homotopy", "[homotopy8][figure-eight]") {
    const FigureEightCertificate& cert = figure_eight();
    CHECK(cert.certified);
    CHECK(cert.word == cert.prototype);
    CHECK(cert.word.length() == 2);
    CHECK(cert.word == LoopWord({a1(), a0()}));
    for (double r : cert.residuals) CHECK(r < kEndpointTolerance);
    CHECK(cert.w_hat.im() == 0.0);
    CHECK(cert.w_hat.re() > 0.0);
    CHECK(cert.w_hat.re() < 1.0);
    CHECK(cert.phi_closure < kEndpointTolerance);
    CHECK(cert.h_residual < kEndpointTolerance);
    // Seams bracket the crossing, and c lies between a and b.
    CHECK(cert.t_minus <= cert.t_tilde_first);
    CHECK(cert.t_tilde_first <= cert.t_tilde_last);
    CHECK(cert.t_tilde_last <= cert.t_plus);
    CHECK(std::min(cert.a, cert.b) <= cert.c);
    CHECK(cert.c <= std::max(cert.a, cert.b));
    CHECK(identity_defect(cert.f.at(0.0), verification_points()) == 0.0);
    for (int i = 0; i <= 16; ++i) REQUIRE(fixes_references(cert.f.at(i / 16.0), 1e-9));
}
