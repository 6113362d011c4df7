#include "catch_amalgamated.hpp"

#include "mobdyn/isotopy.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace mobdyn;
using Catch::Matchers::WithinAbs;

namespace {

double max_abs(const Mat2& m) { return m.cwiseAbs().maxCoeff(); }

Mat2 diag(double a, double b) {
    Mat2 m = Mat2::Zero();
    m(0, 0) = a;
    m(1, 1) = b;
    return m;
}

// C_s = A^-1 R_s A e_x has direction v = (cos s, mu^2 sin s); rotating it back
// to the x-axis leaves (|v|, 0) in the first column, and det C_s = 1.
void check_against_column_oracle(const Mat2& d, double mu, double t) {
    const double s = std::numbers::pi * t / 2.0;
    const double len = std::hypot(std::cos(s), mu * mu * std::sin(s));
    REQUIRE_THAT(d(1, 0), WithinAbs(0.0, 1e-9));
    REQUIRE_THAT(d(0, 0), WithinAbs(len, 1e-9));
    REQUIRE_THAT(d.determinant(), WithinAbs(1.0, 1e-9));
}

Isotopy rotation_isotopy(double speed) {
    return {0.0, 1.0, [speed](double t) { return SphereMap(MobiusMap::rotation(speed * t)); }};
}

Isotopy scaling_isotopy(double t0, double t1) {
    return {t0, t1, [](double t) { return SphereMap(MobiusMap::scaling(std::exp(t))); }};
}

}  // namespace

TEST_CASE("model maps with a prescribed rate", "[isotopy][model]") {
    for (auto kind : {ModelKind::shear, ModelKind::stretch}) {
        for (double mu : {0.3, 0.5, 0.8}) {
            const SphereMap h = model_with_rate(kind, mu, 4.0);
            const SaddleFactorization f = saddle_normalize(h.differential_at_origin());
            CHECK_THAT(f.lambda, WithinAbs(mu, 1e-12));
        }
    }
    CHECK_THROWS(model_with_rate(ModelKind::shear, 1.0, 4.0));
}

TEST_CASE("stretch model has the stated conformal defect", "[isotopy][model]") {
    const SphereMap g = SphereMap::model(ModelDiffeo(ModelKind::stretch, 0.3, 2.0));
    CHECK_THAT(conformal_defect(g.differential_at_origin()), WithinAbs(0.3, 1e-14));
}

TEST_CASE("extension isotopy differentials", "[isotopy][extension]") {
    const std::vector<ExtPoint> pts = verification_points();
    for (auto kind : {ModelKind::shear, ModelKind::stretch}) {
        for (double mu : {0.3, 0.5, 0.8}) {
            const ExtensionIsotopy ext = extension_isotopy(model_with_rate(kind, mu, 4.0));
            REQUIRE_THAT(ext.mu, WithinAbs(mu, 1e-12));
            REQUIRE(max_abs(ext.normalized.differential_at_origin() - diag(mu, 1.0 / mu)) < 1e-9);
            CHECK(identity_defect(ext.isotopy.at(0.0), pts) < 1e-10);
            for (int i = 0; i <= 100; ++i) {
                const double t = i / 100.0;
                const Mat2 d = ext.isotopy.at(t).differential_at_origin();
                check_against_column_oracle(d, mu, t);
                REQUIRE(max_abs(d - extension_differential(mu, t)) < 1e-9);
            }
            const Mat2 end = ext.isotopy.at(1.0).differential_at_origin();
            CHECK(max_abs(end - diag(mu * mu, 1.0 / (mu * mu))) < 1e-9);
            // Chain rule against finite differences at a few points off the origin.
            const SphereMap g1 = ext.isotopy.at(1.0);
            for (cplx z : {cplx(0.3, 0.1), cplx(-1.0, 2.0), cplx(2.5, -0.4)})
                CHECK(max_abs(g1.differential(ExtPoint(z)) - finite_difference_jacobian(g1, z)) < 1e-5);
            CHECK(continuity_modulus(ext.isotopy, 1e-3, pts) < 0.1);
        }
    }
}

TEST_CASE("extension of a saddle with rate one half", "[isotopy][extension]") {
    const ExtensionIsotopy ext = extension_isotopy(model_with_rate(ModelKind::stretch, 0.5, 3.0));
    CHECK(max_abs(ext.isotopy.at(1.0).differential_at_origin() - diag(0.25, 4.0)) < 1e-9);
}

TEST_CASE("extension isotopy rejects bad inputs", "[isotopy][extension]") {
    CHECK_THROWS_AS(extension_isotopy(SphereMap(MobiusMap::scaling(std::polar(2.0, 0.3)))), SaddleError);
    const SphereMap moved = SphereMap(MobiusMap(1.0, 0.5, 0.0, 1.0)) * SphereMap::model(ModelDiffeo(ModelKind::shear, 0.5, 4.0));
    CHECK_THROWS_AS(extension_isotopy(moved), std::domain_error);
}

TEST_CASE("extension angle is continuous and ends at a quarter turn", "[isotopy][extension]") {
    for (double mu : {0.3, 0.8}) {
        CHECK(extension_angle(mu, 0.0) == 0.0);
        CHECK_THAT(extension_angle(mu, std::numbers::pi / 2), WithinAbs(std::numbers::pi / 2, 1e-15));
        double prev = 0.0;
        for (int i = 1; i <= 1000; ++i) {
            const double a = extension_angle(mu, std::numbers::pi / 2 * i / 1000.0);
            REQUIRE(a >= prev);
            REQUIRE(a - prev < 0.02);
            prev = a;
        }
    }
}

TEST_CASE("isotopy intervals and evaluation", "[isotopy]") {
    CHECK_THROWS(Isotopy(0.5, 1.0, [](double) { return SphereMap::identity(); }));
    const Isotopy id = Isotopy::constant_identity();
    CHECK_THROWS_AS(id.at(1.5), std::out_of_range);
    CHECK(identity_defect(id.at(0.7), verification_points()) == 0.0);
}

TEST_CASE("three-piece concatenation", "[isotopy][concat]") {
    const std::vector<ExtPoint> pts = verification_points();
    const Isotopy id = Isotopy::constant_identity();

    SECTION("identities concatenate to the identity") {
        const Isotopy k = concat_through_meeting(id, 0.5, id, 0.5, id);
        for (int i = 0; i <= 30; ++i) CHECK(identity_defect(k.at(i / 30.0), pts) == 0.0);
    }
    SECTION("endpoint with trivial outer pieces is the inverse of h_1") {
        const Isotopy h = rotation_isotopy(1.1);
        const Isotopy k = concat_through_meeting(id, 0.0, h, 1.0, id);
        CHECK(sup_chordal_distance(k.at(1.0), h.at(1.0).inverse(), pts) < 1e-14);
        CHECK(identity_defect(k.at(0.0), pts) == 0.0);
    }
    SECTION("the meeting point is carried through") {
        // f_a(z) = h_b(w) with f = scaling by e^t, h = rotation.
        const Isotopy f = scaling_isotopy(0.0, 1.0), h = rotation_isotopy(2.0), g = scaling_isotopy(-1.0, 1.0);
        const double a = 0.4, b = 0.9;
        const ExtPoint w(0.3, -0.8);
        const ExtPoint z = f.at(a).inverse()(h.at(b)(w));
        const Isotopy k = concat_through_meeting(f, a, h, b, g);
        CHECK(chordal_dist(k.at(1.0)(z), g.at(1.0)(w)) < 1e-14);
    }
    SECTION("pieces agree at the splice times") {
        const Isotopy f = scaling_isotopy(0.0, 1.0), h = rotation_isotopy(2.0), g = rotation_isotopy(-0.7);
        const Isotopy k = concat_through_meeting(f, 0.6, h, 0.8, g);
        for (double t : {1.0 / 3.0, 2.0 / 3.0}) {
            CHECK(sup_chordal_distance(k.at(t - 1e-12), k.at(t + 1e-12), pts) < 1e-9);
        }
        CHECK(continuity_modulus(k, 1e-3, pts) < 0.1);
    }
    SECTION("out-of-range times") {
        CHECK_THROWS_AS(concat_through_meeting(id, 2.0, id, 0.5, id), std::out_of_range);
        CHECK_THROWS_AS(concat_through_meeting(id, 0.5, id, -0.5, id), std::out_of_range);
    }
}

TEST_CASE("concatenation keeps the composition structure", "[isotopy][concat][property]") {
    const ExtensionIsotopy ext = extension_isotopy(SphereMap::model(ModelDiffeo(ModelKind::shear, 0.5, 4.0)));
    const SphereMap swap01(swap_map(RefPoint::zero, RefPoint::one));
    const Isotopy h = conjugate(swap01, ext.isotopy);
    const Isotopy k = concat_through_meeting(ext.isotopy, 0.7, h, 0.4, ext.isotopy);
    const auto admissible = [](const Primitive& p) {
        return std::holds_alternative<MobiusMap>(p) || std::holds_alternative<ModelPrim>(p) ||
               std::holds_alternative<PowerPrim>(p);
    };
    for (int i = 0; i <= 60; ++i) {
        const SphereMap m = k.at(i / 60.0);
        for (const Primitive& p : m.primitives()) REQUIRE(admissible(p));
        REQUIRE(m(ExtPoint::infinity()).is_infinite());
    }
}

TEST_CASE("conjugation, reversal and rebasing", "[isotopy][algebra]") {
    const std::vector<ExtPoint> pts = verification_points();
    const ExtensionIsotopy ext = extension_isotopy(SphereMap::model(ModelDiffeo(ModelKind::shear, 0.5, 4.0)));
    const Isotopy& f = ext.isotopy;

    const Isotopy same = conjugate(SphereMap::identity(), f);
    const Isotopy rebased = restrict_shift(f, 0.0, 1.0, 0.0);
    for (int i = 0; i <= 20; ++i) {
        const double t = i / 20.0;
        CHECK(sup_chordal_distance(same.at(t), f.at(t), pts) < 1e-14);
        CHECK(sup_chordal_distance(rebased.at(t), f.at(t), pts) < 1e-12);
    }

    const Isotopy r = reverse(f);
    CHECK(r.t0() == -1.0);
    CHECK(r.t1() == 0.0);
    CHECK(sup_chordal_distance(r.at(-0.3), f.at(0.3), pts) < 1e-15);

    const Isotopy mid = restrict_shift(f, 0.2, 1.0, 0.5);
    CHECK(mid.t0() == Catch::Approx(-0.3));
    CHECK(identity_defect(mid.at(0.0), pts) < 1e-12);
    CHECK(sup_chordal_distance(mid.at(0.5), f.at(1.0) * f.at(0.5).inverse(), pts) < 1e-12);
    CHECK_THROWS_AS(restrict_shift(f, 0.2, 1.5, 0.5), std::out_of_range);

    const Isotopy rp = reparametrize(f, -1.0, 1.0, [](double t) { return t * t; });
    CHECK(sup_chordal_distance(rp.at(-0.5), f.at(0.25), pts) < 1e-15);
    CHECK_THROWS(reparametrize(f, 0.0, 1.0, [](double t) { return t + 0.1; }));
}

TEST_CASE("conjugating by the swap of 0 and infinity moves the saddle to infinity", "[isotopy][algebra]") {
    const ExtensionIsotopy ext = extension_isotopy(model_with_rate(ModelKind::shear, 0.5, 4.0));
    const SphereMap swap(swap_map(RefPoint::zero, RefPoint::infinity));
    const Isotopy c = conjugate(swap, ext.isotopy);
    for (int i = 0; i <= 10; ++i) {
        const double t = i / 10.0;
        const Mat2 at_inf = c.at(t).differential(ExtPoint::infinity());
        REQUIRE(max_abs(at_inf - ext.isotopy.at(t).differential_at_origin()) < 1e-9);
        // Oracle in the chart w = 1/z: central differences of w -> 1 / c_t(1 / w).
        const SphereMap m = c.at(t);
        const auto chart = [&](cplx w) { return 1.0 / m(ExtPoint(1.0 / w)).value(); };
        const double h = 1e-6;
        const cplx fx = (chart(cplx(h, 1e-300)) - chart(cplx(-h, 1e-300))) / (2.0 * h);
        const cplx fy = (chart(cplx(1e-300, h)) - chart(cplx(1e-300, -h))) / (2.0 * h);
        REQUIRE_THAT(at_inf(0, 0), WithinAbs(fx.real(), 1e-6));
        REQUIRE_THAT(at_inf(1, 0), WithinAbs(fx.imag(), 1e-6));
        REQUIRE_THAT(at_inf(0, 1), WithinAbs(fy.real(), 1e-6));
        REQUIRE_THAT(at_inf(1, 1), WithinAbs(fy.imag(), 1e-6));
    }
}

TEST_CASE("verification points cover the sphere", "[isotopy]") {
    const std::vector<ExtPoint> pts = verification_points(100);
    REQUIRE(pts.size() == 100);
    double worst_gap = 0.0;
    std::mt19937_64 rng(71);
    std::normal_distribution<double> n;
    for (int i = 0; i < 2000; ++i) {
        const double x = n(rng), y = n(rng), z = n(rng), l = std::sqrt(x * x + y * y + z * z);
        const ExtPoint probe = stereo(SpherePoint{x / l, y / l, z / l});
        double best = 2.0;
        for (const auto& p : pts) best = std::min(best, chordal_dist(p, probe));
        worst_gap = std::max(worst_gap, best);
    }
    CHECK(worst_gap < 0.5);
    for (const auto& p : pts) CHECK(p.is_finite());
}

TEST_CASE("rescaled circle gap", "[isotopy][c1]") {
    SECTION("linear maps have no gap at any scale") {
        Mat2 m;
        m << 1.3, 0.4, -0.2, 0.9;
        const SphereMap g = SphereMap::linear(m);
        for (double r : {1e-6, 1e-2, 1.0, 37.0}) CHECK(rescaled_circle_c1_gap(g, r) < 1e-9);
    }
    SECTION("Möbius maps fixing 0 converge") {
        const MobiusMap m(cplx(1.0, 0.5), 0.0, cplx(0.4, -0.3), 1.0);
        CHECK(rescaled_circle_c1_gap(SphereMap(m), 1e-4) < 1e-3);
        double prev = 1e300;
        for (int k = 0; k < 8; ++k) {
            const double gap = rescaled_circle_c1_gap(SphereMap(m), std::ldexp(0.25, -k));
            CHECK(gap < prev);
            prev = gap;
        }
    }
    SECTION("second-order oracle for a Möbius map fixing 0") {
        // g(r e)/r - e = c r e^2; value gap |c| r, slope gap 4 pi |c| r.
        const cplx c(0.3, 0.4);
        const MobiusMap m(1.0, 0.0, -c, 1.0);  // z / (1 - c z) = z + c z^2 + O(z^3)
        const double r = 1e-5;
        const double expect = std::abs(c) * r * (1.0 + 4.0 * std::numbers::pi);
        CHECK_THAT(rescaled_circle_c1_gap(SphereMap(m), r), WithinAbs(expect, 1e-3 * expect));
    }
}
