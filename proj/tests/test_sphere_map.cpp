#include "catch_amalgamated.hpp"

#include "mobdyn/sphere_map.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace mobdyn;
using Catch::Matchers::WithinAbs;

namespace {

double max_abs(const Mat2& m) { return m.cwiseAbs().maxCoeff(); }

cplx random_disk_point(std::mt19937_64& rng, double r) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    return std::polar(r * std::sqrt(u(rng)), 2.0 * std::numbers::pi * u(rng));
}

}  // namespace

TEST_CASE("shear model basics", "[model]") {
    const ModelDiffeo d(ModelKind::shear, 0.5, 4.0);
    const SphereMap g = SphereMap::model(d);
    Mat2 expect;
    expect << 1.0, 0.5, 0.0, 1.0;
    CHECK(max_abs(g.differential_at_origin() - expect) < 1e-15);
    for (double th = 0.0; th < 6.3; th += 0.1) {
        const cplx z = std::polar(4.0 + th, th);
        CHECK(g(z) == z);
    }
    CHECK(g(ExtPoint::infinity()).is_infinite());
    CHECK(g(ExtPoint(0.0, 0.0)) == ExtPoint(0.0, 0.0));
}

TEST_CASE("stretch model differential", "[model]") {
    const SphereMap g = SphereMap::model(ModelDiffeo(ModelKind::stretch, 0.3, 2.0));
    Mat2 expect;
    expect << 1.3, 0.0, 0.0, 1.0;
    CHECK(max_abs(g.differential_at_origin() - expect) < 1e-15);
}

TEST_CASE("model strength bound", "[model]") {
    CHECK_THROWS(ModelDiffeo(ModelKind::shear, ModelDiffeo::eps_max(ModelKind::shear, 1.0) * 1.01, 1.0));
    CHECK_THROWS(ModelDiffeo(ModelKind::stretch, 0.34, 3.0));
    CHECK_THROWS(ModelDiffeo(ModelKind::shear, -0.1, 3.0));
    CHECK_NOTHROW(ModelDiffeo(ModelKind::stretch, 0.33, 3.0));
}

TEST_CASE("bump profile is C^1 with the stated support", "[model]") {
    const double R = 2.0;
    CHECK(ModelDiffeo::bump(0.0, R) == 1.0);
    CHECK(ModelDiffeo::bump(1.0, R) == 1.0);
    CHECK(ModelDiffeo::bump(2.0, R) == 0.0);
    CHECK(ModelDiffeo::bump(5.0, R) == 0.0);
    for (double s = 0.01; s < 2.5; s += 0.01) {
        const double fd = (ModelDiffeo::bump(s + 1e-7, R) - ModelDiffeo::bump(s - 1e-7, R)) / 2e-7;
        REQUIRE_THAT(ModelDiffeo::bump_slope(s, R), WithinAbs(fd, 1e-6));
        REQUIRE(std::abs(ModelDiffeo::bump_slope(s, R)) <= 3.0 / R + 1e-12);
    }
}

TEST_CASE("model Jacobian is positive near the strength bound", "[model][property]") {
    for (auto kind : {ModelKind::shear, ModelKind::stretch}) {
        const double R = 1.7;
        const ModelDiffeo d(kind, 0.99 * ModelDiffeo::eps_max(kind, R), R);
        std::mt19937_64 rng(61);
        for (int i = 0; i < 20000; ++i) REQUIRE(d.jacobian(random_disk_point(rng, 1.1 * R)).determinant() > 0.0);
    }
}

TEST_CASE("model inverses", "[model][property]") {
    std::mt19937_64 rng(62);
    for (auto kind : {ModelKind::shear, ModelKind::stretch}) {
        const SphereMap g = SphereMap::model(ModelDiffeo(kind, 0.3, 2.5));
        const SphereMap gi = g.inverse();
        for (int i = 0; i < 5000; ++i) {
            const cplx z = random_disk_point(rng, 3.0);
            REQUIRE(std::abs(gi(g(z)) - z) < 1e-14);
            REQUIRE(std::abs(g(gi(z)) - z) < 1e-14);
        }
    }
}

TEST_CASE("chain-rule differential matches finite differences", "[sphere_map][property]") {
    std::mt19937_64 rng(63);
    const MobiusMap m1(cplx(1.0, 0.2), cplx(0.1, 0.0), cplx(0.05, -0.02), cplx(1.0, 0.0));
    const SphereMap g = SphereMap(MobiusMap::rotation(0.7)) * SphereMap::model(ModelDiffeo(ModelKind::shear, 0.4, 2.0)) *
                        SphereMap(m1) * SphereMap::model(ModelDiffeo(ModelKind::stretch, 0.2, 1.0)).inverse();
    for (int i = 0; i < 500; ++i) {
        const cplx z = random_disk_point(rng, 2.5);
        const Mat2 fd = finite_difference_jacobian(g, z);
        REQUIRE(max_abs(g.differential(ExtPoint(z)) - fd) < 1e-6);
        REQUIRE(g.differential(ExtPoint(z)).determinant() > 0.0);
    }
}

TEST_CASE("differential at infinity uses the inverted chart", "[sphere_map]") {
    const SphereMap t(swap_map(RefPoint::zero, RefPoint::infinity));
    const SphereMap model = SphereMap::model(ModelDiffeo(ModelKind::shear, 0.5, 1.0));
    // In the chart w = 1/z at infinity, t * model * t reads as the model itself.
    const SphereMap g = t * model * t;
    const Mat2 d = g.differential(ExtPoint::infinity());
    CHECK(max_abs(d - model.differential_at_origin()) < 1e-14);
    // Oracle: finite differences of w -> 1 / g(1 / w) at w = 0 (w small, nonzero).
    const auto chart = [&](cplx w) { return 1.0 / g(ExtPoint(1.0 / w)).value(); };
    const double h = 1e-6;
    const cplx fx = (chart(cplx(h, 1e-300)) - chart(cplx(-h, 1e-300))) / (2.0 * h);
    const cplx fy = (chart(cplx(1e-300, h)) - chart(cplx(1e-300, -h))) / (2.0 * h);
    CHECK_THAT(d(0, 0), WithinAbs(fx.real(), 1e-6));
    CHECK_THAT(d(1, 0), WithinAbs(fx.imag(), 1e-6));
    CHECK_THAT(d(0, 1), WithinAbs(fy.real(), 1e-6));
    CHECK_THAT(d(1, 1), WithinAbs(fy.imag(), 1e-6));
}

TEST_CASE("Möbius chart Jacobians at poles", "[sphere_map]") {
    const MobiusMap m(cplx(2.0, 1.0), 1.0, cplx(1.0, -1.0), 3.0);
    const cplx pole = -m.d() / m.c();
    // Oracle: derivative of 1/M(z) = (cz + d)/(az + b) by finite differences.
    const auto inv_chart = [&](cplx z) { return (m.c() * z + m.d()) / (m.a() * z + m.b()); };
    const double h = 1e-6;
    const cplx fd = (inv_chart(pole + h) - inv_chart(pole - h)) / (2.0 * h);
    const Mat2 j = mobius_chart_jacobian(m, ExtPoint(pole));
    CHECK_THAT(j(0, 0), WithinAbs(fd.real(), 1e-8));
    CHECK_THAT(j(1, 0), WithinAbs(fd.imag(), 1e-8));
    // At infinity with finite image: derivative of M(1/w) at w = 0.
    const auto at_inf = [&](cplx w) { return (m.a() + m.b() * w) / (m.c() + m.d() * w); };
    const cplx fd2 = (at_inf(h) - at_inf(-h)) / (2.0 * h);
    const Mat2 j2 = mobius_chart_jacobian(m, ExtPoint::infinity());
    CHECK_THAT(j2(0, 0), WithinAbs(fd2.real(), 1e-8));
    CHECK_THAT(j2(1, 0), WithinAbs(fd2.imag(), 1e-8));
}

TEST_CASE("adjacent Möbius factors collapse", "[sphere_map]") {
    const SphereMap a(MobiusMap::rotation(0.3)), b(MobiusMap::scaling(2.0));
    const SphereMap ab = a * b;
    REQUIRE(ab.as_mobius() != nullptr);
    CHECK(ab.primitives().size() == 1);
    const SphereMap m = SphereMap::model(ModelDiffeo(ModelKind::shear, 0.2, 1.0));
    CHECK((a * m * b).primitives().size() == 3);
}

TEST_CASE("powers iterate and invert", "[sphere_map][property]") {
    const SphereMap g = SphereMap(MobiusMap::rotation(0.2)) * SphereMap::model(ModelDiffeo(ModelKind::shear, 0.3, 2.0));
    const SphereMap g5 = SphereMap::power(g, 5);
    const SphereMap gm5 = SphereMap::power(g, -5);
    std::mt19937_64 rng(64);
    for (int i = 0; i < 200; ++i) {
        const cplx z = random_disk_point(rng, 2.0);
        cplx w = z;
        for (int k = 0; k < 5; ++k) w = g(w);
        REQUIRE(std::abs(g5(z) - w) < 1e-13);
        REQUIRE(std::abs(gm5(g5(z)) - z) < 1e-12);
        REQUIRE(max_abs(g5.differential(ExtPoint(z)) - finite_difference_jacobian(g5, z)) < 1e-5);
    }
    const SphereMap rot5 = SphereMap::power(SphereMap(MobiusMap::rotation(0.1)), 5);
    REQUIRE(rot5.as_mobius() != nullptr);
    CHECK(rot5.as_mobius()->approx_equal(MobiusMap::rotation(0.5), 1e-14));
}

TEST_CASE("linear primitive refuses a differential at infinity", "[sphere_map]") {
    Mat2 m;
    m << 2.0, 0.0, 0.0, 0.5;
    const SphereMap g = SphereMap::linear(m);
    CHECK(g(ExtPoint::infinity()).is_infinite());
    CHECK_THROWS_AS(g.differential(ExtPoint::infinity()), std::domain_error);
    CHECK(max_abs(g.differential_at_origin() - m) == 0.0);
    Mat2 flip;
    flip << 1.0, 0.0, 0.0, -1.0;
    CHECK_THROWS(SphereMap::linear(flip));
}
