#include "catch_amalgamated.hpp"

#include "mobdyn/kernels.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

using namespace mobdyn;
namespace k = mobdyn::kernels;

namespace {

struct Batch {
    std::vector<double> re, im;
};

Batch random_batch(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::cauchy_distribution<double> c(0.0, 1.0);
    Batch b{std::vector<double>(n), std::vector<double>(n)};
    for (std::size_t i = 0; i < n; ++i) {
        b.re[i] = c(rng);
        b.im[i] = c(rng);
    }
    return b;
}

bool close(double a, double b) {
    return std::abs(a - b) <= 1e-13 * std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

}  // namespace

TEST_CASE("scalar Möbius batch matches pointwise evaluation", "[kernels]") {
    const MobiusMap m(cplx(1.0, 2.0), cplx(-0.5, 0.0), cplx(0.3, -0.1), cplx(2.0, 1.0));
    const Batch b = random_batch(1003, 31);
    std::vector<double> wr(b.re.size()), wi(b.re.size());
    std::vector<std::uint8_t> pole(b.re.size());
    k::scalar::mobius_apply(m, b.re, b.im, {wr, wi, pole});
    for (std::size_t i = 0; i < b.re.size(); ++i) {
        const ExtPoint w = m(ExtPoint(b.re[i], b.im[i]));
        REQUIRE(pole[i] == 0);
        REQUIRE(chordal_dist(w, ExtPoint(wr[i], wi[i])) < 1e-13);
    }
}

TEST_CASE("AVX2 kernels agree with the scalar reference", "[kernels][simd]") {
    if (!k::avx2_available()) SKIP("CPU lacks AVX2");
    for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 8u, 31u, 1000u, 4097u}) {
        const Batch b = random_batch(n, 100 + n), c = random_batch(n, 200 + n);
        std::vector<double> sr(n), si(n), vr(n), vi(n);
        std::vector<std::uint8_t> sp(n), vp(n);
        const MobiusMap m(cplx(0.2, 1.0), cplx(1.0, -1.0), cplx(-0.7, 0.4), cplx(0.1, 0.1));
        k::scalar::mobius_apply(m, b.re, b.im, {sr, si, sp});
        k::avx2::mobius_apply(m, b.re, b.im, {vr, vi, vp});
        for (std::size_t i = 0; i < n; ++i) {
            REQUIRE(sp[i] == vp[i]);
            REQUIRE(close(sr[i], vr[i]));
            REQUIRE(close(si[i], vi[i]));
        }
        std::vector<double> sd(n), vd(n);
        k::scalar::chordal_dist(b.re, b.im, c.re, c.im, sd);
        k::avx2::chordal_dist(b.re, b.im, c.re, c.im, vd);
        for (std::size_t i = 0; i < n; ++i) REQUIRE(close(sd[i], vd[i]));
        std::vector<std::uint8_t> sc(n), vc(n);
        k::scalar::cone_mask(0.4, b.re, b.im, sc);
        k::avx2::cone_mask(0.4, b.re, b.im, vc);
        for (std::size_t i = 0; i < n; ++i) REQUIRE(sc[i] == vc[i]);
    }
}

TEST_CASE("poles are flagged by both backends", "[kernels][simd]") {
    const MobiusMap recip(0.0, 1.0, 1.0, 0.0);
    std::vector<double> re{0.0, 1.0, 0.0, 2.0, 0.0}, im{0.0, 0.0, 1.0, 0.0, 0.0};
    std::vector<double> wr(5), wi(5);
    std::vector<std::uint8_t> pole(5);
    k::scalar::mobius_apply(recip, re, im, {wr, wi, pole});
    CHECK(pole == std::vector<std::uint8_t>{1, 0, 0, 0, 1});
    if (k::avx2_available()) {
        std::fill(pole.begin(), pole.end(), 7);
        k::avx2::mobius_apply(recip, re, im, {wr, wi, pole});
        CHECK(pole == std::vector<std::uint8_t>{1, 0, 0, 0, 1});
    }
}

TEST_CASE("batched chordal distance matches the geometric definition", "[kernels]") {
    const Batch b = random_batch(777, 41), c = random_batch(777, 42);
    std::vector<double> d(777);
    k::chordal_dist(b.re, b.im, c.re, c.im, d);
    for (std::size_t i = 0; i < d.size(); ++i)
        REQUIRE(std::abs(d[i] - chordal_dist(ExtPoint(b.re[i], b.im[i]), ExtPoint(c.re[i], c.im[i]))) < 1e-14);
}

TEST_CASE("batched cone mask agrees with the angular test off the boundary", "[kernels]") {
    const Batch b = random_batch(5000, 43);
    std::vector<std::uint8_t> mask(b.re.size());
    const double alpha = std::numbers::pi / 6;
    k::cone_mask(alpha, b.re, b.im, mask);
    const Cone cone(alpha);
    for (std::size_t i = 0; i < mask.size(); ++i) {
        const cplx z(b.re[i], b.im[i]);
        const double margin = std::abs(std::abs(std::atan(z.imag() / z.real())) - alpha);
        if (margin < 1e-12) continue;
        REQUIRE(static_cast<bool>(mask[i]) == cone_contains(cone, z));
    }
}

TEST_CASE("mismatched batch lengths are rejected", "[kernels]") {
    std::vector<double> a(4), b(5), out(4);
    CHECK_THROWS(k::chordal_dist(a, a, b, a, out));
}
