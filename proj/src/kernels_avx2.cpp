#include "mobdyn/kernels.hpp"

#include <cmath>
#include <stdexcept>

#if defined(__x86_64__)
#include <immintrin.h>
#define MOBDYN_AVX2 __attribute__((target("avx2,fma")))
#endif

namespace mobdyn::kernels::avx2 {

#if defined(__x86_64__)

namespace {

constexpr std::size_t kLanes = 4;

void require(bool ok) {
    if (!ok) throw std::invalid_argument("kernels: mismatched batch lengths");
}

MOBDYN_AVX2 inline __m256d abs_pd(__m256d v) {
    return _mm256_andnot_pd(_mm256_set1_pd(-0.0), v);
}

}  // namespace

MOBDYN_AVX2 void mobius_apply(const MobiusMap& m, std::span<const double> re, std::span<const double> im,
                              MobiusBatchOut out) {
    const std::size_t n = re.size();
    require(im.size() == n && out.re.size() == n && out.im.size() == n && out.pole.size() == n);
    const __m256d ar = _mm256_set1_pd(m.a().real()), ai = _mm256_set1_pd(m.a().imag());
    const __m256d br = _mm256_set1_pd(m.b().real()), bi = _mm256_set1_pd(m.b().imag());
    const __m256d cr = _mm256_set1_pd(m.c().real()), ci = _mm256_set1_pd(m.c().imag());
    const __m256d dr = _mm256_set1_pd(m.d().real()), di = _mm256_set1_pd(m.d().imag());
    const __m256d zero = _mm256_setzero_pd();
    std::size_t k = 0;
    for (; k + kLanes <= n; k += kLanes) {
        const __m256d x = _mm256_loadu_pd(re.data() + k);
        const __m256d y = _mm256_loadu_pd(im.data() + k);
        const __m256d nr = _mm256_fmadd_pd(ar, x, _mm256_fnmadd_pd(ai, y, br));
        const __m256d ni = _mm256_fmadd_pd(ar, y, _mm256_fmadd_pd(ai, x, bi));
        const __m256d qr = _mm256_fmadd_pd(cr, x, _mm256_fnmadd_pd(ci, y, dr));
        const __m256d qi = _mm256_fmadd_pd(cr, y, _mm256_fmadd_pd(ci, x, di));
        const __m256d q2 = _mm256_fmadd_pd(qr, qr, _mm256_mul_pd(qi, qi));
        const __m256d pole = _mm256_cmp_pd(q2, zero, _CMP_EQ_OQ);
        const __m256d safe = _mm256_blendv_pd(q2, _mm256_set1_pd(1.0), pole);
        __m256d wr = _mm256_div_pd(_mm256_fmadd_pd(nr, qr, _mm256_mul_pd(ni, qi)), safe);
        __m256d wi = _mm256_div_pd(_mm256_fmsub_pd(ni, qr, _mm256_mul_pd(nr, qi)), safe);
        wr = _mm256_blendv_pd(wr, zero, pole);
        wi = _mm256_blendv_pd(wi, zero, pole);
        _mm256_storeu_pd(out.re.data() + k, wr);
        _mm256_storeu_pd(out.im.data() + k, wi);
        const int bits = _mm256_movemask_pd(pole);
        for (std::size_t l = 0; l < kLanes; ++l) out.pole[k + l] = (bits >> l) & 1;
    }
    if (k < n)
        scalar::mobius_apply(m, re.subspan(k), im.subspan(k),
                             {out.re.subspan(k), out.im.subspan(k), out.pole.subspan(k)});
}

MOBDYN_AVX2 void chordal_dist(std::span<const double> re1, std::span<const double> im1,
                              std::span<const double> re2, std::span<const double> im2, std::span<double> out) {
    const std::size_t n = re1.size();
    require(im1.size() == n && re2.size() == n && im2.size() == n && out.size() == n);
    const __m256d one = _mm256_set1_pd(1.0), two = _mm256_set1_pd(2.0);
    std::size_t k = 0;
    for (; k + kLanes <= n; k += kLanes) {
        const __m256d x1 = _mm256_loadu_pd(re1.data() + k), y1 = _mm256_loadu_pd(im1.data() + k);
        const __m256d x2 = _mm256_loadu_pd(re2.data() + k), y2 = _mm256_loadu_pd(im2.data() + k);
        const __m256d dx = _mm256_sub_pd(x1, x2), dy = _mm256_sub_pd(y1, y2);
        const __m256d d2 = _mm256_fmadd_pd(dx, dx, _mm256_mul_pd(dy, dy));
        const __m256d s1 = _mm256_fmadd_pd(x1, x1, _mm256_fmadd_pd(y1, y1, one));
        const __m256d s2 = _mm256_fmadd_pd(x2, x2, _mm256_fmadd_pd(y2, y2, one));
        const __m256d r = _mm256_div_pd(_mm256_mul_pd(two, _mm256_sqrt_pd(d2)), _mm256_sqrt_pd(_mm256_mul_pd(s1, s2)));
        _mm256_storeu_pd(out.data() + k, r);
    }
    if (k < n) scalar::chordal_dist(re1.subspan(k), im1.subspan(k), re2.subspan(k), im2.subspan(k), out.subspan(k));
}

MOBDYN_AVX2 void cone_mask(double alpha, std::span<const double> re, std::span<const double> im,
                           std::span<std::uint8_t> out) {
    const std::size_t n = re.size();
    require(im.size() == n && out.size() == n);
    const __m256d slope = _mm256_set1_pd(std::tan(alpha));
    std::size_t k = 0;
    for (; k + kLanes <= n; k += kLanes) {
        const __m256d x = abs_pd(_mm256_loadu_pd(re.data() + k));
        const __m256d y = abs_pd(_mm256_loadu_pd(im.data() + k));
        const int bits = _mm256_movemask_pd(_mm256_cmp_pd(y, _mm256_mul_pd(slope, x), _CMP_LE_OQ));
        for (std::size_t l = 0; l < kLanes; ++l) out[k + l] = (bits >> l) & 1;
    }
    if (k < n) scalar::cone_mask(alpha, re.subspan(k), im.subspan(k), out.subspan(k));
}

#else

void mobius_apply(const MobiusMap& m, std::span<const double> re, std::span<const double> im, MobiusBatchOut out) {
    scalar::mobius_apply(m, re, im, out);
}
void chordal_dist(std::span<const double> re1, std::span<const double> im1, std::span<const double> re2,
                  std::span<const double> im2, std::span<double> out) {
    scalar::chordal_dist(re1, im1, re2, im2, out);
}
void cone_mask(double alpha, std::span<const double> re, std::span<const double> im, std::span<std::uint8_t> out) {
    scalar::cone_mask(alpha, re, im, out);
}

#endif

}  // namespace mobdyn::kernels::avx2
