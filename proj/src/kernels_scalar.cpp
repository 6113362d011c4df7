#include "mobdyn/kernels.hpp"

#include <cmath>
#include <stdexcept>

namespace mobdyn::kernels {

bool avx2_available() {
#if defined(__x86_64__) || defined(__i386__)
    static const bool ok = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
    return ok;
#else
    return false;
#endif
}

Backend active_backend() { return avx2_available() ? Backend::avx2 : Backend::scalar; }

std::string_view to_string(Backend b) { return b == Backend::avx2 ? "avx2" : "scalar"; }

namespace {
void check_sizes(std::size_t n, std::size_t m) {
    if (n != m) throw std::invalid_argument("kernels: mismatched batch lengths");
}
}  // namespace

namespace scalar {

void mobius_apply(const MobiusMap& m, std::span<const double> re, std::span<const double> im, MobiusBatchOut out) {
    const std::size_t n = re.size();
    check_sizes(n, im.size());
    check_sizes(n, out.re.size());
    check_sizes(n, out.im.size());
    check_sizes(n, out.pole.size());
    const double ar = m.a().real(), ai = m.a().imag(), br = m.b().real(), bi = m.b().imag();
    const double cr = m.c().real(), ci = m.c().imag(), dr = m.d().real(), di = m.d().imag();
    for (std::size_t k = 0; k < n; ++k) {
        const double x = re[k], y = im[k];
        const double nr = ar * x - ai * y + br;
        const double ni = ar * y + ai * x + bi;
        const double qr = cr * x - ci * y + dr;
        const double qi = cr * y + ci * x + di;
        const double q2 = qr * qr + qi * qi;
        if (q2 == 0.0) {
            out.re[k] = 0.0;
            out.im[k] = 0.0;
            out.pole[k] = 1;
            continue;
        }
        out.re[k] = (nr * qr + ni * qi) / q2;
        out.im[k] = (ni * qr - nr * qi) / q2;
        out.pole[k] = 0;
    }
}

void chordal_dist(std::span<const double> re1, std::span<const double> im1, std::span<const double> re2,
                  std::span<const double> im2, std::span<double> out) {
    const std::size_t n = re1.size();
    check_sizes(n, im1.size());
    check_sizes(n, re2.size());
    check_sizes(n, im2.size());
    check_sizes(n, out.size());
    for (std::size_t k = 0; k < n; ++k) {
        const double dx = re1[k] - re2[k], dy = im1[k] - im2[k];
        const double s1 = 1.0 + re1[k] * re1[k] + im1[k] * im1[k];
        const double s2 = 1.0 + re2[k] * re2[k] + im2[k] * im2[k];
        out[k] = 2.0 * std::sqrt(dx * dx + dy * dy) / std::sqrt(s1 * s2);
    }
}

void cone_mask(double alpha, std::span<const double> re, std::span<const double> im, std::span<std::uint8_t> out) {
    const std::size_t n = re.size();
    check_sizes(n, im.size());
    check_sizes(n, out.size());
    const double slope = std::tan(alpha);
    for (std::size_t k = 0; k < n; ++k) out[k] = std::abs(im[k]) <= slope * std::abs(re[k]) ? 1 : 0;
}

}  // namespace scalar

void mobius_apply(const MobiusMap& m, std::span<const double> re, std::span<const double> im, MobiusBatchOut out) {
    if (avx2_available()) return avx2::mobius_apply(m, re, im, out);
    scalar::mobius_apply(m, re, im, out);
}

void chordal_dist(std::span<const double> re1, std::span<const double> im1, std::span<const double> re2,
                  std::span<const double> im2, std::span<double> out) {
    if (avx2_available()) return avx2::chordal_dist(re1, im1, re2, im2, out);
    scalar::chordal_dist(re1, im1, re2, im2, out);
}

void cone_mask(double alpha, std::span<const double> re, std::span<const double> im, std::span<std::uint8_t> out) {
    if (avx2_available()) return avx2::cone_mask(alpha, re, im, out);
    scalar::cone_mask(alpha, re, im, out);
}

}  // namespace mobdyn::kernels
