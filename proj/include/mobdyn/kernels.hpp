#pragma once

#include "mobdyn/mobius.hpp"

#include <cstdint>
#include <span>
#include <string_view>

// Batched structure-of-arrays kernels over finite points. Every kernel has a
// portable scalar reference and an AVX2 variant; the dispatching entry points
// pick AVX2 when the running CPU has it.
namespace mobdyn::kernels {

enum class Backend { scalar, avx2 };

bool avx2_available();
Backend active_backend();
std::string_view to_string(Backend b);

// out = M(z) for finite z; pole[i] = 1 when the image is infinity (out left 0).
struct MobiusBatchOut {
    std::span<double> re;
    std::span<double> im;
    std::span<std::uint8_t> pole;
};

namespace scalar {
void mobius_apply(const MobiusMap& m, std::span<const double> re, std::span<const double> im, MobiusBatchOut out);
void chordal_dist(std::span<const double> re1, std::span<const double> im1, std::span<const double> re2,
                  std::span<const double> im2, std::span<double> out);
void cone_mask(double alpha, std::span<const double> re, std::span<const double> im, std::span<std::uint8_t> out);
}  // namespace scalar

namespace avx2 {
void mobius_apply(const MobiusMap& m, std::span<const double> re, std::span<const double> im, MobiusBatchOut out);
void chordal_dist(std::span<const double> re1, std::span<const double> im1, std::span<const double> re2,
                  std::span<const double> im2, std::span<double> out);
void cone_mask(double alpha, std::span<const double> re, std::span<const double> im, std::span<std::uint8_t> out);
}  // namespace avx2

void mobius_apply(const MobiusMap& m, std::span<const double> re, std::span<const double> im, MobiusBatchOut out);
// Chordal distance between finite points, elementwise.
void chordal_dist(std::span<const double> re1, std::span<const double> im1, std::span<const double> re2,
                  std::span<const double> im2, std::span<double> out);
// 1 where |Im| <= tan(alpha) |Re|; the origin counts as inside.
void cone_mask(double alpha, std::span<const double> re, std::span<const double> im, std::span<std::uint8_t> out);

}  // namespace mobdyn::kernels
