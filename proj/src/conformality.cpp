#include "mobdyn/conformality.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace mobdyn {

namespace {

// Golden-section search for an extremum of f on [lo, hi]; sign = +1 maximizes.
template <class F>
double golden_extremum(F f, double lo, double hi, double sign) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
    double fc = sign * f(c), fd = sign * f(d);
    for (int i = 0; i < 80 && b - a > 1e-13; ++i) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = sign * f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = sign * f(d);
        }
    }
    return sign * std::max(fc, fd);
}

}  // namespace

double circle_roundness(const SphereMap& g, double r, int angles) {
    const ExtPoint zero(0.0, 0.0);
    if (chordal_dist(g(zero), zero) > 1e-9 || g(ExtPoint::infinity()).is_finite())
        throw std::domain_error("circle_roundness: map must fix 0 and infinity");
    if (!(r > 0.0)) throw std::invalid_argument("circle_roundness: radius must be positive");
    angles = std::max(angles, 720);
    const double step = 2.0 * std::numbers::pi / angles;
    const auto modulus = [&](double th) { return std::abs(g(std::polar(r, th))); };
    int imax = 0, imin = 0;
    std::vector<double> m(angles);
    for (int i = 0; i < angles; ++i) {
        m[i] = modulus(i * step);
        if (m[i] > m[imax]) imax = i;
        if (m[i] < m[imin]) imin = i;
    }
    const double hi = std::max(m[imax], golden_extremum(modulus, (imax - 1) * step, (imax + 1) * step, 1.0));
    const double lo = std::min(m[imin], golden_extremum(modulus, (imin - 1) * step, (imin + 1) * step, -1.0));
    return hi / lo;
}

ConformalityVerdict conformality_at_origin_test(const SphereMap& g) {
    const ExtPoint zero(0.0, 0.0);
    if (chordal_dist(g(zero), zero) > 1e-12) throw std::domain_error("conformality test: map must fix 0");
    const Mat2 d = g.differential_at_origin();
    ConformalityVerdict v;
    v.defect = conformal_defect(d);
    v.conformal = v.defect <= kConformalTol;

    const Eigen::JacobiSVD<Mat2> svd(d, Eigen::ComputeFullV);
    const Vec2 big = svd.matrixV().col(0), small = svd.matrixV().col(1);
    v.limit_ratio = svd.singularValues()(1) / svd.singularValues()(0);
    const cplx zM(big.x(), big.y()), zm(small.x(), small.y());
    for (int k = 1; k <= 20; ++k) {
        const double t = std::ldexp(1.0, -k);
        v.ratios.push_back(std::abs(g(t * zm)) / std::abs(g(t * zM)));
    }
    const double tail = std::abs(v.ratios.back() - v.limit_ratio);
    const bool settled = tail <= 1e-4 * std::max(1.0, v.limit_ratio);
    const bool side = v.conformal ? std::abs(v.ratios.back() - 1.0) <= 1e-4 : v.ratios.back() < 1.0 - 1e-6;
    v.trend_agrees = settled && side;
    return v;
}

}  // namespace mobdyn
