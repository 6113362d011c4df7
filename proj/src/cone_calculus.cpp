#include "mobdyn/cone_calculus.hpp"

#include "mobdyn/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

namespace mobdyn {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;

struct Sample {
    std::vector<double> re, im;
    std::size_t size() const { return re.size(); }
    cplx at(std::size_t i) const { return {re[i], im[i]}; }
};

// Radius log-uniform in [rho 1e-4, rho), folded angle uniform in
// [fold_lo, fold_hi], quadrant uniform.
Sample draw(std::mt19937_64& rng, int n, double rho, double fold_lo, double fold_hi) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<int> quad(0, 3);
    Sample s;
    s.re.reserve(n);
    s.im.reserve(n);
    for (int i = 0; i < n; ++i) {
        const double r = rho * std::pow(10.0, -4.0 * u(rng));
        const double phi = fold_lo + (fold_hi - fold_lo) * u(rng);
        const int q = quad(rng);
        const double th = (q < 2 ? 0.0 : std::numbers::pi) + ((q % 2) ? -phi : phi);
        s.re.push_back(r * std::cos(th));
        s.im.push_back(r * std::sin(th));
    }
    return s;
}

Sample image(const SphereMap& g, const Sample& s) {
    Sample out;
    out.re.resize(s.size());
    out.im.resize(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        const cplx w = g(s.at(i));
        out.re[i] = w.real();
        out.im[i] = w.imag();
    }
    return out;
}

double time_at(const Isotopy& f, int i) {
    if (i == kConeTimes - 1) return f.t1();
    return f.t0() + (f.t1() - f.t0()) * i / (kConeTimes - 1);
}

void require_diagonal_saddle(const SphereMap& g) {
    const Mat2 d = g.differential_at_origin();
    const bool diagonal = std::abs(d(0, 1)) <= 1e-8 && std::abs(d(1, 0)) <= 1e-8;
    const bool saddle = d(0, 0) > 0.0 && d(0, 0) < 1.0 && std::abs(d(0, 0) * d(1, 1) - 1.0) <= 1e-8;
    if (!diagonal || !saddle) throw std::invalid_argument("cone search: differential at 0 is not diag(l, 1/l)");
}

void require_axis_invariance(const Isotopy& f) {
    for (int i = 0; i < kConeTimes; ++i) {
        const SphereMap ft = f.at(time_at(f, i));
        if (std::abs(ft(cplx(0.0, 0.0))) > 1e-12) throw std::invalid_argument("cone search: isotopy moves 0");
        if (std::abs(ft.differential_at_origin()(1, 0)) > 1e-8)
            throw std::invalid_argument("cone search: differential at 0 does not keep the x-axis");
    }
}

}  // namespace

double folded_angle(cplx z) {
    const double a = std::abs(polar_angle(z));
    return a > kHalfPi ? std::numbers::pi - a : a;
}

TauDelta find_tau_delta(const SphereMap& g, double alpha, std::uint64_t seed) {
    const Cone cone(alpha);  // validates alpha
    require_diagonal_saddle(g);
    std::mt19937_64 rng(seed);
    const double tau_cap = alpha;
    const std::size_t n = kConeSamples;
    std::vector<double> rr(n), ri(n);
    std::vector<std::uint8_t> pole(n), mask(n);

    double delta = kConeSearchCap;
    for (int halving = 0; halving <= 30; ++halving, delta /= 2.0) {
        const Sample z = draw(rng, kConeSamples, delta, alpha, kHalfPi);
        const Sample w = image(g, z);
        int first_fail = kOmegaSteps + 1;
        for (int j = 0; j <= kOmegaSteps && first_fail > kOmegaSteps; ++j) {
            const double omega = tau_cap * j / kOmegaSteps;
            for (double sgn : {1.0, -1.0}) {
                kernels::mobius_apply(MobiusMap::rotation(sgn * omega), w.re, w.im, {rr, ri, pole});
                kernels::cone_mask(alpha, rr, ri, mask);
                if (std::any_of(mask.begin(), mask.end(), [](std::uint8_t m) { return m != 0; })) {
                    first_fail = j;
                    break;
                }
            }
        }
        if (first_fail == 0) continue;
        // Every grid rotation strictly below omega_{first_fail} passed.
        const int j = std::min(first_fail, kOmegaSteps);
        return {tau_cap * j / kOmegaSteps, delta, kOmegaSteps, kConeSamples};
    }
    throw ConeSearchError("find_tau_delta: no radius keeps g(z) out of the cone", cplx(delta, 0.0), 1.0);
}

ConeConstants find_cone_constants(const Isotopy& f, double alpha, std::uint64_t seed) {
    const Cone cone(alpha);
    require_axis_invariance(f);
    std::mt19937_64 rng(seed);
    std::vector<SphereMap> maps;
    maps.reserve(kConeTimes);
    for (int i = 0; i < kConeTimes; ++i) maps.push_back(f.at(time_at(f, i)));

    double rho = kConeSearchCap;
    cplx worst_sample(0.0, 0.0);
    double worst_time = 0.0;
    for (int halving = 0; halving <= kShrinkBudget; ++halving, rho /= 2.0) {
        const Sample outer = draw(rng, kConeSamples / 2, rho, alpha, kHalfPi);
        const Sample inner = draw(rng, kConeSamples / 2, rho, 0.0, alpha);

        // Smallest folded angle reached by an outside point at any time.
        double outer_min = kHalfPi;
        std::vector<double> inner_max(inner.size(), 0.0);
        for (int ti = 0; ti < kConeTimes; ++ti) {
            const SphereMap& ft = maps[ti];
            for (std::size_t i = 0; i < outer.size(); ++i) {
                const double a = folded_angle(ft(outer.at(i)));
                if (a < outer_min) {
                    outer_min = a;
                    worst_sample = outer.at(i);
                    worst_time = time_at(f, ti);
                }
            }
            for (std::size_t i = 0; i < inner.size(); ++i)
                inner_max[i] = std::max(inner_max[i], folded_angle(ft(inner.at(i))));
        }
        const double beta_plus = std::min(outer_min, alpha) / kSafetyMargin;
        if (!(beta_plus > 0.0)) continue;

        // Largest initial opening whose images all stay inside beta+ / 1.1.
        double opening = beta_plus;
        for (std::size_t i = 0; i < inner.size(); ++i) {
            if (inner_max[i] > beta_plus / kSafetyMargin) {
                const double a = folded_angle(inner.at(i));
                if (a < opening) {
                    opening = a;
                    worst_sample = inner.at(i);
                }
            }
        }
        const double beta_minus = opening / kSafetyMargin;
        if (beta_minus < 0.01 * beta_plus) continue;
        ConeConstants c;
        c.alpha = alpha;
        c.beta_minus = beta_minus;
        c.beta_plus = beta_plus;
        c.rho = rho;
        c.halvings = halving;
        return c;
    }
    throw ConeSearchError("find_cone_constants: shrink budget exhausted", worst_sample, worst_time);
}

ConeAudit audit_cone_constants(const Isotopy& f, const ConeConstants& c, std::uint64_t seed, int samples) {
    std::mt19937_64 rng(seed);
    const Sample outer = draw(rng, samples / 2, c.rho, c.alpha, kHalfPi);
    const Sample inner = draw(rng, samples - samples / 2, c.rho, 0.0, c.beta_minus);
    std::vector<std::uint8_t> outer_bad(outer.size(), 0), outer_strict(outer.size(), 0);
    std::vector<std::uint8_t> inner_bad(inner.size(), 0), inner_strict(inner.size(), 0);
    std::vector<std::uint8_t> mask_plus(std::max(outer.size(), inner.size()));
    std::vector<std::uint8_t> mask_tight(mask_plus.size());

    for (int ti = 0; ti < kConeTimes; ++ti) {
        const SphereMap ft = f.at(time_at(f, ti));
        const Sample wo = image(ft, outer);
        const std::span<std::uint8_t> mo(mask_plus.data(), wo.size()), mt(mask_tight.data(), wo.size());
        kernels::cone_mask(c.beta_plus, wo.re, wo.im, mo);
        kernels::cone_mask(c.beta_plus / kSafetyMargin, wo.re, wo.im, mt);
        for (std::size_t i = 0; i < wo.size(); ++i) {
            outer_bad[i] |= mo[i];
            outer_strict[i] |= mt[i];
        }
        const Sample wi = image(ft, inner);
        const std::span<std::uint8_t> mi(mask_plus.data(), wi.size()), ml(mask_tight.data(), wi.size());
        kernels::cone_mask(c.beta_plus, wi.re, wi.im, mi);
        kernels::cone_mask(std::min(c.beta_plus * kSafetyMargin, kHalfPi * 0.999999), wi.re, wi.im, ml);
        for (std::size_t i = 0; i < wi.size(); ++i) {
            inner_bad[i] |= !mi[i];
            inner_strict[i] |= !ml[i];
        }
    }
    // Strict: the image misses the target cone by more than the 10% band.
    ConeAudit a;
    a.checked = static_cast<long>(outer.size() + inner.size());
    for (std::size_t i = 0; i < outer.size(); ++i) {
        a.violations += outer_bad[i];
        a.strict_violations += outer_strict[i];
    }
    for (std::size_t i = 0; i < inner.size(); ++i) {
        a.violations += inner_bad[i];
        a.strict_violations += inner_strict[i];
    }
    return a;
}

namespace {

// +1 / -1: sign of y at the first exit from the disk; 0: never exits.
int escape_side(const SphereMap& g, cplx z, double rho0) {
    const double floor = std::abs(z) * 1e-280;
    for (int n = 0; n < 20000; ++n) {
        z = g(z);
        if (std::abs(z) > rho0) return z.imag() > 0.0 ? 1 : (z.imag() < 0.0 ? -1 : 0);
        if (std::abs(z) <= floor) return 0;
    }
    return 0;
}

bool stays_and_contracts(const SphereMap& g, cplx z, double rho0) {
    const double start = std::abs(z);
    for (int n = 0; n < kStableStay; ++n) {
        z = g(z);
        if (std::abs(z) > rho0) return false;
    }
    return std::abs(z) < start;
}

}  // namespace

double stable_manifold_angle(const SphereMap& g, double r, double rho0) {
    if (!(r > 0.0 && r < rho0)) throw std::invalid_argument("stable_manifold_angle: need 0 < r < rho0");
    const auto side = [&](double ang) { return escape_side(g, std::polar(r, ang), rho0); };
    double lo = -std::numbers::pi / 4.0, hi = std::numbers::pi / 4.0;
    const int slo = side(lo), shi = side(hi);
    if (slo == 0 || shi == 0 || slo == shi)
        throw std::runtime_error("stable_manifold_angle: no escape-side bracket within |angle| <= pi/4");
    double mid = 0.0;
    for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
        mid = 0.5 * (lo + hi);
        const int s = side(mid);
        if (s == 0) break;
        (s == slo ? lo : hi) = mid;
    }
    if (!stays_and_contracts(g, std::polar(r, mid), rho0))
        throw std::runtime_error("stable_manifold_angle: orbit does not stay 50 iterates");
    return mid;
}

EscapeRecord escape_time(const SphereMap& g, const ExtPoint& z, double rho0, long cap) {
    if (z.is_infinite() || !(std::abs(z.value()) < rho0))
        throw std::invalid_argument("escape_time: start must lie inside the disk");
    cplx w = z.value();
    for (long n = 1; n <= cap; ++n) {
        w = g(w);
        if (std::abs(w) > rho0) return {z, n, cap};
    }
    throw EscapeCapExceeded("escape_time: orbit did not leave the disk (numerically on the stable manifold)");
}

long escape_bound(const SphereMap& g, double rho0, double rho1, double alpha) {
    constexpr int kPerArc = 256;
    long worst = 0;
    for (int arc = 0; arc < 2; ++arc) {
        for (int i = 0; i < kPerArc; ++i) {
            const double th = arc * std::numbers::pi + alpha + (std::numbers::pi - 2.0 * alpha) * i / (kPerArc - 1);
            worst = std::max(worst, escape_time(g, ExtPoint(std::polar(rho1, th)), rho0).n);
        }
    }
    return worst + 2;
}

}  // namespace mobdyn
