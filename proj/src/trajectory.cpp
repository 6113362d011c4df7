#include "mobdyn/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mobdyn {

SaddleSetup make_setup(ModelKind kind, double eps, double radius) {
    const SphereMap h = SphereMap::model(ModelDiffeo(kind, eps, radius));
    ExtensionIsotopy ext = extension_isotopy(h);
    SphereMap g = ext.isotopy.at(1.0);
    return {kind, eps, radius, std::move(ext), std::move(g)};
}

// ---- trajectories ----------------------------------------------------------

Trajectory::Trajectory(std::vector<TrajectorySample> samples, std::string origin)
    : samples_(std::move(samples)), origin_(std::move(origin)) {
    for (std::size_t i = 1; i < samples_.size(); ++i)
        if (!(samples_[i].t > samples_[i - 1].t)) throw std::invalid_argument("Trajectory: times must increase");
}

double Trajectory::max_step() const {
    double worst = 0.0;
    for (std::size_t i = 1; i < samples_.size(); ++i)
        worst = std::max(worst, chordal_dist(samples_[i - 1].z, samples_[i].z));
    return worst;
}

Trajectory sample_trajectory(const Isotopy& f, const ExtPoint& z, const std::vector<double>& times,
                             std::string origin) {
    std::vector<TrajectorySample> out;
    out.reserve(times.size());
    for (double t : times) out.push_back({t, f.trace(t, z)});
    return Trajectory(std::move(out), std::move(origin));
}

Trajectory sample_trajectory(const Isotopy& f, const ExtPoint& z, int n, std::string origin) {
    if (n < 1) throw std::invalid_argument("sample_trajectory: need at least one step");
    std::vector<double> times;
    times.reserve(n + 1);
    for (int i = 0; i <= n; ++i) times.push_back(i == n ? f.t1() : f.t0() + (f.t1() - f.t0()) * i / n);
    return sample_trajectory(f, z, times, std::move(origin));
}

LimitEstimate omega_limit_estimate(const Trajectory& traj) {
    const auto& s = traj.samples();
    if (s.size() < 10) throw std::invalid_argument("omega_limit_estimate: need at least 10 samples");
    const ExtPoint last = s.back().z;
    const std::size_t tail = s.size() - s.size() / 4;
    bool close = true;
    for (std::size_t i = tail; i < s.size(); ++i) close = close && chordal_dist(s[i].z, last) < 0.05;
    return {last, close ? LimitConfidence::converged : LimitConfidence::inconclusive};
}

// ---- the dragging isotopy --------------------------------------------------

double FundamentalBuild::decay_bound(int k) const {
    return std::pow(rho1 / rho0, k);
}

namespace {

// Radius below which the computed stable manifold stays inside the cone of
// half-opening `cap` (with margin), probed at a few radii.
double stable_graph_radius(const SphereMap& g, double cap) {
    double sigma = kConeSearchCap;
    for (int h = 0; h <= kShrinkBudget; ++h, sigma /= 2.0) {
        bool ok = true;
        for (double frac : {0.9, 0.5, 0.25, 0.1, 0.01}) {
            try {
                if (std::abs(stable_manifold_angle(g, frac * sigma, sigma)) > cap / kSafetyMargin) ok = false;
            } catch (const std::runtime_error&) {
                ok = false;
            }
            if (!ok) break;
        }
        if (ok) return sigma;
    }
    throw ConeSearchError("stable manifold leaves the cone at every probed radius", cplx(sigma, 0.0), 1.0);
}

cplx iterate(const SphereMap& g, cplx z, long n) {
    for (long i = 0; i < n; ++i) z = g(z);
    return z;
}

}  // namespace

FundamentalIsotopy::FundamentalIsotopy(const SaddleSetup& setup, const ExtPoint& z0, int stages) {
    if (z0.is_infinite() || z0.im() == 0.0) throw std::invalid_argument("fundamental_isotopy: z0 lies on the meridian");
    if (stages < 1) throw std::invalid_argument("fundamental_isotopy: need at least one stage");
    auto data = std::make_shared<Data>(Data{FundamentalBuild{}, setup.ext.isotopy, setup.g, {}, {}});
    FundamentalBuild& b = data->build;
    const SphereMap& g = setup.g;
    b.z0 = z0;
    const cplx start = z0.value();
    const double radius0 = std::abs(start);

    // Direction of z0 lies outside C_{2 alpha}.
    b.alpha = folded_angle(start) / 3.0;
    b.tau_delta = find_tau_delta(g, b.alpha);
    b.cones = find_cone_constants(setup.ext.isotopy, b.alpha);
    const double tilt_cap = std::min(b.tau_delta.tau, b.cones.beta_minus);
    b.sigma = stable_graph_radius(g, tilt_cap);
    // |z0| joins the minimum so that |v_1| = r1 already obeys the decay bound.
    b.rho0 = std::min({b.tau_delta.delta, b.cones.rho, b.sigma, 1.0, radius0}) / 2.0;
    b.r1 = std::min(b.rho0, b.rho0 / radius0) / 2.0;
    b.rho1 = b.r1 * radius0;
    b.n0 = escape_bound(g, b.rho0, b.rho1, b.alpha);

    data->starts.push_back(SphereMap::identity());
    cplx z = start, u(1.0, 0.0);
    long total = 0;
    for (int k = 1; k <= stages; ++k) {
        FundamentalStage st;
        st.scale = b.rho1 / std::abs(z);
        if (!(st.scale < 1.0) && k > 1) throw std::runtime_error("fundamental_isotopy: rescaling factor not below 1");
        const cplx p = st.scale * u;
        const double target = stable_manifold_angle(g, std::abs(p), b.rho0);
        st.angle = target - std::arg(p);
        if (std::abs(st.angle) > tilt_cap)
            throw std::runtime_error("fundamental_isotopy: stable manifold tilt exceeds min(tau, beta-)");
        const cplx m = std::polar(st.scale, st.angle);
        st.w = m * z;
        st.v = m * u;
        st.stable_offset = std::abs(st.v - std::polar(std::abs(st.v), target));
        if (std::abs(std::abs(st.w) - b.rho1) > 1e-12 * b.rho1 || folded_angle(st.w) < b.alpha - 1e-12)
            throw std::runtime_error("fundamental_isotopy: launch point left the admissible circle arc");
        st.n = escape_time(g, ExtPoint(st.w), b.rho0).n;
        if (st.n > b.n0) throw std::runtime_error("fundamental_isotopy: escape time above n0");
        total += st.n;
        st.n_total = total;
        st.z = iterate(g, st.w, st.n);
        st.u = iterate(g, st.v, st.n);
        const SphereMap mk(MobiusMap::scaling(m));
        data->rescale.push_back(mk);
        data->starts.push_back(SphereMap::power(g, st.n) * mk * data->starts.back());
        z = st.z;
        u = st.u;
        b.stages.push_back(st);
    }
    data_ = std::move(data);
}

SphereMap FundamentalIsotopy::stage_map(std::size_t j, long whole, double frac) const {
    SphereMap f = SphereMap::power(data_->g, whole) * data_->rescale[j] * data_->starts[j];
    if (frac > 0.0) f = data_->ext.at(frac) * f;
    return f;
}

SphereMap FundamentalIsotopy::raw(double t) const {
    const auto& st = data_->build.stages;
    const double end = static_cast<double>(data_->build.total_time());
    if (!(t >= 0.0 && t <= end)) throw std::out_of_range("FundamentalIsotopy: time outside [0, N_K]");
    if (t == 0.0) return SphereMap::identity();
    // Integer part handled exactly; only the fraction is floating point.
    const long whole = static_cast<long>(std::floor(t));
    const double frac = t - static_cast<double>(whole);
    // Stage j covers (N_j, N_{j+1}]; N_0 = 0.
    std::size_t j = 0;
    while (j + 1 < st.size() && (whole > st[j].n_total || (whole == st[j].n_total && frac > 0.0))) ++j;
    const long begin = j == 0 ? 0 : st[j - 1].n_total;
    return stage_map(j, whole - begin, frac);
}

SphereMap FundamentalIsotopy::at(double t) const {
    const SphereMap f = raw(t);
    const ExtPoint one = f(ExtPoint(1.0, 0.0));
    return SphereMap(normalize_to_one(one)) * f;
}

SphereMap FundamentalIsotopy::right_limit(int k) const {
    if (k < 0 || k >= static_cast<int>(data_->build.stages.size()))
        throw std::out_of_range("FundamentalIsotopy: no stage starts there");
    const SphereMap f = stage_map(static_cast<std::size_t>(k), 0, 0.0);
    return SphereMap(normalize_to_one(f(ExtPoint(1.0, 0.0)))) * f;
}

Isotopy FundamentalIsotopy::isotopy() const {
    const FundamentalIsotopy self = *this;
    return {0.0, static_cast<double>(build().total_time()), [self](double t) { return self.at(t); }};
}

TwoEndedIsotopy two_ended_isotopy(const SaddleSetup& setup, const ExtPoint& z0, RefPoint a, RefPoint b, int stages) {
    if (a == b) throw std::invalid_argument("two_ended_isotopy: endpoints must differ");
    if (z0.is_infinite() || z0.im() == 0.0) throw std::invalid_argument("two_ended_isotopy: z0 lies on the meridian");
    const auto swap_with_inf = [](RefPoint p) {
        return p == RefPoint::infinity ? SphereMap::identity() : SphereMap(swap_map(RefPoint::infinity, p));
    };
    const SphereMap tb = swap_with_inf(b), ta = swap_with_inf(a);
    FundamentalIsotopy fwd(setup, tb(z0), stages);
    FundamentalIsotopy bwd(setup, ta(z0), stages);
    const double t0 = -static_cast<double>(bwd.build().total_time());
    const double t1 = static_cast<double>(fwd.build().total_time());
    Isotopy iso(t0, t1, [fwd, bwd, ta, tb](double t) {
        if (t >= 0.0) return tb * fwd.at(t) * tb;
        return ta * bwd.at(-t) * ta;
    });
    return {std::move(fwd), std::move(bwd), std::move(iso)};
}

}  // namespace mobdyn
