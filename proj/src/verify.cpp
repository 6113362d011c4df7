#include "mobdyn/verify.hpp"

#include "mobdyn/conformality.hpp"
#include "mobdyn/homotopy8.hpp"

#include <chrono>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

namespace mobdyn {

namespace {

constexpr double kPi = std::numbers::pi;
const ExtPoint kZero(0.0, 0.0), kOne(1.0, 0.0), kInf = ExtPoint::infinity();

Mat2 mat(double a, double b, double c, double d) {
    Mat2 m;
    m << a, b, c, d;
    return m;
}

double max_abs(const Mat2& m) {
    return m.cwiseAbs().maxCoeff();
}

double reference_residual(const SphereMap& m) {
    return std::max({chordal_dist(m(kZero), kZero), chordal_dist(m(kOne), kOne), chordal_dist(m(kInf), kInf)});
}

// Each check below writes its measurements to `os` and returns whether they hold.

bool saddle_family(const VerifyOptions& o, std::ostringstream& os) {
    std::mt19937_64 rng(o.seed);
    std::uniform_real_distribution<double> ang(-kPi, kPi), shear(0.3, 4.0), logs(-1.5, 1.5), scale(-1.0, 1.0);
    int defective = 0, distinct = 0, bad = 0;
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        Mat2 a;
        do {
            if (i < 500) {
                const Mat2 r = rotation_matrix(ang(rng));
                const double s = (i % 2 == 0 ? 1.0 : -1.0) * shear(rng);
                a = std::exp(scale(rng)) * r * mat(1.0, s, 0.0, 1.0) * r.transpose();
            } else {
                const double l1 = std::exp(logs(rng)), l2 = std::exp(logs(rng));
                const Mat2 p = rotation_matrix(ang(rng)) * mat(1.0, std::tan(ang(rng) / 3.0), 0.0, 1.0);
                a = p * mat(l1, 0.0, 0.0, l2) * p.inverse();
            }
        } while (conformal_defect(a) <= 0.05);
        const SaddleFactorization f = saddle_normalize(a);
        (f.case_tag == SaddleCase::defective ? defective : distinct)++;
        const double res = reconstruction_residual(a, f);
        worst = std::max(worst, res);
        if (!(res < 1e-9 && f.lambda > 0.0 && f.lambda < 1.0)) ++bad;
    }
    os << "worst residual " << worst << ", defective " << defective << ", distinct " << distinct << ", failures " << bad;
    return bad == 0 && defective > 0 && distinct > 0;
}

bool extension(std::ostringstream& os) {
    const auto pts = verification_points(100);
    double end_err = 0.0, det_err = 0.0, axis_err = 0.0, id_err = 0.0;
    for (ModelKind kind : {ModelKind::shear, ModelKind::stretch})
        for (double mu : {0.3, 0.5, 0.8}) {
            const ExtensionIsotopy ext = extension_isotopy(model_with_rate(kind, mu, 4.0));
            end_err = std::max(end_err, max_abs(ext.isotopy.at(1.0).differential_at_origin() -
                                                mat(mu * mu, 0.0, 0.0, 1.0 / (mu * mu))));
            for (int i = 0; i <= 100; ++i) {
                const Mat2 d = ext.isotopy.at(i / 100.0).differential_at_origin();
                det_err = std::max(det_err, std::abs(d.determinant() - 1.0));
                axis_err = std::max(axis_err, std::abs(d(1, 0)));
            }
            id_err = std::max(id_err, identity_defect(ext.isotopy.at(0.0), pts));
        }
    os << "|Dg1(0) - diag(mu^2, mu^-2)| " << end_err << ", det " << det_err << ", axis " << axis_err << ", g0 "
       << id_err;
    return end_err < 1e-8 && det_err < 1e-8 && axis_err < 1e-9 && id_err < 1e-12;
}

bool cones(const VerifyOptions& o, std::ostringstream& os) {
    const SaddleSetup s = make_setup();
    const ConeConstants c = find_cone_constants(s.ext.isotopy, kPi / 4, o.seed);
    const ConeAudit a = audit_cone_constants(s.ext.isotopy, c, o.seed + 1);
    os << "beta- " << c.beta_minus << ", beta+ " << c.beta_plus << ", rho " << c.rho << ", audited " << a.checked
       << ", strict violations " << a.strict_violations;
    return a.strict_violations == 0 && a.checked > 0;
}

bool fundamental(std::ostringstream& os) {
    const SaddleSetup s = make_setup();
    const ExtPoint z0(std::polar(0.3, 5.0 * kPi / 12.0));
    const FundamentalIsotopy f(s, z0, 8);
    const double end = static_cast<double>(f.build().total_time());
    const Trajectory traj = sample_trajectory(f.isotopy(), z0, 4000);
    bool upper = true;
    for (const auto& p : traj.samples()) upper = upper && p.z.is_finite() && p.z.im() > 0.0;
    const double to_inf = chordal_dist(traj.samples().back().z, kInf);
    const auto pts = verification_points();
    const auto& st = f.build().stages;
    double splice = sup_chordal_distance(f.right_limit(0), SphereMap::identity(), pts);
    for (std::size_t k = 1; k < st.size(); ++k)
        splice = std::max(splice, sup_chordal_distance(f.at(static_cast<double>(st[k - 1].n_total)),
                                                       f.right_limit(static_cast<int>(k)), pts));
    double fixed = 0.0;
    for (int i = 0; i <= 2000; ++i) fixed = std::max(fixed, reference_residual(f.at(end * i / 2000.0)));
    os << "N_K " << end << ", all Im > 0: " << (upper ? "yes" : "no") << ", end to infinity " << to_inf
       << ", splice " << splice << ", fixed points " << fixed;
    return upper && to_inf < 0.1 && splice < 1e-8 && fixed < 1e-9;
}

bool crossing(std::ostringstream& os) {
    const SaddleSetup s = make_setup();
    const FourPointIsotopy fp = four_point_isotopy(s.ext.isotopy);
    const CrossingCertificate at_r0 = circle_image_intersections(s.g, fp.r0);
    const CrossingCertificate at_half = circle_image_intersections(s.g, fp.r0 / 2.0);
    const CrossingIsotopy c = crossing_isotopy(fp);
    const Hemisphere lo = hemisphere(c.j.trace(-1.0, c.z_hat)), hi = hemisphere(c.j.trace(1.0, c.z_hat));
    const bool opposite = lo != Hemisphere::gamma && hi != Hemisphere::gamma && lo != hi;
    os << "crossings at r0 = " << fp.r0 << ": " << at_r0.size() << ", at r0/2: " << at_half.size()
       << ", min transversality " << std::min(at_r0.min_transversality(), at_half.min_transversality())
       << ", z^ = " << c.z_hat.re() << ", opposite hemispheres: " << (opposite ? "yes" : "no")
       << ", near-real samples in (0, 1): " << (c.coarse.only_zero_one && c.fine.only_zero_one ? "yes" : "no");
    return at_r0.size() == 4 && at_half.size() == 4 && opposite && c.coarse.only_zero_one && c.fine.only_zero_one;
}

bool transitivity(const VerifyOptions& o, std::ostringstream& os) {
    const Assembly as(make_setup());
    std::mt19937_64 rng(o.seed);
    std::normal_distribution<double> n(0.0, 1.5);
    double worst = 0.0;
    int done = 0;
    std::string first_error;
    for (int k = 0; k < o.transitivity_pairs; ++k) {
        std::array<ExtPoint, 4> src, dst;
        for (auto& p : src) p = ExtPoint(n(rng), n(rng));
        for (auto& p : dst) p = ExtPoint(n(rng), n(rng));
        try {
            worst = std::max(worst, as.four_transitivity(src, dst).residual);
            ++done;
        } catch (const std::runtime_error& e) {
            if (first_error.empty()) first_error = e.what();
        }
    }
    os << done << " of " << o.transitivity_pairs << " tuple pairs, worst residual " << worst;
    if (!first_error.empty()) os << "; first error: " << first_error;
    return done == o.transitivity_pairs && worst < 1e-6;
}

bool figure_eight(std::ostringstream& os) {
    const Assembly as(make_setup());
    const FigureEightCertificate c = as.build_figure_eight();
    double worst = 0.0;
    for (double r : c.residuals) worst = std::max(worst, r);
    os << "word " << c.word.str() << " (prototype " << c.prototype.str() << "), length " << c.word.length()
       << ", worst fixed-point residual " << worst << ", base point " << c.w_hat.re();
    return c.certified && worst < 1e-6 && c.word == c.prototype && c.word.length() == 2;
}

bool conformality(const VerifyOptions& o, std::ostringstream& os) {
    bool ok = true;
    double worst_defect = 0.0, worst_round = 0.0;
    std::mt19937_64 rng(o.seed);
    std::normal_distribution<double> n;
    std::vector<SphereMap> conformal;
    for (double a : {0.1, 1.0, 2.5, -3.0}) conformal.emplace_back(MobiusMap::rotation(a));
    for (int i = 0; i < 20; ++i) conformal.emplace_back(pole_fixing_map(ExtPoint(n(rng), n(rng)), ExtPoint(n(rng), n(rng))));
    for (const SphereMap& m : conformal) {
        const ConformalityVerdict v = conformality_at_origin_test(m);
        worst_defect = std::max(worst_defect, v.defect);
        worst_round = std::max(worst_round, std::abs(circle_roundness(m, 0.5) - 1.0));
        ok = ok && v.conformal && v.defect < 1e-12 && v.trend_agrees;
    }
    ok = ok && worst_round < 1e-9;
    const SphereMap shear = SphereMap::model(ModelDiffeo(ModelKind::shear, 0.5, 4.0));
    const ConformalityVerdict v = conformality_at_origin_test(shear);
    const double fd = conformal_defect(finite_difference_jacobian(shear, cplx(0.0, 0.0)));
    ok = ok && !v.conformal && std::abs(v.defect - fd) < 1e-6 && v.trend_agrees;
    os << "conformal maps: worst defect " << worst_defect << ", worst roundness error " << worst_round
       << "; shear defect " << v.defect << " vs finite differences " << fd;
    return ok;
}

bool c1_convergence(std::ostringstream& os) {
    const SphereMap shear = SphereMap::model(ModelDiffeo(ModelKind::shear, 0.5, 4.0));
    std::vector<double> gaps;
    bool decreasing = true;
    for (int k = 0; k <= 7; ++k) {
        gaps.push_back(rescaled_circle_c1_gap(shear, std::ldexp(1.0, -k)));
        if (k > 0) decreasing = decreasing && gaps[k] < gaps[k - 1];
    }
    Mat2 m;
    m << 1.3, 0.4, -0.2, 0.9;
    double linear = 0.0;
    for (int k = 0; k <= 7; ++k) linear = std::max(linear, rescaled_circle_c1_gap(SphereMap::linear(m), std::ldexp(1.0, -k)));
    os << "shear gaps";
    for (double g : gaps) os << ' ' << g;
    os << (decreasing ? " (strictly decreasing)" : " (not strictly decreasing)") << "; linear max gap " << linear;
    return decreasing && linear < 1e-12;
}

bool intersection_oracle(std::ostringstream& os) {
    Mat2 d = Mat2::Zero();
    d(0, 0) = 2.0;
    d(1, 1) = 0.5;
    const CrossingCertificate cert =
        curve_intersections(PlanarCurve::circle(1.0, 1024), PlanarCurve::mapped_circle(SphereMap::linear(d), 1.0, 1024));
    double worst = 0.0;
    for (const Intersection& p : cert.points)
        worst = std::max(worst, std::abs(std::pow(std::cos(2.0 * kPi * p.t), 2) - 0.2));
    os << cert.size() << " points, worst |cos^2 - 1/5| " << worst;
    return cert.size() == 4 && worst < 1e-9;
}

struct CriterionInfo {
    const char* name;
    double budget;
};

constexpr CriterionInfo kCriteria[kCriterionCount] = {
    {"saddle normalization", 2.0},
    {"extension isotopy", 5.0},
    {"cone constants", 30.0},
    {"fundamental isotopy", 60.0},
    {"crossing", 60.0},
    {"four-point transitivity", 600.0},
    {"figure-eight certificate", 600.0},
    {"conformality diagnostics", 5.0},
    {"rescaled-circle convergence", 5.0},
    {"intersection oracle", 1.0},
};

}  // namespace

CriterionResult run_criterion(int id, const VerifyOptions& opts) {
    if (id < 1 || id > kCriterionCount) throw std::out_of_range("run_criterion: no such criterion");
    const CriterionInfo& info = kCriteria[id - 1];
    CriterionResult r;
    r.id = id;
    r.name = info.name;
    r.budget = info.budget;
    std::ostringstream os;
    os.precision(6);
    const auto start = std::chrono::steady_clock::now();
    try {
        switch (id) {
            case 1: r.checks_pass = saddle_family(opts, os); break;
            case 2: r.checks_pass = extension(os); break;
            case 3: r.checks_pass = cones(opts, os); break;
            case 4: r.checks_pass = fundamental(os); break;
            case 5: r.checks_pass = crossing(os); break;
            case 6: r.checks_pass = transitivity(opts, os); break;
            case 7: r.checks_pass = figure_eight(os); break;
            case 8: r.checks_pass = conformality(opts, os); break;
            case 9: r.checks_pass = c1_convergence(os); break;
            default: r.checks_pass = intersection_oracle(os); break;
        }
    } catch (const std::exception& e) {
        r.checks_pass = false;
        os << (os.tellp() > 0 ? "; " : "") << "error: " << e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    r.detail = os.str();
    return r;
}

}  // namespace mobdyn
