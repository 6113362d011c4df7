// mobdyn: run the constructions, write JSON/SVG artifacts, verify.
// Exit codes: 0 success, 1 certification failure, 2 usage error.

#include "mobdyn/conformality.hpp"
#include "mobdyn/emit.hpp"
#include "mobdyn/homotopy8.hpp"
#include "mobdyn/verify.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <cstdlib>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <optional>
#include <random>

using namespace mobdyn;
using json = nlohmann::json;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kMaxStages = 12;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Raised when a run completes but its audit does not hold.
struct AuditFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    std::optional<std::uint64_t> seed;
    std::string model = "shear";
    double eps = 0.5;
    double radius = 4.0;
    int stages = 8;
    std::string out, trajectory, svg;
};

ModelKind model_kind(const std::string& m) {
    return m == "stretch" ? ModelKind::stretch : ModelKind::shear;
}

std::uint64_t resolve_seed(const RunConfig& cfg) {
    if (cfg.seed) return *cfg.seed;
    const char* env = std::getenv("MOBDYN_SEED");
    if (!env || !*env) return 1;
    char* end = nullptr;
    errno = 0;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (errno != 0 || *end != '\0' || env[0] == '-') throw UsageError("MOBDYN_SEED must be a non-negative integer");
    return v;
}

void validate(const RunConfig& cfg) {
    try {
        ModelDiffeo(model_kind(cfg.model), cfg.eps, cfg.radius);
    } catch (const std::invalid_argument& e) {
        throw UsageError(std::string("model parameters: ") + e.what());
    }
    if (cfg.stages < 1 || cfg.stages > kMaxStages) throw UsageError("--stages must lie in [1, 12]");
}

RunMeta meta_of(const RunConfig& cfg) {
    return {resolve_seed(cfg), cfg.model, cfg.eps, cfg.radius};
}

SaddleSetup setup_of(const RunConfig& cfg) {
    return make_setup(model_kind(cfg.model), cfg.eps, cfg.radius);
}

json point_json(const ExtPoint& z) {
    if (z.is_infinite()) return "inf";
    return json::array({z.re(), z.im()});
}

json matrix_json(const Mat2& m) {
    return json::array({m(0, 0), m(0, 1), m(1, 0), m(1, 1)});
}

ExtPoint point_arg(const std::vector<double>& v, const char* name) {
    if (v.size() != 2) throw UsageError(std::string(name) + " takes re,im");
    return {v[0], v[1]};
}

// Writes the result document and any trajectory artifacts.
void finish(const RunConfig& cfg, json result, const std::optional<Trajectory>& traj) {
    result["meta"] = {{"seed", resolve_seed(cfg)}, {"model", cfg.model}, {"eps", cfg.eps}, {"R", cfg.radius}};
    const std::string text = result.dump(2) + "\n";
    std::cout << text;
    if (!cfg.out.empty()) write_text_file(cfg.out, text);
    if (traj && !cfg.trajectory.empty()) write_text_file(cfg.trajectory, trajectory_json(*traj, meta_of(cfg)));
    if (traj && !cfg.svg.empty()) write_text_file(cfg.svg, trajectory_svg(*traj));
    if ((!cfg.trajectory.empty() || !cfg.svg.empty()) && !traj)
        throw UsageError("this command has no trajectory to write");
}

Trajectory orbit(const Isotopy& f, const ExtPoint& z, int n) {
    return sample_trajectory(f, z, n);
}

// ---- commands --------------------------------------------------------------

void normalize_saddle(const RunConfig& cfg, const std::vector<double>& m) {
    if (m.size() != 4) throw UsageError("--matrix takes four entries a,b,c,d (row major)");
    Mat2 a;
    a << m[0], m[1], m[2], m[3];
    const SaddleFactorization f = saddle_normalize(a);
    finish(cfg,
           {{"matrix", m},
            {"case", std::string(to_string(f.case_tag))},
            {"lambda", f.lambda},
            {"r1", f.r1},
            {"r2", f.r2},
            {"r", f.r},
            {"rho", f.rho},
            {"residual", reconstruction_residual(a, f)}},
           std::nullopt);
}

void extension_cmd(const RunConfig& cfg, const std::vector<double>& z) {
    const SaddleSetup s = setup_of(cfg);
    const ExtensionIsotopy& ext = s.ext;
    double det = 0.0, axis = 0.0;
    for (int i = 0; i <= 100; ++i) {
        const Mat2 d = ext.isotopy.at(i / 100.0).differential_at_origin();
        det = std::max(det, std::abs(d.determinant() - 1.0));
        axis = std::max(axis, std::abs(d(1, 0)));
    }
    const ExtPoint z0 = point_arg(z, "--z0");
    finish(cfg,
           {{"mu", ext.mu},
            {"lambda", ext.mu * ext.mu},
            {"Dg1_at_0", matrix_json(ext.isotopy.at(1.0).differential_at_origin())},
            {"max_det_error", det},
            {"max_axis_error", axis},
            {"z0", point_json(z0)}},
           orbit(ext.isotopy, z0, 200));
}

void cone_cmd(const RunConfig& cfg, double alpha) {
    if (!(alpha > 0.0 && alpha < kPi / 2)) throw UsageError("--alpha must lie in (0, pi/2)");
    const SaddleSetup s = setup_of(cfg);
    const std::uint64_t seed = resolve_seed(cfg);
    const ConeConstants c = find_cone_constants(s.ext.isotopy, alpha, seed);
    const ConeAudit a = audit_cone_constants(s.ext.isotopy, c, seed + 1);
    finish(cfg,
           {{"alpha", c.alpha},
            {"beta_minus", c.beta_minus},
            {"beta_plus", c.beta_plus},
            {"rho", c.rho},
            {"audit", {{"checked", a.checked}, {"violations", a.violations}, {"strict_violations", a.strict_violations}}}},
           std::nullopt);
    if (a.strict_violations != 0) throw AuditFailure("cone constants fail the re-audit");
}

void fundamental_cmd(const RunConfig& cfg, const std::vector<double>& z) {
    const SaddleSetup s = setup_of(cfg);
    const ExtPoint z0 = point_arg(z, "--z0");
    const FundamentalIsotopy f(s, z0, cfg.stages);
    const FundamentalBuild& b = f.build();
    const Trajectory traj = orbit(f.isotopy(), z0, 2000);
    const Hemisphere side = hemisphere(z0);
    bool stays = true;
    for (const auto& p : traj.samples()) stays = stays && hemisphere(p.z) == side;
    json stages = json::array();
    for (const auto& st : b.stages) stages.push_back({{"n", st.n}, {"scale", st.scale}, {"angle", st.angle}});
    const double end = chordal_dist(traj.samples().back().z, ExtPoint::infinity());
    finish(cfg,
           {{"z0", point_json(z0)},
            {"alpha", b.alpha},
            {"rho0", b.rho0},
            {"rho1", b.rho1},
            {"n0", b.n0},
            {"total_time", b.total_time()},
            {"stages", stages},
            {"stays_in_hemisphere", stays},
            {"end_distance_to_infinity", end}},
           traj);
    if (!stays || !(end < 0.1)) throw AuditFailure("fundamental isotopy audit failed");
}

void crossing_cmd(const RunConfig& cfg, double x) {
    const SaddleSetup s = setup_of(cfg);
    const FourPointIsotopy fp = four_point_isotopy(s.ext.isotopy);
    const CrossingIsotopy c = crossing_isotopy(fp, ExtPoint(x, 0.0));
    const auto audit = [](const CrossingAudit& a) {
        return json{{"step", a.step},
                    {"near_real", a.near_real},
                    {"sign_changes", a.sign_changes},
                    {"only_zero_one", a.only_zero_one},
                    {"endpoints_ok", a.endpoints_ok}};
    };
    finish(cfg,
           {{"r0", fp.r0},
            {"circle_crossings", fp.circle_cert.size()},
            {"min_transversality", fp.circle_cert.min_transversality()},
            {"w0", point_json(fp.w0)},
            {"z_hat", c.z_hat.re()},
            {"t_minus", c.t_minus},
            {"t_plus", c.t_plus},
            {"delta", c.delta},
            {"time_reversed", c.time_reversed},
            {"coarse", audit(c.coarse)},
            {"fine", audit(c.fine)}},
           orbit(c.j, c.z_hat, 2000));
    if (!(c.coarse.only_zero_one && c.fine.only_zero_one && c.coarse.endpoints_ok && c.fine.endpoints_ok))
        throw AuditFailure("crossing audit failed");
}

void chi_cmd(const RunConfig& cfg) {
    const Assembly as(setup_of(cfg), cfg.stages);
    const ContinuumChi& chi = as.chi();
    std::vector<TrajectorySample> samples;
    for (std::size_t i = 0; i < chi.samples.size(); ++i) samples.push_back({chi.samples.t[i], chi.samples.z[i]});
    const bool only = chi.meets_gamma_only_in_zero_one();
    finish(cfg,
           {{"interval", {chi.k.t0(), chi.k.t1()}},
            {"z_hat", chi.z_hat.re()},
            {"samples", chi.samples.size()},
            {"max_gap", chi.max_gap},
            {"end_distances_to_infinity", {chi.end_minus, chi.end_plus}},
            {"meets_gamma_only_in_zero_one", only}},
           Trajectory(std::move(samples)));
    if (!only || !(chi.end_minus < 0.1 && chi.end_plus < 0.1)) throw AuditFailure("continuum audit failed");
}

std::array<ExtPoint, 4> tuple_arg(const std::vector<double>& v, const char* name) {
    if (v.size() != 8) throw UsageError(std::string(name) + " takes eight numbers re,im x4");
    std::array<ExtPoint, 4> out;
    for (int i = 0; i < 4; ++i) out[i] = ExtPoint(v[2 * i], v[2 * i + 1]);
    return out;
}

void transitivity_cmd(const RunConfig& cfg, int count, const std::vector<double>& src, const std::vector<double>& dst) {
    if (src.empty() != dst.empty()) throw UsageError("--src and --dst go together");
    if (count < 1) throw UsageError("--count must be positive");
    std::vector<std::pair<std::array<ExtPoint, 4>, std::array<ExtPoint, 4>>> pairs;
    if (!src.empty()) {
        pairs.emplace_back(tuple_arg(src, "--src"), tuple_arg(dst, "--dst"));
    } else {
        std::mt19937_64 rng(resolve_seed(cfg));
        std::normal_distribution<double> n(0.0, 1.5);
        for (int k = 0; k < count; ++k) {
            std::array<ExtPoint, 4> a, b;
            for (auto& p : a) p = ExtPoint(n(rng), n(rng));
            for (auto& p : b) p = ExtPoint(n(rng), n(rng));
            pairs.emplace_back(a, b);
        }
    }
    const Assembly as(setup_of(cfg), cfg.stages);
    json runs = json::array();
    double worst = 0.0;
    std::optional<Trajectory> first;
    for (const auto& [a, b] : pairs) {
        const Transitivity tr = as.four_transitivity(a, b);
        worst = std::max(worst, tr.residual);
        json sj = json::array(), dj = json::array();
        for (int i = 0; i < 4; ++i) sj.push_back(point_json(a[i])), dj.push_back(point_json(b[i]));
        runs.push_back({{"src", sj}, {"dst", dj}, {"residual", tr.residual}});
        if (!first) first = orbit(tr.path.f, tr.path.z0, 1000);
    }
    finish(cfg, {{"runs", runs}, {"worst_residual", worst}}, first);
    if (!(worst < kEndpointTolerance)) throw AuditFailure("four-point residual above 1e-6");
}

json certificate_json(const FigureEightCertificate& c) {
    return {{"certified", c.certified},
            {"w_hat", c.w_hat.re()},
            {"word", c.word.str()},
            {"word_length", c.word.length()},
            {"prototype", c.prototype.str()},
            {"fixed_point_residuals", c.residuals},
            {"seams",
             {{"t_tilde_first", c.t_tilde_first},
              {"t_tilde_last", c.t_tilde_last},
              {"t_minus", c.t_minus},
              {"t_plus", c.t_plus},
              {"a", c.a},
              {"b", c.b},
              {"c", c.c}}},
            {"phi_closure", c.phi_closure},
            {"h_residual", c.h_residual}};
}

void figure_eight_cmd(const RunConfig& cfg) {
    const Assembly as(setup_of(cfg), cfg.stages);
    try {
        const FigureEightCertificate c = as.build_figure_eight();
        finish(cfg, certificate_json(c), orbit(c.f, c.w_hat, 1000));
    } catch (const CertificateRefused& e) {
        finish(cfg, certificate_json(e.certificate()), std::nullopt);
        throw;
    }
}

void conformality_cmd(const RunConfig& cfg, const std::string& map, double angle) {
    SphereMap g;
    if (map == "rotation")
        g = SphereMap(MobiusMap::rotation(angle));
    else if (map == "pole-fixing")
        g = SphereMap(pole_fixing_map(ExtPoint(std::cos(angle), std::sin(angle)), ExtPoint(2.0, -1.0)));
    else
        g = SphereMap::model(ModelDiffeo(model_kind(cfg.model), cfg.eps, cfg.radius));
    const ConformalityVerdict v = conformality_at_origin_test(g);
    finish(cfg,
           {{"map", map},
            {"conformal", v.conformal},
            {"defect", v.defect},
            {"ratios", v.ratios},
            {"limit_ratio", v.limit_ratio},
            {"trend_agrees", v.trend_agrees},
            {"roundness", circle_roundness(g, 0.5)}},
           std::nullopt);
    if (!v.trend_agrees) throw AuditFailure("ratio trend contradicts the verdict");
}

void verify_all(const RunConfig& cfg, int pairs) {
    VerifyOptions opts;
    opts.seed = resolve_seed(cfg);
    opts.transitivity_pairs = pairs;
    json results = json::array();
    bool all = true;
    for (int id = 1; id <= kCriterionCount; ++id) {
        const CriterionResult r = run_criterion(id, opts);
        std::cerr << (r.pass() ? "PASS" : "FAIL") << " criterion " << r.id << " (" << r.name << "): " << r.detail
                  << "\n";
        results.push_back({{"id", r.id}, {"name", r.name}, {"pass", r.pass()}, {"seconds", r.seconds}, {"detail", r.detail}});
        all = all && r.pass();
    }
    finish(cfg, {{"criteria", results}, {"all_pass", all}}, std::nullopt);
    if (!all) throw AuditFailure("some criteria failed");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Isotopies, crossings and figure-8 certificates for saddle diffeomorphisms of the sphere"};
    app.require_subcommand(1, 1);
    RunConfig cfg;
    std::vector<double> matrix, z0{0.3 * std::cos(5.0 * kPi / 12.0), 0.3 * std::sin(5.0 * kPi / 12.0)},
        ext_point{0.5, 0.5}, src, dst;
    double alpha = kPi / 4, x = 0.37, angle = 0.7;
    int count = 1, pairs = 20;
    std::string map = "model";

    const auto common = [&](CLI::App* sub, bool stages) {
        sub->add_option("--seed", cfg.seed, "random seed (falls back to MOBDYN_SEED, then 1)");
        sub->add_option("--model", cfg.model, "model diffeomorphism")->check(CLI::IsMember({"shear", "stretch"}));
        sub->add_option("--eps", cfg.eps, "model strength");
        sub->add_option("--R", cfg.radius, "bump radius");
        if (stages) sub->add_option("--stages", cfg.stages, "dragging stages K");
        sub->add_option("--out", cfg.out, "write the result JSON here");
        return sub;
    };
    const auto traj_out = [&](CLI::App* sub) {
        sub->add_option("--trajectory", cfg.trajectory, "write the trajectory JSON here");
        sub->add_option("--svg", cfg.svg, "write an SVG plot here");
    };

    std::map<std::string, std::function<void()>> run;
    auto* ns = common(app.add_subcommand("normalize-saddle", "factor a 2x2 saddle differential"), false);
    ns->add_option("--matrix", matrix, "a,b,c,d row major")->delimiter(',')->required();
    run["normalize-saddle"] = [&] { normalize_saddle(cfg, matrix); };

    auto* ex = common(app.add_subcommand("extension-isotopy", "isotopy to the normalized saddle"), false);
    ex->add_option("--z0", ext_point, "tracked point re,im")->delimiter(',');
    traj_out(ex);
    run["extension-isotopy"] = [&] { extension_cmd(cfg, ext_point); };

    auto* cc = common(app.add_subcommand("cone-constants", "cone constants with a fresh re-audit"), false);
    cc->add_option("--alpha", alpha, "cone half-opening");
    run["cone-constants"] = [&] { cone_cmd(cfg, alpha); };

    auto* fu = common(app.add_subcommand("fundamental", "drag a point to infinity"), true);
    fu->add_option("--z0", z0, "start point re,im")->delimiter(',');
    traj_out(fu);
    run["fundamental"] = [&] { fundamental_cmd(cfg, z0); };

    auto* cr = common(app.add_subcommand("crossing", "four-point and crossing isotopies"), false);
    cr->add_option("--x", x, "real point to push off the meridian");
    traj_out(cr);
    run["crossing"] = [&] { crossing_cmd(cfg, x); };

    auto* ch = common(app.add_subcommand("chi", "the separating continuum"), true);
    traj_out(ch);
    run["chi"] = [&] { chi_cmd(cfg); };

    auto* ft = common(app.add_subcommand("four-transitivity", "match 4-tuples through an isotopy"), true);
    ft->add_option("--count", count, "random tuple pairs");
    ft->add_option("--src", src, "source tuple, 8 numbers")->delimiter(',');
    ft->add_option("--dst", dst, "target tuple, 8 numbers")->delimiter(',');
    traj_out(ft);
    run["four-transitivity"] = [&] { transitivity_cmd(cfg, count, src, dst); };

    auto* fe = common(app.add_subcommand("figure-eight", "build and certify the figure-8 isotopy"), true);
    traj_out(fe);
    run["figure-eight"] = [&] { figure_eight_cmd(cfg); };

    auto* co = common(app.add_subcommand("conformality", "conformality diagnostics at 0"), false);
    co->add_option("--map", map, "map to test")->check(CLI::IsMember({"rotation", "pole-fixing", "model"}));
    co->add_option("--angle", angle, "rotation angle or pole direction");
    run["conformality"] = [&] { conformality_cmd(cfg, map, angle); };

    auto* va = common(app.add_subcommand("verify-all", "run every acceptance criterion"), false);
    va->add_option("--pairs", pairs, "tuple pairs for the transitivity criterion");
    run["verify-all"] = [&] { verify_all(cfg, pairs); };

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        validate(cfg);
        resolve_seed(cfg);
        run.at(app.get_subcommands().front()->get_name())();
        return 0;
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "certification failed: " << e.what() << "\n";
        return 1;
    }
}
