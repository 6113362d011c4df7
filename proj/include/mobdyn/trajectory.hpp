#pragma once

#include "mobdyn/cone_calculus.hpp"

#include <memory>
#include <string>
#include <vector>

namespace mobdyn {

// The concrete group witness everything downstream is built from: a model
// diffeo, its extension isotopy g_t, and the saddle g = g_1.
struct SaddleSetup {
    ModelKind kind = ModelKind::shear;
    double eps = 0.5;
    double radius = 4.0;
    ExtensionIsotopy ext;
    SphereMap g;
};

SaddleSetup make_setup(ModelKind kind = ModelKind::shear, double eps = 0.5, double radius = 4.0);

// ---- trajectories ----------------------------------------------------------

struct TrajectorySample {
    double t = 0.0;
    ExtPoint z;
};

class Trajectory {
public:
    // Throws std::invalid_argument unless times increase strictly.
    explicit Trajectory(std::vector<TrajectorySample> samples, std::string origin = {});
    const std::vector<TrajectorySample>& samples() const { return samples_; }
    const std::string& origin() const { return origin_; }
    std::size_t size() const { return samples_.size(); }
    bool empty() const { return samples_.empty(); }
    // Largest chordal distance between consecutive samples.
    double max_step() const;

private:
    std::vector<TrajectorySample> samples_;
    std::string origin_;
};

Trajectory sample_trajectory(const Isotopy& f, const ExtPoint& z, const std::vector<double>& times,
                             std::string origin = {});
// n + 1 evenly spaced times over f's interval.
Trajectory sample_trajectory(const Isotopy& f, const ExtPoint& z, int n, std::string origin = {});

enum class LimitConfidence { converged, inconclusive };

struct LimitEstimate {
    ExtPoint point;
    LimitConfidence confidence = LimitConfidence::inconclusive;
};

// Converged iff the last quarter of the samples lies within chordal 0.05 of
// the final sample. Needs at least 10 samples.
LimitEstimate omega_limit_estimate(const Trajectory& traj);

// ---- the dragging isotopy --------------------------------------------------

// One inductive stage: rescaling M_k(z) = r e^{i tau} z, n iterates of g.
struct FundamentalStage {
    double scale = 0.0;
    double angle = 0.0;
    long n = 0;
    long n_total = 0;  // N_k
    cplx w, v;         // M_k applied to the previous z and u
    cplx z, u;         // after n iterates
    double stable_offset = 0.0;  // |v - (point of the computed W^s at |v|)|
};

struct FundamentalBuild {
    ExtPoint z0;
    double alpha = 0.0;
    TauDelta tau_delta;
    ConeConstants cones;
    double sigma = 0.0;
    double rho0 = 0.0;
    double rho1 = 0.0;
    double r1 = 0.0;
    long n0 = 0;
    std::vector<FundamentalStage> stages;

    long total_time() const { return stages.empty() ? 0 : stages.back().n_total; }
    // (rho1 / rho0)^k, the bound on |v_k|.
    double decay_bound(int k) const;
};

// Drags z0 towards infinity inside its hemisphere while 0, 1, infinity stay
// fixed. Stages are 1-based in the formulas and 0-based in `stages`.
class FundamentalIsotopy {
public:
    // Throws std::invalid_argument for z0 on the meridian, ConeSearchError or
    // EscapeCapExceeded when a search fails, std::runtime_error on a failed
    // stage audit.
    FundamentalIsotopy(const SaddleSetup& setup, const ExtPoint& z0, int stages = 8);

    const FundamentalBuild& build() const { return data_->build; }
    // f_t, before renormalizing the companion point.
    SphereMap raw(double t) const;
    // I_t = normalize(f_t(1)) o f_t.
    SphereMap at(double t) const;
    // I at N_k evaluated through the formula of the stage that starts there.
    SphereMap right_limit(int k) const;
    Isotopy isotopy() const;

private:
    struct Data {
        FundamentalBuild build;
        Isotopy ext;
        SphereMap g;
        std::vector<SphereMap> starts;  // f_{N_k}, k = 0..K
        std::vector<SphereMap> rescale; // M_{k+1}
    };
    SphereMap stage_map(std::size_t j, long whole, double frac) const;
    std::shared_ptr<const Data> data_;
};

// Forward in time towards b, backward towards a, each leg conjugated by the
// reference swap with infinity. Interval [-N_a, N_b].
struct TwoEndedIsotopy {
    FundamentalIsotopy forward, backward;
    Isotopy isotopy;
};

TwoEndedIsotopy two_ended_isotopy(const SaddleSetup& setup, const ExtPoint& z0, RefPoint a, RefPoint b,
                                  int stages = 8);

}  // namespace mobdyn
