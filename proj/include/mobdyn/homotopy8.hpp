#pragma once

#include "mobdyn/crossing.hpp"
#include "mobdyn/trajectory.hpp"

#include <array>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace mobdyn {

// ---- sampled paths and their meetings --------------------------------------

// A path t -> z sampled densely enough that consecutive samples are within
// `max_gap` chordally (and Euclidean, while both are within kClipRadius).
struct PathSamples {
    std::function<ExtPoint(double)> eval;
    std::vector<double> t;
    std::vector<ExtPoint> z;

    std::size_t size() const { return t.size(); }
    double max_chordal_gap() const;
};

inline constexpr double kClipRadius = 100.0;
inline constexpr double kPathGap = 0.01;

PathSamples sample_path(std::function<ExtPoint(double)> eval, double t0, double t1, int base_samples,
                        double max_gap = kPathGap);

// p(s) = q(t), located from crossing polyline segments and zoomed in on the
// true paths until both parameter windows collapse.
struct Meeting {
    double s = 0.0;
    double t = 0.0;
    ExtPoint point;
    double residual = 0.0;  // chordal |p(s) - q(t)|
};

inline constexpr double kMeetingResidual = 1e-10;

// Segments with an endpoint beyond kClipRadius are ignored.
std::vector<Meeting> path_meetings(const PathSamples& p, const PathSamples& q);

// ---- the continuum ---------------------------------------------------------

struct ContinuumChi {
    Isotopy k = Isotopy::constant_identity();  // on [-1 - N-, 1 + N+]
    ExtPoint z_hat, z_minus, z_plus;
    std::shared_ptr<const FundamentalIsotopy> backward, forward;
    PathSamples samples;  // t -> K_t(z_hat)
    double splice_minus = 0.0, splice_plus = 0.0;
    double end_minus = 0.0, end_plus = 0.0;  // chordal distance to infinity at truncation
    double max_gap = 0.0;

    // Every sampled passage through Gamma lies in (0, 1).
    bool meets_gamma_only_in_zero_one() const;
    // Whether a polyline meets the sampled continuum.
    bool meets(const std::vector<cplx>& polyline) const;
};

ContinuumChi build_chi(const SaddleSetup& setup, const CrossingIsotopy& crossing, int stages = 8);

// ---- loop words ------------------------------------------------------------

// Free group on the loops around 0 and 1 (infinity is the third puncture).
// Letters come from crossing the arcs (inf, 0) and (1, inf) of Gamma; the
// arc (0, 1) is the tree edge and contributes nothing. A crossing from the
// lower to the upper half-plane counts +1.
enum class Puncture { zero, one };

struct Letter {
    Puncture around = Puncture::zero;
    int sign = 1;
    friend bool operator==(const Letter&, const Letter&) = default;
};

class LoopWord {
public:
    LoopWord() = default;
    // Freely reduces.
    explicit LoopWord(const std::vector<Letter>& letters);

    const std::vector<Letter>& letters() const { return letters_; }
    std::size_t length() const { return letters_.size(); }
    LoopWord inverse() const;
    // Equal after cyclic reduction up to rotation.
    bool conjugate_to(const LoopWord& other) const;
    std::string str() const;
    friend bool operator==(const LoopWord&, const LoopWord&) = default;

private:
    std::vector<Letter> letters_;
};

inline constexpr double kPunctureClearance = 1e-6;

// Throws std::invalid_argument when the loop does not start at the base
// point, does not close within `closure_tol`, or comes within chordal 1e-6
// of a puncture; CrossingError when a crossing of Gamma lands within 1e-6
// of 0 or 1.
LoopWord loop_word(const PlanarCurve& loop, const ExtPoint& basepoint, double closure_tol = 1e-9);

// Wedge at 1/2 of two radius-1/4 circles, joined to the base point along
// (0, 1): first anticlockwise around 1, then clockwise around 0.
PlanarCurve prototype_figure_eight(int samples = 2048);

// ---- assemblies ------------------------------------------------------------

struct AccessiblePath {
    Isotopy f = Isotopy::constant_identity();  // on [0, 1]
    ExtPoint z0, w0;
    double residual = 0.0;  // chordal |f_1(z0) - w0|
    bool ejected_start = false, ejected_end = false;
    Meeting start_meeting, end_meeting;  // s on the point's own path, t on chi
};

struct Transitivity {
    SphereMap map;
    double residual = 0.0;
    AccessiblePath path;
};

struct FigureEightCertificate {
    ExtPoint w_hat;
    Isotopy f = Isotopy::constant_identity();
    std::array<ExtPoint, 4> fixed;   // w_hat, 0, 1, infinity
    std::array<double, 4> residuals{};  // chordal |F_1(p) - p|
    LoopWord word, prototype;
    // Seams of the construction.
    double t_tilde_first = 0.0, t_tilde_last = 0.0;
    double t_minus = 0.0, t_plus = 0.0;
    double a = 0.0, b = 0.0, c = 0.0;
    double phi_closure = 0.0;  // chordal |phi_1(w) - w|
    double h_residual = 0.0;   // chordal |h(w) - T01(w)|
    bool certified = false;
};

class AccessibilityError : public std::runtime_error {
public:
    AccessibilityError(const std::string& what, double nearest) : std::runtime_error(what), nearest_(nearest) {}
    double nearest() const { return nearest_; }

private:
    double nearest_;
};

class CertificateRefused : public std::runtime_error {
public:
    CertificateRefused(const std::string& what, FigureEightCertificate cert)
        : std::runtime_error(what), cert_(std::make_shared<FigureEightCertificate>(std::move(cert))) {}
    const FigureEightCertificate& certificate() const { return *cert_; }

private:
    std::shared_ptr<const FigureEightCertificate> cert_;
};

inline constexpr double kEndpointTolerance = 1e-6;

// Everything the accessibility and figure-8 constructions share: the saddle,
// the four-point and crossing isotopies, and the continuum.
class Assembly {
public:
    explicit Assembly(SaddleSetup setup, int stages = 8, double crossing_seed_point = 0.37);

    const SaddleSetup& setup() const { return data_->setup; }
    const FourPointIsotopy& four_point() const { return data_->four_point; }
    const CrossingIsotopy& crossing() const { return data_->crossing; }
    const ContinuumChi& chi() const { return data_->chi; }
    int stages() const { return data_->stages; }

    // Throws std::invalid_argument for a point in {0, 1, infinity} and
    // AccessibilityError when no meeting with chi reaches the tolerance.
    AccessiblePath accessible_path(const ExtPoint& z0, const ExtPoint& w0) const;
    // M_pqr^-1 o f_1 o M_abc. Throws std::invalid_argument unless both
    // tuples hold distinct points.
    Transitivity four_transitivity(const std::array<ExtPoint, 4>& src, const std::array<ExtPoint, 4>& dst) const;
    // Throws AccessibilityError or CrossingError when a seam search fails and
    // CertificateRefused when the word or the fixed points do not check out.
    FigureEightCertificate build_figure_eight() const;

private:
    struct Data {
        SaddleSetup setup;
        int stages;
        FourPointIsotopy four_point;
        CrossingIsotopy crossing;
        ContinuumChi chi;
    };
    std::shared_ptr<const Data> data_;
};

}  // namespace mobdyn
