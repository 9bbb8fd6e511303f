#ifndef QHSUB_ESCAPE_HPP
#define QHSUB_ESCAPE_HPP

#include <vector>

#include "qhsub/circle.hpp"
#include "qhsub/distgeo.hpp"

namespace qhsub {

/// Broken-line recipe. The curve started in slice j follows the ingoing
/// disto-line parallel to dirs[j-1] (with varrho = -c) until it meets the
/// reflection ray rays[j], then dirs[j] to rays[j+1], ..., and finally leaves
/// along the escape direction dirs[K] (varrho = +c). rays[0] bounds the first
/// slice on the far side and rays[K+1] anchors the escape direction; neither
/// is a reflection target.
struct Ladder {
    std::vector<CirclePoint> rays;  // size K+2
    std::vector<CirclePoint> dirs;  // size K+1, dirs[K] = escape direction
    bool clockwise = true;          // true: angles sweep clockwise toward rays[K]
    int segments() const { return static_cast<int>(dirs.size()) - 1; }
};

struct HalfLadder {
    Ladder ladder;
    Sector cover;  // half-arc of start angles served by this ladder
};

/// Escape recipe for one sector of the covering. Positive sectors carry the
/// single escape direction; negative sectors carry one ladder per half of the
/// arc (split at the minimum), each ending in the escape direction of the
/// adjacent positive sub-arc. `dirs`/`rays` expose the first half's ladder
/// (or the positive data), `halves` the full recipe.
struct SectorPlan {
    enum class Kind { Positive, NegativeMain, NegativeGeneral };
    Kind kind = Kind::Positive;
    Sector sector;
    std::vector<CirclePoint> dirs;
    std::vector<CirclePoint> rays;
    int n_segments = 0;  // 0 for positive, 1 for negative-main, total slice count otherwise
    double omega_radius = 0.25;
    double ell = 1.0;
    std::vector<HalfLadder> halves;
};

struct CurvePiece {
    double tau_lo = 0.0;
    DistoPoint knot;  // gamma(tau_lo)
    CirclePoint dir;
    int varrho_sign = 1;
    double jacobian = 1.0;  // Jacobian of (t,s) -> gamma(t,s,tau) on this piece
};

struct EscapeCurve {
    std::vector<CurvePiece> pieces;
    std::vector<double> breakpoints;  // interior breakpoint times
    DistoPoint start;
    double ell = 1.0;
    double omega_radius = 0.25;
};

/// One plan per positive Property-1 sub-arc, one per negative component.
/// Verticals among the used directions are replaced by nearby circle points
/// (dressed offset 1/256 toward the served side) with acuteness re-checked.
std::vector<SectorPlan> plan_sectors(const H2Verdict& verdict, double ell);

/// Time at which the disto-line from `start` parallel to `dir` (with
/// varrho = varrho_sign * c) meets the disto-ray through `ray`:
/// f_l(t(tau)) = f_l(a) * Delta_l(start; dir) / Delta_l(ray; dir).
double tau_break(DistoPoint start, const CirclePoint& dir, const CirclePoint& ray, int varrho_sign, double ell);

/// Piecewise Jacobian constant of the broken-line map for 1-based piece index
/// i: 1 on the first piece, and the reflection product formula after i-1
/// reflections. Throws DegeneratePlan when a determinant denominator falls
/// under 1e-12.
double ladder_jacobian(const std::vector<CirclePoint>& dirs, const std::vector<CirclePoint>& reflect_rays,
                       int piece, double ell);
double jacobian_closed_form(const SectorPlan& plan, int piece);

EscapeCurve build_ladder_curve(const Ladder& ladder, DistoPoint start, double ell, double omega_radius);
EscapeCurve build_curve(const SectorPlan& plan, DistoPoint start);

DistoPoint curve_eval(const EscapeCurve& curve, double tau);
DistoPoint curve_dtau(const EscapeCurve& curve, double tau);

/// Jacobian constant of the piece active at tau.
double curve_jacobian(const EscapeCurve& curve, double tau);

inline constexpr double kRayMargin = 1e-9;          // dressed-angle exclusion around rays (the null set E)
inline constexpr double kDirOffsetFraction = 1.0 / 64.0;   // ladder direction offset, fraction of slice width
inline constexpr double kVerticalOffset = 1.0 / 256.0;     // dressed offset replacing vertical directions
inline constexpr double kMinDirOffset = 1.0 / 8.0;         // offset of the first ingoing direction off the minimum

}  // namespace qhsub

#endif
