#include "qhsub/escape.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qhsub/errors.hpp"
#include "qhsub/util.hpp"

namespace qhsub {

namespace {

constexpr double kDegenerate = 1e-12;

std::string fmt_angle(double theta) {
    std::ostringstream os;
    os << theta;
    return os.str();
}

/// Verticality in the dressed angle. The coordinate a = f_l^{-1}(cos theta)
/// inflates tiny cosines for ell > 1, so a tolerance on a itself would let
/// effectively vertical directions through with near-zero f_l(a) denominators.
bool near_vertical(const CirclePoint& c) {
    return ang_dist(c.theta, half_pi) < 1e-6 || ang_dist(c.theta, 3 * half_pi) < 1e-6;
}

/// Replace a vertical direction by the S-point offset by `eps` dressed
/// radians in the given rotation sense (+1 anticlockwise).
CirclePoint nudge_if_vertical(const CirclePoint& c, int sense, double eps, double ell) {
    if (!near_vertical(c)) return c;
    return circle_point(c.theta + sense * eps, ell);
}

}  // namespace

double tau_break(DistoPoint start, const CirclePoint& dir, const CirclePoint& ray, int varrho_sign, double ell) {
    if (dir.a == 0.0) throw NotReached("breakpoint requires a direction with nonzero first coordinate");
    const DistoPoint dvec{dir.a, dir.b};
    const DistoPoint rvec{ray.a, ray.b};
    const double denom = ddet(rvec, dvec, ell);
    if (std::abs(denom) < kDegenerate) throw NotReached("line is disto-parallel to the target ray");
    const double ft1 = f_ell(ray.a, ell) * ddet({start.t, start.s}, dvec, ell) / denom;
    const double t1 = f_ell_inv(ft1, ell);
    // unique by the monotonicity of tau -> f_l(t + varrho tau)
    const double tau = (t1 - start.t) / (varrho_sign * dir.a);
    if (tau < -1e-12) throw NotReached("the ray lies behind the line start");
    return std::max(0.0, tau);
}

double ladder_jacobian(const std::vector<CirclePoint>& dirs, const std::vector<CirclePoint>& reflect_rays,
                       int piece, double ell) {
    if (piece < 1 || piece > static_cast<int>(dirs.size()))
        throw DegeneratePlan("piece index out of range");
    if (piece == 1) return 1.0;
    // Exterior-calculus product over the reflections. The overall sign is the
    // product of the varrho signs of the first and the active piece: +1 while
    // the trajectory is still ingoing, -1 on the escape piece.
    const int segments = static_cast<int>(reflect_rays.size());
    const double sign = piece <= segments ? 1.0 : -1.0;
    const double c_first = std::abs(dirs[0].a);
    const double c_piece = std::abs(dirs[piece - 1].a);
    double acc = sign * std::pow(c_piece, 1.0 - ell) * std::pow(c_first, ell - 1.0);
    for (int j = 1; j <= piece - 1; ++j) {
        const double num = ddet(dirs[j], reflect_rays[j - 1], ell);
        const double den = ddet(dirs[j - 1], reflect_rays[j - 1], ell);
        if (std::abs(den) < kDegenerate) throw DegeneratePlan("reflection determinant below 1e-12");
        acc *= num / den;
    }
    if (!std::isfinite(acc) || acc == 0.0) throw DegeneratePlan("piece Jacobian degenerates to zero or infinity");
    return acc;
}

double jacobian_closed_form(const SectorPlan& plan, int piece) {
    if (plan.kind == SectorPlan::Kind::Positive) {
        if (piece != 1) throw DegeneratePlan("positive plans have a single piece");
        return 1.0;
    }
    const int K = static_cast<int>(plan.dirs.size()) - 1;
    std::vector<CirclePoint> reflect(plan.rays.begin() + 1, plan.rays.begin() + 1 + K);
    return ladder_jacobian(plan.dirs, reflect, piece, plan.ell);
}

EscapeCurve build_ladder_curve(const Ladder& ladder, DistoPoint start, double ell, double omega_radius) {
    const int K = ladder.segments();
    const CirclePoint theta0 = circle_point_from_xy(start.t, start.s, ell);

    // slice containing the start (1-based); slice j is bounded by rays[j-1]
    // and rays[j].
    int slice = -1;
    for (int j = 1; j <= K; ++j) {
        const double lo = ladder.clockwise ? ladder.rays[j].theta : ladder.rays[j - 1].theta;
        const double hi = ladder.clockwise ? ladder.rays[j - 1].theta : ladder.rays[j].theta;
        const double width = ccw_gap(lo, hi);
        const double off = ccw_gap(lo, theta0.theta);
        if (off > kRayMargin && off < width - kRayMargin) {
            slice = j;
            break;
        }
    }
    if (slice < 0) throw CurveDomain("start at dressed angle " + fmt_angle(theta0.theta) +
                                     " is not interior to any slice of the ladder");

    EscapeCurve curve;
    curve.start = start;
    curve.ell = ell;
    curve.omega_radius = omega_radius;

    std::vector<CirclePoint> used_dirs;
    std::vector<CirclePoint> used_rays;
    DistoPoint at = start;
    double tau = 0.0;
    for (int j = slice; j <= K; ++j) {
        used_dirs.push_back(ladder.dirs[j - 1]);
        used_rays.push_back(ladder.rays[j]);
        CurvePiece piece;
        piece.tau_lo = tau;
        piece.knot = at;
        piece.dir = ladder.dirs[j - 1];
        piece.varrho_sign = -1;
        curve.pieces.push_back(piece);
        const double dt = tau_break(at, ladder.dirs[j - 1], ladder.rays[j], -1, ell);
        at = line_step(at, ladder.dirs[j - 1], -1, dt, ell);
        tau += dt;
        curve.breakpoints.push_back(tau);
    }
    used_dirs.push_back(ladder.dirs[K]);
    CurvePiece escape;
    escape.tau_lo = tau;
    escape.knot = at;
    escape.dir = ladder.dirs[K];
    escape.varrho_sign = 1;
    curve.pieces.push_back(escape);

    for (std::size_t i = 0; i < curve.pieces.size(); ++i)
        curve.pieces[i].jacobian = ladder_jacobian(used_dirs, used_rays, static_cast<int>(i) + 1, ell);
    return curve;
}

namespace {

int find_piece(const EscapeCurve& curve, double tau) {
    int i = static_cast<int>(curve.pieces.size()) - 1;
    while (i > 0 && tau < curve.pieces[i].tau_lo) --i;
    return i;
}

}  // namespace

DistoPoint curve_eval(const EscapeCurve& curve, double tau) {
    const CurvePiece& p = curve.pieces[find_piece(curve, tau)];
    return line_step(p.knot, p.dir, p.varrho_sign, tau - p.tau_lo, curve.ell);
}

DistoPoint curve_dtau(const EscapeCurve& curve, double tau) {
    for (double b : curve.breakpoints)
        if (std::abs(tau - b) < 1e-12)
            throw BreakpointDerivative("the curve is not differentiable at a breakpoint");
    const CurvePiece& p = curve.pieces[find_piece(curve, tau)];
    return line_velocity(p.knot, p.dir, p.varrho_sign, tau - p.tau_lo, curve.ell);
}

double curve_jacobian(const EscapeCurve& curve, double tau) {
    return curve.pieces[find_piece(curve, tau)].jacobian;
}

EscapeCurve build_curve(const SectorPlan& plan, DistoPoint start) {
    const double ell = plan.ell;
    const double r0 = rho(start, ell);
    if (!(r0 > 0.0) || r0 >= plan.omega_radius)
        throw CurveDomain("start must lie inside the disto-disk of radius omega_radius");
    const CirclePoint theta0 = circle_point_from_xy(start.t, start.s, ell);
    if (!plan.sector.full) {
        const double off = ccw_gap(plan.sector.start.theta, theta0.theta);
        const double width = sector_width(plan.sector);
        if (off <= kRayMargin || off >= width - kRayMargin)
            throw CurveDomain("start lies on (or outside) the sector boundary rays");
    }

    if (plan.kind == SectorPlan::Kind::Positive) {
        EscapeCurve curve;
        curve.start = start;
        curve.ell = ell;
        curve.omega_radius = plan.omega_radius;
        CurvePiece piece;
        piece.tau_lo = 0.0;
        piece.knot = start;
        piece.dir = plan.dirs[0];
        piece.varrho_sign = 1;
        piece.jacobian = 1.0;
        curve.pieces.push_back(piece);
        return curve;
    }

    for (const HalfLadder& half : plan.halves) {
        const double width = sector_width(half.cover);
        const double off = ccw_gap(half.cover.start.theta, theta0.theta);
        if (off > kRayMargin && off < width - kRayMargin)
            return build_ladder_curve(half.ladder, start, ell, plan.omega_radius);
    }
    throw CurveDomain("start lies on the minimum ray splitting the negative sector");
}

namespace {

struct AdjacentHats {
    // escape direction of the positive sub-arc ending at / starting from a zero
    bool found_prev = false, found_next = false;
    CirclePoint prev, next;
};

AdjacentHats find_adjacent(const std::vector<SectorPlan>& positive_plans, const Sector& negative_arc) {
    AdjacentHats out;
    for (const auto& plan : positive_plans) {
        if (ang_dist(plan.sector.end.theta, negative_arc.start.theta) < 1e-7) {
            out.prev = plan.dirs[0];
            out.found_prev = true;
        }
        if (ang_dist(plan.sector.start.theta, negative_arc.end.theta) < 1e-7) {
            out.next = plan.dirs[0];
            out.found_next = true;
        }
    }
    return out;
}

/// Segment count for one half-arc: smallest K whose slices, widened by the
/// direction offset, stay strictly acute.
int half_segments(double width) {
    const double limit = half_pi / (1.0 + kDirOffsetFraction);
    int k = static_cast<int>(std::floor(width / limit)) + 1;
    while (width / k >= limit) ++k;
    return k;
}

Ladder make_half_ladder(const CirclePoint& minimum, const CirclePoint& end_zero, const CirclePoint& escape_dir,
                        int segments, bool clockwise, double other_half_width, double ell) {
    Ladder ladder;
    ladder.clockwise = clockwise;
    const int sense = clockwise ? -1 : +1;  // rotation from the minimum toward the end zero
    const double width = clockwise ? ccw_gap(end_zero.theta, minimum.theta) : ccw_gap(minimum.theta, end_zero.theta);
    const double slice = width / segments;

    ladder.rays.push_back(minimum);
    for (int j = 1; j < segments; ++j) ladder.rays.push_back(circle_point(minimum.theta + sense * j * slice, ell));
    ladder.rays.push_back(end_zero);
    ladder.rays.push_back(escape_dir);

    // Ingoing directions: the first aims back along the minimum (offset into
    // the opposite half when it must differ from it), later ones sit just
    // behind the previous reflection ray.
    for (int j = 1; j <= segments; ++j) {
        CirclePoint dir;
        if (j == 1) {
            if (segments == 1 && !near_vertical(minimum)) {
                dir = minimum;
            } else {
                // The first direction must differ from the minimum (vertical
                // minimum, or a subdivided half). The offset sets the closest
                // approach of near-ray dives to the origin, so it must be
                // large against the start-grid cells for the certified minima
                // to converge; acuteness against the end ray caps it.
                const double eps =
                    std::min({kMinDirOffset, 0.45 * (half_pi - slice), 0.5 * other_half_width});
                dir = circle_point(minimum.theta - sense * eps, ell);
            }
        } else {
            dir = circle_point(ladder.rays[j - 1].theta - sense * slice * kDirOffsetFraction, ell);
        }
        dir = nudge_if_vertical(dir, -sense, kVerticalOffset, ell);
        ladder.dirs.push_back(dir);
    }
    ladder.dirs.push_back(escape_dir);
    return ladder;
}

void validate_ladder(const Ladder& ladder, double ell) {
    const int K = ladder.segments();
    for (int j = 1; j <= K; ++j) {
        const CirclePoint& dir = ladder.dirs[j - 1];
        if (near_vertical(dir))
            throw PlanInfeasible("ladder direction has vanishing first coordinate (eta_j != 0 violated)");
        if (std::abs(ddet(dir, ladder.rays[j], ell)) < kDegenerate)
            throw PlanInfeasible("Delta_l(eta_j, hat-eta_j) = 0: direction parallel to its reflection ray");
        if (std::abs(ddet(ladder.dirs[j], ladder.rays[j], ell)) < kDegenerate)
            throw PlanInfeasible("Delta_l(eta_{j+1}, hat-eta_j) = 0: next direction parallel to the reflection ray");
        // every start of slice j must see dir at an acute dressed gap
        const double far_gap = ang_dist(dir.theta, ladder.rays[j].theta);
        if (far_gap >= half_pi)
            throw PlanInfeasible("slice " + std::to_string(j) + " spans a non-acute dressed gap " +
                                 fmt_angle(far_gap) + " from its direction");
    }
    if (dscalar(ladder.dirs[K], ladder.rays[K], ell) < 0.0)
        throw PlanInfeasible("escape direction is not acute against the end ray");
}

}  // namespace

std::vector<SectorPlan> plan_sectors(const H2Verdict& verdict, double ell) {
    if (!verdict.pass) throw PlanInfeasible("sector planning requires a passing profile verdict");

    std::vector<SectorPlan> positive_plans;
    for (const auto& comp : verdict.components) {
        if (comp.kind != SignComponent::Kind::Positive) continue;
        for (const auto& sub : comp.sub_arcs) {
            SectorPlan plan;
            plan.kind = SectorPlan::Kind::Positive;
            plan.sector = sub.arc;
            plan.ell = ell;
            plan.n_segments = 0;
            plan.omega_radius = 0.25;
            CirclePoint hat = sub.hat;
            if (near_vertical(hat)) {
                const double g1 = ccw_gap(sub.arc.start.theta, hat.theta);
                const double g2 = ccw_gap(hat.theta, sub.arc.end.theta);
                hat = circle_point(hat.theta + (g2 > g1 ? kVerticalOffset : -kVerticalOffset), ell);
                if (ang_dist(hat.theta, sub.arc.start.theta) >= half_pi ||
                    ang_dist(hat.theta, sub.arc.end.theta) >= half_pi)
                    throw PlanInfeasible("vertical escape direction cannot be perturbed inside the acute sub-arc");
            }
            plan.dirs = {hat};
            plan.rays = {sub.arc.start, sub.arc.end};
            positive_plans.push_back(plan);
        }
    }

    std::vector<SectorPlan> plans;
    std::size_t positive_cursor = 0;
    for (const auto& comp : verdict.components) {
        if (comp.kind == SignComponent::Kind::Positive) {
            for (std::size_t k = 0; k < comp.sub_arcs.size(); ++k) plans.push_back(positive_plans[positive_cursor++]);
            continue;
        }

        const AdjacentHats hats = find_adjacent(positive_plans, comp.arc);
        if (!hats.found_prev || !hats.found_next)
            throw PlanInfeasible("negative component lacks an adjacent positive sub-arc to escape through");

        const CirclePoint minimum = comp.extremum;
        const double w_left = ccw_gap(comp.arc.start.theta, minimum.theta);
        const double w_right = ccw_gap(minimum.theta, comp.arc.end.theta);
        // (5.1): both dressed gaps from the minimum to the endpoint rays acute
        const bool main_case = w_left < half_pi - kDegenerate && w_right < half_pi - kDegenerate;

        SectorPlan plan;
        plan.sector = comp.arc;
        plan.ell = ell;
        int k_left = 1, k_right = 1;
        if (main_case) {
            plan.kind = SectorPlan::Kind::NegativeMain;
            plan.n_segments = 1;
            plan.omega_radius = 0.25;
        } else {
            plan.kind = SectorPlan::Kind::NegativeGeneral;
            k_left = half_segments(w_left);
            k_right = half_segments(w_right);
            plan.n_segments = k_left + k_right;
            if (plan.n_segments > 4) {
                std::ostringstream os;
                os << "negative component needs " << plan.n_segments
                   << " slices in total; the construction caps N at 4";
                throw PlanInfeasible(os.str());
            }
            plan.omega_radius = 1.0 / (8.0 * plan.n_segments);
        }

        HalfLadder left;
        left.cover = Sector{comp.arc.start, minimum, false};
        left.ladder = make_half_ladder(minimum, comp.arc.start, hats.prev, k_left, true, w_right, ell);
        validate_ladder(left.ladder, ell);

        HalfLadder right;
        right.cover = Sector{minimum, comp.arc.end, false};
        right.ladder = make_half_ladder(minimum, comp.arc.end, hats.next, k_right, false, w_left, ell);
        validate_ladder(right.ladder, ell);

        plan.halves = {left, right};
        plan.dirs = left.ladder.dirs;
        plan.rays = left.ladder.rays;
        plans.push_back(plan);
    }
    return plans;
}

}  // namespace qhsub
