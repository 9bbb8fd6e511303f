#include "qhsub/certify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "qhsub/errors.hpp"
#include "qhsub/util.hpp"

namespace qhsub {

namespace {

DistoPoint point_on_ray(double theta, double radius, double ell) {
    const CirclePoint c = circle_point(theta, ell);
    return {radius * c.a, std::pow(radius, ell) * c.b};
}

std::string fmt_start(const DistoPoint& p) {
    std::ostringstream os;
    os << "(" << p.t << ", " << p.s << ")";
    return os.str();
}

struct GridScan {
    double min_growth_ratio = std::numeric_limits<double>::infinity();
    double max_dtau = 0.0;
    double min_jac = std::numeric_limits<double>::infinity();
    double min_escape_rho = std::numeric_limits<double>::infinity();
    double max_tau_over_rho = 0.0;
    bool growth_ok = true;
    bool escape_ok = true;
    std::string growth_witness;
    std::string escape_witness;
    std::size_t evaluated = 0;
    std::size_t skipped = 0;

    void merge(const GridScan& o) {
        min_growth_ratio = std::min(min_growth_ratio, o.min_growth_ratio);
        max_dtau = std::max(max_dtau, o.max_dtau);
        min_jac = std::min(min_jac, o.min_jac);
        min_escape_rho = std::min(min_escape_rho, o.min_escape_rho);
        max_tau_over_rho = std::max(max_tau_over_rho, o.max_tau_over_rho);
        if (!o.growth_ok && growth_ok) {
            growth_ok = false;
            growth_witness = o.growth_witness;
        }
        if (!o.escape_ok && escape_ok) {
            escape_ok = false;
            escape_witness = o.escape_witness;
        }
        evaluated += o.evaluated;
        skipped += o.skipped;
    }
};

}  // namespace

std::vector<StartNode> make_start_grid(const std::vector<SectorPlan>& plans, const GridSpec& grid,
                                       double radial_floor) {
    double omega = 0.25;
    for (const auto& plan : plans) omega = std::min(omega, plan.omega_radius);

    struct Chart {
        double lo;
        double width;
        std::size_t plan_index;
        bool grade_lo = false;  // geometric refinement toward the lo / hi boundary ray
        bool grade_hi = false;
    };
    std::vector<Chart> charts;
    for (std::size_t pi = 0; pi < plans.size(); ++pi) {
        const SectorPlan& plan = plans[pi];
        if (plan.kind == SectorPlan::Kind::Positive) {
            charts.push_back({plan.sector.start.theta, sector_width(plan.sector), pi, false, false});
        } else {
            // The growth minimum sits in a boundary layer against the minimum
            // ray (the closest approach of the ingoing dive scales with the
            // angular offset), so those sides get geometrically graded nodes
            // down to a fixed depth; uniform refinement alone converges like
            // the square root of the cell size there.
            for (std::size_t h = 0; h < plan.halves.size(); ++h) {
                const Sector& cover = plan.halves[h].cover;
                Chart chart{cover.start.theta, sector_width(cover), pi, false, false};
                (h == 0 ? chart.grade_hi : chart.grade_lo) = true;  // halves meet at the minimum
                charts.push_back(chart);
            }
        }
    }

    std::vector<StartNode> nodes;
    const double ell = plans.empty() ? 1.0 : plans.front().ell;
    const double r_lo = omega * radial_floor;
    const double grade_floor = std::max(10.0 * grid.boundary_margin, 1e-8);
    for (const Chart& chart : charts) {
        std::vector<double> angles;
        const int n_ang = std::max(2, static_cast<int>(std::lround(grid.angular_points * chart.width / two_pi)));
        const double inset = std::max(grid.boundary_margin, 1e-12);
        for (int iang = 0; iang < n_ang; ++iang)
            angles.push_back(chart.lo + inset + (chart.width - 2 * inset) * (iang + 0.5) / n_ang);
        for (double delta = chart.width / 4.0; delta > grade_floor; delta *= 0.5) {
            if (chart.grade_lo) angles.push_back(chart.lo + delta);
            if (chart.grade_hi) angles.push_back(chart.lo + chart.width - delta);
        }
        for (double theta : angles) {
            for (int ir = 0; ir < grid.radial_points; ++ir) {
                const double r = r_lo + (omega - r_lo) * (ir + 0.5) / grid.radial_points;
                nodes.push_back({point_on_ray(theta, r, ell), chart.plan_index});
            }
        }
    }
    return nodes;
}

Certificate certify(const QhSymbol& sym, const H2Verdict& verdict, const std::vector<SectorPlan>& plans,
                    const GridSpec& grid, std::uint64_t seed) {
    if (!verdict.pass) throw PlanInfeasible("certification requires a passing profile verdict");
    if (plans.empty()) throw PlanInfeasible("certification requires a sector covering");

    Certificate cert;
    cert.symbol_digest = sym.digest();
    cert.plans = plans;
    cert.grid = grid;
    cert.seed = seed;
    cert.a = rational_max(sym.weights().m, verdict.p_global);
    cert.s_order = Rational(1) / cert.a;
    cert.omega_radius = 0.25;
    for (const auto& plan : plans) cert.omega_radius = std::min(cert.omega_radius, plan.omega_radius);

    const double a_exp = cert.a.value();
    const std::vector<StartNode> starts = make_start_grid(plans, grid);
    const double ell = plans.front().ell;

    std::vector<GridScan> partial(64);
    parallel_chunks(starts.size(), [&](std::size_t chunk, std::size_t lo, std::size_t hi) {
        GridScan& scan = partial[chunk];
        for (std::size_t i = lo; i < hi; ++i) {
            const StartNode& node = starts[i];
            EscapeCurve curve;
            try {
                curve = build_curve(plans[node.plan_index], node.point);
            } catch (const CurveDomain&) {
                ++scan.skipped;
                continue;
            }
            ++scan.evaluated;
            const double phi0 = sym.evaluate(node.point.t, node.point.s);

            for (const CurvePiece& piece : curve.pieces)
                scan.min_jac = std::min(scan.min_jac, std::abs(piece.jacobian));

            const DistoPoint end = curve_eval(curve, 1.0);
            const double r_end = rho(end, ell);
            scan.min_escape_rho = std::min(scan.min_escape_rho, r_end);
            if (r_end <= cert.omega_radius && scan.escape_ok) {
                scan.escape_ok = false;
                scan.escape_witness = "start " + fmt_start(node.point) + " ends at rho = " + std::to_string(r_end);
            }

            for (int k = 1; k <= grid.tau_points; ++k) {
                const double tau = static_cast<double>(k) / grid.tau_points;
                const DistoPoint g = curve_eval(curve, tau);
                const double increment = sym.evaluate(g.t, g.s) - phi0;
                if (increment <= 0.0) {
                    if (scan.growth_ok) {
                        std::ostringstream os;
                        os << "nonpositive increment " << increment << " at start " << fmt_start(node.point)
                           << ", tau = " << tau;
                        scan.growth_ok = false;
                        scan.growth_witness = os.str();
                    }
                } else {
                    scan.min_growth_ratio = std::min(scan.min_growth_ratio, increment / std::pow(tau, a_exp));
                }
                scan.max_tau_over_rho = std::max(scan.max_tau_over_rho, tau / rho(g, ell));

                bool at_breakpoint = false;
                for (double b : curve.breakpoints)
                    if (std::abs(tau - b) < 1e-12) at_breakpoint = true;
                if (!at_breakpoint) {
                    const DistoPoint vel = curve_dtau(curve, tau);
                    scan.max_dtau = std::max(scan.max_dtau, std::hypot(vel.t, vel.s));
                }
            }
        }
    });

    GridScan scan;
    for (const GridScan& p : partial) scan.merge(p);

    // Closed-form piece Jacobians cross-checked against central finite
    // differences of the composed map on a seeded 5% subsample.
    std::mt19937_64 rng(seed);
    ConditionResult jac_check;
    for (std::size_t i = 0; i < starts.size(); ++i) {
        const bool selected = (rng() % 100) < 5;
        if (!selected) continue;
        const StartNode& node = starts[i];
        EscapeCurve center;
        try {
            center = build_curve(plans[node.plan_index], node.point);
        } catch (const CurveDomain&) {
            continue;
        }
        const std::size_t piece_index = rng() % center.pieces.size();
        const double lo = center.pieces[piece_index].tau_lo;
        const double hi = piece_index + 1 < center.pieces.size() ? center.pieces[piece_index + 1].tau_lo : 1.0;
        if (hi - lo < 1e-6) continue;
        // Curves grazing the origin sit next to the non-Lipschitz locus of
        // f_l^{-1}; finite differences there measure conditioning, not the
        // formula. Skip those representatives.
        bool ill_conditioned = false;
        for (const CurvePiece& piece : center.pieces)
            if (rho(piece.knot, plans[node.plan_index].ell) < cert.omega_radius / 32.0) ill_conditioned = true;
        if (ill_conditioned) continue;
        const double tau = 0.5 * (lo + hi);
        auto fd_det = [&](double h) -> std::optional<double> {
            DistoPoint g[4];
            const DistoPoint offsets[4] = {{h, 0}, {-h, 0}, {0, h}, {0, -h}};
            for (int q = 0; q < 4; ++q) {
                DistoPoint p{node.point.t + offsets[q].t, node.point.s + offsets[q].s};
                try {
                    EscapeCurve c = build_curve(plans[node.plan_index], p);
                    if (c.pieces.size() != center.pieces.size()) return std::nullopt;
                    // the stencil must stay on the same piece at this tau
                    std::size_t pidx = 0;
                    while (pidx + 1 < c.pieces.size() && tau >= c.pieces[pidx + 1].tau_lo) ++pidx;
                    if (pidx != piece_index) return std::nullopt;
                    g[q] = curve_eval(c, tau);
                } catch (const Error&) {
                    return std::nullopt;
                }
            }
            return ((g[0].t - g[1].t) * (g[2].s - g[3].s) - (g[0].s - g[1].s) * (g[2].t - g[3].t)) / (4.0 * h * h);
        };
        const auto det_h = fd_det(1e-6);
        const auto det_2h = fd_det(2e-6);
        if (!det_h || !det_2h) continue;
        const double closed = center.pieces[piece_index].jacobian;
        const double scale = std::max(std::abs(closed), 1e-12);
        // Richardson-extrapolated determinant; when the two step sizes
        // disagree the stencil is conditioning-limited and proves nothing.
        const double det = (4.0 * *det_h - *det_2h) / 3.0;
        const double rel = std::abs(det - closed) / scale;
        const double fd_spread = std::abs(*det_h - *det_2h) / scale;
        if (rel > 1e-4 && fd_spread < 3e-4) {
            std::ostringstream os;
            os << "finite-difference Jacobian " << det << " deviates from closed form " << closed << " by "
               << rel << " at start " << fmt_start(node.point) << ", piece " << (piece_index + 1);
            jac_check.pass = false;
            jac_check.witness = os.str();
            break;
        }
    }

    cert.C2 = scan.max_dtau;
    cert.C1 = std::isfinite(scan.min_jac) && scan.min_jac > 0.0 ? 1.0 / scan.min_jac
                                                                : std::numeric_limits<double>::infinity();
    cert.C3 = scan.growth_ok && scan.min_growth_ratio > 0.0 ? 1.0 / scan.min_growth_ratio
                                                            : std::numeric_limits<double>::infinity();
    cert.C_phi = scan.max_tau_over_rho;
    cert.min_escape_rho = scan.min_escape_rho;

    cert.escape = {scan.escape_ok, scan.escape_ok ? "" : scan.escape_witness};
    cert.dtau_bound = {std::isfinite(cert.C2) && cert.C2 > 0.0, ""};
    cert.jacobian_bound = jac_check;
    if (jac_check.pass && (!std::isfinite(cert.C1) || cert.C1 <= 0.0))
        cert.jacobian_bound = {false, "a piece Jacobian vanishes"};
    cert.growth_bound = {scan.growth_ok && std::isfinite(cert.C3), scan.growth_ok ? "" : scan.growth_witness};

    cert.pass = cert.escape.pass && cert.dtau_bound.pass && cert.jacobian_bound.pass && cert.growth_bound.pass;
    return cert;
}

PipelineResult run_pipeline(const QhSymbol& sym, Certificate::Direction direction, const GridSpec& grid,
                            int n_samples, std::uint64_t seed) {
    const QhSymbol working = direction == Certificate::Direction::XiNegative ? negate(sym) : sym;
    PipelineResult out;
    out.verdict = check_H2(working, n_samples);
    if (!out.verdict.pass) return out;
    out.plans = plan_sectors(out.verdict, working.weights().ell_value());
    Certificate cert = certify(working, out.verdict, out.plans, grid, seed);
    cert.direction = direction;
    cert.symbol_digest = sym.digest();
    out.certificate = std::move(cert);
    return out;
}

}  // namespace qhsub
