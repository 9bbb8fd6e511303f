#include "qhsub/decay.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qhsub/errors.hpp"
#include "qhsub/util.hpp"

namespace qhsub {

namespace {

constexpr int kPanelsPerPiece = 8;  // 8 panels x 8 Gauss nodes = 64 nodes per piece

struct PieceRange {
    double lo, hi;
};

std::vector<PieceRange> piece_ranges(const EscapeCurve& curve) {
    std::vector<PieceRange> out;
    for (std::size_t i = 0; i < curve.pieces.size(); ++i) {
        const double lo = curve.pieces[i].tau_lo;
        const double hi = i + 1 < curve.pieces.size() ? curve.pieces[i + 1].tau_lo : 1.0;
        if (hi > lo) out.push_back({lo, hi});
    }
    return out;
}

int plan_chart_for_angle(const std::vector<SectorPlan>& plans, double theta) {
    for (std::size_t pi = 0; pi < plans.size(); ++pi) {
        const SectorPlan& plan = plans[pi];
        if (plan.kind == SectorPlan::Kind::Positive) {
            const double off = ccw_gap(plan.sector.start.theta, theta);
            if (off > kRayMargin && off < sector_width(plan.sector) - kRayMargin) return static_cast<int>(pi);
        } else {
            for (const HalfLadder& half : plan.halves) {
                const double off = ccw_gap(half.cover.start.theta, theta);
                if (off > kRayMargin && off < sector_width(half.cover) - kRayMargin) return static_cast<int>(pi);
            }
        }
    }
    return -1;
}

double exp_guarded(double e) {
    if (e < -745.0) return 0.0;
    return std::exp(e);
}

}  // namespace

KernelQuadrature prepare_kernel_quadrature(const QhSymbol& sym, const Certificate& cert) {
    // The kernel maximum migrates to starts of radius ~ xi^(-1/a); extend the
    // radial range below the certification floor so the sweep can reach them.
    const std::vector<StartNode> starts = make_start_grid(cert.plans, cert.grid, 1.0 / 64.0);

    KernelQuadrature quad;
    quad.offsets.assign(starts.size() + 1, 0);

    std::vector<std::vector<double>> w_chunk(64), inc_chunk(64);
    std::vector<std::vector<std::size_t>> counts(64);
    parallel_chunks(starts.size(), [&](std::size_t chunk, std::size_t lo, std::size_t hi) {
        auto& ws = w_chunk[chunk];
        auto& incs = inc_chunk[chunk];
        auto& cnt = counts[chunk];
        for (std::size_t i = lo; i < hi; ++i) {
            std::size_t n_before = ws.size();
            try {
                const EscapeCurve curve = build_curve(cert.plans[starts[i].plan_index], starts[i].point);
                const double phi0 = sym.evaluate(starts[i].point.t, starts[i].point.s);
                for (const PieceRange& range : piece_ranges(curve)) {
                    const double panel = (range.hi - range.lo) / kPanelsPerPiece;
                    for (int p = 0; p < kPanelsPerPiece; ++p) {
                        const double mid = range.lo + (p + 0.5) * panel;
                        const double half = 0.5 * panel;
                        for (int k = 0; k < 4; ++k) {
                            for (int sgn : {-1, +1}) {
                                const double tau = mid + sgn * half * Gauss8::abscissae[k];
                                const DistoPoint g = curve_eval(curve, tau);
                                ws.push_back(half * Gauss8::weights[k]);
                                incs.push_back(sym.evaluate(g.t, g.s) - phi0);
                            }
                        }
                    }
                }
            } catch (const CurveDomain&) {
                // excluded-set start: contributes nothing
            }
            cnt.push_back(ws.size() - n_before);
        }
    });

    std::size_t chunk_count = 64;
    std::size_t cursor = 0;
    std::size_t start_index = 0;
    for (std::size_t c = 0; c < chunk_count; ++c) {
        quad.weights.insert(quad.weights.end(), w_chunk[c].begin(), w_chunk[c].end());
        quad.increments.insert(quad.increments.end(), inc_chunk[c].begin(), inc_chunk[c].end());
        for (std::size_t n : counts[c]) {
            cursor += n;
            quad.offsets[++start_index] = cursor;
        }
    }
    quad.offsets.resize(start_index + 1);
    return quad;
}

double kernel_norm_at(const KernelQuadrature& quad, double xi) {
    double best = 0.0;
    for (std::size_t s = 0; s + 1 < quad.offsets.size(); ++s) {
        double acc = 0.0;
        double emax = -std::numeric_limits<double>::infinity();
        for (std::size_t i = quad.offsets[s]; i < quad.offsets[s + 1]; ++i) {
            const double e = -xi * quad.increments[i];
            emax = std::max(emax, e);
            acc += quad.weights[i] * exp_guarded(e);
        }
        if (emax > 700.0) {
            // growth violated somewhere: evaluate in the log domain and refuse
            double shifted = 0.0;
            for (std::size_t i = quad.offsets[s]; i < quad.offsets[s + 1]; ++i)
                shifted += quad.weights[i] * exp_guarded(-xi * quad.increments[i] - emax);
            if (!std::isfinite(shifted * std::exp(emax)))
                throw QuadratureUnstable("kernel integrand overflows; increments are not positive");
            acc = shifted * std::exp(emax);
        }
        best = std::max(best, acc);
    }
    return best;
}

double kernel_norm(const QhSymbol& sym, const Certificate& cert, double xi) {
    return kernel_norm_at(prepare_kernel_quadrature(sym, cert), xi);
}

double kernel_bound_integral(const Certificate& cert, double xi) {
    const double a = cert.a.value();
    const double C3 = cert.C3;
    return integrate_gl8(0.0, 1.0, kPanelsPerPiece,
                         [&](double tau) { return exp_guarded(-xi * std::pow(tau, a) / C3); });
}

std::vector<std::complex<double>> solve_u_hat(const QhSymbol& sym, const Certificate& cert, const RhsField& f_hat,
                                              double xi, const std::vector<DistoPoint>& points,
                                              int panels_per_piece) {
    const double ell = cert.plans.front().ell;
    std::vector<std::complex<double>> values(points.size(), 0.0);
    parallel_chunks(points.size(), [&](std::size_t, std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            const DistoPoint p = points[i];
            if (p.t == 0.0 && p.s == 0.0) continue;
            const int plan_index = plan_chart_for_angle(cert.plans, circle_point_from_xy(p.t, p.s, ell).theta);
            if (plan_index < 0) continue;
            if (rho(p, ell) >= cert.plans[plan_index].omega_radius) continue;
            EscapeCurve curve;
            try {
                curve = build_curve(cert.plans[plan_index], p);
            } catch (const CurveDomain&) {
                continue;
            }
            const double phi0 = sym.evaluate(p.t, p.s);
            std::complex<double> acc = 0.0;
            for (const PieceRange& range : piece_ranges(curve)) {
                const int panels = panels_per_piece;
                const double panel = (range.hi - range.lo) / panels;
                for (int q = 0; q < panels; ++q) {
                    const double mid = range.lo + (q + 0.5) * panel;
                    const double half = 0.5 * panel;
                    for (int k = 0; k < 4; ++k) {
                        for (int sgn : {-1, +1}) {
                            const double tau = mid + sgn * half * Gauss8::abscissae[k];
                            const DistoPoint g = curve_eval(curve, tau);
                            const DistoPoint vel = curve_dtau(curve, tau);
                            const auto f = f_hat(g.t, g.s);
                            const std::complex<double> dot = f[0] * vel.t + f[1] * vel.s;
                            const double kernel = exp_guarded(xi * (phi0 - sym.evaluate(g.t, g.s)));
                            acc += half * Gauss8::weights[k] * kernel * dot;
                        }
                    }
                }
            }
            values[i] = -acc;
        }
    });
    return values;
}

double smooth_bump(DistoPoint p, double r0, double ell) {
    const double q = std::pow(rho(p, ell) / r0, 2.0);
    if (q >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - q));
}

std::array<double, 2> smooth_bump_grad(DistoPoint p, double r0, double ell) {
    const double r = rho(p, ell);
    const double q = std::pow(r / r0, 2.0);
    if (q >= 1.0 || r == 0.0) return {0.0, 0.0};
    const double u = smooth_bump(p, r0, ell);
    const double dq = -u / ((1.0 - q) * (1.0 - q)) * (2.0 * r / (r0 * r0));
    // rho partials: d(rho)/dt = (t/rho)^(2l-1) sign-aware, d(rho)/ds = s / (l rho^(2l-1))
    const double r2lm1 = std::pow(r, 2.0 * ell - 1.0);
    const double drho_dt = f_ell(p.t, 2.0 * ell - 1.0) / r2lm1;
    const double drho_ds = p.s / (ell * r2lm1);
    return {dq * drho_dt, dq * drho_ds};
}

RhsField transported_rhs(const QhSymbol& sym, double xi, double r0) {
    const double ell = sym.weights().ell_value();
    QhSymbol local = sym;
    return [local, xi, r0, ell](double t, double s) -> std::array<std::complex<double>, 2> {
        const DistoPoint p{t, s};
        const double u0 = smooth_bump(p, r0, ell);
        const auto grad = smooth_bump_grad(p, r0, ell);
        const double ft = grad[0] - xi * local.d_dt(t, s) * u0;
        const double fs = grad[1] - xi * local.d_ds(t, s) * u0;
        return {std::complex<double>(ft, 0.0), std::complex<double>(fs, 0.0)};
    };
}

double operator_ratio(const QhSymbol& sym, const Certificate& cert, double xi) {
    const double ell = cert.plans.front().ell;
    const double r0 = 0.8 * cert.omega_radius;
    const RhsField rhs = transported_rhs(sym, xi, r0);

    const int n = 48;
    const double t_max = cert.omega_radius;
    const double s_max = std::pow(cert.omega_radius, ell);
    std::vector<DistoPoint> points;
    points.reserve(n * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            points.push_back({-t_max + 2.0 * t_max * (i + 0.5) / n, -s_max + 2.0 * s_max * (j + 0.5) / n});

    const auto u = solve_u_hat(sym, cert, rhs, xi, points, 64);
    double nu = 0.0, nf = 0.0;
    const double cell = (2.0 * t_max / n) * (2.0 * s_max / n);
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto f = rhs(points[i].t, points[i].s);
        nf += (std::norm(f[0]) + std::norm(f[1])) * cell;
        nu += std::norm(u[i]) * cell;
    }
    if (nf == 0.0) return 0.0;
    return std::sqrt(nu / nf);
}

DecayReport sweep_and_fit(const QhSymbol& sym, const Certificate& cert, double xi_min, double xi_max, int n_points,
                          bool with_operator_ratio) {
    if (!(xi_min > 0.0) || xi_max / xi_min < 100.0)
        throw MalformedInput("sweep requires 0 < xi_min and xi_max/xi_min >= 100");
    if (n_points < 8) throw MalformedInput("sweep requires at least 8 points");

    DecayReport report;
    report.predicted_slope = -cert.s_order.value();
    const double ratio = std::pow(xi_max / xi_min, 1.0 / (n_points - 1));
    for (int i = 0; i < n_points; ++i) report.xi_grid.push_back(xi_min * std::pow(ratio, i));

    const KernelQuadrature quad = prepare_kernel_quadrature(sym, cert);
    report.kernel_norm.resize(n_points);
    for (int i = 0; i < n_points; ++i) report.kernel_norm[i] = kernel_norm_at(quad, report.xi_grid[i]);

    if (with_operator_ratio) {
        report.operator_ratio.resize(n_points);
        for (int i = 0; i < n_points; ++i) report.operator_ratio[i] = operator_ratio(sym, cert, report.xi_grid[i]);
    }

    // fit on the largest decade to suppress preasymptotic bias
    std::vector<double> xs, ys;
    for (int i = 0; i < n_points; ++i) {
        if (report.xi_grid[i] >= xi_max / 10.0 * (1.0 - 1e-9)) {
            xs.push_back(std::log(report.xi_grid[i]));
            ys.push_back(std::log(report.kernel_norm[i]));
        }
    }
    const LinearFit fit = linear_fit(xs, ys);
    report.fitted_slope = fit.slope;
    report.fit_residual = fit.rms_residual;
    if (report.fit_residual > 0.2) throw FitUnstable("decay fit residual exceeds 0.2");
    return report;
}

}  // namespace qhsub
