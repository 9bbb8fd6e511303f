#ifndef QHSUB_TEST_SUPPORT_HPP
#define QHSUB_TEST_SUPPORT_HPP

#include <optional>
#include <random>

#include "qhsub/escape.hpp"

namespace qhsub::testing {

inline double rand_in(std::mt19937_64& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

/// Random admissible broken-line recipe with `segments` reflections: slice
/// widths and direction offsets kept acute, all directions away from the
/// vertical.
inline Ladder random_ladder(std::mt19937_64& rng, double ell, int segments, bool clockwise) {
    const int sense = clockwise ? -1 : +1;
    for (int attempt = 0; attempt < 256; ++attempt) {
        Ladder ladder;
        ladder.clockwise = clockwise;
        const double base = rand_in(rng, 0.0, two_pi);
        ladder.rays.push_back(circle_point(base, ell));
        double at = base;
        std::vector<double> widths;
        for (int j = 1; j <= segments; ++j) {
            const double w = rand_in(rng, 0.25, 1.35);
            widths.push_back(w);
            at += sense * w;
            ladder.rays.push_back(circle_point(at, ell));
        }
        ladder.rays.push_back(circle_point(at + sense * rand_in(rng, 0.3, 1.2), ell));
        bool ok = true;
        for (int j = 1; j <= segments; ++j) {
            const double room = 0.8 * (half_pi - widths[j - 1]);
            const double offset = rand_in(rng, 0.02, std::max(0.03, room));
            const CirclePoint dir = circle_point(ladder.rays[j - 1].theta - sense * offset, ell);
            if (std::abs(dir.a) < 0.05) ok = false;
            ladder.dirs.push_back(dir);
        }
        const CirclePoint esc = circle_point(ladder.rays[segments].theta + sense * rand_in(rng, 0.2, 1.3), ell);
        if (std::abs(esc.a) < 0.05) ok = false;
        ladder.dirs.push_back(esc);
        if (!ok) continue;
        try {
            for (int piece = 1; piece <= segments + 1; ++piece) {
                std::vector<CirclePoint> reflect(ladder.rays.begin() + 1, ladder.rays.begin() + 1 + segments);
                (void)ladder_jacobian(ladder.dirs, reflect, piece, ell);
            }
        } catch (const Error&) {
            continue;
        }
        return ladder;
    }
    throw std::runtime_error("random_ladder failed to produce an admissible recipe");
}

/// Start interior to slice 1 of the ladder at the given radius fraction.
inline DistoPoint ladder_start(std::mt19937_64& rng, const Ladder& ladder, double ell, double radius_lo,
                               double radius_hi) {
    const int sense = ladder.clockwise ? -1 : +1;
    const double w = ang_dist(ladder.rays[0].theta, ladder.rays[1].theta);
    const double frac = rand_in(rng, 0.1, 0.9);
    const double theta = ladder.rays[0].theta + sense * frac * w;
    const double r = rand_in(rng, radius_lo, radius_hi);
    const CirclePoint c = circle_point(theta, ell);
    return {r * c.a, std::pow(r, ell) * c.b};
}

/// Central finite-difference determinant of (t,s) -> gamma(t,s,tau) at one
/// step size; empty when the stencil does not stay on one piece.
inline std::optional<double> fd_ladder_jacobian_step(const Ladder& ladder, DistoPoint start, double tau, double ell,
                                                     double h) {
    const EscapeCurve center = build_ladder_curve(ladder, start, ell, 0.25);
    std::size_t piece = 0;
    while (piece + 1 < center.pieces.size() && tau >= center.pieces[piece + 1].tau_lo) ++piece;
    DistoPoint g[4];
    const DistoPoint offsets[4] = {{h, 0}, {-h, 0}, {0, h}, {0, -h}};
    for (int q = 0; q < 4; ++q) {
        try {
            const EscapeCurve c =
                build_ladder_curve(ladder, {start.t + offsets[q].t, start.s + offsets[q].s}, ell, 0.25);
            if (c.pieces.size() != center.pieces.size()) return std::nullopt;
            std::size_t p = 0;
            while (p + 1 < c.pieces.size() && tau >= c.pieces[p + 1].tau_lo) ++p;
            if (p != piece) return std::nullopt;
            g[q] = curve_eval(c, tau);
        } catch (const Error&) {
            return std::nullopt;
        }
    }
    return ((g[0].t - g[1].t) * (g[2].s - g[3].s) - (g[0].s - g[1].s) * (g[2].t - g[3].t)) / (4.0 * h * h);
}

/// Richardson-extrapolated central differences. Empty when the stencil
/// crosses pieces or the two step sizes disagree (the map is only barely C^1
/// near the origin, where differencing is step-limited and proves nothing).
inline std::optional<double> fd_ladder_jacobian(const Ladder& ladder, DistoPoint start, double tau, double ell,
                                                double h = 1e-5) {
    const auto d1 = fd_ladder_jacobian_step(ladder, start, tau, ell, h);
    const auto d2 = fd_ladder_jacobian_step(ladder, start, tau, ell, 0.5 * h);
    if (!d1 || !d2) return std::nullopt;
    const double extrapolated = (4.0 * *d2 - *d1) / 3.0;
    if (std::abs(*d1 - *d2) > 1e-5 * std::max(1e-12, std::abs(extrapolated))) return std::nullopt;
    return extrapolated;
}

}  // namespace qhsub::testing

#endif
