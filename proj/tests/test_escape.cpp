#include <doctest.h>

#include <cmath>
#include <random>

#include "qhsub/certify.hpp"
#include "qhsub/errors.hpp"
#include "test_support.hpp"

using namespace qhsub;
using qhsub::testing::fd_ladder_jacobian;
using qhsub::testing::ladder_start;
using qhsub::testing::rand_in;
using qhsub::testing::random_ladder;

TEST_SUITE_BEGIN("escape");

namespace {

std::vector<SectorPlan> plans_for(const char* builtin) {
    const QhSymbol sym = builtin_symbol(builtin);
    const H2Verdict verdict = check_H2(sym, kDefaultSamples);
    REQUIRE(verdict.pass);
    return plan_sectors(verdict, sym.weights().ell_value());
}

/// Wide synthetic profile: positive on (0, pi/2), negative on (pi/2, 2pi)
/// with the minimum at the arc center.
QhSymbol wide_negative_symbol() {
    QuasiWeights w;
    w.l1 = 1;
    w.l2 = 1;
    w.m = 2;
    return QhSymbol::callback(
        w,
        [](double theta) {
            const double t = wrap2pi(theta);
            if (t <= half_pi) return std::sin(2.0 * t);
            return -std::sin((t - half_pi) / 1.5);
        },
        Rational(1));
}

}  // namespace

TEST_CASE("sector plans for the builtin family") {
    SUBCASE("maire: six plans, negative ones two-piece") {
        const auto plans = plans_for("maire-l1");
        REQUIRE(plans.size() == 6);
        int pos = 0, neg = 0;
        for (const auto& plan : plans) {
            if (plan.kind == SectorPlan::Kind::Positive) {
                ++pos;
                CHECK(plan.n_segments == 0);
            } else {
                ++neg;
                CHECK(plan.kind == SectorPlan::Kind::NegativeMain);
                CHECK(plan.n_segments == 1);
                CHECK(plan.omega_radius == doctest::Approx(0.25));
                REQUIRE(plan.halves.size() == 2);
                // acuteness of the ingoing direction against both end rays
                for (const auto& half : plan.halves) {
                    const auto& ladder = half.ladder;
                    CHECK(dscalar(ladder.dirs[0], ladder.rays[1], plan.ell) > 0.0);
                }
            }
        }
        CHECK(pos == 3);
        CHECK(neg == 3);
    }
    SUBCASE("quasielliptic: one plan per acute sub-arc of the single component") {
        const auto plans = plans_for("quasielliptic-l2-m4");
        REQUIRE(plans.size() == 4);
        for (const auto& plan : plans) {
            CHECK(plan.kind == SectorPlan::Kind::Positive);
            CHECK(plan.n_segments == 0);
            CHECK(plan.omega_radius == doctest::Approx(0.25));
        }
    }
    SUBCASE("jt-q8: vertical minimum gets perturbed, plans stay two-piece") {
        const auto plans = plans_for("jt-q8");
        int neg = 0;
        for (const auto& plan : plans) {
            if (plan.kind == SectorPlan::Kind::Positive) continue;
            ++neg;
            CHECK(plan.kind == SectorPlan::Kind::NegativeMain);
            for (const auto& half : plan.halves) CHECK(std::abs(half.ladder.dirs[0].a) > 1e-12);
        }
        CHECK(neg == 2);
    }
    SUBCASE("wide negative arc: four slices and the shrunken domain") {
        const QhSymbol sym = wide_negative_symbol();
        const H2Verdict verdict = check_H2(sym, kDefaultSamples);
        REQUIRE(verdict.pass);
        const auto plans = plan_sectors(verdict, 1.0);
        bool found = false;
        for (const auto& plan : plans) {
            if (plan.kind != SectorPlan::Kind::NegativeGeneral) continue;
            found = true;
            CHECK(plan.n_segments == 4);
            CHECK(plan.omega_radius == doctest::Approx(1.0 / 32.0));
        }
        CHECK(found);
    }
    SUBCASE("planning requires a passing verdict") {
        const H2Verdict bad = check_H2(builtin_symbol("negmax"), kDefaultSamples);
        CHECK_THROWS_AS(plan_sectors(bad, 1.0), PlanInfeasible);
    }
}

TEST_CASE("breakpoint times") {
    SUBCASE("euclidean line against the vertical axis") {
        // ingoing diagonal from (0.2, 0.1): the supporting line of the ray is
        // reached at tau = 0.2 * sqrt(2)
        const CirclePoint dir = circle_point(half_pi / 2, 1.0);
        const double tau = tau_break({0.2, 0.1}, dir, circle_point(half_pi, 1.0), -1, 1.0);
        CHECK(tau == doctest::Approx(0.2 * std::sqrt(2.0)).epsilon(1e-12));
    }
    SUBCASE("start on the ray") {
        CHECK(tau_break({0.0, 0.3}, circle_point(half_pi / 2, 1.0), circle_point(half_pi, 1.0), -1, 1.0) ==
              doctest::Approx(0.0));
    }
    SUBCASE("disto-parallel ray is never reached") {
        const CirclePoint dir = circle_point(half_pi / 2, 1.0);
        CHECK_THROWS_AS(tau_break({0.2, 0.1}, dir, dir, -1, 1.0), NotReached);
    }
    SUBCASE("euclidean oracle at random configurations") {
        std::mt19937_64 rng(51);
        for (int i = 0; i < 200; ++i) {
            const double dth = rand_in(rng, 0.0, two_pi);
            const CirclePoint dir = circle_point(dth, 1.0);
            if (std::abs(dir.a) < 0.05) continue;
            const CirclePoint ray = circle_point(dth + rand_in(rng, 0.3, 1.2), 1.0);
            const DistoPoint start{rand_in(rng, -0.5, 0.5), rand_in(rng, -0.5, 0.5)};
            // solve start - tau*dir = lambda*ray directly
            const double det = -dir.a * ray.b + dir.b * ray.a;
            if (std::abs(det) < 1e-6) continue;
            const double tau_expected = (start.t * ray.b - start.s * ray.a) / -det;
            if (tau_expected < 0) continue;
            CHECK(tau_break(start, dir, ray, -1, 1.0) == doctest::Approx(tau_expected).epsilon(1e-10));
        }
    }
}

TEST_CASE("piecewise curve evaluation") {
    const auto plans = plans_for("maire-l1");
    const SectorPlan* neg_plan = nullptr;
    for (const auto& plan : plans)
        if (plan.kind == SectorPlan::Kind::NegativeMain) neg_plan = &plan;
    REQUIRE(neg_plan != nullptr);

    const double mid =
        neg_plan->sector.start.theta + 0.3 * ccw_gap(neg_plan->sector.start.theta, neg_plan->sector.end.theta);
    const CirclePoint c0 = circle_point(mid, 1.0);
    const DistoPoint start{0.1 * c0.a, 0.1 * c0.b};
    const EscapeCurve curve = build_curve(*neg_plan, start);
    REQUIRE(curve.pieces.size() == 2);
    REQUIRE(curve.breakpoints.size() == 1);
    const double tau1 = curve.breakpoints.front();
    CHECK(tau1 > 0.0);
    CHECK(tau1 <= 0.5 + 1e-12);

    SUBCASE("continuity at the breakpoint") {
        const DistoPoint left = curve_eval(curve, tau1 - 1e-13);
        const DistoPoint right = curve_eval(curve, tau1 + 1e-13);
        CHECK(left.t == doctest::Approx(right.t).epsilon(1e-10));
        CHECK(left.s == doctest::Approx(right.s).epsilon(1e-10));
    }
    SUBCASE("derivative is refused exactly at the breakpoint") {
        CHECK_THROWS_AS(curve_dtau(curve, tau1), BreakpointDerivative);
        CHECK_NOTHROW(curve_dtau(curve, tau1 + 1e-3));
    }
    SUBCASE("per-piece determinant invariance") {
        for (std::size_t pi = 0; pi < curve.pieces.size(); ++pi) {
            const auto& piece = curve.pieces[pi];
            const double hi = pi + 1 < curve.pieces.size() ? curve.pieces[pi + 1].tau_lo : 1.0;
            const double ref = ddet(DistoPoint{piece.dir.a, piece.dir.b}, piece.knot, curve.ell);
            for (int k = 1; k < 8; ++k) {
                const double tau = piece.tau_lo + (hi - piece.tau_lo) * k / 8.0;
                const DistoPoint at = curve_eval(curve, tau);
                CHECK(ddet(DistoPoint{piece.dir.a, piece.dir.b}, at, curve.ell) ==
                      doctest::Approx(ref).epsilon(1e-10));
            }
        }
    }
    SUBCASE("radius falls until the reflection then grows past the domain") {
        double prev = rho(curve_eval(curve, 1e-9), 1.0);
        for (int k = 1; k <= 40; ++k) {
            const double tau = tau1 * k / 40.0;
            const double r = rho(curve_eval(curve, tau), 1.0);
            CHECK(r <= prev + 1e-12);
            prev = r;
        }
        CHECK(rho(curve_eval(curve, 1.0), 1.0) > neg_plan->omega_radius);
    }
    SUBCASE("velocity matches finite differences") {
        for (double tau : {0.3 * tau1, 0.9 * tau1, tau1 + 0.3 * (1 - tau1)}) {
            const DistoPoint v = curve_dtau(curve, tau);
            const double h = 1e-7;
            const DistoPoint hi2 = curve_eval(curve, tau + h), lo2 = curve_eval(curve, tau - h);
            CHECK(v.t == doctest::Approx((hi2.t - lo2.t) / (2 * h)).epsilon(1e-5));
            CHECK(v.s == doctest::Approx((hi2.s - lo2.s) / (2 * h)).epsilon(1e-5));
        }
    }
}

TEST_CASE("single-piece positive curves") {
    const auto plans = plans_for("quasielliptic-l2-m4");
    {
        // a concrete start: (0.1, 0.05) escapes the quarter disk by tau = 1
        const CirclePoint at = circle_point_from_xy(0.1, 0.05, 2.0);
        const SectorPlan* owner = nullptr;
        for (const auto& pl : plans)
            if (ccw_gap(pl.sector.start.theta, at.theta) < sector_width(pl.sector)) owner = &pl;
        REQUIRE(owner != nullptr);
        const EscapeCurve curve = build_curve(*owner, {0.1, 0.05});
        CHECK(curve.pieces.size() == 1);
        CHECK(rho(curve_eval(curve, 1.0), 2.0) > 0.25);
    }
    // start under the first plan's sector
    const SectorPlan& plan = plans.front();
    const double mid = plan.sector.start.theta + 0.4 * sector_width(plan.sector);
    const CirclePoint c0 = circle_point(mid, plan.ell);
    const double r = 0.1;
    const DistoPoint start{r * c0.a, std::pow(r, plan.ell) * c0.b};
    const EscapeCurve curve = build_curve(plan, start);
    REQUIRE(curve.pieces.size() == 1);
    CHECK(curve.pieces[0].jacobian == doctest::Approx(1.0));
    // piece agrees with a plain line step at every tau
    for (double tau : {0.1, 0.5, 1.0}) {
        const DistoPoint via_line = line_step(start, plan.dirs[0], 1, tau, plan.ell);
        const DistoPoint via_curve = curve_eval(curve, tau);
        CHECK(via_curve.t == doctest::Approx(via_line.t));
        CHECK(via_curve.s == doctest::Approx(via_line.s));
    }
    CHECK(rho(curve_eval(curve, 1.0), plan.ell) > 0.25);
    // |d gamma/d tau| = 1 for a unit horizontal direction when ell = 1
    const EscapeCurve flat{{CurvePiece{0.0, {0.05, 0.0}, circle_point(0.0, 1.0), 1, 1.0}}, {}, {0.05, 0.0}, 1.0, 0.25};
    const DistoPoint v = curve_dtau(flat, 0.5);
    CHECK(std::hypot(v.t, v.s) == doctest::Approx(1.0));
}

TEST_CASE("domain preconditions") {
    const auto plans = plans_for("maire-l1");
    const SectorPlan* neg_plan = nullptr;
    for (const auto& plan : plans)
        if (plan.kind != SectorPlan::Kind::Positive) neg_plan = &plan;
    REQUIRE(neg_plan != nullptr);
    // on the boundary ray
    const CirclePoint edge = neg_plan->sector.start;
    CHECK_THROWS_AS(build_curve(*neg_plan, DistoPoint{0.1 * edge.a, 0.1 * edge.b}), CurveDomain);
    // on the minimum ray splitting the halves
    const CirclePoint minimum = neg_plan->halves[0].ladder.rays[0];
    CHECK_THROWS_AS(build_curve(*neg_plan, DistoPoint{0.1 * minimum.a, 0.1 * minimum.b}), CurveDomain);
    // outside the domain disk
    const double mid = neg_plan->sector.start.theta + 0.25 * sector_width(neg_plan->sector);
    const CirclePoint c0 = circle_point(mid, 1.0);
    CHECK_THROWS_AS(build_curve(*neg_plan, DistoPoint{0.6 * c0.a, 0.6 * c0.b}), CurveDomain);
}

TEST_CASE("closed-form Jacobians") {
    SUBCASE("two-piece reference value") {
        // dressed: escape (0,1), ray (-1,0), ingoing (sqrt2/2, -sqrt2/2): the
        // Jacobian of the composed map is sqrt(2)
        std::vector<CirclePoint> dirs = {circle_point(-half_pi / 2, 1.0), circle_point(half_pi, 1.0)};
        std::vector<CirclePoint> rays = {circle_point(2 * half_pi, 1.0)};
        CHECK(ladder_jacobian(dirs, rays, 1, 1.0) == doctest::Approx(1.0));
        CHECK(ladder_jacobian(dirs, rays, 2, 1.0) == doctest::Approx(std::sqrt(2.0)));
    }
    SUBCASE("degenerate reflection is rejected") {
        std::vector<CirclePoint> dirs = {circle_point(0.3, 1.0), circle_point(0.3, 1.0)};
        std::vector<CirclePoint> rays = {circle_point(0.3, 1.0)};
        CHECK_THROWS_AS(ladder_jacobian(dirs, rays, 2, 1.0), DegeneratePlan);
    }
    SUBCASE("finite differences confirm the product formula") {
        std::mt19937_64 rng(52);
        for (double ell : {1.0, 2.0}) {
            for (int segments : {1, 2}) {
                int done = 0;
                while (done < 8) {
                    const Ladder ladder = random_ladder(rng, ell, segments, (done % 2) == 0);
                    const DistoPoint start = ladder_start(rng, ladder, ell, 0.05, 0.3);
                    EscapeCurve curve;
                    try {
                        curve = build_ladder_curve(ladder, start, ell, 0.25);
                    } catch (const Error&) {
                        continue;
                    }
                    bool all_ok = true;
                    for (std::size_t pi = 0; pi < curve.pieces.size(); ++pi) {
                        const double lo = curve.pieces[pi].tau_lo;
                        const double hi = pi + 1 < curve.pieces.size() ? curve.pieces[pi + 1].tau_lo : lo + 0.4;
                        const double tau = 0.5 * (lo + hi);
                        const auto fd = fd_ladder_jacobian(ladder, start, tau, ell);
                        if (!fd) {
                            all_ok = false;
                            break;
                        }
                        CHECK(*fd == doctest::Approx(curve.pieces[pi].jacobian).epsilon(1e-6));
                    }
                    if (all_ok) ++done;
                }
            }
        }
    }
}

TEST_CASE("breakpoint bounds and escape growth") {
    std::mt19937_64 rng(53);
    for (const char* name : {"maire-l1", "maire-l2", "jt-q8"}) {
        const QhSymbol sym = builtin_symbol(name);
        const double ell = sym.weights().ell_value();
        const double m = sym.weights().m_value();
        const auto plans = plans_for(name);
        for (const auto& plan : plans) {
            if (plan.kind == SectorPlan::Kind::Positive) continue;
            for (int trial = 0; trial < 24; ++trial) {
                const double width = sector_width(plan.sector);
                const double theta = plan.sector.start.theta + rand_in(rng, 0.02, 0.98) * width;
                const double r = rand_in(rng, plan.omega_radius / 8, plan.omega_radius * 0.98);
                const CirclePoint c0 = circle_point(theta, ell);
                const DistoPoint start{r * c0.a, std::pow(r, ell) * c0.b};
                EscapeCurve curve;
                try {
                    curve = build_curve(plan, start);
                } catch (const CurveDomain&) {
                    continue;
                }
                // tau_{i+1} - tau_i <= 2 rho(tau_i) <= 2 rho(0), and the radius
                // is ordered along the reflections
                double r_prev = rho(start, ell);
                double tau_prev = 0.0;
                for (double b : curve.breakpoints) {
                    const double r_here = rho(curve_eval(curve, b), ell);
                    CHECK(b - tau_prev <= 2 * r_prev + 1e-12);
                    CHECK(r_here <= r_prev + 1e-12);
                    tau_prev = b;
                    r_prev = r_here;
                }
                CHECK(tau_prev <= 0.5 + 1e-12);
                // escape growth on the last piece
                const double tau_n = curve.pieces.back().tau_lo;
                const double r_n = rho(curve.pieces.back().knot, ell);
                for (double frac : {0.25, 0.5, 1.0}) {
                    const double tau = tau_n + frac * (1.0 - tau_n);
                    const double r_tau = rho(curve_eval(curve, tau), ell);
                    CHECK(std::pow(r_tau, m) - std::pow(r_n, m) >=
                          std::pow(2.0, -m) * std::pow(tau - tau_n, m) * (1 - 1e-9));
                }
                CHECK(rho(curve_eval(curve, 1.0), ell) > plan.omega_radius);
            }
        }
    }
}

TEST_CASE("escape certificate over the start grid") {
    for (const char* name : {"maire-l1", "quasielliptic-l2-m4"}) {
        const auto plans = plans_for(name);
        GridSpec grid;
        grid.radial_points = 6;
        grid.angular_points = 64;
        const auto starts = make_start_grid(plans, grid);
        REQUIRE(!starts.empty());
        double omega = 0.25;
        for (const auto& plan : plans) omega = std::min(omega, plan.omega_radius);
        for (const auto& node : starts) {
            const EscapeCurve curve = build_curve(plans[node.plan_index], node.point);
            CHECK(rho(curve_eval(curve, 1.0), plans[node.plan_index].ell) > omega);
        }
    }
}

TEST_SUITE_END();
