#ifndef QHSUB_DISTGEO_HPP
#define QHSUB_DISTGEO_HPP

#include <cmath>

#include "qhsub/errors.hpp"
#include "qhsub/util.hpp"

namespace qhsub {

/// Point (or vector) in the (t, s) plane carrying the distorted geometry.
struct DistoPoint {
    double t = 0.0;
    double s = 0.0;
};

/// Point on the disto-circle S = { t^(2l) + s^2 = 1 }. `theta` is the dressed
/// angle: the angle of the image under the dressing map on the Euclidean unit
/// circle, the canonical key for orientation and sector membership. (a, b) are
/// the plane coordinates, kept alongside because most formulas want them.
struct CirclePoint {
    double theta = 0.0;
    double a = 1.0;
    double b = 0.0;
};

/// Arc of S traversed anticlockwise from `start` to `end`. `full` marks the
/// whole circle (profiles without zeros produce one).
struct Sector {
    CirclePoint start;
    CirclePoint end;
    bool full = false;
};

/// f_l(sigma) = sigma * |sigma|^(l-1): odd, strictly increasing.
inline double f_ell(double sigma, double ell) {
    if (sigma == 0.0) return 0.0;
    return std::copysign(std::pow(std::abs(sigma), ell), sigma);
}

inline double f_ell_inv(double y, double ell) {
    if (y == 0.0) return 0.0;
    return std::copysign(std::pow(std::abs(y), 1.0 / ell), y);
}

/// f_l'(sigma) = l * |sigma|^(l-1).
inline double f_ell_prime(double sigma, double ell) {
    if (ell == 1.0) return 1.0;
    return ell * std::pow(std::abs(sigma), ell - 1.0);
}

/// Dressing map d_l(t, s) = (f_l(t), s). Transports the distorted geometry to
/// the Euclidean one; S maps onto the unit circle.
inline DistoPoint dressing(DistoPoint p, double ell) { return {f_ell(p.t, ell), p.s}; }

/// Quasihomogeneous radius: rho^(2l) = t^(2l) + s^2, rho(λt, λ^l s) = λ rho.
inline double rho(DistoPoint p, double ell) {
    const double ft = f_ell(p.t, ell);
    return std::pow(ft * ft + p.s * p.s, 0.5 / ell);
}

/// Disto-scalar product <v|w>_l = v1 w1 |v1 w1|^(l-1) + v2 w2; equals the
/// Euclidean dot product of the dressed vectors.
inline double dscalar(DistoPoint v, DistoPoint w, double ell) {
    return f_ell(v.t, ell) * f_ell(w.t, ell) + v.s * w.s;
}

/// Disto-determinant Delta_l(v; w) = f_l(v1) w2 - v2 f_l(w1); equals the
/// Euclidean determinant of the dressed vectors, antisymmetric.
inline double ddet(DistoPoint v, DistoPoint w, double ell) {
    return f_ell(v.t, ell) * w.s - v.s * f_ell(w.t, ell);
}

inline double ddet(const CirclePoint& v, const CirclePoint& w, double ell) {
    return ddet(DistoPoint{v.a, v.b}, DistoPoint{w.a, w.b}, ell);
}

inline double dscalar(const CirclePoint& v, const CirclePoint& w, double ell) {
    return dscalar(DistoPoint{v.a, v.b}, DistoPoint{w.a, w.b}, ell);
}

/// Point of S at dressed angle theta.
inline CirclePoint circle_point(double theta, double ell) {
    CirclePoint c;
    c.theta = wrap2pi(theta);
    c.a = f_ell_inv(std::cos(c.theta), ell);
    c.b = std::sin(c.theta);
    return c;
}

/// Radial projection of (t, s) onto S along its disto-ray.
inline CirclePoint circle_point_from_xy(double t, double s, double ell) {
    const DistoPoint d = dressing({t, s}, ell);
    const double r = std::hypot(d.t, d.s);
    if (r == 0.0) throw OriginProjection("cannot project the origin onto the disto-circle");
    CirclePoint c;
    c.theta = wrap2pi(std::atan2(d.s, d.t));
    c.a = f_ell_inv(d.t / r, ell);
    c.b = d.s / r;
    return c;
}

inline double sector_width(const Sector& sec) {
    if (sec.full) return two_pi;
    double w = ccw_gap(sec.start.theta, sec.end.theta);
    return w == 0.0 ? two_pi : w;
}

/// Anticlockwise dressed-angle interval test.
inline bool in_sector(DistoPoint p, const Sector& sec, double ell) {
    if (sec.full) return true;
    const CirclePoint c = circle_point_from_xy(p.t, p.s, ell);
    return ccw_gap(sec.start.theta, c.theta) <= sector_width(sec);
}

/// One straight disto-line step. The curve starting at `start` and
/// disto-parallel to `dir` = (c, d) in S:
///   t(tau) = t + rho*tau,           rho = varrho_sign * c,
///   s(tau) = s + d/f_l(c) * (f_l(t(tau)) - f_l(t)),
/// so that Delta_l(dir; gamma(tau)) is constant in tau. Vertical directions
/// (c = 0) take the form (t, s + d*tau).
inline DistoPoint line_step(DistoPoint start, const CirclePoint& dir, int varrho_sign, double tau, double ell) {
    if (dir.a == 0.0) return {start.t, start.s + dir.b * tau};
    const double varrho = varrho_sign * dir.a;
    const double t_new = start.t + varrho * tau;
    const double fc = f_ell(dir.a, ell);
    const double s_new = start.s + dir.b / fc * (f_ell(t_new, ell) - f_ell(start.t, ell));
    return {t_new, s_new};
}

/// Velocity (dt/dtau, ds/dtau) of the line at parameter tau.
inline DistoPoint line_velocity(DistoPoint start, const CirclePoint& dir, int varrho_sign, double tau, double ell) {
    if (dir.a == 0.0) return {0.0, dir.b};
    const double varrho = varrho_sign * dir.a;
    const double t_now = start.t + varrho * tau;
    return {varrho, dir.b / f_ell(dir.a, ell) * f_ell_prime(t_now, ell) * varrho};
}

}  // namespace qhsub

#endif
