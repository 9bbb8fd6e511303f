#include "qhsub/circle.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qhsub/errors.hpp"
#include "qhsub/util.hpp"

namespace qhsub {

namespace {

constexpr double kAcuteLimit = half_pi - 3.141592653589793 / 256.0;  // strict acuteness margin
constexpr double kBisectWidth = 1e-12;

double zero_tol(const CircleProfile& p) { return kZeroTolerance * std::max(p.scale, 1e-300); }

int sgn_eps(double x, double eps) { return x > eps ? 1 : (x < -eps ? -1 : 0); }

/// Golden-section maximizer of fn on [lo, hi] (plain angles, no wrap).
double golden_max(const std::function<double(double)>& fn, double lo, double hi) {
    const double gr = 0.61803398874989485;
    double a = lo, b = hi;
    double c = b - gr * (b - a), d = a + gr * (b - a);
    double fc = fn(c), fd = fn(d);
    for (int it = 0; it < 120 && (b - a) > 1e-13; ++it) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = fn(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = fn(d);
        }
    }
    return 0.5 * (a + b);
}

double bisect_zero(const std::function<double(double)>& fn, double lo, double hi) {
    double flo = fn(lo);
    for (int it = 0; it < 80 && (hi - lo) > kBisectWidth; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = fn(mid);
        if ((flo <= 0.0) == (fm <= 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

/// Sample indices with dressed angle strictly inside the anticlockwise arc
/// (lo, lo + width), in traversal order.
std::vector<int> samples_in_arc(const CircleProfile& p, double lo, double width) {
    std::vector<int> idx;
    const int n = static_cast<int>(p.values.size());
    int k = static_cast<int>(std::ceil(wrap2pi(lo) / p.step));
    for (int c = 0; c <= n; ++c, ++k) {
        const double theta = (k % n) * p.step;
        const double off = ccw_gap(lo, theta);
        if (off <= 0.0 || off >= width) {
            if (!idx.empty()) break;
            continue;
        }
        idx.push_back(k % n);
        if (static_cast<int>(idx.size()) > n) break;
    }
    return idx;
}

double binom_general(double alpha, int i) {
    double acc = 1.0;
    for (int r = 0; r < i; ++r) acc *= (alpha - r) / (r + 1);
    return acc;
}

struct OrderFit {
    double slope = 0.0;
    double residual = 0.0;
    bool usable = false;
};

/// Log-log order of vanishing of fn at 0, sampled at geometric offsets on one
/// side (side = +1 or -1).
OrderFit fit_order(const std::function<double(double)>& fn, int side, double h_max, double h_min) {
    std::vector<double> xs, ys;
    for (double h = h_max; h >= h_min * 0.999; h *= 0.5) {
        const double v = std::abs(fn(side * h));
        if (v < 1e-250) continue;
        xs.push_back(std::log(h));
        ys.push_back(std::log(v));
    }
    OrderFit out;
    if (xs.size() < 5) return out;
    LinearFit f = linear_fit(xs, ys);
    out.slope = f.slope;
    out.residual = f.rms_residual;
    out.usable = true;
    return out;
}

}  // namespace

CircleProfile sample_profile(const QhSymbol& sym, int n_samples) {
    if (n_samples < 64) throw MalformedInput("profile sampling requires n_samples >= 64");
    CircleProfile p;
    p.ell = sym.weights().ell_value();
    p.step = two_pi / n_samples;
    p.points.resize(n_samples);
    p.values.resize(n_samples);
    const double ell = p.ell;
    QhSymbol local = sym;
    parallel_chunks(static_cast<std::size_t>(n_samples), [&](std::size_t, std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            const CirclePoint c = circle_point(i * p.step, ell);
            p.points[i] = c;
            p.values[i] = local.evaluate(c.a, c.b);
        }
    });
    p.scale = 0.0;
    for (double v : p.values) p.scale = std::max(p.scale, std::abs(v));
    p.eval = [local, ell](double theta) {
        const CirclePoint c = circle_point(theta, ell);
        return local.evaluate(c.a, c.b);
    };
    return p;
}

std::vector<ZeroInfo> find_zeros(const CircleProfile& profile) {
    const int n = static_cast<int>(profile.values.size());
    const double tol = zero_tol(profile);
    const auto& v = profile.values;

    int near_zero_count = 0;
    for (double x : v)
        if (std::abs(x) <= tol) ++near_zero_count;
    if (near_zero_count > n / 2)
        throw UnresolvedZero("profile vanishes at most samples; zeros cannot be isolated at this resolution");

    std::vector<ZeroInfo> zeros;

    // Flat runs of near-zero samples become a single tangential marker
    // (the local-maximum check rejects them downstream).
    std::vector<bool> in_flat(n, false);
    for (int i = 0; i < n; ++i) {
        int run = 0;
        while (run < n && std::abs(v[(i + run) % n]) <= tol) ++run;
        if (run >= 3) {
            ZeroInfo z;
            const double mid = (i + 0.5 * (run - 1)) * profile.step;
            z.location = circle_point(mid, profile.ell);
            z.bracket_lo = i * profile.step;
            z.bracket_hi = (i + run - 1) * profile.step;
            z.sign_change = false;
            zeros.push_back(z);
            for (int r = 0; r < run; ++r) in_flat[(i + r) % n] = true;
            i += run;
        }
    }

    // Sign changes, bisected to dressed-angle width 1e-12.
    for (int i = 0; i < n; ++i) {
        const int j = (i + 1) % n;
        if (in_flat[i] || in_flat[j]) continue;
        const int si = sgn_eps(v[i], tol), sj = sgn_eps(v[j], tol);
        if (si * sj < 0) {
            const double lo = i * profile.step, hi = (i + 1) * profile.step;
            const double root = bisect_zero(profile.eval, lo, hi);
            ZeroInfo z;
            z.location = circle_point(root, profile.ell);
            z.bracket_lo = lo;
            z.bracket_hi = hi;
            z.sign_change = true;
            zeros.push_back(z);
        }
    }

    // Zeros landing on (or dipping under the tolerance at) a sample node,
    // with no bracketed crossing around them: classify by the first nonzero
    // signs on each side.
    for (int i = 0; i < n; ++i) {
        if (in_flat[i]) continue;
        const double ai = std::abs(v[i]);
        const double prev = std::abs(v[(i + n - 1) % n]), next = std::abs(v[(i + 1) % n]);
        if (ai > tol || ai > prev || ai > next) continue;
        bool near_sign_change = false;
        for (int d = -2; d < 2; ++d) {
            const int a = (i + d + n) % n, b = (i + d + 1 + n) % n;
            if (sgn_eps(v[a], tol) * sgn_eps(v[b], tol) < 0) near_sign_change = true;
        }
        if (near_sign_change) continue;
        const double lo = (i - 1) * profile.step, hi = (i + 1) * profile.step;
        const double at = golden_max([&](double th) { return -std::abs(profile.eval(th)); }, lo, hi);
        if (std::abs(profile.eval(at)) <= tol) {
            int s_left = 0, s_right = 0;
            for (int d = 1; d < n / 2 && (!s_left || !s_right); ++d) {
                if (!s_left) s_left = sgn_eps(v[(i - d + n) % n], tol);
                if (!s_right) s_right = sgn_eps(v[(i + d) % n], tol);
            }
            ZeroInfo z;
            z.location = circle_point(at, profile.ell);
            z.bracket_lo = lo;
            z.bracket_hi = hi;
            z.sign_change = s_left * s_right < 0;
            zeros.push_back(z);
        }
    }

    std::sort(zeros.begin(), zeros.end(),
              [](const ZeroInfo& a, const ZeroInfo& b) { return a.location.theta < b.location.theta; });

    if (zeros.size() > 1) {
        for (std::size_t i = 0; i < zeros.size(); ++i) {
            const ZeroInfo& a = zeros[i];
            const ZeroInfo& b = zeros[(i + 1) % zeros.size()];
            const double gap = ccw_gap(a.location.theta, b.location.theta);
            if (gap < 3 * profile.step && a.sign_change && b.sign_change)
                throw UnresolvedZero("two zeros closer than three sample steps; increase n_samples");
        }
    }
    return zeros;
}

namespace {

/// Split [sec] (with maximizer hat inside or at an endpoint) until both
/// dressed gaps to the maximizer are acute. Monotone pieces keep their
/// extremal endpoint as the maximizer, so Property 1(a) survives every split.
void acute_split(const CircleProfile& profile, const Sector& sec, const CirclePoint& hat,
                 std::vector<SubArc>& out, int depth) {
    if (static_cast<int>(out.size()) > kMaxSubArcs)
        throw PropertyOneFailure("positive component required more than 64 sub-arcs");
    if (depth > 16) throw PropertyOneFailure("acuteness bisection failed to terminate");
    const double width = sector_width(sec);
    const double g1 = sec.full ? ccw_gap(sec.start.theta, hat.theta) : std::min(ccw_gap(sec.start.theta, hat.theta), width);
    const double g2 = width - g1;
    if (g1 <= kAcuteLimit && g2 <= kAcuteLimit) {
        out.push_back({Sector{sec.start, sec.end, false}, hat});
        return;
    }
    if (g1 > kAcuteLimit && g1 >= g2) {
        // bisect the non-decreasing side [start, hat]
        const CirclePoint mid = circle_point(sec.start.theta + 0.5 * g1, profile.ell);
        acute_split(profile, Sector{sec.start, mid, false}, mid, out, depth + 1);
        acute_split(profile, Sector{mid, sec.end, false}, hat, out, depth + 1);
    } else {
        // bisect the non-increasing side [hat, end]
        const CirclePoint mid = circle_point(hat.theta + 0.5 * g2, profile.ell);
        acute_split(profile, Sector{sec.start, mid, false}, hat, out, depth + 1);
        acute_split(profile, Sector{mid, sec.end, false}, mid, out, depth + 1);
    }
}

/// Positions (angles) of interior local minima of the sampled values along
/// the index list; plateaus contribute their center.
std::vector<double> interior_minima(const CircleProfile& profile, const std::vector<int>& idx, bool cyclic) {
    const double eps = 1e-12 * std::max(profile.scale, 1e-300);
    const auto& v = profile.values;
    const int n = static_cast<int>(idx.size());
    std::vector<double> mins;
    if (n < 3) return mins;
    const int limit = cyclic ? n : n - 1;
    int last_sign = 0;
    int sign_pos = -1;
    for (int i = 0; i < limit; ++i) {
        const int a = idx[i], b = idx[(i + 1) % n];
        const int s = sgn_eps(v[b] - v[a], eps);
        if (s == 0) continue;
        if (last_sign < 0 && s > 0) {
            // local minimum between sign_pos and i+1: refine
            const double lo = profile.points[idx[std::max(sign_pos, 0)]].theta;
            double hi = profile.points[b].theta;
            if (hi < lo) hi += two_pi;
            const double at = golden_max([&](double th) { return -profile.eval(th); }, lo, hi);
            mins.push_back(wrap2pi(at));
        }
        last_sign = s;
        sign_pos = i;
    }
    return mins;
}

}  // namespace

std::vector<SignComponent> decompose(const CircleProfile& profile, const std::vector<ZeroInfo>& zeros) {
    const double tol = zero_tol(profile);
    std::vector<SignComponent> components;

    auto make_component = [&](double lo, double width, bool full) {
        SignComponent comp;
        comp.arc.start = circle_point(lo, profile.ell);
        comp.arc.end = circle_point(lo + width, profile.ell);
        comp.arc.full = full;
        std::vector<int> inside = full ? [&] {
            std::vector<int> all(profile.values.size());
            for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
            return all;
        }()
                                       : samples_in_arc(profile, lo, width);
        if (inside.empty()) return;  // unresolvably thin arc between zeros

        double vmax = -1e300, vmin = 1e300;
        int argmax = inside.front(), argmin = inside.front();
        for (int i : inside) {
            if (profile.values[i] > vmax) vmax = profile.values[i], argmax = i;
            if (profile.values[i] < vmin) vmin = profile.values[i], argmin = i;
        }
        if (std::max(std::abs(vmax), std::abs(vmin)) <= tol) return;  // flat zero arc, not a sign component
        comp.kind = (std::abs(vmax) >= std::abs(vmin)) ? (vmax > 0 ? SignComponent::Kind::Positive
                                                                   : SignComponent::Kind::Negative)
                                                       : (vmin < 0 ? SignComponent::Kind::Negative
                                                                   : SignComponent::Kind::Positive);

        if (comp.kind == SignComponent::Kind::Positive) {
            // Maximizer, refined.
            double hat_theta;
            if (vmax - vmin <= tol) {
                hat_theta = full ? 0.0 : wrap2pi(lo + 0.5 * width);  // constant arc: any point serves
            } else {
                double t0 = profile.points[argmax].theta;
                double a = t0 - profile.step, b = t0 + profile.step;
                hat_theta = wrap2pi(golden_max([&](double th) { return profile.eval(th); }, a, b));
            }
            comp.extremum = circle_point(hat_theta, profile.ell);

            // Property-1 sub-arcs: split at interior local minima first, then
            // bisect for acuteness.
            if (full && vmax - vmin <= tol) {
                for (int q = 0; q < 4; ++q) {
                    const double center = hat_theta + q * half_pi;
                    SubArc sub;
                    sub.arc.start = circle_point(center - 0.25 * two_pi / 2, profile.ell);
                    sub.arc.end = circle_point(center + 0.25 * two_pi / 2, profile.ell);
                    sub.hat = circle_point(center, profile.ell);
                    comp.sub_arcs.push_back(sub);
                }
            } else {
                std::vector<double> splits = interior_minima(profile, inside, full);
                std::vector<double> bounds;
                if (full) {
                    if (splits.empty()) splits.push_back(wrap2pi(hat_theta + 3.14159265358979323846));
                    bounds = splits;
                    std::sort(bounds.begin(), bounds.end());
                } else {
                    bounds.push_back(wrap2pi(lo));
                    for (double splitv : splits) bounds.push_back(splitv);
                    std::sort(bounds.begin() + 1, bounds.end(),
                              [&](double x, double y) { return ccw_gap(lo, x) < ccw_gap(lo, y); });
                    bounds.push_back(wrap2pi(lo + width));
                }
                const std::size_t n_arcs = full ? bounds.size() : bounds.size() - 1;
                for (std::size_t q = 0; q < n_arcs; ++q) {
                    const double a0 = bounds[q];
                    const double a1 = bounds[(q + 1) % bounds.size()];
                    double w = ccw_gap(a0, a1);
                    if (w == 0.0) w = two_pi;
                    // interior maximizer of this monotone up-down piece
                    double t_lo = a0, t_hi = a0 + w;
                    const double hat_local = golden_max([&](double th) { return profile.eval(th); }, t_lo, t_hi);
                    Sector piece{circle_point(a0, profile.ell), circle_point(a1, profile.ell), false};
                    acute_split(profile, piece, circle_point(hat_local, profile.ell), comp.sub_arcs, 0);
                }
            }
        } else {
            // Negative: the minimum must be unique, equivalently the profile
            // decreases then increases across the arc.
            std::vector<double> mins = interior_minima(profile, inside, full);
            if (mins.size() > 1) {
                std::ostringstream os;
                os << "negative component has multiple minima near theta = ";
                for (double mth : mins) os << mth << " ";
                throw NonUniqueMinimum(os.str());
            }
            double min_theta;
            if (!mins.empty()) {
                min_theta = mins.front();
            } else {
                double t0 = profile.points[argmin].theta;
                min_theta = wrap2pi(golden_max([&](double th) { return -profile.eval(th); }, t0 - profile.step,
                                               t0 + profile.step));
            }
            comp.extremum = circle_point(min_theta, profile.ell);
        }
        components.push_back(std::move(comp));
    };

    if (zeros.empty()) {
        make_component(0.0, two_pi, true);
    } else {
        for (std::size_t i = 0; i < zeros.size(); ++i) {
            const double lo = zeros[i].location.theta;
            const double hi = zeros[(i + 1) % zeros.size()].location.theta;
            double width = ccw_gap(lo, hi);
            if (width == 0.0) width = two_pi;
            make_component(lo, width, false);
        }
    }
    return components;
}

double profile_via_t_chart(const QhSymbol& sym, double t, int sign_s) {
    const double ell = sym.weights().ell_value();
    const double t2l = std::pow(std::abs(t), 2.0 * ell);
    return sym.evaluate(t, sign_s * std::sqrt(std::max(0.0, 1.0 - t2l)));
}

double profile_via_s_chart(const QhSymbol& sym, double s, int sign_t) {
    const double ell = sym.weights().ell_value();
    return sym.evaluate(sign_t * std::pow(std::max(0.0, 1.0 - s * s), 0.5 / ell), s);
}

Rational estimate_p(const QhSymbol& sym, const CirclePoint& zero) {
    if (!sym.is_polynomial()) {
        if (sym.p_hint()) return *sym.p_hint();
        throw MissingPHint("callback symbols require p_hint for order extraction");
    }
    const std::int64_t l1 = sym.weights().l1;
    const std::int64_t l2 = sym.weights().l2;
    // Axis membership is decided in the dressed angle: the coordinate a
    // scales like the angle gap to the power 1/ell, so a tolerance on a
    // itself would misclassify bisected axis zeros.
    const double axis_ang = 1e-8;
    const bool on_s_axis =
        ang_dist(zero.theta, half_pi) < axis_ang || ang_dist(zero.theta, 3 * half_pi) < axis_ang;
    const bool on_t_axis = ang_dist(zero.theta, 0.0) < axis_ang || ang_dist(zero.theta, 2 * half_pi) < axis_ang;

    auto confirm = [&](const std::function<double(double)>& fn, double expected, const char* what) {
        bool confirmed = false;
        for (int side : {+1, -1}) {
            OrderFit fit = fit_order(fn, side, 1e-2, 1e-5);
            if (fit.usable && std::abs(fit.slope - expected) <= 0.15 && fit.residual <= 0.05) confirmed = true;
        }
        if (!confirmed)
            throw OrderUndetectable(std::string("log-log slope fit does not confirm the series order at ") + what);
    };

    if (on_s_axis) {
        // s-axis zero: chi(v) = phi(v^l1, sign(b) * sqrt(1 - v^(2 l2))).
        const double sb = zero.b >= 0 ? 1.0 : -1.0;
        const int q_max = 400;
        std::vector<double> coef(q_max + 1, 0.0);
        for (const auto& mono : sym.monomials()) {
            const double alpha = 0.5 * static_cast<double>(mono.k);
            double sign_pow = (mono.k % 2 == 0) ? 1.0 : sb;
            for (int i = 0;; ++i) {
                const std::int64_t q = l1 * mono.j + 2 * l2 * i;
                if (q > q_max) break;
                coef[q] += mono.coef * sign_pow * binom_general(alpha, i) * ((i % 2 == 0) ? 1.0 : -1.0);
                if (alpha == std::floor(alpha) && i >= alpha) break;  // finite binomial series
            }
        }
        double cmax = 1.0;
        for (double c : coef) cmax = std::max(cmax, std::abs(c));
        int q_lead = -1;
        for (int q = 1; q <= q_max; ++q)
            if (std::abs(coef[q]) > 1e-9 * cmax) {
                q_lead = q;
                break;
            }
        if (q_lead < 0) throw OrderUndetectable("chart series has no nonzero coefficient up to order 400");
        auto chi = [&](double v) {
            const double u = std::pow(std::abs(v), 2.0 * l2);
            double t = std::copysign(std::pow(std::abs(v), static_cast<double>(l1)), v);
            if (l1 % 2 == 0) t = std::pow(std::abs(v), static_cast<double>(l1));
            return sym.evaluate(t, sb * std::sqrt(std::max(0.0, 1.0 - u)));
        };
        confirm(chi, static_cast<double>(q_lead), "s-axis zero");
        Rational p(q_lead, l1);
        return rational_max(p, Rational(1));
    }

    if (on_t_axis) {
        // t-axis zero: kappa(s) = phi(sign(a) (1 - s^2)^(1/(2l)), s), analytic in s.
        const double sa = zero.a >= 0 ? 1.0 : -1.0;
        const int q_max = 400;
        std::vector<double> coef(q_max + 1, 0.0);
        for (const auto& mono : sym.monomials()) {
            const double alpha = static_cast<double>(mono.j * l1) / (2.0 * static_cast<double>(l2));
            const double sign_pow = (mono.j % 2 == 0) ? 1.0 : sa;
            for (int i = 0;; ++i) {
                const std::int64_t q = mono.k + 2 * i;
                if (q > q_max) break;
                coef[q] += mono.coef * sign_pow * binom_general(alpha, i) * ((i % 2 == 0) ? 1.0 : -1.0);
                if (alpha == std::floor(alpha) && i >= alpha) break;
            }
        }
        double cmax = 1.0;
        for (double c : coef) cmax = std::max(cmax, std::abs(c));
        int q_lead = -1;
        for (int q = 1; q <= q_max; ++q)
            if (std::abs(coef[q]) > 1e-9 * cmax) {
                q_lead = q;
                break;
            }
        if (q_lead < 0) throw OrderUndetectable("chart series has no nonzero coefficient up to order 400");
        auto kappa = [&](double s) { return profile_via_s_chart(sym, s, sa >= 0 ? 1 : -1); };
        confirm(kappa, static_cast<double>(q_lead), "t-axis zero");
        return rational_max(Rational(q_lead), Rational(1));
    }

    // Interior zero: the dressed angle is a regular analytic chart here.
    const double theta0 = zero.theta;
    auto g = [&](double h) { return sym.profile(theta0 + h); };
    Rational best(1);
    bool found = false;
    for (int side : {+1, -1}) {
        OrderFit fit = fit_order(g, side, 1e-2, 1e-5);
        if (!fit.usable || fit.residual > 0.05) continue;
        Rational cand = round_to_rational(fit.slope, l1);
        if (std::abs(cand.value() - fit.slope) > 0.15) continue;
        if (!found || best < cand) best = cand;
        found = true;
    }
    if (!found) throw OrderUndetectable("order fit unstable at interior zero");
    return rational_max(best, Rational(1));
}

int monotone_component_count(const CircleProfile& profile) {
    const double eps = 1e-12 * std::max(profile.scale, 1e-300);
    const int n = static_cast<int>(profile.values.size());
    int transitions = 0;
    int last = 0;
    int first = 0;
    for (int i = 0; i < n; ++i) {
        const int s = sgn_eps(profile.values[(i + 1) % n] - profile.values[i], eps);
        if (s == 0) continue;
        if (last != 0 && s != last) ++transitions;
        if (first == 0) first = s;
        last = s;
    }
    if (last != 0 && first != 0 && last != first) ++transitions;
    return std::max(1, transitions);
}

bool check_H1(const CircleProfile& profile) {
    const int n = static_cast<int>(profile.values.size());
    return monotone_component_count(profile) <= std::max(8, n / 16);
}

namespace {

/// A zero is a (one-sided) local maximum of phi~ when no nearby value on
/// either side rises above the zero tolerance.
bool zero_is_local_max(const CircleProfile& profile, const ZeroInfo& z, double gap_prev, double gap_next) {
    const double tol = zero_tol(profile);
    const double wl = std::min(0.2, 0.5 * gap_prev);
    const double wr = std::min(0.2, 0.5 * gap_next);
    double vmax = -1e300;
    for (int k = 1; k <= 64; ++k) {
        vmax = std::max(vmax, profile.eval(z.location.theta - wl * k / 64.0));
        vmax = std::max(vmax, profile.eval(z.location.theta + wr * k / 64.0));
    }
    return vmax <= tol;
}

}  // namespace

H2Verdict check_H2(const QhSymbol& sym, int n_samples) {
    H2Verdict verdict;
    int n = std::max(64, n_samples);
    CircleProfile profile;
    std::vector<ZeroInfo> zeros;
    bool resolved = false;
    std::string unresolved_detail;
    while (true) {
        profile = sample_profile(sym, n);
        // Identically-zero profiles: every point is a zero attaining a local
        // maximum (value 0), so the no-local-max item fails outright.
        if (profile.scale <= kZeroTolerance) {
            verdict.n_samples = n;
            verdict.resolution = profile.step;
            verdict.items[0] = {true, "max phi~ = 0 (not strictly negative)"};
            verdict.items[1] = {false, "profile is identically zero at resolution; every zero is a local maximum"};
            verdict.items[2] = {false, "no sign components"};
            verdict.items[3] = {false, "no sign components"};
            verdict.items[4] = {false, "no isolated zeros"};
            verdict.pass = false;
            return verdict;
        }
        try {
            zeros = find_zeros(profile);
            resolved = true;
        } catch (const UnresolvedZero& e) {
            unresolved_detail = e.what();
            if (n >= kMaxSamples) break;
            n = std::min(kMaxSamples, n * 4);
            continue;
        }
        break;
    }
    verdict.n_samples = n;
    verdict.resolution = profile.step;

    const double tol = zero_tol(profile);
    double vmax = -1e300;
    for (double v : profile.values) vmax = std::max(vmax, v);

    // item 1: phi~ is not strictly negative
    if (vmax < -tol) {
        std::ostringstream os;
        os << "max phi~ = " << vmax << " < 0";
        verdict.items[0] = {false, os.str()};
    } else {
        verdict.items[0] = {true, "profile attains nonnegative values"};
    }

    if (!resolved) {
        for (int i = 1; i < 5; ++i) verdict.items[i] = {false, "unresolved zeros at max resolution: " + unresolved_detail};
        verdict.pass = false;
        return verdict;
    }
    verdict.zeros = zeros;

    // item 2: no zero is a local maximum
    verdict.items[1] = {true, "no zero is a local maximum"};
    for (std::size_t i = 0; i < zeros.size(); ++i) {
        const double gp = zeros.empty() ? two_pi
                                        : ccw_gap(zeros[(i + zeros.size() - 1) % zeros.size()].location.theta,
                                                  zeros[i].location.theta);
        const double gn = ccw_gap(zeros[i].location.theta, zeros[(i + 1) % zeros.size()].location.theta);
        if (zero_is_local_max(profile, zeros[i], gp == 0 ? two_pi : gp, gn == 0 ? two_pi : gn)) {
            std::ostringstream os;
            os << "zero at dressed angle " << zeros[i].location.theta << " is a local maximum of phi~";
            verdict.items[1] = {false, os.str()};
            break;
        }
    }

    // items 3 and 4 via the sign decomposition
    try {
        verdict.components = decompose(profile, zeros);
        int n_subarcs = 0;
        for (const auto& comp : verdict.components)
            if (comp.kind == SignComponent::Kind::Positive) n_subarcs += static_cast<int>(comp.sub_arcs.size());
        std::ostringstream os3;
        os3 << "positive components split into " << n_subarcs << " acute monotone sub-arcs";
        verdict.items[2] = {true, os3.str()};
        verdict.items[3] = {true, "each negative component has a unique minimum"};
    } catch (const NonUniqueMinimum& e) {
        verdict.items[2] = {true, "positive splitting completed before failure"};
        verdict.items[3] = {false, e.what()};
    } catch (const PropertyOneFailure& e) {
        verdict.items[2] = {false, e.what()};
        verdict.items[3] = {false, "not evaluated (splitting failed)"};
    }

    // item 5: Holder order at every zero
    verdict.p_global = Rational(1);
    verdict.items[4] = {true, "order p determined at every zero"};
    for (const auto& z : zeros) {
        try {
            Rational p = estimate_p(sym, z.location);
            verdict.p_global = rational_max(verdict.p_global, p);
        } catch (const Error& e) {
            std::ostringstream os;
            os << "order extraction failed at theta = " << z.location.theta << ": " << e.what();
            verdict.items[4] = {false, os.str()};
            break;
        }
    }

    // attach endpoint orders to components
    if (verdict.items[4].pass && !zeros.empty()) {
        for (auto& comp : verdict.components) {
            for (int side = 0; side < 2; ++side) {
                const double at = side == 0 ? comp.arc.start.theta : comp.arc.end.theta;
                for (const auto& z : zeros) {
                    if (ang_dist(z.location.theta, at) < 1e-9) {
                        try {
                            comp.endpoint_zero_orders[side] = estimate_p(sym, z.location);
                        } catch (const Error&) {
                        }
                    }
                }
            }
        }
    }

    verdict.pass = true;
    for (const auto& item : verdict.items) verdict.pass = verdict.pass && item.pass;
    return verdict;
}

}  // namespace qhsub
