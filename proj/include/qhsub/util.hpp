#ifndef QHSUB_UTIL_HPP
#define QHSUB_UTIL_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <thread>
#include <vector>

namespace qhsub {

inline constexpr double two_pi = 6.283185307179586476925286766559;
inline constexpr double half_pi = 1.5707963267948966192313216916398;

/// Wrap an angle into [0, 2*pi).
inline double wrap2pi(double x) {
    double y = std::fmod(x, two_pi);
    if (y < 0) y += two_pi;
    return y;
}

/// Anticlockwise angular distance from a to b, in [0, 2*pi).
inline double ccw_gap(double a, double b) { return wrap2pi(b - a); }

/// Smallest absolute angular distance between a and b.
inline double ang_dist(double a, double b) {
    double d = wrap2pi(b - a);
    return d > 3.14159265358979323846 ? two_pi - d : d;
}

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double rms_residual = 0.0;
};

/// Least-squares line through (x[i], y[i]).
inline LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    LinearFit f;
    const double d = n * sxx - sx * sx;
    f.slope = (n * sxy - sx * sy) / d;
    f.intercept = (sy - f.slope * sx) / n;
    double ss = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double r = y[i] - (f.slope * x[i] + f.intercept);
        ss += r * r;
    }
    f.rms_residual = std::sqrt(ss / n);
    return f;
}

/// FNV-1a 64-bit hash, used for symbol digests.
inline std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

/// 8-point Gauss-Legendre rule on [-1, 1].
struct Gauss8 {
    static constexpr std::array<double, 4> abscissae = {0.18343464249564980494,
                                                        0.52553240991632898582,
                                                        0.79666647741362673959,
                                                        0.96028985649753623168};
    static constexpr std::array<double, 4> weights = {0.36268378337836198297, 0.31370664587788728734,
                                                      0.22238103445337447054, 0.10122853629037625915};
};

/// Integrate fn over [a, b] with `panels` composite 8-point Gauss-Legendre panels.
inline double integrate_gl8(double a, double b, int panels, const std::function<double(double)>& fn) {
    double total = 0.0;
    const double w = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
        const double lo = a + p * w;
        const double mid = lo + 0.5 * w;
        const double half = 0.5 * w;
        double acc = 0.0;
        for (int k = 0; k < 4; ++k) {
            const double dx = half * Gauss8::abscissae[k];
            acc += Gauss8::weights[k] * (fn(mid - dx) + fn(mid + dx));
        }
        total += half * acc;
    }
    return total;
}

/// Chunked deterministic parallel loop: the index range is split into a fixed
/// number of chunks independent of the thread count, so any per-chunk partial
/// results can be merged in chunk order and outputs do not depend on scheduling.
inline void parallel_chunks(std::size_t n, const std::function<void(std::size_t chunk, std::size_t lo, std::size_t hi)>& body) {
    if (n == 0) return;
    const std::size_t n_chunks = std::min<std::size_t>(64, n);
    unsigned hw = std::thread::hardware_concurrency();
    const std::size_t n_threads = std::max<std::size_t>(1, std::min<std::size_t>(hw ? hw : 1, n_chunks));
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    std::size_t per = (n + n_chunks - 1) / n_chunks;
    for (std::size_t t = 0; t < n_threads; ++t) {
        pool.emplace_back([=, &body]() {
            for (std::size_t c = t; c < n_chunks; c += n_threads) {
                std::size_t lo = c * per;
                std::size_t hi = std::min(n, lo + per);
                if (lo < hi) body(c, lo, hi);
            }
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace qhsub

#endif
