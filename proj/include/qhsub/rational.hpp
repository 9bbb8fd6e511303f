#ifndef QHSUB_RATIONAL_HPP
#define QHSUB_RATIONAL_HPP

#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace qhsub {

/// Exact small rational. Weight bookkeeping (l1*j + l2*k = l1*m) and the
/// growth exponent a = max(m, p) are kept exact; doubles only enter when a
/// value is finally used in floating-point geometry.
struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;

    Rational() = default;
    Rational(std::int64_t n) : num(n), den(1) {}
    Rational(std::int64_t n, std::int64_t d) : num(n), den(d) { normalize(); }

    void normalize() {
        if (den == 0) throw std::invalid_argument("Rational: zero denominator");
        if (den < 0) {
            num = -num;
            den = -den;
        }
        std::int64_t g = std::gcd(num < 0 ? -num : num, den);
        if (g > 1) {
            num /= g;
            den /= g;
        }
    }

    double value() const { return static_cast<double>(num) / static_cast<double>(den); }

    std::string str() const {
        if (den == 1) return std::to_string(num);
        return std::to_string(num) + "/" + std::to_string(den);
    }

    friend Rational operator+(Rational a, Rational b) {
        return Rational(a.num * b.den + b.num * a.den, a.den * b.den);
    }
    friend Rational operator-(Rational a, Rational b) {
        return Rational(a.num * b.den - b.num * a.den, a.den * b.den);
    }
    friend Rational operator*(Rational a, Rational b) { return Rational(a.num * b.num, a.den * b.den); }
    friend Rational operator/(Rational a, Rational b) {
        if (b.num == 0) throw std::invalid_argument("Rational: division by zero");
        return Rational(a.num * b.den, a.den * b.num);
    }
    friend bool operator==(const Rational& a, const Rational& b) { return a.num == b.num && a.den == b.den; }
    friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
    friend bool operator<(const Rational& a, const Rational& b) { return a.num * b.den < b.num * a.den; }
    friend bool operator<=(const Rational& a, const Rational& b) { return a.num * b.den <= b.num * a.den; }
    friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
    friend bool operator>=(const Rational& a, const Rational& b) { return b <= a; }
};

inline Rational rational_max(const Rational& a, const Rational& b) { return a < b ? b : a; }

/// Nearest rational with denominator <= max_den to a double.
inline Rational round_to_rational(double x, std::int64_t max_den) {
    Rational best(0, 1);
    double best_err = 1e300;
    for (std::int64_t d = 1; d <= max_den; ++d) {
        std::int64_t n = static_cast<std::int64_t>(std::llround(x * static_cast<double>(d)));
        double err = std::abs(x - static_cast<double>(n) / static_cast<double>(d));
        if (err < best_err - 1e-15) {
            best_err = err;
            best = Rational(n, d);
        }
    }
    return best;
}

}  // namespace qhsub

#endif
