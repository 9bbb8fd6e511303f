#include "qhsub/symbols.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

#include "qhsub/distgeo.hpp"
#include "qhsub/errors.hpp"
#include "qhsub/util.hpp"

#include <json.hpp>

namespace qhsub {

namespace {

void validate_weights(const QuasiWeights& w, bool constrained) {
    if (w.l1 <= 0 || w.l2 <= 0) throw ConstraintViolation("weights must be positive integers");
    if (std::gcd(w.l1, w.l2) != 1) throw ConstraintViolation("l1 and l2 must be coprime");
    if (!constrained) return;
    if (w.ell() < Rational(1)) throw ConstraintViolation("ell = l2/l1 must be >= 1");
    if (w.m < Rational(2) * w.ell()) throw ConstraintViolation("m must be >= 2*ell");
}

void validate_monomials(const QuasiWeights& w, const std::vector<Monomial>& ms) {
    // l1*j + l2*k = l1*m, checked exactly.
    const Rational target = Rational(w.l1) * w.m;
    for (const auto& mono : ms) {
        if (mono.j < 0 || mono.k < 0) throw MalformedInput("negative exponent in monomial");
        if (Rational(w.l1 * mono.j + w.l2 * mono.k) != target) {
            throw WeightViolation("monomial t^" + std::to_string(mono.j) + " s^" + std::to_string(mono.k) +
                                  " violates l1*j + l2*k = l1*m");
        }
    }
}

void check_quasihomogeneity(const QhSymbol& sym) {
    // phi(lambda t, lambda^ell s) = lambda^m phi(t, s) at 100 random triples.
    std::mt19937_64 rng(0x5eedull);
    std::uniform_real_distribution<double> coord(-2.0, 2.0);
    std::uniform_real_distribution<double> scale(0.2, 3.0);
    const double ell = sym.weights().ell_value();
    const double m = sym.weights().m_value();
    for (int i = 0; i < 100; ++i) {
        const double t = coord(rng), s = coord(rng), lambda = scale(rng);
        const double lhs = sym.evaluate(lambda * t, std::pow(lambda, ell) * s);
        const double rhs = std::pow(lambda, m) * sym.evaluate(t, s);
        const double denom = std::max({std::abs(lhs), std::abs(rhs), 1e-30});
        if (std::abs(lhs - rhs) / denom > 1e-10)
            throw WeightViolation("quasihomogeneity identity fails at sampled (t,s,lambda)");
    }
}

}  // namespace

QhSymbol QhSymbol::build_polynomial(QuasiWeights w, std::vector<Monomial> monomials, bool constrained) {
    validate_weights(w, constrained);
    if (Rational(w.l1) * w.m != Rational((Rational(w.l1) * w.m).num))
        throw ConstraintViolation("polynomial form requires l1*m integral");
    if (monomials.empty()) throw MalformedInput("polynomial form requires at least one monomial");
    validate_monomials(w, monomials);
    QhSymbol sym;
    sym.weights_ = w;
    sym.monomials_ = std::move(monomials);
    check_quasihomogeneity(sym);
    return sym;
}

QhSymbol QhSymbol::polynomial(QuasiWeights w, std::vector<Monomial> monomials) {
    return build_polynomial(w, std::move(monomials), true);
}

QhSymbol QhSymbol::polynomial_raw(QuasiWeights w, std::vector<Monomial> monomials) {
    return build_polynomial(w, std::move(monomials), false);
}

QhSymbol QhSymbol::callback(QuasiWeights w, Profile tilde_phi, std::optional<Rational> p_hint) {
    validate_weights(w, true);
    if (!tilde_phi) throw MalformedInput("callback form requires a profile");
    QhSymbol sym;
    sym.weights_ = w;
    sym.tilde_phi_ = std::move(tilde_phi);
    sym.p_hint_ = p_hint;
    return sym;
}

double QhSymbol::evaluate(double t, double s) const {
    if (t == 0.0 && s == 0.0) return 0.0;
    if (is_polynomial()) {
        double acc = 0.0;
        for (const auto& mono : monomials_) {
            double term = mono.coef;
            for (std::int64_t i = 0; i < mono.j; ++i) term *= t;
            for (std::int64_t i = 0; i < mono.k; ++i) term *= s;
            acc += term;
        }
        return acc;
    }
    const double ell = weights_.ell_value();
    const CirclePoint c = circle_point_from_xy(t, s, ell);
    const double r = rho({t, s}, ell);
    return std::pow(r, weights_.m_value()) * tilde_phi_(c.theta);
}

double QhSymbol::profile(double theta) const {
    if (!is_polynomial()) return tilde_phi_(wrap2pi(theta));
    const CirclePoint c = circle_point(theta, weights_.ell_value());
    return evaluate(c.a, c.b);
}

double QhSymbol::d_dt(double t, double s) const {
    if (is_polynomial()) {
        double acc = 0.0;
        for (const auto& mono : monomials_) {
            if (mono.j == 0) continue;
            double term = mono.coef * static_cast<double>(mono.j);
            for (std::int64_t i = 0; i < mono.j - 1; ++i) term *= t;
            for (std::int64_t i = 0; i < mono.k; ++i) term *= s;
            acc += term;
        }
        return acc;
    }
    const double h = 1e-6 * std::max(1.0, std::abs(t));
    return (evaluate(t + h, s) - evaluate(t - h, s)) / (2 * h);
}

double QhSymbol::d_ds(double t, double s) const {
    if (is_polynomial()) {
        double acc = 0.0;
        for (const auto& mono : monomials_) {
            if (mono.k == 0) continue;
            double term = mono.coef * static_cast<double>(mono.k);
            for (std::int64_t i = 0; i < mono.j; ++i) term *= t;
            for (std::int64_t i = 0; i < mono.k - 1; ++i) term *= s;
            acc += term;
        }
        return acc;
    }
    const double h = 1e-6 * std::max(1.0, std::abs(s));
    return (evaluate(t, s + h) - evaluate(t, s - h)) / (2 * h);
}

std::string QhSymbol::describe() const {
    std::ostringstream os;
    os << "l1=" << weights_.l1 << " l2=" << weights_.l2 << " m=" << weights_.m.str();
    if (is_polynomial()) {
        os << " phi =";
        bool first = true;
        for (const auto& mono : monomials_) {
            os << (first ? " " : " + ") << mono.coef;
            if (mono.j) os << "*t^" << mono.j;
            if (mono.k) os << "*s^" << mono.k;
            first = false;
        }
    } else {
        os << " (profile callback)";
    }
    return os.str();
}

std::string QhSymbol::digest() const {
    std::ostringstream os;
    os << "l1=" << weights_.l1 << ";l2=" << weights_.l2 << ";m=" << weights_.m.str() << ";";
    if (is_polynomial()) {
        for (const auto& mono : monomials_) {
            char buf[64];
            std::snprintf(buf, sizeof(buf), "(%" PRId64 ",%" PRId64 ",%a)", mono.j, mono.k, mono.coef);
            os << buf;
        }
    } else {
        os << "callback";
    }
    char out[32];
    std::snprintf(out, sizeof(out), "%016llx", static_cast<unsigned long long>(fnv1a(os.str())));
    return out;
}

QhSymbol negate(const QhSymbol& sym) {
    if (sym.is_polynomial()) {
        std::vector<Monomial> flipped = sym.monomials();
        for (auto& mono : flipped) mono.coef = -mono.coef;
        return QhSymbol::polynomial(sym.weights(), std::move(flipped));
    }
    auto base = sym;
    return QhSymbol::callback(
        sym.weights(), [base](double theta) { return -base.profile(theta); }, sym.p_hint());
}

QhSymbol swap_variables(const QhSymbol& sym) {
    if (!sym.is_polynomial()) throw SwapImpossible("swap_variables requires the polynomial form");
    const QuasiWeights& w = sym.weights();
    QuasiWeights swapped;
    swapped.l1 = w.l2;
    swapped.l2 = w.l1;
    swapped.m = w.m * Rational(w.l1, w.l2);
    std::vector<Monomial> ms = sym.monomials();
    for (auto& mono : ms) std::swap(mono.j, mono.k);
    try {
        return QhSymbol::polynomial(swapped, std::move(ms));
    } catch (const ConstraintViolation& e) {
        throw SwapImpossible(std::string("no orientation satisfies ell >= 1 and m >= 2*ell: ") + e.what());
    }
}

namespace {

struct BuiltinSpec {
    QuasiWeights w;
    std::vector<Monomial> monomials;
    std::string description;
};

BuiltinSpec builtin_spec(const std::string& name) {
    // Maire family: t*(s^2 - t^(2l)), m = 2l+1.
    if (name == "maire-l1") return {{1, 1, Rational(3)}, {{1, 2, 1.0}, {3, 0, -1.0}}, "t(s^2 - t^2), l=1, m=3"};
    if (name == "maire-l2") return {{1, 2, Rational(5)}, {{1, 2, 1.0}, {5, 0, -1.0}}, "t(s^2 - t^4), l=2, m=5"};
    if (name == "maire-l3") return {{1, 3, Rational(7)}, {{1, 2, 1.0}, {7, 0, -1.0}}, "t(s^2 - t^6), l=3, m=7"};
    if (name == "jt-q8")
        return {{1, 2, Rational(8)},
                {{8, 0, 1.0}, {4, 2, -1.0}, {0, 4, -1.0}},
                "t^8 - t^4 s^2 - s^4 (Journe-Trepreau q=8 after variable swap), l=2, m=8"};
    if (name == "quasielliptic-l2-m4")
        return {{1, 2, Rational(4)}, {{4, 0, 1.0}, {0, 2, 1.0}}, "t^4 + s^2, l=2, m=4 (profile identically 1)"};
    if (name == "negmax") return {{1, 1, Rational(2)}, {{2, 0, -1.0}}, "-t^2, l=1, m=2 (fails the no-local-max test)"};
    throw MalformedInput("unknown builtin symbol: " + name);
}

}  // namespace

std::vector<std::string> builtin_names() {
    return {"maire-l1", "maire-l2", "maire-l3", "jt-q8", "quasielliptic-l2-m4", "negmax"};
}

QhSymbol builtin_symbol(const std::string& name) {
    BuiltinSpec spec = builtin_spec(name);
    return QhSymbol::polynomial(spec.w, std::move(spec.monomials));
}

std::string builtin_description(const std::string& name) { return builtin_spec(name).description; }

QhSymbol parse_symbol(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw MalformedInput(std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw MalformedInput("symbol description must be a JSON object");
    if (j.contains("builtin")) {
        if (!j["builtin"].is_string()) throw MalformedInput("builtin name must be a string");
        return builtin_symbol(j["builtin"].get<std::string>());
    }
    for (const char* key : {"l1", "l2", "m", "monomials"})
        if (!j.contains(key)) throw MalformedInput(std::string("missing required key: ") + key);
    QuasiWeights w;
    try {
        w.l1 = j["l1"].get<std::int64_t>();
        w.l2 = j["l2"].get<std::int64_t>();
    } catch (const nlohmann::json::exception&) {
        throw MalformedInput("l1/l2 must be integers");
    }
    if (w.l1 <= 0) throw ConstraintViolation("l1 must be positive");
    const double m_raw = j["m"].is_number() ? j["m"].get<double>() : throw MalformedInput("m must be a number");
    const double scaled = m_raw * static_cast<double>(w.l1);
    if (std::abs(scaled - std::llround(scaled)) > 1e-9)
        throw ConstraintViolation("polynomial form requires l1*m integral");
    w.m = Rational(std::llround(scaled), w.l1);
    std::vector<Monomial> ms;
    if (!j["monomials"].is_array()) throw MalformedInput("monomials must be an array");
    for (const auto& entry : j["monomials"]) {
        if (!entry.is_array() || entry.size() != 3) throw MalformedInput("each monomial must be [j, k, coef]");
        Monomial mono;
        try {
            mono.j = entry[0].get<std::int64_t>();
            mono.k = entry[1].get<std::int64_t>();
            mono.coef = entry[2].get<double>();
        } catch (const nlohmann::json::exception&) {
            throw MalformedInput("monomial entries must be [int, int, number]");
        }
        ms.push_back(mono);
    }
    return QhSymbol::polynomial(w, std::move(ms));
}

}  // namespace qhsub
