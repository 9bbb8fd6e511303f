#ifndef QHSUB_SYMBOLS_HPP
#define QHSUB_SYMBOLS_HPP

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "qhsub/rational.hpp"

namespace qhsub {

/// Quasihomogeneity weights. l1, l2 are coprime positive integers,
/// ell = l2/l1 >= 1 and the degree m satisfies m >= 2*ell. Exact rationals so
/// the monomial constraint l1*j + l2*k = l1*m never suffers float drift.
struct QuasiWeights {
    std::int64_t l1 = 1;
    std::int64_t l2 = 1;
    Rational m{2, 1};

    Rational ell() const { return Rational(l2, l1); }
    double ell_value() const { return static_cast<double>(l2) / static_cast<double>(l1); }
    double m_value() const { return m.value(); }
};

struct Monomial {
    std::int64_t j = 0;  // t exponent
    std::int64_t k = 0;  // s exponent
    double coef = 0.0;
};

/// Quasihomogeneous function phi on R^2, either as an explicit monomial sum
/// (analytic case) or as a profile callback on the disto-circle together with
/// the weights; the callback form exists so non-polynomial C^1 examples can be
/// explored and must carry its own Holder order hint.
class QhSymbol {
   public:
    using Profile = std::function<double(double)>;  // dressed angle -> phi restricted to S

    static QhSymbol polynomial(QuasiWeights w, std::vector<Monomial> monomials);
    /// Same validation except the ell >= 1, m >= 2 ell constraints: a raw
    /// symbol carries its natural weights and is only useful as input to
    /// swap_variables, which restores the constrained orientation.
    static QhSymbol polynomial_raw(QuasiWeights w, std::vector<Monomial> monomials);
    static QhSymbol callback(QuasiWeights w, Profile tilde_phi, std::optional<Rational> p_hint);

    bool is_polynomial() const { return !monomials_.empty() || !tilde_phi_; }
    const QuasiWeights& weights() const { return weights_; }
    const std::vector<Monomial>& monomials() const { return monomials_; }
    const std::optional<Rational>& p_hint() const { return p_hint_; }

    /// phi(t, s). Polynomial: direct monomial sum. Callback: rho^m * profile.
    /// Both return 0 at the origin.
    double evaluate(double t, double s) const;

    /// Value of the profile phi~ at dressed angle theta.
    double profile(double theta) const;

    /// d(phi)/dt and d(phi)/ds (polynomial: exact; callback: central differences).
    double d_dt(double t, double s) const;
    double d_ds(double t, double s) const;

    std::string describe() const;
    std::string digest() const;

   private:
    QhSymbol() = default;
    static QhSymbol build_polynomial(QuasiWeights w, std::vector<Monomial> monomials, bool constrained);
    QuasiWeights weights_;
    std::vector<Monomial> monomials_;
    Profile tilde_phi_;
    std::optional<Rational> p_hint_;
};

/// Parse and validate a symbol from the JSON input schema
/// {"l1": int, "l2": int, "m": number, "monomials": [[j,k,coef],...]} or
/// {"builtin": name}. Validation checks the weight identity on every monomial
/// and the quasihomogeneity identity at random sample triples.
QhSymbol parse_symbol(const std::string& text);

/// Flip the sign of phi; (I-) for phi is (I+) for -phi.
QhSymbol negate(const QhSymbol& sym);

/// Exchange the roles of t and s, recomputing weights (l1 <-> l2,
/// m' = m*l1/l2) so that ell >= 1 can be restored when the natural weights of
/// the input give ell < 1. Polynomial form only.
QhSymbol swap_variables(const QhSymbol& sym);

/// Names of the built-in symbols accepted by the input schema.
std::vector<std::string> builtin_names();
QhSymbol builtin_symbol(const std::string& name);
std::string builtin_description(const std::string& name);

}  // namespace qhsub

#endif
