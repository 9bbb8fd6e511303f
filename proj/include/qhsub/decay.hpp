#ifndef QHSUB_DECAY_HPP
#define QHSUB_DECAY_HPP

#include <array>
#include <complex>
#include <functional>
#include <vector>

#include "qhsub/certify.hpp"

namespace qhsub {

struct DecayReport {
    std::vector<double> xi_grid;
    std::vector<double> kernel_norm;      // M(xi), nonincreasing
    std::vector<double> operator_ratio;   // optional ||u^|| / ||f^|| samples (empty when not computed)
    double fitted_slope = 0.0;
    double predicted_slope = 0.0;  // -1/a from the certificate
    double fit_residual = 0.0;
};

/// Right-hand sides are the two components (f^_1, f^_2) of L^u on the
/// partial-Fourier side.
using RhsField = std::function<std::array<std::complex<double>, 2>(double, double)>;

/// Precomputed quadrature data: per grid start, the piecewise Gauss-Legendre
/// nodes (64 per curve piece) with weights and increments
/// phi(gamma(tau)) - phi(start), which a xi sweep reuses.
struct KernelQuadrature {
    std::vector<double> weights;
    std::vector<double> increments;
    std::vector<std::size_t> offsets;  // starts.size() + 1 entries
};

KernelQuadrature prepare_kernel_quadrature(const QhSymbol& sym, const Certificate& cert);

/// M(xi) = max over grid starts of int_0^1 exp(xi (phi(t,s) - phi(gamma))) dtau.
double kernel_norm_at(const KernelQuadrature& quad, double xi);
double kernel_norm(const QhSymbol& sym, const Certificate& cert, double xi);

/// The certified envelope int_0^1 exp(-xi tau^a / C3) dtau, evaluated with the
/// same composite rule; M(xi) is bounded by it.
double kernel_bound_integral(const Certificate& cert, double xi);

/// u^(t,s,xi) = -int_0^1 exp(xi [phi(t,s) - phi(gamma(tau))]) (f^ . d_tau gamma)(gamma(tau)) dtau,
/// evaluated at the given points (points outside every plan chart get 0).
/// The rhs support can be crossed in a small tau window, so the composite
/// rule is much denser than the kernel's; panels_per_piece tunes it.
std::vector<std::complex<double>> solve_u_hat(const QhSymbol& sym, const Certificate& cert, const RhsField& f_hat,
                                              double xi, const std::vector<DistoPoint>& points,
                                              int panels_per_piece = 256);

/// Geometric xi sweep of M with a log-log slope fit restricted to the largest
/// decade. Throws FitUnstable when the fit residual exceeds 0.2.
DecayReport sweep_and_fit(const QhSymbol& sym, const Certificate& cert, double xi_min, double xi_max, int n_points,
                          bool with_operator_ratio = false);

/// Smooth compactly supported bump (value exp(1 - 1/(1-q)), q = (rho/r0)^2)
/// and the right-hand side manufactured from it, f^_j = (d_j - xi d_j(phi)) u0.
/// Used for operator-ratio sampling and solver verification.
double smooth_bump(DistoPoint p, double r0, double ell);
std::array<double, 2> smooth_bump_grad(DistoPoint p, double r0, double ell);
RhsField transported_rhs(const QhSymbol& sym, double xi, double r0);

/// ||u^||/||f^|| on a Cartesian grid over the bump support, for one xi.
double operator_ratio(const QhSymbol& sym, const Certificate& cert, double xi);

}  // namespace qhsub

#endif
