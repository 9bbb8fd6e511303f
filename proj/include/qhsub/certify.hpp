#ifndef QHSUB_CERTIFY_HPP
#define QHSUB_CERTIFY_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qhsub/escape.hpp"
#include "qhsub/symbols.hpp"

namespace qhsub {

/// Discretization of the start domain and the curve parameter.
struct GridSpec {
    int radial_points = 48;
    int angular_points = 512;
    int tau_points = 256;
    double boundary_margin = 1e-9;
};

struct ConditionResult {
    bool pass = true;
    std::string witness;
};

/// Grid-verified escape-criterion certificate. Not a proof: every extremum
/// carries the grid it was taken over.
struct Certificate {
    enum class Direction { XiPositive, XiNegative };

    std::string symbol_digest;
    Direction direction = Direction::XiPositive;
    std::vector<SectorPlan> plans;
    Rational a{2, 1};        // growth exponent max(m, p)
    Rational s_order{1, 2};  // 1/a
    double C1 = 0.0;         // 1 / min |piece Jacobian|
    double C2 = 0.0;         // max |d gamma / d tau|
    double C3 = 0.0;         // 1 / min (phi(gamma) - phi) / tau^a
    double omega_radius = 0.25;
    GridSpec grid;
    ConditionResult escape, dtau_bound, jacobian_bound, growth_bound;
    bool pass = false;
    double C_phi = 0.0;           // max tau / rho(gamma(tau)) over the grid
    double min_escape_rho = 0.0;  // min rho(gamma(.,1))
    std::uint64_t seed = 0;
};

struct StartNode {
    DistoPoint point;
    std::size_t plan_index = 0;
};

/// Product grid of starts: for every plan chart, angular nodes proportional
/// to its width and radial nodes over [omega * radial_floor, omega], all
/// cell-centered so boundary rays (the null set E) are avoided. Certification
/// uses floor 1/8 so tau <= C_phi * rho(tau) holds with a recorded constant;
/// the decay sweep lowers the floor to reach the asymptotically worst starts
/// (radius of order xi^(-1/a)).
std::vector<StartNode> make_start_grid(const std::vector<SectorPlan>& plans, const GridSpec& grid,
                                       double radial_floor = 1.0 / 8.0);

/// Verify the escape criterion over the grid: escape at tau = 1, bounded
/// tau-derivative, piecewise Jacobians bounded away from zero (cross-checked
/// against finite differences on a seeded 5% subsample), and the growth bound
/// phi(gamma(t,s,tau)) - phi(t,s) >= tau^a / C3.
Certificate certify(const QhSymbol& sym, const H2Verdict& verdict, const std::vector<SectorPlan>& plans,
                    const GridSpec& grid, std::uint64_t seed);

struct PipelineResult {
    H2Verdict verdict;
    std::vector<SectorPlan> plans;
    std::optional<Certificate> certificate;  // absent when the verdict fails
};

/// check_H2 -> plan_sectors -> certify, in one of the two microlocal
/// directions (the negative one runs the pipeline on -phi).
PipelineResult run_pipeline(const QhSymbol& sym, Certificate::Direction direction, const GridSpec& grid,
                            int n_samples, std::uint64_t seed);

inline PipelineResult certify_negative_direction(const QhSymbol& sym, const GridSpec& grid, int n_samples,
                                                 std::uint64_t seed) {
    return run_pipeline(sym, Certificate::Direction::XiNegative, grid, n_samples, seed);
}

}  // namespace qhsub

#endif
