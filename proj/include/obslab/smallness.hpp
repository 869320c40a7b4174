#pragma once

#include <functional>
#include <string>
#include <vector>

#include "obslab/sets.hpp"

// Propagation of smallness for analytic functions: empirical (N, theta)
// pairs for   ||f||_inf <= N M^{1-theta} (avg_omega |f|)^theta   over a
// sampled family with certified (M, rho), and the derivative version
//   ||d^a f||_inf <= a! (rho/N)^{-a-1} M^{1-theta/2^a} (avg_omega|f|)^{theta/2^a}.

namespace obslab::smallness {

enum class Provenance { empirical_family, oracle_exhaustive };

struct HolderPair {
    double N = 1.0;
    double theta = 1.0;
    Provenance provenance = Provenance::empirical_family;
};

// One family member with enough structure to evaluate derivatives.
struct AnalyticSample {
    std::function<double(double, int)> deriv; // deriv(x, order)
    double M = 0.0;
    double rho = 0.0;
};

struct ThetaRow {
    double theta = 0.0;
    double N = 0.0; // minimal admissible N at this theta over the family
};

struct HolderFit {
    HolderPair pair;
    std::vector<ThetaRow> table; // the whole theta grid, for reports
};

// avg_omega |f| by composite quadrature, >= nodes_per_part per interval.
double avg_abs(const std::function<double(double, int)>& deriv,
               const sets::IntervalSet& omega, std::size_t nodes_per_part = 512);

// Fits N(theta) = max_f ||f||_inf / (M^{1-theta} avg^theta) on the grid
// {0.05, 0.10, ..., 1.0}; the returned pair minimizes N with indifference
// broken toward larger theta, floored at N = 1.
HolderFit estimate_holder(const std::vector<AnalyticSample>& family,
                          const sets::IntervalSet& omega,
                          const sets::Interval& domain,
                          Provenance provenance = Provenance::empirical_family,
                          std::size_t sup_grid = 4096,
                          std::size_t quad_nodes_per_part = 512);

struct ViolationCase {
    std::size_t sample = 0;
    int alpha = 0;
    double lhs = 0.0;
    double rhs = 0.0;
};

struct SmallnessReport {
    std::size_t samples = 0;
    std::size_t checks = 0;
    std::vector<ViolationCase> violations;
    bool pass() const { return violations.empty(); }
};

// Checks the derivative inequality for every sample at orders 0..alpha.
SmallnessReport verify_derivative_smallness(
    const std::vector<AnalyticSample>& family, const sets::IntervalSet& omega,
    const sets::Interval& domain, int alpha, double N, double theta,
    std::size_t sup_grid = 4096, std::size_t quad_nodes_per_part = 512);

} // namespace obslab::smallness
