#include "obslab/smallness.hpp"

#include <cmath>
#include <stdexcept>

#include "obslab/quadrature.hpp"

namespace obslab::smallness {

double avg_abs(const std::function<double(double, int)>& deriv,
               const sets::IntervalSet& omega, std::size_t nodes_per_part) {
    double m = omega.measure();
    if (!(m > 0.0)) throw std::invalid_argument("empty observation set");
    auto grid = quadrature::composite(omega, nodes_per_part);
    double s = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i)
        s += grid.weights[i] * std::fabs(deriv(grid.nodes[i], 0));
    return s / m;
}

namespace {

struct SampleStats {
    double sup = 0.0;
    double avg = 0.0;
    double M = 0.0;
};

std::vector<SampleStats> collect(const std::vector<AnalyticSample>& family,
                                 const sets::IntervalSet& omega,
                                 const sets::Interval& domain,
                                 std::size_t sup_grid,
                                 std::size_t quad_nodes_per_part) {
    if (family.empty())
        throw std::invalid_argument("estimate_holder: empty family");
    std::vector<SampleStats> stats;
    stats.reserve(family.size());
    for (const auto& f : family) {
        if (!(f.M > 0.0)) throw std::invalid_argument("degenerate family");
        SampleStats st;
        st.M = f.M;
        for (std::size_t i = 0; i <= sup_grid; ++i) {
            double x = domain.lo + domain.length() * i / sup_grid;
            st.sup = std::max(st.sup, std::fabs(f.deriv(x, 0)));
        }
        st.avg = avg_abs(f.deriv, omega, quad_nodes_per_part);
        stats.push_back(st);
    }
    return stats;
}

} // namespace

HolderFit estimate_holder(const std::vector<AnalyticSample>& family,
                          const sets::IntervalSet& omega,
                          const sets::Interval& domain, Provenance provenance,
                          std::size_t sup_grid, std::size_t quad_nodes_per_part) {
    if (omega.measure() <= 0.0)
        throw std::invalid_argument("empty observation set");
    auto stats = collect(family, omega, domain, sup_grid, quad_nodes_per_part);

    HolderFit fit;
    for (int i = 1; i <= 20; ++i) {
        double theta = 0.05 * i;
        double n_needed = 0.0;
        for (const auto& st : stats) {
            if (st.sup == 0.0) continue;
            double denom = std::exp((1.0 - theta) * std::log(st.M) +
                                    theta * std::log(st.avg));
            n_needed = std::max(n_needed, st.sup / denom);
        }
        fit.table.push_back({theta, std::max(1.0, n_needed)});
    }

    // Minimize N; indifference broken toward larger theta.
    const ThetaRow* best = &fit.table.front();
    for (const auto& row : fit.table)
        if (row.N < best->N * (1.0 - 1e-12) ||
            (row.N <= best->N * (1.0 + 1e-12) && row.theta > best->theta))
            best = &row;
    fit.pair.N = best->N;
    fit.pair.theta = best->theta;
    fit.pair.provenance = provenance;
    return fit;
}

SmallnessReport verify_derivative_smallness(
    const std::vector<AnalyticSample>& family, const sets::IntervalSet& omega,
    const sets::Interval& domain, int alpha, double N, double theta,
    std::size_t sup_grid, std::size_t quad_nodes_per_part) {
    if (!(N >= 1.0)) throw std::invalid_argument("holder constant must be >= 1");
    SmallnessReport rep;
    rep.samples = family.size();
    for (std::size_t s = 0; s < family.size(); ++s) {
        const auto& f = family[s];
        if (!(f.rho > 0.0) || f.rho > 1.0)
            throw std::invalid_argument("certified rho must lie in (0,1]");
        double avg = avg_abs(f.deriv, omega, quad_nodes_per_part);
        for (int a = 0; a <= alpha; ++a) {
            double sup = 0.0;
            for (std::size_t i = 0; i <= sup_grid; ++i) {
                double x = domain.lo + domain.length() * i / sup_grid;
                sup = std::max(sup, std::fabs(f.deriv(x, a)));
            }
            double inv2a = std::ldexp(1.0, -a);
            double log_rhs = std::lgamma(a + 1.0) -
                             (a + 1.0) * std::log(f.rho / N) +
                             (1.0 - theta * inv2a) * std::log(f.M) +
                             theta * inv2a * std::log(avg);
            ++rep.checks;
            if (std::log(std::max(sup, 1e-300)) > log_rhs)
                rep.violations.push_back({s, a, sup, std::exp(log_rhs)});
        }
    }
    return rep;
}

} // namespace obslab::smallness
