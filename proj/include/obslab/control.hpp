#pragma once

#include <memory>
#include <string>
#include <vector>

#include "obslab/observability.hpp"
#include "obslab/sets.hpp"
#include "obslab/spectral.hpp"

// Null-control synthesis by duality.  The dual functional over adjoint
// final data phi_T,
//
//   J(phi_T) = 1/2 (int_D |phi|)^2 - <u0, phi(0)>,
//
// with phi(t) = e^{-(T-t)A} phi_T, is minimized over the truncated class;
// the control  f = -lambda sgn(phi*) chi_D,  lambda = int_D |phi*|,
// steers u to zero at T.  The self-adjoint pure powers run the adjoint as
// the same semigroup backward; the coupled system uses the transposed
// Galerkin generator.

namespace obslab::control {

struct ControlResult {
    // control samples on D's quadrature points
    std::vector<double> x, t, f;
    double level = 0.0;     // lambda: the bound |f| <= lambda holds exactly
    double residual = 0.0;  // ||u(T)|| / ||u0||
    std::size_t iterations = 0;
    double bangbang_fraction = 0.0;
    double dual_integral = 0.0; // int_D |phi*| with the exact |.|
    // <u0, phi*(0)>; first-order optimality makes this equal level^2.
    double dual_pairing = 0.0;
    std::vector<double> adjoint_data; // phi_T at the minimizer

    std::string summary_json() const;
    std::string control_csv() const; // "x, t, f" rows
};

struct HumOptions {
    std::size_t max_iters = 20000;
    double smoothing = 1e-8;
    double stall_rel = 1e-10;
    std::size_t stall_window = 50;
    std::size_t polish_iters = 40;
    bool strict = true; // throw when the residual misses tol
    observability::QuadOptions quad;
};

ControlResult hum_control(std::shared_ptr<const spectral::EigenBasis> basis,
                          const sets::SpaceTimeSet& d, double horizon,
                          const std::vector<double>& u0, double tol,
                          const HumOptions& opts = {});

struct TimeOptimalResult {
    double bound = 0.0; // M
    double lo = 0.0;    // not certified controllable at lo
    double hi = 0.0;    // controllable with |f| <= M at hi
    double bangbang_fraction = 0.0;

    std::string summary_json() const;
};

struct TimeOptimalOptions {
    double horizon_cap = 10.0;
    double control_tol = 1e-4; // residual target per trial
    HumOptions hum;
};

// Bisection on the horizon: a trial T is feasible iff the minimal-level
// control satisfies lambda(T) <= M; the bracket is narrowed to relative
// width tol.
TimeOptimalResult time_optimal(std::shared_ptr<const spectral::EigenBasis> basis,
                               const sets::IntervalSet& omega, double bound,
                               const std::vector<double>& u0, double tol,
                               const TimeOptimalOptions& opts = {});

// Empirical constant for observing only the first component of the
// coupled pair: minimize int_D |u| over ||(u,v)(T)||_{L2 x L2} = 1.
observability::ObservabilityCert coupled_single_observation(
    std::shared_ptr<const spectral::EigenBasis> basis,
    const sets::SpaceTimeSet& d, double horizon,
    const observability::QuadOptions& qopts = {},
    const observability::EmpiricalOptions& opts = {});

// Soundness sweep of a coupled certificate on fresh random states.
observability::SweepReport validate_coupled(
    const observability::ObservabilityCert& cert,
    std::shared_ptr<const spectral::EigenBasis> basis,
    const sets::SpaceTimeSet& d, std::size_t states, std::uint64_t seed,
    const observability::QuadOptions& qopts = {});

} // namespace obslab::control
