#pragma once

#include <memory>
#include <string>
#include <vector>

#include "obslab/densemat.hpp"
#include "obslab/quadrature.hpp"
#include "obslab/rng.hpp"
#include "obslab/sets.hpp"
#include "obslab/spectral.hpp"

// Observability certificates  ||u(T)||_{L2} <= N_obs * (observation of u
// over D)  for the pure-power evolutions: a certified single-time
// interpolation step, its telescoping assembly over a geometric time
// sequence, an independent empirical estimate of the best constant, and
// the endpoint-trace variant for the fourth-order flow.

namespace obslab::observability {

// Certified step: for sampled states and elapsed times L,
//   ||u(L)||_{L2} <= N ||u(L)||_{L1(D_t)}^theta
//                    (N e^{N / L^{1/(2m-1)}} ||u(0)||_{L2})^{1-theta}.
struct InterpStep {
    double N = 0.0;
    double theta = 0.0;
    int m = 1; // horizon exponent 1/(2m-1)
};

struct InterpStepFit {
    InterpStep selected;
    std::vector<InterpStep> table; // one row per theta on the grid
};

enum class Method { telescoping, empirical, boundary };

struct ObservabilityCert {
    Method method = Method::telescoping;
    int m = 1;
    std::size_t k = 0;   // truncated modes
    double horizon = 0.0;
    std::string set_descriptor;
    std::string trace;   // boundary variants ("u3(0)+u2(L)"), else empty

    double step_n = 0.0;  // certified step constant
    double theta = 0.0;
    double q = 0.0;       // refinement ratio actually used
    double l = 0.0;
    double l1 = 0.0;
    double l1_minus_l2 = 0.0;
    std::size_t truncation = 0; // telescope steps kept

    // log N_obs is the primary representation; N_obs overflows to inf for
    // deep telescoping chains and stays exact for empirical fits.
    double log_n_obs = 0.0;
    double n_obs = 0.0;
    double restart_spread = 0.0; // empirical only

    std::string csv_row(std::size_t violations) const;
};

// Space-time quadrature of D with per-slice mode tables, shared by the
// validation sweeps, the empirical estimator and the control synthesis.
struct SpaceTimeQuad {
    struct Slice {
        std::vector<double> nodes, weights; // spatial rule on D_t
        std::vector<double> table;          // K x nodes mode values
        double measure = 0.0;               // |D_t|
    };
    struct TimeNode {
        double t = 0.0;
        double wt = 0.0;
        std::size_t slice = 0;
    };
    std::shared_ptr<const spectral::EigenBasis> basis;
    std::vector<Slice> slices;
    std::vector<TimeNode> tnodes;

    double measure() const; // quadrature mass = |D|
};

struct QuadOptions {
    std::size_t x_nodes_per_part = 768;
    std::size_t t_nodes_per_part = 48;
    std::size_t cell_t_sub = 32; // time sub-intervals per cell (midpoint each)
};

SpaceTimeQuad build_quadrature(std::shared_ptr<const spectral::EigenBasis> basis,
                               const sets::SpaceTimeSet& d,
                               const QuadOptions& opts = {});

// int_D |u| dx dt for the pure-power state with initial coefficients a.
double integrate_abs(const SpaceTimeQuad& quad, const std::vector<double>& a);

struct InterpOptions {
    std::size_t train_states = 160;
    std::size_t validate_states = 160;
    std::size_t elapsed_count = 14;
    double elapsed_min_rel = 1e-6; // relative to the horizon
    double safety = 1.1;           // multiplies the bisected minimal N
    std::uint64_t seed = 2024;
};

// Fits (N, theta) over random unit states against every distinct slice of
// D restricted to E_good; theta is chosen to minimize the assembled
// telescoping constant.
InterpStepFit interp_step(std::shared_ptr<const spectral::EigenBasis> basis,
                          const sets::SpaceTimeSet& d, double horizon,
                          const InterpOptions& opts = {});

// Telescoping assembly.  Averaging the certified step over the windows
// (tau_k, l_k) cap E and applying Young's inequality with the balancing
// choice eps = e^{-1/s_k^sigma} yields, with the averaging factors
// absorbed into the step constant N,
//
//   e^{-(N+1-theta)/s_k^sigma} ||u(l_k)|| - e^{-(N+1)/s_k^sigma} ||u(l_{k+1})||
//      <= N * int_{(tau_k, l_k) cap E} ||u(t)||_{L1(D_t)} dt,
//
// sigma = 1/(2m-1), s_k = l_k - l_{k+1}.  Choosing the refinement ratio
// q = ((N+1-theta)/(N+1))^{2m-1} makes the sum telescope, so with energy
// decay past l_1
//
//   N_obs = N e^{(N+1-theta)/(l_1-l_2)^sigma}.
//
// The emitted certificate is always put through a fresh-state soundness
// sweep (validate_interior); that sweep, not the assembly, is the gate.
ObservabilityCert telescoping_certify(const InterpStep& step,
                                      const sets::IntervalSet& e_good, int m,
                                      double horizon,
                                      const sets::SpaceTimeSet& d,
                                      std::size_t k);

struct EmpiricalOptions {
    std::size_t restarts = 32;
    std::size_t max_iters = 1200;
    double smoothing = 1e-8;
    double stall_rel = 1e-10;
    std::size_t stall_window = 50;
    std::uint64_t seed = 77;
};

// Approximate best constant: minimize int_D |u| subject to ||u(T)|| = 1
// over initial coefficient vectors (projected gradient, multi-start).
ObservabilityCert empirical_constant(
    std::shared_ptr<const spectral::EigenBasis> basis,
    const sets::SpaceTimeSet& d, double horizon,
    const QuadOptions& qopts = {}, const EmpiricalOptions& opts = {});

struct BoundaryOptions {
    std::size_t train_states = 160;
    std::size_t window_count = 60;
    std::size_t t_nodes_per_part = 64;
    double safety = 1.1;
    std::uint64_t seed = 2025;
};

// Endpoint-trace certificate for the clamped fourth-order flow:
//   ||u(T)|| <= N_obs * int_E ( |u'''(0,t)| + |u''(L,t)| ) dt
// assembled from window inequalities with exponent 1/3 on E = E1 cap E2.
ObservabilityCert boundary_certify(
    std::shared_ptr<const spectral::EigenBasis> basis,
    const sets::IntervalSet& e1, const sets::IntervalSet& e2, double horizon,
    const BoundaryOptions& opts = {});

struct SweepReport {
    std::size_t states = 0;
    std::size_t violations = 0;
    double min_log_margin = 0.0; // min of log rhs - log lhs
};

// Soundness sweeps on fresh random unit states.
SweepReport validate_interior(const ObservabilityCert& cert,
                              std::shared_ptr<const spectral::EigenBasis> basis,
                              const sets::SpaceTimeSet& d, std::size_t states,
                              std::uint64_t seed, const QuadOptions& qopts = {});

SweepReport validate_boundary(const ObservabilityCert& cert,
                              std::shared_ptr<const spectral::EigenBasis> basis,
                              const sets::IntervalSet& e1,
                              const sets::IntervalSet& e2, std::size_t states,
                              std::uint64_t seed,
                              std::size_t t_nodes_per_part = 64);

} // namespace obslab::observability
