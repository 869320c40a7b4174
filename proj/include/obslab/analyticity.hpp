#pragma once

#include <vector>

#include "obslab/spectral.hpp"

// Quantitative analyticity certificates.  A SpaceTimeCert (rho, m) asserts
//
//   |d_x^alpha d_t^p u(x,t)| <= e^{1/(rho t^{1/(2m-1)})} rho^{-alpha-p}
//                               alpha! p! t^{-p} ||u_0||_{L2}
//
// over the sampled range; fit_rho finds the largest rho on a log grid that
// survives every sample, then re-verifies it in an independent pass.  The
// chain bounds interpolate a derivative sup-norm against the function's
// own sup-norm.

namespace obslab::analyticity {

struct AnalyticCert {
    double M = 0.0;
    double rho = 0.0; // |f^(a)| <= M a! rho^{-a}
};

struct SpaceTimeCert {
    double rho = 0.0;
    int m = 1;
    double norm_u0 = 0.0;
};

struct SampleGrids {
    std::vector<double> t_grid;
    int alpha_max = 8;
    int p_max = 4;
    // Every x_stride-th basis quadrature node is sampled.
    std::size_t x_stride = 1;
};

SampleGrids default_grids(double t_lo = 0.05, double t_hi = 1.0,
                          std::size_t t_count = 12, int alpha_max = 8,
                          int p_max = 4, std::size_t x_stride = 1);

struct VerifyReport {
    std::size_t samples = 0;
    std::size_t violations = 0;
    // min over samples of log(bound) - log(value); negative means violated.
    double worst_log_margin = 0.0;
};

SpaceTimeCert fit_rho(const spectral::SpectralState& state0,
                      const SampleGrids& grids);

VerifyReport verify_lemma3(const SpaceTimeCert& cert,
                           const spectral::SpectralState& state0,
                           const SampleGrids& grids);

// (8 M (j+1)! rho^{-j-1})^{1 - 1/2^j} * f_sup^{1/2^j}; hypothesis
// ||f^(n)|| <= M rho^{-n} n! on a unit interval with rho <= 1/2.
double chain_bound(double M, double rho, int j, double f_sup);

// N * 8 (k+1)! (rho L)^{-(k+1)} * M^{1-theta/2^k} * E_avg^{theta/2^k}:
// the rescaled chain combined with propagation of smallness over a set of
// relative density |E|/L inside an interval of length L.
double chain_bound_scaled(double M, double rho, double L, double E_avg,
                          int k, double N, double theta);

// Multi-index version: (8 M rho^{-|a|-1} prod (a_i+1)!)^{1-1/2^{|a|}}
// * f_sup^{1/2^{|a|}}.
double multi_chain_bound(double M, double rho, const std::vector<int>& alpha,
                         double f_sup);

// Balancing value used inside the chain induction at step k; the chain is
// valid while this stays <= 1/2.
double chain_epsilon(double M, double rho, int k, double deriv_km1_sup);

} // namespace obslab::analyticity
