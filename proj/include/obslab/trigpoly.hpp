#pragma once

#include <vector>

#include "obslab/rng.hpp"

// Sine polynomials f(x) = sum_j c_j sin(j x) carry exactly computable
// analyticity constants: |f^(n)| <= (sum |c_j|) jmax^n <= M rho^{-n} n!
// with M = sum |c_j| and rho = 1/jmax.  They are the randomized family
// behind the smallness and chain-bound verification sweeps.

namespace obslab {

struct TrigPoly {
    std::vector<double> c; // c[j] multiplies sin((j+1) x)

    double deriv(double x, int order) const;
    double operator()(double x) const { return deriv(x, 0); }

    double cert_M() const;   // sum |c_j|
    double cert_rho() const; // 1 / (largest active frequency)

    // Dense-grid sup of |f^(order)| over [lo, hi].
    double sup_deriv(double lo, double hi, int order, std::size_t n = 4096) const;

    static TrigPoly random(Rng& rng, std::size_t max_modes, double scale = 1.0);
};

} // namespace obslab
