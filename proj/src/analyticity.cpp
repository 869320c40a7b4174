#include "obslab/analyticity.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "obslab/kernels.hpp"

namespace obslab::analyticity {

namespace {

double log_factorial(int n) { return std::lgamma(n + 1.0); }

// log of the certificate bound at (t, alpha, p), without the norm factor.
double log_bound(double rho, double sigma, double t, int alpha, int p) {
    return 1.0 / (rho * std::pow(t, sigma)) - (alpha + p) * std::log(rho) +
           log_factorial(alpha) + log_factorial(p) - p * std::log(t);
}

struct SupTable {
    // log of sup_x |d_x^alpha d_t^p u(x,t)| per (t, alpha, p), -inf for 0.
    std::vector<double> log_sup;
    std::vector<double> t;
    std::vector<int> alpha;
    std::vector<int> p;
};

// One expensive pass over the sample grid; every candidate rho is then a
// cheap scan over these reduced sups.
SupTable collect_sups(const spectral::SpectralState& state0,
                      const SampleGrids& grids) {
    const auto& basis = *state0.basis;
    if (basis.coupled())
        throw std::invalid_argument("fit_rho expects a pure-power state");
    const auto& all_nodes = basis.grid().nodes;
    std::vector<double> nodes;
    for (std::size_t i = 0; i < all_nodes.size(); i += grids.x_stride)
        nodes.push_back(all_nodes[i]);

    const std::size_t k = basis.size();
    const std::size_t n = nodes.size();
    SupTable out;
    std::vector<double> coef(k), values(n);
    for (int alpha = 0; alpha <= grids.alpha_max; ++alpha) {
        std::vector<double> table = basis.tabulate(nodes, alpha);
        for (double t : grids.t_grid) {
            for (int p = 0; p <= grids.p_max; ++p) {
                for (std::size_t j = 0; j < k; ++j) {
                    double f = state0.coeffs[j] * std::exp(-t * basis.eigvals()[j]);
                    for (int q = 0; q < p; ++q) f *= -basis.eigvals()[j];
                    coef[j] = f;
                }
                kernels::gemv_t(table.data(), k, n, coef.data(), values.data());
                double sup = 0.0;
                for (double v : values) sup = std::max(sup, std::fabs(v));
                out.log_sup.push_back(sup > 0.0 ? std::log(sup)
                                                : -std::numeric_limits<double>::infinity());
                out.t.push_back(t);
                out.alpha.push_back(alpha);
                out.p.push_back(p);
            }
        }
    }
    return out;
}

bool rho_admissible(const SupTable& sups, double rho, double sigma,
                    double log_norm, double* worst_margin = nullptr) {
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < sups.log_sup.size(); ++i) {
        double margin = log_bound(rho, sigma, sups.t[i], sups.alpha[i], sups.p[i]) +
                        log_norm - sups.log_sup[i];
        worst = std::min(worst, margin);
        if (margin < 0.0 && worst_margin == nullptr) return false;
    }
    if (worst_margin) *worst_margin = worst;
    return worst >= 0.0;
}

} // namespace

SampleGrids default_grids(double t_lo, double t_hi, std::size_t t_count,
                          int alpha_max, int p_max, std::size_t x_stride) {
    SampleGrids g;
    g.alpha_max = alpha_max;
    g.p_max = p_max;
    g.x_stride = x_stride;
    double ratio = std::pow(t_hi / t_lo, 1.0 / double(t_count - 1));
    double t = t_lo;
    for (std::size_t i = 0; i < t_count; ++i, t *= ratio) g.t_grid.push_back(t);
    return g;
}

SpaceTimeCert fit_rho(const spectral::SpectralState& state0,
                      const SampleGrids& grids) {
    double norm = state0.l2_norm();
    if (!(norm > 0.0)) throw std::invalid_argument("fit_rho: zero state");
    for (double t : grids.t_grid)
        if (!(t > 0.0)) throw std::invalid_argument("fit_rho: t grid must be positive");

    const int m = state0.basis->order_m();
    const double sigma = 1.0 / (2.0 * m - 1.0);
    SupTable sups = collect_sups(state0, grids);
    double log_norm = std::log(norm);

    // Largest rho on a 60-per-decade log grid from 1 down to 1e-3.
    const double rho_min = 1e-3;
    for (int i = 0; i <= 180; ++i) {
        double rho = std::pow(10.0, -i / 60.0);
        if (rho < rho_min) break;
        if (rho_admissible(sups, rho, sigma, log_norm)) {
            SpaceTimeCert cert{rho, m, norm};
            // Independent recheck of the certificate actually returned.
            if (verify_lemma3(cert, state0, grids).violations != 0)
                throw std::runtime_error("analyticity fit failed");
            return cert;
        }
    }
    throw std::runtime_error("analyticity fit failed");
}

VerifyReport verify_lemma3(const SpaceTimeCert& cert,
                           const spectral::SpectralState& state0,
                           const SampleGrids& grids) {
    const double sigma = 1.0 / (2.0 * cert.m - 1.0);
    SupTable sups = collect_sups(state0, grids);
    VerifyReport rep;
    rep.samples = sups.log_sup.size();
    double log_norm = std::log(cert.norm_u0);
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < sups.log_sup.size(); ++i) {
        double margin =
            log_bound(cert.rho, sigma, sups.t[i], sups.alpha[i], sups.p[i]) +
            log_norm - sups.log_sup[i];
        worst = std::min(worst, margin);
        if (margin < 0.0) ++rep.violations;
    }
    rep.worst_log_margin = worst;
    return rep;
}

double chain_bound(double M, double rho, int j, double f_sup) {
    if (!(rho > 0.0) || rho > 0.5)
        throw std::invalid_argument("lemma hypothesis requires rho <= 1/2");
    if (!(M > 0.0)) throw std::invalid_argument("chain_bound: M must be positive");
    if (j < 0) throw std::invalid_argument("chain_bound: negative order");
    if (f_sup < 0.0) throw std::invalid_argument("chain_bound: negative sup");
    if (j == 0) return f_sup; // exponent on the constant is zero
    if (f_sup == 0.0) return 0.0;
    double inv2j = std::ldexp(1.0, -j); // 1/2^j
    double log_const =
        std::log(8.0 * M) + log_factorial(j + 1) - (j + 1) * std::log(rho);
    return std::exp((1.0 - inv2j) * log_const + inv2j * std::log(f_sup));
}

double chain_bound_scaled(double M, double rho, double L, double E_avg,
                          int k, double N, double theta) {
    if (!(rho > 0.0) || rho > 0.5)
        throw std::invalid_argument("lemma hypothesis requires rho <= 1/2");
    if (!(L > 0.0)) throw std::invalid_argument("chain_bound_scaled: L must be positive");
    if (!(theta > 0.0) || theta > 1.0)
        throw std::invalid_argument("chain_bound_scaled: theta must lie in (0,1]");
    double inv2k = std::ldexp(1.0, -k);
    double log_c = std::log(N) + std::log(8.0) + log_factorial(k + 1) -
                   (k + 1) * std::log(rho * L);
    return std::exp(log_c + (1.0 - theta * inv2k) * std::log(M) +
                    theta * inv2k * std::log(E_avg));
}

double multi_chain_bound(double M, double rho, const std::vector<int>& alpha,
                         double f_sup) {
    if (!(rho > 0.0) || rho > 0.5)
        throw std::invalid_argument("lemma hypothesis requires rho <= 1/2");
    int total = 0;
    double log_fact = 0.0;
    for (int a : alpha) {
        if (a < 0) throw std::invalid_argument("multi_chain_bound: negative index");
        total += a;
        log_fact += log_factorial(a + 1);
    }
    if (total == 0) return f_sup;
    double inv2 = std::ldexp(1.0, -total);
    double log_const =
        std::log(8.0 * M) - (total + 1) * std::log(rho) + log_fact;
    if (f_sup == 0.0) return 0.0;
    return std::exp((1.0 - inv2) * log_const + inv2 * std::log(f_sup));
}

double chain_epsilon(double M, double rho, int k, double deriv_km1_sup) {
    double denom = M * std::exp(log_factorial(k + 1)) * std::pow(rho, -k - 1);
    return std::sqrt(2.0 * deriv_km1_sup / denom);
}

} // namespace obslab::analyticity
