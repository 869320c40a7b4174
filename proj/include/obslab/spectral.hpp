#pragma once

#include <functional>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "obslab/densemat.hpp"
#include "obslab/quadrature.hpp"

// Eigenbases of (-d^2/dx^2)^m on (0, length) -- Dirichlet sines for m = 1,
// clamped beam modes for m = 2 -- and a sine-Galerkin realization of the
// coupled 2x2 second-order system.  Solutions are coefficient vectors
// against an orthonormal basis, evolved by the exact semigroup (diagonal
// for the pure powers, matrix exponential for the coupled generator).

namespace obslab::spectral {

struct PurePowerSpec {
    int m = 1;          // operator order is 2m, m in {1,2}
    double length = 0.0;
};

struct Coefficient {
    std::function<double(double)> fn;
    std::string text; // for manifests / set descriptors

    static Coefficient constant(double v);
    static Coefficient poly(std::vector<double> coef); // c0 + c1 x + ...
    double operator()(double x) const { return fn(x); }
};

struct Coupled2Spec {
    double length = 0.0;
    Coefficient a, b, c, d;
    std::size_t truncation = 0; // default per-component K
};

using EvolutionSpec = std::variant<PurePowerSpec, Coupled2Spec>;

class EigenBasis {
public:
    static constexpr int kMaxDerivative = 16;

    const EvolutionSpec& spec() const { return spec_; }
    bool coupled() const { return std::holds_alternative<Coupled2Spec>(spec_); }
    int order_m() const { return m_; }
    double length() const { return length_; }
    std::size_t size() const { return freqs_.size(); }           // modes K
    std::size_t coeff_dim() const { return coupled() ? 2 * size() : size(); }

    const std::vector<double>& freqs() const { return freqs_; }
    const std::vector<double>& eigvals() const { return eigvals_; }
    const quadrature::Grid& grid() const { return grid_; }

    // alpha-th spatial derivative of mode j at x.
    double mode_deriv(std::size_t j, double x, int alpha) const;

    // Row-major K x nodes.size() table of mode_deriv(j, nodes[i], alpha).
    std::vector<double> tabulate(const std::vector<double>& nodes, int alpha) const;

    // Cached alpha = 0 table on the basis quadrature grid.
    const std::vector<double>& value_table() const { return value_table_; }

    // Coupled generator G with d/dt c = -G c, and its transpose.
    const densemat::Mat& generator() const;
    const densemat::Mat& generator_transposed() const;

    friend EigenBasis build_basis(const EvolutionSpec& spec, std::size_t k,
                                  std::size_t quad_nodes);

private:
    EvolutionSpec spec_;
    int m_ = 1;
    double length_ = 0.0;
    std::vector<double> freqs_;   // w_j ascending
    std::vector<double> eigvals_; // w_j^{2m}
    quadrature::Grid grid_;
    std::vector<double> value_table_;

    // m = 2 stable mode parameters: e_j ~ c1 e^{wx} + c2 e^{-wx} - cos(wx)
    // + sigma sin(wx), scaled by inv_norm.
    struct BeamMode {
        double sigma, c1, c2, inv_norm;
    };
    std::vector<BeamMode> beam_;

    densemat::Mat gen_, gen_t_; // coupled only
};

EigenBasis build_basis(const EvolutionSpec& spec, std::size_t k,
                       std::size_t quad_nodes = 4096);

struct SpectralState {
    std::shared_ptr<const EigenBasis> basis;
    std::vector<double> coeffs; // K, or 2K stacked (u-block then v-block)
    double time = 0.0;

    double l2_norm() const; // sqrt(sum a_j^2): the L2 norm of the field(s)
};

SpectralState make_state(std::shared_ptr<const EigenBasis> basis,
                         std::vector<double> coeffs, double time = 0.0);

SpectralState evolve(const SpectralState& state, double dt);

// sum_j a_j (-lambda_j)^p e_j^(alpha)(x); for the coupled system the time
// derivative applies (-G)^p to the stacked vector first and component
// selects the u-block (0) or v-block (1).
double eval_deriv(const SpectralState& state, double x, int alpha, int p,
                  int component = 0);

enum class Endpoint { left, right };
enum class TraceKind { normal, laplacian, normal_laplacian };

// 1-D boundary traces with outward normal nu = -1 at 0 and +1 at length:
// normal -> nu u', laplacian -> u'', normal_laplacian -> nu u'''.
double boundary_trace(const SpectralState& state, Endpoint e, TraceKind kind);

// "t, a_1, ..., a_K" (coupled: u-block then v-block).
std::string to_csv_line(const SpectralState& state);

} // namespace obslab::spectral
