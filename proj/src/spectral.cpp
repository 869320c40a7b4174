#include "obslab/spectral.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "obslab/kernels.hpp"

namespace obslab::spectral {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Clamped-beam characteristic function with both sides bounded:
// cos(z) cosh(z) = 1  <=>  cos(z) - sech(z) = 0.
double beam_char(double z) { return std::cos(z) - 1.0 / std::cosh(z); }

// j-th positive root of cos(z)cosh(z) = 1 (j >= 1), bracketed around
// (2j+1)pi/2 and bisected to machine width.
double beam_root(std::size_t j) {
    double center = (2.0 * j + 1.0) * kPi / 2.0;
    double lo = center - kPi / 4.0;
    double hi = center + kPi / 4.0;
    double flo = beam_char(lo);
    double fhi = beam_char(hi);
    if (flo * fhi > 0.0)
        throw std::runtime_error("clamped root bracketing failed at index " +
                                 std::to_string(j));
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        double fm = beam_char(mid);
        if (fm == 0.0) return mid;
        if (flo * fm < 0.0) {
            hi = mid;
        } else {
            lo = mid;
            flo = fm;
        }
        if (hi - lo < 1e-16 * center) break;
    }
    return 0.5 * (lo + hi);
}

} // namespace

Coefficient Coefficient::constant(double v) {
    Coefficient c;
    c.fn = [v](double) { return v; };
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    c.text = buf;
    return c;
}

Coefficient Coefficient::poly(std::vector<double> coef) {
    Coefficient c;
    c.text = "poly[";
    for (std::size_t i = 0; i < coef.size(); ++i) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", coef[i]);
        if (i) c.text += ',';
        c.text += buf;
    }
    c.text += ']';
    c.fn = [coef = std::move(coef)](double x) {
        double v = 0.0;
        for (std::size_t i = coef.size(); i-- > 0;) v = v * x + coef[i];
        return v;
    };
    return c;
}

double EigenBasis::mode_deriv(std::size_t j, double x, int alpha) const {
    if (alpha < 0 || alpha > kMaxDerivative)
        throw std::invalid_argument("derivative order unsupported");
    double w = freqs_[j];
    double wa = std::pow(w, alpha);
    if (m_ == 1) {
        // sqrt(2/L) sin(wx), shifted by alpha quarter-periods.
        double amp = std::sqrt(2.0 / length_);
        return amp * wa * std::sin(w * x + alpha * kPi / 2.0);
    }
    const BeamMode& bm = beam_[j];
    double phase = w * x + alpha * kPi / 2.0;
    double sign = (alpha % 2 == 0) ? 1.0 : -1.0;
    double v = bm.c1 * std::exp(w * x) + sign * bm.c2 * std::exp(-w * x) -
               std::cos(phase) + bm.sigma * std::sin(phase);
    return bm.inv_norm * wa * v;
}

std::vector<double> EigenBasis::tabulate(const std::vector<double>& nodes,
                                         int alpha) const {
    std::vector<double> table(size() * nodes.size());
    for (std::size_t j = 0; j < size(); ++j)
        for (std::size_t i = 0; i < nodes.size(); ++i)
            table[j * nodes.size() + i] = mode_deriv(j, nodes[i], alpha);
    return table;
}

const densemat::Mat& EigenBasis::generator() const {
    if (!coupled()) throw std::logic_error("generator: not a coupled basis");
    return gen_;
}

const densemat::Mat& EigenBasis::generator_transposed() const {
    if (!coupled()) throw std::logic_error("generator: not a coupled basis");
    return gen_t_;
}

EigenBasis build_basis(const EvolutionSpec& spec, std::size_t k,
                       std::size_t quad_nodes) {
    if (k == 0) throw std::invalid_argument("empty basis");
    EigenBasis b;
    b.spec_ = spec;

    double length = std::holds_alternative<PurePowerSpec>(spec)
                        ? std::get<PurePowerSpec>(spec).length
                        : std::get<Coupled2Spec>(spec).length;
    if (!(length > 0.0)) throw std::invalid_argument("length must be positive");
    b.length_ = length;
    b.grid_ = quadrature::composite(0.0, length, quad_nodes);

    int m = 1;
    if (std::holds_alternative<PurePowerSpec>(spec)) {
        m = std::get<PurePowerSpec>(spec).m;
        if (m != 1 && m != 2)
            throw std::invalid_argument("order m must be 1 or 2");
    }
    b.m_ = m;

    b.freqs_.resize(k);
    b.eigvals_.resize(k);
    if (m == 1) {
        for (std::size_t j = 0; j < k; ++j) {
            double w = (j + 1) * kPi / length;
            b.freqs_[j] = w;
            b.eigvals_[j] = w * w;
        }
    } else {
        b.beam_.resize(k);
        for (std::size_t j = 0; j < k; ++j) {
            double z = beam_root(j + 1);
            double w = z / length;
            b.freqs_[j] = w;
            b.eigvals_[j] = w * w * w * w;
            // sigma = (cosh z - cos z)/(sinh z - sin z) evaluated through
            // delta = sigma - 1 to dodge the large-z cancellation.
            double delta = (std::exp(-z) + std::sin(z) - std::cos(z)) /
                           (std::sinh(z) - std::sin(z));
            EigenBasis::BeamMode bm;
            bm.sigma = 1.0 + delta;
            bm.c1 = -0.5 * delta;
            bm.c2 = 1.0 + 0.5 * delta;
            bm.inv_norm = 1.0;
            b.beam_[j] = bm;
            // L2-normalize against the basis grid.
            double s = 0.0;
            for (std::size_t i = 0; i < b.grid_.size(); ++i) {
                double v = b.mode_deriv(j, b.grid_.nodes[i], 0);
                s += b.grid_.weights[i] * v * v;
            }
            b.beam_[j].inv_norm = 1.0 / std::sqrt(s);
        }
    }

    b.value_table_ = b.tabulate(b.grid_.nodes, 0);

    if (std::holds_alternative<Coupled2Spec>(spec)) {
        const auto& cs = std::get<Coupled2Spec>(spec);
        const auto& g = b.grid_;
        const std::size_t n = g.size();
        const std::vector<double>& tab = b.value_table_;
        auto project = [&](const Coefficient& c, densemat::Mat& out,
                           std::size_t row0, std::size_t col0) {
            // out[row0+i][col0+j] += <c e_j, e_i> by quadrature
            std::vector<double> cw(n);
            for (std::size_t q = 0; q < n; ++q)
                cw[q] = c(g.nodes[q]) * g.weights[q];
            for (std::size_t i = 0; i < k; ++i) {
                std::vector<double> ei(n);
                for (std::size_t q = 0; q < n; ++q)
                    ei[q] = tab[i * n + q] * cw[q];
                for (std::size_t j = 0; j < k; ++j)
                    out(row0 + i, col0 + j) +=
                        kernels::dot(ei.data(), tab.data() + j * n, n);
            }
        };
        densemat::Mat gen(2 * k);
        for (std::size_t j = 0; j < k; ++j) {
            gen(j, j) = b.eigvals_[j];
            gen(k + j, k + j) = b.eigvals_[j];
        }
        project(cs.a, gen, 0, 0);
        project(cs.b, gen, 0, k);
        project(cs.c, gen, k, 0);
        project(cs.d, gen, k, k);
        b.gen_ = gen;
        b.gen_t_ = densemat::transpose(gen);
    }
    return b;
}

double SpectralState::l2_norm() const {
    return std::sqrt(kernels::dot(coeffs.data(), coeffs.data(), coeffs.size()));
}

SpectralState make_state(std::shared_ptr<const EigenBasis> basis,
                         std::vector<double> coeffs, double time) {
    if (coeffs.size() != basis->coeff_dim())
        throw std::invalid_argument("state dimension does not match basis");
    SpectralState s;
    s.basis = std::move(basis);
    s.coeffs = std::move(coeffs);
    s.time = time;
    return s;
}

SpectralState evolve(const SpectralState& state, double dt) {
    if (dt < 0.0) throw std::invalid_argument("backward evolution forbidden");
    SpectralState out = state;
    out.time += dt;
    if (dt == 0.0) return out;
    const EigenBasis& b = *state.basis;
    if (!b.coupled()) {
        for (std::size_t j = 0; j < b.size(); ++j)
            out.coeffs[j] *= std::exp(-dt * b.eigvals()[j]);
        return out;
    }
    densemat::Mat gen = b.generator();
    densemat::scale(gen, -dt);
    densemat::Mat prop = densemat::expm(gen);
    densemat::apply(prop, state.coeffs.data(), out.coeffs.data());
    return out;
}

double eval_deriv(const SpectralState& state, double x, int alpha, int p,
                  int component) {
    const EigenBasis& b = *state.basis;
    if (x < 0.0 || x > b.length())
        throw std::invalid_argument("evaluation point outside domain");
    if (alpha < 0 || alpha > EigenBasis::kMaxDerivative)
        throw std::invalid_argument("derivative order unsupported");
    if (p < 0) throw std::invalid_argument("negative time derivative order");
    if (p > 0 && !(state.time > 0.0))
        throw std::invalid_argument("time derivative requires positive time");

    if (!b.coupled()) {
        double s = 0.0;
        for (std::size_t j = 0; j < b.size(); ++j) {
            double factor = state.coeffs[j];
            for (int q = 0; q < p; ++q) factor *= -b.eigvals()[j];
            if (factor != 0.0) s += factor * b.mode_deriv(j, x, alpha);
        }
        return s;
    }

    std::vector<double> c = state.coeffs;
    std::vector<double> tmp(c.size());
    for (int q = 0; q < p; ++q) {
        densemat::apply(b.generator(), c.data(), tmp.data());
        for (auto& v : tmp) v = -v;
        c.swap(tmp);
    }
    std::size_t off = component == 0 ? 0 : b.size();
    double s = 0.0;
    for (std::size_t j = 0; j < b.size(); ++j)
        if (c[off + j] != 0.0) s += c[off + j] * b.mode_deriv(j, x, alpha);
    return s;
}

double boundary_trace(const SpectralState& state, Endpoint e, TraceKind kind) {
    const EigenBasis& b = *state.basis;
    double x = e == Endpoint::left ? 0.0 : b.length();
    double nu = e == Endpoint::left ? -1.0 : 1.0;
    switch (kind) {
        case TraceKind::normal: return nu * eval_deriv(state, x, 1, 0);
        case TraceKind::laplacian: return eval_deriv(state, x, 2, 0);
        case TraceKind::normal_laplacian: return nu * eval_deriv(state, x, 3, 0);
    }
    throw std::logic_error("unknown trace kind");
}

std::string to_csv_line(const SpectralState& state) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", state.time);
    std::string line = buf;
    for (double a : state.coeffs) {
        std::snprintf(buf, sizeof buf, "%.17g", a);
        line += ", ";
        line += buf;
    }
    return line;
}

} // namespace obslab::spectral
