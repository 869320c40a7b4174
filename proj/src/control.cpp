#include "obslab/control.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "obslab/kernels.hpp"

namespace obslab::control {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

using observability::SpaceTimeQuad;

// Adjoint trajectory values phi(x_i, t_n) share the mode tables of the
// quadrature; coefficients at t are phi_T decayed over T - t.
struct DualProblem {
    const SpaceTimeQuad* quad;
    double horizon;
    double eps;
    std::vector<double> c;       // <u0, phi(0)> pairing: c_j = u0_j e^{-T lam_j}
    std::vector<double> precond; // diagonal metric 1 / int_D K_j^2

    const spectral::EigenBasis& basis() const { return *quad->basis; }

    void adjoint_coef(const std::vector<double>& phi_t, double t,
                      std::vector<double>& out) const {
        const auto& ev = basis().eigvals();
        out.resize(phi_t.size());
        for (std::size_t j = 0; j < phi_t.size(); ++j)
            out[j] = phi_t[j] * std::exp(-(horizon - t) * ev[j]);
    }

    // l1 = int_D |phi| (smoothed when eps > 0); grad_l1 optional.
    double l1_norm(const std::vector<double>& phi_t, double eps_used,
                   std::vector<double>* grad_l1) const {
        const std::size_t k = basis().size();
        std::vector<double> coef(k), values, srow, gpart(k);
        if (grad_l1) grad_l1->assign(k, 0.0);
        double acc = 0.0;
        for (const auto& tn : quad->tnodes) {
            const auto& sl = quad->slices[tn.slice];
            adjoint_coef(phi_t, tn.t, coef);
            values.resize(sl.nodes.size());
            kernels::gemv_t(sl.table.data(), k, sl.nodes.size(), coef.data(),
                            values.data());
            if (!grad_l1) {
                if (eps_used == 0.0) {
                    acc += tn.wt * kernels::weighted_abs_sum(
                                       sl.weights.data(), values.data(),
                                       values.size());
                } else {
                    double part = 0.0;
                    for (std::size_t i = 0; i < values.size(); ++i)
                        part += sl.weights[i] *
                                std::sqrt(values[i] * values[i] + eps_used * eps_used);
                    acc += tn.wt * part;
                }
                continue;
            }
            srow.resize(values.size());
            double part = 0.0;
            for (std::size_t i = 0; i < values.size(); ++i) {
                double smooth =
                    std::sqrt(values[i] * values[i] + eps_used * eps_used);
                part += sl.weights[i] * smooth;
                srow[i] = smooth > 0.0 ? sl.weights[i] * values[i] / smooth : 0.0;
            }
            acc += tn.wt * part;
            kernels::gemv(sl.table.data(), k, sl.nodes.size(), srow.data(),
                          gpart.data());
            const auto& ev = basis().eigvals();
            for (std::size_t j = 0; j < k; ++j)
                (*grad_l1)[j] += tn.wt * gpart[j] *
                                 std::exp(-(horizon - tn.t) * ev[j]);
        }
        return acc;
    }

    double value(const std::vector<double>& phi_t,
                 std::vector<double>* grad) const {
        std::vector<double> grad_l1;
        double l1 = l1_norm(phi_t, eps, grad ? &grad_l1 : nullptr);
        double pairing = kernels::dot(c.data(), phi_t.data(), phi_t.size());
        if (grad) {
            grad->resize(phi_t.size());
            for (std::size_t j = 0; j < phi_t.size(); ++j)
                (*grad)[j] = l1 * grad_l1[j] - c[j];
        }
        return 0.5 * l1 * l1 - pairing;
    }
};

} // namespace

ControlResult hum_control(std::shared_ptr<const spectral::EigenBasis> basis,
                          const sets::SpaceTimeSet& d, double horizon,
                          const std::vector<double>& u0, double tol,
                          const HumOptions& opts) {
    if (basis->coupled())
        throw std::invalid_argument("hum_control expects a pure-power basis");
    if (u0.size() != basis->size())
        throw std::invalid_argument("initial datum does not match basis");
    const std::size_t k = basis->size();

    double u0_norm = std::sqrt(kernels::dot(u0.data(), u0.data(), k));
    ControlResult result;
    if (u0_norm == 0.0) {
        // zero datum steers itself
        result.level = 0.0;
        result.residual = 0.0;
        result.bangbang_fraction = 0.0;
        return result;
    }

    SpaceTimeQuad quad = observability::build_quadrature(basis, d, opts.quad);
    DualProblem prob{&quad, horizon, opts.smoothing * u0_norm, {}, {}};
    prob.c.resize(k);
    for (std::size_t j = 0; j < k; ++j)
        prob.c[j] = u0[j] * std::exp(-horizon * basis->eigvals()[j]);

    // Diagonal preconditioner: the kernel mass int_D K_j^2 with
    // K_j = e^{-(T-t) lam_j} e_j(x) flattens the mode-dependent curvature.
    prob.precond.assign(k, 0.0);
    {
        std::vector<double> row(k);
        for (const auto& tn : quad.tnodes) {
            const auto& sl = quad.slices[tn.slice];
            for (std::size_t j = 0; j < k; ++j) {
                const double* tr = sl.table.data() + j * sl.nodes.size();
                double mass = 0.0;
                for (std::size_t i = 0; i < sl.nodes.size(); ++i)
                    mass += sl.weights[i] * tr[i] * tr[i];
                double decay = std::exp(-2.0 * (horizon - tn.t) * basis->eigvals()[j]);
                prob.precond[j] += tn.wt * mass * decay;
            }
        }
        for (auto& p : prob.precond) p = 1.0 / std::max(p, 1e-300);
    }

    // Preconditioned descent with an adaptive step and stall detection.
    std::vector<double> phi(k, 0.0), grad, trial, step_dir(k);
    double fval = prob.value(phi, &grad);
    double eta = 1.0;
    double recent = fval;
    std::size_t it = 0;
    for (; it < opts.max_iters; ++it) {
        for (std::size_t j = 0; j < k; ++j) step_dir[j] = prob.precond[j] * grad[j];
        trial = phi;
        kernels::axpy(-eta, step_dir.data(), trial.data(), k);
        double ft = prob.value(trial, nullptr);
        if (ft < fval) {
            phi.swap(trial);
            fval = ft;
            prob.value(phi, &grad);
            eta *= 1.3;
        } else {
            eta *= 0.5;
            if (eta < 1e-16) break;
        }
        if ((it + 1) % opts.stall_window == 0) {
            double scale = std::max({std::fabs(fval), std::fabs(recent), 1e-300});
            if ((recent - fval) <= opts.stall_rel * scale) break;
            recent = fval;
        }
    }
    // Subgradient polish with the exact sign and diminishing steps.
    {
        std::vector<double> grad_l1;
        double base = 1e-3;
        for (std::size_t p = 0; p < opts.polish_iters; ++p) {
            double l1 = prob.l1_norm(phi, 0.0, &grad_l1);
            std::vector<double> sub(k);
            for (std::size_t j = 0; j < k; ++j)
                sub[j] = prob.precond[j] * (l1 * grad_l1[j] - prob.c[j]);
            trial = phi;
            kernels::axpy(-base / (1.0 + p), sub.data(), trial.data(), k);
            double ft = prob.value(trial, nullptr);
            if (ft < fval) {
                phi.swap(trial);
                fval = ft;
            }
        }
    }

    // Assemble the control on the quadrature points.
    double lambda = prob.l1_norm(phi, 0.0, nullptr);
    result.level = lambda;
    result.adjoint_data = phi;
    result.iterations = it;

    std::vector<double> coef(k), values;
    std::vector<double> u_final(k);
    for (std::size_t j = 0; j < k; ++j)
        u_final[j] = u0[j] * std::exp(-horizon * basis->eigvals()[j]);
    double active_mass = 0.0, saturated_mass = 0.0;
    for (const auto& tn : quad.tnodes) {
        const auto& sl = quad.slices[tn.slice];
        prob.adjoint_coef(phi, tn.t, coef);
        values.resize(sl.nodes.size());
        kernels::gemv_t(sl.table.data(), k, sl.nodes.size(), coef.data(),
                        values.data());
        for (std::size_t i = 0; i < sl.nodes.size(); ++i) {
            double phi_val = values[i];
            double fx = phi_val > 0.0 ? -lambda : (phi_val < 0.0 ? lambda : 0.0);
            result.x.push_back(sl.nodes[i]);
            result.t.push_back(tn.t);
            result.f.push_back(fx);
            if (std::fabs(phi_val) > 1e-8) {
                double w = tn.wt * sl.weights[i];
                active_mass += w;
                if (std::fabs(fx) >= 0.99 * lambda) saturated_mass += w;
            }
            // forward contribution: u(T) += e^{-(T-t)A} chi_D f
            double wquad = tn.wt * sl.weights[i];
            for (std::size_t j = 0; j < k; ++j)
                u_final[j] += wquad * fx *
                              std::exp(-(horizon - tn.t) * basis->eigvals()[j]) *
                              sl.table[j * sl.nodes.size() + i];
        }
    }
    result.bangbang_fraction = active_mass > 0.0 ? saturated_mass / active_mass : 0.0;
    result.dual_integral = lambda;
    result.residual =
        std::sqrt(kernels::dot(u_final.data(), u_final.data(), k)) / u0_norm;
    if (result.residual > tol)
        throw std::runtime_error("HUM failed to converge; residual " +
                                 std::to_string(result.residual));
    return result;
}

std::string ControlResult::summary_json() const {
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "{\"level\": %.17g, \"residual\": %.17g, \"iterations\": %zu, "
                  "\"bangbang_fraction\": %.17g}",
                  level, residual, iterations, bangbang_fraction);
    return buf;
}

std::string ControlResult::control_csv() const {
    std::string out = "x, t, f\n";
    char buf[128];
    for (std::size_t i = 0; i < f.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g, %.17g, %.17g\n", x[i], t[i], f[i]);
        out += buf;
    }
    return out;
}

std::string TimeOptimalResult::summary_json() const {
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "{\"M\": %.17g, \"T_star_bracket\": [%.17g, %.17g], "
                  "\"bangbang_fraction\": %.17g}",
                  bound, lo, hi, bangbang_fraction);
    return buf;
}

namespace {

// Minimal control level for horizon t: the lambda of the norm-optimal
// control.  The residual tolerance is immaterial for feasibility; failures
// to converge surface as exceptions.
double minimal_level(std::shared_ptr<const spectral::EigenBasis> basis,
                     const sets::IntervalSet& omega, double horizon,
                     const std::vector<double>& u0, const TimeOptimalOptions& opts,
                     double* bangbang = nullptr) {
    sets::SpaceTimeSet d(
        sets::ProductSet{omega, sets::IntervalSet::single(0.0, horizon)});
    auto r = hum_control(basis, d, horizon, u0, opts.control_tol, opts.hum);
    if (bangbang) *bangbang = r.bangbang_fraction;
    return r.level;
}

} // namespace

TimeOptimalResult time_optimal(std::shared_ptr<const spectral::EigenBasis> basis,
                               const sets::IntervalSet& omega, double bound,
                               const std::vector<double>& u0, double tol,
                               const TimeOptimalOptions& opts) {
    if (!(bound > 0.0)) throw std::invalid_argument("bound must be positive");
    double norm = 0.0;
    for (double v : u0) norm += v * v;
    if (norm == 0.0) throw std::invalid_argument("time_optimal: zero datum");

    // Feasibility is monotone in the horizon; find a bracket.
    double hi = 1.0;
    while (minimal_level(basis, omega, hi, u0, opts) > bound) {
        hi *= 2.0;
        if (hi > opts.horizon_cap)
            throw std::runtime_error("horizon cap exceeded");
    }
    double lo = hi / 2.0;
    while (lo > 1e-8 && minimal_level(basis, omega, lo, u0, opts) <= bound)
        lo /= 2.0;

    while ((hi - lo) / hi > tol) {
        double mid = 0.5 * (lo + hi);
        if (minimal_level(basis, omega, mid, u0, opts) <= bound) hi = mid;
        else lo = mid;
    }
    TimeOptimalResult out;
    out.bound = bound;
    out.lo = lo;
    out.hi = hi;
    minimal_level(basis, omega, hi, u0, opts, &out.bangbang_fraction);
    return out;
}

namespace {

// Propagators of the coupled generator at the quadrature times and the
// horizon, plus transposes for the gradient pass.
struct CoupledCache {
    std::vector<densemat::Mat> prop;   // per tnode
    std::vector<densemat::Mat> prop_t; // transposed
    densemat::Mat at_horizon;
};

CoupledCache build_cache(const spectral::EigenBasis& basis,
                         const SpaceTimeQuad& quad, double horizon) {
    CoupledCache cache;
    const densemat::Mat& gen = basis.generator();
    for (const auto& tn : quad.tnodes) {
        densemat::Mat g = gen;
        densemat::scale(g, -tn.t);
        cache.prop.push_back(densemat::expm(g));
        cache.prop_t.push_back(densemat::transpose(cache.prop.back()));
    }
    densemat::Mat g = gen;
    densemat::scale(g, -horizon);
    cache.at_horizon = densemat::expm(g);
    return cache;
}

} // namespace

observability::ObservabilityCert coupled_single_observation(
    std::shared_ptr<const spectral::EigenBasis> basis,
    const sets::SpaceTimeSet& d, double horizon,
    const observability::QuadOptions& qopts,
    const observability::EmpiricalOptions& opts) {
    if (!basis->coupled())
        throw std::invalid_argument("coupled_single_observation expects a coupled basis");
    const auto& cs = std::get<spectral::Coupled2Spec>(basis->spec());
    bool b_alive = false;
    for (double xq : basis->grid().nodes)
        b_alive = b_alive || std::fabs(cs.b(xq)) > 1e-14;
    if (!b_alive) throw std::invalid_argument("coupling hypothesis violated");

    SpaceTimeQuad quad = observability::build_quadrature(basis, d, qopts);
    CoupledCache cache = build_cache(*basis, quad, horizon);
    const std::size_t k = basis->size();
    const std::size_t dim = 2 * k;

    auto target_norm = [&](const std::vector<double>& a) {
        std::vector<double> uT(dim);
        densemat::apply(cache.at_horizon, a.data(), uT.data());
        return std::sqrt(kernels::dot(uT.data(), uT.data(), dim));
    };
    auto project = [&](std::vector<double>& a) {
        double g = target_norm(a);
        if (!(g > 0.0) || !std::isfinite(1.0 / g))
            throw std::runtime_error("projection of a degenerate state");
        for (auto& v : a) v /= g;
    };
    const double eps = opts.smoothing;
    auto objective = [&](const std::vector<double>& a, std::vector<double>* grad) {
        std::vector<double> state(dim), values, srow, zu(k), full(dim, 0.0);
        if (grad) grad->assign(dim, 0.0);
        double acc = 0.0;
        for (std::size_t n = 0; n < quad.tnodes.size(); ++n) {
            const auto& tn = quad.tnodes[n];
            const auto& sl = quad.slices[tn.slice];
            densemat::apply(cache.prop[n], a.data(), state.data());
            values.resize(sl.nodes.size());
            kernels::gemv_t(sl.table.data(), k, sl.nodes.size(), state.data(),
                            values.data());
            double part = 0.0;
            if (!grad) {
                for (std::size_t i = 0; i < values.size(); ++i)
                    part += sl.weights[i] *
                            std::sqrt(values[i] * values[i] + eps * eps);
                acc += tn.wt * part;
                continue;
            }
            srow.resize(values.size());
            for (std::size_t i = 0; i < values.size(); ++i) {
                double smooth = std::sqrt(values[i] * values[i] + eps * eps);
                part += sl.weights[i] * smooth;
                srow[i] = sl.weights[i] * values[i] / smooth;
            }
            acc += tn.wt * part;
            kernels::gemv(sl.table.data(), k, sl.nodes.size(), srow.data(),
                          zu.data());
            std::fill(full.begin(), full.end(), 0.0);
            std::copy(zu.begin(), zu.end(), full.begin());
            std::vector<double> back(dim);
            densemat::apply(cache.prop_t[n], full.data(), back.data());
            kernels::axpy(tn.wt, back.data(), grad->data(), dim);
        }
        return acc;
    };

    Rng rng(opts.seed);
    double best = kInf, worst_converged = -kInf;
    std::size_t converged = 0;
    for (std::size_t r = 0; r < opts.restarts; ++r) {
        auto a = rng.unit_vector(dim);
        std::uint64_t bits = r * 0x9e3779b97f4a7c15ULL + 0x51ed2701;
        for (std::size_t j = 0; j < dim; ++j)
            if ((bits >> (j % 48)) & 1) a[j] = -std::fabs(a[j]);
        project(a);
        std::vector<double> grad, trial;
        double f = objective(a, &grad);
        double eta = 0.1 * f / (1.0 + kernels::dot(grad.data(), grad.data(), dim));
        double recent = f;
        std::size_t it = 0;
        bool stalled = false;
        for (; it < opts.max_iters; ++it) {
            trial = a;
            kernels::axpy(-eta, grad.data(), trial.data(), dim);
            bool ok = true;
            try {
                project(trial);
            } catch (const std::exception&) {
                ok = false;
            }
            double ft = ok ? objective(trial, nullptr) : kInf;
            if (ft < f) {
                a.swap(trial);
                f = ft;
                objective(a, &grad);
                eta *= 1.25;
            } else {
                eta *= 0.5;
                if (eta < 1e-18) break;
            }
            if ((it + 1) % opts.stall_window == 0) {
                if (recent - f <= opts.stall_rel * std::max(f, 1e-300)) {
                    stalled = true;
                    break;
                }
                recent = f;
            }
        }
        if (stalled || it < opts.max_iters) {
            ++converged;
            best = std::min(best, f);
            worst_converged = std::max(worst_converged, f);
        }
    }
    if (converged == 0)
        throw std::runtime_error("coupled estimation failed: no restart converged");

    observability::ObservabilityCert cert;
    cert.method = observability::Method::empirical;
    cert.m = 1;
    cert.k = dim;
    cert.horizon = horizon;
    cert.set_descriptor = d.describe() + ";coupled-u-only";
    cert.trace = "u-component";
    cert.log_n_obs = -std::log(best);
    cert.n_obs = 1.0 / best;
    cert.restart_spread = (worst_converged - best) / best;
    return cert;
}

observability::SweepReport validate_coupled(
    const observability::ObservabilityCert& cert,
    std::shared_ptr<const spectral::EigenBasis> basis,
    const sets::SpaceTimeSet& d, std::size_t states, std::uint64_t seed,
    const observability::QuadOptions& qopts) {
    SpaceTimeQuad quad = observability::build_quadrature(basis, d, qopts);
    CoupledCache cache = build_cache(*basis, quad, cert.horizon);
    const std::size_t k = basis->size();
    const std::size_t dim = 2 * k;
    Rng rng(seed);
    observability::SweepReport rep;
    rep.states = states;
    rep.min_log_margin = kInf;
    std::vector<double> state(dim), values, uT(dim);
    for (std::size_t s = 0; s < states; ++s) {
        auto a = rng.unit_vector(dim);
        double obs = 0.0;
        for (std::size_t n = 0; n < quad.tnodes.size(); ++n) {
            const auto& tn = quad.tnodes[n];
            const auto& sl = quad.slices[tn.slice];
            densemat::apply(cache.prop[n], a.data(), state.data());
            values.resize(sl.nodes.size());
            kernels::gemv_t(sl.table.data(), k, sl.nodes.size(), state.data(),
                            values.data());
            obs += tn.wt * kernels::weighted_abs_sum(sl.weights.data(),
                                                     values.data(), values.size());
        }
        densemat::apply(cache.at_horizon, a.data(), uT.data());
        double lhs = std::sqrt(kernels::dot(uT.data(), uT.data(), dim));
        double margin = cert.log_n_obs + std::log(obs) -
                        std::log(std::max(lhs, 1e-300));
        rep.min_log_margin = std::min(rep.min_log_margin, margin);
        if (margin < 0.0) ++rep.violations;
    }
    return rep;
}

} // namespace obslab::control
