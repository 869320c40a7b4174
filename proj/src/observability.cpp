#include "obslab/observability.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <stdexcept>

#include "obslab/kernels.hpp"

namespace obslab::observability {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double sigma_of(int m) { return 1.0 / (2.0 * m - 1.0); }

// log ||u(t)|| for a pure-power state with initial coefficients a,
// stable against underflow of the fastest modes.
double log_norm_at(const spectral::EigenBasis& basis,
                   const std::vector<double>& a, double t) {
    double lmin = basis.eigvals().front();
    double s = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        double e = std::exp(-2.0 * t * (basis.eigvals()[j] - lmin));
        s += a[j] * a[j] * e;
    }
    if (s <= 0.0) return -kInf;
    return -t * lmin + 0.5 * std::log(s);
}

void decay_coeffs(const spectral::EigenBasis& basis, const std::vector<double>& a,
                  double t, std::vector<double>& out) {
    out.resize(a.size());
    for (std::size_t j = 0; j < a.size(); ++j)
        out[j] = a[j] * std::exp(-t * basis.eigvals()[j]);
}

} // namespace

double SpaceTimeQuad::measure() const {
    double m = 0.0;
    for (const auto& tn : tnodes) m += tn.wt * slices[tn.slice].measure;
    return m;
}

SpaceTimeQuad build_quadrature(std::shared_ptr<const spectral::EigenBasis> basis,
                               const sets::SpaceTimeSet& d,
                               const QuadOptions& opts) {
    SpaceTimeQuad q;
    q.basis = basis;
    const std::size_t k = basis->size();
    auto add_slice = [&](const sets::IntervalSet& omega) {
        SpaceTimeQuad::Slice s;
        auto grid = quadrature::composite(omega, opts.x_nodes_per_part);
        s.nodes = std::move(grid.nodes);
        s.weights = std::move(grid.weights);
        s.table = basis->tabulate(s.nodes, 0);
        s.measure = omega.measure();
        q.slices.push_back(std::move(s));
        return q.slices.size() - 1;
    };

    if (d.is_product()) {
        std::size_t slice = add_slice(d.product().omega);
        auto tg = quadrature::composite(d.product().times, opts.t_nodes_per_part);
        for (std::size_t i = 0; i < tg.size(); ++i)
            q.tnodes.push_back({tg.nodes[i], tg.weights[i], slice});
        (void)k;
        return q;
    }

    const auto& g = d.grid();
    double dt = g.horizon / g.nt;
    std::map<std::vector<bool>, std::size_t> seen;
    for (std::size_t it = 0; it < g.nt; ++it) {
        std::vector<bool> col(g.nx);
        bool any = false;
        for (std::size_t ix = 0; ix < g.nx; ++ix) {
            col[ix] = g.cell(ix, it);
            any = any || col[ix];
        }
        if (!any) continue;
        auto found = seen.find(col);
        std::size_t slice;
        if (found == seen.end()) {
            double dx = g.domain_length / g.nx;
            std::vector<sets::Interval> parts;
            for (std::size_t ix = 0; ix < g.nx; ++ix)
                if (col[ix]) parts.emplace_back(ix * dx, (ix + 1) * dx);
            slice = add_slice(sets::IntervalSet::from_parts(std::move(parts)));
            seen.emplace(std::move(col), slice);
        } else {
            slice = found->second;
        }
        // midpoint rule on cell_t_sub sub-intervals of the time cell
        double sub = dt / opts.cell_t_sub;
        for (std::size_t s = 0; s < opts.cell_t_sub; ++s)
            q.tnodes.push_back({it * dt + (s + 0.5) * sub, sub, slice});
    }
    if (q.tnodes.empty()) throw std::invalid_argument("empty observation set");
    return q;
}

double integrate_abs(const SpaceTimeQuad& quad, const std::vector<double>& a) {
    const auto& basis = *quad.basis;
    const std::size_t k = basis.size();
    std::vector<double> coef(k);
    std::vector<double> values;
    double acc = 0.0;
    for (const auto& tn : quad.tnodes) {
        const auto& sl = quad.slices[tn.slice];
        decay_coeffs(basis, a, tn.t, coef);
        values.resize(sl.nodes.size());
        kernels::gemv_t(sl.table.data(), k, sl.nodes.size(), coef.data(),
                        values.data());
        acc += tn.wt * kernels::weighted_abs_sum(sl.weights.data(), values.data(),
                                                 values.size());
    }
    return acc;
}

namespace {

struct StepSample {
    double log_lhs;   // log ||u(L)||
    double log_y;     // log ||u(L)||_{L1(D_t)}, one entry per slice
    double elapsed;
};

// Worst-margin predicate for the step inequality at (n, theta).
bool step_holds(const std::vector<StepSample>& samples, double n, double theta,
                double sigma) {
    double logn = std::log(n);
    for (const auto& s : samples) {
        double rhs = logn + theta * s.log_y +
                     (1.0 - theta) * (logn + n / std::pow(s.elapsed, sigma));
        if (s.log_lhs > rhs) return false;
    }
    return true;
}

double bisect_step_n(const std::vector<StepSample>& samples, double theta,
                     double sigma) {
    double lo = 1e-6, hi = 1e9;
    if (!step_holds(samples, hi, theta, sigma)) return kInf;
    if (step_holds(samples, lo, theta, sigma)) return lo;
    for (int i = 0; i < 200; ++i) {
        double mid = std::sqrt(lo * hi);
        if (step_holds(samples, mid, theta, sigma)) hi = mid;
        else lo = mid;
        if (hi / lo < 1.0 + 1e-9) break;
    }
    return hi;
}

// theta-ranking score: log N_obs with |E| scaled out (the |E| powers are a
// common factor across rows, so the ranking does not depend on E).
double telescoping_score(double n, double theta, int m) {
    double sigma = sigma_of(m);
    double one_minus_q = 1.0 - std::pow((n + 1.0 - theta) / (n + 1.0), 2 * m - 1);
    return std::log(n) + (n + 1.0 - theta) * std::pow(one_minus_q, -sigma);
}

std::vector<StepSample> collect_step_samples(
    const spectral::EigenBasis& basis, const SpaceTimeQuad& quad,
    double horizon, const InterpOptions& opts, Rng& rng, std::size_t count) {
    const std::size_t k = basis.size();
    std::vector<StepSample> samples;
    std::vector<double> coef(k), values;
    std::vector<double> elapsed;
    for (std::size_t i = 0; i < opts.elapsed_count; ++i) {
        double f = double(i) / (opts.elapsed_count - 1);
        elapsed.push_back(horizon *
                          std::pow(opts.elapsed_min_rel, 1.0 - f));
    }
    for (std::size_t s = 0; s < count; ++s) {
        auto a = rng.unit_vector(k);
        for (double len : elapsed) {
            double log_lhs = log_norm_at(basis, a, len);
            if (log_lhs == -kInf) continue;
            decay_coeffs(basis, a, len, coef);
            for (const auto& sl : quad.slices) {
                values.resize(sl.nodes.size());
                kernels::gemv_t(sl.table.data(), k, sl.nodes.size(), coef.data(),
                                values.data());
                double y = kernels::weighted_abs_sum(sl.weights.data(),
                                                     values.data(), values.size());
                if (y <= 0.0) continue;
                samples.push_back({log_lhs, std::log(y), len});
            }
        }
    }
    return samples;
}

} // namespace

InterpStepFit interp_step(std::shared_ptr<const spectral::EigenBasis> basis,
                          const sets::SpaceTimeSet& d, double horizon,
                          const InterpOptions& opts) {
    if (d.measure() <= 0.0) throw std::invalid_argument("empty observation set");
    const int m = basis->order_m();
    const double sigma = sigma_of(m);
    SpaceTimeQuad quad = build_quadrature(basis, d);
    Rng rng(opts.seed);
    auto train = collect_step_samples(*basis, quad, horizon, opts, rng,
                                      opts.train_states);
    if (train.empty())
        throw std::runtime_error("interpolation step not certified: no samples");

    InterpStepFit fit;
    for (int i = 1; i <= 20; ++i) {
        double theta = 0.05 * i;
        double n = bisect_step_n(train, theta, sigma);
        if (n == kInf) continue;
        fit.table.push_back({n * opts.safety, theta, m});
    }
    if (fit.table.empty())
        throw std::runtime_error("interpolation step not certified: no admissible N");

    double best = kInf;
    for (const auto& row : fit.table) {
        double score = telescoping_score(row.N, row.theta, m);
        if (score < best) {
            best = score;
            fit.selected = row;
        }
    }

    // Fresh validation sample for the selected pair.
    auto fresh = collect_step_samples(*basis, quad, horizon, opts, rng,
                                      opts.validate_states);
    for (std::size_t i = 0; i < fresh.size(); ++i) {
        const auto& s = fresh[i];
        double logn = std::log(fit.selected.N);
        double rhs = logn + fit.selected.theta * s.log_y +
                     (1.0 - fit.selected.theta) *
                         (logn + fit.selected.N / std::pow(s.elapsed, sigma));
        if (s.log_lhs > rhs)
            throw std::runtime_error(
                "interpolation step not certified: validation violation at "
                "sample " + std::to_string(i));
    }
    return fit;
}

ObservabilityCert telescoping_certify(const InterpStep& step,
                                      const sets::IntervalSet& e_good, int m,
                                      double horizon,
                                      const sets::SpaceTimeSet& d,
                                      std::size_t k) {
    if (e_good.measure() <= 0.0)
        throw std::invalid_argument("empty observation set");
    const double sigma = sigma_of(m);
    const double theta = step.theta;
    const double n = step.N;

    double q_forced = std::pow((n + 1.0 - theta) / (n + 1.0), 2 * m - 1);
    bool floored = !(q_forced <= 1.0 - 1e-9);
    double q = floored ? 1.0 - 1e-9 : q_forced;

    auto seq = sets::telescope(e_good, q, horizon);
    // When the forced ratio is unrepresentably close to 1 the truncation
    // rule collapses the chain to its first window, which certifies on its
    // own (the dropped remainder carries weight e^{-theta/s_1^sigma}).
    std::size_t steps = floored ? 1 : seq.steps();
    double s1 = seq.points[0] - seq.points[1];

    ObservabilityCert cert;
    cert.method = Method::telescoping;
    cert.m = m;
    cert.k = k;
    cert.horizon = horizon;
    cert.set_descriptor = d.describe();
    cert.step_n = step.N;
    cert.theta = theta;
    cert.q = q;
    cert.l = seq.l;
    cert.l1 = seq.points[0];
    cert.l1_minus_l2 = s1;
    cert.truncation = steps;
    cert.log_n_obs = std::log(n) + (n + 1.0 - theta) / std::pow(s1, sigma);
    cert.n_obs = std::exp(cert.log_n_obs);
    return cert;
}

namespace {

struct Objective {
    const SpaceTimeQuad* quad;
    double horizon;
    double eps;

    // f(a) = int_D |u_a| smoothed; grad filled if non-null.
    double eval(const std::vector<double>& a, std::vector<double>* grad) const {
        const auto& basis = *quad->basis;
        const std::size_t k = basis.size();
        std::vector<double> coef(k), values, srow, gpart(k);
        if (grad) grad->assign(k, 0.0);
        double acc = 0.0;
        for (const auto& tn : quad->tnodes) {
            const auto& sl = quad->slices[tn.slice];
            decay_coeffs(basis, a, tn.t, coef);
            values.resize(sl.nodes.size());
            kernels::gemv_t(sl.table.data(), k, sl.nodes.size(), coef.data(),
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
                          gpart.data());
            for (std::size_t j = 0; j < k; ++j)
                (*grad)[j] += tn.wt * gpart[j] * std::exp(-tn.t * basis.eigvals()[j]);
        }
        return acc;
    }

    // ||u_a(T)||, computed with the dominant decay factored out.
    double target_norm(const std::vector<double>& a) const {
        const auto& basis = *quad->basis;
        double lmin = basis.eigvals().front();
        double s = 0.0;
        for (std::size_t j = 0; j < a.size(); ++j) {
            double e = std::exp(-2.0 * horizon * (basis.eigvals()[j] - lmin));
            s += a[j] * a[j] * e;
        }
        return std::exp(-horizon * lmin) * std::sqrt(s);
    }

    void project(std::vector<double>& a) const {
        const auto& basis = *quad->basis;
        double lmin = basis.eigvals().front();
        double s = 0.0;
        for (std::size_t j = 0; j < a.size(); ++j) {
            double e = std::exp(-2.0 * horizon * (basis.eigvals()[j] - lmin));
            s += a[j] * a[j] * e;
        }
        if (s <= 0.0) throw std::runtime_error("projection of the zero state");
        // a <- a / (e^{-T lmin} sqrt(s)) without forming the underflowing factor
        double logscale = -horizon * lmin + 0.5 * std::log(s);
        double inv = std::exp(-logscale);
        if (!std::isfinite(inv))
            throw std::runtime_error("projection scale out of range");
        for (auto& v : a) v *= inv;
    }
};

} // namespace

ObservabilityCert empirical_constant(
    std::shared_ptr<const spectral::EigenBasis> basis,
    const sets::SpaceTimeSet& d, double horizon, const QuadOptions& qopts,
    const EmpiricalOptions& opts) {
    if (basis->coupled())
        throw std::invalid_argument("empirical_constant expects a pure-power basis");
    SpaceTimeQuad quad = build_quadrature(basis, d, qopts);
    Objective obj{&quad, horizon, opts.smoothing};
    const std::size_t k = basis->size();
    Rng rng(opts.seed);

    double best = kInf;
    double worst_converged = -kInf;
    std::size_t converged = 0;
    for (std::size_t r = 0; r < opts.restarts; ++r) {
        auto a = rng.unit_vector(k);
        // Orthant-diverse starts: restart bits choose the sign pattern.
        std::uint64_t bits = r * 0x9e3779b97f4a7c15ULL + 0x51ed2701;
        for (std::size_t j = 0; j < k; ++j)
            if ((bits >> (j % 48)) & 1) a[j] = -std::fabs(a[j]);
        obj.project(a);

        std::vector<double> grad, trial;
        double f = obj.eval(a, &grad);
        double eta = 0.1 * f / (1.0 + kernels::dot(grad.data(), grad.data(), k));
        double recent = f;
        std::size_t it = 0;
        bool stalled = false;
        for (; it < opts.max_iters; ++it) {
            trial = a;
            kernels::axpy(-eta, grad.data(), trial.data(), k);
            bool ok = true;
            try {
                obj.project(trial);
            } catch (const std::exception&) {
                ok = false;
            }
            double ft = ok ? obj.eval(trial, nullptr) : kInf;
            if (ft < f) {
                a.swap(trial);
                f = ft;
                obj.eval(a, &grad);
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
        throw std::runtime_error(
            "empirical constant estimation failed: no restart converged");

    ObservabilityCert cert;
    cert.method = Method::empirical;
    cert.m = basis->order_m();
    cert.k = k;
    cert.horizon = horizon;
    cert.set_descriptor = d.describe();
    cert.log_n_obs = -std::log(best);
    cert.n_obs = 1.0 / best;
    cert.restart_spread = (worst_converged - best) / best;
    return cert;
}

namespace {

struct WindowSample {
    double log_lhs; // log ||u(t2)||
    double log_obs; // log int_{E cap (t1,t2)} O(t) dt
    double log_t1norm;
    double window;
};

bool window_holds(const std::vector<WindowSample>& samples, double n,
                  double theta) {
    double logn = std::log(n);
    for (const auto& s : samples) {
        double rhs = theta * (logn + n / std::cbrt(s.window) + s.log_obs) +
                     (1.0 - theta) * s.log_t1norm;
        if (s.log_lhs > rhs) return false;
    }
    return true;
}

double bisect_window_n(const std::vector<WindowSample>& samples, double theta) {
    double lo = 1e-6, hi = 1e9;
    if (!window_holds(samples, hi, theta)) return kInf;
    if (window_holds(samples, lo, theta)) return lo;
    for (int i = 0; i < 200; ++i) {
        double mid = std::sqrt(lo * hi);
        if (window_holds(samples, mid, theta)) hi = mid;
        else lo = mid;
        if (hi / lo < 1.0 + 1e-9) break;
    }
    return hi;
}

double boundary_score(double n, double theta) {
    double one_minus_q = 1.0 - std::pow((n + 1.0 - theta) / (n + 1.0), 3);
    return std::log(n) + (n + 1.0 - theta) * std::pow(one_minus_q, -1.0 / 3.0);
}

// int over (E cap (t1,t2)) of |u'''(0,t)| + |u''(L,t)| for initial a.
double trace_observation(const spectral::EigenBasis& basis,
                         const std::vector<double>& a,
                         const std::vector<double>& t3,
                         const std::vector<double>& t2,
                         const sets::IntervalSet& window_set,
                         std::size_t nodes_per_part) {
    if (window_set.empty()) return 0.0;
    auto grid = quadrature::composite(window_set, nodes_per_part);
    std::vector<double> coef(a.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        decay_coeffs(basis, a, grid.nodes[i], coef);
        double v3 = kernels::dot(coef.data(), t3.data(), coef.size());
        double v2 = kernels::dot(coef.data(), t2.data(), coef.size());
        acc += grid.weights[i] * (std::fabs(v3) + std::fabs(v2));
    }
    return acc;
}

std::vector<WindowSample> collect_window_samples(
    const spectral::EigenBasis& basis, const sets::IntervalSet& e,
    double horizon, const std::vector<double>& t3, const std::vector<double>& t2,
    const BoundaryOptions& opts, Rng& rng, std::size_t states) {
    std::vector<std::pair<double, double>> windows;
    windows.emplace_back(e.lo(), e.hi());
    // Deterministic length ladder down to 1e-6 |E|: the worst-case window
    // constant peaks at short lengths, so coverage there cannot be left to
    // chance.
    double span = e.hi() - e.lo();
    for (int i = 0; i <= 18; ++i) {
        double len = span * std::pow(10.0, -i / 3.0);
        for (double t2w : {e.hi(), 0.5 * (e.lo() + e.hi()) + 0.5 * len,
                           rng.uniform(std::min(len, horizon), horizon)}) {
            double t1w = t2w - len;
            if (t1w < 0.0 || t2w > horizon) continue;
            if (e.measure_within(t1w, t2w) < len / 3.0) continue;
            windows.emplace_back(t1w, t2w);
        }
    }
    std::size_t attempts = 0;
    while (windows.size() < opts.window_count && attempts < 4000) {
        ++attempts;
        double len = horizon * std::pow(10.0, rng.uniform(-3.0, 0.0));
        double t2w = rng.uniform(std::min(len, horizon), horizon);
        double t1w = t2w - len;
        if (t1w < 0.0) continue;
        if (e.measure_within(t1w, t2w) < len / 3.0) continue;
        windows.emplace_back(t1w, t2w);
    }

    std::vector<WindowSample> samples;
    for (std::size_t s = 0; s < states; ++s) {
        auto a = rng.unit_vector(basis.size());
        for (const auto& [t1w, t2w] : windows) {
            double log_lhs = log_norm_at(basis, a, t2w);
            if (log_lhs == -kInf) continue;
            auto clipped = e.intersect(sets::Interval(t1w, t2w));
            double obs = trace_observation(basis, a, t3, t2, clipped,
                                           opts.t_nodes_per_part);
            if (obs <= 0.0) continue;
            samples.push_back({log_lhs, std::log(obs), log_norm_at(basis, a, t1w),
                               t2w - t1w});
        }
    }
    return samples;
}

} // namespace

ObservabilityCert boundary_certify(
    std::shared_ptr<const spectral::EigenBasis> basis,
    const sets::IntervalSet& e1, const sets::IntervalSet& e2, double horizon,
    const BoundaryOptions& opts) {
    if (basis->order_m() != 2)
        throw std::invalid_argument("boundary certificate requires the fourth-order flow");
    if (e1.measure() <= 0.0 || e2.measure() <= 0.0)
        throw std::invalid_argument("empty observation set");
    auto e = e1.intersect(e2);
    if (e.measure() <= 0.0)
        throw std::invalid_argument("endpoint time sets share no common window");

    const std::size_t k = basis->size();
    std::vector<double> t3(k), t2(k);
    for (std::size_t j = 0; j < k; ++j) {
        t3[j] = basis->mode_deriv(j, 0.0, 3);
        t2[j] = basis->mode_deriv(j, basis->length(), 2);
    }

    Rng rng(opts.seed);
    auto train = collect_window_samples(*basis, e, horizon, t3, t2, opts, rng,
                                        opts.train_states);
    if (train.empty())
        throw std::runtime_error("boundary certificate: no usable windows");

    double best_score = kInf;
    double n_sel = kInf, theta_sel = 0.0;
    for (int i = 1; i <= 20; ++i) {
        double theta = 0.05 * i;
        double n = bisect_window_n(train, theta);
        if (n == kInf) continue;
        n *= opts.safety;
        double score = boundary_score(n, theta);
        if (score < best_score) {
            best_score = score;
            n_sel = n;
            theta_sel = theta;
        }
    }
    if (n_sel == kInf)
        throw std::runtime_error("boundary certificate: step not certified");

    auto fresh = collect_window_samples(*basis, e, horizon, t3, t2, opts, rng,
                                        opts.train_states / 2);
    for (const auto& s : fresh) {
        double rhs = theta_sel * (std::log(n_sel) + n_sel / std::cbrt(s.window) +
                                  s.log_obs) +
                     (1.0 - theta_sel) * s.log_t1norm;
        if (s.log_lhs > rhs)
            throw std::runtime_error(
                "boundary certificate: validation violation");
    }

    double q_forced = std::pow((n_sel + 1.0 - theta_sel) / (n_sel + 1.0), 3);
    bool floored = !(q_forced <= 1.0 - 1e-9);
    double q = floored ? 1.0 - 1e-9 : q_forced;
    auto seq = sets::telescope(e, q, horizon);
    double s1 = seq.points[0] - seq.points[1];

    ObservabilityCert cert;
    cert.method = Method::boundary;
    cert.m = 2;
    cert.k = k;
    cert.horizon = horizon;
    cert.set_descriptor = "E1[" + e1.to_string() + "];E2[" + e2.to_string() + "]";
    cert.trace = "normal_laplacian(0)+laplacian(L)";
    cert.step_n = n_sel;
    cert.theta = theta_sel;
    cert.q = q;
    cert.l = seq.l;
    cert.l1 = seq.points[0];
    cert.l1_minus_l2 = s1;
    cert.truncation = floored ? 1 : seq.steps();
    cert.log_n_obs = std::log(n_sel) + (n_sel + 1.0 - theta_sel) / std::cbrt(s1);
    cert.n_obs = std::exp(cert.log_n_obs);
    return cert;
}

SweepReport validate_interior(const ObservabilityCert& cert,
                              std::shared_ptr<const spectral::EigenBasis> basis,
                              const sets::SpaceTimeSet& d, std::size_t states,
                              std::uint64_t seed, const QuadOptions& qopts) {
    SpaceTimeQuad quad = build_quadrature(basis, d, qopts);
    Rng rng(seed);
    SweepReport rep;
    rep.states = states;
    rep.min_log_margin = kInf;
    for (std::size_t s = 0; s < states; ++s) {
        auto a = rng.unit_vector(basis->size());
        double log_lhs = log_norm_at(*basis, a, cert.horizon);
        double obs = integrate_abs(quad, a);
        double log_rhs = cert.log_n_obs + std::log(obs);
        double margin = log_rhs - log_lhs; // +inf when lhs underflows
        rep.min_log_margin = std::min(rep.min_log_margin, margin);
        if (margin < 0.0) ++rep.violations;
    }
    return rep;
}

SweepReport validate_boundary(const ObservabilityCert& cert,
                              std::shared_ptr<const spectral::EigenBasis> basis,
                              const sets::IntervalSet& e1,
                              const sets::IntervalSet& e2, std::size_t states,
                              std::uint64_t seed, std::size_t t_nodes_per_part) {
    const std::size_t k = basis->size();
    std::vector<double> t3(k), t2(k), zero(k, 0.0);
    for (std::size_t j = 0; j < k; ++j) {
        t3[j] = basis->mode_deriv(j, 0.0, 3);
        t2[j] = basis->mode_deriv(j, basis->length(), 2);
    }
    Rng rng(seed);
    SweepReport rep;
    rep.states = states;
    rep.min_log_margin = kInf;
    for (std::size_t s = 0; s < states; ++s) {
        auto a = rng.unit_vector(k);
        double log_lhs = log_norm_at(*basis, a, cert.horizon);
        double obs = trace_observation(*basis, a, t3, zero, e1, t_nodes_per_part) +
                     trace_observation(*basis, a, zero, t2, e2, t_nodes_per_part);
        double log_rhs = cert.log_n_obs + std::log(obs);
        double margin = log_rhs - log_lhs;
        rep.min_log_margin = std::min(rep.min_log_margin, margin);
        if (margin < 0.0) ++rep.violations;
    }
    return rep;
}

std::string ObservabilityCert::csv_row(std::size_t violations) const {
    const char* name = method == Method::telescoping ? "telescoping"
                       : method == Method::empirical ? "empirical"
                                                     : "boundary";
    char buf[512];
    std::snprintf(buf, sizeof buf,
                  "%s, %d, %zu, %.17g, %s, %.17g, %.17g, %.17g, %.17g, %.17g, "
                  "%zu, %.17g",
                  name, m, k, horizon, set_descriptor.c_str(), step_n, theta, q,
                  l1_minus_l2, n_obs, violations, restart_spread);
    return buf;
}

} // namespace obslab::observability
