#include <doctest.h>

#include <cmath>
#include <memory>
#include <vector>

#include "obslab/rng.hpp"
#include "obslab/spectral.hpp"

using namespace obslab;
using namespace obslab::spectral;

namespace {

constexpr double kPi = 3.14159265358979323846;

std::shared_ptr<const EigenBasis> sine_basis(std::size_t k, double length = kPi) {
    return std::make_shared<EigenBasis>(
        build_basis(PurePowerSpec{1, length}, k));
}

std::shared_ptr<const EigenBasis> beam_basis(std::size_t k, double length = 1.0) {
    return std::make_shared<EigenBasis>(
        build_basis(PurePowerSpec{2, length}, k));
}

// Oracle used to pin the first clamped frequency: plain bisection on
// cos(w)cosh(w) - 1 over (3pi/2, 5pi/2), written independently of the
// library's stabilized root solve.
double clamped_w1_oracle() {
    auto f = [](double w) { return std::cos(w) * std::cosh(w) - 1.0; };
    double lo = 1.5 * kPi, hi = 2.5 * kPi;
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        if (f(lo) * f(mid) <= 0.0) hi = mid;
        else lo = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace

TEST_CASE("sine basis has the closed-form frequencies and modes") {
    auto b = sine_basis(3);
    CHECK(b->freqs()[0] == doctest::Approx(1.0));
    CHECK(b->freqs()[1] == doctest::Approx(2.0));
    CHECK(b->freqs()[2] == doctest::Approx(3.0));
    double amp = std::sqrt(2.0 / kPi);
    CHECK(b->mode_deriv(0, kPi / 2, 0) == doctest::Approx(amp));
    CHECK(b->mode_deriv(1, kPi / 4, 0) == doctest::Approx(amp * std::sin(kPi / 2)));
}

TEST_CASE("clamped frequencies match the bisection oracle") {
    auto b = beam_basis(5);
    CHECK(b->freqs()[0] == doctest::Approx(clamped_w1_oracle()).epsilon(1e-12));
    CHECK(b->freqs()[0] == doctest::Approx(4.7300408).epsilon(1e-7));
    // asymptotically w_j ~ (j + 1/2) pi with an exponentially small gap
    for (std::size_t j = 2; j < 5; ++j)
        CHECK(std::fabs(b->freqs()[j] - (j + 1.5) * kPi) <
              3.0 * std::exp(-b->freqs()[j]));
    auto b8 = beam_basis(8);
    for (std::size_t j = 4; j < 8; ++j)
        CHECK(std::fabs(b8->freqs()[j] - (j + 1.5) * kPi) < 1e-6);
}

TEST_CASE("clamped characteristic residual is at machine level") {
    auto b = beam_basis(20);
    for (std::size_t j = 0; j < 20; ++j) {
        double w = b->freqs()[j];
        double res = std::fabs(std::cos(w) * std::cosh(w) - 1.0) / std::cosh(w);
        CHECK(res < 1e-10);
    }
}

TEST_CASE("modes are orthonormal and satisfy the boundary conditions") {
    for (auto basis : {sine_basis(12), beam_basis(12)}) {
        const auto& g = basis->grid();
        for (std::size_t i = 0; i < basis->size(); ++i) {
            for (std::size_t j = i; j < basis->size(); ++j) {
                double s = 0.0;
                for (std::size_t q = 0; q < g.size(); ++q)
                    s += g.weights[q] * basis->mode_deriv(i, g.nodes[q], 0) *
                         basis->mode_deriv(j, g.nodes[q], 0);
                CHECK(std::fabs(s - (i == j ? 1.0 : 0.0)) < 1e-8);
            }
            CHECK(std::fabs(basis->mode_deriv(i, 0.0, 0)) < 1e-8);
            CHECK(std::fabs(basis->mode_deriv(i, basis->length(), 0)) < 1e-8);
        }
        if (basis->order_m() == 2) {
            for (std::size_t i = 0; i < basis->size(); ++i) {
                CHECK(std::fabs(basis->mode_deriv(i, 0.0, 1)) < 1e-8);
                CHECK(std::fabs(basis->mode_deriv(i, basis->length(), 1)) < 1e-8);
            }
        }
    }
}

TEST_CASE("beam eigen-residual e'''' = w^4 e on interior nodes") {
    auto b = beam_basis(10);
    double worst = 0.0;
    for (std::size_t j = 0; j < b->size(); ++j) {
        double w4 = b->eigvals()[j];
        double sup = 0.0, res = 0.0;
        for (double x = 0.05; x < 0.96; x += 0.025) {
            double e0 = b->mode_deriv(j, x, 0);
            double e4 = b->mode_deriv(j, x, 4);
            sup = std::max(sup, std::fabs(e0));
            res = std::max(res, std::fabs(e4 - w4 * e0));
        }
        worst = std::max(worst, res / (w4 * sup));
    }
    CHECK(worst < 1e-6);
}

TEST_CASE("single mode decays at the exact rate") {
    auto b = sine_basis(3);
    auto s = make_state(b, {1.0, 0.0, 0.0});
    auto s2 = evolve(s, 0.7);
    CHECK(s2.l2_norm() == doctest::Approx(std::exp(-0.7)).epsilon(1e-12));
    CHECK(s2.time == doctest::Approx(0.7));
}

TEST_CASE("semigroup identity for the pure powers") {
    Rng rng(3);
    for (auto basis : {sine_basis(10), beam_basis(10)}) {
        auto a = rng.unit_vector(10);
        auto s = make_state(basis, a);
        for (int trial = 0; trial < 20; ++trial) {
            double t = rng.uniform(0.0, 1.0), dt = rng.uniform(0.0, 1.0);
            auto one = evolve(evolve(s, t), dt);
            auto two = evolve(s, t + dt);
            for (std::size_t j = 0; j < 10; ++j)
                CHECK(std::fabs(one.coeffs[j] - two.coeffs[j]) < 1e-10);
        }
    }
}

TEST_CASE("energy norm is non-increasing and exact for pure powers") {
    Rng rng(5);
    auto b = beam_basis(8);
    auto a = rng.unit_vector(8);
    auto s = make_state(b, a);
    double prev = s.l2_norm();
    for (double t : {0.01, 0.1, 0.5, 1.0}) {
        auto st = evolve(s, t);
        double expect = 0.0;
        for (std::size_t j = 0; j < 8; ++j)
            expect += a[j] * a[j] * std::exp(-2.0 * t * b->eigvals()[j]);
        CHECK(st.l2_norm() == doctest::Approx(std::sqrt(expect)).epsilon(1e-12));
        CHECK(st.l2_norm() <= prev + 1e-15);
        prev = st.l2_norm();
    }
}

TEST_CASE("backward evolution is rejected") {
    auto s = make_state(sine_basis(2), {1.0, 0.0});
    CHECK_THROWS_WITH(evolve(s, -0.1), "backward evolution forbidden");
}

TEST_CASE("eval_deriv closed forms") {
    auto b = sine_basis(4);
    auto s = make_state(b, {1.0, 0.0, 0.0, 0.0}, 0.3);
    // first mode: d/dx sin(x) = cos(x) vanishes at pi/2
    CHECK(std::fabs(eval_deriv(s, kPi / 2, 1, 0)) < 1e-14);
    // p = 1 equals -w^2 times the value for a single mode
    double v = eval_deriv(s, 0.9, 0, 0);
    CHECK(eval_deriv(s, 0.9, 0, 1) == doctest::Approx(-1.0 * v).epsilon(1e-12));
}

TEST_CASE("time derivative matches a centered finite difference") {
    Rng rng(17);
    for (auto basis : {sine_basis(12), beam_basis(12, 2.0)}) {
        auto s0 = make_state(basis, rng.unit_vector(12));
        double t = 0.4, h = 1e-5;
        auto mid = evolve(s0, t);
        auto lo = evolve(s0, t - h);
        auto hi = evolve(s0, t + h);
        double x = 0.37 * basis->length();
        double fd = (eval_deriv(hi, x, 0, 0) - eval_deriv(lo, x, 0, 0)) / (2.0 * h);
        double exact = eval_deriv(mid, x, 0, 1);
        CHECK(std::fabs(fd - exact) / std::max(1e-12, std::fabs(exact)) < 1e-6);
    }
}

TEST_CASE("spatial derivative matches a centered finite difference") {
    auto b = beam_basis(6);
    double x = 0.31, h = 1e-6;
    for (std::size_t j : {0u, 3u, 5u}) {
        double fd = (b->mode_deriv(j, x + h, 1) - b->mode_deriv(j, x - h, 1)) / (2.0 * h);
        double exact = b->mode_deriv(j, x, 2);
        CHECK(std::fabs(fd - exact) / std::fabs(exact) < 1e-6);
    }
}

TEST_CASE("boundary traces") {
    auto bs = sine_basis(5);
    Rng rng(21);
    auto a = rng.unit_vector(5);
    auto s = evolve(make_state(bs, a), 0.25);
    // sine mode j: normal trace at 0 is -sqrt(2/pi) j e^{-t j^2} a_j summed
    double expect = 0.0;
    for (std::size_t j = 0; j < 5; ++j)
        expect += -std::sqrt(2.0 / kPi) * (j + 1.0) * std::exp(-0.25 * (j + 1) * (j + 1)) * a[j];
    CHECK(boundary_trace(s, Endpoint::left, TraceKind::normal) ==
          doctest::Approx(expect).epsilon(1e-12));

    auto bb = beam_basis(4);
    auto sb = make_state(bb, {1.0, 0.0, 0.0, 0.0});
    CHECK(std::fabs(eval_deriv(sb, 0.0, 0, 0)) < 1e-10);
    CHECK(std::fabs(eval_deriv(sb, 0.0, 1, 0)) < 1e-10);
    // u''(0) is nonzero for the clamped mode and matches a finite difference
    double h = 1e-5;
    double fd = (bb->mode_deriv(0, 2 * h, 0) - 2 * bb->mode_deriv(0, h, 0) +
                 bb->mode_deriv(0, 0.0, 0)) / (h * h);
    double tr = boundary_trace(sb, Endpoint::left, TraceKind::laplacian);
    CHECK(tr != 0.0);
    CHECK(std::fabs(fd - tr) / std::fabs(tr) < 1e-4);
    CHECK(boundary_trace(sb, Endpoint::left, TraceKind::normal_laplacian) ==
          doctest::Approx(-eval_deriv(sb, 0.0, 3, 0)));
}

TEST_CASE("coupled system with zero coupling reduces to two heat flows") {
    Coupled2Spec cs;
    cs.length = kPi;
    cs.a = Coefficient::constant(0.0);
    cs.b = Coefficient::constant(0.0);
    cs.c = Coefficient::constant(0.0);
    cs.d = Coefficient::constant(0.0);
    cs.truncation = 6;
    auto b = std::make_shared<EigenBasis>(build_basis(cs, 6));
    Rng rng(31);
    std::vector<double> c0(12);
    for (auto& v : c0) v = rng.normal();
    auto s = evolve(make_state(b, c0), 0.4);
    for (std::size_t j = 0; j < 6; ++j) {
        double decay = std::exp(-0.4 * b->eigvals()[j]);
        CHECK(s.coeffs[j] == doctest::Approx(c0[j] * decay).epsilon(1e-10));
        CHECK(s.coeffs[6 + j] == doctest::Approx(c0[6 + j] * decay).epsilon(1e-10));
    }
}

TEST_CASE("triangular coupling has the closed-form propagator") {
    // b = 1, c = 0, a = d = 0: u(t) = e^{-tL}(u0 - t v0), v(t) = e^{-tL} v0.
    Coupled2Spec cs;
    cs.length = kPi;
    cs.a = Coefficient::constant(0.0);
    cs.b = Coefficient::constant(1.0);
    cs.c = Coefficient::constant(0.0);
    cs.d = Coefficient::constant(0.0);
    cs.truncation = 5;
    auto b = std::make_shared<EigenBasis>(build_basis(cs, 5));
    Rng rng(37);
    std::vector<double> c0(10);
    for (auto& v : c0) v = rng.normal();
    double t = 0.3;
    auto s = evolve(make_state(b, c0), t);
    for (std::size_t j = 0; j < 5; ++j) {
        double decay = std::exp(-t * b->eigvals()[j]);
        CHECK(s.coeffs[5 + j] == doctest::Approx(c0[5 + j] * decay).epsilon(1e-9));
        CHECK(s.coeffs[j] ==
              doctest::Approx(decay * (c0[j] - t * c0[5 + j])).epsilon(1e-9));
    }
    // v-block evolves independently of the u-block (block triangular).
    std::vector<double> c1 = c0;
    c1[0] += 1.0;
    auto s1 = evolve(make_state(b, c1), t);
    for (std::size_t j = 0; j < 5; ++j)
        CHECK(s1.coeffs[5 + j] == doctest::Approx(s.coeffs[5 + j]).epsilon(1e-12));
}

TEST_CASE("state serialization format") {
    auto s = make_state(sine_basis(2), {0.5, -0.25}, 0.125);
    CHECK(to_csv_line(s) == "0.125, 0.5, -0.25");
}

TEST_CASE("basis construction rejects bad arguments") {
    CHECK_THROWS_WITH(build_basis(PurePowerSpec{1, kPi}, 0), "empty basis");
    CHECK_THROWS(build_basis(PurePowerSpec{3, 1.0}, 4));
}
