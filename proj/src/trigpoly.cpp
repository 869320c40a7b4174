#include "obslab/trigpoly.hpp"

#include <cmath>
#include <stdexcept>

namespace obslab {

double TrigPoly::deriv(double x, int order) const {
    const double half_pi = 1.57079632679489661923;
    double s = 0.0;
    for (std::size_t j = 0; j < c.size(); ++j) {
        if (c[j] == 0.0) continue;
        double w = j + 1.0;
        s += c[j] * std::pow(w, order) * std::sin(w * x + order * half_pi);
    }
    return s;
}

double TrigPoly::cert_M() const {
    double m = 0.0;
    for (double v : c) m += std::fabs(v);
    return m;
}

double TrigPoly::cert_rho() const {
    std::size_t jmax = 0;
    for (std::size_t j = 0; j < c.size(); ++j)
        if (c[j] != 0.0) jmax = j + 1;
    if (jmax == 0) throw std::invalid_argument("zero trig polynomial");
    return 1.0 / double(jmax);
}

double TrigPoly::sup_deriv(double lo, double hi, int order, std::size_t n) const {
    double sup = 0.0;
    for (std::size_t i = 0; i <= n; ++i) {
        double x = lo + (hi - lo) * i / n;
        sup = std::max(sup, std::fabs(deriv(x, order)));
    }
    return sup;
}

TrigPoly TrigPoly::random(Rng& rng, std::size_t max_modes, double scale) {
    TrigPoly p;
    std::size_t modes = 1 + static_cast<std::size_t>(rng.uniform() * max_modes);
    if (modes > max_modes) modes = max_modes;
    p.c.resize(modes);
    for (auto& v : p.c) v = scale * rng.normal();
    bool all_zero = true;
    for (double v : p.c) all_zero = all_zero && v == 0.0;
    if (all_zero) p.c.back() = scale;
    return p;
}

} // namespace obslab
