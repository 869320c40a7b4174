#include "obslab/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace obslab::quadrature {

double Grid::total_weight() const {
    double s = 0.0;
    for (double w : weights) s += w;
    return s;
}

void gauss_legendre(std::size_t n, std::vector<double>& nodes,
                    std::vector<double>& weights) {
    if (n == 0) throw std::invalid_argument("gauss_legendre: n must be >= 1");
    nodes.assign(n, 0.0);
    weights.assign(n, 0.0);
    const double pi = 3.14159265358979323846;
    for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
        // Newton from the Chebyshev-like initial guess.
        double x = std::cos(pi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (x * p0 - p1) / (x * x - 1.0);
            double dx = p0 / pp;
            x -= dx;
            if (std::fabs(dx) < 1e-15) break;
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        double w = 2.0 / ((1.0 - x * x) * pp * pp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
}

Grid composite(double lo, double hi, std::size_t min_nodes,
               std::size_t points_per_panel) {
    if (!(lo < hi)) throw std::invalid_argument("composite: lo < hi required");
    std::size_t panels = (min_nodes + points_per_panel - 1) / points_per_panel;
    if (panels == 0) panels = 1;
    std::vector<double> gx, gw;
    gauss_legendre(points_per_panel, gx, gw);
    Grid g;
    g.nodes.reserve(panels * points_per_panel);
    g.weights.reserve(panels * points_per_panel);
    double h = (hi - lo) / panels;
    for (std::size_t p = 0; p < panels; ++p) {
        double a = lo + p * h;
        double mid = a + 0.5 * h;
        for (std::size_t i = 0; i < points_per_panel; ++i) {
            g.nodes.push_back(mid + 0.5 * h * gx[i]);
            g.weights.push_back(0.5 * h * gw[i]);
        }
    }
    return g;
}

Grid composite(const sets::IntervalSet& set, std::size_t min_nodes_per_part,
               std::size_t points_per_panel) {
    Grid g;
    for (const auto& part : set.parts()) {
        Grid sub = composite(part.lo, part.hi, min_nodes_per_part, points_per_panel);
        g.nodes.insert(g.nodes.end(), sub.nodes.begin(), sub.nodes.end());
        g.weights.insert(g.weights.end(), sub.weights.begin(), sub.weights.end());
    }
    return g;
}

} // namespace obslab::quadrature
