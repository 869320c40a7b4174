#pragma once

#include <cstddef>
#include <vector>

#include "obslab/sets.hpp"

namespace obslab::quadrature {

struct Grid {
    std::vector<double> nodes;
    std::vector<double> weights;

    std::size_t size() const { return nodes.size(); }
    double total_weight() const;
};

// Nodes/weights of n-point Gauss-Legendre on [-1,1].
void gauss_legendre(std::size_t n, std::vector<double>& nodes,
                    std::vector<double>& weights);

// Composite rule: the interval split into ceil(min_nodes/points_per_panel)
// panels of a points_per_panel-point Gauss rule.
Grid composite(double lo, double hi, std::size_t min_nodes,
               std::size_t points_per_panel = 8);

// Composite rule over every part of the set, min_nodes_per_part each.
Grid composite(const sets::IntervalSet& set, std::size_t min_nodes_per_part,
               std::size_t points_per_panel = 8);

} // namespace obslab::quadrature
