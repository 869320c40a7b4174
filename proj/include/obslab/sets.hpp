#pragma once

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

// Finite unions of open intervals and space-time observation sets.  These
// are the computable stand-ins for "measurable set with positive measure":
// every operation below is exact interval arithmetic, no sampling.

namespace obslab::sets {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    Interval() = default;
    Interval(double lo_, double hi_);

    double length() const { return hi - lo; }
    bool contains(double x) const { return lo < x && x < hi; }
};

class IntervalSet {
public:
    IntervalSet() = default;

    // Normalizes: sorts by lo, merges overlapping or touching intervals,
    // drops empty ones.
    static IntervalSet from_parts(std::vector<Interval> parts);
    static IntervalSet single(double lo, double hi);

    // Canonical textual form "lo-hi,lo-hi,...".
    static IntervalSet parse(const std::string& text);
    std::string to_string() const;

    const std::vector<Interval>& parts() const { return parts_; }
    bool empty() const { return parts_.empty(); }
    double measure() const;
    double lo() const { return parts_.front().lo; }
    double hi() const { return parts_.back().hi; }
    bool contains(double x) const;

    IntervalSet intersect(const Interval& window) const;
    IntervalSet intersect(const IntervalSet& other) const;
    IntervalSet unite(const IntervalSet& other) const;

    // Measure of the intersection with (lo,hi) without materializing it.
    double measure_within(double lo, double hi) const;

private:
    std::vector<Interval> parts_;
};

// D = omega x times.
struct ProductSet {
    IntervalSet omega;
    IntervalSet times;
};

// Uniform nx x nt cell decomposition of (0,domain_length) x (0,horizon);
// mask is row-major with index ix*nt + it.
struct CellGrid {
    std::size_t nx = 0;
    std::size_t nt = 0;
    double domain_length = 0.0;
    double horizon = 0.0;
    std::vector<bool> mask;

    bool cell(std::size_t ix, std::size_t it) const { return mask[ix * nt + it]; }

    // "1:3,0:5,..." run-length encoding of the row-major mask.
    static CellGrid from_rle(std::size_t nx, std::size_t nt, double domain_length,
                             double horizon, const std::string& rle);
    std::string to_rle() const;
};

class SpaceTimeSet {
public:
    explicit SpaceTimeSet(ProductSet p);
    explicit SpaceTimeSet(CellGrid g);

    bool is_product() const { return std::holds_alternative<ProductSet>(rep_); }
    const ProductSet& product() const { return std::get<ProductSet>(rep_); }
    const CellGrid& grid() const { return std::get<CellGrid>(rep_); }

    double measure() const;
    double domain_length() const;
    double horizon() const;

    // Spatial slice D_t at time t.
    IntervalSet slice_at(double t) const;

    std::string describe() const;

private:
    std::variant<ProductSet, CellGrid> rep_;
};

// Fubini slicing: E_good = { t : |D_t| >= |D| / (2 horizon) }, which has
// measure at least |D| / (2 domain_length).
struct SliceResult {
    IntervalSet e_good;
    double threshold = 0.0; // |D| / (2 horizon)
};

SliceResult slice(const SpaceTimeSet& d, double horizon);

// Geometric refinement sequence anchored at a density point of E.
// points = l_1 > l_2 > ... > l_K > l with l_{k+1}-l_{k+2} = q (l_k - l_{k+1})
// and |(l_{k+1}, l_k) ∩ E| >= (l_k - l_{k+1}) / 3 for every stored step.
struct TelescopeSeq {
    double l = 0.0;
    double q = 0.0;
    std::vector<double> points;
    std::vector<double> tau; // tau_k = l_{k+1} + (l_k - l_{k+1})/6, k = 1..K-1

    std::size_t steps() const { return points.size() - 1; }
    double step_length(std::size_t k) const { return points[k] - points[k + 1]; }
};

// Scan construction: dyadic candidates for l over E, shrinking candidates
// for l_1, first pair passing every density check wins.  Truncates when
// l_k - l_{k+1} < trunc_rel * horizon (at least two steps are kept).
TelescopeSeq telescope(const IntervalSet& e, double q, double horizon,
                       double trunc_rel = 1e-6);

// Re-checks the two defining invariants of a sequence against E,
// independently of how it was built.
bool verify_telescope(const TelescopeSeq& seq, const IntervalSet& e,
                      double tol = 1e-9);

} // namespace obslab::sets
