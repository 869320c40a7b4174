#include "obslab/sets.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <stdexcept>

namespace obslab::sets {

Interval::Interval(double lo_, double hi_) : lo(lo_), hi(hi_) {
    if (!(lo < hi))
        throw std::invalid_argument("Interval requires lo < hi");
}

IntervalSet IntervalSet::from_parts(std::vector<Interval> parts) {
    std::sort(parts.begin(), parts.end(),
              [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
    IntervalSet out;
    for (const Interval& p : parts) {
        if (!(p.lo < p.hi)) continue;
        if (!out.parts_.empty() && p.lo <= out.parts_.back().hi) {
            out.parts_.back().hi = std::max(out.parts_.back().hi, p.hi);
        } else {
            out.parts_.push_back(p);
        }
    }
    return out;
}

IntervalSet IntervalSet::single(double lo, double hi) {
    return from_parts({Interval(lo, hi)});
}

IntervalSet IntervalSet::parse(const std::string& text) {
    std::vector<Interval> parts;
    const char* s = text.c_str();
    while (*s) {
        char* end = nullptr;
        double lo = std::strtod(s, &end);
        if (end == s || *end != '-')
            throw std::invalid_argument("bad interval set: " + text);
        s = end + 1;
        double hi = std::strtod(s, &end);
        if (end == s) throw std::invalid_argument("bad interval set: " + text);
        parts.emplace_back(lo, hi);
        s = end;
        if (*s == ',') ++s;
        else if (*s != '\0')
            throw std::invalid_argument("bad interval set: " + text);
    }
    return from_parts(std::move(parts));
}

std::string IntervalSet::to_string() const {
    std::string out;
    char buf[64];
    for (std::size_t i = 0; i < parts_.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g-%.17g", parts_[i].lo, parts_[i].hi);
        if (i) out += ',';
        out += buf;
    }
    return out;
}

double IntervalSet::measure() const {
    double m = 0.0;
    for (const Interval& p : parts_) m += p.length();
    return m;
}

bool IntervalSet::contains(double x) const {
    for (const Interval& p : parts_)
        if (p.contains(x)) return true;
    return false;
}

IntervalSet IntervalSet::intersect(const Interval& window) const {
    std::vector<Interval> out;
    for (const Interval& p : parts_) {
        double lo = std::max(p.lo, window.lo);
        double hi = std::min(p.hi, window.hi);
        if (lo < hi) out.emplace_back(lo, hi);
    }
    IntervalSet r;
    r.parts_ = std::move(out); // already sorted and disjoint
    return r;
}

IntervalSet IntervalSet::intersect(const IntervalSet& other) const {
    std::vector<Interval> out;
    std::size_t i = 0, j = 0;
    while (i < parts_.size() && j < other.parts_.size()) {
        const Interval& a = parts_[i];
        const Interval& b = other.parts_[j];
        double lo = std::max(a.lo, b.lo);
        double hi = std::min(a.hi, b.hi);
        if (lo < hi) out.emplace_back(lo, hi);
        if (a.hi < b.hi) ++i;
        else ++j;
    }
    IntervalSet r;
    r.parts_ = std::move(out);
    return r;
}

IntervalSet IntervalSet::unite(const IntervalSet& other) const {
    std::vector<Interval> all = parts_;
    all.insert(all.end(), other.parts_.begin(), other.parts_.end());
    return from_parts(std::move(all));
}

double IntervalSet::measure_within(double lo, double hi) const {
    double m = 0.0;
    for (const Interval& p : parts_) {
        if (p.hi <= lo) continue;
        if (p.lo >= hi) break;
        m += std::min(p.hi, hi) - std::max(p.lo, lo);
    }
    return m;
}

CellGrid CellGrid::from_rle(std::size_t nx, std::size_t nt, double domain_length,
                            double horizon, const std::string& rle) {
    CellGrid g;
    g.nx = nx;
    g.nt = nt;
    g.domain_length = domain_length;
    g.horizon = horizon;
    g.mask.reserve(nx * nt);
    const char* s = rle.c_str();
    while (*s) {
        if (*s != '0' && *s != '1')
            throw std::invalid_argument("bad cell grid rle: " + rle);
        bool v = *s == '1';
        ++s;
        if (*s != ':') throw std::invalid_argument("bad cell grid rle: " + rle);
        ++s;
        char* end = nullptr;
        long count = std::strtol(s, &end, 10);
        if (end == s || count <= 0)
            throw std::invalid_argument("bad cell grid rle: " + rle);
        s = end;
        g.mask.insert(g.mask.end(), static_cast<std::size_t>(count), v);
        if (*s == ',') ++s;
    }
    if (g.mask.size() != nx * nt)
        throw std::invalid_argument("cell grid rle length mismatch");
    return g;
}

std::string CellGrid::to_rle() const {
    std::string out;
    std::size_t i = 0;
    while (i < mask.size()) {
        std::size_t j = i;
        while (j < mask.size() && mask[j] == mask[i]) ++j;
        if (!out.empty()) out += ',';
        out += mask[i] ? '1' : '0';
        out += ':';
        out += std::to_string(j - i);
        i = j;
    }
    return out;
}

SpaceTimeSet::SpaceTimeSet(ProductSet p) : rep_(std::move(p)) {
    const auto& ps = std::get<ProductSet>(rep_);
    if (ps.omega.empty() || ps.times.empty())
        throw std::invalid_argument("empty observation set");
}

SpaceTimeSet::SpaceTimeSet(CellGrid g) : rep_(std::move(g)) {
    const auto& cg = std::get<CellGrid>(rep_);
    if (cg.nx == 0 || cg.nt == 0 || cg.domain_length <= 0 || cg.horizon <= 0)
        throw std::invalid_argument("bad cell grid dimensions");
    if (measure() <= 0.0) throw std::invalid_argument("empty observation set");
}

double SpaceTimeSet::measure() const {
    if (is_product()) {
        const auto& p = product();
        return p.omega.measure() * p.times.measure();
    }
    const auto& g = grid();
    std::size_t on = 0;
    for (bool b : g.mask) on += b;
    double cell = (g.domain_length / g.nx) * (g.horizon / g.nt);
    return on * cell;
}

double SpaceTimeSet::domain_length() const {
    if (is_product()) return product().omega.hi();
    return grid().domain_length;
}

double SpaceTimeSet::horizon() const {
    if (is_product()) return product().times.hi();
    return grid().horizon;
}

IntervalSet SpaceTimeSet::slice_at(double t) const {
    if (is_product()) {
        const auto& p = product();
        return p.times.contains(t) ? p.omega : IntervalSet();
    }
    const auto& g = grid();
    if (t <= 0.0 || t >= g.horizon) return {};
    double dt = g.horizon / g.nt;
    auto it = std::min<std::size_t>(static_cast<std::size_t>(t / dt), g.nt - 1);
    double dx = g.domain_length / g.nx;
    std::vector<Interval> parts;
    for (std::size_t ix = 0; ix < g.nx; ++ix)
        if (g.cell(ix, it)) parts.emplace_back(ix * dx, (ix + 1) * dx);
    return IntervalSet::from_parts(std::move(parts));
}

std::string SpaceTimeSet::describe() const {
    if (is_product()) {
        const auto& p = product();
        return "product[" + p.omega.to_string() + ";" + p.times.to_string() + "]";
    }
    const auto& g = grid();
    return "cellgrid[" + std::to_string(g.nx) + "x" + std::to_string(g.nt) +
           ";" + g.to_rle() + "]";
}

SliceResult slice(const SpaceTimeSet& d, double horizon) {
    double total = d.measure();
    if (total <= 0.0) throw std::invalid_argument("empty observation set");
    SliceResult out;
    out.threshold = total / (2.0 * horizon);
    if (d.is_product()) {
        // |D_t| = |omega| on the time set; the threshold test is uniform.
        const auto& p = d.product();
        if (p.omega.measure() >= out.threshold) out.e_good = p.times;
        return out;
    }
    const auto& g = d.grid();
    double dt = g.horizon / g.nt;
    double dx = g.domain_length / g.nx;
    std::vector<Interval> cols;
    for (std::size_t it = 0; it < g.nt; ++it) {
        std::size_t on = 0;
        for (std::size_t ix = 0; ix < g.nx; ++ix) on += g.cell(ix, it);
        if (on * dx >= out.threshold)
            cols.emplace_back(it * dt, (it + 1) * dt);
    }
    out.e_good = IntervalSet::from_parts(std::move(cols));
    return out;
}

namespace {

// Checks every density condition of the forced geometric sequence built
// from (l, l1, q); fails fast on the first violated step.
bool geometric_sequence_ok(const IntervalSet& e, double l, double l1, double q,
                           double trunc_len, std::size_t max_steps) {
    double span = l1 - l;
    double lk = l1;
    double sk = (1.0 - q) * span;
    for (std::size_t k = 0; k < max_steps; ++k) {
        double lk1 = lk - sk;
        if (!(lk1 > l - 1e-15 * span)) lk1 = l;
        double got = e.measure_within(lk1, lk);
        if (got + 1e-12 * sk < sk / 3.0) return false;
        if (sk < trunc_len && k >= 1) return true;
        lk = lk1;
        sk *= q;
        if (lk <= l) return true;
    }
    return true;
}

} // namespace

TelescopeSeq telescope(const IntervalSet& e, double q, double horizon,
                       double trunc_rel) {
    if (!(q > 0.0 && q < 1.0))
        throw std::invalid_argument("telescope requires 0 < q < 1");
    if (e.empty() || e.measure() <= 0.0)
        throw std::invalid_argument("telescope requires a set of positive measure");
    if (e.lo() < 0.0 || e.hi() > horizon + 1e-12 * horizon)
        throw std::invalid_argument("telescope: E not contained in (0, horizon)");

    const double trunc_len = trunc_rel * horizon;
    // With q near 1 the forced steps shrink below double resolution around
    // l_1; verifying a couple thousand steps past the truncation length is
    // enough for any q we are handed.
    const std::size_t max_steps =
        q < 0.999999 ? static_cast<std::size_t>(
                           std::ceil(std::log(trunc_rel) / std::log(q))) + 8
                     : 4096;

    // Candidate anchors: part endpoints, then dyadic interior points.
    std::vector<double> anchors;
    for (const Interval& p : e.parts()) anchors.push_back(p.lo);
    for (int depth = 1; depth <= 6; ++depth) {
        int n = 1 << depth;
        for (const Interval& p : e.parts())
            for (int i = 1; i < n; ++i)
                anchors.push_back(p.lo + p.length() * i / n);
    }

    for (double l : anchors) {
        // Largest l_1 first: part right endpoints above l, the horizon,
        // then a geometric shrink toward l.
        std::vector<double> tops;
        tops.push_back(horizon);
        for (const Interval& p : e.parts())
            if (p.hi > l) tops.push_back(p.hi);
        std::sort(tops.rbegin(), tops.rend());
        std::vector<double> cands;
        for (double t : tops) {
            cands.push_back(t);
            for (int i = 1; i <= 30; ++i) {
                double c = l + (t - l) * std::ldexp(1.0, -i);
                if (c - l < trunc_len) break;
                cands.push_back(c);
            }
        }
        for (double l1 : cands) {
            if (!(l1 > l) || l1 > horizon) continue;
            if (!geometric_sequence_ok(e, l, l1, q, trunc_len, max_steps))
                continue;
            TelescopeSeq seq;
            seq.l = l;
            seq.q = q;
            double lk = l1;
            double sk = (1.0 - q) * (l1 - l);
            seq.points.push_back(lk);
            for (std::size_t k = 0; k < max_steps; ++k) {
                double lk1 = lk - sk;
                if (!(lk1 > l)) break;
                seq.points.push_back(lk1);
                if (sk < trunc_len && seq.points.size() >= 3) break;
                lk = lk1;
                sk *= q;
            }
            if (seq.points.size() < 3) {
                // Degenerate spacing; forcibly store the first two forced
                // steps so q and l_1 - l_2 stay reportable.
                seq.points.clear();
                double s1 = (1.0 - q) * (l1 - l);
                seq.points = {l1, l1 - s1, l1 - s1 - q * s1};
            }
            seq.tau.clear();
            for (std::size_t k = 0; k + 1 < seq.points.size(); ++k)
                seq.tau.push_back(seq.points[k + 1] +
                                  (seq.points[k] - seq.points[k + 1]) / 6.0);
            return seq;
        }
    }
    throw std::runtime_error("no Lebesgue point located");
}

bool verify_telescope(const TelescopeSeq& seq, const IntervalSet& e, double tol) {
    if (seq.points.size() < 2) return false;
    for (std::size_t k = 0; k + 1 < seq.points.size(); ++k)
        if (!(seq.points[k] > seq.points[k + 1]) || seq.points[k + 1] < seq.l)
            return false;
    for (std::size_t k = 0; k + 2 < seq.points.size(); ++k) {
        double s0 = seq.points[k] - seq.points[k + 1];
        double s1 = seq.points[k + 1] - seq.points[k + 2];
        if (std::fabs(s1 - seq.q * s0) > tol * std::max(1.0, s0)) return false;
    }
    for (std::size_t k = 0; k + 1 < seq.points.size(); ++k) {
        double sk = seq.points[k] - seq.points[k + 1];
        double got = e.measure_within(seq.points[k + 1], seq.points[k]);
        if (got + 1e-9 * sk < sk / 3.0) return false;
    }
    return true;
}

} // namespace obslab::sets
