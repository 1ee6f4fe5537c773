#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace oblab {

/// Binned density of a sample of integer magnitudes.
///
/// Density is per unit of the sampled variable, normalized so that
/// sum(density * width) + excluded_mass() == 1. With log binning, samples
/// below the first edge (in practice r = 0) are excluded and reported as
/// excluded mass; bin edges are snapped to integers so each bin covers an
/// exact set of integer values and widths carry no rounding error.
struct Histogram {
    std::vector<double> edges;        // size K+1, ascending; bin k = [edges[k], edges[k+1])
    std::vector<std::int64_t> counts; // size K
    std::int64_t total = 0;           // all samples, including excluded ones
    std::int64_t excluded = 0;
    bool log_binned = false;

    std::size_t bins() const { return counts.size(); }

    double width(std::size_t k) const { return edges[k + 1] - edges[k]; }

    double density(std::size_t k) const {
        return total == 0 ? 0.0 : static_cast<double>(counts[k]) / (static_cast<double>(total) * width(k));
    }

    /// Representative abscissa: geometric centre for log bins, midpoint otherwise.
    double center(std::size_t k) const {
        return log_binned ? std::sqrt(edges[k] * edges[k + 1]) : 0.5 * (edges[k] + edges[k + 1]);
    }

    double excluded_mass() const {
        return total == 0 ? 0.0 : static_cast<double>(excluded) / static_cast<double>(total);
    }

    double binned_mass() const {
        double m = 0.0;
        for (std::size_t k = 0; k < bins(); ++k) m += density(k) * width(k);
        return m;
    }
};

/// Integer-snapped geometric bin edges: lo, then each edge grows by at least
/// a factor `ratio`, rounded up to the next integer (always advancing by >= 1).
inline std::vector<double> log_bin_edges(std::int64_t lo, std::int64_t hi, double ratio) {
    if (lo < 1) throw std::invalid_argument("log_bin_edges: lo must be >= 1");
    if (ratio <= 1.0) throw std::invalid_argument("log_bin_edges: ratio must exceed 1");
    std::vector<double> edges{static_cast<double>(lo)};
    std::int64_t e = lo;
    while (e <= hi) {
        e = std::max(e + 1, static_cast<std::int64_t>(std::ceil(static_cast<double>(e) * ratio)));
        edges.push_back(static_cast<double>(e));
    }
    return edges;
}

/// Log-binned histogram of non-negative integer samples; values < lo are
/// counted as excluded mass.
inline Histogram log_histogram(const std::vector<std::int64_t>& samples, double ratio = 1.25,
                               std::int64_t lo = 1) {
    Histogram h;
    h.log_binned = true;
    h.total = static_cast<std::int64_t>(samples.size());
    std::int64_t max_sample = lo;
    for (std::int64_t s : samples) max_sample = std::max(max_sample, s);
    h.edges = log_bin_edges(lo, max_sample, ratio);
    h.counts.assign(h.edges.size() - 1, 0);
    for (std::int64_t s : samples) {
        if (s < lo) {
            ++h.excluded;
            continue;
        }
        const auto it = std::upper_bound(h.edges.begin(), h.edges.end(), static_cast<double>(s));
        ++h.counts[static_cast<std::size_t>(it - h.edges.begin()) - 1];
    }
    while (h.counts.size() > 1 && h.counts.back() == 0) {  // trim trailing empties
        h.counts.pop_back();
        h.edges.pop_back();
    }
    return h;
}

/// Fixed-width histogram covering [lo, hi]; samples outside are excluded.
inline Histogram linear_histogram(const std::vector<std::int64_t>& samples, double width,
                                  std::int64_t lo, std::int64_t hi) {
    if (width <= 0.0) throw std::invalid_argument("linear_histogram: width must be positive");
    if (hi < lo) throw std::invalid_argument("linear_histogram: hi < lo");
    Histogram h;
    h.total = static_cast<std::int64_t>(samples.size());
    const std::size_t nbins = static_cast<std::size_t>(std::ceil((hi - lo + 1) / width));
    h.edges.resize(nbins + 1);
    for (std::size_t k = 0; k <= nbins; ++k) h.edges[k] = lo + width * static_cast<double>(k);
    h.counts.assign(nbins, 0);
    for (std::int64_t s : samples) {
        const double v = static_cast<double>(s);
        if (v < h.edges.front() || v >= h.edges.back()) {
            ++h.excluded;
            continue;
        }
        auto idx = static_cast<std::size_t>((v - h.edges.front()) / width);
        if (idx >= nbins) idx = nbins - 1;
        ++h.counts[idx];
    }
    return h;
}

/// Sums counts of histograms produced with identical (lo, ratio) parameters.
/// Edge sequences of such histograms are prefixes of one another.
inline Histogram merge_histograms(const std::vector<Histogram>& hs) {
    if (hs.empty()) throw std::invalid_argument("merge_histograms: no inputs");
    std::size_t widest = 0;
    for (std::size_t i = 1; i < hs.size(); ++i)
        if (hs[i].edges.size() > hs[widest].edges.size()) widest = i;
    Histogram out = hs[widest];
    out.counts.assign(out.edges.size() - 1, 0);
    out.total = 0;
    out.excluded = 0;
    for (const Histogram& h : hs) {
        for (std::size_t k = 0; k + 1 < h.edges.size(); ++k) {
            if (h.edges[k] != out.edges[k] || h.edges[k + 1] != out.edges[k + 1])
                throw std::invalid_argument("merge_histograms: incompatible binning");
            out.counts[k] += h.counts[k];
        }
        out.total += h.total;
        out.excluded += h.excluded;
    }
    return out;
}

}  // namespace oblab
