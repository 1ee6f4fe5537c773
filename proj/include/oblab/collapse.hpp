#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "oblab/histogram.hpp"
#include "oblab/rng.hpp"

namespace oblab {

namespace detail {

// Piecewise-linear interpolant of (log u, log F); NaN outside the support.
struct LogCurve {
    std::vector<double> lu, lf;

    static LogCurve from_histogram(const Histogram& h, double s) {
        LogCurve c;
        for (std::size_t k = 0; k < h.bins(); ++k) {
            if (h.counts[k] == 0) continue;
            const double u = h.center(k) / s;
            const double f = s * h.density(k);
            if (u <= 0.0 || f <= 0.0) continue;
            c.lu.push_back(std::log(u));
            c.lf.push_back(std::log(f));
        }
        return c;
    }

    bool empty() const { return lu.size() < 2; }
    double lo() const { return lu.front(); }
    double hi() const { return lu.back(); }

    double operator()(double x) const {
        if (x < lu.front() || x > lu.back()) return std::nan("");
        const auto it = std::upper_bound(lu.begin(), lu.end(), x);
        if (it == lu.begin()) return lf.front();
        if (it == lu.end()) return lf.back();
        const auto i = static_cast<std::size_t>(it - lu.begin());
        const double w = (x - lu[i - 1]) / (lu[i] - lu[i - 1]);
        return lf[i - 1] + w * (lf[i] - lf[i - 1]);
    }
};

inline double pairwise_error(const LogCurve& a, const LogCurve& b, int grid = 48) {
    const double lo = std::max(a.lo(), b.lo());
    const double hi = std::min(a.hi(), b.hi());
    if (!(hi > lo)) throw std::runtime_error("collapse_error: disjoint rescaled supports");
    double acc = 0.0;
    int n = 0;
    for (int i = 0; i < grid; ++i) {
        const double x = lo + (hi - lo) * (static_cast<double>(i) + 0.5) / grid;
        const double fa = a(x), fb = b(x);
        if (std::isnan(fa) || std::isnan(fb)) continue;
        acc += std::abs(fa - fb);
        ++n;
    }
    if (n == 0) throw std::runtime_error("collapse_error: no overlapping support");
    return acc / n;
}

inline std::int64_t sample_binomial(RngStream& rng, std::int64_t n, double p) {
    if (p <= 0.0 || n <= 0) return 0;
    if (p >= 1.0) return n;
    const double np = static_cast<double>(n) * p;
    const double var = np * (1.0 - p);
    if (var > 25.0) {  // normal approximation is plenty for a noise-floor estimate
        const double u1 = rng.u01(), u2 = rng.u01();
        const double z = std::sqrt(-2.0 * std::log(std::max(u1, 1e-300))) * std::cos(6.283185307179586 * u2);
        const double v = std::round(np + z * std::sqrt(var));
        return std::clamp<std::int64_t>(static_cast<std::int64_t>(v), 0, n);
    }
    // inversion on the pmf, iterated from k = 0
    const double q = 1.0 - p;
    double log_pmf = static_cast<double>(n) * std::log(q);
    double pmf = std::exp(log_pmf);
    double cdf = pmf;
    double u = rng.u01();
    std::int64_t k = 0;
    while (u > cdf && k < n) {
        ++k;
        pmf *= (static_cast<double>(n - k + 1) / static_cast<double>(k)) * (p / q);
        cdf += pmf;
        if (pmf < 1e-18 && cdf > 0.999999999) break;
    }
    return k;
}

}  // namespace detail

/// Quality of a scaling collapse P(r) = (1/s) F(r/s): rescale every
/// histogram, interpolate the log-densities onto the pairwise overlapping
/// support, and return the largest pairwise mean absolute log difference.
/// Zero means a perfect collapse.
inline double collapse_error(const std::vector<Histogram>& hists, const std::vector<double>& scales) {
    if (hists.size() < 2 || hists.size() != scales.size())
        throw std::invalid_argument("collapse_error: need >= 2 histograms with matching scales");
    std::vector<detail::LogCurve> curves;
    for (std::size_t i = 0; i < hists.size(); ++i) {
        if (scales[i] <= 0.0) throw std::invalid_argument("collapse_error: scale must be positive");
        auto c = detail::LogCurve::from_histogram(hists[i], scales[i]);
        if (c.empty()) throw std::invalid_argument("collapse_error: histogram with < 2 occupied bins");
        curves.push_back(std::move(c));
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < curves.size(); ++i)
        for (std::size_t j = i + 1; j < curves.size(); ++j)
            worst = std::max(worst, detail::pairwise_error(curves[i], curves[j]));
    return worst;
}

/// Collapse error expected from sampling noise alone, under the hypothesis
/// that all inputs follow one master curve. The master curve is the
/// count-weighted mean of the rescaled log-densities; each replicate redraws
/// every histogram's counts from it (multinomial, same sample size) and the
/// 95th percentile of the replicate collapse errors is returned.
inline double collapse_noise_floor(const std::vector<Histogram>& hists,
                                   const std::vector<double>& scales, int reps = 100,
                                   std::uint64_t seed = 0x51a7ed) {
    if (hists.size() < 2 || hists.size() != scales.size())
        throw std::invalid_argument("collapse_noise_floor: need >= 2 histograms with matching scales");
    std::vector<detail::LogCurve> curves;
    for (std::size_t i = 0; i < hists.size(); ++i)
        curves.push_back(detail::LogCurve::from_histogram(hists[i], scales[i]));

    auto master = [&](double lu) {
        double acc = 0.0;
        int n = 0;
        for (const auto& c : curves) {
            const double v = c(lu);
            if (!std::isnan(v)) {
                acc += v;
                ++n;
            }
        }
        return n ? acc / n : std::nan("");
    };

    RngStream rng(seed);
    std::vector<double> errs;
    errs.reserve(static_cast<std::size_t>(reps));
    for (int rep = 0; rep < reps; ++rep) {
        std::vector<Histogram> synth = hists;
        for (std::size_t i = 0; i < synth.size(); ++i) {
            const Histogram& orig = hists[i];
            Histogram& h = synth[i];
            // target bin probabilities from the master curve, falling back to
            // the histogram's own density where the master is undefined
            std::vector<double> prob(h.bins(), 0.0);
            double norm = 0.0;
            const std::int64_t n_binned = h.total - h.excluded;
            for (std::size_t k = 0; k < h.bins(); ++k) {
                const double u = orig.center(k) / scales[i];
                const double m = master(std::log(u));
                const double dens = std::isnan(m) ? orig.density(k) : std::exp(m) / scales[i];
                prob[k] = dens * orig.width(k);
                norm += prob[k];
            }
            if (norm <= 0.0) throw std::runtime_error("collapse_noise_floor: empty master support");
            std::fill(h.counts.begin(), h.counts.end(), 0);
            std::int64_t remaining = n_binned;
            double prem = 1.0;
            for (std::size_t k = 0; k < h.bins() && remaining > 0; ++k) {
                const double pk = prob[k] / norm;
                const double pc = prem > 0.0 ? std::clamp(pk / prem, 0.0, 1.0) : 1.0;
                const std::int64_t c = (k + 1 == h.bins())
                                           ? remaining
                                           : detail::sample_binomial(rng, remaining, pc);
                h.counts[k] = c;
                remaining -= c;
                prem -= pk;
            }
            if (remaining > 0) h.counts[h.bins() - 1] += remaining;
        }
        errs.push_back(collapse_error(synth, scales));
    }
    std::sort(errs.begin(), errs.end());
    return errs[static_cast<std::size_t>(0.95 * static_cast<double>(errs.size() - 1))];
}

}  // namespace oblab
