#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "oblab/histogram.hpp"

namespace oblab {

/// Named (x, y, count) table; the common product of every estimator.
/// x is strictly ascending and every retained point has count > 0.
struct StatSeries {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
    std::vector<std::int64_t> count;
    nlohmann::json meta = nlohmann::json::object();

    std::size_t size() const { return x.size(); }

    void push(double xi, double yi, std::int64_t ci) {
        if (ci <= 0) return;
        if (!x.empty() && xi <= x.back())
            throw std::invalid_argument("StatSeries: x must be strictly ascending");
        x.push_back(xi);
        y.push_back(yi);
        count.push_back(ci);
    }
};

/// Density curve of a histogram; empty bins are dropped (count > 0 invariant).
inline StatSeries histogram_to_series(const Histogram& h, std::string name) {
    StatSeries s;
    s.name = std::move(name);
    for (std::size_t k = 0; k < h.bins(); ++k)
        if (h.counts[k] > 0) s.push(h.center(k), h.density(k), h.counts[k]);
    s.meta["excluded_mass"] = h.excluded_mass();
    s.meta["total_samples"] = h.total;
    s.meta["log_binned"] = h.log_binned;
    return s;
}

}  // namespace oblab
