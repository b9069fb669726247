#pragma once
// DTW-based distance engine over resampled, shifted RSSI series.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <vector>

#include "shelfmap/model.hpp"
#include "shelfmap/preprocess.hpp"

namespace shelfmap {

// Minimal cumulative cost over monotone alignments from (0,0) to (|a|-1,|b|-1)
// with steps {(1,0),(0,1),(1,1)} and a band |i - j| <= window. Two rolling rows
// sized by the shorter input.
inline double dtw_distance(std::span<const double> a, std::span<const double> b, std::size_t window,
                           DtwCost cost = DtwCost::Absolute) {
    if (a.empty() || b.empty()) throw Error(ErrorCode::EmptyInput, "dtw");
    const std::size_t diff = a.size() > b.size() ? a.size() - b.size() : b.size() - a.size();
    if (window < diff)
        throw Error(ErrorCode::InfeasibleWindow, std::to_string(window),
                    "window smaller than length difference " + std::to_string(diff));
    // local cost and step pattern are symmetric, so rows can run over the longer input
    if (b.size() > a.size()) std::swap(a, b);
    const std::size_t n = a.size(), m = b.size();
    constexpr double inf = std::numeric_limits<double>::infinity();

    auto local = [cost](double x, double y) {
        const double d = x - y;
        return cost == DtwCost::Absolute ? std::abs(d) : d * d;
    };

    // column 0 is the virtual start; prev[0] = 0 only for row 0
    std::vector<double> prev(m + 1, inf), curr(m + 1, inf);
    prev[0] = 0.0;
    for (std::size_t i = 1; i <= n; ++i) {
        const std::size_t jlo = i > window ? i - window : 1;
        const std::size_t jhi = std::min(m, i + window);
        curr[jlo - 1] = inf;
        for (std::size_t j = jlo; j <= jhi; ++j) {
            const double best = std::min({prev[j - 1], prev[j], curr[j - 1]});
            curr[j] = local(a[i - 1], b[j - 1]) + best;
        }
        if (jhi < m) curr[jhi + 1] = inf;
        std::swap(prev, curr);
    }
    return prev[m];
}

// Full DTW pipeline: per-series RSSI quantile filter, resampling with the RSSI
// shift over the shared span of all series, banded DTW per pair.
inline DistanceMatrix dtw_engine(const std::map<ArticleKey, ReadSeries>& articles,
                                 const std::map<FixtureId, ReadSeries>& fixtures, const ParamConfig& cfg) {
    cfg.validate();
    std::int64_t lo = std::numeric_limits<std::int64_t>::max(), hi = std::numeric_limits<std::int64_t>::min();
    detail::extend_frame(articles, lo, hi);
    detail::extend_frame(fixtures, lo, hi);
    if (lo > hi) throw Error(ErrorCode::EmptyInput, "dtw_engine");
    const Binning bins(cfg.resample_s, lo, hi);

    auto prepare = [&](const ReadSeries& s) {
        return resample(rssi_quantile_filter(s, cfg.rssi_quantile_dtw), bins, cfg.rssi_shift);
    };

    DistanceMatrix m;
    std::vector<std::vector<double>> a_series, f_series;
    for (const auto& [k, s] : articles) {
        m.articles.push_back(k);
        a_series.push_back(prepare(s));
    }
    for (const auto& [f, s] : fixtures) {
        m.fixtures.push_back(f);
        f_series.push_back(prepare(s));
    }
    m.values.assign(m.articles.size() * m.fixtures.size(), std::nullopt);
    const auto w = static_cast<std::size_t>(cfg.dtw_window);
    for (std::size_t i = 0; i < a_series.size(); ++i)
        for (std::size_t j = 0; j < f_series.size(); ++j)
            m.at(i, j) = dtw_distance(a_series[i], f_series[j], w, cfg.dtw_cost);
    return m;
}

}  // namespace shelfmap
