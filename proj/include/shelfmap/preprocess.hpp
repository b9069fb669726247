#pragma once
// Read aggregation and the preprocessing shared by both distance engines:
// global time scaling, per-series RSSI quantile filtering, fixed-step resampling.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <vector>

#include "shelfmap/model.hpp"

namespace shelfmap {

struct Aggregated {
    std::map<ArticleKey, ReadSeries> articles;
    std::map<FixtureId, ReadSeries> fixtures;  // keyed by logical fixture
    std::size_t unknown_count = 0;
};

// Combines item reads per article (per article and color in color-aware mode)
// and reference reads per logical fixture. Unknown EPCs are only counted.
inline Aggregated aggregate(const Stocktake& st, const TagRegistry& reg, bool color_aware) {
    Aggregated out;
    for (const auto& e : st.events) {
        const ReadPoint p{e.t_ms, e.rssi_dbm};
        if (auto it = reg.item_map.find(e.epc); it != reg.item_map.end()) {
            const auto key = color_aware ? it->second : it->second.without_color();
            out.articles[key].points.push_back(p);
        } else if (auto rt = reg.reference_map.find(e.epc); rt != reg.reference_map.end()) {
            out.fixtures[reg.logical(rt->second)].points.push_back(p);
        } else {
            ++out.unknown_count;
        }
    }
    // events may arrive unsorted when built in memory
    auto sort_series = [](ReadSeries& s) {
        std::stable_sort(s.points.begin(), s.points.end(),
                         [](const ReadPoint& a, const ReadPoint& b) { return a.t_ms < b.t_ms; });
    };
    for (auto& [k, s] : out.articles) sort_series(s);
    for (auto& [k, s] : out.fixtures) sort_series(s);
    return out;
}

// Shared linear time frame mapping [t_min, t_max] onto [0, 1].
struct TimeFrame {
    std::int64_t t_min = 0;
    std::int64_t t_max = 0;

    double scale(std::int64_t t) const {
        return static_cast<double>(t - t_min) / static_cast<double>(t_max - t_min);
    }
};

namespace detail {

template <class Map>
void extend_frame(const Map& set, std::int64_t& lo, std::int64_t& hi) {
    for (const auto& [k, s] : set)
        for (const auto& p : s.points) {
            lo = std::min(lo, p.t_ms);
            hi = std::max(hi, p.t_ms);
        }
}

inline TimeFrame make_frame(std::int64_t lo, std::int64_t hi) {
    if (lo > hi) throw Error(ErrorCode::EmptyInput, "time frame");
    if (lo == hi) throw Error(ErrorCode::DegenerateTime, std::to_string(lo));
    return TimeFrame{lo, hi};
}

}  // namespace detail

template <class Map>
TimeFrame time_frame(const Map& set) {
    std::int64_t lo = std::numeric_limits<std::int64_t>::max(), hi = std::numeric_limits<std::int64_t>::min();
    detail::extend_frame(set, lo, hi);
    return detail::make_frame(lo, hi);
}

inline TimeFrame time_frame(const Aggregated& agg) {
    std::int64_t lo = std::numeric_limits<std::int64_t>::max(), hi = std::numeric_limits<std::int64_t>::min();
    detail::extend_frame(agg.articles, lo, hi);
    detail::extend_frame(agg.fixtures, lo, hi);
    return detail::make_frame(lo, hi);
}

struct ScaledSeries {
    std::vector<double> t;     // in [0, 1]
    std::vector<double> rssi;  // dBm, untouched
};

inline ScaledSeries minmax_scale_time(const ReadSeries& s, const TimeFrame& frame) {
    ScaledSeries out;
    out.t.reserve(s.size());
    out.rssi.reserve(s.size());
    for (const auto& p : s.points) {
        out.t.push_back(frame.scale(p.t_ms));
        out.rssi.push_back(p.rssi_dbm);
    }
    return out;
}

// Scales every series of the set with one frame taken over the whole set.
template <class Key>
std::map<Key, ScaledSeries> minmax_scale_time(const std::map<Key, ReadSeries>& set) {
    const auto frame = time_frame(set);
    std::map<Key, ScaledSeries> out;
    for (const auto& [k, s] : set) out.emplace(k, minmax_scale_time(s, frame));
    return out;
}

// Linear interpolation between order statistics (the "type 7" definition).
inline double quantile(std::vector<double> values, double q) {
    if (values.empty()) throw Error(ErrorCode::EmptyInput, "quantile");
    std::sort(values.begin(), values.end());
    const double h = static_cast<double>(values.size() - 1) * q;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, values.size() - 1);
    const double v = values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
    return std::min(v, values.back());
}

// Keeps reads with RSSI at or above the series' own q-quantile. The strongest
// read always survives for q < 1.
inline ReadSeries rssi_quantile_filter(const ReadSeries& s, double q) {
    if (!(q >= 0.0 && q < 1.0)) throw Error(ErrorCode::InvalidConfig, "quantile", "must lie in [0, 1)");
    if (s.empty()) return s;
    std::vector<double> rssi;
    rssi.reserve(s.size());
    for (const auto& p : s.points) rssi.push_back(p.rssi_dbm);
    const double threshold = quantile(std::move(rssi), q);
    ReadSeries out;
    for (const auto& p : s.points)
        if (p.rssi_dbm >= threshold) out.points.push_back(p);
    return out;
}

// Fixed-step binning over [t_start, t_end]. Steps that are a whole number of
// milliseconds use exact integer arithmetic.
class Binning {
public:
    Binning(double resolution_s, std::int64_t t_start, std::int64_t t_end)
        : t_start_(t_start) {
        if (!(resolution_s > 0.0)) throw Error(ErrorCode::InvalidConfig, "resample_s");
        if (t_end < t_start) throw Error(ErrorCode::EmptyInput, "resample span");
        res_ms_ = resolution_s * 1000.0;
        const double rounded = std::round(res_ms_);
        if (rounded >= 1.0 && std::abs(res_ms_ - rounded) < 1e-9) step_ms_ = static_cast<std::int64_t>(rounded);
        const std::int64_t span = t_end - t_start;
        if (step_ms_)
            count_ = static_cast<std::size_t>((span + step_ms_ - 1) / step_ms_);
        else
            count_ = static_cast<std::size_t>(std::ceil(static_cast<double>(span) / res_ms_));
        count_ = std::max<std::size_t>(count_, 1);
    }

    std::size_t size() const { return count_; }

    // Bins are left-closed; reads at or past the final boundary fall into the last bin.
    std::size_t index(std::int64_t t) const {
        if (t <= t_start_) return 0;
        std::size_t k;
        if (step_ms_)
            k = static_cast<std::size_t>((t - t_start_) / step_ms_);
        else
            k = static_cast<std::size_t>(std::floor(static_cast<double>(t - t_start_) / res_ms_));
        return std::min(k, count_ - 1);
    }

private:
    std::int64_t t_start_;
    double res_ms_ = 0.0;
    std::int64_t step_ms_ = 0;
    std::size_t count_ = 0;
};

// Sums (rssi + shift) per bin; bins without reads stay 0.
inline std::vector<double> resample(const ReadSeries& s, const Binning& bins, double shift) {
    std::vector<double> out(bins.size(), 0.0);
    for (const auto& p : s.points) out[bins.index(p.t_ms)] += p.rssi_dbm + shift;
    return out;
}

inline std::vector<double> resample(const ReadSeries& s, double resolution_s, std::int64_t t_start,
                                    std::int64_t t_end, double shift) {
    return resample(s, Binning(resolution_s, t_start, t_end), shift);
}

}  // namespace shelfmap
