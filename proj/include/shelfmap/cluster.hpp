#pragma once
// DBSCAN-based distance engine. Read timestamps of each article and fixture
// series are clustered; the article-fixture distance is the smallest time gap
// between any pair of cluster centroids.

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "shelfmap/model.hpp"
#include "shelfmap/preprocess.hpp"

namespace shelfmap {

struct Cluster {
    std::vector<double> members;  // normalized timestamps
    double centroid = 0.0;        // mean of members
};

struct ClusterSet {
    std::vector<Cluster> clusters;
    std::vector<double> noise;
    std::vector<int> labels;  // per input point; -1 is noise

    std::vector<double> centroids() const {
        std::vector<double> out;
        out.reserve(clusters.size());
        for (const auto& c : clusters) out.push_back(c.centroid);
        return out;
    }
};

inline constexpr int kNoise = -1;

namespace detail {

inline void check_dbscan_args(std::size_t n, double eps, int min_pts) {
    if (n == 0) throw Error(ErrorCode::EmptyInput, "dbscan");
    if (!(eps > 0.0)) throw Error(ErrorCode::InvalidConfig, "eps");
    if (min_pts < 1) throw Error(ErrorCode::InvalidConfig, "min_pts");
}

inline ClusterSet collect(std::span<const double> t, std::vector<int> labels, int n_clusters) {
    ClusterSet out;
    out.clusters.resize(static_cast<std::size_t>(n_clusters));
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (labels[i] == kNoise)
            out.noise.push_back(t[i]);
        else
            out.clusters[static_cast<std::size_t>(labels[i])].members.push_back(t[i]);
    }
    for (auto& c : out.clusters)
        c.centroid = std::accumulate(c.members.begin(), c.members.end(), 0.0) / static_cast<double>(c.members.size());
    out.labels = std::move(labels);
    return out;
}

}  // namespace detail

// DBSCAN on sorted 1-D points with closed eps-neighborhoods (a point counts
// itself). Neighborhood sizes come from binary search on the sorted input.
// Cores form clusters as maximal runs whose consecutive gaps are <= eps; a
// border point joins the earliest cluster holding a core within eps, which is
// what a scan-order expansion produces.
inline ClusterSet dbscan_1d(std::span<const double> pts, double eps, int min_pts) {
    detail::check_dbscan_args(pts.size(), eps, min_pts);
    if (!std::is_sorted(pts.begin(), pts.end())) throw Error(ErrorCode::InvalidConfig, "dbscan_1d", "points must be sorted");
    const std::size_t n = pts.size();

    std::vector<char> core(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        const double p = pts[i];
        auto lo = std::partition_point(pts.begin(), pts.begin() + static_cast<std::ptrdiff_t>(i),
                                       [&](double q) { return p - q > eps; });
        auto hi = std::partition_point(pts.begin() + static_cast<std::ptrdiff_t>(i), pts.end(),
                                       [&](double q) { return q - p <= eps; });
        core[i] = (hi - lo) >= min_pts;
    }

    std::vector<int> labels(n, kNoise);
    int n_clusters = 0;
    std::optional<std::size_t> prev_core;
    for (std::size_t i = 0; i < n; ++i) {
        if (!core[i]) continue;
        if (!prev_core || pts[i] - pts[*prev_core] > eps) ++n_clusters;
        labels[i] = n_clusters - 1;
        prev_core = i;
    }

    // nearest core on each side, by index
    std::vector<std::ptrdiff_t> left(n, -1), right(n, -1);
    for (std::ptrdiff_t i = 0, last = -1; i < static_cast<std::ptrdiff_t>(n); ++i) {
        left[static_cast<std::size_t>(i)] = last;
        if (core[static_cast<std::size_t>(i)]) last = i;
    }
    for (std::ptrdiff_t i = static_cast<std::ptrdiff_t>(n) - 1, next = -1; i >= 0; --i) {
        right[static_cast<std::size_t>(i)] = next;
        if (core[static_cast<std::size_t>(i)]) next = i;
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (core[i]) continue;
        const auto l = left[i], r = right[i];
        if (l >= 0 && pts[i] - pts[static_cast<std::size_t>(l)] <= eps)
            labels[i] = labels[static_cast<std::size_t>(l)];
        else if (r >= 0 && pts[static_cast<std::size_t>(r)] - pts[i] <= eps)
            labels[i] = labels[static_cast<std::size_t>(r)];
    }
    return detail::collect(pts, std::move(labels), n_clusters);
}

// DBSCAN on (t, v) points sorted by t, Euclidean metric. Expansion follows scan
// order so border points go to the first cluster that reaches them.
inline ClusterSet dbscan_2d(std::span<const double> t, std::span<const double> v, double eps, int min_pts) {
    detail::check_dbscan_args(t.size(), eps, min_pts);
    if (t.size() != v.size()) throw Error(ErrorCode::InvalidConfig, "dbscan_2d", "coordinate size mismatch");
    if (!std::is_sorted(t.begin(), t.end())) throw Error(ErrorCode::InvalidConfig, "dbscan_2d", "points must be sorted by t");
    const std::size_t n = t.size();
    const double eps2 = eps * eps;

    auto neighbors = [&](std::size_t i) {
        std::vector<std::size_t> out;
        std::size_t j = i;
        while (j > 0 && t[i] - t[j - 1] <= eps) --j;
        for (; j < n && t[j] - t[i] <= eps; ++j) {
            const double dt = t[j] - t[i], dv = v[j] - v[i];
            if (dt * dt + dv * dv <= eps2) out.push_back(j);
        }
        return out;
    };

    constexpr int kUnvisited = -2;
    std::vector<int> labels(n, kUnvisited);
    int n_clusters = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (labels[i] != kUnvisited) continue;
        auto nb = neighbors(i);
        if (static_cast<int>(nb.size()) < min_pts) {
            labels[i] = kNoise;
            continue;
        }
        const int id = n_clusters++;
        labels[i] = id;
        std::deque<std::size_t> queue(nb.begin(), nb.end());
        while (!queue.empty()) {
            const auto j = queue.front();
            queue.pop_front();
            if (labels[j] == kNoise) labels[j] = id;
            if (labels[j] != kUnvisited) continue;
            labels[j] = id;
            auto nj = neighbors(j);
            if (static_cast<int>(nj.size()) >= min_pts) queue.insert(queue.end(), nj.begin(), nj.end());
        }
    }
    return detail::collect(t, std::move(labels), n_clusters);
}

// Smallest |centroid_a - centroid_f| over all centroid pairs.
inline double cluster_distance(const ClusterSet& a, const ClusterSet& f) {
    if (a.clusters.empty()) throw Error(ErrorCode::NoCluster, "article");
    if (f.clusters.empty()) throw Error(ErrorCode::NoCluster, "fixture");
    double best = std::numeric_limits<double>::infinity();
    for (const auto& ca : a.clusters)
        for (const auto& cf : f.clusters) best = std::min(best, std::abs(ca.centroid - cf.centroid));
    return best;
}

namespace detail {

struct RssiFrame {
    double lo = kMinRssiDbm;
    double hi = kMaxRssiDbm;

    double scale(double r) const { return hi > lo ? (r - lo) / (hi - lo) : 0.0; }
};

template <class Map>
void extend_rssi(const Map& set, double& lo, double& hi) {
    for (const auto& [k, s] : set)
        for (const auto& p : s.points) {
            lo = std::min(lo, p.rssi_dbm);
            hi = std::max(hi, p.rssi_dbm);
        }
}

inline ClusterSet cluster_series(const ReadSeries& raw, const TimeFrame& frame, const RssiFrame& rssi,
                                 const ParamConfig& cfg) {
    const auto filtered = rssi_quantile_filter(raw, cfg.rssi_quantile_dbscan);
    const auto scaled = minmax_scale_time(filtered, frame);
    if (!cfg.cluster_on_rssi) return dbscan_1d(scaled.t, cfg.eps, cfg.min_pts);
    std::vector<double> v;
    v.reserve(scaled.rssi.size());
    for (double r : scaled.rssi) v.push_back(rssi.scale(r));
    return dbscan_2d(scaled.t, v, cfg.eps, cfg.min_pts);
}

}  // namespace detail

// Full DBSCAN pipeline: one time frame over all series, per-series RSSI
// quantile filter, clustering, centroid gaps. Pairs where either side has no
// cluster are left empty.
inline DistanceMatrix dbscan_engine(const std::map<ArticleKey, ReadSeries>& articles,
                                    const std::map<FixtureId, ReadSeries>& fixtures, const ParamConfig& cfg) {
    cfg.validate();
    std::int64_t lo = std::numeric_limits<std::int64_t>::max(), hi = std::numeric_limits<std::int64_t>::min();
    detail::extend_frame(articles, lo, hi);
    detail::extend_frame(fixtures, lo, hi);
    const auto frame = detail::make_frame(lo, hi);

    detail::RssiFrame rssi{0.0, kMinRssiDbm};
    detail::extend_rssi(articles, rssi.lo, rssi.hi);
    detail::extend_rssi(fixtures, rssi.lo, rssi.hi);

    DistanceMatrix m;
    std::vector<ClusterSet> article_clusters, fixture_clusters;
    for (const auto& [k, s] : articles) {
        m.articles.push_back(k);
        article_clusters.push_back(s.empty() ? ClusterSet{} : detail::cluster_series(s, frame, rssi, cfg));
    }
    for (const auto& [f, s] : fixtures) {
        m.fixtures.push_back(f);
        fixture_clusters.push_back(s.empty() ? ClusterSet{} : detail::cluster_series(s, frame, rssi, cfg));
    }
    m.values.assign(m.articles.size() * m.fixtures.size(), std::nullopt);
    for (std::size_t i = 0; i < m.articles.size(); ++i) {
        if (article_clusters[i].clusters.empty()) continue;
        for (std::size_t j = 0; j < m.fixtures.size(); ++j) {
            if (fixture_clusters[j].clusters.empty()) continue;
            m.at(i, j) = cluster_distance(article_clusters[i], fixture_clusters[j]);
        }
    }
    return m;
}

}  // namespace shelfmap
