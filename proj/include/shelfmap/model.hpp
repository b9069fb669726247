#pragma once
// Domain types shared by all modules: read events, tag registry, series,
// tuning parameters, assignment distributions and the evaluation grid.

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "shelfmap/error.hpp"

namespace shelfmap {

using FixtureId = std::string;
using ZoneId = std::string;

// One tag response as recorded by the handheld reader.
struct ReadEvent {
    std::string epc;
    std::int64_t t_ms = 0;
    double rssi_dbm = 0.0;

    bool operator==(const ReadEvent&) const = default;
};

inline constexpr double kMinRssiDbm = -100.0;
inline constexpr double kMaxRssiDbm = 0.0;

inline bool valid_event(const ReadEvent& e) {
    return e.t_ms >= 0 && e.rssi_dbm >= kMinRssiDbm && e.rssi_dbm <= kMaxRssiDbm;
}

// Aggregation key for item reads. Color is only set in color-aware mode.
struct ArticleKey {
    std::string article_id;
    std::optional<std::string> color;

    auto operator<=>(const ArticleKey&) const = default;
    bool operator==(const ArticleKey&) const = default;

    ArticleKey without_color() const { return ArticleKey{article_id, std::nullopt}; }
};

inline std::string to_string(const ArticleKey& k) {
    return k.color ? k.article_id + "/" + *k.color : k.article_id;
}

enum class Session { S0, S1 };

inline std::string to_string(Session s) { return s == Session::S0 ? "S0" : "S1"; }

struct Stocktake {
    std::string id;
    Session session = Session::S0;
    std::vector<ReadEvent> events;
};

struct TagRegistry {
    std::map<std::string, ArticleKey> item_map;        // epc -> article
    std::map<std::string, FixtureId> reference_map;    // epc -> fixture
    std::map<FixtureId, FixtureId> fixture_groups;     // fixture -> logical fixture
    std::map<FixtureId, ZoneId> zone_map;              // fixture -> zone

    // Fixtures carrying at least one reference tag.
    std::set<FixtureId> fixtures() const {
        std::set<FixtureId> out;
        for (const auto& [epc, f] : reference_map) out.insert(f);
        return out;
    }

    FixtureId logical(const FixtureId& f) const {
        auto it = fixture_groups.find(f);
        return it == fixture_groups.end() ? f : it->second;
    }

    std::set<FixtureId> logical_fixtures() const {
        std::set<FixtureId> out;
        for (const auto& [epc, f] : reference_map) out.insert(logical(f));
        return out;
    }
};

struct Violation {
    enum class Kind { DuplicateEpc, UnknownFixture, EmptyArticleId, EmptyFixtureId };
    Kind kind;
    std::string subject;

    bool operator==(const Violation&) const = default;
};

inline std::string to_string(const Violation& v) {
    switch (v.kind) {
        case Violation::Kind::DuplicateEpc: return "DuplicateEpc(" + v.subject + ")";
        case Violation::Kind::UnknownFixture: return "UnknownFixture(" + v.subject + ")";
        case Violation::Kind::EmptyArticleId: return "EmptyArticleId(" + v.subject + ")";
        case Violation::Kind::EmptyFixtureId: return "EmptyFixtureId(" + v.subject + ")";
    }
    return {};
}

// Zone entries may name either a tagged fixture or a logical fixture produced by
// fixture_groups, since predictions are made at the logical level.
inline std::vector<Violation> validate_registry(const TagRegistry& reg) {
    std::vector<Violation> out;
    for (const auto& [epc, key] : reg.item_map) {
        if (reg.reference_map.count(epc)) out.push_back({Violation::Kind::DuplicateEpc, epc});
        if (key.article_id.empty()) out.push_back({Violation::Kind::EmptyArticleId, epc});
    }
    for (const auto& [epc, f] : reg.reference_map)
        if (f.empty()) out.push_back({Violation::Kind::EmptyFixtureId, epc});

    const auto tagged = reg.fixtures();
    for (const auto& [f, logical] : reg.fixture_groups)
        if (!tagged.count(f)) out.push_back({Violation::Kind::UnknownFixture, f});

    const auto logical = reg.logical_fixtures();
    for (const auto& [f, zone] : reg.zone_map)
        if (!tagged.count(f) && !logical.count(f))
            out.push_back({Violation::Kind::UnknownFixture, f});
    return out;
}

struct ReadPoint {
    std::int64_t t_ms = 0;
    double rssi_dbm = 0.0;

    bool operator==(const ReadPoint&) const = default;
};

// Time-ordered reads of one article key or one (logical) fixture.
struct ReadSeries {
    std::vector<ReadPoint> points;

    bool empty() const { return points.empty(); }
    std::size_t size() const { return points.size(); }
    bool operator==(const ReadSeries&) const = default;
};

enum class DtwCost { Absolute, Squared };

// Tuning bundle for both distance engines.
struct ParamConfig {
    double rssi_quantile_dbscan = 0.8;
    double eps = 0.085;
    int min_pts = 8;
    double rssi_quantile_dtw = 0.4;
    double resample_s = 0.2;
    int dtw_window = 9;
    double rssi_shift = 100.0;
    // Cluster on (time, scaled RSSI) instead of time alone.
    bool cluster_on_rssi = false;
    DtwCost dtw_cost = DtwCost::Absolute;

    bool operator==(const ParamConfig&) const = default;

    static ParamConfig for_session(Session s) {
        ParamConfig c;
        if (s == Session::S1) {
            c.rssi_quantile_dbscan = 0.77;
            c.eps = 0.068;
            c.min_pts = 7;
            c.rssi_quantile_dtw = 0.5;
            c.resample_s = 0.1;
            c.dtw_window = 12;
        }
        return c;
    }

    // Throws InvalidConfig naming the first offending field.
    void validate() const {
        auto bad = [](const char* field) { throw Error(ErrorCode::InvalidConfig, field); };
        if (!(rssi_quantile_dbscan >= 0.0 && rssi_quantile_dbscan < 1.0)) bad("rssi_quantile_dbscan");
        if (!(eps > 0.0)) bad("eps");
        if (min_pts < 1) bad("min_pts");
        if (!(rssi_quantile_dtw >= 0.0 && rssi_quantile_dtw < 1.0)) bad("rssi_quantile_dtw");
        if (!(resample_s > 0.0)) bad("resample_s");
        if (dtw_window < 0) bad("dtw_window");
    }
};

// Per-article probability vector over fixtures.
struct AssignmentDistribution {
    ArticleKey article;
    std::map<FixtureId, double> probs;
    double certainty = 0.0;
};

// Article x fixture distances. An empty entry marks a pair without a distance
// (one side clustered to pure noise).
struct DistanceMatrix {
    std::vector<ArticleKey> articles;
    std::vector<FixtureId> fixtures;
    std::vector<std::optional<double>> values;  // row-major, articles x fixtures

    DistanceMatrix() = default;
    DistanceMatrix(std::vector<ArticleKey> a, std::vector<FixtureId> f)
        : articles(std::move(a)), fixtures(std::move(f)), values(articles.size() * fixtures.size()) {}

    std::optional<double>& at(std::size_t i, std::size_t j) { return values[i * fixtures.size() + j]; }
    const std::optional<double>& at(std::size_t i, std::size_t j) const { return values[i * fixtures.size() + j]; }
};

struct GridCell {
    int x = 0;
    int y = 0;

    bool operator==(const GridCell&) const = default;
};

struct FixtureGrid {
    std::map<FixtureId, GridCell> cells;
};

}  // namespace shelfmap
