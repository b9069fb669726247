#pragma once
// Loaders and writers for the canonical CSV formats, plus an adapter that
// rewrites foreign stocktake exports into the canonical schema.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "shelfmap/csv.hpp"
#include "shelfmap/model.hpp"

namespace shelfmap {

using GroundTruth = std::map<ArticleKey, FixtureId>;

struct SalesRecord {
    ArticleKey article;
    std::int64_t revenue_cents = 0;
    std::int64_t units = 0;

    bool operator==(const SalesRecord&) const = default;
};

inline constexpr std::string_view kStocktakeHeader = "epc,t_ms,rssi_dbm";
inline constexpr std::string_view kRegistryHeader = "epc,role,article_id,color,fixture_id";
inline constexpr std::string_view kGridHeader = "fixture_id,grid_x,grid_y";
inline constexpr std::string_view kZonesHeader = "fixture_id,zone_id";
inline constexpr std::string_view kGroupsHeader = "fixture_id,logical_fixture_id";
inline constexpr std::string_view kTruthHeader = "article_id,color,fixture_id";
inline constexpr std::string_view kSalesHeader = "article_id,color,revenue,units";

namespace detail {

[[noreturn]] inline void malformed(std::size_t line_no, const std::string& why) {
    throw Error(ErrorCode::MalformedRow, std::to_string(line_no), why);
}

inline ReadEvent parse_event(const csv::Row& r) {
    const auto& f = r.fields;
    if (f[0].empty()) malformed(r.line_no, "empty epc");
    auto t = csv::parse_int<std::int64_t>(f[1]);
    if (!t || *t < 0) malformed(r.line_no, "t_ms must be a non-negative integer");
    auto rssi = csv::parse_double(f[2]);
    if (!rssi || *rssi < kMinRssiDbm || *rssi > kMaxRssiDbm)
        malformed(r.line_no, "rssi_dbm outside [-100, 0]");
    return ReadEvent{f[0], *t, *rssi};
}

inline void stable_sort_events(std::vector<ReadEvent>& events) {
    std::stable_sort(events.begin(), events.end(),
                     [](const ReadEvent& a, const ReadEvent& b) { return a.t_ms < b.t_ms; });
}

// Inserts key -> value, tolerating exact repeats and rejecting conflicts.
template <class Map, class V>
void bind_once(Map& m, const std::string& key, V value) {
    auto [it, inserted] = m.emplace(key, value);
    if (!inserted && !(it->second == value)) throw Error(ErrorCode::ConflictingBinding, key);
}

}  // namespace detail

inline Stocktake load_stocktake(const std::string& path, Session session, std::string id = {}) {
    auto rows = csv::parse(path, kStocktakeHeader);
    if (rows.empty()) throw Error(ErrorCode::EmptyStocktake, path);
    Stocktake st;
    st.id = id.empty() ? path : std::move(id);
    st.session = session;
    st.events.reserve(rows.size());
    for (const auto& r : rows) st.events.push_back(detail::parse_event(r));
    detail::stable_sort_events(st.events);
    return st;
}

inline void check_registry(const TagRegistry& reg) {
    if (reg.reference_map.empty()) throw Error(ErrorCode::NoReferenceTags, "");
    auto violations = validate_registry(reg);
    if (!violations.empty()) {
        std::string all;
        for (const auto& v : violations) all += (all.empty() ? "" : ", ") + to_string(v);
        throw Error(ErrorCode::InvalidRegistry, violations.front().subject, all);
    }
}

inline TagRegistry load_registry(const std::string& path) {
    TagRegistry reg;
    // role per epc, to detect an epc listed as both item and ref
    std::map<std::string, std::string> roles;
    for (const auto& r : csv::parse(path, kRegistryHeader)) {
        const auto& f = r.fields;
        const auto& epc = f[0];
        if (epc.empty()) detail::malformed(r.line_no, "empty epc");
        detail::bind_once(roles, epc, f[1]);
        if (f[1] == "item") {
            if (f[2].empty()) detail::malformed(r.line_no, "item without article_id");
            detail::bind_once(reg.item_map, epc, ArticleKey{f[2], csv::opt_field(f[3])});
        } else if (f[1] == "ref") {
            if (f[4].empty()) detail::malformed(r.line_no, "ref without fixture_id");
            detail::bind_once(reg.reference_map, epc, f[4]);
        } else {
            detail::malformed(r.line_no, "role must be 'item' or 'ref'");
        }
    }
    check_registry(reg);
    return reg;
}

namespace detail {

inline std::map<FixtureId, std::string> load_pairs(const std::string& path, std::string_view header) {
    std::map<FixtureId, std::string> out;
    for (const auto& r : csv::parse(path, header)) {
        if (r.fields[0].empty() || r.fields[1].empty()) malformed(r.line_no, "empty id");
        bind_once(out, r.fields[0], r.fields[1]);
    }
    return out;
}

}  // namespace detail

inline std::map<FixtureId, ZoneId> load_zones(const std::string& path) {
    return detail::load_pairs(path, kZonesHeader);
}

inline std::map<FixtureId, FixtureId> load_groups(const std::string& path) {
    return detail::load_pairs(path, kGroupsHeader);
}

inline FixtureGrid load_grid(const std::string& path) {
    FixtureGrid grid;
    for (const auto& r : csv::parse(path, kGridHeader)) {
        auto x = csv::parse_int<int>(r.fields[1]);
        auto y = csv::parse_int<int>(r.fields[2]);
        if (r.fields[0].empty() || !x || !y) detail::malformed(r.line_no, "bad grid cell");
        detail::bind_once(grid.cells, r.fields[0], GridCell{*x, *y});
    }
    return grid;
}

// Parses without cross-checking ids.
inline GroundTruth load_ground_truth(const std::string& path) {
    GroundTruth truth;
    for (const auto& r : csv::parse(path, kTruthHeader)) {
        const auto& f = r.fields;
        if (f[0].empty() || f[2].empty()) detail::malformed(r.line_no, "empty id");
        ArticleKey key{f[0], csv::opt_field(f[1])};
        auto [it, inserted] = truth.emplace(key, f[2]);
        if (!inserted && it->second != f[2]) throw Error(ErrorCode::ConflictingBinding, to_string(key));
    }
    return truth;
}

// Every fixture must be tagged (or a logical fixture) and every article must
// appear in the registry.
inline GroundTruth load_ground_truth(const std::string& path, const TagRegistry& reg) {
    auto truth = load_ground_truth(path);
    const auto tagged = reg.fixtures();
    const auto logical = reg.logical_fixtures();
    std::set<ArticleKey> known;
    for (const auto& [epc, key] : reg.item_map) {
        known.insert(key);
        known.insert(key.without_color());
    }
    for (const auto& [key, f] : truth) {
        if (!known.count(key)) throw Error(ErrorCode::UnknownId, to_string(key));
        if (!tagged.count(f) && !logical.count(f)) throw Error(ErrorCode::UnknownId, f);
    }
    return truth;
}

inline std::vector<SalesRecord> load_sales(const std::string& path) {
    std::vector<SalesRecord> out;
    for (const auto& r : csv::parse(path, kSalesHeader)) {
        const auto& f = r.fields;
        if (f[0].empty()) detail::malformed(r.line_no, "empty article_id");
        auto cents = csv::parse_fixed(f[2], 2);
        auto units = csv::parse_int<std::int64_t>(f[3]);
        if (!cents || *cents < 0) detail::malformed(r.line_no, "revenue must be a non-negative amount");
        if (!units || *units < 0) detail::malformed(r.line_no, "units must be a non-negative integer");
        out.push_back({ArticleKey{f[0], csv::opt_field(f[1])}, *cents, *units});
    }
    return out;
}

// ---- writers ----

inline std::string to_csv(const Stocktake& st) {
    std::string out(kStocktakeHeader);
    out += '\n';
    for (const auto& e : st.events)
        out += e.epc + "," + std::to_string(e.t_ms) + "," + csv::format_double(e.rssi_dbm) + "\n";
    return out;
}

inline std::string to_csv(const TagRegistry& reg) {
    std::string out(kRegistryHeader);
    out += '\n';
    for (const auto& [epc, key] : reg.item_map)
        out += epc + ",item," + key.article_id + "," + key.color.value_or("") + ",\n";
    for (const auto& [epc, f] : reg.reference_map) out += epc + ",ref,,," + f + "\n";
    return out;
}

inline std::string to_csv(const FixtureGrid& grid) {
    std::string out(kGridHeader);
    out += '\n';
    for (const auto& [f, c] : grid.cells)
        out += f + "," + std::to_string(c.x) + "," + std::to_string(c.y) + "\n";
    return out;
}

inline std::string to_csv(const GroundTruth& truth) {
    std::string out(kTruthHeader);
    out += '\n';
    for (const auto& [key, f] : truth) out += key.article_id + "," + key.color.value_or("") + "," + f + "\n";
    return out;
}

inline std::string to_csv(const std::vector<SalesRecord>& sales) {
    std::string out(kSalesHeader);
    out += '\n';
    for (const auto& s : sales)
        out += s.article.article_id + "," + s.article.color.value_or("") + "," +
               csv::format_cents(s.revenue_cents) + "," + std::to_string(s.units) + "\n";
    return out;
}

inline std::string zones_to_csv(const std::map<FixtureId, ZoneId>& zones) {
    std::string out(kZonesHeader);
    out += '\n';
    for (const auto& [f, z] : zones) out += f + "," + z + "\n";
    return out;
}

inline std::string groups_to_csv(const std::map<FixtureId, FixtureId>& groups) {
    std::string out(kGroupsHeader);
    out += '\n';
    for (const auto& [f, g] : groups) out += f + "," + g + "\n";
    return out;
}

// ---- adapter for foreign stocktake exports ----

struct StocktakeAdapter {
    char delimiter = ',';
    std::string epc_column = "epc";
    std::string time_column = "t_ms";
    std::string rssi_column = "rssi_dbm";
    // Unit of the foreign timestamp column: "ms", "s" or "us".
    std::string time_unit = "ms";
};

// Converts a foreign export into canonical stocktake CSV text. Timestamps that
// do not land on a whole millisecond are rejected.
inline std::string adapt_stocktake(const std::string& path, const StocktakeAdapter& spec) {
    auto ls = csv::lines(csv::read_file(path));
    if (ls.empty()) throw Error(ErrorCode::EmptyStocktake, path);
    auto header = csv::split(ls.front().second, spec.delimiter);
    auto column = [&](const std::string& name) {
        auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) throw Error(ErrorCode::BadHeader, path, "missing column '" + name + "'");
        return static_cast<std::size_t>(it - header.begin());
    };
    const auto ci = column(spec.epc_column), ti = column(spec.time_column), ri = column(spec.rssi_column);

    Stocktake st;
    for (std::size_t i = 1; i < ls.size(); ++i) {
        auto f = csv::split(ls[i].second, spec.delimiter);
        const auto line_no = ls[i].first;
        if (f.size() != header.size()) detail::malformed(line_no, "wrong field count");
        std::optional<std::int64_t> t;
        if (spec.time_unit == "ms") {
            t = csv::parse_fixed(f[ti], 0);
        } else if (spec.time_unit == "s") {
            t = csv::parse_fixed(f[ti], 3);
        } else if (spec.time_unit == "us") {
            auto us = csv::parse_fixed(f[ti], 0);
            if (us && *us % 1000 == 0) t = *us / 1000;
        } else {
            throw Error(ErrorCode::InvalidConfig, "time_unit", spec.time_unit);
        }
        if (!t || *t < 0) detail::malformed(line_no, "timestamp not a whole non-negative millisecond");
        auto rssi = csv::parse_double(f[ri]);
        if (!rssi || *rssi < kMinRssiDbm || *rssi > kMaxRssiDbm) detail::malformed(line_no, "rssi outside [-100, 0]");
        if (f[ci].empty()) detail::malformed(line_no, "empty epc");
        st.events.push_back({f[ci], *t, *rssi});
    }
    detail::stable_sort_events(st.events);
    return to_csv(st);
}

}  // namespace shelfmap
