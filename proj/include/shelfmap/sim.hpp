#pragma once
// Seeded synthetic stocktakes: a handheld reader walks past fixtures, tags on
// the visited fixture answer at the read rate, tags elsewhere answer rarely
// and weaker. Used as ground-truth environment for end-to-end tests.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "shelfmap/ingest.hpp"
#include "shelfmap/model.hpp"

namespace shelfmap::sim {

// mt19937_64 with hand-rolled conversions so draws are identical across
// standard library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    bool bernoulli(double p) { return uniform() < p; }

    double normal(double mean, double sigma) {
        if (sigma == 0.0) return mean;
        if (spare_) {
            const double z = *spare_;
            spare_.reset();
            return mean + sigma * z;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = r * std::sin(2.0 * std::numbers::pi * u2);
        return mean + sigma * r * std::cos(2.0 * std::numbers::pi * u2);
    }

private:
    std::mt19937_64 gen_;
    std::optional<double> spare_;
};

struct WalkStep {
    int fixture = 0;  // 0-based physical fixture index
    double dwell_s = 0.0;

    bool operator==(const WalkStep&) const = default;
};

struct RssiModel {
    double at_fixture_dbm = -45.0;
    double decay_per_cell_db = 8.0;
    double noise_sigma_db = 3.0;

    bool operator==(const RssiModel&) const = default;
};

struct SimScenario {
    int fixtures = 10;
    int grid_cols = 5;
    int parts_per_fixture = 1;  // co-located parts, each tagged separately
    int articles = 27;
    int items_per_article = 4;
    int ref_tags = 74;          // spread round-robin over fixture parts
    int colors_per_article = 0; // > 0 places color variants on different fixtures
    int zones = 3;
    std::vector<WalkStep> walk; // empty: visit every fixture once, in order
    double dwell_s = 10.0;
    double transit_s = 1.0;
    double read_rate_hz = 2.0;  // per tag, Session 0
    double s1_rate_factor = 0.715;
    double read_prob = 0.9;     // answer probability of a tag on the visited fixture
    double cross_read_rate = 0.02;
    RssiModel rssi;
    Session session = Session::S0;
    std::uint64_t seed = 1;
    std::int64_t start_ms = 1'600'000'000'000;

    bool operator==(const SimScenario&) const = default;

    void validate() const {
        auto bad = [](const char* f) { throw Error(ErrorCode::InvalidConfig, f); };
        if (fixtures < 1) bad("fixtures");
        if (grid_cols < 1) bad("grid_cols");
        if (parts_per_fixture < 1) bad("parts_per_fixture");
        if (articles < 0) bad("articles");
        if (items_per_article < 1) bad("items_per_article");
        if (ref_tags < fixtures * parts_per_fixture) bad("ref_tags");
        if (colors_per_article < 0) bad("colors_per_article");
        if (zones < 1 || zones > fixtures) bad("zones");
        if (!(dwell_s > 0.0)) bad("dwell_s");
        if (!(transit_s >= 0.0)) bad("transit_s");
        if (!(read_rate_hz > 0.0)) bad("read_rate_hz");
        if (!(s1_rate_factor > 0.0 && s1_rate_factor <= 1.0)) bad("s1_rate_factor");
        if (!(read_prob >= 0.0 && read_prob <= 1.0)) bad("read_prob");
        if (!(cross_read_rate >= 0.0 && cross_read_rate <= 1.0)) bad("cross_read_rate");
        if (!(rssi.noise_sigma_db >= 0.0)) bad("rssi.noise_sigma_db");
        if (!(rssi.decay_per_cell_db >= 0.0)) bad("rssi.decay_per_cell_db");
        if (rssi.at_fixture_dbm > kMaxRssiDbm || rssi.at_fixture_dbm < kMinRssiDbm) bad("rssi.at_fixture_dbm");
        for (const auto& s : walk)
            if (s.fixture < 0 || s.fixture >= fixtures || !(s.dwell_s > 0.0)) bad("walk");
    }
};

// A lab-sized layout: 10 fixtures, 27 articles, 74 reference tags.
inline SimScenario lab_scenario(std::uint64_t seed, Session session = Session::S0) {
    SimScenario s;
    s.seed = seed;
    s.session = session;
    return s;
}

struct SimOutput {
    Stocktake stocktake;
    TagRegistry registry;
    GroundTruth truth;                          // article -> tagged fixture (part)
    FixtureGrid grid;                           // parts and logical fixtures
    std::map<FixtureId, ZoneId> zones;          // parts and logical fixtures
    std::map<FixtureId, FixtureId> groups;      // part -> logical fixture, empty without parts
};

namespace detail {

inline std::string padded(const std::string& prefix, int value, int total) {
    const auto width = std::to_string(std::max(total, 1)).size();
    auto digits = std::to_string(value);
    if (digits.size() < width) digits.insert(0, width - digits.size(), '0');
    return prefix + digits;
}

inline const std::vector<std::string>& palette() {
    static const std::vector<std::string> colors{"red", "blue", "green", "black", "white", "grey", "navy", "beige"};
    return colors;
}

struct Tag {
    std::string epc;
    int fixture = 0;  // physical fixture index
};

struct RawRead {
    double t_ms;
    std::size_t order;
    std::size_t tag;
    double rssi;
};

}  // namespace detail

inline SimOutput generate(const SimScenario& sc) {
    sc.validate();
    Rng rng(sc.seed);
    SimOutput out;
    const int parts = sc.parts_per_fixture;

    auto logical_id = [&](int f) { return detail::padded("F", f + 1, sc.fixtures); };
    auto part_id = [&](int f, int p) {
        return parts == 1 ? logical_id(f) : logical_id(f) + "-" + std::to_string(p + 1);
    };

    for (int f = 0; f < sc.fixtures; ++f) {
        const GridCell cell{f % sc.grid_cols, f / sc.grid_cols};
        const ZoneId zone = "Z" + std::to_string(f * sc.zones / sc.fixtures + 1);
        out.grid.cells[logical_id(f)] = cell;
        out.zones[logical_id(f)] = zone;
        for (int p = 0; p < parts && parts > 1; ++p) {
            out.grid.cells[part_id(f, p)] = cell;
            out.zones[part_id(f, p)] = zone;
            out.groups[part_id(f, p)] = logical_id(f);
        }
    }

    std::vector<detail::Tag> tags;
    const int variants = std::max(sc.colors_per_article, 1);
    const int total_items = sc.articles * variants * sc.items_per_article;
    int item_no = 0;
    for (int a = 0; a < sc.articles; ++a) {
        for (int v = 0; v < variants; ++v) {
            const int slot = a * variants + v;
            const int f = slot % sc.fixtures;
            const int p = (slot / sc.fixtures) % parts;
            ArticleKey key{detail::padded("A", a + 1, sc.articles), std::nullopt};
            if (sc.colors_per_article > 0) {
                const auto& pal = detail::palette();
                key.color = v < static_cast<int>(pal.size()) ? pal[static_cast<std::size_t>(v)] : "c" + std::to_string(v + 1);
            }
            out.truth[key] = part_id(f, p);
            for (int i = 0; i < sc.items_per_article; ++i) {
                auto epc = detail::padded("I", ++item_no, total_items);
                out.registry.item_map[epc] = key;
                tags.push_back({epc, f});
            }
        }
    }
    const int n_parts = sc.fixtures * parts;
    for (int r = 0; r < sc.ref_tags; ++r) {
        const int slot = r % n_parts;
        const int f = slot / parts, p = slot % parts;
        auto epc = detail::padded("R", r + 1, sc.ref_tags);
        out.registry.reference_map[epc] = part_id(f, p);
        tags.push_back({epc, f});
    }

    std::vector<WalkStep> walk = sc.walk;
    if (walk.empty())
        for (int f = 0; f < sc.fixtures; ++f) walk.push_back({f, sc.dwell_s});

    const double rate = sc.read_rate_hz * (sc.session == Session::S1 ? sc.s1_rate_factor : 1.0);
    const double period_ms = 1000.0 / rate;
    std::vector<detail::RawRead> reads;
    double t0 = static_cast<double>(sc.start_ms);
    for (const auto& step : walk) {
        const double t1 = t0 + step.dwell_s * 1000.0;
        const GridCell here{step.fixture % sc.grid_cols, step.fixture / sc.grid_cols};
        for (std::size_t ti = 0; ti < tags.size(); ++ti) {
            const auto& tag = tags[ti];
            const GridCell there{tag.fixture % sc.grid_cols, tag.fixture / sc.grid_cols};
            const bool local = tag.fixture == step.fixture;
            const int cells = std::max(std::abs(here.x - there.x), std::abs(here.y - there.y));
            const double mean = sc.rssi.at_fixture_dbm - sc.rssi.decay_per_cell_db * cells;
            const double p_answer = local ? sc.read_prob : sc.cross_read_rate;
            for (double t = t0 + rng.uniform(0.0, period_ms); t < t1; t += period_ms) {
                const double jittered = t + rng.uniform(-0.25, 0.25) * period_ms;
                if (!rng.bernoulli(p_answer)) continue;
                double rssi = rng.normal(mean, sc.rssi.noise_sigma_db);
                rssi = std::clamp(std::round(rssi * 10.0) / 10.0, kMinRssiDbm, kMaxRssiDbm);
                reads.push_back({std::clamp(jittered, t0, t1), reads.size(), ti, rssi});
            }
        }
        t0 = t1 + sc.transit_s * 1000.0;
    }
    std::sort(reads.begin(), reads.end(), [](const auto& a, const auto& b) {
        return a.t_ms < b.t_ms || (a.t_ms == b.t_ms && a.order < b.order);
    });

    out.stocktake.id = "sim-" + std::to_string(sc.seed);
    out.stocktake.session = sc.session;
    out.stocktake.events.reserve(reads.size());
    std::int64_t last = -1;
    for (const auto& r : reads) {
        // a reader reports one tag at a time: strictly increasing milliseconds
        const auto t = std::max(static_cast<std::int64_t>(std::llround(r.t_ms)), last + 1);
        out.stocktake.events.push_back({tags[r.tag].epc, t, r.rssi});
        last = t;
    }
    return out;
}

// Staff-style corruption of a stocktake: dropped reads and item reads shifted
// in time as if scanned while facing a neighbouring fixture.
struct NoiseProfile {
    double item_drop_rate = 0.0;
    double ref_drop_rate = 0.0;
    double interleave_rate = 0.0;  // fraction of item reads moved in time
    double interleave_shift_s = 0.0;  // shift magnitude, scaled by U(0.5, 1.5), random sign
    std::uint64_t seed = 1;

    bool operator==(const NoiseProfile&) const = default;
};

inline Stocktake degrade(const Stocktake& st, const TagRegistry& reg, const NoiseProfile& profile) {
    if (profile == NoiseProfile{.seed = profile.seed}) return st;
    Rng rng(profile.seed);
    std::int64_t lo = 0, hi = 0;
    if (!st.events.empty()) {
        auto [mn, mx] = std::minmax_element(st.events.begin(), st.events.end(),
                                            [](const auto& a, const auto& b) { return a.t_ms < b.t_ms; });
        lo = mn->t_ms;
        hi = mx->t_ms;
    }
    Stocktake out{st.id, st.session, {}};
    out.events.reserve(st.events.size());
    for (const auto& e : st.events) {
        const bool item = reg.item_map.count(e.epc) > 0;
        const bool ref = reg.reference_map.count(e.epc) > 0;
        if (item && rng.bernoulli(profile.item_drop_rate)) continue;
        if (ref && rng.bernoulli(profile.ref_drop_rate)) continue;
        auto moved = e;
        if (item && rng.bernoulli(profile.interleave_rate)) {
            const double sign = rng.bernoulli(0.5) ? 1.0 : -1.0;
            const double shift = sign * profile.interleave_shift_s * 1000.0 * rng.uniform(0.5, 1.5);
            moved.t_ms = std::clamp(e.t_ms + static_cast<std::int64_t>(std::llround(shift)), lo, hi);
        }
        out.events.push_back(std::move(moved));
    }
    std::stable_sort(out.events.begin(), out.events.end(),
                     [](const auto& a, const auto& b) { return a.t_ms < b.t_ms; });
    return out;
}

}  // namespace shelfmap::sim
