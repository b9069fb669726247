#pragma once
// JSON and CSV surfaces of the pipeline: assignment files, distribution JSON
// (also read back as history), parameter configs and grids, evaluation reports,
// money maps and simulator scenarios.

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "shelfmap/assign.hpp"
#include "shelfmap/csv.hpp"
#include "shelfmap/eval.hpp"
#include "shelfmap/ingest.hpp"
#include "shelfmap/sim.hpp"

namespace shelfmap {

using nlohmann::json;

inline constexpr std::string_view kAssignmentHeader = "article_id,color,fixture_id,probability,certainty";
inline constexpr std::string_view kMoneyMapHeader = "location_id,revenue,units";
inline constexpr std::string_view kUnassignedLocation = "unassigned";

inline json parse_json_file(const std::string& path) {
    try {
        return json::parse(csv::read_file(path));
    } catch (const json::exception& e) {
        throw Error(ErrorCode::InvalidConfig, path, e.what());
    }
}

inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

// ---- assignments ----

inline std::string assignments_to_csv(const AssignResult& r) {
    std::string out(kAssignmentHeader);
    out += '\n';
    for (const auto& [key, a] : r.assignments)
        out += key.article_id + "," + key.color.value_or("") + "," + a.fixture + "," +
               csv::format_double(a.dist.probs.at(a.fixture)) + "," + csv::format_double(a.dist.certainty) + "\n";
    return out;
}

inline Predictions load_assignments(const std::string& path) {
    Predictions out;
    for (const auto& r : csv::parse(path, kAssignmentHeader)) {
        const auto& f = r.fields;
        if (f[0].empty() || f[2].empty()) throw Error(ErrorCode::MalformedRow, std::to_string(r.line_no), "empty id");
        out[ArticleKey{f[0], csv::opt_field(f[1])}] = f[2];
    }
    return out;
}

inline json key_json(const ArticleKey& k) {
    return json{{"article_id", k.article_id}, {"color", k.color ? json(*k.color) : json(nullptr)}};
}

inline ArticleKey key_from_json(const json& j) {
    ArticleKey k{j.at("article_id").get<std::string>(), std::nullopt};
    if (j.contains("color") && !j.at("color").is_null()) k.color = j.at("color").get<std::string>();
    return k;
}

struct RunInfo {
    std::string stocktake;
    Session session = Session::S0;
    Engine engine = Engine::Dbscan;
    std::size_t unknown_epcs = 0;
};

inline json distributions_json(const AssignResult& r, const RunInfo& info) {
    json articles = json::array();
    for (const auto& [key, a] : r.assignments) {
        json entry = key_json(key);
        entry["fixture_id"] = a.fixture;
        entry["certainty"] = a.dist.certainty;
        entry["tie"] = a.tie;
        entry["fused"] = a.fused;
        json probs = json::object();
        for (const auto& [f, p] : a.dist.probs) probs[f] = p;
        entry["probs"] = std::move(probs);
        articles.push_back(std::move(entry));
    }
    json failed = json::array();
    for (const auto& k : r.failed) failed.push_back(key_json(k));
    return json{{"stocktake", info.stocktake},
                {"session", to_string(info.session)},
                {"engine", to_string(info.engine)},
                {"unknown_epcs", info.unknown_epcs},
                {"articles", std::move(articles)},
                {"unassigned", std::move(failed)}};
}

// Reads a distribution file as history. Certainty is recomputed from the
// probabilities rather than trusted.
inline History history_from_json(const json& j) {
    History out;
    try {
        for (const auto& entry : j.at("articles")) {
            AssignmentDistribution d;
            d.article = key_from_json(entry);
            for (const auto& [f, p] : entry.at("probs").items()) {
                const double v = p.get<double>();
                if (!(v >= 0.0)) throw Error(ErrorCode::InvalidConfig, f, "negative probability");
                d.probs[f] = v;
            }
            if (d.probs.empty()) throw Error(ErrorCode::InvalidConfig, to_string(d.article), "empty distribution");
            d.certainty = certainty(d.probs);
            out[d.article] = std::move(d);
        }
    } catch (const json::exception& e) {
        throw Error(ErrorCode::InvalidConfig, "history", e.what());
    }
    return out;
}

inline History load_history(const std::string& path) { return history_from_json(parse_json_file(path)); }

// ---- parameter configs ----

inline json config_json(const ParamConfig& c) {
    return json{{"rssi_quantile_dbscan", c.rssi_quantile_dbscan},
                {"eps", c.eps},
                {"min_pts", c.min_pts},
                {"rssi_quantile_dtw", c.rssi_quantile_dtw},
                {"resample_s", c.resample_s},
                {"dtw_window", c.dtw_window},
                {"rssi_shift", c.rssi_shift},
                {"cluster_on_rssi", c.cluster_on_rssi},
                {"dtw_cost", c.dtw_cost == DtwCost::Absolute ? "absolute" : "squared"}};
}

// Overrides fields of base that are present in j; unknown keys are rejected.
inline ParamConfig apply_config_json(ParamConfig base, const json& j) {
    try {
        for (const auto& [k, v] : j.items()) {
            if (k == "rssi_quantile_dbscan") base.rssi_quantile_dbscan = v.get<double>();
            else if (k == "eps") base.eps = v.get<double>();
            else if (k == "min_pts") base.min_pts = v.get<int>();
            else if (k == "rssi_quantile_dtw") base.rssi_quantile_dtw = v.get<double>();
            else if (k == "resample_s") base.resample_s = v.get<double>();
            else if (k == "dtw_window") base.dtw_window = v.get<int>();
            else if (k == "rssi_shift") base.rssi_shift = v.get<double>();
            else if (k == "cluster_on_rssi") base.cluster_on_rssi = v.get<bool>();
            else if (k == "dtw_cost") {
                const auto s = v.get<std::string>();
                if (s == "absolute") base.dtw_cost = DtwCost::Absolute;
                else if (s == "squared") base.dtw_cost = DtwCost::Squared;
                else throw Error(ErrorCode::InvalidConfig, "dtw_cost", s);
            } else {
                throw Error(ErrorCode::InvalidConfig, k, "unknown config key");
            }
        }
    } catch (const json::exception& e) {
        throw Error(ErrorCode::InvalidConfig, "config", e.what());
    }
    base.validate();
    return base;
}

inline ParamGrid param_grid_from_json(const json& j) {
    ParamGrid g;
    try {
        for (const auto& [k, v] : j.items()) {
            if (k == "rssi_quantile_dbscan") g.rssi_quantile_dbscan = v.get<std::vector<double>>();
            else if (k == "eps") g.eps = v.get<std::vector<double>>();
            else if (k == "min_pts") g.min_pts = v.get<std::vector<int>>();
            else if (k == "rssi_quantile_dtw") g.rssi_quantile_dtw = v.get<std::vector<double>>();
            else if (k == "resample_s") g.resample_s = v.get<std::vector<double>>();
            else if (k == "dtw_window") g.dtw_window = v.get<std::vector<int>>();
            else throw Error(ErrorCode::InvalidConfig, k, "unknown grid key");
        }
    } catch (const json::exception& e) {
        throw Error(ErrorCode::InvalidConfig, "grid", e.what());
    }
    return g;
}

inline json grid_search_json(const GridSearchResult& r) {
    json table = json::array();
    for (const auto& row : r.table)
        table.push_back({{"config", config_json(row.config)},
                         {"mean_accuracy", row.mean_accuracy},
                         {"mean_cheb_error", row.mean_cheb_error ? json(*row.mean_cheb_error) : json(nullptr)},
                         {"failed_runs", row.failed_runs}});
    return json{{"best", config_json(r.best_config())},
                {"best_index", r.best},
                {"best_mean_accuracy", r.table.at(r.best).mean_accuracy},
                {"table", std::move(table)}};
}

// ---- evaluation report ----

inline json null_or(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

// Accuracy statistics across one or more prediction sets against one truth.
// Chebyshev error is reported both pooled over every wrong prediction and as
// the mean of per-set means.
inline json evaluation_report(const std::vector<Predictions>& runs, const GroundTruth& truth,
                              const FixtureGrid* grid, const std::map<FixtureId, ZoneId>* zones) {
    std::vector<double> accs, zone_accs, pooled, per_run_means;
    json per_article = json::array();
    for (std::size_t i = 0; i < runs.size(); ++i) {
        const auto& pred = runs[i];
        accs.push_back(accuracy(pred, truth));
        if (zones) zone_accs.push_back(zone_accuracy(pred, truth, *zones));
        if (grid) {
            auto errs = chebyshev_errors(pred, truth, *grid);
            if (!errs.empty()) per_run_means.push_back(stats(errs).mean);
            pooled.insert(pooled.end(), errs.begin(), errs.end());
        }
        for (const auto& [key, f] : pred) {
            const auto& t = truth_of(truth, key);
            json entry = key_json(key);
            entry["run"] = i;
            entry["predicted"] = f;
            entry["truth"] = t;
            entry["correct"] = f == t;
            if (grid && f != t) entry["cheb_error"] = chebyshev(cell_of(*grid, f), cell_of(*grid, t));
            per_article.push_back(std::move(entry));
        }
    }
    const auto acc = stats(accs);
    json j{{"runs", runs.size()}, {"accuracy", acc.mean}, {"accuracy_std", acc.std}};
    std::optional<double> cheb_mean, cheb_std, cheb_run_mean;
    if (!pooled.empty()) {
        const auto s = stats(pooled);
        cheb_mean = s.mean;
        cheb_std = s.std;
    }
    if (!per_run_means.empty()) cheb_run_mean = stats(per_run_means).mean;
    j["cheb_error_mean"] = null_or(cheb_mean);
    j["cheb_error_std"] = null_or(cheb_std);
    j["cheb_error_mean_per_run"] = null_or(cheb_run_mean);
    if (zones) {
        const auto z = stats(zone_accs);
        j["zone_accuracy"] = z.mean;
        j["zone_accuracy_std"] = z.std;
    }
    j["per_article"] = std::move(per_article);
    return j;
}

// ---- money map ----

inline std::string money_map_to_csv(const MoneyMap& m) {
    std::string out(kMoneyMapHeader);
    out += '\n';
    for (const auto& [loc, t] : m.locations)
        out += loc + "," + csv::format_cents(t.revenue_cents) + "," + std::to_string(t.units) + "\n";
    if (!m.unassigned_articles.empty())
        out += std::string(kUnassignedLocation) + "," + csv::format_cents(m.unassigned.revenue_cents) + "," +
               std::to_string(m.unassigned.units) + "\n";
    return out;
}

// ---- simulator scenarios ----

inline json scenario_json(const sim::SimScenario& s) {
    json walk = json::array();
    for (const auto& w : s.walk) walk.push_back({{"fixture", w.fixture}, {"dwell_s", w.dwell_s}});
    return json{{"fixtures", s.fixtures},
                {"grid_cols", s.grid_cols},
                {"parts_per_fixture", s.parts_per_fixture},
                {"articles", s.articles},
                {"items_per_article", s.items_per_article},
                {"ref_tags", s.ref_tags},
                {"colors_per_article", s.colors_per_article},
                {"zones", s.zones},
                {"walk", std::move(walk)},
                {"dwell_s", s.dwell_s},
                {"transit_s", s.transit_s},
                {"read_rate_hz", s.read_rate_hz},
                {"s1_rate_factor", s.s1_rate_factor},
                {"read_prob", s.read_prob},
                {"cross_read_rate", s.cross_read_rate},
                {"rssi", {{"at_fixture_dbm", s.rssi.at_fixture_dbm},
                          {"decay_per_cell_db", s.rssi.decay_per_cell_db},
                          {"noise_sigma_db", s.rssi.noise_sigma_db}}},
                {"session", s.session == Session::S0 ? 0 : 1},
                {"seed", s.seed},
                {"start_ms", s.start_ms}};
}

inline sim::SimScenario scenario_from_json(const json& j) {
    sim::SimScenario s;
    try {
        auto get = [&j](const char* key, auto& field) {
            if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
        };
        get("fixtures", s.fixtures);
        get("grid_cols", s.grid_cols);
        get("parts_per_fixture", s.parts_per_fixture);
        get("articles", s.articles);
        get("items_per_article", s.items_per_article);
        get("ref_tags", s.ref_tags);
        get("colors_per_article", s.colors_per_article);
        get("zones", s.zones);
        get("dwell_s", s.dwell_s);
        get("transit_s", s.transit_s);
        get("read_rate_hz", s.read_rate_hz);
        get("s1_rate_factor", s.s1_rate_factor);
        get("read_prob", s.read_prob);
        get("cross_read_rate", s.cross_read_rate);
        get("seed", s.seed);
        get("start_ms", s.start_ms);
        if (j.contains("session")) s.session = j.at("session").get<int>() == 1 ? Session::S1 : Session::S0;
        if (j.contains("walk"))
            for (const auto& w : j.at("walk")) s.walk.push_back({w.at("fixture").get<int>(), w.at("dwell_s").get<double>()});
        if (j.contains("rssi")) {
            const auto& r = j.at("rssi");
            if (r.contains("at_fixture_dbm")) s.rssi.at_fixture_dbm = r.at("at_fixture_dbm").get<double>();
            if (r.contains("decay_per_cell_db")) s.rssi.decay_per_cell_db = r.at("decay_per_cell_db").get<double>();
            if (r.contains("noise_sigma_db")) s.rssi.noise_sigma_db = r.at("noise_sigma_db").get<double>();
        }
    } catch (const json::exception& e) {
        throw Error(ErrorCode::InvalidConfig, "scenario", e.what());
    }
    s.validate();
    return s;
}

}  // namespace shelfmap
