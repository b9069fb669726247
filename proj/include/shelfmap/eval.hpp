#pragma once
// Evaluation metrics (accuracy, Chebyshev grid error, zone accuracy), Money
// Mapping and the exhaustive parameter grid search.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <future>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "shelfmap/ingest.hpp"
#include "shelfmap/pipeline.hpp"

namespace shelfmap {

using Predictions = std::map<ArticleKey, FixtureId>;

inline const FixtureId& truth_of(const GroundTruth& truth, const ArticleKey& key) {
    auto it = truth.find(key);
    if (it == truth.end()) throw Error(ErrorCode::MissingTruth, to_string(key));
    return it->second;
}

// Fraction of predicted articles placed on their true fixture. An empty
// prediction set scores 0.
inline double accuracy(const Predictions& predicted, const GroundTruth& truth) {
    if (predicted.empty()) return 0.0;
    std::size_t correct = 0;
    for (const auto& [key, f] : predicted)
        if (truth_of(truth, key) == f) ++correct;
    return static_cast<double>(correct) / static_cast<double>(predicted.size());
}

struct Stats {
    double mean = 0.0;
    double std = 0.0;  // sample standard deviation, 0 for fewer than two values
    std::size_t count = 0;
};

inline Stats stats(const std::vector<double>& xs) {
    Stats s;
    s.count = xs.size();
    if (xs.empty()) return s;
    double sum = 0.0;
    for (double x : xs) sum += x;
    s.mean = sum / static_cast<double>(xs.size());
    if (xs.size() > 1) {
        double ss = 0.0;
        for (double x : xs) ss += (x - s.mean) * (x - s.mean);
        s.std = std::sqrt(ss / static_cast<double>(xs.size() - 1));
    }
    return s;
}

inline int chebyshev(const GridCell& a, const GridCell& b) {
    return std::max(std::abs(a.x - b.x), std::abs(a.y - b.y));
}

inline const GridCell& cell_of(const FixtureGrid& grid, const FixtureId& f) {
    auto it = grid.cells.find(f);
    if (it == grid.cells.end()) throw Error(ErrorCode::MissingCell, f);
    return it->second;
}

// Grid distance of each wrong prediction, in article order.
inline std::vector<double> chebyshev_errors(const Predictions& predicted, const GroundTruth& truth,
                                            const FixtureGrid& grid) {
    std::vector<double> out;
    for (const auto& [key, f] : predicted) {
        const auto& t = truth_of(truth, key);
        if (t == f) continue;
        out.push_back(static_cast<double>(chebyshev(cell_of(grid, f), cell_of(grid, t))));
    }
    return out;
}

// Mean Chebyshev distance over wrong predictions only; nullopt when every
// prediction is correct.
inline std::optional<Stats> chebyshev_error(const Predictions& predicted, const GroundTruth& truth,
                                            const FixtureGrid& grid) {
    auto errs = chebyshev_errors(predicted, truth, grid);
    if (errs.empty()) return std::nullopt;
    return stats(errs);
}

inline const ZoneId& zone_of(const std::map<FixtureId, ZoneId>& zones, const FixtureId& f) {
    auto it = zones.find(f);
    if (it == zones.end()) throw Error(ErrorCode::UnmappedFixture, f);
    return it->second;
}

inline double zone_accuracy(const Predictions& predicted, const GroundTruth& truth,
                            const std::map<FixtureId, ZoneId>& zones) {
    if (predicted.empty()) return 0.0;
    std::size_t correct = 0;
    for (const auto& [key, f] : predicted)
        if (zone_of(zones, f) == zone_of(zones, truth_of(truth, key))) ++correct;
    return static_cast<double>(correct) / static_cast<double>(predicted.size());
}

// Maps truth onto logical fixtures.
inline GroundTruth lift_truth(const GroundTruth& truth, const std::map<FixtureId, FixtureId>& groups) {
    GroundTruth out;
    for (const auto& [key, f] : truth) {
        auto it = groups.find(f);
        out.emplace(key, it == groups.end() ? f : it->second);
    }
    return out;
}

// ---- money mapping ----

struct Totals {
    std::int64_t revenue_cents = 0;
    std::int64_t units = 0;

    Totals& operator+=(const Totals& o) {
        revenue_cents += o.revenue_cents;
        units += o.units;
        return *this;
    }
    bool operator==(const Totals&) const = default;
};

enum class Level { Fixture, Zone };

struct MoneyMap {
    std::map<std::string, Totals> locations;
    Totals unassigned;
    std::vector<ArticleKey> unassigned_articles;
};

// Sales rows resolve to a prediction by exact key, then by article id alone
// when predictions were made without color.
inline MoneyMap money_map(const Predictions& predicted, const std::vector<SalesRecord>& sales, Level level,
                          const std::map<FixtureId, ZoneId>* zones = nullptr) {
    if (level == Level::Zone && !zones) throw Error(ErrorCode::InvalidConfig, "zones", "zone level needs a zone map");
    MoneyMap out;
    // every predicted location appears, even without sales
    for (const auto& [key, f] : predicted) out.locations[level == Level::Zone ? zone_of(*zones, f) : f];
    for (const auto& s : sales) {
        auto it = predicted.find(s.article);
        if (it == predicted.end()) it = predicted.find(s.article.without_color());
        const Totals t{s.revenue_cents, s.units};
        if (it == predicted.end()) {
            out.unassigned += t;
            out.unassigned_articles.push_back(s.article);
            continue;
        }
        out.locations[level == Level::Zone ? zone_of(*zones, it->second) : it->second] += t;
    }
    return out;
}

// ---- grid search ----

struct LabeledStocktake {
    Stocktake stocktake;
    TagRegistry registry;
    GroundTruth truth;
    std::optional<FixtureGrid> grid;
    bool color_aware = false;
};

struct GridRow {
    ParamConfig config;
    double mean_accuracy = 0.0;
    std::optional<double> mean_cheb_error;  // pooled over wrong predictions
    std::size_t failed_runs = 0;
};

struct GridSearchResult {
    std::vector<GridRow> table;
    std::size_t best = 0;

    const ParamConfig& best_config() const { return table.at(best).config; }
};

namespace detail {

// Accuracy over the labeled articles; articles without a prediction count as wrong.
inline GridRow score_config(const std::vector<LabeledStocktake>& runs, Engine engine, const ParamConfig& cfg) {
    GridRow row;
    row.config = cfg;
    double acc_sum = 0.0;
    std::vector<double> wrong;
    for (const auto& run : runs) {
        try {
            auto pred = predict(run.stocktake, run.registry, {engine, cfg, run.color_aware, nullptr}).result.predictions();
            std::size_t correct = 0;
            for (const auto& [key, f] : run.truth) {
                auto it = pred.find(key);
                if (it == pred.end()) continue;
                if (it->second == f)
                    ++correct;
                else if (run.grid)
                    wrong.push_back(static_cast<double>(chebyshev(cell_of(*run.grid, it->second), cell_of(*run.grid, f))));
            }
            if (!run.truth.empty()) acc_sum += static_cast<double>(correct) / static_cast<double>(run.truth.size());
        } catch (const Error&) {
            ++row.failed_runs;
        }
    }
    row.mean_accuracy = runs.empty() ? 0.0 : acc_sum / static_cast<double>(runs.size());
    if (!wrong.empty()) row.mean_cheb_error = stats(wrong).mean;
    return row;
}

}  // namespace detail

// Evaluates every config on every labeled stocktake (configs in parallel).
// Best: highest mean accuracy, then lowest mean Chebyshev error (no wrong
// predictions counts as 0), then earliest in grid order.
inline GridSearchResult grid_search(const std::vector<LabeledStocktake>& runs, Engine engine,
                                    const std::vector<ParamConfig>& grid) {
    if (runs.empty()) throw Error(ErrorCode::EmptyInput, "grid_search", "no labeled stocktakes");
    if (grid.empty()) throw Error(ErrorCode::EmptyInput, "grid_search", "empty parameter grid");
    std::vector<std::future<GridRow>> jobs;
    jobs.reserve(grid.size());
    for (const auto& cfg : grid)
        jobs.push_back(std::async(std::launch::async, [&runs, engine, cfg] { return detail::score_config(runs, engine, cfg); }));
    GridSearchResult out;
    for (auto& j : jobs) out.table.push_back(j.get());
    for (std::size_t i = 1; i < out.table.size(); ++i) {
        const auto& a = out.table[i];
        const auto& b = out.table[out.best];
        const double ea = a.mean_cheb_error.value_or(0.0), eb = b.mean_cheb_error.value_or(0.0);
        if (a.mean_accuracy > b.mean_accuracy || (a.mean_accuracy == b.mean_accuracy && ea < eb)) out.best = i;
    }
    return out;
}

// Cartesian product of per-field value lists; empty lists keep the base value.
struct ParamGrid {
    std::vector<double> rssi_quantile_dbscan, eps;
    std::vector<int> min_pts;
    std::vector<double> rssi_quantile_dtw, resample_s;
    std::vector<int> dtw_window;

    std::vector<ParamConfig> expand(const ParamConfig& base) const {
        std::vector<ParamConfig> out{base};
        auto axis = [&out](const auto& values, auto member) {
            if (values.empty()) return;
            std::vector<ParamConfig> next;
            for (const auto& c : out)
                for (const auto& v : values) {
                    auto copy = c;
                    copy.*member = v;
                    next.push_back(copy);
                }
            out = std::move(next);
        };
        axis(rssi_quantile_dbscan, &ParamConfig::rssi_quantile_dbscan);
        axis(eps, &ParamConfig::eps);
        axis(min_pts, &ParamConfig::min_pts);
        axis(rssi_quantile_dtw, &ParamConfig::rssi_quantile_dtw);
        axis(resample_s, &ParamConfig::resample_s);
        axis(dtw_window, &ParamConfig::dtw_window);
        return out;
    }
};

}  // namespace shelfmap
