#pragma once
// End-to-end prediction for one stocktake: aggregate, distance engine, assignment.

#include <string>
#include <string_view>

#include "shelfmap/assign.hpp"
#include "shelfmap/cluster.hpp"
#include "shelfmap/preprocess.hpp"
#include "shelfmap/warp.hpp"

namespace shelfmap {

enum class Engine { Dbscan, Dtw };

inline std::string to_string(Engine e) { return e == Engine::Dbscan ? "dbscan" : "dtw"; }

inline Engine parse_engine(std::string_view s) {
    if (s == "dbscan") return Engine::Dbscan;
    if (s == "dtw") return Engine::Dtw;
    throw Error(ErrorCode::InvalidConfig, "engine", std::string(s));
}

struct PredictOptions {
    Engine engine = Engine::Dbscan;
    ParamConfig config;
    bool color_aware = false;
    const History* history = nullptr;
};

struct Prediction {
    DistanceMatrix matrix;
    AssignResult result;
    std::size_t unknown_count = 0;
};

inline DistanceMatrix distance_matrix(const Aggregated& agg, Engine engine, const ParamConfig& cfg) {
    return engine == Engine::Dbscan ? dbscan_engine(agg.articles, agg.fixtures, cfg)
                                    : dtw_engine(agg.articles, agg.fixtures, cfg);
}

// Candidate fixtures are the (logical) fixtures with at least one reference read.
inline Prediction predict(const Stocktake& st, const TagRegistry& reg, const PredictOptions& opt) {
    if (st.events.empty()) throw Error(ErrorCode::EmptyStocktake, st.id);
    const auto agg = aggregate(st, reg, opt.color_aware);
    Prediction out;
    out.unknown_count = agg.unknown_count;
    out.matrix = distance_matrix(agg, opt.engine, opt.config);
    out.result = assign_all(out.matrix, opt.history);
    return out;
}

}  // namespace shelfmap
