#pragma once
// Command-line front end. run_cli() is the whole program minus main(), so the
// commands can be exercised in-process.
//
// Exit codes: 0 success, 2 input error (arguments, files, schemas), 3 pipeline error.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "shelfmap/pipeline.hpp"
#include "shelfmap/report.hpp"
#include "shelfmap/sim.hpp"

namespace shelfmap {

inline constexpr std::string_view kVersion = "0.1.0";
inline constexpr const char* kConfigEnv = "SHELFMAP_CONFIG";

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitPipeline = 3;

namespace cli {

struct ParamFlags {
    std::optional<double> eps, quantile_dbscan, quantile_dtw, resample_s;
    std::optional<int> min_pts, window;

    void add(CLI::App* cmd) {
        cmd->add_option("--eps", eps, "DBSCAN neighborhood radius (normalized time)");
        cmd->add_option("--min-pts", min_pts, "DBSCAN minimum points per dense region");
        cmd->add_option("--quantile-dbscan", quantile_dbscan, "RSSI quantile below which reads are dropped (DBSCAN)");
        cmd->add_option("--quantile-dtw", quantile_dtw, "RSSI quantile below which reads are dropped (DTW)");
        cmd->add_option("--resample", resample_s, "DTW resampling resolution in seconds");
        cmd->add_option("--window", window, "DTW maximum index shift");
    }

    ParamConfig apply(ParamConfig c) const {
        if (eps) c.eps = *eps;
        if (min_pts) c.min_pts = *min_pts;
        if (quantile_dbscan) c.rssi_quantile_dbscan = *quantile_dbscan;
        if (quantile_dtw) c.rssi_quantile_dtw = *quantile_dtw;
        if (resample_s) c.resample_s = *resample_s;
        if (window) c.dtw_window = *window;
        c.validate();
        return c;
    }
};

// Session defaults, then the config file (explicit or from the environment),
// then individual flags.
inline ParamConfig resolve_config(Session s, const std::string& config_path, const ParamFlags& flags) {
    auto cfg = ParamConfig::for_session(s);
    std::string path = config_path;
    if (path.empty())
        if (const char* env = std::getenv(kConfigEnv)) path = env;
    if (!path.empty()) cfg = apply_config_json(cfg, parse_json_file(path));
    return flags.apply(cfg);
}

inline Session session_of(int s) { return s == 1 ? Session::S1 : Session::S0; }

inline void emit(const std::string& path, const std::string& content, std::ostream& out) {
    if (path.empty() || path == "-")
        out << content;
    else
        csv::write_file(path, content);
}

inline void ensure_dir(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error(ErrorCode::FileNotFound, dir, ec.message());
}

inline std::string join(const std::string& dir, const char* name) {
    return (std::filesystem::path(dir) / name).string();
}

}  // namespace cli

// args excludes the program name.
inline int run_cli(std::vector<std::string> args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Map RFID-tagged articles to fixtures from stocktake read events", "shelfmap"};
    app.set_version_flag("--version", "shelfmap " + std::string(kVersion));
    app.require_subcommand(1);

    // predict
    struct {
        std::string stocktake, registry, engine = "dbscan", config, history, groups, out;
        int session = 0;
        bool color_aware = false, no_history = false;
        cli::ParamFlags params;
    } pr;
    auto* predict_cmd = app.add_subcommand("predict", "Assign articles to fixtures for one stocktake");
    predict_cmd->add_option("--stocktake", pr.stocktake, "Stocktake CSV (epc,t_ms,rssi_dbm)")->required();
    predict_cmd->add_option("--registry", pr.registry, "Registry CSV (epc,role,article_id,color,fixture_id)")->required();
    predict_cmd->add_option("--session", pr.session, "Reader session 0 or 1")->check(CLI::IsMember({0, 1}));
    predict_cmd->add_option("--engine", pr.engine, "dbscan or dtw")->check(CLI::IsMember({"dbscan", "dtw"}));
    predict_cmd->add_option("--config", pr.config, "JSON parameter overrides");
    predict_cmd->add_option("--history", pr.history, "Previous distributions.json to fuse with");
    predict_cmd->add_flag("--no-history", pr.no_history, "Ignore --history, e.g. after a store rearrangement");
    predict_cmd->add_flag("--color-aware", pr.color_aware, "Aggregate items per article and color");
    predict_cmd->add_option("--groups", pr.groups, "Groups CSV (fixture_id,logical_fixture_id)");
    predict_cmd->add_option("--out", pr.out, "Output directory")->required();
    pr.params.add(predict_cmd);

    // evaluate
    struct {
        std::vector<std::string> preds;
        std::string truth, registry, grid, zones, groups, out;
    } ev;
    auto* eval_cmd = app.add_subcommand("evaluate", "Accuracy and grid-distance report for predictions");
    eval_cmd->add_option("--pred", ev.preds, "Assignment CSV (repeatable)")->required();
    eval_cmd->add_option("--truth", ev.truth, "Ground-truth CSV")->required();
    eval_cmd->add_option("--registry", ev.registry, "Registry CSV used to check truth ids");
    eval_cmd->add_option("--grid", ev.grid, "Fixture grid CSV");
    eval_cmd->add_option("--zones", ev.zones, "Zones CSV");
    eval_cmd->add_option("--groups", ev.groups, "Groups CSV; truth is lifted to logical fixtures");
    eval_cmd->add_option("--out", ev.out, "Report JSON path (stdout if omitted)");

    // moneymap
    struct {
        std::string pred, sales, level = "fixture", zones, out;
    } mm;
    auto* money_cmd = app.add_subcommand("moneymap", "Revenue and units per predicted location");
    money_cmd->add_option("--pred", mm.pred, "Assignment CSV")->required();
    money_cmd->add_option("--sales", mm.sales, "Sales CSV (article_id,color,revenue,units)")->required();
    money_cmd->add_option("--level", mm.level, "fixture or zone")->check(CLI::IsMember({"fixture", "zone"}));
    money_cmd->add_option("--zones", mm.zones, "Zones CSV, required for --level zone");
    money_cmd->add_option("--out", mm.out, "Money-map CSV path (stdout if omitted)");

    // tune
    struct {
        std::vector<std::string> stocktakes, truths;
        std::string registry, engine = "dbscan", grid_spec, fixture_grid, config, out;
        int session = 0;
        bool color_aware = false;
    } tu;
    auto* tune_cmd = app.add_subcommand("tune", "Grid search of engine parameters against ground truth");
    tune_cmd->add_option("--stocktake", tu.stocktakes, "Stocktake CSV (repeatable)")->required();
    tune_cmd->add_option("--truth", tu.truths, "Ground-truth CSV per stocktake, or one shared file")->required();
    tune_cmd->add_option("--registry", tu.registry, "Registry CSV")->required();
    tune_cmd->add_option("--session", tu.session, "Reader session 0 or 1")->check(CLI::IsMember({0, 1}));
    tune_cmd->add_option("--engine", tu.engine, "dbscan or dtw")->check(CLI::IsMember({"dbscan", "dtw"}));
    tune_cmd->add_option("--grid-spec", tu.grid_spec, "JSON object of per-parameter value lists")->required();
    tune_cmd->add_option("--fixture-grid", tu.fixture_grid, "Fixture grid CSV for the error tie-break");
    tune_cmd->add_option("--config", tu.config, "JSON base config");
    tune_cmd->add_flag("--color-aware", tu.color_aware, "Aggregate items per article and color");
    tune_cmd->add_option("--out", tu.out, "Result JSON path (stdout if omitted)");

    // simulate
    struct {
        std::string scenario, degrade, out;
        std::optional<std::uint64_t> seed;
        std::optional<int> session;
    } si;
    auto* sim_cmd = app.add_subcommand("simulate", "Generate a synthetic stocktake with registry and ground truth");
    sim_cmd->add_option("--scenario", si.scenario, "Scenario JSON (lab-sized defaults if omitted)");
    sim_cmd->add_option("--seed", si.seed, "Override the scenario seed");
    sim_cmd->add_option("--session", si.session, "Override the scenario session")->check(CLI::IsMember({0, 1}));
    sim_cmd->add_option("--degrade", si.degrade, "Noise profile JSON applied to the stocktake");
    sim_cmd->add_option("--out", si.out, "Output directory")->required();

    // adapt
    struct {
        std::string input, mapping, out;
    } ad;
    auto* adapt_cmd = app.add_subcommand("adapt", "Convert a foreign stocktake export to the canonical CSV");
    adapt_cmd->add_option("--input", ad.input, "Foreign export")->required();
    adapt_cmd->add_option("--mapping", ad.mapping, "JSON column mapping")->required();
    adapt_cmd->add_option("--out", ad.out, "Canonical stocktake CSV path (stdout if omitted)");

    std::reverse(args.begin(), args.end());
    try {
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitInput;
    }

    try {
        if (*predict_cmd) {
            const auto session = cli::session_of(pr.session);
            auto reg = load_registry(pr.registry);
            if (!pr.groups.empty()) {
                reg.fixture_groups = load_groups(pr.groups);
                check_registry(reg);
            }
            const auto st = load_stocktake(pr.stocktake, session, std::filesystem::path(pr.stocktake).filename().string());
            PredictOptions opt;
            opt.engine = parse_engine(pr.engine);
            opt.config = cli::resolve_config(session, pr.config, pr.params);
            opt.color_aware = pr.color_aware;
            History history;
            if (!pr.history.empty() && !pr.no_history) {
                history = load_history(pr.history);
                opt.history = &history;
            }
            const auto prediction = predict(st, reg, opt);
            cli::ensure_dir(pr.out);
            csv::write_file(cli::join(pr.out, "assignments.csv"), assignments_to_csv(prediction.result));
            csv::write_file(cli::join(pr.out, "distributions.json"),
                            dump(distributions_json(prediction.result, {st.id, session, opt.engine, prediction.unknown_count})));
            if (!prediction.result.failed.empty())
                err << "warning: " << prediction.result.failed.size() << " article(s) without a finite distance\n";
        } else if (*eval_cmd) {
            GroundTruth truth = ev.registry.empty() ? load_ground_truth(ev.truth)
                                                    : load_ground_truth(ev.truth, load_registry(ev.registry));
            if (!ev.groups.empty()) truth = lift_truth(truth, load_groups(ev.groups));
            std::vector<Predictions> runs;
            for (const auto& p : ev.preds) runs.push_back(load_assignments(p));
            std::optional<FixtureGrid> grid;
            std::optional<std::map<FixtureId, ZoneId>> zones;
            if (!ev.grid.empty()) grid = load_grid(ev.grid);
            if (!ev.zones.empty()) zones = load_zones(ev.zones);
            cli::emit(ev.out, dump(evaluation_report(runs, truth, grid ? &*grid : nullptr, zones ? &*zones : nullptr)), out);
        } else if (*money_cmd) {
            const auto pred = load_assignments(mm.pred);
            const auto sales = load_sales(mm.sales);
            std::optional<std::map<FixtureId, ZoneId>> zones;
            if (!mm.zones.empty()) zones = load_zones(mm.zones);
            const auto level = mm.level == "zone" ? Level::Zone : Level::Fixture;
            if (level == Level::Zone && !zones) throw Error(ErrorCode::InvalidConfig, "--zones", "required for --level zone");
            cli::emit(mm.out, money_map_to_csv(money_map(pred, sales, level, zones ? &*zones : nullptr)), out);
        } else if (*tune_cmd) {
            const auto session = cli::session_of(tu.session);
            if (tu.truths.size() != 1 && tu.truths.size() != tu.stocktakes.size())
                throw Error(ErrorCode::InvalidConfig, "--truth", "give one truth file or one per stocktake");
            const auto reg = load_registry(tu.registry);
            std::optional<FixtureGrid> fgrid;
            if (!tu.fixture_grid.empty()) fgrid = load_grid(tu.fixture_grid);
            std::vector<LabeledStocktake> runs;
            for (std::size_t i = 0; i < tu.stocktakes.size(); ++i) {
                const auto& tpath = tu.truths.size() == 1 ? tu.truths[0] : tu.truths[i];
                runs.push_back({load_stocktake(tu.stocktakes[i], session), reg, load_ground_truth(tpath, reg), fgrid,
                                tu.color_aware});
            }
            const auto base = cli::resolve_config(session, tu.config, {});
            const auto configs = param_grid_from_json(parse_json_file(tu.grid_spec)).expand(base);
            cli::emit(tu.out, dump(grid_search_json(grid_search(runs, parse_engine(tu.engine), configs))), out);
        } else if (*sim_cmd) {
            auto scenario = si.scenario.empty() ? sim::SimScenario{} : scenario_from_json(parse_json_file(si.scenario));
            if (si.seed) scenario.seed = *si.seed;
            if (si.session) scenario.session = cli::session_of(*si.session);
            auto data = sim::generate(scenario);
            if (!si.degrade.empty()) {
                const auto j = parse_json_file(si.degrade);
                sim::NoiseProfile np;
                try {
                    np.item_drop_rate = j.value("item_drop_rate", 0.0);
                    np.ref_drop_rate = j.value("ref_drop_rate", 0.0);
                    np.interleave_rate = j.value("interleave_rate", 0.0);
                    np.interleave_shift_s = j.value("interleave_shift_s", 0.0);
                    np.seed = j.value("seed", scenario.seed);
                } catch (const json::exception& e) {
                    throw Error(ErrorCode::InvalidConfig, si.degrade, e.what());
                }
                data.stocktake = sim::degrade(data.stocktake, data.registry, np);
            }
            cli::ensure_dir(si.out);
            csv::write_file(cli::join(si.out, "stocktake.csv"), to_csv(data.stocktake));
            csv::write_file(cli::join(si.out, "registry.csv"), to_csv(data.registry));
            csv::write_file(cli::join(si.out, "truth.csv"), to_csv(data.truth));
            csv::write_file(cli::join(si.out, "grid.csv"), to_csv(data.grid));
            csv::write_file(cli::join(si.out, "zones.csv"), zones_to_csv(data.zones));
            if (!data.groups.empty()) csv::write_file(cli::join(si.out, "groups.csv"), groups_to_csv(data.groups));
            csv::write_file(cli::join(si.out, "scenario.json"), dump(scenario_json(scenario)));
        } else if (*adapt_cmd) {
            const auto j = parse_json_file(ad.mapping);
            StocktakeAdapter spec;
            try {
                const auto delim = j.value("delimiter", std::string(","));
                if (delim.size() != 1) throw Error(ErrorCode::InvalidConfig, "delimiter", "must be one character");
                spec.delimiter = delim[0];
                spec.epc_column = j.value("epc", spec.epc_column);
                spec.time_column = j.value("timestamp", spec.time_column);
                spec.rssi_column = j.value("rssi", spec.rssi_column);
                spec.time_unit = j.value("time_unit", spec.time_unit);
            } catch (const json::exception& e) {
                throw Error(ErrorCode::InvalidConfig, ad.mapping, e.what());
            }
            cli::emit(ad.out, adapt_stocktake(ad.input, spec), out);
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return is_input_error(e.code()) ? kExitInput : kExitPipeline;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitPipeline;
    }
    return kExitOk;
}

}  // namespace shelfmap
