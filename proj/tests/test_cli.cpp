#include <gtest/gtest.h>

#include <sstream>

#include "oracles.hpp"
#include "shelfmap/cli.hpp"

using namespace shelfmap;

namespace {

struct Run {
    int code;
    std::string out, err;
};

Run run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run_cli(std::move(args), out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) { return csv::read_file(p.string()); }

// simulate once into a directory shared by the tests below
std::filesystem::path simulated(const std::string& name, const std::vector<std::string>& extra = {}) {
    auto dir = testutil::tmp_dir(name);
    std::vector<std::string> args{"simulate", "--seed", "3", "--out", (dir / "sim").string()};
    args.insert(args.end(), extra.begin(), extra.end());
    auto r = run(args);
    EXPECT_EQ(r.code, 0) << r.err;
    return dir;
}

}  // namespace

TEST(Cli, VersionAndHelp) {
    auto v = run({"--version"});
    EXPECT_EQ(v.code, 0);
    EXPECT_NE(v.out.find("shelfmap 0.1.0"), std::string::npos);
    EXPECT_EQ(run({"--help"}).code, 0);
    EXPECT_EQ(run({}).code, 2);
    EXPECT_EQ(run({"predict"}).code, 2);
    EXPECT_EQ(run({"frobnicate"}).code, 2);
}

TEST(Cli, SimulatePredictEvaluate) {
    auto dir = simulated("cli_flow");
    const auto sim = dir / "sim";
    for (auto f : {"stocktake.csv", "registry.csv", "truth.csv", "grid.csv", "zones.csv", "scenario.json"})
        EXPECT_TRUE(std::filesystem::exists(sim / f)) << f;

    auto p = run({"predict", "--stocktake", (sim / "stocktake.csv").string(), "--registry",
                  (sim / "registry.csv").string(), "--out", (dir / "pred").string()});
    ASSERT_EQ(p.code, 0) << p.err;
    const auto assignments = slurp(dir / "pred" / "assignments.csv");
    EXPECT_EQ(assignments.rfind("article_id,color,fixture_id,probability,certainty\n", 0), 0u);

    auto e = run({"evaluate", "--pred", (dir / "pred" / "assignments.csv").string(), "--truth",
                  (sim / "truth.csv").string(), "--grid", (sim / "grid.csv").string(), "--zones",
                  (sim / "zones.csv").string(), "--registry", (sim / "registry.csv").string()});
    ASSERT_EQ(e.code, 0) << e.err;
    auto j = json::parse(e.out);
    EXPECT_GE(j["accuracy"].get<double>(), 0.9);
    EXPECT_GE(j["zone_accuracy"].get<double>(), j["accuracy"].get<double>());

    // second stocktake fused with the first one's distributions
    auto h = run({"predict", "--stocktake", (sim / "stocktake.csv").string(), "--registry",
                  (sim / "registry.csv").string(), "--engine", "dtw", "--history",
                  (dir / "pred" / "distributions.json").string(), "--out", (dir / "pred2").string()});
    ASSERT_EQ(h.code, 0) << h.err;
    auto dist = json::parse(slurp(dir / "pred2" / "distributions.json"));
    EXPECT_EQ(dist["engine"], "dtw");

    // --no-history matches a run without --history
    auto n = run({"predict", "--stocktake", (sim / "stocktake.csv").string(), "--registry",
                  (sim / "registry.csv").string(), "--engine", "dtw", "--history",
                  (dir / "pred" / "distributions.json").string(), "--no-history", "--out", (dir / "pred3").string()});
    auto plain = run({"predict", "--stocktake", (sim / "stocktake.csv").string(), "--registry",
                      (sim / "registry.csv").string(), "--engine", "dtw", "--out", (dir / "pred4").string()});
    ASSERT_EQ(n.code, 0) << n.err;
    ASSERT_EQ(plain.code, 0) << plain.err;
    EXPECT_EQ(slurp(dir / "pred3" / "assignments.csv"), slurp(dir / "pred4" / "assignments.csv"));
    EXPECT_NE(slurp(dir / "pred2" / "assignments.csv"), slurp(dir / "pred4" / "assignments.csv"));
}

TEST(Cli, PredictIsDeterministic) {
    auto dir = simulated("cli_determinism");
    const auto sim = dir / "sim";
    for (auto out : {"a", "b"}) {
        auto r = run({"predict", "--stocktake", (sim / "stocktake.csv").string(), "--registry",
                      (sim / "registry.csv").string(), "--out", (dir / out).string()});
        ASSERT_EQ(r.code, 0) << r.err;
    }
    EXPECT_EQ(slurp(dir / "a" / "assignments.csv"), slurp(dir / "b" / "assignments.csv"));
    EXPECT_EQ(slurp(dir / "a" / "distributions.json"), slurp(dir / "b" / "distributions.json"));
}

TEST(Cli, ConfigPrecedence) {
    auto dir = simulated("cli_config");
    const auto sim = dir / "sim";
    auto cfg = testutil::write(dir, "cfg.json", R"({"min_pts": 100000})");
    auto base = std::vector<std::string>{"predict", "--stocktake", (sim / "stocktake.csv").string(), "--registry",
                                         (sim / "registry.csv").string()};
    auto with = [&](std::vector<std::string> extra, const std::string& out) {
        auto a = base;
        a.insert(a.end(), extra.begin(), extra.end());
        a.push_back("--out");
        a.push_back((dir / out).string());
        auto r = run(a);
        EXPECT_EQ(r.code, 0) << r.err;
        return slurp(dir / out / "assignments.csv");
    };
    const auto defaults = with({}, "d");
    const auto from_file = with({"--config", cfg}, "f");
    const auto flag_wins = with({"--config", cfg, "--min-pts", "8"}, "g");
    EXPECT_NE(defaults, from_file);
    EXPECT_EQ(defaults, flag_wins);

    auto bad = testutil::write(dir, "bad.json", R"({"eps": -1})");
    auto r = run({"predict", "--stocktake", (sim / "stocktake.csv").string(), "--registry",
                  (sim / "registry.csv").string(), "--config", bad, "--out", (dir / "x").string()});
    EXPECT_EQ(r.code, 2);
}

TEST(Cli, InputErrorsExitTwo) {
    auto dir = testutil::tmp_dir("cli_errors");
    auto r = run({"predict", "--stocktake", (dir / "missing.csv").string(), "--registry",
                  (dir / "missing.csv").string(), "--out", (dir / "o").string()});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("FileNotFound"), std::string::npos);
    auto st = testutil::write(dir, "st.csv", "epc,t_ms,rssi_dbm\nE1,10,-50\nE1,10,-40\n");
    auto reg = testutil::write(dir, "reg.csv", "epc,role,article_id,color,fixture_id\nE1,item,A1,,\nR1,ref,,,F1\n");
    auto degenerate = run({"predict", "--stocktake", st, "--registry", reg, "--out", (dir / "o").string()});
    EXPECT_NE(degenerate.code, 0);
}

TEST(Cli, MoneyMap) {
    auto dir = testutil::tmp_dir("cli_money");
    auto pred = testutil::write(dir, "a.csv",
                                "article_id,color,fixture_id,probability,certainty\nA1,,F1,0.9,0.5\nA2,,F2,0.8,0.4\n");
    auto sales = testutil::write(dir, "s.csv", "article_id,color,revenue,units\nA1,,10.25,2\nA2,,0.75,1\nA3,,1.00,1\n");
    auto zones = testutil::write(dir, "z.csv", "fixture_id,zone_id\nF1,Z1\nF2,Z1\n");
    auto f = run({"moneymap", "--pred", pred, "--sales", sales});
    ASSERT_EQ(f.code, 0) << f.err;
    EXPECT_EQ(f.out, "location_id,revenue,units\nF1,10.25,2\nF2,0.75,1\nunassigned,1.00,1\n");
    auto z = run({"moneymap", "--pred", pred, "--sales", sales, "--level", "zone", "--zones", zones});
    ASSERT_EQ(z.code, 0) << z.err;
    EXPECT_EQ(z.out, "location_id,revenue,units\nZ1,11.00,3\nunassigned,1.00,1\n");
    EXPECT_EQ(run({"moneymap", "--pred", pred, "--sales", sales, "--level", "zone"}).code, 2);
}

TEST(Cli, Tune) {
    auto dir = simulated("cli_tune");
    const auto sim = dir / "sim";
    auto spec = testutil::write(dir, "grid.json", R"({"eps": [0.085], "min_pts": [8, 100000]})");
    auto r = run({"tune", "--stocktake", (sim / "stocktake.csv").string(), "--truth", (sim / "truth.csv").string(),
                  "--registry", (sim / "registry.csv").string(), "--grid-spec", spec, "--fixture-grid",
                  (sim / "grid.csv").string()});
    ASSERT_EQ(r.code, 0) << r.err;
    auto j = json::parse(r.out);
    EXPECT_EQ(j["table"].size(), 2u);
    EXPECT_EQ(j["best"]["min_pts"], 8);
}

TEST(Cli, SimulateWithPartsWritesGroups) {
    auto dir = testutil::tmp_dir("cli_parts");
    auto sc = testutil::write(dir, "sc.json", R"({"parts_per_fixture": 2})");
    auto r = run({"simulate", "--scenario", sc, "--out", (dir / "sim").string()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(std::filesystem::exists(dir / "sim" / "groups.csv"));
    auto p = run({"predict", "--stocktake", (dir / "sim" / "stocktake.csv").string(), "--registry",
                  (dir / "sim" / "registry.csv").string(), "--groups", (dir / "sim" / "groups.csv").string(),
                  "--out", (dir / "pred").string()});
    ASSERT_EQ(p.code, 0) << p.err;
    EXPECT_NE(slurp(dir / "pred" / "assignments.csv").find(",F01,"), std::string::npos);
    auto e = run({"evaluate", "--pred", (dir / "pred" / "assignments.csv").string(), "--truth",
                  (dir / "sim" / "truth.csv").string(), "--groups", (dir / "sim" / "groups.csv").string()});
    ASSERT_EQ(e.code, 0) << e.err;
    EXPECT_GE(json::parse(e.out)["accuracy"].get<double>(), 0.9);
}

TEST(Cli, Adapt) {
    auto dir = testutil::tmp_dir("cli_adapt");
    auto in = testutil::write(dir, "in.txt", "Tag;Seconds;Level\nE1;2.5;-50\n");
    auto mapping = testutil::write(dir, "m.json",
                                   R"({"delimiter": ";", "epc": "Tag", "timestamp": "Seconds", "rssi": "Level", "time_unit": "s"})");
    auto r = run({"adapt", "--input", in, "--mapping", mapping});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out, "epc,t_ms,rssi_dbm\nE1,2500,-50\n");
}
