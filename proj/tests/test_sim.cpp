#include <gtest/gtest.h>

#include "shelfmap/eval.hpp"
#include "shelfmap/ingest.hpp"
#include "shelfmap/report.hpp"
#include "shelfmap/sim.hpp"

using namespace shelfmap;

TEST(Simulator, SameSeedSameData) {
    auto a = sim::generate(sim::lab_scenario(5));
    auto b = sim::generate(sim::lab_scenario(5));
    EXPECT_EQ(to_csv(a.stocktake), to_csv(b.stocktake));
    EXPECT_EQ(to_csv(a.registry), to_csv(b.registry));
    auto c = sim::generate(sim::lab_scenario(6));
    EXPECT_NE(to_csv(a.stocktake), to_csv(c.stocktake));
}

TEST(Simulator, LabLayout) {
    auto d = sim::generate(sim::lab_scenario(1));
    EXPECT_EQ(d.registry.reference_map.size(), 74u);
    EXPECT_EQ(d.registry.fixtures().size(), 10u);
    EXPECT_EQ(d.truth.size(), 27u);
    EXPECT_TRUE(validate_registry(d.registry).empty());
    EXPECT_TRUE(d.groups.empty());
    for (const auto& [k, f] : d.truth) {
        EXPECT_TRUE(d.grid.cells.count(f));
        EXPECT_TRUE(d.zones.count(f));
    }
    const auto& ev = d.stocktake.events;
    ASSERT_FALSE(ev.empty());
    for (std::size_t i = 1; i < ev.size(); ++i) EXPECT_LT(ev[i - 1].t_ms, ev[i].t_ms);
    for (const auto& e : ev) EXPECT_TRUE(valid_event(e));
}

TEST(Simulator, SessionOneReadsLess) {
    auto s0 = sim::generate(sim::lab_scenario(2, Session::S0));
    auto s1 = sim::generate(sim::lab_scenario(2, Session::S1));
    EXPECT_LT(s1.stocktake.events.size(), s0.stocktake.events.size());
    EXPECT_EQ(s1.stocktake.session, Session::S1);
}

TEST(Simulator, PartsAndColors) {
    auto sc = sim::lab_scenario(4);
    sc.parts_per_fixture = 2;
    sc.colors_per_article = 2;
    auto d = sim::generate(sc);
    EXPECT_EQ(d.registry.fixtures().size(), 20u);
    EXPECT_EQ(d.groups.size(), 20u);
    EXPECT_EQ(d.truth.size(), 54u);
    for (const auto& [k, f] : d.truth) EXPECT_TRUE(k.color.has_value());
    auto reg = d.registry;
    reg.fixture_groups = d.groups;
    EXPECT_TRUE(validate_registry(reg).empty());
    EXPECT_EQ(reg.logical_fixtures().size(), 10u);
}

TEST(Simulator, RejectsBadScenario) {
    auto sc = sim::lab_scenario(1);
    sc.ref_tags = 3;
    EXPECT_THROW(sim::generate(sc), Error);
    sc = sim::lab_scenario(1);
    sc.walk = {{12, 5.0}};
    EXPECT_THROW(sim::generate(sc), Error);
}

TEST(Simulator, CustomWalkRevisits) {
    auto sc = sim::lab_scenario(9);
    sc.walk = {{0, 5.0}, {1, 5.0}, {0, 5.0}};
    auto d = sim::generate(sc);
    EXPECT_FALSE(d.stocktake.events.empty());
}

TEST(Simulator, ScenarioJsonRoundTrip) {
    auto sc = sim::lab_scenario(21, Session::S1);
    sc.walk = {{2, 4.5}, {0, 3.0}};
    sc.rssi.noise_sigma_db = 0.0;
    sc.cross_read_rate = 0.0;
    EXPECT_EQ(scenario_from_json(json::parse(scenario_json(sc).dump())), sc);
}

TEST(Degrade, ZeroProfileIsIdentity) {
    auto d = sim::generate(sim::lab_scenario(1));
    auto out = sim::degrade(d.stocktake, d.registry, {});
    EXPECT_EQ(out.events, d.stocktake.events);
}

TEST(Degrade, DropsAndShifts) {
    auto d = sim::generate(sim::lab_scenario(1));
    sim::NoiseProfile p{.item_drop_rate = 0.3, .ref_drop_rate = 0.0, .interleave_rate = 0.2, .interleave_shift_s = 5.0,
                        .seed = 3};
    auto out = sim::degrade(d.stocktake, d.registry, p);
    EXPECT_LT(out.events.size(), d.stocktake.events.size());
    std::size_t refs_in = 0, refs_out = 0;
    for (const auto& e : d.stocktake.events) refs_in += d.registry.reference_map.count(e.epc);
    for (const auto& e : out.events) refs_out += d.registry.reference_map.count(e.epc);
    EXPECT_EQ(refs_in, refs_out);
    for (std::size_t i = 1; i < out.events.size(); ++i) EXPECT_LE(out.events[i - 1].t_ms, out.events[i].t_ms);
    EXPECT_GE(out.events.front().t_ms, d.stocktake.events.front().t_ms);
    EXPECT_LE(out.events.back().t_ms, d.stocktake.events.back().t_ms);
}

TEST(Simulator, CleanLabRunIsSolvable) {
    auto d = sim::generate(sim::lab_scenario(1));
    auto pred = predict(d.stocktake, d.registry, {}).result.predictions();
    EXPECT_GE(accuracy(pred, d.truth), 0.9);
}
