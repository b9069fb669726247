#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "shelfmap/preprocess.hpp"

using namespace shelfmap;

namespace {

ReadSeries series(std::initializer_list<std::pair<std::int64_t, double>> pts) {
    ReadSeries s;
    for (auto [t, r] : pts) s.points.push_back({t, r});
    return s;
}

std::vector<double> rssi_of(const ReadSeries& s) {
    std::vector<double> out;
    for (const auto& p : s.points) out.push_back(p.rssi_dbm);
    return out;
}

}  // namespace

TEST(Aggregate, GroupsByArticleAndFixture) {
    TagRegistry reg;
    reg.item_map["E1"] = {"A1", "red"};
    reg.item_map["E2"] = {"A1", "blue"};
    reg.reference_map["R1"] = "F1a";
    reg.reference_map["R2"] = "F1b";
    reg.fixture_groups = {{"F1a", "F1"}, {"F1b", "F1"}};
    Stocktake st{"s", Session::S0, {{"E1", 10, -50}, {"E2", 5, -60}, {"R1", 7, -55}, {"R2", 8, -56}, {"X", 9, -70}}};

    auto plain = aggregate(st, reg, false);
    ASSERT_EQ(plain.articles.size(), 1u);
    const auto& a = plain.articles.at(ArticleKey{"A1", std::nullopt});
    ASSERT_EQ(a.size(), 2u);
    EXPECT_EQ(a.points[0].t_ms, 5);
    ASSERT_EQ(plain.fixtures.size(), 1u);
    EXPECT_EQ(plain.fixtures.at("F1").size(), 2u);
    EXPECT_EQ(plain.unknown_count, 1u);

    auto colored = aggregate(st, reg, true);
    EXPECT_EQ(colored.articles.size(), 2u);
}

TEST(TimeScale, ExampleMapsOntoUnitInterval) {
    std::map<std::string, ReadSeries> set{{"a", series({{1000, -50}, {1500, -50}, {3000, -50}})}};
    auto scaled = minmax_scale_time(set);
    const auto& t = scaled.at("a").t;
    ASSERT_EQ(t.size(), 3u);
    EXPECT_DOUBLE_EQ(t[0], 0.0);
    EXPECT_DOUBLE_EQ(t[1], 0.25);
    EXPECT_DOUBLE_EQ(t[2], 1.0);
}

TEST(TimeScale, FrameIsSharedAcrossSeries) {
    std::map<std::string, ReadSeries> set{{"a", series({{1000, -50}, {2000, -50}})},
                                          {"b", series({{2000, -50}, {5000, -50}})}};
    auto scaled = minmax_scale_time(set);
    EXPECT_DOUBLE_EQ(scaled.at("a").t[1], 0.25);
    EXPECT_DOUBLE_EQ(scaled.at("b").t[0], 0.25);
    EXPECT_DOUBLE_EQ(scaled.at("b").t[1], 1.0);
}

TEST(TimeScale, DegenerateFrame) {
    std::map<std::string, ReadSeries> set{{"a", series({{1000, -50}, {1000, -40}})}};
    try {
        minmax_scale_time(set);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::DegenerateTime);
    }
    std::map<std::string, ReadSeries> empty;
    EXPECT_THROW(minmax_scale_time(empty), Error);
}

TEST(Quantile, Example) {
    // the threshold of {-60,-50,-40,-30} at q=0.5 is -45; reads at or above it stay
    auto s = series({{1, -60}, {2, -50}, {3, -40}, {4, -30}});
    EXPECT_DOUBLE_EQ(quantile(rssi_of(s), 0.5), -45.0);
    auto kept = rssi_quantile_filter(s, 0.5);
    EXPECT_EQ(rssi_of(kept), (std::vector<double>{-40, -30}));
}

TEST(Quantile, EdgeCases) {
    auto s = series({{1, -60}, {2, -50}, {3, -40}, {4, -30}});
    EXPECT_EQ(rssi_quantile_filter(s, 0.0).size(), 4u);
    EXPECT_THROW(rssi_quantile_filter(s, 1.0), Error);
    EXPECT_THROW(rssi_quantile_filter(s, -0.1), Error);
    EXPECT_TRUE(rssi_quantile_filter(ReadSeries{}, 0.5).empty());
    auto one = series({{1, -70}});
    EXPECT_EQ(rssi_quantile_filter(one, 0.9).size(), 1u);
    // ties at the threshold all survive
    auto flat = series({{1, -50}, {2, -50}, {3, -50}});
    EXPECT_EQ(rssi_quantile_filter(flat, 0.8).size(), 3u);
}

TEST(Quantile, MatchesPlottingPositionOracle) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> r(-100, 0), qd(0, 0.999);
    std::uniform_int_distribution<int> n(1, 60);
    for (int trial = 0; trial < 500; ++trial) {
        std::vector<double> v(static_cast<std::size_t>(n(rng)));
        for (auto& x : v) x = std::round(r(rng) * 10) / 10;
        const double q = qd(rng);
        EXPECT_NEAR(quantile(v, q), oracle::quantile_positions(v, q), 1e-9);
    }
}

TEST(Quantile, FilterInvariants) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> r(-100, 0), qd(0, 0.999);
    for (int trial = 0; trial < 200; ++trial) {
        ReadSeries s;
        for (int i = 0; i < 40; ++i) s.points.push_back({i, std::round(r(rng))});
        const double q = qd(rng);
        auto kept = rssi_quantile_filter(s, q);
        ASSERT_FALSE(kept.empty());
        const auto all = rssi_of(s);
        const double mx = *std::max_element(all.begin(), all.end());
        const auto kr = rssi_of(kept);
        EXPECT_NE(std::find(kr.begin(), kr.end(), mx), kr.end());
        // order preserved, subset of input
        for (std::size_t i = 1; i < kept.size(); ++i) EXPECT_LT(kept.points[i - 1].t_ms, kept.points[i].t_ms);
        // monotone in q
        EXPECT_LE(rssi_quantile_filter(s, std::min(q + 0.1, 0.999)).size(), kept.size());
    }
}

TEST(Resample, ExampleSumsShiftedRssi) {
    auto s = series({{0, -50}, {100, -60}, {300, -40}});
    auto v = resample(s, 0.2, 0, 400, 100.0);
    EXPECT_EQ(v, (std::vector<double>{90.0, 60.0}));
}

TEST(Resample, BinBoundaries) {
    Binning b(0.2, 1000, 1400);
    EXPECT_EQ(b.size(), 2u);
    EXPECT_EQ(b.index(1000), 0u);
    EXPECT_EQ(b.index(1199), 0u);
    EXPECT_EQ(b.index(1200), 1u);
    EXPECT_EQ(b.index(1400), 1u);  // end read lands in the last bin
    Binning partial(0.2, 0, 401);
    EXPECT_EQ(partial.size(), 3u);
    Binning point(0.1, 5, 5);
    EXPECT_EQ(point.size(), 1u);
    EXPECT_THROW(Binning(0.0, 0, 10), Error);
    // non-integer millisecond steps
    Binning frac(0.0005, 0, 3);
    EXPECT_EQ(frac.size(), 6u);
    EXPECT_EQ(frac.index(1), 2u);
}

TEST(Resample, MassIsConserved) {
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<std::int64_t> t(0, 60'000);
    std::uniform_real_distribution<double> r(-90, -30);
    for (int trial = 0; trial < 50; ++trial) {
        ReadSeries s;
        for (int i = 0; i < 100; ++i) s.points.push_back({t(rng), r(rng)});
        double expect = 0;
        for (auto& p : s.points) expect += p.rssi_dbm + 100.0;
        auto v = resample(s, 0.2, 0, 60'000, 100.0);
        EXPECT_EQ(v.size(), 300u);
        EXPECT_NEAR(std::accumulate(v.begin(), v.end(), 0.0), expect, 1e-6);
    }
}
