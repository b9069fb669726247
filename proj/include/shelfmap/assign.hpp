#pragma once
// Turns distances into per-article fixture probabilities (inverse squared
// distance weighting), picks fixtures and fuses with the previous stocktake
// weighted by entropy-based certainty.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "shelfmap/model.hpp"

namespace shelfmap {

using History = std::map<ArticleKey, AssignmentDistribution>;

// Shannon entropy in bits, 0 log 0 := 0.
inline double entropy_bits(const std::map<FixtureId, double>& probs) {
    double h = 0.0;
    for (const auto& [f, p] : probs)
        if (p > 0.0) h -= p * std::log2(p);
    return h;
}

// 1 - H / log2(N). Exactly 0 for a uniform vector and exactly 1 for a one-hot
// vector. A single-fixture universe is fully certain.
inline double certainty(const std::map<FixtureId, double>& probs) {
    const auto n = probs.size();
    if (n <= 1) return 1.0;
    const double first = probs.begin()->second;
    if (std::all_of(probs.begin(), probs.end(), [&](const auto& kv) { return kv.second == first; })) return 0.0;
    const double c = 1.0 - entropy_bits(probs) / std::log2(static_cast<double>(n));
    return std::clamp(c, 0.0, 1.0);
}

using FixtureDistances = std::vector<std::pair<FixtureId, std::optional<double>>>;

// p_j = d_j^-2 / sum_k d_k^-2 over fixtures with a distance; fixtures without
// one get 0. Zero distances take the limit: uniform over the zero-distance
// fixtures. Weights are computed relative to the smallest distance so tiny
// distances cannot overflow.
inline AssignmentDistribution idw_probabilities(const ArticleKey& article, const FixtureDistances& distances) {
    std::optional<double> dmin;
    std::size_t zeros = 0;
    for (const auto& [f, d] : distances) {
        if (!d) continue;
        if (!(*d >= 0.0) || !std::isfinite(*d)) throw Error(ErrorCode::InvalidConfig, f, "distance must be finite and >= 0");
        dmin = dmin ? std::min(*dmin, *d) : *d;
        if (*d == 0.0) ++zeros;
    }
    if (!dmin) throw Error(ErrorCode::NoFiniteDistance, to_string(article));

    AssignmentDistribution out;
    out.article = article;
    if (zeros > 0) {
        const double share = 1.0 / static_cast<double>(zeros);
        for (const auto& [f, d] : distances) out.probs[f] = (d && *d == 0.0) ? share : 0.0;
    } else {
        double total = 0.0;
        for (const auto& [f, d] : distances) {
            double w = 0.0;
            if (d) {
                const double r = *dmin / *d;
                w = r * r;
            }
            out.probs[f] = w;
            total += w;
        }
        for (auto& [f, p] : out.probs) p /= total;
    }
    out.certainty = certainty(out.probs);
    return out;
}

struct Pick {
    FixtureId fixture;
    bool tie = false;  // another fixture shares the maximum
};

// Argmax; ties go to the lexicographically smallest fixture id.
inline Pick pick(const AssignmentDistribution& dist) {
    if (dist.probs.empty()) throw Error(ErrorCode::EmptyInput, to_string(dist.article));
    auto best = dist.probs.begin();
    bool tie = false;
    for (auto it = std::next(best); it != dist.probs.end(); ++it) {
        if (it->second > best->second) {
            best = it;
            tie = false;
        } else if (it->second == best->second) {
            tie = true;
        }
    }
    return {best->first, tie};
}

inline FixtureId pick_fixture(const AssignmentDistribution& dist) { return pick(dist).fixture; }

// fused_j ∝ c_cur p_cur_j + c_prev p_prev_j over the union of both fixture
// sets (missing entries count as 0). Uniform when both certainties are 0.
inline AssignmentDistribution fuse_history(const AssignmentDistribution& current,
                                           const AssignmentDistribution& previous) {
    AssignmentDistribution out;
    out.article = current.article;
    for (const auto& [f, p] : current.probs) out.probs[f] += current.certainty * p;
    for (const auto& [f, p] : previous.probs) out.probs[f] += previous.certainty * p;
    double total = 0.0;
    for (const auto& [f, p] : out.probs) total += p;
    if (total > 0.0) {
        for (auto& [f, p] : out.probs) p /= total;
    } else {
        const double share = 1.0 / static_cast<double>(out.probs.size());
        for (auto& [f, p] : out.probs) p = share;
    }
    out.certainty = certainty(out.probs);
    return out;
}

struct Assignment {
    AssignmentDistribution dist;
    FixtureId fixture;
    bool tie = false;
    bool fused = false;
};

struct AssignResult {
    std::map<ArticleKey, Assignment> assignments;
    std::vector<ArticleKey> failed;  // no finite distance to any fixture

    std::map<ArticleKey, FixtureId> predictions() const {
        std::map<ArticleKey, FixtureId> out;
        for (const auto& [k, a] : assignments) out.emplace(k, a.fixture);
        return out;
    }

    History history() const {
        History out;
        for (const auto& [k, a] : assignments) out.emplace(k, a.dist);
        return out;
    }
};

inline AssignResult assign_all(const DistanceMatrix& m, const History* history = nullptr) {
    AssignResult out;
    for (std::size_t i = 0; i < m.articles.size(); ++i) {
        const auto& key = m.articles[i];
        FixtureDistances d;
        d.reserve(m.fixtures.size());
        for (std::size_t j = 0; j < m.fixtures.size(); ++j) d.emplace_back(m.fixtures[j], m.at(i, j));
        AssignmentDistribution dist;
        try {
            dist = idw_probabilities(key, d);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::NoFiniteDistance) throw;
            out.failed.push_back(key);
            continue;
        }
        bool fused = false;
        if (history) {
            if (auto it = history->find(key); it != history->end()) {
                dist = fuse_history(dist, it->second);
                fused = true;
            }
        }
        auto p = pick(dist);
        out.assignments.emplace(key, Assignment{std::move(dist), p.fixture, p.tie, fused});
    }
    return out;
}

}  // namespace shelfmap
