#pragma once

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "cubetile/error.hpp"
#include "cubetile/geometry.hpp"
#include "cubetile/rd_model.hpp"

namespace cubetile {

struct AdaptationConfig {
    int q_max_initial = 5;
    double sigma_init = 0.1;
    double sigma_step = 0.1;
    double sigma_cap = 1000.0; // safety net; the scan exits at finite sigma

    void validate() const {
        if (q_max_initial < 0) throw data_error("q_max_initial must be >= 0");
        if (!(sigma_init > 0.0)) throw data_error("sigma_init must be > 0");
        if (!(sigma_step > 0.0)) throw data_error("sigma_step must be > 0");
        if (!(sigma_cap >= sigma_init)) throw data_error("sigma_cap must be >= sigma_init");
    }
};

// Chosen quality level per tile for one chunk, plus the scan state that
// produced it. utility is the area-weighted level sum (areas total 1, so
// utilities are comparable across layouts).
struct ChunkAssignment {
    int chunk_index = 0;
    std::map<TileId, int> levels;
    double sigma_max = 0.0;
    int q_max_used = 0;
    double utility = 0.0;
    double total_bitrate_bps = 0.0;
    bool feasible = false;
};

namespace detail {

inline int round_half_up(double x) {
    return static_cast<int>(std::floor(x + 0.5));
}

// Dense per-chunk view of layout + priorities + rate table, indexed in
// layout tile order so that every sum below is order-deterministic.
struct ChunkProblem {
    std::vector<TileId> tiles;
    std::vector<double> areas;
    std::vector<int> priorities;
    std::vector<std::vector<double>> rates; // [tile][level]
    double total_area = 0.0;
    int q_max_initial = 0;

    ChunkProblem(const TileLayout& layout, const PriorityMap& prios, const RateTable& table,
                 int chunk, const AdaptationConfig& cfg) {
        q_max_initial = cfg.q_max_initial;
        for (const TileId& t : layout.tiles) {
            tiles.push_back(t);
            areas.push_back(layout.area(t));
            priorities.push_back(prios.at(t));
            std::vector<double> row;
            for (int l = 0; l <= cfg.q_max_initial; ++l)
                row.push_back(table.bitrate(chunk, t, l)); // throws on missing coverage
            rates.push_back(std::move(row));
            total_area += areas.back();
        }
    }

    void levels_at(int q_max, double sigma, std::vector<int>& out) const;

    double rate_of(const std::vector<int>& levels) const {
        double sum = 0.0;
        for (size_t k = 0; k < tiles.size(); ++k) sum += rates[k][levels[k]];
        return sum;
    }

    double utility_of(const std::vector<int>& levels) const {
        double sum = 0.0;
        for (size_t k = 0; k < tiles.size(); ++k) sum += areas[k] * levels[k];
        return sum;
    }

    // Same summation shape as utility_of with every level at q, so the
    // all-q exit compares bit-identical doubles.
    double target_utility(int q) const {
        double sum = 0.0;
        for (size_t k = 0; k < tiles.size(); ++k) sum += areas[k] * q;
        return sum;
    }

    ChunkAssignment assemble(int chunk, const std::vector<int>& levels, double sigma_max,
                             int q_max_used, double bandwidth_bps) const {
        ChunkAssignment a;
        a.chunk_index = chunk;
        for (size_t k = 0; k < tiles.size(); ++k) a.levels[tiles[k]] = levels[k];
        a.sigma_max = sigma_max;
        a.q_max_used = q_max_used;
        a.total_bitrate_bps = rate_of(levels);
        a.feasible = a.total_bitrate_bps <= bandwidth_bps;
        a.utility = utility_of(levels);
        return a;
    }
};

} // namespace detail

// Rounded Gaussian quality-degradation curve: the level streamed to a tile
// of the given priority when the FOV gets q_max and the curve has steepness
// sigma. sigma = 0 is the steep limit (q_max in the FOV, 0 elsewhere).
inline int quality_curve(int q_max, int priority, double sigma) {
    if (q_max < 0) throw data_error("q_max must be >= 0");
    if (priority < 0) throw data_error("priority must be >= 0");
    if (sigma < 0.0) throw data_error("sigma must be >= 0");
    if (sigma == 0.0) return priority == 0 ? q_max : 0;
    return detail::round_half_up(q_max * std::exp(-(static_cast<double>(priority) * priority) /
                                                  (2.0 * sigma * sigma)));
}

namespace detail {

inline void ChunkProblem::levels_at(int q_max, double sigma, std::vector<int>& out) const {
    out.resize(tiles.size());
    // levels depend only on (q_max, priority, sigma); cache per priority
    int cache_p[64];
    int cache_l[64];
    int cached = 0;
    for (size_t k = 0; k < tiles.size(); ++k) {
        const int p = priorities[k];
        int level = -1;
        for (int c = 0; c < cached; ++c)
            if (cache_p[c] == p) { level = cache_l[c]; break; }
        if (level < 0) {
            level = quality_curve(q_max, p, sigma);
            if (cached < 64) { cache_p[cached] = p; cache_l[cached] = level; ++cached; }
        }
        out[k] = level;
    }
}

} // namespace detail

// The rate adaptation heuristic: scan sigma upward from sigma_init in
// sigma_step increments, recording the last bandwidth-feasible sigma;
// whenever no sigma is feasible at all, drop q_max by one and restart. The
// scan stops once the rounded utility reaches the all-q_max target or the
// budget is exceeded past a recorded sigma. The exit condition compares
// the utility computed at the top of the iteration against the current
// target, so a decrement inside the same iteration lowers the target the
// stale utility is held against.
inline ChunkAssignment adapt_chunk(const TileLayout& layout, const PriorityMap& priorities,
                                   const RateTable& table, int chunk, double bandwidth_bps,
                                   const AdaptationConfig& cfg = {}) {
    cfg.validate();
    const detail::ChunkProblem prob(layout, priorities, table, chunk, cfg);

    int q_max = cfg.q_max_initial;
    double sigma = cfg.sigma_init;
    double sigma_max = 0.0;
    std::vector<int> levels;

    while (true) {
        prob.levels_at(q_max, sigma, levels);
        const double utility = prob.utility_of(levels);
        if (prob.rate_of(levels) <= bandwidth_bps) {
            sigma_max = sigma;
            sigma += cfg.sigma_step;
        } else if (sigma_max == 0.0 && q_max > 0) {
            sigma = cfg.sigma_init;
            --q_max;
        } else {
            break;
        }
        if (!(utility < prob.target_utility(q_max))) break;
        if (sigma > cfg.sigma_cap)
            throw internal_error("sigma scan exceeded sigma_cap=" + std::to_string(cfg.sigma_cap) +
                                 "; the rounded-utility exit should fire first");
    }

    prob.levels_at(q_max, sigma_max, levels);
    ChunkAssignment out = prob.assemble(chunk, levels, sigma_max, q_max, bandwidth_bps);
    if (!out.feasible) {
        // an infeasible exit implies sigma_max stayed 0; stream all-zero levels
        std::fill(levels.begin(), levels.end(), 0);
        out = prob.assemble(chunk, levels, 0.0, 0, bandwidth_bps);
    }
    return out;
}

// Exhaustive referee for adapt_chunk: enumerate q_max descending and, per
// family, a sigma grid ten times finer than the heuristic's, keeping the
// first-found assignment that maximizes (q_max, utility) lexicographically.
// Reported sigma_max is the last feasible grid point, so it lands within
// one sigma_step of the heuristic's. Monotone tables make feasibility a
// prefix of the sigma axis, which is what justifies stopping at the first
// infeasible assignment.
inline ChunkAssignment optimize_exhaustive(const TileLayout& layout, const PriorityMap& priorities,
                                           const RateTable& table, int chunk, double bandwidth_bps,
                                           const AdaptationConfig& cfg = {}) {
    cfg.validate();
    const detail::ChunkProblem prob(layout, priorities, table, chunk, cfg);
    const double fine_step = cfg.sigma_step / 10.0;

    std::vector<int> levels, prev_levels, best_levels;
    for (int q = cfg.q_max_initial; q >= 0; --q) {
        if (q == 0 && q < cfg.q_max_initial) break; // a descent to 0 never rescans sigma

        bool found = false;
        bool feasible_here = false;
        bool reached_target = false;
        double best_sigma = 0.0;
        prev_levels.clear();

        double sigma = cfg.sigma_init;
        while (sigma <= cfg.sigma_cap) {
            prob.levels_at(q, sigma, levels);
            if (levels != prev_levels) {
                prev_levels = levels;
                feasible_here = prob.rate_of(levels) <= bandwidth_bps;
                if (!feasible_here) break;
            }
            if (feasible_here) {
                found = true;
                best_levels = levels;
                best_sigma = sigma;
                if (prob.utility_of(levels) >= prob.target_utility(q)) { // all tiles at q
                    reached_target = true;
                    break;
                }
            }
            sigma += fine_step;
        }
        if (!reached_target && feasible_here && sigma > cfg.sigma_cap) {
            // sigma -> infinity limit: every rounded level equals q
            std::vector<int> inf_levels(prob.tiles.size(), q);
            if (prob.rate_of(inf_levels) <= bandwidth_bps) {
                found = true;
                best_levels = inf_levels;
                best_sigma = cfg.sigma_cap;
            }
        }
        if (found)
            return prob.assemble(chunk, best_levels, best_sigma, q, bandwidth_bps);
    }

    std::vector<int> zero(prob.tiles.size(), 0);
    return prob.assemble(chunk, zero, 0.0, 0, bandwidth_bps);
}

// Per-chunk independent adaptation over aligned viewport/bandwidth lists;
// chunk i uses viewports[i] and bandwidth_bps[i]. The table must cover
// chunks 0..n-1 exactly.
inline std::vector<ChunkAssignment> adapt_session(const TileLayout& layout,
                                                  const std::vector<Viewport>& viewports,
                                                  const RateTable& table,
                                                  const std::vector<double>& bandwidth_bps,
                                                  const AdaptationConfig& cfg = {}) {
    const std::vector<int> chunks = table.chunks();
    if (viewports.size() != chunks.size() || bandwidth_bps.size() != chunks.size())
        throw data_error("trace length mismatch: table has " + std::to_string(chunks.size()) +
                         " chunks, got " + std::to_string(viewports.size()) + " viewports and " +
                         std::to_string(bandwidth_bps.size()) + " bandwidth entries");
    for (size_t i = 0; i < chunks.size(); ++i)
        if (chunks[i] != static_cast<int>(i))
            throw data_error("rate table chunks must be contiguous from 0; missing chunk " +
                             std::to_string(i));

    std::vector<ChunkAssignment> out;
    out.reserve(chunks.size());
    for (size_t i = 0; i < chunks.size(); ++i) {
        const PriorityMap pm = assign_priorities(layout, viewports[i]);
        out.push_back(adapt_chunk(layout, pm, table, chunks[i], bandwidth_bps[i], cfg));
    }
    return out;
}

} // namespace cubetile
