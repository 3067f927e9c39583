#pragma once

#include <random>

#include "cubetile/geometry.hpp"
#include "cubetile/rd_model.hpp"

// Random monotone rate tables and viewports for the randomized adaptation
// trials. Base rates and per-level increments are drawn independently per
// tile, so ladders are monotone by construction.
struct RandomTrial {
    cubetile::TileLayout layout;
    cubetile::PriorityMap priorities;
    cubetile::RateTable table;
    double total_min = 0.0;
    double total_max = 0.0;
    double bandwidth_bps = 0.0;
};

inline RandomTrial make_random_trial(std::mt19937& rng, bool big_layout, int levels = 6) {
    std::uniform_real_distribution<double> yaw_d(0.0, 360.0);
    std::uniform_real_distribution<double> base_d(5e4, 1.5e5);
    std::uniform_real_distribution<double> step_d(2e4, 4e5);

    RandomTrial t;
    t.layout = cubetile::build_layout(big_layout ? "tiled_cubemap_2" : "tiled_cubemap_1");
    t.priorities = cubetile::assign_priorities(t.layout, cubetile::Viewport(yaw_d(rng), 0.0, 90.0));
    for (const cubetile::TileId& tile : t.layout.tiles) {
        double rate = base_d(rng);
        for (int l = 0; l < levels; ++l) {
            t.table.add({0, tile, l}, {rate, {}});
            if (l == 0) t.total_min += rate;
            if (l == levels - 1) t.total_max += rate;
            rate += step_d(rng);
        }
    }
    std::uniform_real_distribution<double> b_d(t.total_min, t.total_max);
    t.bandwidth_bps = b_d(rng);
    return t;
}
