#include <doctest.h>

#include <cstdlib>
#include <random>
#include <set>

#include "cubetile/geometry.hpp"

using namespace cubetile;

namespace {

// Independent FOV oracle: intersect the open viewport interval with each
// tile span via explicit endpoint unwrapping instead of the modular offset
// trick used by the implementation.
std::set<TileId> fov_oracle(const TileLayout& layout, double yaw, double hfov) {
    std::set<TileId> out;
    const double span = 360.0 / layout.ring_size();
    const double h = std::min(hfov, 360.0);
    const double a = yaw - h / 2.0;
    const double b = yaw + h / 2.0;
    for (const TileId& t : layout.ring) {
        const double s = layout.tile_start_deg(t);
        for (int k = -2; k <= 2; ++k) {
            const double lo = s + 360.0 * k;
            const double hi = lo + span;
            if (std::max(a, lo) < std::min(b, hi)) {
                out.insert(t);
                break;
            }
        }
    }
    return out;
}

// Independent priority oracle: breadth-first search over the ring
// adjacency graph from the FOV tile set.
std::map<TileId, int> priority_oracle(const TileLayout& layout, double yaw, double hfov) {
    const auto fov = fov_oracle(layout, yaw, hfov);
    const int n = layout.ring_size();
    std::vector<int> dist(n, -1);
    std::vector<int> frontier;
    for (const TileId& t : fov) {
        dist[layout.ring_index(t)] = 0;
        frontier.push_back(layout.ring_index(t));
    }
    int d = 0;
    while (!frontier.empty()) {
        std::vector<int> next;
        ++d;
        for (int i : frontier)
            for (int j : {(i + 1) % n, (i + n - 1) % n})
                if (dist[j] < 0) {
                    dist[j] = d;
                    next.push_back(j);
                }
        frontier = std::move(next);
    }
    std::map<TileId, int> out;
    for (const TileId& t : layout.ring) out[t] = dist[layout.ring_index(t)];
    const int caps = static_cast<int>(fov.size()) == n ? 0 : 1;
    out[{Face::top, 0}] = caps;
    out[{Face::bottom, 0}] = caps;
    return out;
}

} // namespace

TEST_CASE("build_layout: canonical layouts") {
    const auto tc1 = build_layout("tiled_cubemap_1");
    CHECK(tc1.tiles.size() == 10);
    CHECK(tc1.ring.size() == 8);
    CHECK(tc1.slices_per_side_face == 2);
    CHECK(tc1.area({Face::front, 0}) == doctest::Approx(1.0 / 12.0).epsilon(1e-12));
    CHECK(tc1.area({Face::top, 0}) == doctest::Approx(1.0 / 6.0).epsilon(1e-12));

    const auto tc2 = build_layout("tiled_cubemap_2");
    CHECK(tc2.tiles.size() == 18);
    CHECK(tc2.ring.size() == 16);
    CHECK(tc2.area({Face::left, 3}) == doctest::Approx(1.0 / 24.0).epsilon(1e-12));

    for (const auto& layout : {tc1, tc2}) {
        double sum = 0.0;
        for (const auto& t : layout.tiles) sum += layout.area(t);
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
    }

    CHECK_THROWS_AS(build_layout("cubemap_3"), data_error);
}

TEST_CASE("build_layout: ring is contiguous and covers each side tile once") {
    for (const char* name : {"tiled_cubemap_1", "tiled_cubemap_2"}) {
        const auto layout = build_layout(name);
        std::set<TileId> seen;
        const double span = 360.0 / layout.ring_size();
        for (size_t i = 0; i < layout.ring.size(); ++i) {
            CHECK(seen.insert(layout.ring[i]).second);
            const double here = layout.tile_start_deg(layout.ring[i]);
            const double next = layout.tile_start_deg(layout.ring[(i + 1) % layout.ring.size()]);
            double step = std::fmod(next - here + 720.0, 360.0);
            CHECK(step == doctest::Approx(span).epsilon(1e-12));
        }
        CHECK(seen.size() == layout.ring.size());
    }
}

TEST_CASE("viewport normalization and validation") {
    CHECK(Viewport(370.0, 0.0).yaw_deg == doctest::Approx(10.0));
    CHECK(Viewport(-10.0, 0.0).yaw_deg == doctest::Approx(350.0));
    CHECK(Viewport(0.0, 0.0).hfov_deg == 90.0);
    CHECK_THROWS_AS(Viewport(0.0, 91.0), data_error);
    CHECK_THROWS_AS(Viewport(0.0, 0.0, 0.0), data_error);
    CHECK_THROWS_AS(Viewport(0.0, 0.0, -5.0), data_error);
}

TEST_CASE("tile name round trips") {
    CHECK(to_string(TileId{Face::front, 0}) == "front_0");
    CHECK(to_string(TileId{Face::top, 0}) == "top");
    CHECK(parse_tile("back_1") == TileId{Face::back, 1});
    CHECK(parse_tile("bottom") == TileId{Face::bottom, 0});
    CHECK_THROWS_AS(parse_tile("front"), data_error);
    CHECK_THROWS_AS(parse_tile("top_0"), data_error);
    CHECK_THROWS_AS(parse_tile("middle_1"), data_error);
    CHECK_THROWS_AS(parse_tile("front_x"), data_error);
}

TEST_CASE("fov_tiles: centered viewport hits only the front face") {
    const auto layout = build_layout("tiled_cubemap_1");
    const auto fov = fov_tiles(layout, Viewport(0.0, 0.0, 90.0));
    const std::set<TileId> expected = {{Face::front, 0}, {Face::front, 1}};
    CHECK(fov == expected);
    CHECK(fov == fov_oracle(layout, 0.0, 90.0));
}

TEST_CASE("fov_tiles: yaw on a face boundary includes both adjacent tiles") {
    const auto layout = build_layout("tiled_cubemap_1");
    const auto fov = fov_tiles(layout, Viewport(45.0, 0.0, 90.0));
    const std::set<TileId> expected = {{Face::front, 1}, {Face::right, 0}};
    CHECK(fov == expected);
    CHECK(fov == fov_oracle(layout, 45.0, 90.0));
}

TEST_CASE("fov_tiles: full circle covers the whole ring") {
    const auto layout = build_layout("tiled_cubemap_1");
    const auto fov = fov_tiles(layout, Viewport(0.0, 0.0, 360.0));
    CHECK(fov.size() == 8);
}

TEST_CASE("fov_tiles: nonempty for any positive hfov, matches oracle") {
    std::mt19937 rng(20240517);
    std::uniform_real_distribution<double> yaw_d(0.0, 360.0);
    std::uniform_real_distribution<double> hfov_d(0.001, 359.0);
    for (const char* name : {"tiled_cubemap_1", "tiled_cubemap_2"}) {
        const auto layout = build_layout(name);
        for (int i = 0; i < 500; ++i) {
            const double yaw = yaw_d(rng);
            const double hfov = hfov_d(rng);
            const auto fov = fov_tiles(layout, Viewport(yaw, 0.0, hfov));
            CHECK(!fov.empty());
            CHECK(fov == fov_oracle(layout, yaw, hfov));
        }
    }
}

TEST_CASE("assign_priorities: front-centered viewport on tiled_cubemap_1") {
    const auto layout = build_layout("tiled_cubemap_1");
    const auto pm = assign_priorities(layout, Viewport(0.0, 0.0, 90.0));
    CHECK(pm.at({Face::front, 0}) == 0);
    CHECK(pm.at({Face::front, 1}) == 0);
    CHECK(pm.at({Face::right, 0}) == 1);
    CHECK(pm.at({Face::left, 1}) == 1);
    CHECK(pm.at({Face::right, 1}) == 2);
    CHECK(pm.at({Face::left, 0}) == 2);
    CHECK(pm.at({Face::back, 0}) == 3);
    CHECK(pm.at({Face::back, 1}) == 3);
    CHECK(pm.at({Face::top, 0}) == 1);
    CHECK(pm.at({Face::bottom, 0}) == 1);
}

TEST_CASE("assign_priorities: full-circle FOV flattens everything to zero") {
    const auto layout = build_layout("tiled_cubemap_1");
    const auto pm = assign_priorities(layout, Viewport(0.0, 0.0, 360.0));
    for (const auto& [tile, p] : pm.priorities) CHECK(p == 0);
}

TEST_CASE("assign_priorities: tiled_cubemap_2 matches the BFS oracle") {
    const auto layout = build_layout("tiled_cubemap_2");
    const auto pm = assign_priorities(layout, Viewport(0.0, 0.0, 90.0));
    const auto expect = priority_oracle(layout, 0.0, 90.0);
    for (const auto& [tile, p] : expect) CHECK(pm.at(tile) == p);
    // a 90 degree window meets four 22.5 degree slices; the 16-tile ring
    // then peaks six steps away
    CHECK(pm.max_priority() == 6);
}

TEST_CASE("assign_priorities: priorities form a contiguous range from zero") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> yaw_d(0.0, 360.0);
    std::uniform_real_distribution<double> hfov_d(1.0, 359.0);
    for (const char* name : {"tiled_cubemap_1", "tiled_cubemap_2"}) {
        const auto layout = build_layout(name);
        const int n = layout.ring_size();
        for (int i = 0; i < 300; ++i) {
            const auto pm = assign_priorities(layout, Viewport(yaw_d(rng), 0.0, hfov_d(rng)));
            std::set<int> values;
            for (const auto& [tile, p] : pm.priorities) {
                CHECK(p >= 0);
                values.insert(p);
            }
            CHECK(*values.begin() == 0);
            CHECK(*values.rbegin() == static_cast<int>(values.size()) - 1);
            // ring-adjacent tiles never differ by more than one step
            for (int j = 0; j < n; ++j) {
                const int a = pm.at(layout.ring[j]);
                const int b = pm.at(layout.ring[(j + 1) % n]);
                CHECK(std::abs(a - b) <= 1);
            }
        }
    }
}

TEST_CASE("assign_priorities: pitch never changes the map") {
    const auto layout = build_layout("tiled_cubemap_1");
    for (double yaw : {0.0, 57.0, 222.0})
        for (double pitch : {-90.0, -30.0, 45.0, 90.0}) {
            const auto level = assign_priorities(layout, Viewport(yaw, 0.0, 90.0));
            const auto tilted = assign_priorities(layout, Viewport(yaw, pitch, 90.0));
            CHECK(level.priorities == tilted.priorities);
        }
}

TEST_CASE("assign_priorities: invariant under one-tile-span rotation") {
    for (const char* name : {"tiled_cubemap_1", "tiled_cubemap_2"}) {
        const auto layout = build_layout(name);
        const int n = layout.ring_size();
        const double span = 360.0 / n;
        for (double yaw : {0.0, 10.0, 71.0}) {
            const auto base = assign_priorities(layout, Viewport(yaw, 0.0, 90.0));
            const auto rotated = assign_priorities(layout, Viewport(yaw + span, 0.0, 90.0));
            for (const TileId& t : layout.ring) {
                const TileId shifted = layout.ring[(layout.ring_index(t) + 1) % n];
                CHECK(rotated.at(shifted) == base.at(t));
            }
        }
    }
}

TEST_CASE("assign_priorities: 180 degree symmetry exchanges opposite ring positions") {
    const auto layout = build_layout("tiled_cubemap_1");
    const int n = layout.ring_size();
    for (double yaw : {0.0, 33.0, 120.0}) {
        const auto base = assign_priorities(layout, Viewport(yaw, 0.0, 90.0));
        const auto flipped = assign_priorities(layout, Viewport(yaw + 180.0, 0.0, 90.0));
        for (const TileId& t : layout.ring) {
            const TileId opposite = layout.ring[(layout.ring_index(t) + n / 2) % n];
            CHECK(flipped.at(opposite) == base.at(t));
        }
    }
}

TEST_CASE("assign_priorities: caps take the first non-FOV neighbour priority") {
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> yaw_d(0.0, 360.0);
    const auto layout = build_layout("tiled_cubemap_2");
    for (int i = 0; i < 200; ++i) {
        const double yaw = yaw_d(rng);
        const auto pm = assign_priorities(layout, Viewport(yaw, 0.0, 90.0));
        CHECK(pm.at({Face::top, 0}) == 1);
        CHECK(pm.at({Face::bottom, 0}) == 1);
        // ring neighbours of the FOV block really do carry priority 1
        int ones = 0;
        for (const TileId& t : layout.ring)
            if (pm.at(t) == 1) ++ones;
        CHECK(ones == 2);
    }
}
