#include <doctest.h>

#include "cubetile/storage.hpp"
#include "test_util.hpp"

using namespace cubetile;

TEST_CASE("storage_offset_cubemap: version counts and byte arithmetic") {
    StorageScenario s; // 30 viewports x 3 profiles
    CHECK(offset_version_count(s) == 90);

    StorageScenario one;
    one.n_viewports = 1;
    one.offset_bitrates_bps = {8e6};
    one.duration_s = 60.0;
    CHECK(storage_offset_cubemap(one) == 6e7); // 8e6 * 60 / 8 = 60 decimal MB

    StorageScenario defaults;
    defaults.duration_s = 60.0;
    CHECK(storage_offset_cubemap(defaults) == doctest::Approx(3.6e9).epsilon(1e-12));
}

TEST_CASE("storage_offset_cubemap: linear in viewports and duration") {
    StorageScenario s;
    s.duration_s = 45.0;
    const double base = storage_offset_cubemap(s);
    s.n_viewports *= 2;
    CHECK(storage_offset_cubemap(s) == doctest::Approx(2 * base).epsilon(1e-12));
    s.n_viewports /= 2;
    s.duration_s *= 3.0;
    CHECK(storage_offset_cubemap(s) == doctest::Approx(3 * base).epsilon(1e-12));
}

TEST_CASE("storage_tiled_cubemap: uniform table and scaling") {
    RateTable table;
    const auto layout = build_layout("tiled_cubemap_1");
    for (const TileId& t : layout.tiles)
        for (int l = 0; l < 6; ++l) table.add({0, t, l}, {1e6, {}});
    // 60 entries x 1 Mbps x 4 s / 8 = 3.0e7 bytes
    CHECK(storage_tiled_cubemap(table) == 3.0e7);
    CHECK(storage_tiled_cubemap(table, 4.0) == doctest::Approx(3.0e7).epsilon(1e-12));
    CHECK(storage_tiled_cubemap(table, 8.0) == doctest::Approx(6.0e7).epsilon(1e-12));

    CHECK(storage_tiled_cubemap(RateTable{}) == 0.0);
}

TEST_CASE("storage_tiled_cubemap: heterogeneous fixture matches a brute-force sum") {
    const auto table = load_rate_table(fixture_path("rates_tc1.csv"));
    double expect = 0.0;
    for (const auto& [key, e] : table.entries()) expect += e.bitrate_bps * 4.0 / 8.0;
    CHECK(storage_tiled_cubemap(table) == expect);
    // independent of any viewport/profile scenario by construction
    CHECK(storage_tiled_cubemap(table, 12.0) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("storage_savings_percent") {
    CHECK(storage_savings_percent(5.0, 5.0) == 0.0);
    CHECK(storage_savings_percent(7.7e9, 1e9) == doctest::Approx(670.0).epsilon(1e-9));
    CHECK(storage_savings_percent(1.0, 2.0) == doctest::Approx(-50.0).epsilon(1e-12));
    // swapping arguments follows the formula, no silent reordering
    CHECK(storage_savings_percent(2.0, 1.0) == doctest::Approx(100.0).epsilon(1e-12));
    CHECK_THROWS_AS(storage_savings_percent(1.0, 0.0), data_error);
}

TEST_CASE("storage scenario validation") {
    StorageScenario s;
    s.n_viewports = 0;
    CHECK_THROWS_AS(s.validate(), data_error);
    s = {};
    s.offset_bitrates_bps = {};
    CHECK_THROWS_AS(s.validate(), data_error);
    s = {};
    s.offset_bitrates_bps = {2e6, -1.0};
    CHECK_THROWS_AS(s.validate(), data_error);
    s = {};
    s.duration_s = 0.0;
    CHECK_THROWS_AS(s.validate(), data_error);
}
