#pragma once

#include <string>
#include <vector>

#include "cubetile/error.hpp"
#include "cubetile/rd_model.hpp"

namespace cubetile {

// Server-side storage comparison: offset-cubemap keeps one full encode per
// (viewport, bandwidth profile); tiled cubemap keeps each tile once per
// quality level regardless of viewports.
struct StorageScenario {
    int n_viewports = 30;
    std::vector<double> offset_bitrates_bps = {2e6, 4e6, 10e6}; // one per profile
    double duration_s = 60.0;
    int ladder_levels = 6;

    int n_profiles() const { return static_cast<int>(offset_bitrates_bps.size()); }

    void validate() const {
        if (n_viewports < 1) throw data_error("n_viewports must be >= 1");
        if (offset_bitrates_bps.empty()) throw data_error("need at least one bandwidth profile");
        for (double b : offset_bitrates_bps)
            if (!(b > 0.0)) throw data_error("offset bitrates must be positive");
        if (!(duration_s > 0.0)) throw data_error("duration must be positive");
        if (ladder_levels < 1) throw data_error("ladder_levels must be >= 1");
    }
};

// Stored versions of one video under the offset-cubemap scheme.
inline int offset_version_count(const StorageScenario& s) {
    return s.n_viewports * s.n_profiles();
}

inline double storage_offset_cubemap(const StorageScenario& s) {
    s.validate();
    double per_viewport = 0.0;
    for (double b : s.offset_bitrates_bps) per_viewport += b * s.duration_s / 8.0;
    return s.n_viewports * per_viewport;
}

// Bytes to store every (chunk, tile, level) entry; a duration different
// from the table's own span scales the result linearly. duration_s <= 0
// means "the table's span as-is".
inline double storage_tiled_cubemap(const RateTable& table, double duration_s = 0.0) {
    double bytes = 0.0;
    for (const auto& [key, e] : table.entries())
        bytes += e.bitrate_bps * table.chunk_duration_s / 8.0;
    if (duration_s > 0.0) {
        const double span = static_cast<double>(table.chunks().size()) * table.chunk_duration_s;
        if (span <= 0.0) return 0.0;
        bytes *= duration_s / span;
    }
    return bytes;
}

inline double storage_savings_percent(double offset_bytes, double tiled_bytes) {
    if (tiled_bytes == 0.0) throw data_error("savings undefined for zero tiled storage");
    return 100.0 * (offset_bytes - tiled_bytes) / tiled_bytes;
}

} // namespace cubetile
