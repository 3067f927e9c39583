#pragma once

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "cubetile/csv.hpp"
#include "cubetile/error.hpp"
#include "cubetile/geometry.hpp"

namespace cubetile {

// Quality levels are consecutive integers from 0 (worst); each maps to a
// target PSNR. The default ladder is the six-level 38..48 dB one.
struct QualityLadder {
    std::vector<double> target_psnr_db; // index == level

    static QualityLadder standard() {
        return {{38.0, 39.0, 40.0, 42.0, 45.0, 48.0}};
    }

    int q_max() const { return static_cast<int>(target_psnr_db.size()) - 1; }

    void validate() const {
        if (target_psnr_db.empty())
            throw data_error("quality ladder needs at least one level");
        for (size_t i = 1; i < target_psnr_db.size(); ++i)
            if (!(target_psnr_db[i] > target_psnr_db[i - 1]))
                throw data_error("ladder PSNR targets must strictly increase with level");
    }
};

// One encoded version from an R-D sweep.
struct RdPoint {
    int qp = 0;
    double bitrate_bps = 0.0;
    double psnr_db = 0.0;
};

struct RateEntry {
    double bitrate_bps = 0.0;
    std::optional<double> psnr_db;
};

struct RateKey {
    int chunk = 0;
    TileId tile;
    int level = 0;

    auto operator<=>(const RateKey&) const = default;
};

// Per (chunk, tile, level) bitrate lookup; the constraint data of the rate
// adaptation problem. Immutable once built.
class RateTable {
public:
    double chunk_duration_s = 4.0;

    void add(const RateKey& key, const RateEntry& entry) {
        if (!entries_.emplace(key, entry).second)
            throw data_error("duplicate rate entry for (chunk " + std::to_string(key.chunk) +
                             ", " + to_string(key.tile) + ", level " + std::to_string(key.level) + ")");
    }

    bool empty() const { return entries_.empty(); }
    size_t size() const { return entries_.size(); }

    const std::map<RateKey, RateEntry>& entries() const { return entries_; }

    const RateEntry& entry(int chunk, const TileId& tile, int level) const {
        auto it = entries_.find({chunk, tile, level});
        if (it == entries_.end())
            throw data_error("missing rate entry for (chunk " + std::to_string(chunk) +
                             ", " + to_string(tile) + ", level " + std::to_string(level) + ")");
        return it->second;
    }

    double bitrate(int chunk, const TileId& tile, int level) const {
        return entry(chunk, tile, level).bitrate_bps;
    }

    std::optional<double> psnr(int chunk, const TileId& tile, int level) const {
        return entry(chunk, tile, level).psnr_db;
    }

    int q_max() const {
        int m = 0;
        for (const auto& [key, e] : entries_) m = std::max(m, key.level);
        return m;
    }

    std::vector<int> chunks() const {
        std::vector<int> out;
        for (const auto& [key, e] : entries_)
            if (out.empty() || out.back() != key.chunk) out.push_back(key.chunk);
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }

    bool has_psnr() const {
        return !entries_.empty() &&
               std::all_of(entries_.begin(), entries_.end(),
                           [](const auto& kv) { return kv.second.psnr_db.has_value(); });
    }

    // Every (chunk, tile) must carry the full level range 0..q_max with
    // non-decreasing bitrate. `line_of` maps an entry back to its source
    // row for error reporting (may return 0 for fitted tables).
    template <typename LineOf>
    void validate(LineOf line_of) const {
        const int qm = q_max();
        std::map<std::pair<int, TileId>, std::vector<int>> seen;
        for (const auto& [key, e] : entries_)
            seen[{key.chunk, key.tile}].push_back(key.level);
        for (const auto& [ct, levels] : seen) {
            for (int l = 0; l <= qm; ++l)
                if (std::find(levels.begin(), levels.end(), l) == levels.end())
                    throw data_error("missing level for (chunk " + std::to_string(ct.first) +
                                     ", " + to_string(ct.second) + ", level " + std::to_string(l) + ")");
            for (int l = 1; l <= qm; ++l) {
                const RateKey lo{ct.first, ct.second, l - 1};
                const RateKey hi{ct.first, ct.second, l};
                if (entries_.at(hi).bitrate_bps < entries_.at(lo).bitrate_bps) {
                    std::string where;
                    if (long row = line_of(hi); row > 0) where = " (row " + std::to_string(row) + ")";
                    throw data_error("non-monotone ladder: bitrate at (chunk " + std::to_string(ct.first) +
                                     ", " + to_string(ct.second) + ", level " + std::to_string(l) +
                                     ") is below level " + std::to_string(l - 1) + where);
                }
            }
        }
    }

    void validate() const {
        validate([](const RateKey&) { return 0L; });
    }

private:
    std::map<RateKey, RateEntry> entries_;
};

using RdSweep = std::map<std::pair<int, TileId>, std::vector<RdPoint>>;

// For each (chunk, tile, level) picks the sweep point whose PSNR is nearest
// the level's target, ties toward lower bitrate, then repairs any bitrate
// inversion by copying the lower level's selection upward.
inline RateTable fit_ladder(const RdSweep& points, const QualityLadder& ladder,
                            double chunk_duration_s = 4.0) {
    ladder.validate();
    if (points.empty()) throw data_error("empty R-D sweep");
    RateTable table;
    table.chunk_duration_s = chunk_duration_s;
    for (const auto& [ct, pts] : points) {
        if (pts.empty())
            throw data_error("no R-D points for (chunk " + std::to_string(ct.first) +
                             ", " + to_string(ct.second) + ")");
        std::vector<RdPoint> sel(ladder.target_psnr_db.size());
        for (size_t level = 0; level < ladder.target_psnr_db.size(); ++level) {
            const double target = ladder.target_psnr_db[level];
            const RdPoint* best = &pts.front();
            for (const RdPoint& p : pts) {
                const double d = std::abs(p.psnr_db - target);
                const double bd = std::abs(best->psnr_db - target);
                if (d < bd || (d == bd && p.bitrate_bps < best->bitrate_bps)) best = &p;
            }
            sel[level] = *best;
        }
        for (size_t level = 1; level < sel.size(); ++level)
            if (sel[level].bitrate_bps < sel[level - 1].bitrate_bps) sel[level] = sel[level - 1];
        for (size_t level = 0; level < sel.size(); ++level)
            table.add({ct.first, ct.second, static_cast<int>(level)},
                      {sel[level].bitrate_bps, sel[level].psnr_db});
    }
    return table;
}

// Manifest CSV: header `chunk,tile,level,bitrate_bps[,psnr_db]`, one row per
// entry. Violations are rejected with their row number, never repaired.
inline RateTable load_rate_table(const std::string& path, double chunk_duration_s = 4.0) {
    const auto lines = csv::read_lines(path);
    if (lines.empty()) throw data_error(path + ": empty manifest");
    const auto header = csv::split(lines[0]);
    const bool with_psnr = header.size() == 5 && csv::trim(header[4]) == "psnr_db";
    if (!(header.size() >= 4 && csv::trim(header[0]) == "chunk" && csv::trim(header[1]) == "tile" &&
          csv::trim(header[2]) == "level" && csv::trim(header[3]) == "bitrate_bps" &&
          (header.size() == 4 || with_psnr)))
        throw data_error(path + ":1: expected header chunk,tile,level,bitrate_bps[,psnr_db]");

    RateTable table;
    table.chunk_duration_s = chunk_duration_s;
    std::map<RateKey, long> rows;
    for (size_t i = 1; i < lines.size(); ++i) {
        if (csv::trim(lines[i]).empty()) continue;
        const long row = static_cast<long>(i) + 1;
        const std::string at = path + ":" + std::to_string(row) + ": ";
        const auto f = csv::split(lines[i]);
        if (f.size() != header.size())
            throw data_error(at + "expected " + std::to_string(header.size()) + " fields, got " +
                             std::to_string(f.size()));
        RateKey key;
        try {
            key.chunk = static_cast<int>(csv::parse_long(f[0], "chunk index"));
            key.tile = parse_tile(std::string(csv::trim(f[1])));
            key.level = static_cast<int>(csv::parse_long(f[2], "level"));
            RateEntry e;
            e.bitrate_bps = csv::parse_double(f[3], "bitrate_bps");
            if (with_psnr) e.psnr_db = csv::parse_double(f[4], "psnr_db");
            if (key.chunk < 0) throw data_error("negative chunk index");
            if (key.level < 0) throw data_error("negative level");
            if (!(e.bitrate_bps > 0.0)) throw data_error("bitrate must be positive");
            table.add(key, e);
        } catch (const data_error& e) {
            throw data_error(at + e.what());
        }
        rows[key] = row;
    }
    if (table.empty()) throw data_error(path + ": manifest has no data rows");
    try {
        table.validate([&rows](const RateKey& k) {
            auto it = rows.find(k);
            return it == rows.end() ? 0L : it->second;
        });
    } catch (const data_error& e) {
        throw data_error(path + ": " + e.what());
    }
    return table;
}

inline void write_rate_table(std::ostream& out, const RateTable& table) {
    const bool with_psnr = table.has_psnr();
    out << "chunk,tile,level,bitrate_bps";
    if (with_psnr) out << ",psnr_db";
    out << "\n";
    for (const auto& [key, e] : table.entries()) {
        out << key.chunk << ',' << to_string(key.tile) << ',' << key.level << ','
            << csv::format_double(e.bitrate_bps);
        if (with_psnr) out << ',' << csv::format_double(*e.psnr_db);
        out << "\n";
    }
}

// Sweep CSV: header `chunk,tile,qp,bitrate_bps,psnr_db`.
inline RdSweep load_rd_sweep(const std::string& path) {
    const auto lines = csv::read_lines(path);
    if (lines.empty()) throw data_error(path + ": empty sweep file");
    const auto header = csv::split(lines[0]);
    if (!(header.size() == 5 && csv::trim(header[0]) == "chunk" && csv::trim(header[1]) == "tile" &&
          csv::trim(header[2]) == "qp" && csv::trim(header[3]) == "bitrate_bps" &&
          csv::trim(header[4]) == "psnr_db"))
        throw data_error(path + ":1: expected header chunk,tile,qp,bitrate_bps,psnr_db");
    RdSweep sweep;
    for (size_t i = 1; i < lines.size(); ++i) {
        if (csv::trim(lines[i]).empty()) continue;
        const std::string at = path + ":" + std::to_string(i + 1) + ": ";
        const auto f = csv::split(lines[i]);
        if (f.size() != 5) throw data_error(at + "expected 5 fields");
        try {
            const int chunk = static_cast<int>(csv::parse_long(f[0], "chunk index"));
            const TileId tile = parse_tile(std::string(csv::trim(f[1])));
            RdPoint p;
            p.qp = static_cast<int>(csv::parse_long(f[2], "qp"));
            p.bitrate_bps = csv::parse_double(f[3], "bitrate_bps");
            p.psnr_db = csv::parse_double(f[4], "psnr_db");
            if (!(p.bitrate_bps > 0.0)) throw data_error("bitrate must be positive");
            if (!(p.psnr_db > 0.0 && p.psnr_db < 100.0)) throw data_error("psnr out of range (0, 100)");
            sweep[{chunk, tile}].push_back(p);
        } catch (const data_error& e) {
            throw data_error(at + e.what());
        }
    }
    if (sweep.empty()) throw data_error(path + ": sweep has no data rows");
    return sweep;
}

// Sum of per-tile bitrates at the assigned levels for one chunk.
inline double total_bitrate(const RateTable& table, const std::map<TileId, int>& assignment,
                            int chunk) {
    double sum = 0.0;
    for (const auto& [tile, level] : assignment)
        sum += table.bitrate(chunk, tile, level);
    return sum;
}

} // namespace cubetile
