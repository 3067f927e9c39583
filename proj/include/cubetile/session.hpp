#pragma once

#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "cubetile/adaptation.hpp"
#include "cubetile/csv.hpp"
#include "cubetile/error.hpp"
#include "cubetile/geometry.hpp"
#include "cubetile/rd_model.hpp"

namespace cubetile {

struct ViewportTrace {
    std::vector<std::pair<int, Viewport>> entries;

    void validate() const {
        for (size_t i = 0; i < entries.size(); ++i)
            if (entries[i].first != static_cast<int>(i))
                throw data_error("viewport trace chunk indices must run 0,1,2,... without gaps; "
                                 "entry " + std::to_string(i) + " has chunk " +
                                 std::to_string(entries[i].first));
    }
};

struct BandwidthTrace {
    std::vector<std::pair<int, double>> entries;

    void validate() const {
        for (size_t i = 0; i < entries.size(); ++i) {
            if (i > 0 && entries[i].first <= entries[i - 1].first)
                throw data_error("bandwidth trace chunk indices must strictly increase");
            if (!(entries[i].second > 0.0))
                throw data_error("bandwidth must be positive (chunk " +
                                 std::to_string(entries[i].first) + ")");
        }
    }
};

// Everything behind the per-priority quality curves and the per-face PSNR
// comparison: raw per-chunk assignments plus recomputable aggregates.
struct SessionReport {
    std::vector<ChunkAssignment> assignments;
    std::vector<PriorityMap> priorities; // parallel to assignments
    double mean_utility = 0.0;
    std::map<int, double> per_priority_mean_level;
    std::optional<double> mean_weighted_psnr_db;          // present when the manifest carries PSNR
    std::optional<std::map<Face, double>> face_psnr_db;   // area-weighted within each face
};

// Trace CSV: header `chunk,yaw_deg,pitch_deg`.
inline ViewportTrace load_viewport_trace(const std::string& path, double hfov_deg = 90.0) {
    const auto lines = csv::read_lines(path);
    if (lines.empty()) throw data_error(path + ": empty viewport trace");
    const auto header = csv::split(lines[0]);
    if (!(header.size() == 3 && csv::trim(header[0]) == "chunk" && csv::trim(header[1]) == "yaw_deg" &&
          csv::trim(header[2]) == "pitch_deg"))
        throw data_error(path + ":1: expected header chunk,yaw_deg,pitch_deg");
    ViewportTrace trace;
    for (size_t i = 1; i < lines.size(); ++i) {
        if (csv::trim(lines[i]).empty()) continue;
        const std::string at = path + ":" + std::to_string(i + 1) + ": ";
        const auto f = csv::split(lines[i]);
        if (f.size() != 3) throw data_error(at + "expected 3 fields");
        try {
            const int chunk = static_cast<int>(csv::parse_long(f[0], "chunk index"));
            const double yaw = csv::parse_double(f[1], "yaw_deg");
            const double pitch = csv::parse_double(f[2], "pitch_deg");
            trace.entries.emplace_back(chunk, Viewport(yaw, pitch, hfov_deg));
        } catch (const data_error& e) {
            throw data_error(at + e.what());
        }
    }
    try {
        trace.validate();
    } catch (const data_error& e) {
        throw data_error(path + ": " + e.what());
    }
    return trace;
}

// Trace CSV: header `chunk,bandwidth_bps`.
inline BandwidthTrace load_bandwidth_trace(const std::string& path) {
    const auto lines = csv::read_lines(path);
    if (lines.empty()) throw data_error(path + ": empty bandwidth trace");
    const auto header = csv::split(lines[0]);
    if (!(header.size() == 2 && csv::trim(header[0]) == "chunk" &&
          csv::trim(header[1]) == "bandwidth_bps"))
        throw data_error(path + ":1: expected header chunk,bandwidth_bps");
    BandwidthTrace trace;
    for (size_t i = 1; i < lines.size(); ++i) {
        if (csv::trim(lines[i]).empty()) continue;
        const std::string at = path + ":" + std::to_string(i + 1) + ": ";
        const auto f = csv::split(lines[i]);
        if (f.size() != 2) throw data_error(at + "expected 2 fields");
        try {
            const int chunk = static_cast<int>(csv::parse_long(f[0], "chunk index"));
            const double bps = csv::parse_double(f[1], "bandwidth_bps");
            trace.entries.emplace_back(chunk, bps);
        } catch (const data_error& e) {
            throw data_error(at + e.what());
        }
    }
    try {
        trace.validate();
    } catch (const data_error& e) {
        throw data_error(path + ": " + e.what());
    }
    return trace;
}

inline BandwidthTrace constant_bandwidth_trace(const std::vector<int>& chunks, double bps) {
    BandwidthTrace trace;
    for (int c : chunks) trace.entries.emplace_back(c, bps);
    trace.validate();
    return trace;
}

namespace detail {

inline void check_trace_chunks(const std::vector<int>& table_chunks,
                               const std::vector<int>& trace_chunks, const char* what) {
    if (table_chunks != trace_chunks)
        throw data_error(std::string(what) +
                         " trace does not cover the rate table's chunk set (table has " +
                         std::to_string(table_chunks.size()) + " chunks, trace " +
                         std::to_string(trace_chunks.size()) + ")");
}

} // namespace detail

inline SessionReport run_session(const TileLayout& layout, const RateTable& table,
                                 const ViewportTrace& vtrace, const BandwidthTrace& btrace,
                                 const AdaptationConfig& cfg = {}) {
    vtrace.validate();
    btrace.validate();
    const std::vector<int> chunks = table.chunks();
    if (chunks.empty()) throw data_error("rate table has no chunks");
    std::vector<int> vchunks, bchunks;
    for (const auto& [c, vp] : vtrace.entries) vchunks.push_back(c);
    for (const auto& [c, bps] : btrace.entries) bchunks.push_back(c);
    detail::check_trace_chunks(chunks, vchunks, "viewport");
    detail::check_trace_chunks(chunks, bchunks, "bandwidth");

    SessionReport report;
    const bool with_psnr = table.has_psnr();
    double utility_sum = 0.0;
    double psnr_sum = 0.0;
    std::map<int, std::pair<double, long>> level_acc;          // priority -> (sum, count)
    std::map<Face, std::pair<double, double>> face_acc;        // face -> (area*psnr sum, area sum)

    for (size_t i = 0; i < chunks.size(); ++i) {
        const PriorityMap pm = assign_priorities(layout, vtrace.entries[i].second);
        ChunkAssignment a =
            adapt_chunk(layout, pm, table, chunks[i], btrace.entries[i].second, cfg);
        utility_sum += a.utility;
        for (const auto& [tile, level] : a.levels) {
            auto& [sum, count] = level_acc[pm.at(tile)];
            sum += level;
            ++count;
            if (with_psnr) {
                const double p = *table.psnr(chunks[i], tile, level);
                const double area = layout.area(tile);
                psnr_sum += area * p;
                auto& [ps, as] = face_acc[tile.face];
                ps += area * p;
                as += area;
            }
        }
        report.priorities.push_back(pm);
        report.assignments.push_back(std::move(a));
    }

    const double n = static_cast<double>(chunks.size());
    report.mean_utility = utility_sum / n;
    for (const auto& [prio, acc] : level_acc)
        report.per_priority_mean_level[prio] = acc.first / static_cast<double>(acc.second);
    if (with_psnr) {
        report.mean_weighted_psnr_db = psnr_sum / n;
        std::map<Face, double> faces;
        for (const auto& [face, acc] : face_acc) faces[face] = acc.first / acc.second;
        report.face_psnr_db = std::move(faces);
    }
    return report;
}

struct PolicyComparison {
    SessionReport psnr_ladder;
    SessionReport qp_ladder;
    std::map<Face, double> face_psnr_delta_db; // psnr_ladder minus qp_ladder
};

// Runs the same session under a PSNR-targeted ladder and a QP-style ladder
// and reports the per-face aggregated PSNR difference.
inline PolicyComparison compare_policies(const TileLayout& layout, const RateTable& psnr_rates,
                                         const RateTable& qp_rates, const ViewportTrace& vtrace,
                                         const BandwidthTrace& btrace,
                                         const AdaptationConfig& cfg = {}) {
    if (!psnr_rates.has_psnr() || !qp_rates.has_psnr())
        throw data_error("compare_policies needs psnr_db in both manifests");
    std::vector<RateKey> a, b;
    for (const auto& [key, e] : psnr_rates.entries()) a.push_back(key);
    for (const auto& [key, e] : qp_rates.entries()) b.push_back(key);
    if (a != b) throw data_error("the two manifests must cover identical (chunk, tile, level) sets");

    PolicyComparison cmp;
    cmp.psnr_ladder = run_session(layout, psnr_rates, vtrace, btrace, cfg);
    cmp.qp_ladder = run_session(layout, qp_rates, vtrace, btrace, cfg);
    for (const auto& [face, v] : *cmp.psnr_ladder.face_psnr_db)
        cmp.face_psnr_delta_db[face] = v - cmp.qp_ladder.face_psnr_db->at(face);
    return cmp;
}

// One row per (chunk, tile) in layout tile order, per-chunk scan fields
// repeated on every row. Summing bitrate_bps over a chunk's rows in order
// reproduces that chunk's total_bitrate_bps exactly.
inline void write_assignments_csv(std::ostream& out, const TileLayout& layout,
                                  const RateTable& table, const SessionReport& report) {
    out << "chunk,tile,priority,level,bitrate_bps,sigma_max,q_max_used,utility,feasible\n";
    for (size_t i = 0; i < report.assignments.size(); ++i) {
        const ChunkAssignment& a = report.assignments[i];
        const PriorityMap& pm = report.priorities[i];
        for (const TileId& tile : layout.tiles) {
            const int level = a.levels.at(tile);
            out << a.chunk_index << ',' << to_string(tile) << ',' << pm.at(tile) << ',' << level
                << ',' << csv::format_double(table.bitrate(a.chunk_index, tile, level)) << ','
                << csv::format_double(a.sigma_max) << ',' << a.q_max_used << ','
                << csv::format_double(a.utility) << ',' << (a.feasible ? 1 : 0) << "\n";
        }
    }
}

// `priority,mean_level` rows followed by `metric,value` summary rows.
inline void write_report_csv(std::ostream& out, const SessionReport& report) {
    out << "priority,mean_level\n";
    for (const auto& [prio, mean] : report.per_priority_mean_level)
        out << prio << ',' << csv::format_double(mean) << "\n";
    out << "metric,value\n";
    out << "chunks," << report.assignments.size() << "\n";
    out << "mean_utility," << csv::format_double(report.mean_utility) << "\n";
    if (report.mean_weighted_psnr_db)
        out << "mean_weighted_psnr_db," << csv::format_double(*report.mean_weighted_psnr_db) << "\n";
    if (report.face_psnr_db)
        for (const auto& [face, v] : *report.face_psnr_db)
            out << "psnr_face_" << face_name(face) << ',' << csv::format_double(v) << "\n";
}

} // namespace cubetile
