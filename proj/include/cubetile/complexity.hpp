#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "cubetile/csv.hpp"
#include "cubetile/error.hpp"
#include "cubetile/geometry.hpp"

namespace cubetile {

// One raw 8-bit luma frame, row-major.
struct LumaFrame {
    int width = 0;
    int height = 0;
    std::vector<uint8_t> samples;

    LumaFrame() = default;
    LumaFrame(int w, int h, std::vector<uint8_t> data) : width(w), height(h), samples(std::move(data)) {
        if (width < 1 || height < 1)
            throw data_error("frame dimensions must be >= 1");
        if (samples.size() != static_cast<size_t>(width) * height)
            throw data_error("frame sample count " + std::to_string(samples.size()) +
                             " does not match " + std::to_string(width) + "x" + std::to_string(height));
    }
    LumaFrame(int w, int h, uint8_t fill = 0)
        : LumaFrame(w, h, std::vector<uint8_t>(static_cast<size_t>(w) * h, fill)) {}

    uint8_t at(int x, int y) const { return samples[static_cast<size_t>(y) * width + x]; }
    uint8_t& at(int x, int y) { return samples[static_cast<size_t>(y) * width + x]; }
};

struct LumaSequence {
    std::vector<LumaFrame> frames;

    void validate() const {
        if (frames.empty()) throw data_error("sequence needs at least one frame");
        for (const LumaFrame& f : frames)
            if (f.width != frames[0].width || f.height != frames[0].height)
                throw data_error("all frames in a sequence must share dimensions");
    }
};

struct SiTi {
    double si = 0.0;
    double ti = 0.0;
};

// A real-valued image plane (gradient magnitudes, frame differences).
struct Plane {
    int width = 0;
    int height = 0;
    std::vector<double> values;

    double at(int x, int y) const { return values[static_cast<size_t>(y) * width + x]; }
};

namespace detail {

inline double population_stddev(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double acc = 0.0;
    for (double x : v) acc += (x - mean) * (x - mean);
    return std::sqrt(acc / static_cast<double>(v.size()));
}

// Median over a multiset; an even count averages the two middle values.
inline double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const size_t n = v.size();
    if (n % 2 == 1) return v[n / 2];
    return (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

} // namespace detail

// 3x3 Sobel gradient magnitude over interior pixels; the 1-pixel border is
// excluded rather than padded. Gx = [[-1,0,1],[-2,0,2],[-1,0,1]], Gy is its
// transpose.
inline Plane sobel_magnitude(const LumaFrame& f) {
    if (f.width < 3 || f.height < 3)
        throw data_error("Sobel needs a frame of at least 3x3, got " + std::to_string(f.width) +
                         "x" + std::to_string(f.height));
    Plane out;
    out.width = f.width - 2;
    out.height = f.height - 2;
    out.values.resize(static_cast<size_t>(out.width) * out.height);
    for (int y = 1; y < f.height - 1; ++y) {
        for (int x = 1; x < f.width - 1; ++x) {
            const int gx = -f.at(x - 1, y - 1) + f.at(x + 1, y - 1)
                         - 2 * f.at(x - 1, y) + 2 * f.at(x + 1, y)
                         - f.at(x - 1, y + 1) + f.at(x + 1, y + 1);
            const int gy = -f.at(x - 1, y - 1) - 2 * f.at(x, y - 1) - f.at(x + 1, y - 1)
                         + f.at(x - 1, y + 1) + 2 * f.at(x, y + 1) + f.at(x + 1, y + 1);
            out.values[static_cast<size_t>(y - 1) * out.width + (x - 1)] =
                std::sqrt(static_cast<double>(gx) * gx + static_cast<double>(gy) * gy);
        }
    }
    return out;
}

// Signed motion plane between successive frames: current minus previous.
inline Plane frame_difference(const LumaFrame& previous, const LumaFrame& current) {
    if (previous.width != current.width || previous.height != current.height)
        throw data_error("frame difference needs identical dimensions");
    Plane out;
    out.width = current.width;
    out.height = current.height;
    out.values.resize(current.samples.size());
    for (size_t i = 0; i < current.samples.size(); ++i)
        out.values[i] = static_cast<double>(current.samples[i]) - static_cast<double>(previous.samples[i]);
    return out;
}

// SI = median over frames of sigma(Sobel magnitudes), TI = median over
// successive pairs of sigma(difference plane); a single frame has TI = 0.
inline SiTi compute_siti(const LumaSequence& seq) {
    seq.validate();
    SiTi out;
    std::vector<double> si_per_frame;
    si_per_frame.reserve(seq.frames.size());
    for (const LumaFrame& f : seq.frames)
        si_per_frame.push_back(detail::population_stddev(sobel_magnitude(f).values));
    out.si = detail::median(std::move(si_per_frame));

    if (seq.frames.size() > 1) {
        std::vector<double> ti_per_pair;
        ti_per_pair.reserve(seq.frames.size() - 1);
        for (size_t n = 1; n < seq.frames.size(); ++n)
            ti_per_pair.push_back(
                detail::population_stddev(frame_difference(seq.frames[n - 1], seq.frames[n]).values));
        out.ti = detail::median(std::move(ti_per_pair));
    }
    return out;
}

// Pixel rectangle of one tile within a cubemap-unfolded frame.
struct TileRect {
    int x = 0;
    int y = 0;
    int w = 0;
    int h = 0;
};

using TileGeometry = std::map<TileId, TileRect>;

inline LumaFrame tile_crop(const LumaFrame& frame, const TileRect& r) {
    if (r.w < 1 || r.h < 1)
        throw data_error("tile rectangle must have positive size");
    if (r.x < 0 || r.y < 0 || r.x + r.w > frame.width || r.y + r.h > frame.height)
        throw data_error("tile rectangle [" + std::to_string(r.x) + "," + std::to_string(r.y) +
                         " " + std::to_string(r.w) + "x" + std::to_string(r.h) +
                         "] exceeds frame bounds " + std::to_string(frame.width) + "x" +
                         std::to_string(frame.height));
    std::vector<uint8_t> data;
    data.reserve(static_cast<size_t>(r.w) * r.h);
    for (int y = r.y; y < r.y + r.h; ++y)
        for (int x = r.x; x < r.x + r.w; ++x)
            data.push_back(frame.at(x, y));
    return LumaFrame(r.w, r.h, std::move(data));
}

inline LumaFrame tile_crop(const LumaFrame& frame, const TileGeometry& geometry, const TileId& tile) {
    auto it = geometry.find(tile);
    if (it == geometry.end())
        throw data_error("geometry sidecar has no rectangle for tile " + to_string(tile));
    return tile_crop(frame, it->second);
}

// Sidecar CSV: header `tile,x,y,w,h`.
inline TileGeometry load_tile_geometry(const std::string& path) {
    const auto lines = csv::read_lines(path);
    if (lines.empty()) throw data_error(path + ": empty geometry sidecar");
    const auto header = csv::split(lines[0]);
    if (!(header.size() == 5 && csv::trim(header[0]) == "tile" && csv::trim(header[1]) == "x" &&
          csv::trim(header[2]) == "y" && csv::trim(header[3]) == "w" && csv::trim(header[4]) == "h"))
        throw data_error(path + ":1: expected header tile,x,y,w,h");
    TileGeometry geo;
    for (size_t i = 1; i < lines.size(); ++i) {
        if (csv::trim(lines[i]).empty()) continue;
        const std::string at = path + ":" + std::to_string(i + 1) + ": ";
        const auto f = csv::split(lines[i]);
        if (f.size() != 5) throw data_error(at + "expected 5 fields");
        try {
            const TileId tile = parse_tile(std::string(csv::trim(f[0])));
            TileRect r;
            r.x = static_cast<int>(csv::parse_long(f[1], "x"));
            r.y = static_cast<int>(csv::parse_long(f[2], "y"));
            r.w = static_cast<int>(csv::parse_long(f[3], "w"));
            r.h = static_cast<int>(csv::parse_long(f[4], "h"));
            if (!geo.emplace(tile, r).second) throw data_error("duplicate tile " + to_string(tile));
        } catch (const data_error& e) {
            throw data_error(at + e.what());
        }
    }
    if (geo.empty()) throw data_error(path + ": geometry sidecar has no data rows");
    return geo;
}

// Raw planar 8-bit luma reader. The file length must be an exact multiple
// of width*height; frame_count < 0 means "all frames", otherwise the first
// frame_count frames are read and the file must hold at least that many.
inline LumaSequence load_luma_sequence(const std::string& path, int width, int height,
                                       long frame_count = -1) {
    if (width < 1 || height < 1) throw data_error("width and height must be >= 1");
    std::ifstream in(path, std::ios::binary | std::ios::ate);
    if (!in) throw data_error("cannot open file: " + path);
    const long long file_size = static_cast<long long>(in.tellg());
    const long long frame_size = static_cast<long long>(width) * height;
    if (file_size % frame_size != 0)
        throw data_error(path + ": size " + std::to_string(file_size) +
                         " is not a multiple of width*height = " + std::to_string(frame_size));
    const long long available = file_size / frame_size;
    if (available == 0) throw data_error(path + ": no frames");
    long long want = frame_count < 0 ? available : frame_count;
    if (want < 1) throw data_error("frame count must be >= 1");
    if (want > available)
        throw data_error(path + ": asked for " + std::to_string(want) + " frames, file has " +
                         std::to_string(available));
    in.seekg(0);
    LumaSequence seq;
    for (long long n = 0; n < want; ++n) {
        std::vector<uint8_t> data(static_cast<size_t>(frame_size));
        in.read(reinterpret_cast<char*>(data.data()), frame_size);
        if (!in) throw data_error(path + ": short read at frame " + std::to_string(n));
        seq.frames.emplace_back(width, height, std::move(data));
    }
    return seq;
}

} // namespace cubetile
