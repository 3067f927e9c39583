#pragma once

#include <algorithm>
#include <cmath>
#include <compare>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "cubetile/error.hpp"

namespace cubetile {

enum class Face { front, right, back, left, top, bottom };

inline const char* face_name(Face f) {
    switch (f) {
        case Face::front:  return "front";
        case Face::right:  return "right";
        case Face::back:   return "back";
        case Face::left:   return "left";
        case Face::top:    return "top";
        case Face::bottom: return "bottom";
    }
    return "?";
}

// One tile of a tiled cubemap: a whole cap face (top/bottom, slice 0) or a
// vertical slice of a side face. Slice 0 is the westernmost slice of its
// face as seen from the cube center.
struct TileId {
    Face face = Face::front;
    int slice = 0;

    auto operator<=>(const TileId&) const = default;

    bool is_cap() const { return face == Face::top || face == Face::bottom; }
};

inline std::string to_string(const TileId& t) {
    if (t.is_cap()) return face_name(t.face);
    return std::string(face_name(t.face)) + "_" + std::to_string(t.slice);
}

inline TileId parse_tile(const std::string& name) {
    auto face_of = [](const std::string& s) -> Face {
        if (s == "front") return Face::front;
        if (s == "right") return Face::right;
        if (s == "back") return Face::back;
        if (s == "left") return Face::left;
        if (s == "top") return Face::top;
        if (s == "bottom") return Face::bottom;
        throw data_error("unknown tile face: '" + s + "'");
    };
    auto us = name.rfind('_');
    if (us == std::string::npos) {
        Face f = face_of(name);
        if (f != Face::top && f != Face::bottom)
            throw data_error("side-face tile needs a slice index: '" + name + "'");
        return {f, 0};
    }
    Face f = face_of(name.substr(0, us));
    if (f == Face::top || f == Face::bottom)
        throw data_error("cap tiles carry no slice index: '" + name + "'");
    const std::string idx = name.substr(us + 1);
    if (idx.empty() || idx.find_first_not_of("0123456789") != std::string::npos)
        throw data_error("bad tile slice index in '" + name + "'");
    return {f, std::stoi(idx)};
}

// A named tiling of the cube: the four side faces cut into S vertical slices
// each plus the two cap faces. The ring lists the 4*S side tiles in
// contiguous yaw order starting at front_0.
struct TileLayout {
    std::string name;
    int slices_per_side_face = 0;
    std::vector<TileId> tiles; // ring order, then top, bottom
    std::vector<TileId> ring;

    int ring_size() const { return 4 * slices_per_side_face; }

    double area(const TileId& t) const {
        if (t.is_cap()) return 1.0 / 6.0;
        return 1.0 / (6.0 * slices_per_side_face);
    }

    // Yaw where tile's span starts; side tiles span 360/(4S) degrees from it.
    // The front face is centered on yaw 0, i.e. spans (-45, +45).
    double tile_start_deg(const TileId& t) const {
        const double span = 360.0 / ring_size();
        const int face_idx = static_cast<int>(t.face); // front=0,right=1,back=2,left=3
        return -45.0 + (face_idx * slices_per_side_face + t.slice) * span;
    }

    int ring_index(const TileId& t) const {
        return static_cast<int>(t.face) * slices_per_side_face + t.slice;
    }

    bool contains(const TileId& t) const {
        if (t.is_cap()) return t.slice == 0;
        return t.slice >= 0 && t.slice < slices_per_side_face;
    }
};

// Viewing direction plus horizontal field of view. Yaw is normalized to
// [0, 360) on construction; pitch never affects tile priorities (each tile
// already covers the ~90 degree vertical FOV).
struct Viewport {
    double yaw_deg = 0.0;
    double pitch_deg = 0.0;
    double hfov_deg = 90.0;

    Viewport() = default;
    Viewport(double yaw, double pitch, double hfov = 90.0)
        : yaw_deg(yaw), pitch_deg(pitch), hfov_deg(hfov) {
        yaw_deg = std::fmod(yaw_deg, 360.0);
        if (yaw_deg < 0.0) yaw_deg += 360.0;
        if (!(pitch_deg >= -90.0 && pitch_deg <= 90.0))
            throw data_error("pitch must be in [-90, 90], got " + std::to_string(pitch));
        if (!(hfov_deg > 0.0))
            throw data_error("hfov must be positive, got " + std::to_string(hfov));
    }
};

struct PriorityMap {
    std::map<TileId, int> priorities;

    int at(const TileId& t) const {
        auto it = priorities.find(t);
        if (it == priorities.end())
            throw data_error("no priority for tile " + to_string(t));
        return it->second;
    }

    int max_priority() const {
        int m = 0;
        for (const auto& [tile, p] : priorities) m = std::max(m, p);
        return m;
    }
};

inline TileLayout build_layout(const std::string& name) {
    int slices = 0;
    if (name == "tiled_cubemap_1") slices = 2;
    else if (name == "tiled_cubemap_2") slices = 4;
    else throw data_error("unknown layout '" + name + "' (expected tiled_cubemap_1 or tiled_cubemap_2)");

    TileLayout layout;
    layout.name = name;
    layout.slices_per_side_face = slices;
    for (Face f : {Face::front, Face::right, Face::back, Face::left})
        for (int s = 0; s < slices; ++s)
            layout.ring.push_back({f, s});
    layout.tiles = layout.ring;
    layout.tiles.push_back({Face::top, 0});
    layout.tiles.push_back({Face::bottom, 0});
    return layout;
}

// Side tiles whose span [start, start+span) meets the open yaw interval
// (yaw - hfov/2, yaw + hfov/2). Caps are never FOV tiles.
inline std::set<TileId> fov_tiles(const TileLayout& layout, const Viewport& vp) {
    std::set<TileId> out;
    const double span = 360.0 / layout.ring_size();
    const double h = std::min(vp.hfov_deg, 360.0);
    const double a = vp.yaw_deg - h / 2.0;
    for (const TileId& t : layout.ring) {
        double d = std::fmod(layout.tile_start_deg(t) - a, 360.0);
        if (d < 0.0) d += 360.0;
        if (d < h || d + span > 360.0) out.insert(t);
    }
    return out;
}

// FOV tiles get priority 0; every other ring tile its ring-step distance to
// the nearest FOV tile; caps get the priority of the ring tiles adjacent to
// the FOV span (1, or 0 when the FOV covers the whole ring).
inline PriorityMap assign_priorities(const TileLayout& layout, const Viewport& vp) {
    const std::set<TileId> fov = fov_tiles(layout, vp);
    const int n = layout.ring_size();

    std::vector<int> fov_idx;
    for (const TileId& t : fov) fov_idx.push_back(layout.ring_index(t));

    PriorityMap pm;
    for (const TileId& t : layout.ring) {
        const int i = layout.ring_index(t);
        int best = n;
        for (int j : fov_idx) {
            const int fwd = (i - j + n) % n;
            best = std::min({best, fwd, n - fwd});
        }
        pm.priorities[t] = best;
    }
    const int cap_priority = (static_cast<int>(fov.size()) == n) ? 0 : 1;
    pm.priorities[{Face::top, 0}] = cap_priority;
    pm.priorities[{Face::bottom, 0}] = cap_priority;
    return pm;
}

} // namespace cubetile
