#pragma once

#include <string>
#include <vector>

#include "seglink/agents.hpp"
#include "seglink/core.hpp"
#include "seglink/game.hpp"

namespace seglink {

// Slice-axis extents to highlight in a render (padding regions, linkers).
struct RenderAnnotations {
  int pad_start = 0;  // slices of start padding
  int pad_end = 0;
  std::vector<std::pair<int, int>> linker_extents;  // [first, last] slice, inclusive
  const std::vector<PlayerState>* path = nullptr;
};

inline std::string render_text(const SliceSequence& level) {
  return serialize_grid(to_grid(level));
}

namespace detail {

inline const char* tile_color(uint32_t tags) {
  if (tags & tag_pipe_part) return "#2e8b57";
  if (tags & tag_door) return "#8b5a2b";
  if (tags & tag_portal) return "#9932cc";
  if (tags & tag_switch) return "#1e6fd9";
  if (tags & tag_food) return "#2eb82e";
  if (tags & tag_enemy) return "#b22222";
  if (tags & tag_hazard) return "#ff6347";
  if (tags & tag_passable_platform) return "#c8a165";
  if (tags & tag_solid) return "#6b6b6b";
  if (tags & (tag_start_marker | tag_end_marker)) return "#ffd700";
  return "";
}

// Slice index -> covered cell rectangle in grid coordinates.
inline void slice_extent_to_cells(const SliceSequence& level, int first, int last, int& x,
                                  int& y, int& w, int& h) {
  const int count = static_cast<int>(level.size());
  const int len = level.slice_length();
  if (level.orientation == Orientation::columns_left_to_right) {
    x = first;
    y = 0;
    w = last - first + 1;
    h = len;
  } else {
    x = 0;
    y = count - 1 - last;
    w = len;
    h = last - first + 1;
  }
}

}  // namespace detail

// Schematic SVG: one rect per non-empty tile, tan boxes over padding,
// magenta boxes over linkers, a red polyline for the agent path. Output is
// plain integers so renders are byte-stable.
inline std::string render_svg(const SliceSequence& level, const GameConfig& config,
                              const RenderAnnotations& ann = {}) {
  const TileGrid grid = to_grid(level);
  const int cell = 8;
  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
         std::to_string(grid.width() * cell) + "\" height=\"" +
         std::to_string(grid.height() * cell) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
  for (int r = 0; r < grid.height(); ++r) {
    for (int c = 0; c < grid.width(); ++c) {
      const char* color = detail::tile_color(config.tags(grid.at(c, r)));
      if (!*color) continue;
      svg += "<rect x=\"" + std::to_string(c * cell) + "\" y=\"" + std::to_string(r * cell) +
             "\" width=\"" + std::to_string(cell) + "\" height=\"" + std::to_string(cell) +
             "\" fill=\"" + color + "\"/>\n";
    }
  }

  auto box = [&](int first, int last, const char* stroke, const char* fill) {
    int x, y, w, h;
    detail::slice_extent_to_cells(level, first, last, x, y, w, h);
    svg += "<rect x=\"" + std::to_string(x * cell) + "\" y=\"" + std::to_string(y * cell) +
           "\" width=\"" + std::to_string(w * cell) + "\" height=\"" + std::to_string(h * cell) +
           "\" fill=\"" + fill + "\" stroke=\"" + stroke + "\" stroke-width=\"2\"/>\n";
  };
  const int count = static_cast<int>(level.size());
  if (ann.pad_start > 0) box(0, ann.pad_start - 1, "#d2b48c", "#d2b48c55");
  if (ann.pad_end > 0) box(count - ann.pad_end, count - 1, "#d2b48c", "#d2b48c55");
  for (const auto& [first, last] : ann.linker_extents) box(first, last, "#ff00ff", "none");

  if (ann.path && !ann.path->empty()) {
    svg += "<polyline fill=\"none\" stroke=\"#ff0000\" stroke-width=\"2\" points=\"";
    for (size_t i = 0; i < ann.path->size(); ++i) {
      const PlayerState& s = (*ann.path)[i];
      if (i) svg += ' ';
      svg += std::to_string(s.col * cell + cell / 2) + "," + std::to_string(s.row * cell + cell / 2);
    }
    svg += "\"/>\n";
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace seglink
