#pragma once

#include <string>
#include <vector>

#include "seglink/core.hpp"
#include "seglink/game.hpp"

namespace seglink {

// A maximal connected region of structure tiles that fails its shape's
// completeness rule. col/row anchor the region's top-left corner.
struct BrokenStructure {
  std::string shape_id;
  int col = 0;
  int row = 0;

  bool operator==(const BrokenStructure&) const = default;
};

namespace detail {

struct Region {
  int min_col, max_col, min_row, max_row;
  std::vector<std::pair<int, int>> cells;  // (col, row)
};

inline std::vector<Region> member_regions(const TileGrid& grid, const StructureShape& shape) {
  const int w = grid.width(), h = grid.height();
  std::vector<char> seen(static_cast<size_t>(w) * h, 0);
  auto is_member = [&](int c, int r) {
    return shape.member_tiles.find(grid.at(c, r)) != std::string::npos;
  };
  std::vector<Region> regions;
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      if (!is_member(c, r) || seen[static_cast<size_t>(r) * w + c]) continue;
      Region reg{c, c, r, r, {}};
      std::vector<std::pair<int, int>> stack{{c, r}};
      seen[static_cast<size_t>(r) * w + c] = 1;
      while (!stack.empty()) {
        auto [cc, rr] = stack.back();
        stack.pop_back();
        reg.cells.emplace_back(cc, rr);
        reg.min_col = std::min(reg.min_col, cc);
        reg.max_col = std::max(reg.max_col, cc);
        reg.min_row = std::min(reg.min_row, rr);
        reg.max_row = std::max(reg.max_row, rr);
        const int dc[4] = {1, -1, 0, 0};
        const int dr[4] = {0, 0, 1, -1};
        for (int k = 0; k < 4; ++k) {
          int nc = cc + dc[k], nr = rr + dr[k];
          if (nc < 0 || nc >= w || nr < 0 || nr >= h) continue;
          if (seen[static_cast<size_t>(nr) * w + nc] || !is_member(nc, nr)) continue;
          seen[static_cast<size_t>(nr) * w + nc] = 1;
          stack.emplace_back(nc, nr);
        }
      }
      regions.push_back(std::move(reg));
    }
  }
  return regions;
}

// Pipe: exactly two adjacent columns, contiguous rows, '<>' caps on the top
// row, '[]' body rows below, at least one body row.
inline bool pipe_complete(const TileGrid& grid, const Region& reg) {
  if (reg.max_col - reg.min_col + 1 != 2) return false;
  const int rows = reg.max_row - reg.min_row + 1;
  if (rows < 2) return false;
  if (static_cast<int>(reg.cells.size()) != rows * 2) return false;
  for (int r = reg.min_row; r <= reg.max_row; ++r) {
    char left = grid.at(reg.min_col, r);
    char right = grid.at(reg.max_col, r);
    if (r == reg.min_row) {
      if (left != '<' || right != '>') return false;
    } else {
      if (left != '[' || right != ']') return false;
    }
  }
  return true;
}

// Door: one column wide, exactly two rows tall.
inline bool door_complete(const TileGrid&, const Region& reg) {
  return reg.max_col == reg.min_col && reg.max_row - reg.min_row + 1 == 2 &&
         reg.cells.size() == 2;
}

// Full width x height block of member tiles.
inline bool block_complete(const Region& reg, int width, int height) {
  return reg.max_col - reg.min_col + 1 == width && reg.max_row - reg.min_row + 1 == height &&
         static_cast<int>(reg.cells.size()) == width * height;
}

}  // namespace detail

inline std::vector<BrokenStructure> find_broken_structures(const TileGrid& grid,
                                                           const GameConfig& config) {
  std::vector<BrokenStructure> broken;
  for (const StructureShape& shape : config.structure_shapes) {
    for (const detail::Region& reg : detail::member_regions(grid, shape)) {
      bool ok;
      if (shape.predicate == "pipe")
        ok = detail::pipe_complete(grid, reg);
      else if (shape.predicate == "door")
        ok = detail::door_complete(grid, reg);
      else if (shape.predicate == "dg-block")
        ok = detail::block_complete(reg, shape.width, shape.height);
      else
        fail(Errc::bad_config, "unknown structure predicate '" + shape.predicate + "'");
      if (!ok) broken.push_back({shape.id, reg.min_col, reg.min_row});
    }
  }
  return broken;
}

inline std::vector<BrokenStructure> find_broken_structures(const SliceSequence& seq,
                                                           const GameConfig& config) {
  if (seq.empty()) return {};
  return find_broken_structures(to_grid(seq), config);
}

inline bool is_unbroken(const SliceSequence& seq, const GameConfig& config) {
  return find_broken_structures(seq, config).empty();
}

}  // namespace seglink
