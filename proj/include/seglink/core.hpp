#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "seglink/error.hpp"

namespace seglink {

// One column (horizontal games) or row (vertical games) of a tile grid.
// The atomic token of every n-gram in this library.
using Slice = std::string;

enum class Orientation {
  columns_left_to_right,
  rows_bottom_to_top,
};

inline const char* to_string(Orientation o) {
  return o == Orientation::columns_left_to_right ? "columns" : "rows-bottom-to-top";
}

// Rectangular grid of single-character tile codes, row 0 on top.
class TileGrid {
 public:
  TileGrid() = default;
  TileGrid(int width, int height, char fill = '-')
      : width_(width), height_(height), cells_(static_cast<size_t>(width) * height, fill) {}

  int width() const { return width_; }
  int height() const { return height_; }
  bool empty() const { return width_ == 0 || height_ == 0; }

  char at(int col, int row) const { return cells_[static_cast<size_t>(row) * width_ + col]; }
  char& at(int col, int row) { return cells_[static_cast<size_t>(row) * width_ + col]; }

  bool in_bounds(int col, int row) const {
    return col >= 0 && col < width_ && row >= 0 && row < height_;
  }

  const std::string& cells() const { return cells_; }

  bool operator==(const TileGrid& o) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::string cells_;  // row-major
};

// Ordered list of slices in play direction. Slice i+1 is always one step
// further along the play axis than slice i, for every game.
struct SliceSequence {
  Orientation orientation = Orientation::columns_left_to_right;
  std::vector<Slice> slices;

  size_t size() const { return slices.size(); }
  bool empty() const { return slices.empty(); }
  int slice_length() const { return slices.empty() ? 0 : static_cast<int>(slices.front().size()); }

  bool operator==(const SliceSequence& o) const = default;
};

// Multi-line text -> grid. Rows are newline separated, row 0 is the top line.
// `alphabet_ok` decides tile validity (bound to a GameConfig by the caller).
template <typename AlphabetPred>
TileGrid parse_grid(std::string_view text, AlphabetPred alphabet_ok) {
  std::vector<std::string_view> lines;
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) {
      if (pos < text.size()) lines.push_back(text.substr(pos));
      break;
    }
    lines.push_back(text.substr(pos, nl - pos));
    pos = nl + 1;
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty()) fail(Errc::ragged_input, "no rows in level text");

  const size_t width = lines.front().size();
  TileGrid grid(static_cast<int>(width), static_cast<int>(lines.size()));
  for (size_t r = 0; r < lines.size(); ++r) {
    if (lines[r].size() != width) {
      fail(Errc::ragged_input, "line " + std::to_string(r) + " has length " +
                                   std::to_string(lines[r].size()) + ", expected " +
                                   std::to_string(width));
    }
    for (size_t c = 0; c < width; ++c) {
      char t = lines[r][c];
      if (!alphabet_ok(t)) fail(Errc::unknown_tile, std::string("'") + t + "' not in alphabet");
      grid.at(static_cast<int>(c), static_cast<int>(r)) = t;
    }
  }
  return grid;
}

inline std::string serialize_grid(const TileGrid& grid) {
  std::string out;
  out.reserve(static_cast<size_t>(grid.height()) * (grid.width() + 1));
  for (int r = 0; r < grid.height(); ++r) {
    for (int c = 0; c < grid.width(); ++c) out.push_back(grid.at(c, r));
    out.push_back('\n');
  }
  return out;
}

// Columns orientation: slice i is column i, read top to bottom.
// Rows orientation: slice i is row (height-1-i), read left to right, so that
// slice order always follows the direction of play.
inline SliceSequence to_slices(const TileGrid& grid, Orientation orientation) {
  SliceSequence seq;
  seq.orientation = orientation;
  if (orientation == Orientation::columns_left_to_right) {
    seq.slices.reserve(grid.width());
    for (int c = 0; c < grid.width(); ++c) {
      Slice s(static_cast<size_t>(grid.height()), '-');
      for (int r = 0; r < grid.height(); ++r) s[static_cast<size_t>(r)] = grid.at(c, r);
      seq.slices.push_back(std::move(s));
    }
  } else {
    seq.slices.reserve(grid.height());
    for (int r = grid.height() - 1; r >= 0; --r) {
      Slice s(static_cast<size_t>(grid.width()), '-');
      for (int c = 0; c < grid.width(); ++c) s[static_cast<size_t>(c)] = grid.at(c, r);
      seq.slices.push_back(std::move(s));
    }
  }
  return seq;
}

inline TileGrid to_grid(const SliceSequence& seq) {
  if (seq.empty()) return TileGrid();
  const int len = seq.slice_length();
  for (const Slice& s : seq.slices) {
    if (static_cast<int>(s.size()) != len) fail(Errc::mixed_slice_length, "uneven slices");
  }
  if (seq.orientation == Orientation::columns_left_to_right) {
    TileGrid grid(static_cast<int>(seq.size()), len);
    for (size_t c = 0; c < seq.size(); ++c)
      for (int r = 0; r < len; ++r) grid.at(static_cast<int>(c), r) = seq.slices[c][static_cast<size_t>(r)];
    return grid;
  }
  TileGrid grid(len, static_cast<int>(seq.size()));
  const int height = static_cast<int>(seq.size());
  for (size_t i = 0; i < seq.size(); ++i) {
    const int r = height - 1 - static_cast<int>(i);
    for (int c = 0; c < len; ++c) grid.at(c, r) = seq.slices[i][static_cast<size_t>(c)];
  }
  return grid;
}

// In-order concatenation. Empty parts are identity elements.
inline SliceSequence concatenate(const std::vector<SliceSequence>& parts) {
  SliceSequence out;
  bool seeded = false;
  for (const SliceSequence& part : parts) {
    if (part.empty()) continue;
    if (!seeded) {
      out.orientation = part.orientation;
      seeded = true;
    } else {
      if (part.orientation != out.orientation) fail(Errc::mixed_orientation, "concatenate");
      if (part.slice_length() != out.slice_length()) fail(Errc::mixed_slice_length, "concatenate");
    }
    out.slices.insert(out.slices.end(), part.slices.begin(), part.slices.end());
  }
  return out;
}

inline SliceSequence concatenate(const SliceSequence& a, const SliceSequence& b) {
  return concatenate(std::vector<SliceSequence>{a, b});
}

inline SliceSequence subsequence(const SliceSequence& seq, size_t first, size_t count) {
  SliceSequence out;
  out.orientation = seq.orientation;
  first = std::min(first, seq.size());
  count = std::min(count, seq.size() - first);
  out.slices.assign(seq.slices.begin() + static_cast<long>(first),
                    seq.slices.begin() + static_cast<long>(first + count));
  return out;
}

}  // namespace seglink
