#pragma once

#include <array>
#include <cmath>
#include <string>

#include "seglink/core.hpp"
#include "seglink/game.hpp"

namespace seglink {

// Per-game descriptor pair, each component normalized to [0,1]:
// (linearity, leniency) for horizontal platformers, (density, leniency)
// for the vertical platformer and the roguelike.
struct BCVector {
  std::array<double, 2> values{0.0, 0.0};

  double operator[](size_t i) const { return values[i]; }
};

inline double clamp01(double v) { return v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v); }

// Fit of the column height profile to a least-squares line. Height is the
// distance from the grid bottom to the topmost solid tile; columns with no
// solid tile contribute height 0.
inline double linearity(const SliceSequence& seq, const GameConfig& config) {
  if (seq.orientation != Orientation::columns_left_to_right)
    fail(Errc::mixed_orientation, "linearity needs a columns-oriented sequence");
  if (seq.empty()) return 1.0;
  const int height = seq.slice_length();
  const size_t n = seq.size();
  std::vector<double> ys(n, 0.0);
  for (size_t c = 0; c < n; ++c) {
    for (int r = 0; r < height; ++r) {
      if (config.has_tag(seq.slices[c][static_cast<size_t>(r)], tag_solid)) {
        ys[c] = static_cast<double>(height - r);
        break;
      }
    }
  }
  double mean_x = (static_cast<double>(n) - 1.0) / 2.0;
  double mean_y = 0.0;
  for (double y : ys) mean_y += y;
  mean_y /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0;
  for (size_t i = 0; i < n; ++i) {
    double dx = static_cast<double>(i) - mean_x;
    sxy += dx * (ys[i] - mean_y);
    sxx += dx * dx;
  }
  double slope = sxx == 0.0 ? 0.0 : sxy / sxx;
  double mean_abs_residual = 0.0;
  for (size_t i = 0; i < n; ++i) {
    double fit = mean_y + slope * (static_cast<double>(i) - mean_x);
    mean_abs_residual += std::fabs(ys[i] - fit);
  }
  mean_abs_residual /= static_cast<double>(n);
  return clamp01(1.0 - mean_abs_residual / static_cast<double>(height));
}

// Fraction of solid tiles.
inline double density(const SliceSequence& seq, const GameConfig& config) {
  if (seq.empty()) return 0.0;
  size_t solid = 0, total = 0;
  for (const Slice& s : seq.slices) {
    for (char t : s) {
      ++total;
      if (config.has_tag(t, tag_solid)) ++solid;
    }
  }
  return total == 0 ? 0.0 : static_cast<double>(solid) / static_cast<double>(total);
}

// 1 - hazard feature count / slice count. Features carry unit weight: the
// configured feature tiles plus, for horizontal platformers, columns with
// nothing solid to stand on.
inline double leniency(const SliceSequence& seq, const GameConfig& config) {
  if (seq.empty()) return 1.0;
  size_t count = 0;
  for (const Slice& s : seq.slices) {
    for (char t : s)
      if (config.leniency_features.feature_tiles.find(t) != std::string::npos) ++count;
    if (config.leniency_features.gap_columns) {
      bool any_solid = false;
      for (char t : s) any_solid = any_solid || config.has_tag(t, tag_solid);
      if (!any_solid) ++count;
    }
  }
  return clamp01(1.0 - static_cast<double>(count) / static_cast<double>(seq.size()));
}

inline BCVector behavioral_characteristics(const SliceSequence& seq, const GameConfig& config) {
  BCVector bc;
  for (size_t i = 0; i < 2; ++i) {
    const std::string& name = config.bc_names[i];
    if (name == "linearity")
      bc.values[i] = linearity(seq, config);
    else if (name == "density")
      bc.values[i] = density(seq, config);
    else if (name == "leniency")
      bc.values[i] = leniency(seq, config);
    else
      fail(Errc::bad_config, "unknown behavioral characteristic '" + name + "'");
  }
  return bc;
}

// RMSE between a linker's characteristics and the mean of the two segments
// it links.
inline double linker_rmse(const BCVector& linker, const BCVector& start, const BCVector& end) {
  double sum = 0.0;
  for (size_t i = 0; i < 2; ++i) {
    double mean = (start[i] + end[i]) / 2.0;
    double diff = linker[i] - mean;
    sum += diff * diff;
  }
  return std::sqrt(sum / 2.0);
}

inline double bc_distance(const BCVector& a, const BCVector& b) {
  double sum = 0.0;
  for (size_t i = 0; i < 2; ++i) {
    double diff = a[i] - b[i];
    sum += diff * diff;
  }
  return std::sqrt(sum);
}

// Euclidean distance between the characteristics of the plain concatenation
// and the linked version of the same two segments.
inline double d_bc(const SliceSequence& concatenated, const SliceSequence& linked,
                   const GameConfig& config) {
  return bc_distance(behavioral_characteristics(concatenated, config),
                     behavioral_characteristics(linked, config));
}

}  // namespace seglink
