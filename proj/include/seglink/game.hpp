#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "seglink/core.hpp"
#include "seglink/error.hpp"

namespace seglink {

// Semantic tile tags. A tile may carry several (a pipe part is also solid).
enum Tag : uint32_t {
  tag_empty = 1u << 0,
  tag_solid = 1u << 1,
  tag_hazard = 1u << 2,
  tag_enemy = 1u << 3,
  tag_food = 1u << 4,
  tag_switch = 1u << 5,
  tag_portal = 1u << 6,
  tag_door = 1u << 7,
  tag_pipe_part = 1u << 8,
  tag_passable_platform = 1u << 9,
  tag_start_marker = 1u << 10,
  tag_end_marker = 1u << 11,
};

inline uint32_t tag_from_name(const std::string& name) {
  static const std::map<std::string, uint32_t> names = {
      {"empty", tag_empty},
      {"solid", tag_solid},
      {"hazard", tag_hazard},
      {"enemy", tag_enemy},
      {"food", tag_food},
      {"switch", tag_switch},
      {"portal", tag_portal},
      {"door", tag_door},
      {"pipe-part", tag_pipe_part},
      {"passable-platform", tag_passable_platform},
      {"start-marker", tag_start_marker},
      {"end-marker", tag_end_marker},
  };
  auto it = names.find(name);
  if (it == names.end()) fail(Errc::bad_config, "unknown tile tag '" + name + "'");
  return it->second;
}

// Declared footprint of an in-game multi-tile structure, together with the
// id of the built-in completeness rule that decides whether an instance of
// it is well formed (see structures.hpp).
struct StructureShape {
  std::string id;
  std::string predicate;  // "pipe" | "door" | "dg-block"
  int width = 0;
  int height = 0;
  std::string member_tiles;
};

struct AgentParams {
  enum class Kind { platformer, roguelike };
  Kind kind = Kind::platformer;

  // platformer
  int max_jump_height = 4;
  int max_jump_horizontal = 2;
  bool allow_horizontal_wrap = false;

  // roguelike
  int start_stamina = 40;
  int move_cost = 1;
  int food_gain = 20;
  int stamina_cap = 40;
};

struct LeniencyFeatures {
  bool gap_columns = false;   // columns with no solid tile (horizontal platformers)
  std::string feature_tiles;  // tile codes counted as hazard features
};

// Declarative game definition: tile semantics, slice orientation, structure
// shapes, model and search sizes, padding, linking slices, agent parameters.
struct GameConfig {
  std::string name;
  Orientation orientation = Orientation::columns_left_to_right;
  std::map<char, uint32_t> alphabet;  // tile code -> tag bits
  std::vector<StructureShape> structure_shapes;
  int ngram_order = 2;
  int segment_length = 0;
  int link_search_max_depth = 1;
  std::vector<Slice> padding_start;
  std::vector<Slice> padding_end;
  std::vector<Slice> linking_slices;  // empty = default structure-free set
  std::vector<Slice> segment_boundary_slices;  // sampler cut points; empty = any
  // Sampler anchor check: segments must be linkable to and from this tiny
  // anchor sequence, so junction traversal never depends on the padding's
  // full width.
  std::vector<Slice> segment_anchor;
  std::array<std::string, 2> bc_names = {"density", "leniency"};
  LeniencyFeatures leniency_features;
  double bc_bin_size = 0.05;
  AgentParams agent;
  std::string corpus_dir;  // relative to the config file

  bool in_alphabet(char t) const { return alphabet.count(t) != 0; }

  uint32_t tags(char t) const {
    auto it = alphabet.find(t);
    return it == alphabet.end() ? 0u : it->second;
  }

  bool has_tag(char t, uint32_t tag) const { return (tags(t) & tag) != 0; }

  bool is_structure_tile(char t) const {
    for (const StructureShape& s : structure_shapes)
      if (s.member_tiles.find(t) != std::string::npos) return true;
    return false;
  }

  bool slice_has_structure_tile(const Slice& s) const {
    for (char t : s)
      if (is_structure_tile(t)) return true;
    return false;
  }

  // Largest structure extent measured along the slice axis; bounds the
  // context of the structure-completion chains.
  int max_structure_extent() const {
    int extent = 1;
    for (const StructureShape& s : structure_shapes) {
      int e = orientation == Orientation::columns_left_to_right ? s.width : s.height;
      extent = std::max(extent, e);
    }
    return extent;
  }
};

inline TileGrid parse_level(std::string_view text, const GameConfig& config) {
  return parse_grid(text, [&](char t) { return config.in_alphabet(t); });
}

inline SliceSequence to_slices(const TileGrid& grid, const GameConfig& config) {
  if (grid.empty()) fail(Errc::ragged_input, "empty grid");
  return to_slices(grid, config.orientation);
}

// Start padding prepended, end padding appended; the level itself is
// untouched in the middle. Gives the agent a place to begin and a region
// whose entry counts as completing the level.
inline SliceSequence pad_level(const SliceSequence& seq, const GameConfig& config) {
  SliceSequence start{config.orientation, config.padding_start};
  SliceSequence end{config.orientation, config.padding_end};
  return concatenate({start, seq, end});
}

namespace detail {

inline void check_slice_in_alphabet(const GameConfig& cfg, const Slice& s, const char* where) {
  for (char t : s)
    if (!cfg.in_alphabet(t)) fail(Errc::bad_config, std::string(where) + ": tile '" + t + "' not in alphabet");
}

}  // namespace detail

inline GameConfig game_config_from_json(const nlohmann::json& j,
                                        const std::filesystem::path& base_dir = {}) {
  GameConfig cfg;
  try {
    cfg.name = j.at("name").get<std::string>();
    std::string orient = j.at("orientation").get<std::string>();
    if (orient == "columns")
      cfg.orientation = Orientation::columns_left_to_right;
    else if (orient == "rows-bottom-to-top")
      cfg.orientation = Orientation::rows_bottom_to_top;
    else
      fail(Errc::bad_config, "orientation must be 'columns' or 'rows-bottom-to-top'");

    for (auto& [tile, tags] : j.at("alphabet").items()) {
      if (tile.size() != 1) fail(Errc::bad_config, "tile codes are single characters");
      uint32_t bits = 0;
      for (const auto& t : tags) bits |= tag_from_name(t.get<std::string>());
      cfg.alphabet[tile[0]] = bits;
    }

    for (const auto& js : j.value("structures", nlohmann::json::array())) {
      StructureShape s;
      s.id = js.at("id").get<std::string>();
      s.predicate = js.at("predicate").get<std::string>();
      s.width = js.at("width").get<int>();
      s.height = js.at("height").get<int>();
      for (const auto& t : js.at("tiles")) {
        std::string code = t.get<std::string>();
        if (code.size() != 1) fail(Errc::bad_config, "structure tiles are single characters");
        if (!cfg.alphabet.count(code[0])) fail(Errc::bad_config, "structure tile not in alphabet");
        s.member_tiles.push_back(code[0]);
      }
      cfg.structure_shapes.push_back(std::move(s));
    }

    cfg.ngram_order = j.at("ngram_order").get<int>();
    cfg.segment_length = j.at("segment_length").get<int>();
    cfg.link_search_max_depth = j.at("link_search_max_depth").get<int>();
    if (cfg.ngram_order < 2) fail(Errc::bad_config, "ngram_order must be >= 2");
    if (cfg.link_search_max_depth < 1) fail(Errc::bad_config, "link_search_max_depth must be >= 1");
    if (cfg.segment_length < cfg.ngram_order) fail(Errc::bad_config, "segment_length must be >= ngram_order");

    const auto& pad = j.at("padding");
    for (const auto& s : pad.at("start")) cfg.padding_start.push_back(s.get<std::string>());
    for (const auto& s : pad.at("end")) cfg.padding_end.push_back(s.get<std::string>());
    for (const Slice& s : cfg.padding_start) detail::check_slice_in_alphabet(cfg, s, "padding");
    for (const Slice& s : cfg.padding_end) detail::check_slice_in_alphabet(cfg, s, "padding");

    if (j.contains("linking_slices") && !j.at("linking_slices").is_null()) {
      for (const auto& s : j.at("linking_slices")) cfg.linking_slices.push_back(s.get<std::string>());
      for (const Slice& s : cfg.linking_slices) detail::check_slice_in_alphabet(cfg, s, "linking_slices");
    }
    if (j.contains("segment_boundary_slices") && !j.at("segment_boundary_slices").is_null()) {
      for (const auto& s : j.at("segment_boundary_slices"))
        cfg.segment_boundary_slices.push_back(s.get<std::string>());
    }
    if (j.contains("segment_anchor") && !j.at("segment_anchor").is_null()) {
      for (const auto& s : j.at("segment_anchor"))
        cfg.segment_anchor.push_back(s.get<std::string>());
    }

    const auto& bc = j.at("bc");
    if (bc.size() != 2) fail(Errc::bad_config, "bc must name two characteristics");
    cfg.bc_names = {bc.at(0).get<std::string>(), bc.at(1).get<std::string>()};

    const auto& len = j.at("leniency");
    cfg.leniency_features.gap_columns = len.value("gap_columns", false);
    for (const auto& t : len.value("tiles", nlohmann::json::array()))
      cfg.leniency_features.feature_tiles.push_back(t.get<std::string>().at(0));

    cfg.bc_bin_size = j.value("bc_bin_size", 0.05);

    const auto& ja = j.at("agent");
    std::string kind = ja.at("kind").get<std::string>();
    if (kind == "platformer") {
      cfg.agent.kind = AgentParams::Kind::platformer;
      cfg.agent.max_jump_height = ja.value("max_jump_height", 4);
      cfg.agent.max_jump_horizontal = ja.value("max_jump_horizontal", 2);
      cfg.agent.allow_horizontal_wrap = ja.value("allow_horizontal_wrap", false);
    } else if (kind == "roguelike") {
      cfg.agent.kind = AgentParams::Kind::roguelike;
      cfg.agent.start_stamina = ja.value("start_stamina", 40);
      cfg.agent.move_cost = ja.value("move_cost", 1);
      cfg.agent.food_gain = ja.value("food_gain", 20);
      cfg.agent.stamina_cap = ja.value("stamina_cap", 40);
      if (cfg.agent.food_gain > cfg.agent.stamina_cap)
        fail(Errc::bad_config, "food_gain must be <= stamina_cap");
    } else {
      fail(Errc::bad_config, "agent.kind must be 'platformer' or 'roguelike'");
    }

    if (j.contains("corpus_dir")) {
      std::filesystem::path p = j.at("corpus_dir").get<std::string>();
      cfg.corpus_dir = base_dir.empty() ? p.string() : (base_dir / p).lexically_normal().string();
    }
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::bad_config, e.what());
  }
  return cfg;
}

inline GameConfig load_game_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::bad_config, "cannot open config " + path.string());
  nlohmann::json j;
  in >> j;
  return game_config_from_json(j, path.parent_path());
}

inline TileGrid load_level_file(const std::filesystem::path& path, const GameConfig& config) {
  std::ifstream in(path);
  if (!in) fail(Errc::corpus_missing, "cannot open level " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_level(ss.str(), config);
}

// Every *.txt in the corpus directory, in filename order.
inline std::vector<SliceSequence> load_corpus(const GameConfig& config) {
  if (config.corpus_dir.empty()) fail(Errc::corpus_missing, "config has no corpus_dir");
  std::vector<std::filesystem::path> files;
  std::error_code ec;
  for (const auto& entry : std::filesystem::directory_iterator(config.corpus_dir, ec)) {
    if (entry.path().extension() == ".txt") files.push_back(entry.path());
  }
  if (ec || files.empty()) fail(Errc::corpus_missing, "no level files in " + config.corpus_dir);
  std::sort(files.begin(), files.end());
  std::vector<SliceSequence> corpus;
  corpus.reserve(files.size());
  for (const auto& f : files) corpus.push_back(to_slices(load_level_file(f, config), config));
  return corpus;
}

}  // namespace seglink
