#pragma once

#include <bit>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <queue>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "seglink/core.hpp"
#include "seglink/game.hpp"

namespace seglink {

// One node of an agent search. Platformers use col/row/phase/rise/lat,
// the roguelike uses col/row/stamina/switches/food.
struct PlayerState {
  enum class Phase : uint8_t { grounded = 0, rising = 1, falling = 2 };

  int col = 0;
  int row = 0;
  Phase phase = Phase::grounded;
  uint8_t rise = 0;  // rows ascended in the current jump
  uint8_t lat = 0;   // lateral moves used in the current jump
  int stamina = 0;
  uint64_t switches = 0;  // collected switch bits
  uint64_t food = 0;      // consumed food bits
};

struct AgentResult {
  bool completable = false;
  double furthest_progress = 0.0;  // fraction of the play axis reached
  std::vector<PlayerState> path;   // witness path when completable
  long nodes_expanded = 0;
  bool budget_exhausted = false;
};

// Searches give up (not completable) after this many expansions.
inline constexpr long agent_node_budget = 2'000'000;

namespace detail {

// Padded level with per-cell tag bits, shared by both platformer agents.
struct Board {
  TileGrid grid;
  std::vector<uint32_t> tags;
  int width = 0, height = 0;

  Board(const SliceSequence& level, const GameConfig& config) : grid(to_grid(level)) {
    width = grid.width();
    height = grid.height();
    tags.resize(static_cast<size_t>(width) * height);
    for (int r = 0; r < height; ++r)
      for (int c = 0; c < width; ++c)
        tags[static_cast<size_t>(r) * width + c] = config.tags(grid.at(c, r));
  }

  uint32_t tag_at(int c, int r) const { return tags[static_cast<size_t>(r) * width + c]; }
  bool solid(int c, int r) const { return (tag_at(c, r) & tag_solid) != 0; }
  bool lethal(int c, int r) const { return (tag_at(c, r) & (tag_hazard | tag_enemy)) != 0; }
  bool standable(int c, int r) const {
    return (tag_at(c, r) & (tag_solid | tag_passable_platform)) != 0;
  }
};

// Platformer movement rules. Gravity points to increasing row.
//   grounded: walk one column sideways onto supported ground, or jump.
//   rising:   ascend one row per step, straight or diagonal, with at most
//             max_jump_horizontal lateral moves and max_jump_height rows per
//             jump; may release into falling at any point.
//   falling:  land when supported, otherwise descend one row per step with
//             optional one-column drift. Leaving the grid bottom is death.
// Hazard and enemy tiles are lethal. Passable-platform tiles can be jumped
// through from below and landed on from above.
struct PlatformerRules {
  const Board& board;
  const AgentParams& params;

  int wrap_col(int c) const {
    if (!params.allow_horizontal_wrap) return c;
    int w = board.width;
    return ((c % w) + w) % w;
  }

  bool col_valid(int c) const { return params.allow_horizontal_wrap || (c >= 0 && c < board.width); }

  bool cell_open(int c, int r) const {
    if (r < 0 || r >= board.height) return false;
    if (!col_valid(c)) return false;
    int cc = wrap_col(c);
    return !board.solid(cc, r) && !board.lethal(cc, r);
  }

  bool supported(int c, int r) const {
    if (r + 1 >= board.height) return false;
    return board.standable(wrap_col(c), r + 1);
  }

  // Successors in a fixed order; order is part of the deterministic contract.
  void expand(const PlayerState& s, std::vector<PlayerState>& out) const {
    out.clear();
    const int c = s.col, r = s.row;
    switch (s.phase) {
      case PlayerState::Phase::grounded: {
        for (int dc : {-1, +1}) {
          int nc = c + dc;
          if (col_valid(nc) && cell_open(nc, r) && supported(nc, r))
            out.push_back({wrap_col(nc), r, PlayerState::Phase::grounded, 0, 0});
        }
        if (cell_open(c, r - 1))
          out.push_back({c, r - 1, PlayerState::Phase::rising, 1, 0});
        break;
      }
      case PlayerState::Phase::rising: {
        if (s.rise < params.max_jump_height) {
          if (cell_open(c, r - 1))
            out.push_back({c, r - 1, PlayerState::Phase::rising, static_cast<uint8_t>(s.rise + 1),
                           s.lat});
          if (s.lat < params.max_jump_horizontal) {
            for (int dc : {-1, +1}) {
              int nc = c + dc;
              if (col_valid(nc) && cell_open(nc, r - 1))
                out.push_back({wrap_col(nc), r - 1, PlayerState::Phase::rising,
                               static_cast<uint8_t>(s.rise + 1), static_cast<uint8_t>(s.lat + 1)});
            }
          }
        }
        out.push_back({c, r, PlayerState::Phase::falling, 0, 0});
        break;
      }
      case PlayerState::Phase::falling: {
        if (supported(c, r)) {
          out.push_back({c, r, PlayerState::Phase::grounded, 0, 0});
          break;
        }
        if (r + 1 >= board.height) break;  // fell out of the level
        if (cell_open(c, r + 1)) out.push_back({c, r + 1, PlayerState::Phase::falling, 0, 0});
        for (int dc : {-1, +1}) {
          int nc = c + dc;
          if (col_valid(nc) && cell_open(nc, r + 1))
            out.push_back({wrap_col(nc), r + 1, PlayerState::Phase::falling, 0, 0});
        }
        break;
      }
    }
  }
};

inline uint64_t encode_platformer(const PlayerState& s) {
  return (static_cast<uint64_t>(static_cast<uint32_t>(s.col)) << 40) |
         (static_cast<uint64_t>(static_cast<uint32_t>(s.row)) << 24) |
         (static_cast<uint64_t>(static_cast<uint8_t>(s.phase)) << 16) |
         (static_cast<uint64_t>(s.rise) << 8) | static_cast<uint64_t>(s.lat);
}

template <typename Progress, typename Goal>
AgentResult platformer_search(const Board& board, const AgentParams& params,
                              const std::vector<PlayerState>& starts, Progress progress,
                              Goal is_goal, int axis_extent) {
  PlatformerRules rules{board, params};
  AgentResult result;

  // Max-heap on (progress, then lowest state tuple). Every state is pushed
  // at most once, so the order is total and runs are reproducible.
  struct Entry {
    int prog;
    uint64_t key;
  };
  auto cmp = [](const Entry& a, const Entry& b) {
    if (a.prog != b.prog) return a.prog < b.prog;
    return a.key > b.key;
  };
  std::priority_queue<Entry, std::vector<Entry>, decltype(cmp)> queue(cmp);
  std::unordered_map<uint64_t, uint64_t> parent;  // state -> predecessor
  std::unordered_map<uint64_t, PlayerState> states;

  int best_progress = -1;
  auto push = [&](const PlayerState& s, std::optional<uint64_t> from) {
    uint64_t key = encode_platformer(s);
    if (states.count(key)) return;
    states.emplace(key, s);
    if (from) parent.emplace(key, *from);
    queue.push({progress(s), key});
    best_progress = std::max(best_progress, progress(s));
  };

  for (const PlayerState& s : starts) push(s, std::nullopt);

  std::vector<PlayerState> scratch;
  std::optional<uint64_t> goal_key;
  while (!queue.empty()) {
    Entry top = queue.top();
    queue.pop();
    const PlayerState cur = states.at(top.key);
    if (is_goal(cur)) {
      goal_key = top.key;
      break;
    }
    if (++result.nodes_expanded >= agent_node_budget) {
      result.budget_exhausted = true;
      break;
    }
    rules.expand(cur, scratch);
    for (const PlayerState& next : scratch) push(next, top.key);
  }

  if (goal_key) {
    result.completable = true;
    result.furthest_progress = 1.0;
    uint64_t k = *goal_key;
    while (true) {
      result.path.push_back(states.at(k));
      auto it = parent.find(k);
      if (it == parent.end()) break;
      k = it->second;
    }
    std::reverse(result.path.begin(), result.path.end());
  } else if (best_progress >= 0) {
    result.furthest_progress = axis_extent <= 0 ? 0.0
                                                : static_cast<double>(best_progress + 1) /
                                                      static_cast<double>(axis_extent);
    if (result.furthest_progress > 1.0) result.furthest_progress = 1.0;
  }
  return result;
}

}  // namespace detail

// Horizontal platformer completability: start grounded in the first padding
// column, done when any state enters the end padding region.
inline AgentResult platformer_check(const SliceSequence& level, const GameConfig& config) {
  detail::Board board(level, config);
  const int pad_end = static_cast<int>(config.padding_end.size());
  detail::PlatformerRules rules{board, config.agent};

  std::vector<PlayerState> starts;
  for (int r = board.height - 1; r >= 0; --r) {
    if (rules.cell_open(0, r) && rules.supported(0, r)) {
      starts.push_back({0, r, PlayerState::Phase::grounded, 0, 0});
      break;  // bottom-most grounded cell of column 0
    }
  }
  const int goal_col = board.width - pad_end;
  return detail::platformer_search(
      board, config.agent, starts, [](const PlayerState& s) { return s.col; },
      [&](const PlayerState& s) { return s.col >= goal_col; }, board.width);
}

// Vertical platformer: play axis points up. Starts on top of the bottom
// padding, done when any state reaches the top padding rows.
inline AgentResult vertical_platformer_check(const SliceSequence& level, const GameConfig& config) {
  detail::Board board(level, config);
  const int pad_start = static_cast<int>(config.padding_start.size());
  const int pad_end = static_cast<int>(config.padding_end.size());
  detail::PlatformerRules rules{board, config.agent};

  std::vector<PlayerState> starts;
  const int start_row = board.height - pad_start - 1;
  if (start_row >= 0) {
    for (int c = 0; c < board.width; ++c) {
      if (rules.cell_open(c, start_row) && rules.supported(c, start_row))
        starts.push_back({c, start_row, PlayerState::Phase::grounded, 0, 0});
    }
  }
  return detail::platformer_search(
      board, config.agent, starts,
      [&](const PlayerState& s) { return board.height - 1 - s.row; },
      [&](const PlayerState& s) { return s.row < pad_end; }, board.height);
}

// Top-down roguelike with a stamina budget: 4-directional moves cost
// stamina, food restores it up to the cap (consumed per state), spike and
// enemy tiles are lethal, and the portal opens once every switch has been
// collected. States are memoized with dominance pruning on stamina.
inline AgentResult roguelike_check(const SliceSequence& level, const GameConfig& config,
                                   std::optional<int> initial_stamina = std::nullopt) {
  detail::Board board(level, config);
  const AgentParams& params = config.agent;
  const int width = board.width, height = board.height;
  const int pad_end = static_cast<int>(config.padding_end.size());

  std::map<std::pair<int, int>, int> food_index, switch_index;
  std::optional<std::pair<int, int>> start_pos;
  bool portal_in_end_padding = false;
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      const uint32_t tags = board.tag_at(c, r);
      if (tags & tag_food) {
        if (food_index.size() >= 64) fail(Errc::malformed_level, "more than 64 food tiles");
        food_index.emplace(std::make_pair(c, r), static_cast<int>(food_index.size()));
      }
      if (tags & tag_switch) {
        if (switch_index.size() >= 64) fail(Errc::malformed_level, "more than 64 switches");
        switch_index.emplace(std::make_pair(c, r), static_cast<int>(switch_index.size()));
      }
      if ((tags & tag_start_marker) && !start_pos) start_pos = {c, r};
      if ((tags & (tag_portal | tag_end_marker)) && c >= width - pad_end)
        portal_in_end_padding = true;
    }
  }
  if (!portal_in_end_padding) fail(Errc::malformed_level, "no portal or goal marker in final padding");
  if (!start_pos) fail(Errc::malformed_level, "no start marker");

  const uint64_t all_switches =
      switch_index.empty() ? 0 : (switch_index.size() == 64 ? ~0ull : (1ull << switch_index.size()) - 1);
  const int total_food = static_cast<int>(food_index.size());

  // Admissible dead-state cutoff: even eating every remaining food, the
  // player must still cover the Manhattan distance to the portal, via every
  // uncollected switch.
  std::vector<std::pair<int, int>> portals;
  for (int r = 0; r < height; ++r)
    for (int c = 0; c < width; ++c)
      if (board.tag_at(c, r) & tag_portal) portals.emplace_back(c, r);
  auto hopeless = [&](const PlayerState& s) {
    long best_possible =
        s.stamina + static_cast<long>(params.food_gain) * (total_food - std::popcount(s.food));
    long need = std::numeric_limits<long>::max();
    for (auto& [pc, pr] : portals)
      need = std::min<long>(need, std::labs(pc - s.col) + std::labs(pr - s.row));
    for (const auto& [pos, bit] : switch_index) {
      if (s.switches & (1ull << bit)) continue;
      long via = std::labs(pos.first - s.col) + std::labs(pos.second - s.row);
      long on = std::numeric_limits<long>::max();
      for (auto& [pc, pr] : portals)
        on = std::min<long>(on, std::labs(pc - pos.first) + std::labs(pr - pos.second));
      need = std::max(need == std::numeric_limits<long>::max() ? 0 : need, via + on);
    }
    return best_possible < need * params.move_cost;
  };

  AgentResult result;
  PlayerState start;
  start.col = start_pos->first;
  start.row = start_pos->second;
  start.stamina = initial_stamina.value_or(params.start_stamina);

  struct Key {
    int col, row;
    uint64_t switches;
    bool operator==(const Key& o) const {
      return col == o.col && row == o.row && switches == o.switches;
    }
  };
  struct KeyHash {
    size_t operator()(const Key& k) const {
      uint64_t h = static_cast<uint64_t>(k.col) * 0x9E3779B97F4A7C15ull;
      h ^= static_cast<uint64_t>(k.row) + 0x9E3779B97F4A7C15ull + (h << 6) + (h >> 2);
      h ^= k.switches + 0xBF58476D1CE4E5B9ull + (h << 6) + (h >> 2);
      return static_cast<size_t>(h);
    }
  };
  struct FullKey {
    Key k;
    uint64_t food;
    int stamina;
    bool operator==(const FullKey& o) const {
      return k == o.k && food == o.food && stamina == o.stamina;
    }
  };
  struct FullKeyHash {
    size_t operator()(const FullKey& f) const {
      uint64_t h = KeyHash{}(f.k) * 1099511628211ull + static_cast<size_t>(f.stamina);
      return static_cast<size_t>(h ^ (f.food * 0x94D049BB133111EBull));
    }
  };
  auto full_key = [](const PlayerState& s) {
    return FullKey{{s.col, s.row, s.switches}, s.food, s.stamina};
  };
  // Total deterministic order: progress first, then strongest state.
  struct Entry {
    PlayerState s;
    bool operator<(const Entry& o) const {  // reversed for max-heap
      if (s.col != o.s.col) return s.col < o.s.col;
      if (s.row != o.s.row) return s.row > o.s.row;
      if (s.stamina != o.s.stamina) return s.stamina < o.s.stamina;
      if (s.switches != o.s.switches) return s.switches > o.s.switches;
      return s.food > o.s.food;
    }
  };
  std::priority_queue<Entry> queue;
  // Pareto front per (position, switches): a state dominates another with
  // no more consumed food and at least as much stamina.
  std::unordered_map<Key, std::vector<std::pair<int, uint64_t>>, KeyHash> fronts;
  std::unordered_map<FullKey, PlayerState, FullKeyHash> parents;  // exact discovery predecessor

  // a dominates b when a's stamina surplus covers the value of every food a
  // has consumed but b still holds (each is worth at most food_gain).
  auto dominates = [&](int st_a, uint64_t food_a, int st_b, uint64_t food_b) {
    int count = std::popcount(food_a & ~food_b);
    return static_cast<long>(st_a) >= static_cast<long>(st_b) + static_cast<long>(params.food_gain) * count;
  };

  int best_col = -1;
  auto push = [&](const PlayerState& s, const PlayerState* from) {
    Key k{s.col, s.row, s.switches};
    auto& front = fronts[k];
    for (const auto& [st, food] : front)
      if (dominates(st, food, s.stamina, s.food)) return;
    std::erase_if(front, [&](const std::pair<int, uint64_t>& e) {
      return dominates(s.stamina, s.food, e.first, e.second);
    });
    front.emplace_back(s.stamina, s.food);
    if (from) parents[full_key(s)] = *from;
    queue.push({s});
    best_col = std::max(best_col, s.col);
  };
  push(start, nullptr);

  std::optional<PlayerState> goal_state;
  while (!queue.empty()) {
    PlayerState cur = queue.top().s;
    queue.pop();
    if ((board.tag_at(cur.col, cur.row) & tag_portal) && cur.switches == all_switches) {
      goal_state = cur;
      break;
    }
    if (++result.nodes_expanded >= agent_node_budget) {
      result.budget_exhausted = true;
      break;
    }
    if (cur.stamina < params.move_cost) continue;

    const int dc[4] = {0, 0, -1, 1};
    const int dr[4] = {-1, 1, 0, 0};
    for (int dir = 0; dir < 4; ++dir) {
      int nc = cur.col + dc[dir], nr = cur.row + dr[dir];
      if (nc < 0 || nc >= width || nr < 0 || nr >= height) continue;
      const uint32_t tags = board.tag_at(nc, nr);
      if (tags & tag_solid) continue;
      if (tags & (tag_hazard | tag_enemy)) continue;

      PlayerState next = cur;
      next.col = nc;
      next.row = nr;
      next.stamina = cur.stamina - params.move_cost;
      if (tags & tag_switch) next.switches |= 1ull << switch_index.at({nc, nr});
      if (tags & tag_portal) {
        if (next.switches != all_switches) continue;  // locked until all switches
      }
      if (tags & tag_food) {
        int bit = food_index.at({nc, nr});
        if (!(next.food & (1ull << bit))) {
          next.food |= 1ull << bit;
          next.stamina = std::min(next.stamina + params.food_gain, params.stamina_cap);
        }
      }
      bool at_goal = (tags & tag_portal) && next.switches == all_switches;
      if (next.stamina <= 0 && !at_goal) continue;  // out of moves
      if (!at_goal && hopeless(next)) continue;
      push(next, &cur);
    }
  }

  if (goal_state) {
    result.completable = true;
    result.furthest_progress = 1.0;
    PlayerState s = *goal_state;
    while (true) {
      result.path.push_back(s);
      auto it = parents.find(full_key(s));
      if (it == parents.end()) break;
      s = it->second;
    }
    std::reverse(result.path.begin(), result.path.end());
  } else if (best_col >= 0) {
    result.furthest_progress =
        width == 0 ? 0.0 : static_cast<double>(best_col + 1) / static_cast<double>(width);
    if (result.furthest_progress > 1.0) result.furthest_progress = 1.0;
  }
  return result;
}

// Dispatch on the configured agent kind and slice orientation.
inline AgentResult agent_check(const SliceSequence& level, const GameConfig& config,
                               std::optional<int> initial_stamina = std::nullopt) {
  if (config.agent.kind == AgentParams::Kind::roguelike)
    return roguelike_check(level, config, initial_stamina);
  if (config.orientation == Orientation::rows_bottom_to_top)
    return vertical_platformer_check(level, config);
  return platformer_check(level, config);
}

inline nlohmann::json path_to_json(const AgentResult& result, const GameConfig& config) {
  nlohmann::json arr = nlohmann::json::array();
  for (const PlayerState& s : result.path) {
    nlohmann::json js;
    js["col"] = s.col;
    js["row"] = s.row;
    if (config.agent.kind == AgentParams::Kind::platformer) {
      js["phase"] = s.phase == PlayerState::Phase::grounded
                        ? "grounded"
                        : (s.phase == PlayerState::Phase::rising ? "rising" : "falling");
    } else {
      js["stamina"] = s.stamina;
    }
    arr.push_back(std::move(js));
  }
  return arr;
}

}  // namespace seglink
