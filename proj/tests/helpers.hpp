#pragma once

// Shared fixtures and independent oracles for the test suites. The oracles
// re-derive behavior from the documented movement and search rules with
// plain breadth-first enumeration; they must not call into the search code
// they check.

#include <algorithm>
#include <deque>
#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "seglink/seglink.hpp"

namespace testutil {

using namespace seglink;

inline std::filesystem::path data_dir() { return SEGLINK_DATA_DIR; }

inline GameConfig load_config(const std::string& name) {
  return load_game_config(data_dir() / "configs" / (name + ".json"));
}

inline Workspace open_game(const std::string& name) {
  return Workspace::open(data_dir() / "configs" / (name + ".json"));
}

// ------------------------------------------------------------------
// Toy games over tiny slice vocabularies, used by the search oracles.

struct ToyGame {
  GameConfig config;
  std::vector<Slice> vocabulary;
  std::vector<SliceSequence> corpus;
  Models models;
};

inline GameConfig toy_config(int order, int max_depth) {
  GameConfig cfg;
  cfg.name = "toy";
  cfg.orientation = Orientation::columns_left_to_right;
  cfg.alphabet['-'] = tag_empty;
  cfg.alphabet['X'] = tag_solid;
  cfg.alphabet['E'] = tag_enemy;
  cfg.ngram_order = order;
  cfg.segment_length = std::max(order, 3);
  cfg.link_search_max_depth = max_depth;
  cfg.padding_start = {"--X"};
  cfg.padding_end = {"--X"};
  cfg.bc_names = {"density", "leniency"};
  cfg.leniency_features.feature_tiles = "E";
  cfg.agent.kind = AgentParams::Kind::platformer;
  return cfg;
}

// Random toy model: a handful of training walks over <= 5 random slices.
inline ToyGame make_toy_game(uint64_t seed, int order, int max_depth) {
  Rng rng(seed);
  ToyGame toy;
  toy.config = toy_config(order, max_depth);

  int vocab_size = 3 + rng.below_int(3);  // 3..5
  std::set<Slice> vocab;
  const char tiles[] = {'-', 'X', 'E'};
  while (static_cast<int>(vocab.size()) < vocab_size) {
    Slice s(3, '-');
    for (char& c : s) c = tiles[rng.below_int(3)];
    vocab.insert(s);
  }
  toy.vocabulary.assign(vocab.begin(), vocab.end());

  int walks = 2 + rng.below_int(3);
  for (int w = 0; w < walks; ++w) {
    SliceSequence seq;
    seq.orientation = toy.config.orientation;
    int len = order + 4 + rng.below_int(6);
    for (int i = 0; i < len; ++i)
      seq.slices.push_back(toy.vocabulary[rng.below(toy.vocabulary.size())]);
    toy.corpus.push_back(std::move(seq));
  }
  toy.models = train_models(toy.corpus, toy.config);
  return toy;
}

// Every slice list of length <= max_depth whose insertion keeps the window
// between the priors generable. Plain product-space enumeration.
inline std::vector<std::vector<Slice>> brute_force_fillings(const std::vector<Slice>& start_prior,
                                                            const std::vector<Slice>& end_prior,
                                                            const std::vector<Slice>& vocabulary,
                                                            const NGramModel& model, int max_depth) {
  std::vector<std::vector<Slice>> out;
  std::vector<std::vector<Slice>> level{{}};
  for (int depth = 0; depth <= max_depth; ++depth) {
    for (const std::vector<Slice>& filling : level) {
      std::vector<Slice> whole = start_prior;
      whole.insert(whole.end(), filling.begin(), filling.end());
      whole.insert(whole.end(), end_prior.begin(), end_prior.end());
      bool ok = true;
      const int n = model.order();
      for (size_t i = 0; ok && i + n <= whole.size(); ++i) {
        std::span<const Slice> prior(whole.data() + i, static_cast<size_t>(n - 1));
        ok = model.has_window(prior, whole[i + n - 1]);
      }
      if (ok) out.push_back(filling);
    }
    if (depth == max_depth) break;
    std::vector<std::vector<Slice>> next;
    for (const std::vector<Slice>& filling : level) {
      for (const Slice& s : vocabulary) {
        std::vector<Slice> f = filling;
        f.push_back(s);
        next.push_back(std::move(f));
      }
    }
    level = std::move(next);
  }
  return out;
}

// ------------------------------------------------------------------
// Exhaustive state-space BFS oracles for the agents. Movement rules are
// restated here from scratch.

struct OracleBoard {
  TileGrid grid;
  const GameConfig* cfg;
  int w, h;

  explicit OracleBoard(const SliceSequence& level, const GameConfig& config)
      : grid(to_grid(level)), cfg(&config), w(grid.width()), h(grid.height()) {}

  uint32_t tags(int c, int r) const { return cfg->tags(grid.at(c, r)); }
  bool solid(int c, int r) const { return tags(c, r) & tag_solid; }
  bool lethal(int c, int r) const { return tags(c, r) & (tag_hazard | tag_enemy); }
  bool standable(int c, int r) const { return tags(c, r) & (tag_solid | tag_passable_platform); }
};

// (col, row, phase, rise, lat) packed for the visited set.
inline long pack_platformer(int c, int r, int phase, int rise, int lat) {
  return ((((long(c) * 4096 + r) * 4 + phase) * 16 + rise) * 16 + lat);
}

inline bool oracle_platformer_completable(const SliceSequence& padded, const GameConfig& cfg,
                                          bool vertical) {
  OracleBoard b(padded, cfg);
  const AgentParams& p = cfg.agent;
  const int pad_start = static_cast<int>(cfg.padding_start.size());
  const int pad_end = static_cast<int>(cfg.padding_end.size());

  auto wrap = [&](int c) {
    if (!p.allow_horizontal_wrap) return c;
    return ((c % b.w) + b.w) % b.w;
  };
  auto col_ok = [&](int c) { return p.allow_horizontal_wrap || (c >= 0 && c < b.w); };
  auto open = [&](int c, int r) {
    if (r < 0 || r >= b.h || !col_ok(c)) return false;
    int cc = wrap(c);
    return !b.solid(cc, r) && !b.lethal(cc, r);
  };
  auto supported = [&](int c, int r) { return r + 1 < b.h && b.standable(wrap(c), r + 1); };
  auto at_goal = [&](int c, int r) {
    return vertical ? r < pad_end : c >= b.w - pad_end;
  };

  std::deque<std::array<int, 5>> queue;  // c, r, phase(0 g,1 rise,2 fall), rise, lat
  std::set<long> seen;
  auto add = [&](int c, int r, int phase, int rise, int lat) {
    long key = pack_platformer(wrap(c), r, phase, rise, lat);
    if (seen.insert(key).second) queue.push_back({wrap(c), r, phase, rise, lat});
  };

  if (vertical) {
    int start_row = b.h - pad_start - 1;
    if (start_row >= 0)
      for (int c = 0; c < b.w; ++c)
        if (open(c, start_row) && supported(c, start_row)) add(c, start_row, 0, 0, 0);
  } else {
    for (int r = b.h - 1; r >= 0; --r)
      if (open(0, r) && supported(0, r)) {
        add(0, r, 0, 0, 0);
        break;
      }
  }

  while (!queue.empty()) {
    auto [c, r, phase, rise, lat] = queue.front();
    queue.pop_front();
    if (at_goal(c, r)) return true;
    if (phase == 0) {
      for (int dc : {-1, 1})
        if (col_ok(c + dc) && open(c + dc, r) && supported(c + dc, r)) add(c + dc, r, 0, 0, 0);
      if (open(c, r - 1)) add(c, r - 1, 1, 1, 0);
    } else if (phase == 1) {
      if (rise < p.max_jump_height) {
        if (open(c, r - 1)) add(c, r - 1, 1, rise + 1, lat);
        if (lat < p.max_jump_horizontal)
          for (int dc : {-1, 1})
            if (col_ok(c + dc) && open(c + dc, r - 1)) add(c + dc, r - 1, 1, rise + 1, lat + 1);
      }
      add(c, r, 2, 0, 0);
    } else {
      if (supported(c, r)) {
        add(c, r, 0, 0, 0);
        continue;
      }
      if (r + 1 >= b.h) continue;
      if (open(c, r + 1)) add(c, r + 1, 2, 0, 0);
      for (int dc : {-1, 1})
        if (col_ok(c + dc) && open(c + dc, r + 1)) add(c + dc, r + 1, 2, 0, 0);
    }
  }
  return false;
}

inline bool oracle_roguelike_completable(const SliceSequence& padded, const GameConfig& cfg,
                                         int start_stamina) {
  OracleBoard b(padded, cfg);
  const AgentParams& p = cfg.agent;

  std::vector<std::pair<int, int>> foods, switches;
  int start_c = -1, start_r = -1;
  for (int r = 0; r < b.h; ++r)
    for (int c = 0; c < b.w; ++c) {
      uint32_t t = b.tags(c, r);
      if (t & tag_food) foods.emplace_back(c, r);
      if (t & tag_switch) switches.emplace_back(c, r);
      if ((t & tag_start_marker) && start_c < 0) {
        start_c = c;
        start_r = r;
      }
    }
  const uint64_t all_sw = switches.empty() ? 0 : (1ull << switches.size()) - 1;

  struct St {
    int c, r, stamina;
    uint64_t sw, food;
  };
  auto key = [&](const St& s) {
    return std::tuple<int, int, int, uint64_t, uint64_t>(s.c, s.r, s.stamina, s.sw, s.food);
  };
  std::deque<St> queue;
  std::set<std::tuple<int, int, int, uint64_t, uint64_t>> seen;
  auto add = [&](const St& s) {
    if (seen.insert(key(s)).second) queue.push_back(s);
  };
  add({start_c, start_r, start_stamina, 0, 0});

  while (!queue.empty()) {
    St s = queue.front();
    queue.pop_front();
    if ((b.tags(s.c, s.r) & tag_portal) && s.sw == all_sw) return true;
    if (s.stamina < p.move_cost) continue;
    const int dc[4] = {0, 0, -1, 1};
    const int dr[4] = {-1, 1, 0, 0};
    for (int d = 0; d < 4; ++d) {
      int nc = s.c + dc[d], nr = s.r + dr[d];
      if (nc < 0 || nc >= b.w || nr < 0 || nr >= b.h) continue;
      uint32_t t = b.tags(nc, nr);
      if (t & tag_solid) continue;
      if (t & (tag_hazard | tag_enemy)) continue;
      St n = s;
      n.c = nc;
      n.r = nr;
      n.stamina = s.stamina - p.move_cost;
      if (t & tag_switch)
        for (size_t i = 0; i < switches.size(); ++i)
          if (switches[i] == std::make_pair(nc, nr)) n.sw |= 1ull << i;
      if (t & tag_portal) {
        if (n.sw != all_sw) continue;
      }
      if (t & tag_food)
        for (size_t i = 0; i < foods.size(); ++i)
          if (foods[i] == std::make_pair(nc, nr) && !(n.food & (1ull << i))) {
            n.food |= 1ull << i;
            n.stamina = std::min(n.stamina + p.food_gain, p.stamina_cap);
          }
      bool goal = (t & tag_portal) && n.sw == all_sw;
      if (n.stamina <= 0 && !goal) continue;
      add(n);
    }
  }
  return false;
}

// Enumerate all micro-levels of `length` slices over `choices`, in odometer
// order, and call fn on each.
template <typename Fn>
void for_each_micro_level(const std::vector<Slice>& choices, int length, Orientation orientation,
                          Fn&& fn) {
  std::vector<size_t> idx(static_cast<size_t>(length), 0);
  while (true) {
    SliceSequence seq;
    seq.orientation = orientation;
    for (size_t i : idx) seq.slices.push_back(choices[i]);
    fn(seq);
    size_t pos = 0;
    while (pos < idx.size()) {
      if (++idx[pos] < choices.size()) break;
      idx[pos++] = 0;
    }
    if (pos == idx.size()) break;
  }
}

}  // namespace testutil
