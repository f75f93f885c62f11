#pragma once

#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "seglink/agents.hpp"
#include "seglink/behavior.hpp"
#include "seglink/linking.hpp"
#include "seglink/ngram.hpp"
#include "seglink/rng.hpp"

namespace seglink {

// Owns everything a run needs: config, training corpus, trained models.
struct Workspace {
  GameConfig config;
  std::vector<SliceSequence> corpus;
  Models models;
  std::optional<int> stamina_override;

  static Workspace open(const std::filesystem::path& config_path) {
    Workspace ws;
    ws.config = load_game_config(config_path);
    ws.corpus = load_corpus(ws.config);
    ws.models = train_models(ws.corpus, ws.config);
    return ws;
  }

  static Workspace from_corpus(GameConfig cfg, std::vector<SliceSequence> corpus) {
    Workspace ws;
    ws.config = std::move(cfg);
    ws.corpus = std::move(corpus);
    ws.models = train_models(ws.corpus, ws.config);
    return ws;
  }

  bool level_completable(const SliceSequence& level) const {
    return agent_check(pad_level(level, config), config, stamina_override).completable;
  }

  LinkEnv env() const {
    return LinkEnv{config, models,
                   [this](const SliceSequence& level) { return level_completable(level); }};
  }
};

struct SegmentInfo {
  std::string id;
  SliceSequence seq;
  BCVector bc;
};

using SegmentCorpus = std::vector<SegmentInfo>;

// Sample a corpus of segments that are generable (by construction),
// completable, and free of broken structures, so experiment-level guarantees
// are about linking rather than segment quality.
inline SegmentCorpus sample_segment_corpus(const Workspace& ws, int count, uint64_t seed) {
  SegmentCorpus out;
  SegmentAccept accept = [&](const SliceSequence& seq) {
    const auto& cuts = ws.config.segment_boundary_slices;
    if (!cuts.empty()) {
      auto allowed = [&](const Slice& s) {
        return std::find(cuts.begin(), cuts.end(), s) != cuts.end();
      };
      if (!allowed(seq.slices.front()) || !allowed(seq.slices.back())) return false;
    }
    if (!is_unbroken(seq, ws.config) || !ws.level_completable(seq)) return false;
    if (!ws.config.segment_anchor.empty()) {
      SliceSequence anchor{seq.orientation, ws.config.segment_anchor};
      LinkEnv env = ws.env();
      LinkOptions opts = paper2_options(Strategy::shortest, ws.config);
      if (build_link(seq, anchor, env, opts).status != LinkStatus::linked) return false;
      if (build_link(anchor, seq, env, opts).status != LinkStatus::linked) return false;
    }
    return true;
  };
  for (int i = 0; i < count; ++i) {
    uint64_t s = seed ^ (0x9E3779B97F4A7C15ull * static_cast<uint64_t>(i + 1));
    SegmentInfo info;
    info.seq = sample_segment(ws.models.ngram, ws.config.orientation, ws.config.segment_length, s,
                              accept, /*retry_budget=*/20000);
    info.bc = behavioral_characteristics(info.seq, ws.config);
    char buf[16];
    std::snprintf(buf, sizeof buf, "s%04d", i);
    info.id = buf;
    out.push_back(std::move(info));
  }
  return out;
}

// Ingest externally supplied segments (one level file each).
inline SegmentCorpus load_segment_corpus(const std::filesystem::path& dir, const GameConfig& config) {
  std::vector<std::filesystem::path> files;
  std::error_code ec;
  for (const auto& entry : std::filesystem::directory_iterator(dir, ec))
    if (entry.path().extension() == ".txt") files.push_back(entry.path());
  if (ec || files.empty()) fail(Errc::corpus_missing, "no segment files in " + dir.string());
  std::sort(files.begin(), files.end());
  SegmentCorpus out;
  for (const auto& f : files) {
    SegmentInfo info;
    info.id = f.stem().string();
    info.seq = to_slices(load_level_file(f, config), config);
    info.bc = behavioral_characteristics(info.seq, config);
    out.push_back(std::move(info));
  }
  return out;
}

// Deterministic helper pool. Tasks are indexed and results land by index, so
// worker count never changes any output.
template <typename Fn>
void parallel_for(size_t n, int jobs, Fn&& fn) {
  jobs = std::max(1, jobs);
  if (jobs == 1 || n <= 1) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto worker = [&] {
    while (true) {
      size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> threads;
  for (int t = 0; t < jobs; ++t) threads.emplace_back(worker);
  for (auto& t : threads) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

enum class PairingMode { all_pairs, bc_neighbor };

inline const char* to_string(PairingMode m) {
  return m == PairingMode::all_pairs ? "all_pairs" : "bc_neighbor";
}

// Ordered segment pairs. bc_neighbor mimics walking the quality-diversity
// grid: pairs whose characteristics sit within one bin of each other. Falls
// back to all pairs when the neighborhood is too sparse.
inline std::vector<std::pair<int, int>> select_pairs(const SegmentCorpus& segments,
                                                     PairingMode& mode, double bin_size,
                                                     size_t max_pairs, size_t min_pairs = 0) {
  const int n = static_cast<int>(segments.size());
  std::vector<std::pair<int, int>> pairs;
  if (mode == PairingMode::bc_neighbor) {
    auto bin = [&](double v) { return static_cast<long>(std::floor(v / bin_size)); };
    for (int i = 0; i < n && pairs.size() < max_pairs; ++i) {
      for (int j = 0; j < n && pairs.size() < max_pairs; ++j) {
        if (i == j) continue;
        if (std::labs(bin(segments[i].bc[0]) - bin(segments[j].bc[0])) <= 1 &&
            std::labs(bin(segments[i].bc[1]) - bin(segments[j].bc[1])) <= 1)
          pairs.emplace_back(i, j);
      }
    }
    if (pairs.size() >= std::max<size_t>(min_pairs, 1)) return pairs;
    mode = PairingMode::all_pairs;
    pairs.clear();
  }
  for (int i = 0; i < n && pairs.size() < max_pairs; ++i)
    for (int j = 0; j < n && pairs.size() < max_pairs; ++j)
      if (i != j) pairs.emplace_back(i, j);
  return pairs;
}

struct PairRow {
  Strategy strategy = Strategy::null_link;
  int start_id = 0, end_id = 0;
  LinkResult result;
};

struct SweepReport {
  std::string game;
  std::string pairing_mode;
  size_t pair_count = 0;
  std::vector<PairRow> rows;
};

struct StrategySummary {
  long pairs = 0, linked = 0;
  long unbroken = 0, generable = 0, completable = 0, usable = 0;  // among linked
  std::vector<long> lengths;                                      // among linked
  std::vector<double> rmses;                                      // non-null, among linked
  std::vector<double> dbcs;                                       // among linked
  long nodes = 0;
};

inline std::map<std::string, StrategySummary> summarize(const SweepReport& report) {
  std::map<std::string, StrategySummary> by;
  for (const PairRow& row : report.rows) {
    StrategySummary& s = by[to_string(row.strategy)];
    ++s.pairs;
    s.nodes += row.result.nodes_expanded;
    if (row.result.status != LinkStatus::linked) continue;
    ++s.linked;
    if (row.result.unbroken) ++s.unbroken;
    if (row.result.generable) ++s.generable;
    if (row.result.completable) ++s.completable;
    if (row.result.usable) ++s.usable;
    s.lengths.push_back(static_cast<long>(row.result.full_linker().size()));
    if (row.strategy != Strategy::null_link && row.result.rmse) s.rmses.push_back(*row.result.rmse);
    if (row.result.dbc) s.dbcs.push_back(*row.result.dbc);
  }
  return by;
}

namespace detail {

inline double mean_of(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

inline double median_of(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  size_t n = v.size();
  return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

inline double max_of(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, x);
  return m;
}

inline nlohmann::json dist_stats(const std::vector<double>& v) {
  nlohmann::json j;
  j["count"] = v.size();
  j["mean"] = mean_of(v);
  j["median"] = median_of(v);
  j["max"] = max_of(v);
  return j;
}

}  // namespace detail

// Pairwise sweep: every selected pair, every requested strategy, through
// build_link under the given options preset.
inline SweepReport run_pairwise_sweep(const Workspace& ws, const SegmentCorpus& segments,
                                      const std::vector<Strategy>& strategies,
                                      const LinkOptions& base_opts,
                                      const std::vector<std::pair<int, int>>& pairs, int jobs) {
  SweepReport report;
  report.game = ws.config.name;
  report.pair_count = pairs.size();

  const size_t tasks = pairs.size() * strategies.size();
  report.rows.resize(tasks);
  LinkEnv env = ws.env();
  parallel_for(tasks, jobs, [&](size_t t) {
    const size_t p = t / strategies.size();
    const Strategy strategy = strategies[t % strategies.size()];
    LinkOptions opts = base_opts;
    opts.strategy = strategy;
    PairRow& row = report.rows[t];
    row.strategy = strategy;
    row.start_id = pairs[p].first;
    row.end_id = pairs[p].second;
    row.result = build_link(segments[pairs[p].first].seq, segments[pairs[p].second].seq, env, opts);
  });
  return report;
}

inline std::string csv_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

inline void write_pairs_csv(const SweepReport& report, const SegmentCorpus& segments,
                            std::ostream& out) {
  out << "game,strategy,start_id,end_id,status,unbroken,generable,completable,usable,"
         "linker_len,rmse,d_bc,nodes\n";
  for (const PairRow& row : report.rows) {
    const LinkResult& r = row.result;
    out << report.game << ',' << to_string(row.strategy) << ',' << segments[row.start_id].id << ','
        << segments[row.end_id].id << ',' << to_string(r.status) << ',';
    if (r.status == LinkStatus::linked) {
      out << (r.unbroken ? 1 : 0) << ',' << (r.generable ? 1 : 0) << ',' << (r.completable ? 1 : 0)
          << ',' << (r.usable ? 1 : 0) << ',' << r.full_linker().size() << ',';
      if (row.strategy != Strategy::null_link && r.rmse) out << csv_double(*r.rmse);
      out << ',';
      if (r.dbc) out << csv_double(*r.dbc);
    } else {
      out << ",,,,,,";
    }
    out << ',' << r.nodes_expanded << '\n';
  }
}

inline nlohmann::json sweep_summary_json(const SweepReport& report) {
  nlohmann::json j;
  j["schema"] = "seglink-sweep-summary-v1";
  j["game"] = report.game;
  j["pairing_mode"] = report.pairing_mode;
  j["pairs"] = report.pair_count;
  nlohmann::json strategies = nlohmann::json::object();
  for (const auto& [name, s] : summarize(report)) {
    nlohmann::json js;
    js["pairs"] = s.pairs;
    js["linked"] = s.linked;
    js["linked_rate"] = s.pairs ? static_cast<double>(s.linked) / s.pairs : 0.0;
    auto rate_all = [&](long n) { return s.pairs ? static_cast<double>(n) / s.pairs : 0.0; };
    auto rate_linked = [&](long n) { return s.linked ? static_cast<double>(n) / s.linked : 0.0; };
    js["unbroken_rate"] = rate_all(s.unbroken);
    js["completable_rate"] = rate_all(s.completable);
    js["generable_rate"] = rate_all(s.generable);
    js["usable_rate"] = rate_all(s.usable);
    js["unbroken_rate_given_linked"] = rate_linked(s.unbroken);
    js["completable_rate_given_linked"] = rate_linked(s.completable);
    js["generable_rate_given_linked"] = rate_linked(s.generable);
    js["usable_rate_given_linked"] = rate_linked(s.usable);
    std::vector<double> lengths(s.lengths.begin(), s.lengths.end());
    js["length"] = detail::dist_stats(lengths);
    js["rmse"] = detail::dist_stats(s.rmses);
    js["d_bc"] = detail::dist_stats(s.dbcs);
    js["search_nodes"] = s.nodes;
    strategies[name] = std::move(js);
  }
  j["strategies"] = std::move(strategies);
  return j;
}

// ------------------------------------------------------------------
// k-segment chaining experiment (random tuples, independent links).

struct ChainTrialRow {
  int trial = 0;
  Strategy strategy = Strategy::null_link;
  bool linkable = false, completable = false, generable = false, unbroken = false, usable = false;
};

struct ChainReport {
  std::string game;
  int k = 0;
  int trials = 0;
  std::vector<ChainTrialRow> rows;
};

inline uint64_t trial_seed(uint64_t seed, int trial) {
  uint64_t x = seed + 0x9E3779B97F4A7C15ull * static_cast<uint64_t>(trial + 1);
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ull;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBull;
  x ^= x >> 31;
  return x;
}

inline ChainReport run_k_segment_experiment(const Workspace& ws, const SegmentCorpus& segments,
                                            int k, int trials, uint64_t seed,
                                            const std::vector<Strategy>& strategies,
                                            const LinkOptions& base_opts, int jobs) {
  if (k < 2) fail(Errc::bad_config, "k must be >= 2");
  ChainReport report;
  report.game = ws.config.name;
  report.k = k;
  report.trials = trials;
  report.rows.resize(static_cast<size_t>(trials) * strategies.size());
  LinkEnv env = ws.env();

  parallel_for(static_cast<size_t>(trials), jobs, [&](size_t t) {
    Rng rng(trial_seed(seed, static_cast<int>(t)));
    std::vector<SliceSequence> picks;
    for (int i = 0; i < k; ++i)
      picks.push_back(segments[rng.below(segments.size())].seq);
    for (size_t si = 0; si < strategies.size(); ++si) {
      LinkOptions opts = base_opts;
      opts.strategy = strategies[si];
      ChainOutcome outcome = chain_segments(picks, env, opts);
      ChainTrialRow& row = report.rows[t * strategies.size() + si];
      row.trial = static_cast<int>(t);
      row.strategy = strategies[si];
      row.linkable = outcome.linkable;
      row.completable = outcome.completable;
      row.generable = outcome.generable;
      row.unbroken = outcome.unbroken;
      row.usable = outcome.usable;
    }
  });
  return report;
}

inline nlohmann::json chain_summary_json(const ChainReport& report) {
  struct Acc {
    long trials = 0, linkable = 0, completable = 0, usable = 0, generable = 0, unbroken = 0;
  };
  std::map<std::string, Acc> by;
  for (const ChainTrialRow& row : report.rows) {
    Acc& a = by[to_string(row.strategy)];
    ++a.trials;
    if (row.linkable) ++a.linkable;
    if (row.linkable && row.completable) ++a.completable;
    if (row.linkable && row.generable) ++a.generable;
    if (row.linkable && row.unbroken) ++a.unbroken;
    if (row.linkable && row.usable) ++a.usable;
  }
  nlohmann::json j;
  j["schema"] = "seglink-chain-summary-v1";
  j["game"] = report.game;
  j["k"] = report.k;
  j["trials"] = report.trials;
  nlohmann::json strategies = nlohmann::json::object();
  for (const auto& [name, a] : by) {
    nlohmann::json js;
    js["trials"] = a.trials;
    js["linkable_rate"] = a.trials ? static_cast<double>(a.linkable) / a.trials : 0.0;
    js["completable_given_linkable"] =
        a.linkable ? static_cast<double>(a.completable) / a.linkable : 0.0;
    js["usable_given_completable"] =
        a.completable ? static_cast<double>(a.usable) / a.completable : 0.0;
    js["completable_rate"] = a.trials ? static_cast<double>(a.completable) / a.trials : 0.0;
    js["generable_rate"] = a.trials ? static_cast<double>(a.generable) / a.trials : 0.0;
    js["unbroken_rate"] = a.trials ? static_cast<double>(a.unbroken) / a.trials : 0.0;
    js["usable_rate"] = a.trials ? static_cast<double>(a.usable) / a.trials : 0.0;
    strategies[name] = std::move(js);
  }
  j["strategies"] = std::move(strategies);
  return j;
}

inline void write_chain_csv(const ChainReport& report, std::ostream& out) {
  out << "game,k,trial,strategy,linkable,completable,generable,unbroken,usable\n";
  for (const ChainTrialRow& row : report.rows) {
    out << report.game << ',' << report.k << ',' << row.trial << ',' << to_string(row.strategy)
        << ',' << (row.linkable ? 1 : 0) << ',' << (row.completable ? 1 : 0) << ','
        << (row.generable ? 1 : 0) << ',' << (row.unbroken ? 1 : 0) << ',' << (row.usable ? 1 : 0)
        << '\n';
  }
}

// ------------------------------------------------------------------
// Multi-segment usability: grid-walk selection, pre-validated pairwise
// linkers, whole-level usability.

struct UsabilityRow {
  int trial = 0;
  bool linkable = false;
  bool usable = false;
  bool completable = false;
  bool unbroken = false;
};

struct UsabilityReport {
  std::string game;
  int k = 0;
  int trials = 0;
  bool require_linking_slice = false;
  std::vector<UsabilityRow> rows;
};

// Neighbor-by-neighbor walk over BC bins; falls back to a random segment
// when a bin neighborhood is empty.
inline std::vector<int> grid_walk(const SegmentCorpus& segments, int k, Rng& rng, double bin_size) {
  auto bin = [&](double v) { return static_cast<long>(std::floor(v / bin_size)); };
  std::vector<int> picks;
  int cur = static_cast<int>(rng.below(segments.size()));
  picks.push_back(cur);
  while (static_cast<int>(picks.size()) < k) {
    std::vector<int> neighbors;
    for (int j = 0; j < static_cast<int>(segments.size()); ++j) {
      if (j == cur) continue;
      if (std::labs(bin(segments[cur].bc[0]) - bin(segments[j].bc[0])) <= 1 &&
          std::labs(bin(segments[cur].bc[1]) - bin(segments[j].bc[1])) <= 1)
        neighbors.push_back(j);
    }
    int next = neighbors.empty() ? static_cast<int>(rng.below(segments.size()))
                                 : neighbors[rng.below(neighbors.size())];
    picks.push_back(next);
    cur = next;
  }
  return picks;
}

inline UsabilityReport run_multi_segment_usability(const Workspace& ws,
                                                   const SegmentCorpus& segments, int k, int trials,
                                                   uint64_t seed, Strategy strategy,
                                                   bool require_linking_slice, int jobs) {
  if (k < 2) fail(Errc::bad_config, "k must be >= 2");
  UsabilityReport report;
  report.game = ws.config.name;
  report.k = k;
  report.trials = trials;
  report.require_linking_slice = require_linking_slice;
  report.rows.resize(static_cast<size_t>(trials));
  LinkEnv env = ws.env();

  LinkOptions opts = paper2_options(strategy, ws.config);
  if (require_linking_slice) opts.strategy = Strategy::bc_match_required;

  parallel_for(static_cast<size_t>(trials), jobs, [&](size_t t) {
    Rng rng(trial_seed(seed, static_cast<int>(t)));
    std::vector<int> picks = grid_walk(segments, k, rng, ws.config.bc_bin_size);
    std::vector<SliceSequence> seqs;
    for (int p : picks) seqs.push_back(segments[p].seq);
    ChainOutcome outcome = chain_segments(seqs, env, opts);
    UsabilityRow& row = report.rows[t];
    row.trial = static_cast<int>(t);
    row.linkable = outcome.linkable;
    row.usable = outcome.usable;
    row.completable = outcome.completable;
    row.unbroken = outcome.unbroken;
  });
  return report;
}

inline nlohmann::json usability_summary_json(const UsabilityReport& report) {
  long linkable = 0, usable = 0;
  for (const UsabilityRow& row : report.rows) {
    if (row.linkable) {
      ++linkable;
      if (row.usable) ++usable;
    }
  }
  nlohmann::json j;
  j["schema"] = "seglink-usability-summary-v1";
  j["game"] = report.game;
  j["k"] = report.k;
  j["trials"] = report.trials;
  j["require_linking_slice"] = report.require_linking_slice;
  j["linkable"] = linkable;
  j["usable_given_linkable"] = linkable ? static_cast<double>(usable) / linkable : 0.0;
  j["linkable_rate"] = report.trials ? static_cast<double>(linkable) / report.trials : 0.0;
  return j;
}

inline void write_usability_csv(const UsabilityReport& report, std::ostream& out) {
  out << "game,k,trial,require_linking_slice,linkable,completable,unbroken,usable\n";
  for (const UsabilityRow& row : report.rows) {
    out << report.game << ',' << report.k << ',' << row.trial << ','
        << (report.require_linking_slice ? 1 : 0) << ',' << (row.linkable ? 1 : 0) << ','
        << (row.completable ? 1 : 0) << ',' << (row.unbroken ? 1 : 0) << ',' << (row.usable ? 1 : 0)
        << '\n';
  }
}

// Link statistics in the shape of the paper's table: mean/median/max linker
// length and D_BC for one strategy of a sweep.
inline nlohmann::json link_stats_json(const SweepReport& report, Strategy strategy) {
  std::vector<double> lengths, dbcs;
  for (const PairRow& row : report.rows) {
    if (row.strategy != strategy || row.result.status != LinkStatus::linked) continue;
    lengths.push_back(static_cast<double>(row.result.full_linker().size()));
    if (row.result.dbc) dbcs.push_back(*row.result.dbc);
  }
  nlohmann::json j;
  j["game"] = report.game;
  j["strategy"] = to_string(strategy);
  j["length"] = detail::dist_stats(lengths);
  j["d_bc"] = detail::dist_stats(dbcs);
  return j;
}

}  // namespace seglink
