#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "seglink/behavior.hpp"
#include "seglink/chains.hpp"
#include "seglink/core.hpp"
#include "seglink/game.hpp"
#include "seglink/ngram.hpp"
#include "seglink/structures.hpp"

namespace seglink {

enum class Strategy { null_link, shortest, bc_match, bc_match_required };

inline const char* to_string(Strategy s) {
  switch (s) {
    case Strategy::null_link: return "null";
    case Strategy::shortest: return "shortest";
    case Strategy::bc_match: return "bc_match";
    case Strategy::bc_match_required: return "bc_match_required";
  }
  return "?";
}

inline Strategy strategy_from_string(const std::string& s) {
  if (s == "null") return Strategy::null_link;
  if (s == "shortest") return Strategy::shortest;
  if (s == "bc_match") return Strategy::bc_match;
  if (s == "bc_match_required") return Strategy::bc_match_required;
  fail(Errc::bad_config, "unknown strategy '" + s + "'");
}

enum class LinkStatus { linked, no_link_found, structure_failure };

inline const char* to_string(LinkStatus s) {
  switch (s) {
    case LinkStatus::linked: return "linked";
    case LinkStatus::no_link_found: return "no_link_found";
    case LinkStatus::structure_failure: return "structure_failure";
  }
  return "?";
}

// The two reporting conventions for "usable".
enum class ReportingMode {
  paper1,  // completable && generable
  paper2,  // completable && unbroken
};

// What the tree search may insert between the priors.
enum class SearchSpace {
  full_ngram,      // any trained successor
  linking_slices,  // designer-defined or default structure-free slices only
};

struct LinkOptions {
  Strategy strategy = Strategy::shortest;
  int max_depth = 6;
  SearchSpace space = SearchSpace::linking_slices;
  ReportingMode reporting = ReportingMode::paper2;
  bool use_structure_chains = true;
  std::string required_predicate = "contains-food";  // for bc_match_required
  std::optional<int> agent_stamina_override;
  long node_budget = 5'000'000;
};

// Preset matching the evaluation protocol of the earlier study: depth-6
// search over the full n-gram, no structure chains, usable means
// completable and generable.
inline LinkOptions paper1_options(Strategy strategy) {
  LinkOptions o;
  o.strategy = strategy;
  o.max_depth = 6;
  o.space = SearchSpace::full_ngram;
  o.reporting = ReportingMode::paper1;
  o.use_structure_chains = false;
  return o;
}

// Preset matching the extended protocol: per-game depth, linking slices
// only, structure chains on, usable means completable and unbroken.
inline LinkOptions paper2_options(Strategy strategy, const GameConfig& config) {
  LinkOptions o;
  o.strategy = strategy;
  o.max_depth = config.link_search_max_depth;
  o.space = SearchSpace::linking_slices;
  o.reporting = ReportingMode::paper2;
  o.use_structure_chains = true;
  return o;
}

struct LinkResult {
  LinkStatus status = LinkStatus::no_link_found;
  std::vector<Slice> linker;            // tree search output (m)
  std::vector<Slice> structure_prefix;  // forward chain output (s)
  std::vector<Slice> structure_suffix;  // back chain output (e), in play order
  bool unbroken = false;
  bool generable = false;
  bool completable = false;
  bool usable = false;
  std::optional<double> rmse;
  std::optional<double> dbc;
  long nodes_expanded = 0;
  int depth_reached = 0;

  // s + m + e, the slices actually inserted between the segments.
  std::vector<Slice> full_linker() const {
    std::vector<Slice> all = structure_prefix;
    all.insert(all.end(), linker.begin(), linker.end());
    all.insert(all.end(), structure_suffix.begin(), structure_suffix.end());
    return all;
  }
};

struct Models {
  NGramModel ngram;
  StructureChain forward;
  StructureChain backward;
};

inline Models train_models(const std::vector<SliceSequence>& corpus, const GameConfig& config) {
  Models m;
  m.ngram = train_ngram(corpus, config.ngram_order);
  auto chains = train_structure_chains(corpus, config);
  m.forward = std::move(chains.first);
  m.backward = std::move(chains.second);
  return m;
}

// Completability hook; receives the unpadded assembled level.
using CompletabilityFn = std::function<bool(const SliceSequence&)>;

struct LinkEnv {
  const GameConfig& game;
  const Models& models;
  CompletabilityFn completable;
};

// Structure-free slices of the model vocabulary: the default linking slices.
inline std::vector<Slice> default_linking_slices(const NGramModel& model, const GameConfig& config) {
  std::vector<Slice> out;
  for (const Slice& s : model.vocabulary())
    if (!config.slice_has_structure_tile(s)) out.push_back(s);
  return out;
}

inline std::vector<Slice> linking_slice_set(const LinkEnv& env) {
  if (!env.game.linking_slices.empty()) return env.game.linking_slices;
  return default_linking_slices(env.models.ngram, env.game);
}

namespace detail {

inline std::vector<Slice> head_prior(const std::vector<Slice>& slices, int order) {
  const size_t n = static_cast<size_t>(order - 1);
  if (slices.size() < n) fail(Errc::sequence_too_short, "segment shorter than order-1");
  return std::vector<Slice>(slices.begin(), slices.begin() + static_cast<long>(n));
}

inline std::vector<Slice> tail_prior(const std::vector<Slice>& slices, int order) {
  const size_t n = static_cast<size_t>(order - 1);
  if (slices.size() < n) fail(Errc::sequence_too_short, "segment shorter than order-1");
  return std::vector<Slice>(slices.end() - static_cast<long>(n), slices.end());
}

// Can the search stop here? True iff every n-window spanning the boundary
// between the running context and the end prior was seen in training.
inline bool closes(const std::vector<Slice>& context, const std::vector<Slice>& end_prior,
                   const NGramModel& model) {
  std::vector<Slice> joined = context;
  joined.insert(joined.end(), end_prior.begin(), end_prior.end());
  const int n = model.order();
  for (size_t i = 0; i + n <= joined.size(); ++i) {
    std::span<const Slice> prior(joined.data() + i, static_cast<size_t>(n - 1));
    if (!model.has_window(prior, joined[i + n - 1])) return false;
  }
  return true;
}

}  // namespace detail

struct SearchStats {
  long nodes = 0;
  int depth_reached = 0;
  bool budget_exhausted = false;
};

// Breadth-first enumeration of linker candidates: slice lists L with
// |L| <= max_depth such that start_prior ++ L ++ end_prior is generable
// window by window. Candidates arrive shortest first, lexicographic within a
// length. `filter`, when set, restricts inserted slices to the linking slice
// set. The visitor returns false to stop. Depth is measured in linker
// slices: one slice added per search step.
template <typename Visitor>
void connect_priors(const std::vector<Slice>& start_prior, const std::vector<Slice>& end_prior,
                    const NGramModel& model, const std::vector<Slice>* filter, int max_depth,
                    SearchStats& stats, Visitor&& visit) {
  struct Node {
    std::vector<Slice> context;
    std::vector<Slice> path;
  };
  const std::set<Slice> allowed =
      filter ? std::set<Slice>(filter->begin(), filter->end()) : std::set<Slice>();

  std::vector<Node> frontier{{start_prior, {}}};
  for (int depth = 0; depth <= max_depth; ++depth) {
    std::vector<Node> next;
    for (Node& node : frontier) {
      ++stats.nodes;
      if (stats.nodes > 5'000'000 * 2) {  // hard stop, see LinkOptions::node_budget
        stats.budget_exhausted = true;
        return;
      }
      stats.depth_reached = std::max(stats.depth_reached, depth);
      if (detail::closes(node.context, end_prior, model)) {
        if (!visit(node.path)) return;
      }
      if (depth == max_depth) continue;
      const auto& succ = model.successors_of(
          std::span<const Slice>(node.context.data(), node.context.size()));
      for (const auto& [slice, count] : succ) {
        if (filter && !allowed.count(slice)) continue;
        Node child;
        child.context.assign(node.context.begin() + 1, node.context.end());
        child.context.push_back(slice);
        child.path = node.path;
        child.path.push_back(slice);
        next.push_back(std::move(child));
      }
    }
    frontier = std::move(next);
    if (frontier.empty()) break;
  }
}

// Candidate linkers between two boundary sequences, enumerated once and
// evaluated lazily. Shared by the shortest and bc_match selection rules so a
// sweep can run every strategy without repeating agent work.
class LinkSearch {
 public:
  LinkSearch(const SliceSequence& left, const SliceSequence& right, const LinkEnv& env,
             const LinkOptions& opts, const std::vector<Slice>& linker_prefix,
             const std::vector<Slice>& linker_suffix)
      : left_(left), right_(right), env_(env), opts_(opts), prefix_(linker_prefix),
        suffix_(linker_suffix) {
    const NGramModel& model = env.models.ngram;
    std::vector<Slice> start_prior = detail::tail_prior(left.slices, model.order());
    std::vector<Slice> end_prior = detail::head_prior(right.slices, model.order());
    std::vector<Slice> filter_set;
    const std::vector<Slice>* filter = nullptr;
    if (opts.space == SearchSpace::linking_slices) {
      filter_set = linking_slice_set(env);
      filter = &filter_set;
    }
    connect_priors(start_prior, end_prior, model, filter, opts.max_depth, stats_,
                   [&](const std::vector<Slice>& m) {
                     if (static_cast<long>(candidates_.size()) >= opts_.node_budget) return false;
                     candidates_.push_back(m);
                     return true;
                   });
    verdicts_.assign(candidates_.size(), -1);
  }

  const std::vector<std::vector<Slice>>& candidates() const { return candidates_; }
  const SearchStats& stats() const { return stats_; }

  // BC distance of this candidate's full linker from the segment mean. The
  // zero-length linker is the segment mean by convention.
  double rmse_of(size_t i) const {
    const std::vector<Slice>& m = candidates_[i];
    if (prefix_.empty() && suffix_.empty() && m.empty()) return 0.0;
    SliceSequence linker{left_.orientation, prefix_};
    linker.slices.insert(linker.slices.end(), m.begin(), m.end());
    linker.slices.insert(linker.slices.end(), suffix_.begin(), suffix_.end());
    if (linker.slices.empty()) return 0.0;
    BCVector lbc = behavioral_characteristics(linker, env_.game);
    return linker_rmse(lbc, segment_bc_start(), segment_bc_end());
  }

  bool completable(size_t i) {
    if (verdicts_[i] < 0) {
      SliceSequence level = left_;
      const std::vector<Slice>& m = candidates_[i];
      level.slices.insert(level.slices.end(), m.begin(), m.end());
      level.slices.insert(level.slices.end(), right_.slices.begin(), right_.slices.end());
      verdicts_[i] = env_.completable(level) ? 1 : 0;
    }
    return verdicts_[i] == 1;
  }

  // First completable candidate in (length, lex) order.
  std::optional<size_t> pick_shortest() {
    for (size_t i = 0; i < candidates_.size(); ++i)
      if (completable(i)) return i;
    return std::nullopt;
  }

  // Completable candidate with minimal RMSE; ties favor the shorter, then
  // lexicographically smaller linker. `required` drops the empty candidate
  // and any candidate failing the required-slice predicate.
  std::optional<size_t> pick_bc_match(bool required) {
    std::vector<size_t> order(candidates_.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::vector<double> rmse(candidates_.size());
    for (size_t i = 0; i < candidates_.size(); ++i) rmse[i] = rmse_of(i);
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
      if (rmse[a] != rmse[b]) return rmse[a] < rmse[b];
      if (candidates_[a].size() != candidates_[b].size())
        return candidates_[a].size() < candidates_[b].size();
      return candidates_[a] < candidates_[b];
    });
    for (size_t i : order) {
      if (required) {
        if (candidates_[i].empty()) continue;
        if (!satisfies_required_predicate(candidates_[i])) continue;
      }
      if (completable(i)) return i;
    }
    return std::nullopt;
  }

  bool satisfies_required_predicate(const std::vector<Slice>& m) const {
    if (opts_.required_predicate == "contains-food") {
      for (const Slice& s : m)
        for (char t : s)
          if (env_.game.has_tag(t, tag_food)) return true;
      return false;
    }
    if (opts_.required_predicate.empty()) return true;
    fail(Errc::bad_config, "unknown required predicate '" + opts_.required_predicate + "'");
  }

 private:
  BCVector segment_bc_start() const {
    if (!bc_start_) bc_start_ = behavioral_characteristics(start_segment_view(), env_.game);
    return *bc_start_;
  }
  BCVector segment_bc_end() const {
    if (!bc_end_) bc_end_ = behavioral_characteristics(end_segment_view(), env_.game);
    return *bc_end_;
  }
  // left_ = start ++ prefix, right_ = suffix ++ end; peel the completions
  // back off for segment BCs.
  SliceSequence start_segment_view() const {
    SliceSequence s = left_;
    s.slices.resize(s.slices.size() - prefix_.size());
    return s;
  }
  SliceSequence end_segment_view() const {
    SliceSequence s = right_;
    s.slices.erase(s.slices.begin(), s.slices.begin() + static_cast<long>(suffix_.size()));
    return s;
  }

  SliceSequence left_, right_;
  const LinkEnv& env_;
  LinkOptions opts_;
  std::vector<Slice> prefix_, suffix_;
  std::vector<std::vector<Slice>> candidates_;
  std::vector<int> verdicts_;  // -1 unknown, 0 no, 1 yes
  SearchStats stats_;
  mutable std::optional<BCVector> bc_start_, bc_end_;
};

namespace detail {

struct LevelFlags {
  bool unbroken = false, generable = false, completable = false;
};

inline bool usable_flag(const LevelFlags& f, ReportingMode mode) {
  return mode == ReportingMode::paper1 ? (f.completable && f.generable)
                                       : (f.completable && f.unbroken);
}

inline LevelFlags evaluate_level(const SliceSequence& level, const LinkEnv& env,
                                 std::optional<bool> known_completable = std::nullopt) {
  LevelFlags f;
  f.unbroken = is_unbroken(level, env.game);
  f.generable = is_generable(level, env.models.ngram);
  f.completable = known_completable ? *known_completable : env.completable(level);
  return f;
}

// Forward-chain completions of the start boundary, first level enumerated,
// deeper levels resolved greedily to a fixed point (cap 4 per append).
inline std::vector<std::vector<Slice>> forward_completions(const SliceSequence& start,
                                                           const LinkEnv& env) {
  std::vector<std::vector<Slice>> firsts =
      enumerate_completions(env.models.forward, start.slices, env.game);
  std::vector<std::vector<Slice>> out;
  for (const std::vector<Slice>& first : firsts) {
    std::vector<Slice> boundary = start.slices;
    boundary.insert(boundary.end(), first.begin(), first.end());
    std::vector<Slice> total = first;
    bool stable = false;
    for (int iter = 0; iter < 4; ++iter) {
      std::vector<Slice> more = enumerate_completions(env.models.forward, boundary, env.game).front();
      if (more.empty()) {
        stable = true;
        break;
      }
      boundary.insert(boundary.end(), more.begin(), more.end());
      total.insert(total.end(), more.begin(), more.end());
    }
    if (stable) out.push_back(std::move(total));
  }
  return out;
}

// Back-chain completions of the end boundary, returned in play order (to be
// placed immediately before the end segment).
inline std::vector<std::vector<Slice>> backward_completions(const SliceSequence& end,
                                                            const LinkEnv& env) {
  std::vector<Slice> reversed(end.slices.rbegin(), end.slices.rend());
  SliceSequence rev{end.orientation, std::move(reversed)};
  std::vector<std::vector<Slice>> raw;
  {
    std::vector<std::vector<Slice>> firsts =
        enumerate_completions(env.models.backward, rev.slices, env.game);
    for (const std::vector<Slice>& first : firsts) {
      std::vector<Slice> boundary = rev.slices;
      boundary.insert(boundary.end(), first.begin(), first.end());
      std::vector<Slice> total = first;
      bool stable = false;
      for (int iter = 0; iter < 4; ++iter) {
        std::vector<Slice> more =
            enumerate_completions(env.models.backward, boundary, env.game).front();
        if (more.empty()) {
          stable = true;
          break;
        }
        boundary.insert(boundary.end(), more.begin(), more.end());
        total.insert(total.end(), more.begin(), more.end());
      }
      if (stable) raw.push_back(std::move(total));
    }
  }
  for (std::vector<Slice>& completion : raw) std::reverse(completion.begin(), completion.end());
  return raw;
}

inline SliceSequence assemble(const SliceSequence& start, const std::vector<Slice>& s,
                              const std::vector<Slice>& m, const std::vector<Slice>& e,
                              const SliceSequence& end) {
  SliceSequence level = start;
  level.slices.insert(level.slices.end(), s.begin(), s.end());
  level.slices.insert(level.slices.end(), m.begin(), m.end());
  level.slices.insert(level.slices.end(), e.begin(), e.end());
  level.slices.insert(level.slices.end(), end.slices.begin(), end.slices.end());
  return level;
}

}  // namespace detail

// Plain concatenation. Always produces the level; the flags record quality.
inline LinkResult null_link(const SliceSequence& start, const SliceSequence& end,
                            const LinkEnv& env, const LinkOptions& opts) {
  LinkResult r;
  r.status = LinkStatus::linked;
  SliceSequence level = concatenate(start, end);
  detail::LevelFlags f = detail::evaluate_level(level, env);
  r.unbroken = f.unbroken;
  r.generable = f.generable;
  r.completable = f.completable;
  r.usable = detail::usable_flag(f, opts.reporting);
  r.dbc = 0.0;  // linked and concatenated levels are identical
  return r;
}

// Strategy search between two boundaries with fixed structure completions.
// Returns nullopt when no candidate within depth is selected.
inline std::optional<LinkResult> strategy_search(const SliceSequence& start,
                                                 const SliceSequence& end,
                                                 const std::vector<Slice>& s,
                                                 const std::vector<Slice>& e, const LinkEnv& env,
                                                 const LinkOptions& opts, LinkSearch& search) {
  std::optional<size_t> pick;
  switch (opts.strategy) {
    case Strategy::shortest: pick = search.pick_shortest(); break;
    case Strategy::bc_match: pick = search.pick_bc_match(false); break;
    case Strategy::bc_match_required: pick = search.pick_bc_match(true); break;
    case Strategy::null_link: fail(Errc::bad_config, "null strategy has no search");
  }
  if (!pick) return std::nullopt;

  LinkResult r;
  r.status = LinkStatus::linked;
  r.linker = search.candidates()[*pick];
  r.structure_prefix = s;
  r.structure_suffix = e;
  r.nodes_expanded = search.stats().nodes;
  r.depth_reached = search.stats().depth_reached;
  r.rmse = search.rmse_of(*pick);

  SliceSequence level = detail::assemble(start, s, r.linker, e, end);
  detail::LevelFlags f = detail::evaluate_level(level, env, /*known_completable=*/true);
  r.unbroken = f.unbroken;
  r.generable = f.generable;
  r.completable = f.completable;
  r.usable = detail::usable_flag(f, opts.reporting);
  r.dbc = d_bc(concatenate(start, end), level, env.game);
  return r;
}

// The full linking algorithm: iterate forward-chain completions s of the
// start boundary and back-chain completions e of the end boundary, and run
// the strategy search between the priors of (start ++ s) and (e ++ end).
// The first success wins; the inserted slices are s ++ m ++ e.
inline LinkResult build_link(const SliceSequence& start, const SliceSequence& end,
                             const LinkEnv& env, const LinkOptions& opts) {
  if (opts.strategy == Strategy::null_link) return null_link(start, end, env, opts);

  LinkResult failure;
  failure.status = LinkStatus::no_link_found;

  std::vector<std::vector<Slice>> prefixes{{}}, suffixes{{}};
  if (opts.use_structure_chains) {
    try {
      prefixes = detail::forward_completions(start, env);
      suffixes = detail::backward_completions(end, env);
    } catch (const Error& e) {
      if (e.code() == Errc::unknown_structure) {
        failure.status = LinkStatus::structure_failure;
        return failure;
      }
      throw;
    }
    if (prefixes.empty() || suffixes.empty()) {
      failure.status = LinkStatus::structure_failure;
      return failure;
    }
  }

  long nodes = 0;
  for (const std::vector<Slice>& s : prefixes) {
    SliceSequence left = start;
    left.slices.insert(left.slices.end(), s.begin(), s.end());
    if (!s.empty() && !is_generable(left, env.models.ngram)) continue;
    for (const std::vector<Slice>& e : suffixes) {
      SliceSequence right{end.orientation, e};
      right.slices.insert(right.slices.end(), end.slices.begin(), end.slices.end());
      if (!e.empty() && !is_generable(right, env.models.ngram)) continue;

      LinkSearch search(left, right, env, opts, s, e);
      nodes += search.stats().nodes;
      std::optional<LinkResult> result = strategy_search(start, end, s, e, env, opts, search);
      if (result) {
        result->nodes_expanded = nodes;
        return *result;
      }
    }
  }
  failure.nodes_expanded = nodes;
  return failure;
}

// The inner strategy searches without structure completion, matching the
// earlier study's protocol.
inline LinkResult shortest_link(const SliceSequence& start, const SliceSequence& end,
                                const LinkEnv& env, LinkOptions opts) {
  opts.strategy = Strategy::shortest;
  opts.use_structure_chains = false;
  return build_link(start, end, env, opts);
}

inline LinkResult bc_match_link(const SliceSequence& start, const SliceSequence& end,
                                const LinkEnv& env, LinkOptions opts) {
  if (opts.strategy != Strategy::bc_match_required) opts.strategy = Strategy::bc_match;
  opts.use_structure_chains = false;
  return build_link(start, end, env, opts);
}

struct ChainOutcome {
  bool linkable = false;
  SliceSequence level;  // assembled only when linkable
  std::vector<LinkResult> per_pair;
  bool unbroken = false, generable = false, completable = false, usable = false;
};

// k-1 independent pairwise links; the level is linkable iff every pair
// links. The assembled level is then re-checked as a whole.
inline ChainOutcome chain_segments(const std::vector<SliceSequence>& segments, const LinkEnv& env,
                                   const LinkOptions& opts) {
  if (segments.size() < 2) fail(Errc::bad_config, "chain_segments needs at least 2 segments");
  ChainOutcome out;
  out.linkable = true;
  for (size_t i = 0; i + 1 < segments.size(); ++i) {
    LinkResult r = build_link(segments[i], segments[i + 1], env, opts);
    if (r.status != LinkStatus::linked) out.linkable = false;
    out.per_pair.push_back(std::move(r));
  }
  if (!out.linkable) return out;

  std::vector<SliceSequence> parts;
  for (size_t i = 0; i < segments.size(); ++i) {
    parts.push_back(segments[i]);
    if (i + 1 < segments.size())
      parts.push_back(SliceSequence{segments[i].orientation, out.per_pair[i].full_linker()});
  }
  out.level = concatenate(parts);
  detail::LevelFlags f = detail::evaluate_level(out.level, env);
  out.unbroken = f.unbroken;
  out.generable = f.generable;
  out.completable = f.completable;
  out.usable = detail::usable_flag(f, opts.reporting);
  return out;
}

inline nlohmann::json link_result_to_json(const LinkResult& r) {
  nlohmann::json j;
  j["schema"] = "seglink-linkresult-v1";
  j["status"] = to_string(r.status);
  j["linker"] = r.linker;
  j["structure_prefix"] = r.structure_prefix;
  j["structure_suffix"] = r.structure_suffix;
  j["linker_length"] = r.full_linker().size();
  j["unbroken"] = r.unbroken;
  j["generable"] = r.generable;
  j["completable"] = r.completable;
  j["usable"] = r.usable;
  if (r.rmse) j["rmse"] = *r.rmse;
  if (r.dbc) j["d_bc"] = *r.dbc;
  j["nodes_expanded"] = r.nodes_expanded;
  j["depth_reached"] = r.depth_reached;
  return j;
}

}  // namespace seglink
