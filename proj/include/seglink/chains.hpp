#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "seglink/core.hpp"
#include "seglink/error.hpp"
#include "seglink/game.hpp"
#include "seglink/ngram.hpp"

namespace seglink {

// Markov chain over runs of structure-bearing slices, used to finish
// structures cut at a segment boundary. Keys are contiguous sub-runs of at
// most max_context slices; values are the runs that completed them in
// training, read to the end of the maximal run.
struct StructureChain {
  enum class Direction { forward, backward };

  Direction direction = Direction::forward;
  int max_context = 1;
  // key run (joined) -> completion run -> count
  std::map<std::string, std::map<std::vector<Slice>, int>> transitions;

  bool has_key(std::span<const Slice> run) const {
    return transitions.count(NGramModel::key_of(run)) != 0;
  }
};

namespace detail {

inline void train_chain_on_sequence(StructureChain& chain, const std::vector<Slice>& slices,
                                    const GameConfig& config) {
  size_t i = 0;
  const size_t n = slices.size();
  while (i < n) {
    if (!config.slice_has_structure_tile(slices[i])) {
      ++i;
      continue;
    }
    size_t j = i;
    while (j < n && config.slice_has_structure_tile(slices[j])) ++j;
    // maximal run [i, j)
    for (size_t a = i; a < j; ++a) {
      for (size_t len = 1; len <= static_cast<size_t>(chain.max_context) && a + len <= j; ++len) {
        std::span<const Slice> key(slices.data() + a, len);
        std::vector<Slice> completion(slices.begin() + static_cast<long>(a + len),
                                      slices.begin() + static_cast<long>(j));
        chain.transitions[NGramModel::key_of(key)][completion] += 1;
      }
    }
    i = j;
  }
}

// Trailing maximal run of structure-bearing slices, clipped to max_context.
inline std::vector<Slice> trailing_structure_run(const std::vector<Slice>& slices,
                                                 const GameConfig& config, int max_context) {
  size_t len = 0;
  while (len < slices.size() &&
         config.slice_has_structure_tile(slices[slices.size() - 1 - len]))
    ++len;
  len = std::min(len, static_cast<size_t>(max_context));
  return std::vector<Slice>(slices.end() - static_cast<long>(len), slices.end());
}

}  // namespace detail

// The forward chain reads the corpus in play direction and completes
// structures cut at the end of a starting segment; the back chain reads in
// reverse and completes structures cut at the beginning of an end segment.
inline std::pair<StructureChain, StructureChain> train_structure_chains(
    const std::vector<SliceSequence>& corpus, const GameConfig& config) {
  StructureChain forward, backward;
  forward.direction = StructureChain::Direction::forward;
  backward.direction = StructureChain::Direction::backward;
  forward.max_context = backward.max_context = config.max_structure_extent();
  for (const SliceSequence& seq : corpus) {
    detail::train_chain_on_sequence(forward, seq.slices, config);
    std::vector<Slice> reversed(seq.slices.rbegin(), seq.slices.rend());
    detail::train_chain_on_sequence(backward, reversed, config);
  }
  return {std::move(forward), std::move(backward)};
}

// All trained completions for the boundary's trailing structure run, best
// first (longest matching context; highest count, then lexicographic). The
// boundary must already be oriented in chain direction (reversed slices for
// the back chain). Returns {{}} when the boundary ends structure-free, and
// throws UnknownStructure when structure tiles are present but the chain has
// never seen the run.
inline std::vector<std::vector<Slice>> enumerate_completions(const StructureChain& chain,
                                                             const std::vector<Slice>& boundary,
                                                             const GameConfig& config) {
  std::vector<Slice> run = detail::trailing_structure_run(boundary, config, chain.max_context);
  if (run.empty()) return {{}};

  // Grow the context slice by slice while the chain knows it.
  size_t best_len = 0;
  for (size_t len = 1; len <= run.size(); ++len) {
    std::span<const Slice> key(run.data() + (run.size() - len), len);
    if (!chain.has_key(key)) break;
    best_len = len;
  }
  if (best_len == 0)
    fail(Errc::unknown_structure, "no chain entry for boundary structure run");

  std::span<const Slice> key(run.data() + (run.size() - best_len), best_len);
  const auto& completions = chain.transitions.at(NGramModel::key_of(key));
  std::vector<std::pair<std::vector<Slice>, int>> ranked(completions.begin(), completions.end());
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<std::vector<Slice>> out;
  out.reserve(ranked.size());
  for (auto& [completion, count] : ranked) out.push_back(std::move(completion));
  return out;
}

// Single best completion (the head of the enumeration). Back-chain output is
// produced in chain direction; callers re-reverse it into play order.
inline std::vector<Slice> complete_structure(const StructureChain& chain,
                                             const SliceSequence& boundary,
                                             const GameConfig& config) {
  return enumerate_completions(chain, boundary.slices, config).front();
}

}  // namespace seglink
