#pragma once

#include <functional>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "seglink/core.hpp"
#include "seglink/error.hpp"
#include "seglink/rng.hpp"

namespace seglink {

// Order-n successor model over slices. Priors (the n-1 slices before) key a
// count map of observed next slices. Everything is stored in ordered maps so
// iteration, and therefore every search built on top, is reproducible
// without seeding.
class NGramModel {
 public:
  using Prior = std::vector<Slice>;
  using SuccessorCounts = std::map<Slice, int>;

  NGramModel() = default;
  explicit NGramModel(int order) : order_(order) {}

  int order() const { return order_; }
  const std::map<std::string, SuccessorCounts>& successors() const { return successors_; }
  const std::set<Slice>& vocabulary() const { return vocabulary_; }

  // Priors are joined on a separator that cannot occur in tile codes.
  static constexpr char key_sep = '\x1f';

  static std::string key_of(std::span<const Slice> prior) {
    std::string key;
    for (size_t i = 0; i < prior.size(); ++i) {
      if (i) key.push_back(key_sep);
      key += prior[i];
    }
    return key;
  }

  void observe(std::span<const Slice> prior, const Slice& next) {
    successors_[key_of(prior)][next] += 1;
    for (const Slice& s : prior) vocabulary_.insert(s);
    vocabulary_.insert(next);
  }

  const SuccessorCounts& successors_of(std::span<const Slice> prior) const {
    return successors_of_key(key_of(prior));
  }

  const SuccessorCounts& successors_of_key(const std::string& key) const {
    static const SuccessorCounts none;
    auto it = successors_.find(key);
    return it == successors_.end() ? none : it->second;
  }

  bool has_window(std::span<const Slice> prior, const Slice& next) const {
    const SuccessorCounts& sc = successors_of(prior);
    return sc.count(next) != 0;
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["schema"] = "seglink-ngram-v1";
    j["order"] = order_;
    nlohmann::json succ = nlohmann::json::object();
    for (const auto& [key, counts] : successors_) {
      nlohmann::json c = nlohmann::json::object();
      for (const auto& [next, n] : counts) c[next] = n;
      succ[key] = std::move(c);
    }
    j["successors"] = std::move(succ);
    return j;
  }

  static NGramModel from_json(const nlohmann::json& j) {
    if (j.value("schema", "") != "seglink-ngram-v1") fail(Errc::bad_config, "unknown model schema");
    NGramModel model(j.at("order").get<int>());
    for (auto& [key, counts] : j.at("successors").items()) {
      for (auto& [next, n] : counts.items()) {
        model.successors_[key][next] = n.get<int>();
        model.vocabulary_.insert(next);
      }
      size_t pos = 0;
      while (pos <= key.size()) {
        size_t sep = key.find(key_sep, pos);
        if (sep == std::string::npos) {
          model.vocabulary_.insert(key.substr(pos));
          break;
        }
        model.vocabulary_.insert(key.substr(pos, sep - pos));
        pos = sep + 1;
      }
    }
    return model;
  }

 private:
  int order_ = 2;
  std::map<std::string, SuccessorCounts> successors_;
  std::set<Slice> vocabulary_;
};

inline NGramModel train_ngram(const std::vector<SliceSequence>& corpus, int order) {
  if (order < 2) fail(Errc::bad_config, "order must be >= 2");
  NGramModel model(order);
  for (const SliceSequence& seq : corpus) {
    if (static_cast<int>(seq.size()) < order)
      fail(Errc::corpus_too_short, "sequence of length " + std::to_string(seq.size()) +
                                       " is shorter than order " + std::to_string(order));
    for (size_t i = 0; i + order <= seq.size(); ++i) {
      std::span<const Slice> prior(seq.slices.data() + i, static_cast<size_t>(order - 1));
      model.observe(prior, seq.slices[i + order - 1]);
    }
  }
  return model;
}

// True iff every length-n window of the sequence was seen in training.
inline bool is_generable(const SliceSequence& seq, const NGramModel& model) {
  const int n = model.order();
  if (static_cast<int>(seq.size()) < n)
    fail(Errc::sequence_too_short, "sequence shorter than model order");
  for (size_t i = 0; i + n <= seq.size(); ++i) {
    std::span<const Slice> prior(seq.slices.data() + i, static_cast<size_t>(n - 1));
    if (!model.has_window(prior, seq.slices[i + n - 1])) return false;
  }
  return true;
}

using SegmentAccept = std::function<bool(const SliceSequence&)>;

// Seeded random walk through the model. Starts at a uniformly chosen
// observed prior, extends by count-weighted successor draws, and retries
// until `accept` (typically an agent completability hook) passes or the
// budget runs out. Output is generable by construction.
inline SliceSequence sample_segment(const NGramModel& model, Orientation orientation, int length,
                                    uint64_t seed, const SegmentAccept& accept,
                                    int retry_budget = 500) {
  if (length < model.order()) fail(Errc::bad_config, "segment length below model order");
  if (model.successors().empty()) fail(Errc::exhausted, "empty model");
  Rng rng(seed);
  long total_windows = 0;
  for (const auto& [key, succ] : model.successors())
    for (const auto& [s, n] : succ) total_windows += n;
  for (int attempt = 0; attempt < retry_budget; ++attempt) {
    SliceSequence seq;
    seq.orientation = orientation;

    // Start prior drawn by observed frequency, so openings look like the
    // training distribution rather than the key set.
    long pick_start = static_cast<long>(rng.below(static_cast<uint64_t>(total_windows)));
    auto it = model.successors().begin();
    for (; it != model.successors().end(); ++it) {
      long mass = 0;
      for (const auto& [s, n] : it->second) mass += n;
      if (pick_start < mass) break;
      pick_start -= mass;
    }
    {
      const std::string& key = it->first;
      size_t pos = 0;
      while (true) {
        size_t sep = key.find(NGramModel::key_sep, pos);
        if (sep == std::string::npos) {
          seq.slices.push_back(key.substr(pos));
          break;
        }
        seq.slices.push_back(key.substr(pos, sep - pos));
        pos = sep + 1;
      }
    }

    bool dead_end = false;
    while (static_cast<int>(seq.size()) < length) {
      std::span<const Slice> prior(seq.slices.data() + seq.size() - (model.order() - 1),
                                   static_cast<size_t>(model.order() - 1));
      const auto& succ = model.successors_of(prior);
      if (succ.empty()) {
        dead_end = true;
        break;
      }
      int total = 0;
      for (const auto& [s, n] : succ) total += n;
      int pick = rng.below_int(total);
      for (const auto& [s, n] : succ) {
        pick -= n;
        if (pick < 0) {
          seq.slices.push_back(s);
          break;
        }
      }
    }
    if (dead_end) continue;
    if (!accept || accept(seq)) return seq;
  }
  fail(Errc::exhausted, "no acceptable segment within retry budget");
}

}  // namespace seglink
