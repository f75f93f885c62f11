#include <catch2/catch.hpp>

#include "helpers.hpp"

using namespace seglink;

TEST_CASE("structure-free corpus trains empty chains") {
  GameConfig cfg = testutil::load_config("mario");
  std::vector<SliceSequence> corpus{
      SliceSequence{cfg.orientation, std::vector<Slice>(8, "------------XX")}};
  auto [fwd, bwd] = train_structure_chains(corpus, cfg);
  CHECK(fwd.transitions.empty());
  CHECK(bwd.transitions.empty());
}

TEST_CASE("chain context is bounded by the widest structure") {
  Workspace dg = testutil::open_game("dungeongrams");
  CHECK(dg.models.forward.max_context == 4);
  Workspace mario = testutil::open_game("mario");
  CHECK(mario.models.forward.max_context == 2);
  Workspace icarus = testutil::open_game("icarus");
  CHECK(icarus.models.forward.max_context == 2);
  for (const auto& [key, completions] : dg.models.forward.transitions) {
    size_t run_len = 1 + std::count(key.begin(), key.end(), NGramModel::key_sep);
    CHECK(run_len <= 4);
  }
}

TEST_CASE("forward chain completes a cut pipe") {
  Workspace ws = testutil::open_game("mario");

  // find a training pipe and cut the level right after its left column
  const Slice* left = nullptr;
  for (const Slice& s : ws.models.ngram.vocabulary())
    if (s.find('<') != std::string::npos) {
      left = &s;
      break;
    }
  REQUIRE(left != nullptr);

  SliceSequence boundary{ws.config.orientation, {"------------XX", *left}};
  std::vector<Slice> completion = complete_structure(ws.models.forward, boundary, ws.config);
  REQUIRE_FALSE(completion.empty());
  CHECK(completion.front().find('>') != std::string::npos);

  SliceSequence joined = boundary;
  joined.slices.insert(joined.slices.end(), completion.begin(), completion.end());
  CHECK(is_unbroken(joined, ws.config));
}

TEST_CASE("complete boundary yields the empty completion") {
  Workspace ws = testutil::open_game("mario");
  SliceSequence flat{ws.config.orientation, {"------------XX", "------------XX"}};
  CHECK(complete_structure(ws.models.forward, flat, ws.config).empty());

  // a full pipe at the boundary is already complete
  const Slice* left = nullptr;
  const Slice* right = nullptr;
  for (const Slice& s : ws.models.ngram.vocabulary()) {
    if (s.find('<') != std::string::npos && !left) left = &s;
    if (s.find('>') != std::string::npos && !right) right = &s;
  }
  REQUIRE((left && right));
  SliceSequence full{ws.config.orientation, {"------------XX", *left, *right}};
  CHECK(complete_structure(ws.models.forward, full, ws.config).empty());
  SliceSequence again = full;
  again.slices.push_back("------------XX");
  CHECK(is_unbroken(again, ws.config));
}

TEST_CASE("unknown structure runs are reported") {
  Workspace ws = testutil::open_game("mario");
  // a never-seen pipe slice: cap at the very top row
  Slice weird = "<-------------";
  SliceSequence boundary{ws.config.orientation, {"------------XX", weird}};
  try {
    complete_structure(ws.models.forward, boundary, ws.config);
    FAIL("expected UnknownStructure");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::unknown_structure);
  }
}

TEST_CASE("back chain completes a leading cut in play order") {
  Workspace ws = testutil::open_game("mario");
  const Slice* right = nullptr;
  for (const Slice& s : ws.models.ngram.vocabulary())
    if (s.find('>') != std::string::npos) {
      right = &s;
      break;
    }
  REQUIRE(right != nullptr);

  // an end segment beginning with a pipe's right column
  std::vector<Slice> reversed{"------------XX", *right};
  std::vector<Slice> completion = enumerate_completions(ws.models.backward, reversed, ws.config).front();
  REQUIRE_FALSE(completion.empty());
  std::reverse(completion.begin(), completion.end());
  CHECK(completion.back().find('<') != std::string::npos);

  SliceSequence joined{ws.config.orientation, completion};
  joined.slices.push_back(*right);
  joined.slices.push_back("------------XX");
  CHECK(is_unbroken(joined, ws.config));
}

TEST_CASE("chains only emit training slices") {
  for (const char* game : {"mario", "icarus", "dungeongrams"}) {
    Workspace ws = testutil::open_game(game);
    for (const auto& [key, completions] : ws.models.forward.transitions)
      for (const auto& [completion, count] : completions) {
        CHECK(count > 0);
        for (const Slice& s : completion) CHECK(ws.models.ngram.vocabulary().count(s) == 1);
      }
  }
}

TEST_CASE("training prefix cut plus completion is locally unbroken") {
  Workspace ws = testutil::open_game("dungeongrams");
  const SliceSequence& level = ws.corpus.front();
  for (size_t cut = 2; cut + 1 < level.size(); cut += 3) {
    SliceSequence prefix = subsequence(level, 0, cut);
    std::vector<Slice> completion;
    try {
      completion = complete_structure(ws.models.forward, prefix, ws.config);
    } catch (const Error&) {
      continue;  // unknown run: not part of this property
    }
    SliceSequence joined = prefix;
    joined.slices.insert(joined.slices.end(), completion.begin(), completion.end());
    // the boundary window must have no violation
    size_t from = joined.size() > 8 ? joined.size() - 8 : 0;
    SliceSequence window = subsequence(joined, from, joined.size() - from);
    CHECK(is_unbroken(window, ws.config));
  }
}
