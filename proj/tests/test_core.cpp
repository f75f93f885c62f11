#include <catch2/catch.hpp>

#include <fstream>
#include <sstream>

#include "helpers.hpp"

using namespace seglink;
using testutil::data_dir;
using testutil::load_config;

TEST_CASE("parse_level transcribes text grids") {
  GameConfig cfg = load_config("mario");
  cfg.alphabet.clear();
  cfg.alphabet['-'] = tag_empty;
  cfg.alphabet['X'] = tag_solid;

  TileGrid g = parse_level("--\nXX", cfg);
  REQUIRE(g.width() == 2);
  REQUIRE(g.height() == 2);
  CHECK(g.at(0, 0) == '-');
  CHECK(g.at(0, 1) == 'X');

  SECTION("unknown tile") {
    try {
      parse_level("-?\nXX", cfg);
      FAIL("expected UnknownTile");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::unknown_tile);
    }
  }
  SECTION("ragged input") {
    try {
      parse_level("--\nXXX", cfg);
      FAIL("expected RaggedInput");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::ragged_input);
    }
  }
}

TEST_CASE("corpus level files parse with expected dimensions") {
  GameConfig cfg = load_config("mario");
  auto path = data_dir() / "corpus" / "mario" / "level01.txt";
  std::ifstream in(path);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  std::string text = ss.str();

  // independent dimension count from the raw text
  size_t first_line = text.find('\n');
  size_t lines = 0;
  for (size_t pos = 0; pos < text.size();) {
    size_t nl = text.find('\n', pos);
    if (nl == std::string::npos) break;
    ++lines;
    pos = nl + 1;
  }

  TileGrid g = parse_level(text, cfg);
  CHECK(g.height() == 14);
  CHECK(static_cast<size_t>(g.height()) == lines);
  CHECK(static_cast<size_t>(g.width()) == first_line);
}

TEST_CASE("to_slices orientation conventions") {
  GameConfig mario = load_config("mario");
  TileGrid g(3, 4, '-');
  g.at(0, 3) = 'X';
  g.at(2, 0) = 'X';
  SliceSequence cols = to_slices(g, mario);
  REQUIRE(cols.size() == 3);
  CHECK(cols.slices[0] == "---X");  // column 0 top to bottom
  CHECK(cols.slices[2] == "X---");

  GameConfig icarus = load_config("icarus");
  TileGrid g2(16, 5, '-');
  g2.at(0, 4) = '#';  // bottom-left corner
  SliceSequence rows = to_slices(g2, icarus);
  REQUIRE(rows.size() == 5);
  CHECK(rows.slices[0][0] == '#');  // slice 0 is the bottom row
}

TEST_CASE("slice round-trip is lossless on random grids") {
  Rng rng(99);
  const char tiles[] = {'-', 'X', 'E', 'o'};
  for (int trial = 0; trial < 100; ++trial) {
    int w = 1 + rng.below_int(12), h = 1 + rng.below_int(12);
    TileGrid g(w, h);
    for (int r = 0; r < h; ++r)
      for (int c = 0; c < w; ++c) g.at(c, r) = tiles[rng.below_int(4)];
    Orientation o = trial % 2 ? Orientation::columns_left_to_right : Orientation::rows_bottom_to_top;
    CHECK(to_grid(to_slices(g, o)) == g);
  }
}

TEST_CASE("corpus serialization round-trips byte for byte") {
  for (const char* game : {"mario", "icarus", "dungeongrams"}) {
    GameConfig cfg = load_config(game);
    for (const auto& entry : std::filesystem::directory_iterator(cfg.corpus_dir)) {
      if (entry.path().extension() != ".txt") continue;
      std::ifstream in(entry.path());
      std::stringstream ss;
      ss << in.rdbuf();
      TileGrid g = parse_level(ss.str(), cfg);
      SliceSequence seq = to_slices(g, cfg);
      CHECK(serialize_grid(to_grid(seq)) == ss.str());
    }
  }
}

TEST_CASE("concatenate adds lengths and respects identity") {
  SliceSequence a{Orientation::columns_left_to_right, std::vector<Slice>(25, "abc")};
  SliceSequence b{Orientation::columns_left_to_right, std::vector<Slice>(25, "xyz")};
  SliceSequence link{Orientation::columns_left_to_right, {"lll", "mmm", "nnn"}};
  SliceSequence empty;

  CHECK(concatenate(a, b).size() == 50);
  CHECK(concatenate({a, empty, b}) == concatenate(a, b));

  SliceSequence with_link = concatenate({a, link, b});
  REQUIRE(with_link.size() == 53);
  CHECK(with_link.slices[25] == "lll");
  CHECK(with_link.slices[27] == "nnn");

  SECTION("associativity") {
    CHECK(concatenate(concatenate(a, link), b) == concatenate(a, concatenate(link, b)));
  }
  SECTION("mixed orientation rejected") {
    SliceSequence rows{Orientation::rows_bottom_to_top, {"abc"}};
    try {
      concatenate(a, rows);
      FAIL("expected MixedOrientation");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::mixed_orientation);
    }
  }
}

TEST_CASE("pad_level adds padding on both sides") {
  GameConfig cfg = load_config("mario");
  SliceSequence seg{cfg.orientation, std::vector<Slice>(25, std::string(14, '-'))};
  SliceSequence padded = pad_level(seg, cfg);
  CHECK(padded.size() == 31);
  CHECK(padded.slices[3] == seg.slices[0]);

  SliceSequence empty{cfg.orientation, {}};
  CHECK(pad_level(empty, cfg).size() == 6);
}

TEST_CASE("find_broken_structures on pipes") {
  GameConfig cfg = load_config("mario");
  auto parse = [&](const std::string& t) { return parse_level(t, cfg); };

  // complete 2-wide pipe
  TileGrid ok = parse(
      "------\n"
      "-<>---\n"
      "-[]---\n"
      "XXXXXX\n");
  CHECK(find_broken_structures(ok, cfg).empty());

  // pipe cut vertically, only the left column remains
  TileGrid cut = parse(
      "------\n"
      "-<----\n"
      "-[----\n"
      "XXXXXX\n");
  auto broken = find_broken_structures(cut, cfg);
  REQUIRE(broken.size() == 1);
  CHECK(broken[0].shape_id == "pipe");
  CHECK(broken[0].col == 1);

  // headless pipe (no cap)
  TileGrid headless = parse(
      "------\n"
      "-[]---\n"
      "-[]---\n"
      "XXXXXX\n");
  CHECK(find_broken_structures(headless, cfg).size() == 1);
}

TEST_CASE("door and block structures") {
  GameConfig icarus = load_config("icarus");
  TileGrid door(16, 4, '-');
  door.at(3, 1) = 'D';
  door.at(3, 2) = 'D';
  CHECK(find_broken_structures(door, icarus).empty());
  door.at(3, 3) = 'D';  // three tall: malformed
  CHECK(find_broken_structures(door, icarus).size() == 1);

  GameConfig dg = load_config("dungeongrams");
  TileGrid block(8, 8, '-');
  for (int c = 2; c < 6; ++c)
    for (int r = 2; r < 4; ++r) block.at(c, r) = 'O';
  CHECK(find_broken_structures(block, dg).empty());
  block.at(5, 3) = '-';  // missing corner
  CHECK(find_broken_structures(block, dg).size() == 1);
}

TEST_CASE("training corpora contain no broken structures") {
  for (const char* game : {"mario", "icarus", "dungeongrams"}) {
    Workspace ws = testutil::open_game(game);
    for (const SliceSequence& level : ws.corpus) CHECK(is_unbroken(level, ws.config));
  }
}

TEST_CASE("structure-free sequences are unbroken") {
  Workspace ws = testutil::open_game("mario");
  Rng rng(5);
  std::vector<Slice> safe;
  for (const Slice& s : ws.models.ngram.vocabulary())
    if (!ws.config.slice_has_structure_tile(s)) safe.push_back(s);
  for (int trial = 0; trial < 20; ++trial) {
    SliceSequence seq;
    seq.orientation = ws.config.orientation;
    for (int i = 0; i < 12; ++i) seq.slices.push_back(safe[rng.below(safe.size())]);
    CHECK(is_unbroken(seq, ws.config));
  }
}
