// Command line front end: model training/caching, segment synthesis, single
// links, and the three experiment runners with CSV/JSON reports.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "seglink/seglink.hpp"

namespace fs = std::filesystem;
using namespace seglink;

namespace {

struct GlobalArgs {
  std::string game_config;
  uint64_t seed = 1;
  int depth = -1;  // -1 = per-config
  std::string strategy = "all";
  std::string out_dir;
  int jobs = 1;
  std::string format = "csv";
  std::string depth_preset = "paper2";
  int segment_count = 60;
  std::string segments_dir;
};

std::vector<Strategy> parse_strategies(const std::string& s, bool roguelike) {
  if (s == "all") {
    std::vector<Strategy> all{Strategy::null_link, Strategy::shortest, Strategy::bc_match};
    if (roguelike) all.push_back(Strategy::bc_match_required);
    return all;
  }
  std::vector<Strategy> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(strategy_from_string(tok));
  return out;
}

LinkOptions options_for(const GlobalArgs& args, const GameConfig& config, Strategy strategy) {
  LinkOptions opts = args.depth_preset == "paper1" ? paper1_options(strategy)
                                                   : paper2_options(strategy, config);
  if (args.depth >= 0) opts.max_depth = args.depth;
  return opts;
}

fs::path cache_dir() {
  if (const char* env = std::getenv("SEGLINK_CACHE")) return env;
  return fs::temp_directory_path() / "seglink-cache";
}

SegmentCorpus obtain_segments(const Workspace& ws, const GlobalArgs& args) {
  if (!args.segments_dir.empty()) return load_segment_corpus(args.segments_dir, ws.config);
  return sample_segment_corpus(ws, args.segment_count, args.seed);
}

void write_file(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << content;
}

int run_train(const GlobalArgs& args) {
  Workspace ws = Workspace::open(args.game_config);
  nlohmann::json j = ws.models.ngram.to_json();
  fs::path out = args.out_dir.empty() ? cache_dir() / (ws.config.name + "-ngram.json")
                                      : fs::path(args.out_dir) / (ws.config.name + "-ngram.json");
  write_file(out, j.dump(2) + "\n");
  std::cout << "trained order-" << ws.models.ngram.order() << " model on " << ws.corpus.size()
            << " levels; " << ws.models.ngram.successors().size() << " contexts -> " << out
            << "\n";
  return 0;
}

int run_segments(const GlobalArgs& args) {
  Workspace ws = Workspace::open(args.game_config);
  SegmentCorpus segments = sample_segment_corpus(ws, args.segment_count, args.seed);
  fs::path dir = args.out_dir.empty() ? fs::path("segments-" + ws.config.name) : fs::path(args.out_dir);
  fs::create_directories(dir);
  nlohmann::json index = nlohmann::json::array();
  for (const SegmentInfo& info : segments) {
    write_file(dir / (info.id + ".txt"), serialize_grid(to_grid(info.seq)));
    nlohmann::json ji;
    ji["id"] = info.id;
    ji["bc"] = {info.bc[0], info.bc[1]};
    index.push_back(std::move(ji));
  }
  write_file(dir / "index.json", index.dump(2) + "\n");
  std::cout << "wrote " << segments.size() << " segments to " << dir << "\n";
  return 0;
}

int run_link(const GlobalArgs& args, const std::string& a_path, const std::string& b_path,
             const std::string& render_path) {
  Workspace ws = Workspace::open(args.game_config);
  SliceSequence a = to_slices(load_level_file(a_path, ws.config), ws.config);
  SliceSequence b = to_slices(load_level_file(b_path, ws.config), ws.config);
  LinkEnv env = ws.env();

  nlohmann::json out = nlohmann::json::object();
  for (Strategy strategy : parse_strategies(args.strategy == "all" ? "all" : args.strategy,
                                            ws.config.agent.kind == AgentParams::Kind::roguelike)) {
    LinkResult r = build_link(a, b, env, options_for(args, ws.config, strategy));
    out[to_string(strategy)] = link_result_to_json(r);
    if (!render_path.empty() && r.status == LinkStatus::linked) {
      std::vector<Slice> link = r.full_linker();
      SliceSequence level = concatenate({a, SliceSequence{a.orientation, link}, b});
      SliceSequence padded = pad_level(level, ws.config);
      AgentResult agent = agent_check(padded, ws.config);
      RenderAnnotations ann;
      ann.pad_start = static_cast<int>(ws.config.padding_start.size());
      ann.pad_end = static_cast<int>(ws.config.padding_end.size());
      int first = ann.pad_start + static_cast<int>(a.size());
      if (!link.empty())
        ann.linker_extents.push_back({first, first + static_cast<int>(link.size()) - 1});
      ann.path = &agent.path;
      write_file(render_path + "." + to_string(strategy) + ".svg",
                 render_svg(padded, ws.config, ann));
    }
  }
  std::cout << out.dump(2) << "\n";
  return 0;
}

int run_sweep(const GlobalArgs& args, const std::string& pairing, size_t max_pairs) {
  Workspace ws = Workspace::open(args.game_config);
  SegmentCorpus segments = obtain_segments(ws, args);
  PairingMode mode = pairing == "all" ? PairingMode::all_pairs : PairingMode::bc_neighbor;
  auto pairs = select_pairs(segments, mode, ws.config.bc_bin_size, max_pairs, 2000);
  std::vector<Strategy> strategies =
      parse_strategies(args.strategy, ws.config.agent.kind == AgentParams::Kind::roguelike);

  SweepReport report = run_pairwise_sweep(
      ws, segments, strategies, options_for(args, ws.config, Strategy::shortest), pairs, args.jobs);
  report.pairing_mode = to_string(mode);

  fs::path dir = args.out_dir.empty() ? fs::path("sweep-" + ws.config.name) : fs::path(args.out_dir);
  fs::create_directories(dir);
  std::ostringstream csv;
  write_pairs_csv(report, segments, csv);
  write_file(dir / "pairs.csv", csv.str());
  write_file(dir / "summary.json", sweep_summary_json(report).dump(2) + "\n");
  std::cout << (args.format == "csv" ? csv.str() : sweep_summary_json(report).dump(2) + "\n");
  return 0;
}

int run_chain(const GlobalArgs& args, int k, int trials) {
  Workspace ws = Workspace::open(args.game_config);
  SegmentCorpus segments = obtain_segments(ws, args);
  std::vector<Strategy> strategies =
      parse_strategies(args.strategy, ws.config.agent.kind == AgentParams::Kind::roguelike);
  GlobalArgs a1 = args;
  if (a1.depth_preset.empty()) a1.depth_preset = "paper1";
  ChainReport report = run_k_segment_experiment(
      ws, segments, k, trials, args.seed, strategies,
      options_for(a1, ws.config, Strategy::shortest), args.jobs);

  fs::path dir = args.out_dir.empty() ? fs::path("chain-" + ws.config.name) : fs::path(args.out_dir);
  fs::create_directories(dir);
  std::ostringstream csv;
  write_chain_csv(report, csv);
  write_file(dir / "trials.csv", csv.str());
  write_file(dir / "summary.json", chain_summary_json(report).dump(2) + "\n");
  std::cout << (args.format == "csv" ? csv.str() : chain_summary_json(report).dump(2) + "\n");
  return 0;
}

int run_usability(const GlobalArgs& args, int k, int trials) {
  Workspace ws = Workspace::open(args.game_config);
  SegmentCorpus segments = obtain_segments(ws, args);
  const bool roguelike = ws.config.agent.kind == AgentParams::Kind::roguelike;

  nlohmann::json out = nlohmann::json::object();
  fs::path dir = args.out_dir.empty() ? fs::path("usability-" + ws.config.name) : fs::path(args.out_dir);
  fs::create_directories(dir);

  UsabilityReport plain = run_multi_segment_usability(ws, segments, k, trials, args.seed,
                                                      Strategy::bc_match, false, args.jobs);
  out["plain"] = usability_summary_json(plain);
  std::ostringstream csv;
  write_usability_csv(plain, csv);
  if (roguelike) {
    UsabilityReport food = run_multi_segment_usability(ws, segments, k, trials, args.seed,
                                                       Strategy::bc_match_required, true, args.jobs);
    out["require_food"] = usability_summary_json(food);
    write_usability_csv(food, csv);
  }
  write_file(dir / "trials.csv", csv.str());
  write_file(dir / "summary.json", out.dump(2) + "\n");
  std::cout << out.dump(2) << "\n";
  return 0;
}

int run_render(const GlobalArgs& args, const std::string& level_path, const std::string& svg_path,
               bool with_path) {
  Workspace ws = Workspace::open(args.game_config);
  SliceSequence level = to_slices(load_level_file(level_path, ws.config), ws.config);
  SliceSequence padded = pad_level(level, ws.config);
  RenderAnnotations ann;
  ann.pad_start = static_cast<int>(ws.config.padding_start.size());
  ann.pad_end = static_cast<int>(ws.config.padding_end.size());
  AgentResult agent;
  if (with_path) {
    agent = agent_check(padded, ws.config);
    ann.path = &agent.path;
  }
  std::cout << render_text(level);
  if (!svg_path.empty()) write_file(svg_path, render_svg(padded, ws.config, ann));
  return 0;
}

int run_stats(const GlobalArgs& args) {
  Workspace ws = Workspace::open(args.game_config);
  SegmentCorpus segments = obtain_segments(ws, args);
  std::vector<Strategy> strategies =
      parse_strategies(args.strategy, ws.config.agent.kind == AgentParams::Kind::roguelike);
  PairingMode mode = PairingMode::bc_neighbor;
  auto pairs = select_pairs(segments, mode, ws.config.bc_bin_size, 20000, 2000);
  SweepReport report = run_pairwise_sweep(
      ws, segments, strategies, options_for(args, ws.config, Strategy::shortest), pairs, args.jobs);
  report.pairing_mode = to_string(mode);
  nlohmann::json out = nlohmann::json::array();
  for (Strategy s : strategies) {
    if (s == Strategy::null_link) continue;
    out.push_back(link_stats_json(report, s));
  }
  std::cout << out.dump(2) << "\n";
  if (!args.out_dir.empty()) {
    fs::create_directories(args.out_dir);
    write_file(fs::path(args.out_dir) / "stats.json", out.dump(2) + "\n");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"seglink: link level segments with n-gram tree search"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand

  GlobalArgs args;
  app.add_option("--game", args.game_config, "game config JSON")->required();
  app.add_option("--seed", args.seed, "experiment seed");
  app.add_option("--depth", args.depth, "override link search max depth");
  app.add_option("--strategy", args.strategy, "null,shortest,bc_match,bc_match_required or 'all'");
  app.add_option("--out", args.out_dir, "output directory");
  app.add_option("--jobs", args.jobs, "worker threads");
  app.add_option("--format", args.format, "csv or json (reports always write both)");
  app.add_option("--depth-preset", args.depth_preset, "paper1 (depth 6, full n-gram) or paper2");
  app.add_option("--segments", args.segments_dir, "ingest segment directory instead of sampling");
  app.add_option("--segment-count", args.segment_count, "segments to sample when synthesizing");

  auto* train = app.add_subcommand("train", "train and cache the n-gram model");
  auto* segments = app.add_subcommand("segments", "sample a segment corpus to disk");

  std::string link_a, link_b, link_render;
  auto* link = app.add_subcommand("link", "link one segment pair, print LinkResult JSON");
  link->add_option("a", link_a, "start segment file")->required();
  link->add_option("b", link_b, "end segment file")->required();
  link->add_option("--render", link_render, "SVG output basename");

  std::string pairing = "bc-neighbor";
  size_t max_pairs = 20000;
  auto* sweep = app.add_subcommand("sweep", "pairwise sweep over segment pairs");
  sweep->add_option("--pairing", pairing, "bc-neighbor or all");
  sweep->add_option("--max-pairs", max_pairs, "pair budget");

  int k = 3, trials = 1000;
  auto* chain = app.add_subcommand("chain", "random k-segment chaining experiment");
  chain->add_option("--k", k, "segments per level");
  chain->add_option("--trials", trials, "number of levels");

  auto* usability = app.add_subcommand("usability", "multi-segment usability experiment");
  usability->add_option("--k", k, "segments per level");
  usability->add_option("--trials", trials, "number of levels");

  std::string render_level_path, render_svg_path;
  bool render_with_path = false;
  auto* render = app.add_subcommand("render", "render a level as text and SVG");
  render->add_option("level", render_level_path, "level file")->required();
  render->add_option("--svg", render_svg_path, "SVG output path");
  render->add_flag("--path", render_with_path, "overlay the agent path");

  auto* stats = app.add_subcommand("stats", "linker length and D_BC statistics");

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand(train)) return run_train(args);
    if (app.got_subcommand(segments)) return run_segments(args);
    if (app.got_subcommand(link)) return run_link(args, link_a, link_b, link_render);
    if (app.got_subcommand(sweep)) return run_sweep(args, pairing, max_pairs);
    if (app.got_subcommand(chain)) return run_chain(args, k, trials);
    if (app.got_subcommand(usability)) return run_usability(args, k, trials);
    if (app.got_subcommand(render))
      return run_render(args, render_level_path, render_svg_path, render_with_path);
    if (app.got_subcommand(stats)) return run_stats(args);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
