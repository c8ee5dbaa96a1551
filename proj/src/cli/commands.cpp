#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "cli_common.hpp"
#include "cne/cli.hpp"
#include "cne/evaluation.hpp"
#include "cne/io.hpp"

#ifndef CNE_DEFAULT_DATA_DIR
#define CNE_DEFAULT_DATA_DIR "data"
#endif

namespace cne::cli {

namespace fs = std::filesystem;

fs::path data_dir() {
  if (const char* env = std::getenv("CNE_DATA_DIR"); env && *env) return env;
  return CNE_DEFAULT_DATA_DIR;
}

fs::path resolve_graph_path(const std::string& path) {
  if (fs::exists(path)) return path;
  if (path.find('/') == std::string::npos) {
    const auto candidate = data_dir() / (path + ".edgelist");
    if (fs::exists(candidate)) return candidate;
  }
  throw FileError("cannot open graph file: " + path);
}

namespace detail {

void add_embed_flags(CLI::App& cmd, EmbedFlags& f) {
  cmd.add_option("--dim", f.cfg.dim, "embedding dimension")->capture_default_str();
  cmd.add_option("--sigma1", f.cfg.sigma1, "half-normal scale for linked pairs")
      ->capture_default_str();
  cmd.add_option("--sigma2", f.cfg.sigma2, "half-normal scale for unlinked pairs")
      ->capture_default_str();
  cmd.add_option("--lr", f.cfg.learning_rate, "initial step size")->capture_default_str();
  cmd.add_option("--max-iter", f.cfg.max_iter, "iteration cap")->capture_default_str();
  cmd.add_option("--ftol", f.cfg.ftol, "relative objective tolerance")->capture_default_str();
  cmd.add_option("--seed", f.cfg.seed, "initialization seed")->capture_default_str();
  cmd.add_option("--prior", f.prior, "prior link probability (default: graph density)");
  cmd.add_option("--format", f.format, "edge-list format: auto, ws, comma")
      ->check(CLI::IsMember({"auto", "ws", "comma"}))
      ->capture_default_str();
  cmd.add_flag("--lcc", f.lcc, "keep only the largest connected component");
  cmd.add_option("--threads", f.threads, "worker threads")->check(CLI::PositiveNumber)
      ->capture_default_str();
}

EmbeddingConfig EmbedFlags::config() const {
  EmbeddingConfig c = cfg;
  if (prior) c.prior_pi = *prior;
  return c;
}

LoadedInput load_input(const std::string& arg, const EmbedFlags& f, std::ostream& err) {
  LoadedInput in;
  in.path = resolve_graph_path(arg);
  const auto fmt = f.format == "ws"      ? EdgeListFormat::Whitespace
                   : f.format == "comma" ? EdgeListFormat::Comma
                                         : EdgeListFormat::Auto;
  auto loaded = load_edge_list_file(in.path.string(), fmt);
  const auto& rep = loaded.report;
  if (rep.duplicates_dropped || rep.self_loops_dropped)
    err << "note: dropped " << rep.duplicates_dropped << " duplicate edges and "
        << rep.self_loops_dropped << " self-loops\n";
  in.graph = std::move(loaded.graph);
  if (f.lcc) {
    const auto before = in.graph.num_nodes();
    in.graph = largest_connected_component(in.graph);
    if (in.graph.num_nodes() != before)
      err << "note: kept the largest component (" << in.graph.num_nodes() << " of " << before
          << " nodes)\n";
  }
  in.hash = io::hash_file(in.path);
  return in;
}

io::RunManifest start_manifest(const std::string& command, int argc, const char* const* argv,
                               const LoadedInput* in, const EmbeddingConfig* cfg) {
  io::RunManifest m;
  m.command = command;
  for (int a = 0; a < argc; ++a) m.argv.emplace_back(argv[a]);
  if (in) {
    m.dataset_path = in->path.string();
    m.dataset_hash = in->hash;
  }
  if (cfg) {
    m.config["dim"] = std::to_string(cfg->dim);
    m.config["sigma1"] = io::format_double(cfg->sigma1);
    m.config["sigma2"] = io::format_double(cfg->sigma2);
    m.config["gamma"] = io::format_double(cfg->gamma());
    m.config["prior_pi"] = cfg->prior_pi ? io::format_double(*cfg->prior_pi) : "density";
    m.config["learning_rate"] = io::format_double(cfg->learning_rate);
    m.config["max_iter"] = std::to_string(cfg->max_iter);
    m.config["ftol"] = io::format_double(cfg->ftol);
    m.seed = cfg->seed;
  }
  m.config["kernel"] = std::string(kernels::active().name);
  m.tool_version = kToolVersion;
  m.started_at = io::utc_timestamp();
  return m;
}

void write_output(const fs::path& dir, const std::string& name, const std::string& contents,
                  io::RunManifest& m) {
  io::write_file(dir / name, contents);
  m.outputs.push_back((dir / name).string());
}

void finish_manifest(const fs::path& dir, io::RunManifest& m) {
  m.finished_at = io::utc_timestamp();
  std::ostringstream os;
  io::write_manifest_json(os, m);
  io::write_file(dir / "manifest.json", os.str());
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw FileError("cannot create output directory: " + dir.string());
}

}  // namespace detail

namespace {

using namespace detail;

void print_diagnostics(std::ostream& out, const EmbedResult& r) {
  const auto& d = r.diagnostics;
  out << "embedding: " << r.coords.num_nodes() << " nodes, d=" << r.coords.dim()
      << ", iterations=" << d.iterations << ", objective=" << io::format_double(d.final_objective)
      << ", converged=" << (d.converged ? "yes" : "no") << ", kernel=" << d.kernel << '\n';
}

int cmd_embed(const std::string& graph, const EmbedFlags& flags, const fs::path& out_dir,
              bool write_probs, int argc, const char* const* argv, std::ostream& out,
              std::ostream& err) {
  const auto in = load_input(graph, flags, err);
  const auto cfg = flags.config();
  auto manifest = start_manifest("embed", argc, argv, &in, &cfg);
  const auto r = embed(in.graph, cfg);
  ensure_dir(out_dir);
  std::ostringstream emb, diag;
  io::write_embedding_csv(emb, r.coords, in.graph);
  io::write_diagnostics_json(diag, r);
  write_output(out_dir, "embedding.csv", emb.str(), manifest);
  write_output(out_dir, "diagnostics.json", diag.str(), manifest);
  if (write_probs) {
    std::ostringstream probs;
    io::write_probability_csv(probs, r.probs);
    write_output(out_dir, "probabilities.csv", probs.str(), manifest);
  }
  finish_manifest(out_dir, manifest);
  print_diagnostics(out, r);
  if (!r.diagnostics.converged)
    err << "warning: optimizer stopped at the iteration cap before converging\n";
  return kExitOk;
}

int cmd_rank(const std::string& graph, const EmbedFlags& flags, const std::string& method_name,
             bool exclude_bridges, const std::string& only, std::size_t top,
             const fs::path& out_dir, int argc, const char* const* argv, std::ostream& out,
             std::ostream& err) {
  const auto method = parse_method(method_name);
  if (!method) throw UsageError("unknown method '" + method_name + "' (use re, ipre, approx)");
  const auto in = load_input(graph, flags, err);
  const auto cfg = flags.config();
  auto manifest = start_manifest("rank", argc, argv, &in, &cfg);
  manifest.config["method"] = to_string(*method);
  manifest.config["exclude_bridges"] = exclude_bridges ? "true" : "false";
  manifest.config["only"] = only.empty() ? "all" : only;
  manifest.config["top"] = std::to_string(top);

  RankOptions opt;
  opt.exclude_bridges = exclude_bridges;
  opt.only = only == "del"   ? FlipFilter::DeletionsOnly
             : only == "add" ? FlipFilter::AdditionsOnly
                             : FlipFilter::All;
  opt.threads = flags.threads;

  ensure_dir(out_dir);
  const auto flips = select_flips(in.graph, opt);
  SensitivityRanking ranking;
  ranking.method = *method;
  if (flips.empty()) {
    err << "warning: no flips match the selection; writing an empty ranking\n";
  } else {
    const auto base = embed(in.graph, cfg);
    print_diagnostics(out, base);
    ranking = make_ranking(*method, score_flips(in.graph, base, *method, flips, opt.threads),
                           embedding_hash(base.coords));
    std::ostringstream emb;
    io::write_embedding_csv(emb, base.coords, in.graph);
    write_output(out_dir, "embedding.csv", emb.str(), manifest);
  }
  if (top > 0 && ranking.items.size() > top) ranking.items.resize(top);

  std::ostringstream csv, json;
  io::write_ranking_csv(csv, ranking, in.graph);
  io::write_ranking_json(json, ranking, in.graph);
  write_output(out_dir, "ranking.csv", csv.str(), manifest);
  write_output(out_dir, "ranking.json", json.str(), manifest);
  finish_manifest(out_dir, manifest);

  out << to_string(*method) << ": " << ranking.items.size() << " flips ranked\n";
  const std::size_t show = std::min<std::size_t>(ranking.items.size(), 10);
  for (std::size_t k = 0; k < show; ++k) {
    const auto& it = ranking.items[k];
    out << "  " << it.rank << "  (" << in.graph.label(it.flip.i) << ", "
        << in.graph.label(it.flip.j) << ")  " << to_string(it.flip.direction) << "  "
        << io::format_double(it.score) << (it.disconnects ? "  [bridge]" : "") << '\n';
  }
  return kExitOk;
}

std::string describe_mismatch(const FlipSetMismatch& e) {
  std::ostringstream os;
  os << e.what() << '\n';
  auto list = [&os](const char* title, const std::vector<EdgeFlip>& v) {
    if (v.empty()) return;
    os << "  " << title << ":";
    for (std::size_t k = 0; k < std::min<std::size_t>(v.size(), 10); ++k)
      os << " (" << v[k].i << "," << v[k].j << ")";
    if (v.size() > 10) os << " ... " << v.size() - 10 << " more";
    os << '\n';
  };
  list("only in ground truth", e.only_in_ground_truth());
  list("only in candidate", e.only_in_candidate());
  return os.str();
}

int cmd_compare(const std::string& gt_path, const std::string& cand_path, std::size_t samples,
                std::uint64_t seed, const std::string& dataset, const fs::path& out_dir, int argc,
                const char* const* argv, std::ostream& out, std::ostream& err) {
  const auto gt = io::read_ranking_csv_file(gt_path);
  const auto cand = io::read_ranking_csv_file(cand_path);
  if (gt.embedding_hash != 0 && cand.embedding_hash != 0 &&
      gt.embedding_hash != cand.embedding_hash)
    err << "warning: the rankings were computed on different base embeddings\n";
  auto manifest = start_manifest("compare", argc, argv, nullptr, nullptr);
  manifest.seed = seed;
  manifest.config["samples"] = std::to_string(samples);
  manifest.config["ground_truth"] = gt_path;
  manifest.config["candidate"] = cand_path;
  RankingComparison c;
  try {
    c = compare_rankings(gt, cand, samples, seed);
  } catch (const FlipSetMismatch& e) {
    throw UsageError(describe_mismatch(e));
  }
  ensure_dir(out_dir);
  std::ostringstream json, csv;
  io::write_comparison_json(json, c, dataset);
  io::write_comparison_csv_header(csv);
  io::write_comparison_csv_row(csv, c, dataset);
  write_output(out_dir, "comparison.json", json.str(), manifest);
  write_output(out_dir, "comparison.csv", csv.str(), manifest);
  finish_manifest(out_dir, manifest);
  out << to_string(cand.method) << " vs " << to_string(gt.method) << ": NDCG "
      << io::format_double(c.ndcg) << ", p " << io::format_p_value(c.p_value) << " ("
      << samples << " samples, " << gt.items.size() << " flips)\n";
  return kExitOk;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sensitivity of CNE link predictions to single edge flips", "cnesens"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  EmbedFlags embed_flags;
  std::string embed_graph;
  fs::path embed_out = "cne-embed";
  bool write_probs = false;
  auto* embed_cmd = app.add_subcommand("embed", "fit a CNE embedding");
  embed_cmd->add_option("graph", embed_graph, "edge-list file or dataset name")->required();
  add_embed_flags(*embed_cmd, embed_flags);
  embed_cmd->add_option("--out", embed_out, "output directory")->capture_default_str();
  embed_cmd->add_flag("--write-probs", write_probs, "also write the dense probability matrix");

  EmbedFlags rank_flags;
  std::string rank_graph, method = "approx", only;
  fs::path rank_out = "cne-rank";
  bool exclude_bridges = false;
  std::size_t top = 0;
  auto* rank_cmd = app.add_subcommand("rank", "rank every edge flip by sensitivity");
  rank_cmd->add_option("graph", rank_graph, "edge-list file or dataset name")->required();
  add_embed_flags(*rank_cmd, rank_flags);
  rank_cmd->add_option("--method", method, "re, ipre or approx")->capture_default_str();
  rank_cmd->add_flag("--exclude-bridges", exclude_bridges, "skip deletions that disconnect");
  rank_cmd->add_option("--only", only, "restrict to del or add")
      ->check(CLI::IsMember({"del", "add"}));
  rank_cmd->add_option("--top", top, "keep only the first K rows (0 = all)");
  rank_cmd->add_option("--out", rank_out, "output directory")->capture_default_str();

  std::string gt_path, cand_path, dataset;
  std::size_t samples = 1000;
  std::uint64_t cmp_seed = 0;
  fs::path cmp_out = "cne-compare";
  auto* cmp_cmd = app.add_subcommand("compare", "NDCG and randomization test of two rankings");
  cmp_cmd->add_option("ground_truth", gt_path, "ranking CSV used as ground truth")->required();
  cmp_cmd->add_option("candidate", cand_path, "ranking CSV to evaluate")->required();
  cmp_cmd->add_option("--samples", samples, "random orderings")->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmp_cmd->add_option("--seed", cmp_seed, "sampling seed")->capture_default_str();
  cmp_cmd->add_option("--dataset", dataset, "dataset name for the report");
  cmp_cmd->add_option("--out", cmp_out, "output directory")->capture_default_str();

  ReproduceOptions rep;
  std::string datasets;
  rep.out_dir = "cne-reproduce";
  auto* rep_cmd = app.add_subcommand("reproduce", "rerun a reference table end to end");
  rep_cmd->add_option("table", rep.table, "t1, t2, t3 or t4")
      ->required()
      ->check(CLI::IsMember({"t1", "t2", "t3", "t4"}));
  rep_cmd->add_option("--datasets", datasets, "comma-separated dataset names");
  rep_cmd->add_option("--out", rep.out_dir, "output directory")->capture_default_str();
  rep_cmd->add_option("--reference", rep.reference_file, "reference values CSV");
  rep_cmd->add_option("--samples", rep.samples, "randomization samples")
      ->check(CLI::PositiveNumber)->capture_default_str();
  rep_cmd->add_option("--timing-flips", rep.timing_flips, "flips timed for RE and IPRE")
      ->check(CLI::PositiveNumber)->capture_default_str();
  rep_cmd->add_option("--threads", rep.threads, "worker threads")->check(CLI::PositiveNumber)
      ->capture_default_str();
  rep_cmd->add_option("--seed", rep.seed, "seed for embeddings and sampling")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << kToolVersion << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (*embed_cmd)
      return cmd_embed(embed_graph, embed_flags, embed_out, write_probs, argc, argv, out, err);
    if (*rank_cmd)
      return cmd_rank(rank_graph, rank_flags, method, exclude_bridges, only, top, rank_out, argc,
                      argv, out, err);
    if (*cmp_cmd)
      return cmd_compare(gt_path, cand_path, samples, cmp_seed, dataset, cmp_out, argc, argv, out,
                         err);
    if (*rep_cmd) {
      rep.datasets = split_list(datasets);
      rep.argv.assign(argv, argv + argc);
      if (rep.reference_file.empty()) rep.reference_file = data_dir() / "reference_values.csv";
      reproduce(rep, out, err);
      return kExitOk;
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ParseError& e) {
    err << "error: line " << e.line() << ": " << e.what() << '\n';
    return kExitUsage;
  } catch (const FileError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace cne::cli
