// Copyright 2026 The UCO Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "uco/curation.hpp"
#include "uco/datamodel.hpp"
#include "uco/encoder.hpp"
#include "uco/error.hpp"
#include "uco/pipeline.hpp"
#include "uco/random.hpp"
#include "uco/synthgen.hpp"
#include "uco/trainer.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace uco {
namespace {

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string file_hash(const fs::path& p) { return hex64(fnv1a(read_file(p))); }

void log_line(const std::string& s) { std::cerr << s << '\n'; }

// Collects what a run read and wrote; written once the command succeeds.
class Manifest {
 public:
  Manifest(std::string command, const CLI::App& app, std::vector<std::string> argv)
      : command_(std::move(command)), app_(app), argv_(std::move(argv)), start_(std::chrono::steady_clock::now()) {}

  void seed(const std::string& name, std::uint64_t v) { seeds_[name] = v; }
  void input(const fs::path& p) { inputs_.push_back(p); }
  void output(const fs::path& p) { outputs_.push_back(p); }

  void write(const fs::path& path) const {
    ordered_json j;
    j["command"] = command_;
    j["argv"] = argv_;
    // INI text that reproduces the run through --config.
    std::string config;
    std::istringstream all(app_.config_to_str(true, false));
    for (std::string line; std::getline(all, line);) {
      if (line.rfind(command_ + ".", 0) != 0) continue;
      // Unset options and cleared flags would read back as given, tripping excludes().
      if (line.ends_with("=\"\"") || line.ends_with("=false")) continue;
      config += line + "\n";
    }
    j["config"] = config;
    j["seeds"] = seeds_;
    auto hashes = [](const std::vector<fs::path>& paths) {
      ordered_json out = ordered_json::object();
      for (const auto& p : paths) {
        if (fs::is_directory(p)) {
          for (const auto& e : fs::recursive_directory_iterator(p)) {
            if (e.is_regular_file() && e.path().filename() != "manifest.json") {
              out[e.path().string()] = file_hash(e.path());
            }
          }
        } else {
          out[p.string()] = file_hash(p);
        }
      }
      return out;
    };
    j["inputs"] = hashes(inputs_);
    j["outputs"] = hashes(outputs_);
    j["duration_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    write_file(path, j.dump(2) + "\n");
  }

 private:
  std::string command_;
  const CLI::App& app_;
  std::vector<std::string> argv_;
  std::chrono::steady_clock::time_point start_;
  std::map<std::string, std::uint64_t> seeds_;
  std::vector<fs::path> inputs_;
  std::vector<fs::path> outputs_;
};

fs::path sibling(const fs::path& file, const std::string& name) {
  return file.has_parent_path() ? file.parent_path() / name : fs::path(name);
}

void ensure_parent(const fs::path& file) {
  if (file.has_parent_path()) fs::create_directories(file.parent_path());
}

// Options shared by train and ablate.
struct TrainFlags {
  int epochs = 10;
  int batch = 32;
  double lr = 2e-5;
  double wd = 0.01;
  double margin = 0.5;
  std::uint64_t seed = 0;
  bool no_in_batch = false;
  std::string loss = "dual";
  Eigen::Index dim = 64;
  std::string threshold = "auto";
  bool mnrl_softmax = false;
  bool ocl_squared = false;

  void add(CLI::App* cmd, bool with_loss) {
    cmd->add_option("--epochs", epochs, "maximum epochs")->capture_default_str();
    cmd->add_option("--batch", batch, "anchors per batch")->capture_default_str();
    cmd->add_option("--lr", lr, "Adam learning rate")->capture_default_str();
    cmd->add_option("--wd", wd, "decoupled weight decay")->capture_default_str();
    cmd->add_option("--margin", margin, "loss margin m")->capture_default_str();
    cmd->add_option("--seed", seed, "master seed")->capture_default_str();
    cmd->add_flag("--no-in-batch-negatives", no_in_batch, "only annotated negatives");
    if (with_loss) {
      cmd->add_option("--loss", loss, "mnrl, ocl or dual")
          ->check(CLI::IsMember({"mnrl", "ocl", "dual"}))
          ->capture_default_str();
    }
    cmd->add_option("--dim", dim, "embedding dimension")->capture_default_str();
    cmd->add_option("--threshold", threshold, "centrality cosine cut in (-1, 1), or auto")->capture_default_str();
    cmd->add_flag("--mnrl-softmax", mnrl_softmax, "softmax ranking form of MNRL");
    cmd->add_flag("--ocl-squared-positive", ocl_squared, "square the OCL positive term");
  }

  TrainConfig train_config() const {
    TrainConfig c;
    c.max_epochs = epochs;
    c.batch_size = batch;
    c.learning_rate = lr;
    c.weight_decay = wd;
    c.margin = margin;
    c.rng_seed = seed;
    c.in_batch_negatives = !no_in_batch;
    c.loss = parse_loss_kind(loss);
    c.loss_options.mnrl_softmax = mnrl_softmax;
    c.loss_options.ocl_squared_positive = ocl_squared;
    if (threshold != "auto") c.centrality_threshold = parse_real(threshold, "threshold");
    validate(c);
    return c;
  }

  ModelConfig model_config() const {
    if (dim < 2) throw ValidationError("dim must be at least 2");
    ModelConfig m;
    m.dim = dim;
    return m;
  }
};

std::string epoch_line(const EpochRecord& r) {
  char buf[200];
  std::snprintf(buf, sizeof buf, "epoch %d: loss %.6f, acc %.4f, f1 %.4f, dev NDCG@%zu %.4f, MRR@%zu %.4f", r.epoch,
                r.loss, r.centrality.accuracy, r.centrality.f1, r.retrieval.cutoffs.back(), r.retrieval.ndcg.back(),
                r.retrieval.mrr_depth, r.retrieval.mrr);
  return buf;
}

// SPLIT_DIR=RUN_FILE
std::pair<fs::path, fs::path> parse_assignment(const std::string& s) {
  const auto eq = s.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == s.size()) {
    throw ValidationError("expected SPLIT_DIR=RUN_FILE, got '" + s + "'");
  }
  return {fs::path(s.substr(0, eq)), fs::path(s.substr(eq + 1))};
}

std::string split_name(const fs::path& dir) {
  const fs::path clean = dir.lexically_normal();
  return (clean.has_filename() ? clean.filename() : clean.parent_path().filename()).string();
}

struct ReportRow {
  std::string split;
  std::string model;  // baseline, uco, delta
  MetricReport report;
  std::vector<double> numbers;
};

std::string format_number(const std::string& column, double v, bool signed_) {
  const bool percent = column.rfind("P@", 0) == 0 || column.rfind("R@", 0) == 0;
  char buf[32];
  std::snprintf(buf, sizeof buf, signed_ ? (percent ? "%+.2f" : "%+.4f") : (percent ? "%.2f" : "%.4f"), v);
  return buf;
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"User-intent centrality optimization: generate, curate, train, evaluate"};
  app.require_subcommand(1);
  app.set_config("--config", "", "key=value file; [section] per subcommand, flags override it");
  app.allow_config_extras(false);

  // gen
  auto* gen = app.add_subcommand("gen", "generate a synthetic annotated pairs.tsv");
  GenConfig gen_cfg;
  std::uint64_t gen_seed = 0;
  fs::path gen_out;
  gen->add_option("--seed", gen_seed, "master seed")->capture_default_str();
  gen->add_option("--queries", gen_cfg.n_queries, "number of queries")->capture_default_str();
  gen->add_option("--titles", gen_cfg.titles_per_query, "titles per query")->capture_default_str();
  gen->add_option("--common-str", gen_cfg.frac_common_str, "share of common-string queries")->capture_default_str();
  gen->add_option("--alphanum", gen_cfg.frac_alphanum, "share of alphanumeric queries")->capture_default_str();
  gen->add_option("--id-prefix", gen_cfg.id_prefix, "prefix for query and title ids");
  gen->add_option("--out", gen_out, "output pairs.tsv")->required();

  // curate
  auto* curate = app.add_subcommand("curate", "build CQ, CQ-balanced, CQ-common-str and CQ-alphanum splits");
  CurationConfig cur_cfg;
  fs::path cur_pairs;
  fs::path cur_out;
  bool no_english = false;
  curate->add_option("--pairs", cur_pairs, "input pairs.tsv")->required();
  curate->add_option("--out", cur_out, "output directory")->required();
  curate->add_option("--seed", cur_cfg.rng_seed, "master seed")->capture_default_str();
  curate->add_option("--dev-fraction", cur_cfg.dev_fraction, "share of queries in dev")->capture_default_str();
  curate->add_option("--positive-threshold", cur_cfg.positive_threshold, "relevance above this is positive")
      ->capture_default_str();
  curate->add_option("--negative-threshold", cur_cfg.negative_threshold, "relevance below this is negative")
      ->capture_default_str();
  curate->add_flag("--no-english-filter", no_english, "keep non-ASCII-dominated text");

  // train
  auto* train_cmd = app.add_subcommand("train", "fine-tune an encoder on centrality labels");
  TrainFlags tf;
  fs::path train_pairs;
  fs::path dev_split;
  fs::path ckpt_out;
  fs::path history_out;
  train_cmd->add_option("--pairs", train_pairs, "training pairs.tsv")->required();
  train_cmd->add_option("--dev-split", dev_split, "split directory used for model selection")->required();
  train_cmd->add_option("--out", ckpt_out, "output checkpoint")->required();
  train_cmd->add_option("--history", history_out, "history.tsv path (default: next to the checkpoint)");
  tf.add(train_cmd, true);

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "rank a split's queries and score the run");
  fs::path eval_ckpt;
  fs::path eval_split;
  std::string eval_queries = "test";
  std::size_t eval_k = 10;
  fs::path run_out;
  fs::path report_out;
  bool untrained = false;
  Eigen::Index eval_dim = 64;
  std::uint64_t eval_seed = 0;
  auto* ckpt_opt = eval_cmd->add_option("--ckpt", eval_ckpt, "checkpoint to evaluate");
  auto* untrained_opt =
      eval_cmd->add_flag("--untrained", untrained, "evaluate the initial model train would start from (--seed, --dim)");
  ckpt_opt->excludes(untrained_opt);
  eval_cmd->add_option("--seed", eval_seed, "seed of the untrained model")->capture_default_str();
  eval_cmd->add_option("--dim", eval_dim, "dimension of the untrained model")->capture_default_str();
  eval_cmd->add_option("--split", eval_split, "split directory")->required();
  eval_cmd->add_option("--queries", eval_queries, "dev or test")->check(CLI::IsMember({"dev", "test"}))->capture_default_str();
  eval_cmd->add_option("--k", eval_k, "run depth")->capture_default_str();
  eval_cmd->add_option("--out", run_out, "output run.tsv")->required();
  eval_cmd->add_option("--report", report_out, "report.tsv path (default: next to the run)");

  // ablate
  auto* ablate = app.add_subcommand("ablate", "baseline plus one training per loss on the same split");
  TrainFlags af;
  fs::path abl_pairs;
  fs::path abl_split;
  fs::path abl_out;
  bool sweep = false;
  ablate->add_option("--pairs", abl_pairs, "training pairs.tsv")->required();
  ablate->add_option("--split", abl_split, "split directory (dev selects, test reports)")->required();
  ablate->add_option("--out", abl_out, "output directory")->required();
  ablate->add_flag("--sweep-margins", sweep, "pick each loss's margin from 0.25, 0.5, 0.75 on dev");
  af.add(ablate, false);

  // report
  auto* report = app.add_subcommand("report", "before/after tables from run files");
  std::vector<std::string> baseline_runs;
  std::vector<std::string> uco_runs;
  fs::path rep_out;
  report->add_option("--baseline", baseline_runs, "SPLIT_DIR=RUN_FILE of the untrained model")->required();
  report->add_option("--uco", uco_runs, "SPLIT_DIR=RUN_FILE of the trained model");
  report->add_option("--out", rep_out, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  const std::vector<std::string> args(argv, argv + argc);

  if (*gen) {
    Manifest m("gen", app, args);
    gen_cfg.rng_seed = gen_seed;
    m.seed("seed", gen_seed);
    const auto pairs = generate(gen_cfg);
    ensure_parent(gen_out);
    save_pairs(pairs, gen_out);
    m.output(gen_out);
    m.write(fs::path(gen_out.string() + ".manifest.json"));
    log_line("wrote " + std::to_string(pairs.size()) + " pairs to " + gen_out.string());
  } else if (*curate) {
    Manifest m("curate", app, args);
    cur_cfg.english_filter = !no_english;
    validate(cur_cfg);
    m.seed("seed", cur_cfg.rng_seed);
    m.input(cur_pairs);
    const auto pairs = load_pairs(cur_pairs);
    const auto kept = filter_pairs(pairs, cur_cfg);
    const EvalSplit cq = build_cq(kept, cur_cfg);
    fs::create_directories(cur_out);
    std::vector<EvalSplit> splits = {cq, build_cq_balanced(cq, cur_cfg.rng_seed)};
    // The filtered splits may legitimately come out empty; they are skipped, not fatal.
    for (auto build : {&build_cq_common_str, &build_cq_alphanum}) {
      try {
        splits.push_back(build(cq));
      } catch (const ValidationError& e) {
        log_line(std::string("skipped: ") + e.what());
      }
    }
    for (const auto& s : splits) {
      save_split(s, cur_out / s.name);
      m.output(cur_out / s.name);
      log_line(s.name + ": " + std::to_string(s.corpus.size()) + " titles, " + std::to_string(s.dev_queries.size()) +
               " dev / " + std::to_string(s.test_queries.size()) + " test queries");
    }
    write_file(cur_out / "correlations.txt", format_correlations(correlation_stats(kept)));
    m.output(cur_out / "correlations.txt");
    m.write(cur_out / "manifest.json");
  } else if (*train_cmd) {
    Manifest m("train", app, args);
    const TrainConfig cfg = tf.train_config();
    const ModelConfig mc = tf.model_config();
    m.seed("seed", cfg.rng_seed);
    m.input(train_pairs);
    m.input(dev_split);
    const auto pairs = load_pairs(train_pairs);
    const EvalSplit dev = load_split(dev_split);
    if (dev.dev_queries.empty()) throw ValidationError("split '" + dev.name + "' has no dev queries");
    const TrainResult result =
        train(initial_model(mc, cfg.rng_seed), pairs, dev, cfg, [](const EpochRecord& r) { log_line(epoch_line(r)); });
    ensure_parent(ckpt_out);
    save_checkpoint(result.best.cast<float>(), ckpt_out);
    if (history_out.empty()) history_out = sibling(ckpt_out, "history.tsv");
    write_file(history_out, format_history(result.history));
    m.output(ckpt_out);
    m.output(history_out);
    m.write(fs::path(ckpt_out.string() + ".manifest.json"));
    log_line("best epoch " + std::to_string(result.best_epoch) + ", checkpoint " + ckpt_out.string());
  } else if (*eval_cmd) {
    Manifest m("eval", app, args);
    if (eval_ckpt.empty() && !untrained) throw ValidationError("eval needs --ckpt or --untrained");
    if (eval_k < 1) throw ValidationError("k must be at least 1");
    EmbeddingModelf model;
    if (untrained) {
      ModelConfig mc;
      if (eval_dim < 2) throw ValidationError("dim must be at least 2");
      mc.dim = eval_dim;
      model = initial_model(mc, eval_seed).cast<float>();
      m.seed("seed", eval_seed);
    } else {
      m.input(eval_ckpt);
      model = load_checkpoint(eval_ckpt);
    }
    m.input(eval_split);
    const EvalSplit split = load_split(eval_split);
    const QuerySet which = parse_query_set(eval_queries);
    const RankedRun run = retrieve_run(model, split, which, eval_k);
    ensure_parent(run_out);
    save_run(run, run_out);
    const MetricReport rep = aggregate(run, split.qrels);
    if (report_out.empty()) report_out = sibling(run_out, "report.tsv");
    write_file(report_out, format_report_tsv(rep));
    m.output(run_out);
    m.output(report_out);
    m.write(fs::path(run_out.string() + ".manifest.json"));
    std::cout << format_report_tsv(rep);
    if (rep.n_excluded > 0) log_line(std::to_string(rep.n_excluded) + " queries without relevant titles excluded");
  } else if (*ablate) {
    Manifest m("ablate", app, args);
    AblationConfig cfg;
    cfg.train = af.train_config();
    cfg.model = af.model_config();
    cfg.sweep_margins = sweep;
    m.seed("seed", cfg.train.rng_seed);
    m.input(abl_pairs);
    m.input(abl_split);
    const auto pairs = load_pairs(abl_pairs);
    const EvalSplit split = load_split(abl_split);
    if (split.dev_queries.empty() || split.test_queries.empty()) {
      throw ValidationError("split '" + split.name + "' needs both dev and test queries");
    }
    const auto rows = run_ablation(pairs, split, cfg, log_line);
    fs::create_directories(abl_out);
    const std::string table = format_ablation(rows);
    write_file(abl_out / "ablation.tsv", table);
    m.output(abl_out / "ablation.tsv");
    m.write(abl_out / "manifest.json");
    std::cout << table;
  } else if (*report) {
    Manifest m("report", app, args);
    std::map<std::string, fs::path> split_dirs;
    std::map<std::string, MetricReport> base;
    std::map<std::string, MetricReport> uco;
    auto score = [&](const std::string& assignment, std::map<std::string, MetricReport>& into) {
      const auto [dir, run_path] = parse_assignment(assignment);
      const std::string name = split_name(dir);
      if (into.count(name)) throw ValidationError("split '" + name + "' given twice for the same model");
      m.input(dir);
      m.input(run_path);
      const EvalSplit split = load_split(dir);
      into[name] = aggregate(load_run(run_path), split.qrels);
      split_dirs[name] = dir;
    };
    for (const auto& a : baseline_runs) score(a, base);
    for (const auto& a : uco_runs) score(a, uco);
    for (const auto& [name, r] : uco) {
      if (!base.count(name)) throw ValidationError("split '" + name + "' has a --uco run but no --baseline run");
    }

    std::vector<ReportRow> rows;
    for (const auto& [name, b] : base) {
      rows.push_back({name, "baseline", b, report_numbers(b)});
      if (auto it = uco.find(name); it != uco.end()) {
        rows.push_back({name, "uco", it->second, report_numbers(it->second)});
        std::vector<double> delta = rows.back().numbers;
        const auto& bn = rows[rows.size() - 2].numbers;
        if (delta.size() != bn.size()) throw ValidationError("split '" + name + "': reports have different columns");
        for (std::size_t i = 0; i < delta.size(); ++i) delta[i] -= bn[i];
        rows.push_back({name, "delta", it->second, std::move(delta)});
      }
    }
    const auto columns = report_columns(rows.front().report);
    std::string tsv = "split\tmodel";
    for (const auto& c : columns) tsv += "\t" + c;
    tsv += "\n";
    std::string text;
    char cell[32];
    std::snprintf(cell, sizeof cell, "%-16s %-9s", "split", "model");
    text += cell;
    for (const auto& c : columns) {
      std::snprintf(cell, sizeof cell, " %9s", c.c_str());
      text += cell;
    }
    text += "\n";
    for (const auto& r : rows) {
      tsv += r.split + "\t" + r.model;
      std::snprintf(cell, sizeof cell, "%-16s %-9s", r.split.c_str(), r.model.c_str());
      text += cell;
      for (std::size_t i = 0; i < columns.size(); ++i) {
        const std::string v = format_number(columns[i], r.numbers[i], r.model == "delta");
        tsv += "\t" + v;
        std::snprintf(cell, sizeof cell, " %9s", v.c_str());
        text += cell;
      }
      tsv += "\n";
      text += "\n";
    }
    fs::create_directories(rep_out);
    write_file(rep_out / "report.tsv", tsv);
    write_file(rep_out / "report.txt", text);
    m.output(rep_out / "report.tsv");
    m.output(rep_out / "report.txt");
    m.write(rep_out / "manifest.json");
    std::cout << text;
  }
  return 0;
}

}  // namespace uco

int main(int argc, char** argv) {
  try {
    return uco::run(argc, argv);
  } catch (const uco::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << '\n';
    return 2;
  }
}
