#include "socdgl/config.hpp"
#include "socdgl/dataio.hpp"
#include "socdgl/evaluation.hpp"
#include "socdgl/graphs.hpp"
#include "socdgl/rng.hpp"
#include "socdgl/tsv.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace socdgl;
namespace fs = std::filesystem;
using nlohmann::json;

// Stream tag for the negative-sampling RNG, distinct from fold streams.
constexpr std::uint64_t kNegativeStream = 0x4e454753;

struct Opts {
  std::string config_path;
  std::vector<std::string> sets;
  std::vector<std::pair<std::string, std::string>> direct;
  std::vector<std::string> drug_views, target_views;
  std::vector<std::string> grid;
  std::string out_dir = "run";
};

std::string join(const std::vector<std::string>& items, char sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += sep;
    out += items[i];
  }
  return out;
}

RunConfig build_config(const Opts& o) {
  RunConfig cfg = o.config_path.empty() ? RunConfig::defaults()
                                        : RunConfig::load(o.config_path);
  for (const auto& kv : o.sets) cfg.apply_line(kv, "--set");
  for (const auto& [key, value] : o.direct) cfg.set(key, value);
  if (!o.drug_views.empty()) cfg.set("data.drug_views", join(o.drug_views, ','));
  if (!o.target_views.empty())
    cfg.set("data.target_views", join(o.target_views, ','));
  return cfg;
}

void write_manifest(const fs::path& dir, const std::string& command,
                    const RunConfig& cfg, const json& extra = json::object()) {
  json m;
  m["command"] = command;
  json c = json::object();
  for (const auto& [k, v] : cfg.entries()) c[k] = v;
  m["config"] = c;
  for (const auto& [k, v] : extra.items()) m[k] = v;
  atomic_write(dir / "manifest.json", m.dump(2) + "\n");
}

const std::string& require_path(const RunConfig& cfg, const std::string& key) {
  const std::string& value = cfg.get(key);
  if (value.empty()) throw io_error("config key " + key + " is not set");
  return value;
}

// ---- affinity ----

AffinityMatrix learn_affinity(const std::vector<std::string>& paths,
                              EntityKind kind, const AdmmConfig& admm_cfg,
                              EntitySet& entities, MultiviewResult& result) {
  auto& ids = kind == EntityKind::drug ? entities.drug_ids : entities.target_ids;
  ids = read_view_ids(paths.front());
  entities.validate();
  std::vector<FeatureView> views;
  views.reserve(paths.size());
  for (const auto& p : paths)
    views.push_back(parse_feature_view(p, kind, entities));
  result = run_multiview(views, admm_cfg);
  if (!result.converged)
    throw numerical_error(
        std::string(to_string(kind)) + " affinity learning did not converge in " +
        std::to_string(result.iterations) +
        " iterations (max error " + format_double(result.final_errors.max()) +
        ")");
  return result.affinity;
}

int cmd_affinity(const Opts& o) {
  const RunConfig cfg = build_config(o);
  const AdmmConfig admm_cfg = cfg.admm();
  const auto drug_paths = cfg.get_list("data.drug_views");
  const auto target_paths = cfg.get_list("data.target_views");
  if (drug_paths.empty() && target_paths.empty())
    throw io_error("no feature views given (data.drug_views / data.target_views)");

  EntitySet entities;
  AffinityMatrix a_dd, a_tt;
  MultiviewResult drug_result, target_result;
  if (!drug_paths.empty())
    a_dd = learn_affinity(drug_paths, EntityKind::drug, admm_cfg, entities,
                          drug_result);
  if (!target_paths.empty())
    a_tt = learn_affinity(target_paths, EntityKind::target, admm_cfg, entities,
                          target_result);

  const fs::path out(o.out_dir);
  fs::create_directories(out);
  std::ostringstream log;
  log << "kind\titerations\tconverged\terr1\terr2\terr3\terr4\n";
  auto log_row = [&log](EntityKind kind, const MultiviewResult& r) {
    log << to_string(kind) << '\t' << r.iterations << '\t'
        << (r.converged ? 1 : 0) << '\t' << format_double(r.final_errors.err1)
        << '\t' << format_double(r.final_errors.err2) << '\t'
        << format_double(r.final_errors.err3) << '\t'
        << format_double(r.final_errors.err4) << '\n';
  };
  if (!drug_paths.empty()) {
    write_id_matrix(out / "A_DD.tsv", entities.drug_ids, a_dd.values);
    log_row(EntityKind::drug, drug_result);
    std::cout << "drug affinity: " << drug_result.iterations
              << " iterations\n";
  }
  if (!target_paths.empty()) {
    write_id_matrix(out / "A_TT.tsv", entities.target_ids, a_tt.values);
    log_row(EntityKind::target, target_result);
    std::cout << "target affinity: " << target_result.iterations
              << " iterations\n";
  }
  atomic_write(out / "affinity_log.tsv", log.str());
  write_manifest(out, "affinity", cfg);
  return 0;
}

// ---- shared dataset loading ----

struct Dataset {
  EntitySet entities;
  AffinityMatrix a_dd, a_tt;
  InteractionSet interactions;
};

Dataset load_dataset(const RunConfig& cfg) {
  Dataset d;
  const IdMatrix dd = read_id_matrix(require_path(cfg, "data.drug_affinity"));
  const IdMatrix tt = read_id_matrix(require_path(cfg, "data.target_affinity"));
  d.entities.drug_ids = dd.ids;
  d.entities.target_ids = tt.ids;
  d.entities.validate();
  d.a_dd = AffinityMatrix{dd.values, EntityKind::drug, false};
  d.a_tt = AffinityMatrix{tt.values, EntityKind::target, false};
  d.interactions =
      parse_interactions(require_path(cfg, "data.interactions"), d.entities);

  const double ratio = cfg.get_double("negative.ratio");
  const auto desired = static_cast<std::size_t>(
      ratio * static_cast<double>(d.interactions.positives.size()));
  if (d.interactions.negatives.empty() ||
      d.interactions.negatives.size() < desired) {
    d.interactions = sample_negatives(
        d.interactions, d.a_dd, ratio,
        derive_seed(cfg.get_uint64("seed"), kNegativeStream));
  }
  return d;
}

PairList all_labeled_pairs(const InteractionSet& in) {
  PairList all = in.positives;
  all.insert(all.end(), in.negatives.begin(), in.negatives.end());
  return all;
}

// ---- train ----

int cmd_train(const Opts& o) {
  const RunConfig cfg = build_config(o);
  const TrainConfig tc = cfg.train();
  const Dataset data = load_dataset(cfg);
  const GlobalGraph graph =
      assemble_global(data.a_dd, data.a_tt, data.interactions.matrix,
                      cfg.get_double("graph.threshold"));
  const FitResult fitted =
      fit(graph, data.interactions.positives, data.interactions.negatives, tc);

  const fs::path out(o.out_dir);
  fs::create_directories(out);
  save_checkpoint(out / "checkpoint", fitted.params, tc, graph.n());
  std::ostringstream trace;
  trace << "epoch\tloss\n";
  for (std::size_t e = 0; e < fitted.loss_trace.size(); ++e)
    trace << e + 1 << '\t' << format_double(fitted.loss_trace[e]) << '\n';
  atomic_write(out / "loss_trace.tsv", trace.str());
  write_manifest(out, "train", cfg, {{"epochs_run", fitted.epochs_run}});
  std::cout << "trained " << fitted.epochs_run << " epochs, final loss "
            << (fitted.loss_trace.empty()
                    ? "n/a"
                    : format_double(fitted.loss_trace.back()))
            << "\n";
  return 0;
}

// ---- evaluate ----

std::vector<std::string> resolve_holdouts(const RunConfig& cfg,
                                          const Dataset& data, SplitMode mode) {
  auto holdouts = cfg.get_list("eval.holdouts");
  if (holdouts.empty() && mode != SplitMode::warm)
    holdouts = mode == SplitMode::cold_drug ? data.entities.drug_ids
                                            : data.entities.target_ids;
  return holdouts;
}

EvalReport evaluate_with(const RunConfig& cfg, const Dataset& data) {
  const SplitMode mode = cfg.mode();
  const SplitPlan plan =
      plan_splits(data.interactions, data.entities, mode, cfg.get_int("folds"),
                  resolve_holdouts(cfg, data, mode), cfg.get_uint64("seed"));
  const ProtocolData pd{data.a_dd, data.a_tt, data.interactions,
                        cfg.get_double("graph.threshold")};
  return run_protocol(pd, plan, cfg.train(), cfg.get_int("jobs"));
}

void write_report_files(const fs::path& out, const RunConfig& cfg,
                        const EvalReport& report) {
  const std::string tag =
      std::string(to_string(report.mode)) + "_" + cfg.get("variant");
  write_report_tsv(out / ("report_" + tag + ".tsv"), report);
  write_summary_text(out / ("summary_" + tag + ".txt"), report);
  write_roc_svg(out / ("roc_" + tag + ".svg"), report);
  write_pr_svg(out / ("pr_" + tag + ".svg"), report);
}

int cmd_evaluate(const Opts& o) {
  const RunConfig cfg = build_config(o);
  const Dataset data = load_dataset(cfg);
  const EvalReport report = evaluate_with(cfg, data);
  const fs::path out(o.out_dir);
  fs::create_directories(out);
  write_report_files(out, cfg, report);
  write_manifest(out, "evaluate", cfg);
  const auto means = metric_values(report.mean);
  const auto stds = metric_values(report.stddev);
  for (int i = 0; i < kMetricCount; ++i)
    std::cout << kMetricNames[i] << ": " << format_double(means[i]) << " +/- "
              << format_double(stds[i]) << "\n";
  return 0;
}

// ---- predict ----

int cmd_predict(const Opts& o) {
  const RunConfig cfg = build_config(o);
  TrainConfig tc = cfg.train();
  const Dataset data = load_dataset(cfg);
  const GlobalGraph graph =
      assemble_global(data.a_dd, data.a_tt, data.interactions.matrix,
                      cfg.get_double("graph.threshold"));

  ModelParams params;
  const std::string checkpoint_dir = cfg.get("data.checkpoint");
  if (!checkpoint_dir.empty()) {
    const Checkpoint ck = load_checkpoint(checkpoint_dir);
    if (ck.n_nodes != graph.n())
      throw io_error("checkpoint was trained on a different graph size");
    params = ck.params;
    tc.variant = ck.variant;
    tc.fusion_omega = ck.fusion_omega;
    tc.filter = ck.filter;
    tc.gcn_layers = ck.gcn_layers;
  } else {
    params = fit(graph, data.interactions.positives,
                 data.interactions.negatives, tc)
                 .params;
  }
  const Matrix scores = forward(graph, params, tc);

  const std::string drug_id = cfg.get("predict.drug_id");
  const std::string target_id = cfg.get("predict.target_id");
  const int top_n = cfg.get_int("predict.top_n");
  if (top_n < 1) throw io_error("predict.top_n must be >= 1");
  if (drug_id.empty() == target_id.empty())
    throw io_error("predict needs exactly one of --drug-id / --target-id");

  // Candidates: the other side's entities, minus known training positives.
  struct Candidate {
    int index;
    double score;
  };
  std::vector<Candidate> candidates;
  std::vector<std::string> candidate_ids;
  std::string query_kind, result_kind;
  if (!drug_id.empty()) {
    const int d = data.entities.drug_index(drug_id);
    if (d < 0) throw io_error("unknown drug id: " + drug_id);
    for (int t = 0; t < data.interactions.n_t(); ++t)
      if (data.interactions.matrix(d, t) != 1.0)
        candidates.push_back({t, scores(d, t)});
    candidate_ids = data.entities.target_ids;
    query_kind = "drug";
    result_kind = "target";
  } else {
    const int t = data.entities.target_index(target_id);
    if (t < 0) throw io_error("unknown target id: " + target_id);
    for (int d = 0; d < data.interactions.n_d(); ++d)
      if (data.interactions.matrix(d, t) != 1.0)
        candidates.push_back({d, scores(d, t)});
    candidate_ids = data.entities.drug_ids;
    query_kind = "target";
    result_kind = "drug";
  }
  // Descending score; ties keep ascending id (index) order.
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Candidate& a, const Candidate& b) {
                     return a.score > b.score;
                   });
  if (static_cast<int>(candidates.size()) > top_n) candidates.resize(top_n);

  const fs::path out(o.out_dir);
  fs::create_directories(out);
  std::ostringstream table;
  table << "rank\t" << result_kind << "\tscore\n";
  for (std::size_t r = 0; r < candidates.size(); ++r) {
    table << r + 1 << '\t' << candidate_ids[candidates[r].index] << '\t'
          << format_double(candidates[r].score) << '\n';
    std::cout << r + 1 << ". " << candidate_ids[candidates[r].index] << " "
              << format_double(candidates[r].score) << "\n";
  }
  atomic_write(out / "predictions.tsv", table.str());
  write_manifest(out, "predict", cfg,
                 {{"query_kind", query_kind},
                  {"query_id", drug_id.empty() ? target_id : drug_id}});
  return 0;
}

// ---- sweep ----

struct GridAxis {
  std::string key;
  std::vector<std::string> values;
};

std::vector<GridAxis> parse_grid(const std::vector<std::string>& specs) {
  std::vector<GridAxis> axes;
  for (const auto& spec : specs) {
    const std::size_t eq = spec.find('=');
    if (eq == std::string::npos)
      throw io_error("grid spec needs key=v1,v2,...: " + spec);
    GridAxis axis;
    axis.key = spec.substr(0, eq);
    std::size_t start = eq + 1;
    while (start <= spec.size()) {
      const std::size_t comma = spec.find(',', start);
      const std::string item = comma == std::string::npos
                                   ? spec.substr(start)
                                   : spec.substr(start, comma - start);
      if (!item.empty()) axis.values.push_back(item);
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (axis.values.empty()) throw io_error("grid axis has no values: " + spec);
    axes.push_back(std::move(axis));
  }
  return axes;
}

int cmd_sweep(const Opts& o) {
  if (o.grid.empty()) throw io_error("sweep needs at least one --grid axis");
  const std::vector<GridAxis> axes = parse_grid(o.grid);
  std::size_t points = 1;
  for (const auto& axis : axes) points *= axis.values.size();

  const fs::path out(o.out_dir);
  fs::create_directories(out);
  std::ostringstream table;
  table << "point";
  for (const auto& axis : axes) table << '\t' << axis.key;
  for (const char* name : kMetricNames) table << '\t' << name;
  table << '\n';

  const RunConfig base = build_config(o);
  for (std::size_t p = 0; p < points; ++p) {
    RunConfig cfg = base;
    std::size_t rem = p;
    std::vector<std::string> assignment;
    // Last axis varies fastest.
    for (std::size_t a = axes.size(); a-- > 0;) {
      const auto& axis = axes[a];
      assignment.insert(assignment.begin(), axis.values[rem % axis.values.size()]);
      cfg.set(axis.key, axis.values[rem % axis.values.size()]);
      rem /= axis.values.size();
    }
    char tag[32];
    std::snprintf(tag, sizeof(tag), "point_%03zu", p);
    const fs::path point_dir = out / tag;
    fs::create_directories(point_dir);
    const Dataset data = load_dataset(cfg);
    const EvalReport report = evaluate_with(cfg, data);
    write_report_files(point_dir, cfg, report);
    write_manifest(point_dir, "sweep-point", cfg);

    table << tag;
    for (const auto& v : assignment) table << '\t' << v;
    for (double v : metric_values(report.mean)) table << '\t' << format_double(v);
    table << '\n';
    std::cout << tag << " done\n";
  }
  atomic_write(out / "sweep.tsv", table.str());
  json extra;
  extra["points"] = points;
  write_manifest(out, "sweep", base, extra);
  return 0;
}

// ---- wiring ----

void add_common(CLI::App* sub, Opts& o) {
  sub->add_option("--config", o.config_path, "configuration file");
  sub->add_option("--set", o.sets, "override a config key (key=value)");
  sub->add_option("--out-dir", o.out_dir, "output directory");
  auto direct = [&o, sub](const std::string& flag, const std::string& key,
                          const std::string& help) {
    sub->add_option_function<std::string>(
        flag, [&o, key](const std::string& v) { o.direct.emplace_back(key, v); },
        help);
  };
  direct("--seed", "seed", "random seed");
  direct("--mode", "mode", "warm | cold_drug | cold_target");
  direct("--variant", "variant",
         "even | odd | attention | adgl_only | edgl_only | no_fusion");
  direct("--loss", "loss.kind", "slf | flf | wlf | rlf");
  direct("--ratio", "negative.ratio", "negative sampling ratio");
  direct("--jobs", "jobs", "parallel fold workers");
  direct("--folds", "folds", "fold count for warm mode");
  direct("--interactions", "data.interactions", "interaction TSV");
  direct("--drug-affinity", "data.drug_affinity", "drug affinity TSV");
  direct("--target-affinity", "data.target_affinity", "target affinity TSV");
  direct("--checkpoint", "data.checkpoint", "checkpoint directory");
  direct("--drug-id", "predict.drug_id", "query drug for prediction");
  direct("--target-id", "predict.target_id", "query target for prediction");
  direct("--top-n", "predict.top_n", "ranking length");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SOC-DGL drug-target interaction toolkit"};
  app.require_subcommand(1);
  Opts opts;

  CLI::App* affinity =
      app.add_subcommand("affinity", "learn multi-view affinity matrices");
  add_common(affinity, opts);
  affinity->add_option("--drug-view", opts.drug_views, "drug feature view TSV");
  affinity->add_option("--target-view", opts.target_views,
                       "target feature view TSV");

  CLI::App* train = app.add_subcommand("train", "fit a model on all labeled pairs");
  add_common(train, opts);

  CLI::App* evaluate =
      app.add_subcommand("evaluate", "cross-validated evaluation report");
  add_common(evaluate, opts);

  CLI::App* predict = app.add_subcommand("predict", "rank candidate partners");
  add_common(predict, opts);

  CLI::App* sweep = app.add_subcommand("sweep", "grid sweep of config keys");
  add_common(sweep, opts);
  sweep->add_option("--grid", opts.grid, "axis spec key=v1,v2,...");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (affinity->parsed()) return cmd_affinity(opts);
    if (train->parsed()) return cmd_train(opts);
    if (evaluate->parsed()) return cmd_evaluate(opts);
    if (predict->parsed()) return cmd_predict(opts);
    if (sweep->parsed()) return cmd_sweep(opts);
  } catch (const io_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const numerical_error& e) {
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 2;
}
