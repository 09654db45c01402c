#include "socdgl/evaluation.hpp"

#include "socdgl/dataio.hpp"
#include "socdgl/rng.hpp"
#include "socdgl/tsv.hpp"
#include "support/tempdir.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

using namespace socdgl;
using socdgl::test::TempDir;

namespace {

// Pairwise win-count formulation; ties count one half.
double auroc_oracle(const std::vector<double>& s, const std::vector<int>& y) {
  double wins = 0.0;
  long long np = 0, nn = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (y[i] != 1) continue;
    ++np;
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (y[j] == 1) continue;
      if (s[i] > s[j])
        wins += 1.0;
      else if (s[i] == s[j])
        wins += 0.5;
    }
  }
  for (int l : y) nn += 1 - l;
  return wins / (static_cast<double>(np) * static_cast<double>(nn));
}

// Recall-increment formulation of average precision.
double aupr_oracle(const std::vector<double>& s, const std::vector<int>& y) {
  std::vector<int> idx(s.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&s](int a, int b) { return s[a] > s[b]; });
  long long np = 0;
  for (int l : y) np += l;
  double ap = 0.0, prev_recall = 0.0;
  long long tp = 0;
  for (std::size_t r = 0; r < idx.size(); ++r) {
    if (y[idx[r]] == 1) ++tp;
    const double recall = static_cast<double>(tp) / static_cast<double>(np);
    const double precision =
        static_cast<double>(tp) / static_cast<double>(r + 1);
    ap += (recall - prev_recall) * precision;
    prev_recall = recall;
  }
  return ap;
}

// Scores drawn from a tiny grid so ties are common; both classes forced.
void random_instance(Rng& rng, int n, std::vector<double>& s,
                     std::vector<int>& y) {
  static const double kGrid[] = {0.1, 0.25, 0.5, 0.8};
  s.resize(n);
  y.resize(n);
  for (int i = 0; i < n; ++i) {
    s[i] = kGrid[rng.below(4)];
    y[i] = static_cast<int>(rng.below(2));
  }
  y[0] = 1;
  y[n - 1] = 0;
}

}  // namespace

TEST_CASE("auroc landmark values") {
  CHECK(auroc({0.9, 0.1}, {1, 0}) == 1.0);
  CHECK(auroc({0.1, 0.9}, {1, 0}) == 0.0);
  CHECK(auroc({0.7, 0.7}, {1, 0}) == 0.5);
  CHECK(auroc({0.7, 0.7, 0.7, 0.7}, {1, 0, 1, 0}) == 0.5);
  CHECK(auroc({0.9, 0.8, 0.3, 0.2}, {1, 1, 0, 0}) == 1.0);
  // One inversion among 2x2 pairs.
  CHECK(auroc({0.9, 0.3, 0.8, 0.2}, {1, 1, 0, 0}) == 0.75);
}

TEST_CASE("auroc matches the pair-count oracle with ties") {
  Rng rng(404);
  std::vector<double> s;
  std::vector<int> y;
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 2 + static_cast<int>(rng.below(15));
    random_instance(rng, n, s, y);
    CAPTURE(trial);
    CHECK(auroc(s, y) == doctest::Approx(auroc_oracle(s, y)).epsilon(1e-12));
  }
}

TEST_CASE("auroc is invariant under order-preserving transforms") {
  Rng rng(505);
  std::vector<double> s;
  std::vector<int> y;
  random_instance(rng, 20, s, y);
  std::vector<double> warped(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) warped[i] = std::atan(3.0 * s[i]);
  CHECK(auroc(s, y) == auroc(warped, y));
}

TEST_CASE("aupr landmark values") {
  CHECK(aupr({0.1, 0.9}, {1, 0}) == 0.5);
  CHECK(aupr({0.9, 0.1}, {1, 0}) == 1.0);
  CHECK(aupr({0.9, 0.8, 0.3}, {1, 1, 0}) == 1.0);
  // Lone positive ranked last of three.
  CHECK(aupr({0.1, 0.8, 0.9}, {1, 0, 0}) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("aupr matches the recall-increment oracle") {
  Rng rng(606);
  std::vector<double> s;
  std::vector<int> y;
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 2 + static_cast<int>(rng.below(15));
    random_instance(rng, n, s, y);
    CAPTURE(trial);
    CHECK(aupr(s, y) == doctest::Approx(aupr_oracle(s, y)).epsilon(1e-12));
  }
}

TEST_CASE("thresholded metrics on the worked example") {
  const ThresholdMetrics m =
      thresholded_metrics({0.9, 0.4, 0.6, 0.2}, {1, 0, 1, 1}, 0.5);
  CHECK(m.accuracy == 0.75);
  CHECK(m.precision == 1.0);
  CHECK(m.recall == doctest::Approx(2.0 / 3.0));
  CHECK(m.specificity == 1.0);
  CHECK(m.f1 == doctest::Approx(0.8));
}

TEST_CASE("threshold boundary counts as positive") {
  const ThresholdMetrics m = thresholded_metrics({0.5}, {1}, 0.5);
  CHECK(m.recall == 1.0);
  CHECK(m.accuracy == 1.0);
}

TEST_CASE("degenerate denominators yield zero") {
  // No positives and nothing predicted positive.
  const ThresholdMetrics m = thresholded_metrics({0.1, 0.2}, {0, 0}, 0.5);
  CHECK(m.recall == 0.0);
  CHECK(m.precision == 0.0);
  CHECK(m.f1 == 0.0);
  CHECK(m.specificity == 1.0);
  CHECK(m.accuracy == 1.0);
}

TEST_CASE("confusion counts match a direct tally") {
  Rng rng(707);
  std::vector<double> s;
  std::vector<int> y;
  for (int trial = 0; trial < 50; ++trial) {
    random_instance(rng, 12, s, y);
    const ThresholdMetrics m = thresholded_metrics(s, y, 0.5);
    long long tp = 0, fp = 0, tn = 0, fn = 0;
    for (int i = 0; i < 12; ++i) {
      const bool pred = s[i] >= 0.5;
      tp += pred && y[i] == 1;
      fp += pred && y[i] == 0;
      tn += !pred && y[i] == 0;
      fn += !pred && y[i] == 1;
    }
    CAPTURE(trial);
    CHECK(m.accuracy == doctest::Approx((tp + tn) / 12.0));
    if (tp + fn > 0)
      CHECK(m.recall ==
            doctest::Approx(static_cast<double>(tp) / (tp + fn)));
    if (tn + fp > 0)
      CHECK(m.specificity ==
            doctest::Approx(static_cast<double>(tn) / (tn + fp)));
  }
}

TEST_CASE("metric inputs are validated") {
  CHECK_THROWS_AS(auroc({}, {}), io_error);
  CHECK_THROWS_AS(auroc({0.5}, {1, 0}), io_error);
  CHECK_THROWS_AS(auroc({0.5, 0.6}, {1, 2}), io_error);
  CHECK_THROWS_AS(auroc({0.5, 0.6}, {1, 1}), io_error);
  CHECK_THROWS_AS(aupr({0.5, 0.6}, {0, 0}), io_error);
  const double nan = std::nan("");
  CHECK_THROWS_AS(auroc({nan, 0.5}, {1, 0}), numerical_error);
  CHECK_THROWS_AS(thresholded_metrics({nan}, {1}, 0.5), numerical_error);
}

TEST_CASE("metric_values follows the published name order") {
  EvalMetrics m;
  m.auroc = 0.1;
  m.aupr = 0.2;
  m.f1 = 0.3;
  m.accuracy = 0.4;
  m.recall = 0.5;
  m.specificity = 0.6;
  m.precision = 0.7;
  const auto v = metric_values(m);
  for (int i = 0; i < kMetricCount; ++i)
    CHECK(v[i] == doctest::Approx(0.1 * (i + 1)));
  CHECK(std::string(kMetricNames[0]) == "auroc");
  CHECK(std::string(kMetricNames[3]) == "accuracy");
  CHECK(std::string(kMetricNames[6]) == "precision");
}

namespace {

Matrix random_affinity(Rng& rng, int n) {
  Matrix m(n, n);
  for (int i = 0; i < n; ++i) {
    m(i, i) = 1.0;
    for (int j = i + 1; j < n; ++j) m(i, j) = m(j, i) = rng.uniform();
  }
  return m;
}

// 12 drugs x 10 targets; positives on (d+t) % 4 == 0, explicit negatives on
// (d+t) % 4 == 2, the rest unknown.
ProtocolData make_data() {
  Rng rng(11);
  ProtocolData data;
  data.drug_affinity = {random_affinity(rng, 12), EntityKind::drug, false};
  data.target_affinity = {random_affinity(rng, 10), EntityKind::target, false};
  data.interactions.matrix = Matrix::Zero(12, 10);
  for (int d = 0; d < 12; ++d)
    for (int t = 0; t < 10; ++t) {
      if ((d + t) % 4 == 0) {
        data.interactions.matrix(d, t) = 1.0;
        data.interactions.positives.emplace_back(d, t);
      } else if ((d + t) % 4 == 2) {
        data.interactions.negatives.emplace_back(d, t);
      }
    }
  return data;
}

EntitySet data_entities() {
  EntitySet e;
  for (int d = 0; d < 12; ++d) e.drug_ids.push_back("d" + std::to_string(d));
  for (int t = 0; t < 10; ++t) e.target_ids.push_back("t" + std::to_string(t));
  return e;
}

TrainConfig tiny_cfg() {
  TrainConfig cfg;
  cfg.epochs = 25;
  cfg.learning_rate = 0.01;
  cfg.seed = 5;
  cfg.filter.k = 4;
  cfg.gcn_layers = 2;
  cfg.gcn_hidden = 8;
  cfg.embed_dim = 8;
  cfg.edgl_hidden = 8;
  return cfg;
}

std::vector<double> flat_metrics(const EvalReport& r) {
  std::vector<double> out;
  for (const auto& fold : r.per_fold) {
    const auto v = metric_values(fold.metrics);
    out.insert(out.end(), v.begin(), v.end());
    out.insert(out.end(), fold.scores.begin(), fold.scores.end());
  }
  const auto mv = metric_values(r.mean);
  const auto sv = metric_values(r.stddev);
  out.insert(out.end(), mv.begin(), mv.end());
  out.insert(out.end(), sv.begin(), sv.end());
  return out;
}

}  // namespace

TEST_CASE("run_protocol evaluates every fold") {
  const ProtocolData data = make_data();
  const SplitPlan plan =
      plan_splits(data.interactions, data_entities(), SplitMode::warm, 3, {}, 9);
  const EvalReport report = run_protocol(data, plan, tiny_cfg(), 1);

  REQUIRE(report.per_fold.size() == 3);
  CHECK(report.mode == SplitMode::warm);
  for (std::size_t f = 0; f < 3; ++f) {
    const auto& fold = report.per_fold[f];
    CHECK(fold.label == std::to_string(f + 1));
    CHECK(fold.scores.size() == plan.folds[f].test.size());
    CHECK(fold.labels.size() == plan.folds[f].test.size());
    for (double v : metric_values(fold.metrics)) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
  }

  // Mean and sample std recomputed from the per-fold table.
  for (int i = 0; i < kMetricCount; ++i) {
    double sum = 0.0;
    for (const auto& fold : report.per_fold)
      sum += metric_values(fold.metrics)[i];
    const double mean = sum / 3.0;
    double sq = 0.0;
    for (const auto& fold : report.per_fold) {
      const double d = metric_values(fold.metrics)[i] - mean;
      sq += d * d;
    }
    CHECK(metric_values(report.mean)[i] == doctest::Approx(mean).epsilon(1e-12));
    CHECK(metric_values(report.stddev)[i] ==
          doctest::Approx(std::sqrt(sq / 2.0)).epsilon(1e-12));
  }
}

TEST_CASE("run_protocol is deterministic and job-count independent") {
  const ProtocolData data = make_data();
  const SplitPlan plan =
      plan_splits(data.interactions, data_entities(), SplitMode::warm, 3, {}, 9);
  const TrainConfig cfg = tiny_cfg();
  const EvalReport a = run_protocol(data, plan, cfg, 1);
  const EvalReport b = run_protocol(data, plan, cfg, 1);
  const EvalReport c = run_protocol(data, plan, cfg, 3);
  CHECK(flat_metrics(a) == flat_metrics(b));
  CHECK(flat_metrics(a) == flat_metrics(c));
}

TEST_CASE("run_protocol reports single-fold spread as zero") {
  const ProtocolData data = make_data();
  SplitPlan plan =
      plan_splits(data.interactions, data_entities(), SplitMode::warm, 3, {}, 9);
  plan.folds.resize(1);
  const EvalReport report = run_protocol(data, plan, tiny_cfg(), 1);
  for (double v : metric_values(report.stddev)) CHECK(v == 0.0);
  for (int i = 0; i < kMetricCount; ++i)
    CHECK(metric_values(report.mean)[i] ==
          metric_values(report.per_fold[0].metrics)[i]);
}

TEST_CASE("cold folds are labeled by their holdout id") {
  const ProtocolData data = make_data();
  SplitPlan plan = plan_splits(data.interactions, data_entities(),
                               SplitMode::cold_drug, 0, {"d7"}, 9);
  const EvalReport report = run_protocol(data, plan, tiny_cfg(), 1);
  REQUIRE(report.per_fold.size() == 1);
  CHECK(report.per_fold[0].label == "d7");
  CHECK(report.mode == SplitMode::cold_drug);
}

TEST_CASE("a failing fold aborts with its number attached") {
  const ProtocolData data = make_data();
  SplitPlan plan;
  plan.mode = SplitMode::warm;
  plan.folds.resize(2);
  // Fold 1 is healthy; fold 2's test set is single-class so auroc fails.
  plan.folds[0].test = {{0, 0}, {0, 2}};
  plan.folds[1].test = {{0, 0}, {4, 0}};
  for (const auto& p : data.interactions.positives)
    if (p != Pair{0, 0} && p != Pair{4, 0}) {
      plan.folds[0].train.push_back(p);
      plan.folds[1].train.push_back(p);
    }
  for (const auto& p : data.interactions.negatives)
    if (p != Pair{0, 2}) {
      plan.folds[0].train.push_back(p);
      plan.folds[1].train.push_back(p);
    }
  CHECK_THROWS_WITH_AS(run_protocol(data, plan, tiny_cfg(), 1),
                       doctest::Contains("fold 2:"), io_error);
}

TEST_CASE("run_protocol validates its inputs") {
  const ProtocolData data = make_data();
  const SplitPlan plan =
      plan_splits(data.interactions, data_entities(), SplitMode::warm, 3, {}, 9);
  SplitPlan empty;
  CHECK_THROWS_AS(run_protocol(data, empty, tiny_cfg(), 1), io_error);
  CHECK_THROWS_AS(run_protocol(data, plan, tiny_cfg(), 0), io_error);
  ProtocolData bad = data;
  bad.drug_affinity.values = Matrix::Identity(5, 5);
  CHECK_THROWS_AS(run_protocol(bad, plan, tiny_cfg(), 1), io_error);
}

namespace {

// Two-fold report with hand-picked scores so the curve geometry is known.
EvalReport handmade_report() {
  EvalReport r;
  r.mode = SplitMode::warm;
  r.per_fold.resize(2);
  r.per_fold[0].label = "1";
  r.per_fold[0].scores = {0.9, 0.1};
  r.per_fold[0].labels = {1, 0};
  r.per_fold[0].metrics.auroc = 1.0;
  r.per_fold[0].metrics.aupr = 1.0;
  r.per_fold[1].label = "2";
  r.per_fold[1].scores = {0.2, 0.8};
  r.per_fold[1].labels = {1, 0};
  r.per_fold[1].metrics.auroc = 0.0;
  r.per_fold[1].metrics.aupr = 0.5;
  r.mean.auroc = 0.5;
  r.mean.aupr = 0.75;
  r.stddev.auroc = std::sqrt(0.5);
  return r;
}

std::string slurp(const std::filesystem::path& p) {
  const auto lines = read_lines(p);
  std::string all;
  for (const auto& l : lines) {
    all += l;
    all += '\n';
  }
  return all;
}

int count_occurrences(const std::string& text, const std::string& needle) {
  int n = 0;
  for (std::size_t at = text.find(needle); at != std::string::npos;
       at = text.find(needle, at + needle.size()))
    ++n;
  return n;
}

}  // namespace

TEST_CASE("report tsv lists folds then mean and std") {
  TempDir tmp("report");
  const EvalReport r = handmade_report();
  write_report_tsv(tmp.file("report.tsv"), r);
  const auto lines = read_lines(tmp.file("report.tsv"));
  REQUIRE(lines.size() == 5);
  CHECK(lines[0] ==
        "fold\tauroc\taupr\tf1\taccuracy\trecall\tspecificity\tprecision");
  const auto row1 = split_tabs(lines[1]);
  REQUIRE(row1.size() == 8);
  CHECK(row1[0] == "1");
  CHECK(parse_double(row1[1], "t") == 1.0);
  const auto mean_row = split_tabs(lines[3]);
  CHECK(mean_row[0] == "mean");
  CHECK(parse_double(mean_row[2], "t") == 0.75);
  const auto std_row = split_tabs(lines[4]);
  CHECK(std_row[0] == "std");
  CHECK(parse_double(std_row[1], "t") == std::sqrt(0.5));
}

TEST_CASE("summary text names the protocol and spreads") {
  TempDir tmp("summary");
  write_summary_text(tmp.file("summary.txt"), handmade_report());
  const auto lines = read_lines(tmp.file("summary.txt"));
  REQUIRE(lines.size() >= 2 + kMetricCount);
  CHECK(lines[0] == "mode: warm");
  CHECK(lines[1] == "folds: 2");
  CHECK(lines[2] == std::string("auroc: 0.5 \xC2\xB1 ") +
                        format_double(std::sqrt(0.5)));
}

TEST_CASE("roc svg draws one polyline per fold with known geometry") {
  TempDir tmp("svg");
  write_roc_svg(tmp.file("roc.svg"), handmade_report());
  const std::string svg = slurp(tmp.file("roc.svg"));
  CHECK(svg.find("<svg") == 0);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(svg.find("ROC curves") != std::string::npos);
  CHECK(count_occurrences(svg, "<polyline") == 2);
  // Fold 1 separates perfectly: (0,0) -> (0,1) -> (1,1) in plot coordinates.
  CHECK(svg.find("points=\"50.00,430.00 50.00,50.00 430.00,50.00\"") !=
        std::string::npos);
}

TEST_CASE("pr svg starts at full precision") {
  TempDir tmp("svg");
  write_pr_svg(tmp.file("pr.svg"), handmade_report());
  const std::string svg = slurp(tmp.file("pr.svg"));
  CHECK(svg.find("PR curves") != std::string::npos);
  CHECK(count_occurrences(svg, "<polyline") == 2);
  // Fold 1: (0,1) -> (1,1) -> (1,0.5).
  CHECK(svg.find("points=\"50.00,50.00 430.00,50.00 430.00,240.00\"") !=
        std::string::npos);
}
