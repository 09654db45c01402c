#include "socdgl/evaluation.hpp"

#include "socdgl/graphs.hpp"
#include "socdgl/rng.hpp"
#include "socdgl/tsv.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <thread>

namespace socdgl {

namespace {

constexpr double kClassifyThreshold = 0.5;

void check_scored_labels(const std::vector<double>& scores,
                         const std::vector<int>& labels) {
  if (scores.size() != labels.size())
    throw io_error("scores and labels differ in length");
  if (scores.empty()) throw io_error("empty metric input");
  for (double s : scores)
    if (!std::isfinite(s)) throw numerical_error("non-finite score");
  for (int l : labels)
    if (l != 0 && l != 1) throw io_error("labels must be 0 or 1");
}

// Indices ordered by descending score; equal scores keep input order.
std::vector<int> descending_order(const std::vector<double>& scores) {
  std::vector<int> idx(scores.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&scores](int a, int b) { return scores[a] > scores[b]; });
  return idx;
}

}  // namespace

double auroc(const std::vector<double>& scores, const std::vector<int>& labels) {
  check_scored_labels(scores, labels);
  const int n = static_cast<int>(scores.size());
  long long np = 0;
  for (int l : labels) np += l;
  const long long nn = n - np;
  if (np == 0 || nn == 0) throw io_error("auroc needs both classes present");

  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&scores](int a, int b) { return scores[a] < scores[b]; });
  // Midranks: a run of equal scores at positions i..j-1 (0-based) all get
  // rank (i+j+1)/2.
  double positive_rank_sum = 0.0;
  int i = 0;
  while (i < n) {
    int j = i + 1;
    while (j < n && scores[idx[j]] == scores[idx[i]]) ++j;
    const double rank = (i + j + 1) / 2.0;
    for (int k = i; k < j; ++k)
      if (labels[idx[k]] == 1) positive_rank_sum += rank;
    i = j;
  }
  return (positive_rank_sum - np * (np + 1) / 2.0) /
         (static_cast<double>(np) * static_cast<double>(nn));
}

double aupr(const std::vector<double>& scores, const std::vector<int>& labels) {
  check_scored_labels(scores, labels);
  long long np = 0;
  for (int l : labels) np += l;
  if (np == 0) throw io_error("aupr needs at least one positive");

  const auto idx = descending_order(scores);
  long long tp = 0;
  double sum = 0.0;
  for (std::size_t r = 0; r < idx.size(); ++r) {
    if (labels[idx[r]] == 1) {
      ++tp;
      sum += static_cast<double>(tp) / static_cast<double>(r + 1);
    }
  }
  return sum / static_cast<double>(np);
}

ThresholdMetrics thresholded_metrics(const std::vector<double>& scores,
                                     const std::vector<int>& labels,
                                     double threshold) {
  check_scored_labels(scores, labels);
  long long tp = 0, fp = 0, tn = 0, fn = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const bool predicted = scores[i] >= threshold;
    if (labels[i] == 1)
      predicted ? ++tp : ++fn;
    else
      predicted ? ++fp : ++tn;
  }
  auto ratio = [](long long num, long long den) {
    return den > 0 ? static_cast<double>(num) / static_cast<double>(den) : 0.0;
  };
  ThresholdMetrics m;
  m.accuracy = ratio(tp + tn, tp + tn + fp + fn);
  m.precision = ratio(tp, tp + fp);
  m.recall = ratio(tp, tp + fn);
  m.specificity = ratio(tn, tn + fp);
  m.f1 = m.precision + m.recall > 0.0
             ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
             : 0.0;
  return m;
}

const std::array<const char*, kMetricCount> kMetricNames = {
    "auroc", "aupr", "f1", "accuracy", "recall", "specificity", "precision"};

namespace {

constexpr std::array<double EvalMetrics::*, kMetricCount> kMetricFields = {
    &EvalMetrics::auroc,    &EvalMetrics::aupr,        &EvalMetrics::f1,
    &EvalMetrics::accuracy, &EvalMetrics::recall,      &EvalMetrics::specificity,
    &EvalMetrics::precision};

}  // namespace

std::array<double, kMetricCount> metric_values(const EvalMetrics& m) {
  std::array<double, kMetricCount> out{};
  for (int i = 0; i < kMetricCount; ++i) out[i] = m.*kMetricFields[i];
  return out;
}

namespace {

FoldEval eval_fold(const ProtocolData& data, const SplitPlan::Fold& fold,
                   const TrainConfig& base_cfg, int fold_index) {
  TrainConfig cfg = base_cfg;
  cfg.seed = derive_seed(base_cfg.seed, static_cast<std::uint64_t>(fold_index));

  const Matrix a_dt = mask_test_pairs(data.interactions.matrix, fold.test);
  const GlobalGraph graph = assemble_global(
      data.drug_affinity, data.target_affinity, a_dt, data.binarize_threshold);

  PairList train_pos, train_neg;
  for (const auto& pr : fold.train)
    (data.interactions.matrix(pr.first, pr.second) == 1.0 ? train_pos
                                                          : train_neg)
        .push_back(pr);
  const FitResult fitted = fit(graph, train_pos, train_neg, cfg);
  const Matrix scores = forward(graph, fitted.params, cfg);

  FoldEval ev;
  ev.scores.reserve(fold.test.size());
  ev.labels.reserve(fold.test.size());
  for (const auto& pr : fold.test) {
    ev.scores.push_back(scores(pr.first, pr.second));
    ev.labels.push_back(
        data.interactions.matrix(pr.first, pr.second) == 1.0 ? 1 : 0);
  }
  ev.metrics.auroc = auroc(ev.scores, ev.labels);
  ev.metrics.aupr = aupr(ev.scores, ev.labels);
  const ThresholdMetrics tm =
      thresholded_metrics(ev.scores, ev.labels, kClassifyThreshold);
  ev.metrics.f1 = tm.f1;
  ev.metrics.accuracy = tm.accuracy;
  ev.metrics.recall = tm.recall;
  ev.metrics.specificity = tm.specificity;
  ev.metrics.precision = tm.precision;
  return ev;
}

std::exception_ptr tag_fold_error(int fold_index) {
  const std::string prefix = "fold " + std::to_string(fold_index + 1) + ": ";
  try {
    throw;
  } catch (const io_error& e) {
    return std::make_exception_ptr(io_error(prefix + e.what()));
  } catch (const numerical_error& e) {
    return std::make_exception_ptr(numerical_error(prefix + e.what()));
  } catch (const std::exception& e) {
    return std::make_exception_ptr(numerical_error(prefix + e.what()));
  }
}

}  // namespace

EvalReport run_protocol(const ProtocolData& data, const SplitPlan& plan,
                        const TrainConfig& cfg, int jobs) {
  if (plan.folds.empty()) throw io_error("split plan has no folds");
  if (jobs < 1) throw io_error("jobs must be >= 1");
  if (data.drug_affinity.n() != data.interactions.n_d() ||
      data.target_affinity.n() != data.interactions.n_t())
    throw io_error("affinity sizes do not match the interaction matrix");
  cfg.validate();

  const int nf = static_cast<int>(plan.folds.size());
  EvalReport report;
  report.mode = plan.mode;
  report.per_fold.resize(nf);
  std::vector<std::exception_ptr> errors(nf);

  std::atomic<int> next{0};
  auto worker = [&]() {
    while (true) {
      const int f = next.fetch_add(1);
      if (f >= nf) return;
      try {
        report.per_fold[f] = eval_fold(data, plan.folds[f], cfg, f);
      } catch (...) {
        errors[f] = tag_fold_error(f);
      }
    }
  };
  const int threads = std::min(jobs, nf);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (int f = 0; f < nf; ++f)
    if (errors[f]) std::rethrow_exception(errors[f]);

  for (int f = 0; f < nf; ++f) {
    auto& ev = report.per_fold[f];
    ev.label = plan.folds[f].holdout_id.empty() ? std::to_string(f + 1)
                                                : plan.folds[f].holdout_id;
  }

  for (int i = 0; i < kMetricCount; ++i) {
    double sum = 0.0;
    for (const auto& ev : report.per_fold) sum += ev.metrics.*kMetricFields[i];
    const double mean = sum / nf;
    report.mean.*kMetricFields[i] = mean;
    double sq = 0.0;
    for (const auto& ev : report.per_fold) {
      const double d = ev.metrics.*kMetricFields[i] - mean;
      sq += d * d;
    }
    report.stddev.*kMetricFields[i] = nf > 1 ? std::sqrt(sq / (nf - 1)) : 0.0;
  }
  return report;
}

void write_report_tsv(const std::filesystem::path& path,
                      const EvalReport& report) {
  std::ostringstream out;
  out << "fold";
  for (const char* name : kMetricNames) out << '\t' << name;
  out << '\n';
  auto emit = [&out](const std::string& label, const EvalMetrics& m) {
    out << label;
    for (double v : metric_values(m)) out << '\t' << format_double(v);
    out << '\n';
  };
  for (const auto& ev : report.per_fold) emit(ev.label, ev.metrics);
  emit("mean", report.mean);
  emit("std", report.stddev);
  atomic_write(path, out.str());
}

void write_summary_text(const std::filesystem::path& path,
                        const EvalReport& report) {
  std::ostringstream out;
  out << "mode: " << to_string(report.mode) << '\n';
  out << "folds: " << report.per_fold.size() << '\n';
  const auto means = metric_values(report.mean);
  const auto stds = metric_values(report.stddev);
  for (int i = 0; i < kMetricCount; ++i)
    out << kMetricNames[i] << ": " << format_double(means[i]) << " ± "
        << format_double(stds[i]) << '\n';
  atomic_write(path, out.str());
}

namespace {

using Curve = std::vector<std::pair<double, double>>;

Curve roc_points(const std::vector<double>& scores,
                 const std::vector<int>& labels) {
  const auto idx = descending_order(scores);
  long long np = 0;
  for (int l : labels) np += l;
  const long long nn = static_cast<long long>(labels.size()) - np;
  Curve pts{{0.0, 0.0}};
  long long tp = 0, fp = 0;
  for (int i : idx) {
    labels[i] == 1 ? ++tp : ++fp;
    pts.emplace_back(nn > 0 ? static_cast<double>(fp) / nn : 0.0,
                     np > 0 ? static_cast<double>(tp) / np : 0.0);
  }
  return pts;
}

Curve pr_points(const std::vector<double>& scores,
                const std::vector<int>& labels) {
  const auto idx = descending_order(scores);
  long long np = 0;
  for (int l : labels) np += l;
  Curve pts{{0.0, 1.0}};
  long long tp = 0;
  for (std::size_t r = 0; r < idx.size(); ++r) {
    if (labels[idx[r]] == 1) ++tp;
    pts.emplace_back(np > 0 ? static_cast<double>(tp) / np : 0.0,
                     static_cast<double>(tp) / static_cast<double>(r + 1));
  }
  return pts;
}

const char* curve_color(int i) {
  static const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                   "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
                                   "#bcbd22", "#17becf"};
  return kPalette[i % 10];
}

std::string fixed2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

void write_curve_svg(const std::filesystem::path& path, const EvalReport& report,
                     const char* title, const char* xlabel, const char* ylabel,
                     Curve (*curve)(const std::vector<double>&,
                                    const std::vector<int>&)) {
  constexpr double kSize = 480.0, kMargin = 50.0;
  const double span = kSize - 2.0 * kMargin;
  auto px = [&](double x) { return kMargin + x * span; };
  auto py = [&](double y) { return kSize - kMargin - y * span; };

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"480\" "
         "height=\"480\" viewBox=\"0 0 480 480\">\n";
  out << "<rect width=\"480\" height=\"480\" fill=\"white\"/>\n";
  out << "<rect x=\"" << fixed2(kMargin) << "\" y=\"" << fixed2(kMargin)
      << "\" width=\"" << fixed2(span) << "\" height=\"" << fixed2(span)
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  out << "<text x=\"240\" y=\"25\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"16\">"
      << title << "</text>\n";
  out << "<text x=\"240\" y=\"465\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"12\">"
      << xlabel << "</text>\n";
  out << "<text x=\"15\" y=\"240\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"12\" "
         "transform=\"rotate(-90 15 240)\">"
      << ylabel << "</text>\n";
  for (const char* tick : {"0", "0.5", "1"}) {
    const double v = tick[0] == '0' && tick[1] == '\0' ? 0.0
                     : tick[0] == '1'                  ? 1.0
                                                       : 0.5;
    out << "<text x=\"" << fixed2(px(v)) << "\" y=\"" << fixed2(kSize - kMargin + 18)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"10\">"
        << tick << "</text>\n";
    out << "<text x=\"" << fixed2(kMargin - 8) << "\" y=\"" << fixed2(py(v) + 3)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
           "font-size=\"10\">"
        << tick << "</text>\n";
  }
  for (std::size_t f = 0; f < report.per_fold.size(); ++f) {
    const auto pts = curve(report.per_fold[f].scores, report.per_fold[f].labels);
    out << "<polyline fill=\"none\" stroke=\"" << curve_color(static_cast<int>(f))
        << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (i) out << ' ';
      out << fixed2(px(pts[i].first)) << ',' << fixed2(py(pts[i].second));
    }
    out << "\"/>\n";
  }
  out << "</svg>\n";
  atomic_write(path, out.str());
}

}  // namespace

void write_roc_svg(const std::filesystem::path& path, const EvalReport& report) {
  write_curve_svg(path, report, "ROC curves", "false positive rate",
                  "true positive rate", &roc_points);
}

void write_pr_svg(const std::filesystem::path& path, const EvalReport& report) {
  write_curve_svg(path, report, "PR curves", "recall", "precision", &pr_points);
}

}  // namespace socdgl
