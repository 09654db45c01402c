#pragma once

#include "socdgl/trainer.hpp"
#include "socdgl/types.hpp"

#include <array>
#include <filesystem>
#include <string>
#include <vector>

namespace socdgl {

// Rank-statistic AUROC; ties count one half. Both classes must be present.
double auroc(const std::vector<double>& scores, const std::vector<int>& labels);

// Step-interpolated average precision over descending scores; ties keep
// stable index order. Needs at least one positive.
double aupr(const std::vector<double>& scores, const std::vector<int>& labels);

struct ThresholdMetrics {
  double f1 = 0.0;
  double accuracy = 0.0;
  double recall = 0.0;
  double specificity = 0.0;
  double precision = 0.0;
};

// Confusion-matrix metrics with score >= threshold predicting positive.
// Degenerate denominators yield 0.
ThresholdMetrics thresholded_metrics(const std::vector<double>& scores,
                                     const std::vector<int>& labels,
                                     double threshold);

struct EvalMetrics {
  double auroc = 0.0;
  double aupr = 0.0;
  double f1 = 0.0;
  double accuracy = 0.0;
  double recall = 0.0;
  double specificity = 0.0;
  double precision = 0.0;
};

inline constexpr int kMetricCount = 7;
extern const std::array<const char*, kMetricCount> kMetricNames;
std::array<double, kMetricCount> metric_values(const EvalMetrics& m);

struct FoldEval {
  std::string label;           // fold number, or holdout id for cold modes
  EvalMetrics metrics;
  std::vector<double> scores;  // test pairs in fold order
  std::vector<int> labels;
};

struct EvalReport {
  SplitMode mode = SplitMode::warm;
  std::vector<FoldEval> per_fold;
  EvalMetrics mean;
  EvalMetrics stddev;  // sample std over folds, 0 for a single fold
};

// Inputs shared by every fold of a protocol run.
struct ProtocolData {
  AffinityMatrix drug_affinity;
  AffinityMatrix target_affinity;
  InteractionSet interactions;
  double binarize_threshold = 0.8;
};

// Cross-validated mask/fit/score loop. Fold seeds derive from cfg.seed and
// the fold index, so the report does not depend on the job count. A failing
// fold aborts the whole run with its index attached.
EvalReport run_protocol(const ProtocolData& data, const SplitPlan& plan,
                        const TrainConfig& cfg, int jobs);

void write_report_tsv(const std::filesystem::path& path, const EvalReport& report);
void write_summary_text(const std::filesystem::path& path,
                        const EvalReport& report);
void write_roc_svg(const std::filesystem::path& path, const EvalReport& report);
void write_pr_svg(const std::filesystem::path& path, const EvalReport& report);

}  // namespace socdgl
