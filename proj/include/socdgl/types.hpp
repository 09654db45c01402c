#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace socdgl {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Pair = std::pair<int, int>;  // (drug_index, target_index)
using PairList = std::vector<Pair>;

// Input-side failures: bad files, bad identifiers, bad config values.
struct io_error : std::runtime_error {
  explicit io_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical failures: divergence, non-finite intermediates.
struct numerical_error : std::runtime_error {
  explicit numerical_error(const std::string& msg) : std::runtime_error(msg) {}
};

enum class EntityKind { drug, target };

inline const char* to_string(EntityKind k) {
  return k == EntityKind::drug ? "drug" : "target";
}

// Ordered id universe for one dataset. Index positions are the canonical
// row/column order everywhere downstream.
struct EntitySet {
  std::vector<std::string> drug_ids;
  std::vector<std::string> target_ids;

  int n_d() const { return static_cast<int>(drug_ids.size()); }
  int n_t() const { return static_cast<int>(target_ids.size()); }

  const std::vector<std::string>& ids(EntityKind k) const {
    return k == EntityKind::drug ? drug_ids : target_ids;
  }

  int drug_index(const std::string& id) const { return lookup(drug_ids, id); }
  int target_index(const std::string& id) const { return lookup(target_ids, id); }

  void validate() const {
    check_unique(drug_ids, "drug");
    check_unique(target_ids, "target");
  }

 private:
  static int lookup(const std::vector<std::string>& ids, const std::string& id) {
    for (int i = 0; i < static_cast<int>(ids.size()); ++i)
      if (ids[i] == id) return i;
    return -1;
  }
  static void check_unique(const std::vector<std::string>& ids, const char* kind) {
    std::unordered_map<std::string, int> seen;
    for (const auto& id : ids) {
      if (id.empty()) throw io_error(std::string("empty ") + kind + " identifier");
      if (!seen.emplace(id, 1).second)
        throw io_error(std::string("duplicate ") + kind + " identifier: " + id);
    }
  }
};

// One feature matrix (one view). Columns are entities, rows are features.
struct FeatureView {
  EntityKind entity_kind = EntityKind::drug;
  Matrix values;  // v_i x n

  int dim() const { return static_cast<int>(values.rows()); }
  int entities() const { return static_cast<int>(values.cols()); }
};

// Labeled interaction data. matrix is n_d x n_t binary with ones exactly at
// the positive pairs; pairs absent from both lists are unknown.
struct InteractionSet {
  Matrix matrix;
  PairList positives;
  PairList negatives;

  int n_d() const { return static_cast<int>(matrix.rows()); }
  int n_t() const { return static_cast<int>(matrix.cols()); }
};

enum class SplitMode { warm, cold_drug, cold_target };

inline const char* to_string(SplitMode m) {
  switch (m) {
    case SplitMode::warm: return "warm";
    case SplitMode::cold_drug: return "cold_drug";
    default: return "cold_target";
  }
}

struct SplitPlan {
  struct Fold {
    PairList train;
    PairList test;
    std::string holdout_id;  // cold modes only
  };
  SplitMode mode = SplitMode::warm;
  std::vector<Fold> folds;
  std::uint64_t seed = 0;
};

// Learned symmetric similarity matrix, min-max normalized into [0,1].
// degenerate is set when all raw entries were equal and the result was
// forced to zero.
struct AffinityMatrix {
  Matrix values;
  EntityKind kind = EntityKind::drug;
  bool degenerate = false;

  int n() const { return static_cast<int>(values.rows()); }
};

}  // namespace socdgl
