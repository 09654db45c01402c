#include "socdgl/dataio.hpp"

#include "socdgl/rng.hpp"
#include "socdgl/tsv.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace socdgl {

namespace fs = std::filesystem;

std::vector<std::string> read_view_ids(const fs::path& path) {
  const auto lines = read_lines(path);
  if (lines.empty()) throw io_error("empty view file: " + path.string());
  return split_tabs(lines[0]);
}

FeatureView parse_feature_view(const fs::path& path, EntityKind entity_kind,
                               const EntitySet& entities) {
  const auto lines = read_lines(path);
  if (lines.empty()) throw io_error("empty view file: " + path.string());

  const auto& ids = entities.ids(entity_kind);
  const int n = static_cast<int>(ids.size());
  std::unordered_map<std::string, int> id_to_col;
  for (int i = 0; i < n; ++i) id_to_col.emplace(ids[i], i);

  const auto header = split_tabs(lines[0]);
  if (static_cast<int>(header.size()) != n)
    throw io_error(path.string() + ": header has " + std::to_string(header.size()) +
                   " identifiers, expected " + std::to_string(n));
  // column_of[j] = destination column for source column j
  std::vector<int> column_of(n);
  std::vector<bool> seen(n, false);
  for (int j = 0; j < n; ++j) {
    const auto it = id_to_col.find(header[j]);
    if (it == id_to_col.end())
      throw io_error(path.string() + ": unknown identifier in header: " + header[j]);
    if (seen[it->second])
      throw io_error(path.string() + ": duplicate header identifier: " + header[j]);
    seen[it->second] = true;
    column_of[j] = it->second;
  }

  const int rows = static_cast<int>(lines.size()) - 1;
  if (rows < 1) throw io_error(path.string() + ": no feature rows");
  FeatureView view;
  view.entity_kind = entity_kind;
  view.values.resize(rows, n);
  for (int r = 0; r < rows; ++r) {
    const auto cells = split_tabs(lines[r + 1]);
    if (static_cast<int>(cells.size()) != n)
      throw io_error(path.string() + ": row " + std::to_string(r + 2) + " has " +
                     std::to_string(cells.size()) + " cells, expected " +
                     std::to_string(n));
    for (int j = 0; j < n; ++j)
      view.values(r, column_of[j]) =
          parse_double(cells[j], path.string() + " row " + std::to_string(r + 2));
  }
  return view;
}

InteractionSet parse_interactions(const fs::path& path, const EntitySet& entities) {
  const auto lines = read_lines(path);
  InteractionSet out;
  out.matrix = Matrix::Zero(entities.n_d(), entities.n_t());

  std::map<Pair, int> label_of;  // ordered: keeps reporting deterministic
  PairList order;
  for (std::size_t ln = 0; ln < lines.size(); ++ln) {
    if (lines[ln].empty()) continue;
    const auto cells = split_tabs(lines[ln]);
    if (cells.size() != 3)
      throw io_error(path.string() + ": line " + std::to_string(ln + 1) +
                     " is not a drug/target/label triple");
    const int d = entities.drug_index(cells[0]);
    if (d < 0) throw io_error(path.string() + ": unknown drug identifier: " + cells[0]);
    const int t = entities.target_index(cells[1]);
    if (t < 0)
      throw io_error(path.string() + ": unknown target identifier: " + cells[1]);
    int label;
    if (cells[2] == "0") label = 0;
    else if (cells[2] == "1") label = 1;
    else
      throw io_error(path.string() + ": label outside {0,1}: " + cells[2]);

    const Pair p{d, t};
    const auto it = label_of.find(p);
    if (it != label_of.end()) {
      if (it->second != label)
        throw io_error(path.string() + ": conflicting duplicate pair " + cells[0] +
                       "/" + cells[1]);
      continue;
    }
    label_of.emplace(p, label);
    order.push_back(p);
  }

  for (const auto& p : order) {
    if (label_of[p] == 1) {
      out.positives.push_back(p);
      out.matrix(p.first, p.second) = 1.0;
    } else {
      out.negatives.push_back(p);
    }
  }
  return out;
}

void write_interactions(const fs::path& path, const InteractionSet& interactions,
                        const EntitySet& entities) {
  std::ostringstream out;
  for (const auto& [d, t] : interactions.positives)
    out << entities.drug_ids[d] << '\t' << entities.target_ids[t] << "\t1\n";
  for (const auto& [d, t] : interactions.negatives)
    out << entities.drug_ids[d] << '\t' << entities.target_ids[t] << "\t0\n";
  atomic_write(path, out.str());
}

InteractionSet sample_negatives(const InteractionSet& interactions,
                                const AffinityMatrix& drug_affinity, double ratio,
                                std::uint64_t seed) {
  if (ratio <= 0.0) throw io_error("negative sampling ratio must be positive");
  if (drug_affinity.n() != interactions.n_d())
    throw io_error("drug affinity size does not match interaction matrix");

  const std::size_t target_count = static_cast<std::size_t>(
      std::floor(ratio * static_cast<double>(interactions.positives.size())));
  if (target_count == 0)
    throw io_error("negative sampling ratio yields zero negatives");

  InteractionSet out = interactions;
  if (out.negatives.size() >= target_count) return out;
  const std::size_t need = target_count - out.negatives.size();

  std::unordered_set<long long> labeled;
  auto key = [&](int d, int t) {
    return static_cast<long long>(d) * interactions.n_t() + t;
  };
  for (const auto& [d, t] : interactions.positives) labeled.insert(key(d, t));
  for (const auto& [d, t] : interactions.negatives) labeled.insert(key(d, t));

  // Drugs positively linked to each target.
  std::vector<std::vector<int>> pos_drugs(interactions.n_t());
  for (const auto& [d, t] : interactions.positives) pos_drugs[t].push_back(d);

  struct Candidate {
    Pair pair;
    double score;
  };
  std::vector<Candidate> candidates;
  for (int d = 0; d < interactions.n_d(); ++d) {
    for (int t = 0; t < interactions.n_t(); ++t) {
      if (labeled.count(key(d, t))) continue;
      double score = 0.0;
      for (const int dp : pos_drugs[t])
        score = std::max(score, drug_affinity.values(d, dp));
      candidates.push_back({{d, t}, score});
    }
  }
  if (candidates.size() < need)
    throw io_error("insufficient unknown pairs: need " + std::to_string(need) +
                   ", have " + std::to_string(candidates.size()));

  Rng rng(seed);
  rng.shuffle(candidates);
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Candidate& a, const Candidate& b) {
                     return a.score < b.score;
                   });
  for (std::size_t i = 0; i < need; ++i) out.negatives.push_back(candidates[i].pair);
  return out;
}

SplitPlan plan_splits(const InteractionSet& interactions, const EntitySet& entities,
                      SplitMode mode, int k,
                      const std::vector<std::string>& holdout_ids,
                      std::uint64_t seed) {
  SplitPlan plan;
  plan.mode = mode;
  plan.seed = seed;

  PairList labeled = interactions.positives;
  labeled.insert(labeled.end(), interactions.negatives.begin(),
                 interactions.negatives.end());

  if (mode == SplitMode::warm) {
    if (k < 2) throw io_error("warm split needs k >= 2");
    if (static_cast<std::size_t>(k) > labeled.size())
      throw io_error("fold count " + std::to_string(k) + " exceeds pair count " +
                     std::to_string(labeled.size()));
    Rng rng(seed);
    rng.shuffle(labeled);
    const std::size_t n = labeled.size();
    const std::size_t base = n / k;
    const std::size_t extra = n % k;
    std::size_t offset = 0;
    for (int f = 0; f < k; ++f) {
      const std::size_t len = base + (static_cast<std::size_t>(f) < extra ? 1 : 0);
      SplitPlan::Fold fold;
      fold.test.assign(labeled.begin() + offset, labeled.begin() + offset + len);
      fold.train.assign(labeled.begin(), labeled.begin() + offset);
      fold.train.insert(fold.train.end(), labeled.begin() + offset + len,
                        labeled.end());
      plan.folds.push_back(std::move(fold));
      offset += len;
    }
    return plan;
  }

  if (holdout_ids.empty()) throw io_error("cold split needs holdout identifiers");
  const bool by_drug = mode == SplitMode::cold_drug;
  for (const auto& id : holdout_ids) {
    const int idx = by_drug ? entities.drug_index(id) : entities.target_index(id);
    if (idx < 0)
      throw io_error(std::string("unknown holdout ") +
                     (by_drug ? "drug" : "target") + " identifier: " + id);
    SplitPlan::Fold fold;
    fold.holdout_id = id;
    for (const auto& p : labeled) {
      const int entity = by_drug ? p.first : p.second;
      (entity == idx ? fold.test : fold.train).push_back(p);
    }
    if (fold.test.empty())
      throw io_error("holdout " + id + " has no labeled pairs");
    plan.folds.push_back(std::move(fold));
  }
  return plan;
}

}  // namespace socdgl
