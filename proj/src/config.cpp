#include "socdgl/config.hpp"

#include "socdgl/tsv.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <utility>

namespace socdgl {

namespace {

constexpr std::array<std::pair<const char*, const char*>, 41> kDefaults{{
    {"seed", "1"},
    {"mode", "warm"},
    {"variant", "even"},
    {"folds", "10"},
    {"jobs", "1"},
    {"graph.threshold", "0.8"},
    {"negative.ratio", "1"},
    {"admm.beta1", "0.1"},
    {"admm.beta2", "0.1"},
    {"admm.lambda", "1"},
    {"admm.mu0", "0.01"},
    {"admm.rho", "1.3"},
    {"admm.mu_max", "1000000"},
    {"admm.epsilon", "0.000001"},
    {"admm.max_iter", "100"},
    {"filter.k", "200"},
    {"filter.alpha", "0.2"},
    {"filter.parity", "even"},
    {"train.epochs", "500"},
    {"train.learning_rate", "0.001"},
    {"train.optimizer", "adam"},
    {"train.gcn_layers", "2"},
    {"train.gcn_hidden", "512"},
    {"train.embed_dim", "256"},
    {"train.edgl_hidden", "512"},
    {"train.early_stop_patience", "20"},
    {"train.early_stop_min_delta", "0.000001"},
    {"loss.kind", "rlf"},
    {"loss.varpi", "0.2"},
    {"loss.gamma", "2"},
    {"fusion.omega", "0.5"},
    {"data.drug_views", ""},
    {"data.target_views", ""},
    {"data.interactions", ""},
    {"data.drug_affinity", ""},
    {"data.target_affinity", ""},
    {"data.checkpoint", ""},
    {"eval.holdouts", ""},
    {"predict.drug_id", ""},
    {"predict.target_id", ""},
    {"predict.top_n", "10"},
}};

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

}  // namespace

RunConfig RunConfig::defaults() {
  RunConfig cfg;
  for (const auto& [key, value] : kDefaults) cfg.values_[key] = value;
  return cfg;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
  RunConfig cfg = defaults();
  const auto lines = read_lines(path);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string line = trim(lines[i]);
    if (line.empty() || line[0] == '#') continue;
    cfg.apply_line(line, path.string() + " line " + std::to_string(i + 1));
  }
  return cfg;
}

void RunConfig::apply_line(const std::string& line, const std::string& context) {
  const std::size_t eq = line.find('=');
  if (eq == std::string::npos)
    throw io_error("expected 'key = value' in " + context);
  const std::string key = trim(line.substr(0, eq));
  const std::string value = trim(line.substr(eq + 1));
  if (key.empty()) throw io_error("empty config key in " + context);
  try {
    set(key, value);
  } catch (const io_error& e) {
    throw io_error(std::string(e.what()) + " (" + context + ")");
  }
}

void RunConfig::set(const std::string& key, const std::string& value) {
  auto it = values_.find(key);
  if (it == values_.end()) throw io_error("unknown config key: " + key);
  it->second = value;
}

const std::string& RunConfig::get(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw io_error("unknown config key: " + key);
  return it->second;
}

double RunConfig::get_double(const std::string& key) const {
  return parse_double(get(key), "config key " + key);
}

int RunConfig::get_int(const std::string& key) const {
  const std::string& s = get(key);
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw io_error("config key " + key + " needs an integer, got '" + s + "'");
  return v;
}

std::uint64_t RunConfig::get_uint64(const std::string& key) const {
  const std::string& s = get(key);
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw io_error("config key " + key + " needs an unsigned integer, got '" +
                   s + "'");
  return v;
}

std::vector<std::string> RunConfig::get_list(const std::string& key) const {
  const std::string& s = get(key);
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const std::size_t comma = s.find(',', start);
    const std::string item =
        trim(comma == std::string::npos ? s.substr(start)
                                        : s.substr(start, comma - start));
    if (!item.empty()) out.push_back(item);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

AdmmConfig RunConfig::admm() const {
  AdmmConfig cfg;
  cfg.beta1 = get_double("admm.beta1");
  cfg.beta2 = get_double("admm.beta2");
  cfg.lambda = get_double("admm.lambda");
  cfg.mu0 = get_double("admm.mu0");
  cfg.rho = get_double("admm.rho");
  cfg.mu_max = get_double("admm.mu_max");
  cfg.epsilon = get_double("admm.epsilon");
  cfg.max_iter = get_int("admm.max_iter");
  cfg.validate();
  return cfg;
}

FilterConfig RunConfig::filter() const {
  FilterConfig cfg;
  cfg.k = get_int("filter.k");
  cfg.alpha = get_double("filter.alpha");
  cfg.parity = parity_from_string(get("filter.parity"));
  cfg.validate();
  return cfg;
}

LossConfig RunConfig::loss() const {
  LossConfig cfg;
  cfg.kind = loss_kind_from_string(get("loss.kind"));
  cfg.varpi = get_double("loss.varpi");
  cfg.gamma = get_double("loss.gamma");
  cfg.validate();
  return cfg;
}

TrainConfig RunConfig::train() const {
  TrainConfig cfg;
  cfg.epochs = get_int("train.epochs");
  cfg.learning_rate = get_double("train.learning_rate");
  cfg.optimizer = get("train.optimizer");
  cfg.seed = get_uint64("seed");
  cfg.loss = loss();
  cfg.fusion_omega = get_double("fusion.omega");
  cfg.filter = filter();
  cfg.gcn_layers = get_int("train.gcn_layers");
  cfg.gcn_hidden = get_int("train.gcn_hidden");
  cfg.embed_dim = get_int("train.embed_dim");
  cfg.edgl_hidden = get_int("train.edgl_hidden");
  cfg.variant = variant_from_string(get("variant"));
  cfg.early_stop_patience = get_int("train.early_stop_patience");
  cfg.early_stop_min_delta = get_double("train.early_stop_min_delta");
  cfg.validate();
  return cfg;
}

SplitMode RunConfig::mode() const {
  const std::string& m = get("mode");
  if (m == "warm") return SplitMode::warm;
  if (m == "cold_drug") return SplitMode::cold_drug;
  if (m == "cold_target") return SplitMode::cold_target;
  throw io_error("unknown mode: " + m);
}

}  // namespace socdgl
