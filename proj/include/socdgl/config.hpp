#pragma once

#include "socdgl/affinity.hpp"
#include "socdgl/encoders.hpp"
#include "socdgl/losses.hpp"
#include "socdgl/trainer.hpp"
#include "socdgl/types.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace socdgl {

// Flat dotted-key configuration. Every key has a default, unknown keys are
// rejected, and file values can be overridden one key at a time (CLI flags
// funnel through set()).
class RunConfig {
 public:
  static RunConfig defaults();
  // defaults() overlaid with "key = value" lines from the file; '#' lines
  // and blank lines are ignored.
  static RunConfig load(const std::filesystem::path& path);

  void set(const std::string& key, const std::string& value);
  void apply_line(const std::string& line, const std::string& context);

  const std::string& get(const std::string& key) const;
  double get_double(const std::string& key) const;
  int get_int(const std::string& key) const;
  std::uint64_t get_uint64(const std::string& key) const;
  // Comma-separated list value; empty string means empty list.
  std::vector<std::string> get_list(const std::string& key) const;

  AdmmConfig admm() const;
  FilterConfig filter() const;
  LossConfig loss() const;
  // Full training bundle: loss, filter, variant, omega and seed included.
  TrainConfig train() const;
  SplitMode mode() const;

  const std::map<std::string, std::string>& entries() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace socdgl
