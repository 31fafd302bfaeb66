// Run configuration for the benchmark harness and its INI-style text form.
//
//   [section]
//   key = value      # comments start with '#' or ';'
//
// Sections: ensemble, search, algorithms, sweep, output, and one optional
// [algo.<label>] section per algorithm overriding the [search] defaults.
#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "astar_pursuit/algorithms.hpp"
#include "astar_pursuit/metrics.hpp"
#include "astar_pursuit/synth.hpp"

namespace astar_pursuit {

/// Ordered section -> key -> value map.
class IniDocument {
 public:
  static IniDocument parse(std::string_view text);

  void set(const std::string& section, const std::string& key, std::string value);
  std::optional<std::string> get(const std::string& section, const std::string& key) const;
  bool has_section(const std::string& section) const;
  std::vector<std::string> sections() const;
  const std::vector<std::pair<std::string, std::string>>& entries(const std::string& section) const;

  std::string serialize() const;

 private:
  std::vector<std::pair<std::string, std::vector<std::pair<std::string, std::string>>>> sections_;
};

enum class SweepAxis { K, M, Alpha, B, P, Snr };

std::string_view to_string(SweepAxis axis);
SweepAxis parse_sweep_axis(std::string_view s);

struct SearchDefaults {
  int I = 3;
  int B = 2;
  int P = 200;
  double alpha = 0.8;
  double beta = 1.25;
  std::size_t max_iterations = 0;
  EquivalenceMode equivalence = EquivalenceMode::VisitedTrie;
};

struct AlgorithmEntry {
  std::string label;  // unique within a config
  AlgorithmId id = AlgorithmId::MulAstar;
  /// Keys from an [algo.<label>] section, applied over SearchDefaults.
  std::map<std::string, std::string> overrides;
};

struct RunConfig {
  EnsembleSpec ensemble;
  SearchDefaults search;
  std::vector<AlgorithmEntry> algorithms;
  std::optional<SweepAxis> axis;
  std::vector<double> sweep_values;
  std::filesystem::path out_dir = ".";
  int jobs = 1;
  bool timing = false;
  double exact_threshold = kExactNmse;
  DistortionMode distortion = DistortionMode::DbOfMean;

  /// The algorithms with defaults and overrides resolved.
  std::vector<AlgorithmConfig> resolved_algorithms() const;
  void validate() const;

  static RunConfig from_ini(const IniDocument& doc);
  static RunConfig from_text(std::string_view text);
  static RunConfig load(const std::filesystem::path& path);
  IniDocument to_ini() const;

  /// Applies one `section.key=value` assignment with config-file semantics.
  void set(const std::string& dotted_key, const std::string& value);
};

/// Paper defaults: N=256, M=100, I=3, B=2, P=200, beta=1.25, alpha=0.8.
RunConfig default_config();

/// Parses a comma-separated list; ranges "a:b:step" expand inclusively.
std::vector<double> parse_value_list(std::string_view text);

}  // namespace astar_pursuit
