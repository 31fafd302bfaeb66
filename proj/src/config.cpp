#include "astar_pursuit/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace astar_pursuit {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? s.npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const char* expected) {
  throw std::invalid_argument("config: " + key + " = '" + value + "' is not " + expected);
}

int to_int(const std::string& key, const std::string& v) {
  int out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) bad_value(key, v, "an integer");
  return out;
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) bad_value(key, v, "an unsigned integer");
  return out;
}

double to_real(const std::string& key, const std::string& v) {
  double out = 0.0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) bad_value(key, v, "a number");
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  bad_value(key, v, "a boolean");
}

EquivalenceMode to_equivalence(const std::string& key, const std::string& v) {
  if (v == "trie") return EquivalenceMode::VisitedTrie;
  if (v == "live") return EquivalenceMode::LiveSlots;
  bad_value(key, v, "'trie' or 'live'");
}

std::string_view to_string(EquivalenceMode m) {
  return m == EquivalenceMode::VisitedTrie ? "trie" : "live";
}

// Applies one search key to `cfg`; returns false for unknown keys.
bool apply_search_key(SearchDefaults& cfg, const std::string& key, const std::string& value) {
  if (key == "I") cfg.I = to_int(key, value);
  else if (key == "B") cfg.B = to_int(key, value);
  else if (key == "P") cfg.P = to_int(key, value);
  else if (key == "alpha") cfg.alpha = to_real(key, value);
  else if (key == "beta") cfg.beta = to_real(key, value);
  else if (key == "max_iterations") cfg.max_iterations = to_u64(key, value);
  else if (key == "equivalence") cfg.equivalence = to_equivalence(key, value);
  else return false;
  return true;
}

constexpr std::string_view kAlgoPrefix = "algo.";

}  // namespace

// ---------------------------------------------------------------------------
// IniDocument

IniDocument IniDocument::parse(std::string_view text) {
  IniDocument doc;
  std::string section;
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw;
    const auto comment = line.find_first_of("#;");
    if (comment != std::string::npos) line.erase(comment);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw std::invalid_argument("config line " + std::to_string(line_no) + ": unterminated section");
      }
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      if (!doc.has_section(section)) doc.sections_.push_back({section, {}});
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": expected key = value");
    }
    if (section.empty()) {
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": key outside a section");
    }
    doc.set(section, trim(std::string_view(line).substr(0, eq)),
            trim(std::string_view(line).substr(eq + 1)));
  }
  return doc;
}

void IniDocument::set(const std::string& section, const std::string& key, std::string value) {
  auto it = std::find_if(sections_.begin(), sections_.end(),
                         [&](const auto& s) { return s.first == section; });
  if (it == sections_.end()) {
    sections_.push_back({section, {}});
    it = std::prev(sections_.end());
  }
  for (auto& [k, v] : it->second) {
    if (k == key) {
      v = std::move(value);
      return;
    }
  }
  it->second.emplace_back(key, std::move(value));
}

std::optional<std::string> IniDocument::get(const std::string& section, const std::string& key) const {
  for (const auto& [name, entries] : sections_) {
    if (name != section) continue;
    for (const auto& [k, v] : entries)
      if (k == key) return v;
  }
  return std::nullopt;
}

bool IniDocument::has_section(const std::string& section) const {
  return std::any_of(sections_.begin(), sections_.end(),
                     [&](const auto& s) { return s.first == section; });
}

std::vector<std::string> IniDocument::sections() const {
  std::vector<std::string> out;
  for (const auto& s : sections_) out.push_back(s.first);
  return out;
}

const std::vector<std::pair<std::string, std::string>>& IniDocument::entries(
    const std::string& section) const {
  static const std::vector<std::pair<std::string, std::string>> kEmpty;
  for (const auto& s : sections_)
    if (s.first == section) return s.second;
  return kEmpty;
}

std::string IniDocument::serialize() const {
  std::ostringstream out;
  bool first = true;
  for (const auto& [name, entries] : sections_) {
    if (!first) out << '\n';
    first = false;
    out << '[' << name << "]\n";
    for (const auto& [k, v] : entries) out << k << " = " << v << '\n';
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Sweep axes and value lists

std::string_view to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::K: return "K";
    case SweepAxis::M: return "M";
    case SweepAxis::Alpha: return "alpha";
    case SweepAxis::B: return "B";
    case SweepAxis::P: return "P";
    case SweepAxis::Snr: return "snr";
  }
  return "unknown";
}

SweepAxis parse_sweep_axis(std::string_view s) {
  for (auto a : {SweepAxis::K, SweepAxis::M, SweepAxis::Alpha, SweepAxis::B, SweepAxis::P,
                 SweepAxis::Snr}) {
    if (s == to_string(a)) return a;
  }
  throw std::invalid_argument("unknown sweep axis '" + std::string(s) + "'");
}

std::vector<double> parse_value_list(std::string_view text) {
  std::vector<double> out;
  if (trim(text).empty()) return out;
  for (const auto& item : split(text, ',')) {
    const auto parts = split(item, ':');
    if (parts.size() == 1) {
      out.push_back(to_real("value", parts[0]));
    } else if (parts.size() == 3) {
      const double lo = to_real("range start", parts[0]);
      const double hi = to_real("range end", parts[1]);
      const double step = to_real("range step", parts[2]);
      if (!(step > 0.0)) throw std::invalid_argument("value list: range step must be positive");
      const auto count = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
      for (long i = 0; i <= count; ++i) out.push_back(lo + static_cast<double>(i) * step);
    } else {
      throw std::invalid_argument("value list: malformed item '" + item + "'");
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// RunConfig

RunConfig default_config() {
  RunConfig cfg;
  cfg.algorithms = {{"omp", AlgorithmId::Omp, {}},
                    {"sp", AlgorithmId::Sp, {}},
                    {"mul-aomp", AlgorithmId::MulAstar, {}}};
  return cfg;
}

std::vector<AlgorithmConfig> RunConfig::resolved_algorithms() const {
  std::vector<AlgorithmConfig> out;
  for (const auto& entry : algorithms) {
    SearchDefaults s = search;
    for (const auto& [k, v] : entry.overrides) {
      if (!apply_search_key(s, k, v)) {
        throw std::invalid_argument("config: unknown key '" + k + "' in [algo." + entry.label + "]");
      }
    }
    AlgorithmConfig a;
    a.id = entry.id;
    a.I = s.I;
    a.B = s.B;
    a.P = s.P;
    a.alpha = s.alpha;
    a.beta = s.beta;
    a.max_iterations = s.max_iterations;
    a.equivalence = s.equivalence;
    a.label = entry.label;
    out.push_back(a);
  }
  return out;
}

void RunConfig::validate() const {
  ensemble.validate();
  if (algorithms.empty()) throw std::invalid_argument("config: at least one algorithm is required");
  std::set<std::string> labels;
  for (const auto& a : algorithms) {
    if (!labels.insert(a.label).second) {
      throw std::invalid_argument("config: duplicate algorithm label '" + a.label + "'");
    }
  }
  for (const auto& a : resolved_algorithms()) {
    if (is_astar(a.id)) a.search_params(ensemble.K).validate(ensemble.M, ensemble.N, ensemble.K);
  }
  if (axis && sweep_values.empty()) throw std::invalid_argument("config: sweep axis set without values");
  if (jobs < 1) throw std::invalid_argument("config: jobs must be at least 1");
}

RunConfig RunConfig::from_ini(const IniDocument& doc) {
  RunConfig cfg = default_config();
  for (const auto& section : doc.sections()) {
    for (const auto& [key, value] : doc.entries(section)) {
      const std::string where = section + "." + key;
      if (section == "ensemble") {
        auto& e = cfg.ensemble;
        if (key == "N") e.N = to_int(where, value);
        else if (key == "M") e.M = to_int(where, value);
        else if (key == "K") e.K = to_int(where, value);
        else if (key == "dist") e.coeff_dist = parse_coeff_dist(value);
        else if (key == "matrix") e.matrix_kind = parse_matrix_kind(value);
        else if (key == "sharing") e.matrix_sharing = parse_matrix_sharing(value);
        else if (key == "gaussian_scale") e.gaussian_scale = parse_gaussian_scale(value);
        else if (key == "trials") e.trials = to_int(where, value);
        else if (key == "seed") e.seed = to_u64(where, value);
        else if (key == "snr_db") {
          if (value == "none" || value == "inf") e.snr_db.reset();
          else e.snr_db = to_real(where, value);
        }
        else if (key == "normalize_columns") e.normalize_columns = to_bool(where, value);
        else throw std::invalid_argument("config: unknown key '" + where + "'");
      } else if (section == "search") {
        if (!apply_search_key(cfg.search, key, value)) {
          throw std::invalid_argument("config: unknown key '" + where + "'");
        }
      } else if (section == "algorithms") {
        if (key != "list") throw std::invalid_argument("config: unknown key '" + where + "'");
        cfg.algorithms.clear();
        for (const auto& item : split(value, ',')) {
          if (item.empty()) continue;
          const auto eq = item.find('=');
          AlgorithmEntry entry;
          if (eq == std::string::npos) {
            entry.id = parse_algorithm(item);
            entry.label = item;
          } else {
            entry.label = trim(std::string_view(item).substr(0, eq));
            entry.id = parse_algorithm(trim(std::string_view(item).substr(eq + 1)));
          }
          cfg.algorithms.push_back(entry);
        }
      } else if (section == "sweep") {
        if (key == "axis") {
          if (value == "none" || value.empty()) cfg.axis.reset();
          else cfg.axis = parse_sweep_axis(value);
        } else if (key == "values") {
          cfg.sweep_values = parse_value_list(value);
        } else {
          throw std::invalid_argument("config: unknown key '" + where + "'");
        }
      } else if (section == "output") {
        if (key == "dir") cfg.out_dir = value;
        else if (key == "jobs") cfg.jobs = to_int(where, value);
        else if (key == "timing") cfg.timing = to_bool(where, value);
        else if (key == "exact_threshold") cfg.exact_threshold = to_real(where, value);
        else if (key == "distortion") {
          if (value == "db_of_mean") cfg.distortion = DistortionMode::DbOfMean;
          else if (value == "mean_of_db") cfg.distortion = DistortionMode::MeanOfDb;
          else bad_value(where, value, "'db_of_mean' or 'mean_of_db'");
        } else {
          throw std::invalid_argument("config: unknown key '" + where + "'");
        }
      } else if (section.rfind(kAlgoPrefix, 0) != 0) {
        throw std::invalid_argument("config: unknown section [" + section + "]");
      }
    }
  }
  // Per-algorithm sections are applied once the algorithm list is known.
  for (const auto& section : doc.sections()) {
    if (section.rfind(kAlgoPrefix, 0) != 0) continue;
    const std::string label = section.substr(kAlgoPrefix.size());
    auto it = std::find_if(cfg.algorithms.begin(), cfg.algorithms.end(),
                           [&](const AlgorithmEntry& a) { return a.label == label; });
    if (it == cfg.algorithms.end()) {
      throw std::invalid_argument("config: [" + section + "] names no listed algorithm");
    }
    SearchDefaults probe;
    for (const auto& [key, value] : doc.entries(section)) {
      if (!apply_search_key(probe, key, value)) {
        throw std::invalid_argument("config: unknown key '" + section + "." + key + "'");
      }
      it->overrides[key] = value;
    }
  }
  return cfg;
}

RunConfig RunConfig::from_text(std::string_view text) { return from_ini(IniDocument::parse(text)); }

RunConfig RunConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_text(buf.str());
}

IniDocument RunConfig::to_ini() const {
  IniDocument doc;
  const auto& e = ensemble;
  doc.set("ensemble", "N", std::to_string(e.N));
  doc.set("ensemble", "M", std::to_string(e.M));
  doc.set("ensemble", "K", std::to_string(e.K));
  doc.set("ensemble", "dist", std::string(to_string(e.coeff_dist)));
  doc.set("ensemble", "matrix", std::string(to_string(e.matrix_kind)));
  doc.set("ensemble", "sharing", std::string(to_string(e.matrix_sharing)));
  doc.set("ensemble", "gaussian_scale", std::string(to_string(e.gaussian_scale)));
  doc.set("ensemble", "trials", std::to_string(e.trials));
  doc.set("ensemble", "seed", std::to_string(e.seed));
  doc.set("ensemble", "snr_db", e.snr_db ? format_real(*e.snr_db) : "none");
  doc.set("ensemble", "normalize_columns", e.normalize_columns ? "true" : "false");

  doc.set("search", "I", std::to_string(search.I));
  doc.set("search", "B", std::to_string(search.B));
  doc.set("search", "P", std::to_string(search.P));
  doc.set("search", "alpha", format_real(search.alpha));
  doc.set("search", "beta", format_real(search.beta));
  doc.set("search", "max_iterations", std::to_string(search.max_iterations));
  doc.set("search", "equivalence", std::string(to_string(search.equivalence)));

  std::string list;
  for (const auto& a : algorithms) {
    if (!list.empty()) list += ", ";
    list += a.label == to_string(a.id) ? a.label : a.label + "=" + std::string(to_string(a.id));
  }
  doc.set("algorithms", "list", list);

  doc.set("sweep", "axis", axis ? std::string(to_string(*axis)) : "none");
  std::string values;
  for (double v : sweep_values) {
    if (!values.empty()) values += ", ";
    values += format_real(v);
  }
  doc.set("sweep", "values", values);

  doc.set("output", "dir", out_dir.string());
  doc.set("output", "jobs", std::to_string(jobs));
  doc.set("output", "timing", timing ? "true" : "false");
  doc.set("output", "exact_threshold", format_real(exact_threshold));
  doc.set("output", "distortion",
          distortion == DistortionMode::DbOfMean ? "db_of_mean" : "mean_of_db");

  for (const auto& a : algorithms) {
    for (const auto& [k, v] : a.overrides) doc.set(std::string(kAlgoPrefix) + a.label, k, v);
  }
  return doc;
}

void RunConfig::set(const std::string& dotted_key, const std::string& value) {
  const auto dot = dotted_key.rfind('.');
  if (dot == std::string::npos || dot == 0 || dot + 1 == dotted_key.size()) {
    throw std::invalid_argument("config override '" + dotted_key + "' must look like section.key");
  }
  IniDocument doc = to_ini();
  doc.set(dotted_key.substr(0, dot), dotted_key.substr(dot + 1), value);
  *this = from_ini(doc);
}

}  // namespace astar_pursuit
