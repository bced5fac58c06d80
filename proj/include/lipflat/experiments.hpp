#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lipflat/graph.hpp"
#include "lipflat/height_function.hpp"
#include "lipflat/samplers.hpp"

namespace lipflat {

// Generator spec, seeded where random:
//   complete:N  cycle:N  path:N  complete-bipartite:M  hypercube:D
//   random-regular:N:D  random-bipartite-regular:N:D  tree:D:H (glued)  file:PATH
Graph graph_from_spec(const std::string& spec, std::uint64_t seed);

enum class ExperimentKind { deviation, max, tree, hom_exact };
enum class SamplerKind { exact, mcmc };
enum class LambdaSource { spectral, exhaustive, explicit_value };
enum class ReportFormat { csv, jsonl };
enum class HypothesisPolicy { report, assert_met };
enum class TreePrecision { automatic, exact, log };

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::deviation;
  std::string graph = "complete:4";
  FunctionMode mode = FunctionMode::lipschitz(1);
  Vertex v0 = 0;
  std::vector<Vertex> targets;  // empty: every vertex (tree kind: the root)
  std::size_t t_min = 1;
  std::optional<std::size_t> t_max;  // default from the diameter bound
  SamplerKind sampler = SamplerKind::exact;
  std::uint64_t burnin = 10'000;
  std::uint64_t thin = 10;
  std::uint64_t samples = 1000;  // per chain
  std::size_t chains = 1;
  LambdaSource lambda_source = LambdaSource::spectral;
  double lambda = 0.0;  // explicit value
  HypothesisPolicy hypotheses = HypothesisPolicy::report;
  TreePrecision tree_precision = TreePrecision::automatic;
  std::uint64_t seed = 1;
  std::uint64_t cap = 10'000'000;
  std::string out;
  ReportFormat format = ReportFormat::csv;
  unsigned threads = 1;  // never changes results
};

// key = value lines, '#' starts a comment. Unknown keys and bad values throw parse.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::string& path);
void apply_setting(ExperimentConfig& config, const std::string& key, const std::string& value);
// Throws invalid_argument on inconsistent settings.
void validate_config(const ExperimentConfig& config);

// Canonical key = value text of every result-affecting setting (threads and out excluded).
std::string resolved_config(const ExperimentConfig& config);
// FNV-1a of resolved_config, 16 hex digits.
std::string config_hash(const ExperimentConfig& config);

struct ReportRow {
  Vertex vertex = 0;
  std::size_t t = 1;
  double estimate = 0.0;
  std::string exact;  // "p/q", "log-dp", or empty for sampled rows
  std::optional<double> bound;
  std::string bound_note;  // replaces the bound when it is not asserted
  std::uint64_t ball_size = 0;
  std::uint64_t n_samples = 0;
  std::uint64_t seed = 0;
  std::string config_hash;
  double log_estimate = 0.0;
  std::optional<double> log_bound;
  std::string verdict;  // pass | fail | unchecked | not-asserted
};

struct Quantiles {
  double min = 0, q25 = 0, median = 0, q75 = 0, q90 = 0, max = 0, mean = 0;
};

struct MaxSummary {
  Quantiles max_f;
  Quantiles max_abs_f;
  double log_log_n = 0.0;
  double ratio = 0.0;  // mean max f / (M log log n)
};

struct ExperimentResult {
  std::vector<ReportRow> rows;
  std::optional<MaxSummary> max_summary;
  std::optional<double> lambda;
  std::map<std::string, bool> predicates;  // goodness predicates for the recorded lambda
  bool hypotheses_met = false;
  std::size_t t_max = 0;
  std::uint64_t passed = 0, failed = 0, unchecked = 0;
  std::uint64_t t1_passed = 0, t1_failed = 0;  // homomorphism t = 1 rows, also counted above
  std::vector<std::string> notes;
  std::string config_hash;

  bool all_passed() const { return failed == 0; }
};

ExperimentResult run_experiment(const ExperimentConfig& config);

void emit_report(std::ostream& out, const ExperimentResult& result, ReportFormat format);
void write_summary(std::ostream& out, const ExperimentResult& result);

// Writes the report to config.out plus "<out>.config" and "<out>.summary.json".
// Throws io when a file cannot be written.
void write_outputs(const ExperimentConfig& config, const ExperimentResult& result);

// Shortest text that reads back to the same double.
std::string format_double(double x);

}  // namespace lipflat
