#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "qrcert/generators.hpp"
#include "qrcert/kv.hpp"

namespace qr {

inline constexpr std::string_view kToolkitVersion = "qrcert 0.1.0";

// Exit statuses shared by the pipeline and the command-line tool.
enum ExitStatus : int { exit_ok = 0, exit_gate_failure = 1, exit_invalid_config = 2, exit_internal_fault = 3 };

// One experiment. The text form is flat "key = value" lines; generator
// fields carry a "gen." prefix and stage parameters a "param." prefix
// ("param.<stage>.<name>").
struct ExperimentConfig {
  std::string name = "custom";
  std::vector<std::string> stages;
  GenSpec gen;
  double p = 0.5;
  std::vector<double> alpha{0.5, 0.5};
  int k = 3;
  std::uint64_t budget = 10'000;
  std::uint64_t enumeration_budget = kDefaultEnumerationBudget;
  double tol = 0.02;
  std::uint64_t seed = 1;
  std::string out = "run";
  KeyValues params;

  std::string to_text() const;
  static ExperimentConfig from_text(std::string_view text);

  // Stage parameter lookups ("param.<stage>.<name>").
  bool has_param(std::string_view stage, std::string_view name) const;
  double param_double(std::string_view stage, std::string_view name, double fallback) const;
  std::int64_t param_int(std::string_view stage, std::string_view name, std::int64_t fallback) const;
  std::string param(std::string_view stage, std::string_view name, std::string fallback) const;
  void set_param(std::string_view stage, std::string_view name, std::string value);

  // Throws std::invalid_argument on unknown stages or bad values.
  void validate() const;
};

// Seed of a randomized stage: derived from the master seed and the stage name.
std::uint64_t stage_seed(const ExperimentConfig& cfg, std::string_view stage);

struct StageResult {
  std::string stage;
  bool passed = true;
  std::string report_file;  // relative to the output directory
  std::string summary;
};

struct PipelineResult {
  int exit_code = exit_ok;
  std::vector<StageResult> stages;
  std::string error;
};

// Runs the stages in order. Each stage writes <out>/<index>-<stage>.txt;
// <out>/manifest.txt records the config hash and toolkit version. Never
// throws: invalid configs give exit 2, unexpected faults exit 3.
PipelineResult run_pipeline(const ExperimentConfig& cfg);

std::vector<std::string> stage_names();

struct VerifyResult {
  bool ok = false;
  double reported = 0.0;
  double recomputed = 0.0;
  std::string message;
};

// Re-evaluates the witness of a deviation report against its input file
// (resolved relative to the report's directory). Throws when the input
// artifact is missing.
VerifyResult verify_report(const std::string& path);

// Named presets, one per acceptance criterion.
std::vector<std::string> preset_names();
// Throws std::invalid_argument for unknown names.
ExperimentConfig preset(std::string_view name);

}  // namespace qr
