#pragma once
// Experiment configuration: a single JSON document selecting the domain,
// Lagrangian data, grid, schedules, pipeline and output sinks.

#include "hjb/domain.hpp"
#include "hjb/lagrangian.hpp"

#include <string>
#include <vector>

namespace hjb {

enum class Pipeline {
  Discounted,
  Eigencurve,
  Derivatives,
  DiscountLimit,
  HopfCole,
  FullSuite,
};

enum class OutputFormat { Csv, Json, PlotData };

struct ExperimentConfig {
  Domain domain = make_interval(1.0);
  double p = 3.0;
  double epsilon = 0.1;
  RunningCost f = RunningCost::zero();
  double h = 0.01;
  int refinements = 1;
  double gamma = 1.0;
  std::vector<double> lambdas = default_lambda_samples();
  std::vector<double> deltas = {0.16, 0.08, 0.04, 0.02, 0.01, 0.005};
  double discount = 0.1;  // single-solve pipeline
  Pipeline pipeline = Pipeline::Discounted;
  std::string output_dir = "out";
  std::vector<OutputFormat> formats = {OutputFormat::Csv, OutputFormat::Json};

  std::string canonical_text() const;  // deterministic serialization for hashing
};

// Parses and validates; schema violations throw Schema errors naming the
// offending field path. The output directory may be overridden by the
// HJBLAB_OUT environment variable.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config_file(const std::string& path);

// Re-checks the numeric ranges and the pipeline/exponent regime guard.
void validate_config(const ExperimentConfig& cfg);

std::string pipeline_name(Pipeline p);
Pipeline pipeline_from_name(const std::string& name);

} // namespace hjb
