// Copyright 2026 The latdpc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "latdpc/channel.hpp"
#include "latdpc/filters.hpp"
#include "latdpc/nested_code.hpp"
#include "latdpc/transceiver.hpp"

namespace latdpc {

inline constexpr const char* kVersion = "0.1.0";

enum class Scenario { kScalarComplexSlow, kMimoRealFixed, kMimoRealFast };
enum class AssignmentKind { kDpc, kScalarSlow, kExplicitWb };

enum Baseline : unsigned {
  kBaselineOutage = 1u,
  kBaselineInterferenceAsNoise = 2u,
  kBaselineDpcNaiveAlias = 4u,
};

/// Flat key=value experiment description. Unknown keys are errors.
struct ExperimentConfig {
  Scenario scenario = Scenario::kScalarComplexSlow;
  int M = 1;  ///< transmit antennas (complex for the scalar-complex scenario)
  int N = 1;  ///< receive antennas
  int T = 6;
  double rate_bits = 2.0;
  /// n, p, k, seed, coarse mode. nesting_scale 0 means derive β = 2^{RT/n}.
  CodeConfig code;
  std::string pair_path;  ///< fixture; overrides `code` when set
  AssignmentKind assignment = AssignmentKind::kScalarSlow;
  Matrix W_B;
  Matrix fixed_channel;  ///< per-symbol real channel for mimo-real-fixed
  double fading_variance = 1.0;
  std::vector<double> snr_db;
  double isr_db = 10.0;
  bool interference = true;
  std::int64_t trials = 10000;      ///< maximum trials per point
  std::int64_t min_errors = 100;
  std::int64_t min_trials = 1000;
  std::int64_t batch = 500;         ///< early-stop granularity
  std::int64_t outage_draws = 100000;
  std::uint64_t master_seed = 1;
  unsigned baselines = kBaselineOutage | kBaselineInterferenceAsNoise | kBaselineDpcNaiveAlias;
  bool check_oracle = false;        ///< verify the equivalent-channel identity every trial

  ExperimentConfig();

  /// Sets one key from its text form; throws ConfigError.
  void set(const std::string& key, const std::string& value);
  void validate() const;
  /// Sorted key=value lines at full precision; the hash input.
  std::string canonical() const;
  std::uint64_t hash() const;

  ChannelShape shape() const;
  /// Lattice dimension mT implied by the scenario.
  int lattice_dimension() const;
};

/// Reads key=value lines; '#' starts a comment.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config_file(const std::string& path);

/// Covariances, channel law and SNR for one grid point.
struct PointSetup {
  double snr_db = 0.0;
  double snr_linear = 1.0;
  CovarianceSpec spec;
  ChannelShape shape;
  FadingModel model = FadingModel::kSlow;
  Fading fading;
  GaussianSource interference;  ///< s ~ N(0, ½Σ_s)
};
PointSetup point_setup(const ExperimentConfig& config, double snr_db);

/// The experiment's nested pair: fixture when configured, else Construction-A.
NestedLatticePair make_pair(const ExperimentConfig& config);

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
};
/// Wilson score interval; z = 1.959963984540054 gives 95%.
Interval wilson_interval(std::int64_t errors, std::int64_t trials,
                         double z = 1.959963984540054);

struct SchemeStats {
  std::int64_t trials = 0;
  std::int64_t errors = 0;
  double bler() const { return trials > 0 ? static_cast<double>(errors) / trials : 0.0; }
  Interval ci() const { return wilson_interval(errors, trials); }
};

struct OutagePoint {
  double snr_db = 0.0;
  std::int64_t draws = 0;
  std::int64_t outages = 0;
  std::optional<double> closed_form;
  double probability() const { return draws > 0 ? static_cast<double>(outages) / draws : 0.0; }
};

struct PointResult {
  double snr_db = 0.0;
  std::optional<SchemeStats> proposed;
  std::optional<SchemeStats> interference_as_noise;
  std::optional<OutagePoint> outage;
};

struct SimResult {
  std::string kind;  ///< "sweep", "outage" or "interference-as-noise"
  std::vector<PointResult> points;
  std::uint64_t config_hash = 0;
  std::uint64_t master_seed = 0;
  bool dpc_naive_alias = false;
};

/// LATDPC_WORKERS when set, else the available hardware parallelism.
int default_workers();

/// Outcome of one paired trial.
struct TrialOutcome {
  bool proposed_error = false;
  bool ian_error = false;
  double oracle_residual = 0.0;
};

struct TrialRequest {
  bool proposed = true;
  bool interference_as_noise = false;
};

/// One trial of every requested scheme on shared realizations drawn from
/// derive_seed(master_seed, {point_index, trial_index}).
TrialOutcome run_trial(const ExperimentConfig& config, const NestedLatticePair& pair,
                       const PointSetup& setup, std::int64_t point_index,
                       std::int64_t trial_index, TrialRequest request);

/// Full trace of one trial for one scheme ("la-gpc" or "interference-as-noise").
TrialTrace trace_trial(const ExperimentConfig& config, const NestedLatticePair& pair,
                       std::int64_t point_index, std::int64_t trial_index,
                       const std::string& scheme);

/// Filter chain of one trial's channel realization for the proposed scheme.
FilterContext trial_filter_context(const ExperimentConfig& config, const NestedLatticePair& pair,
                                   std::int64_t point_index, std::int64_t trial_index);

SimResult run_bler_sweep(const ExperimentConfig& config, const NestedLatticePair& pair,
                         int workers = 0);
SimResult run_bler_sweep(const ExperimentConfig& config, int workers = 0);

/// Only the interference-as-noise scheme: W = 0, F_s = 0, receiver filters
/// computed against ½(HΣ_sHᵀ + I).
SimResult interference_as_noise_baseline(const ExperimentConfig& config,
                                         const NestedLatticePair& pair, int workers = 0);

/// P{interference-free rate < R} per grid point over outage_draws channels.
std::vector<OutagePoint> outage_curve(const ExperimentConfig& config, int workers = 0);
SimResult outage_result(const ExperimentConfig& config, int workers = 0);

/// 1 − exp(−(2^R − 1)/(SNR·variance)).
double rayleigh_outage_closed_form(double rate_bits, double snr_linear, double variance = 1.0);

enum class OutputFormat { kCsv, kTable };
void emit_results(const SimResult& result, OutputFormat format, std::ostream& out);
/// Throws IoError when the path cannot be written.
void emit_results(const SimResult& result, OutputFormat format, const std::string& path);

std::string scenario_name(Scenario s);
std::string assignment_name(AssignmentKind a);

}  // namespace latdpc
