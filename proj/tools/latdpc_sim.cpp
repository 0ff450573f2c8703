// Copyright 2026 The latdpc Authors
// SPDX-License-Identifier: Apache-2.0

// Command-line driver for BLER sweeps, outage curves and diagnostics.

#include <cstdio>
#include <cstdlib>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "latdpc/latdpc.h"

namespace {

struct Options {
  std::string config;
  std::string snr;
  std::string rate;
  std::string trials;
  std::string seed;
  std::string scenario;
  std::string baselines;
  std::string pair;
  std::string out = "-";
  std::string format = "csv";
  std::vector<std::string> sets;
  int workers = 0;
  std::size_t point = 0;
  std::uint64_t trial = 0;
  std::string scheme = "la-gpc";
  std::string save_pair;
};

class Failure {
 public:
  explicit Failure(latdpc_status s) : status(s) {}
  latdpc_status status;
};

void check(latdpc_status s) {
  if (s != LATDPC_OK) throw Failure(s);
}

void print_and_free(char* text) {
  std::fputs(text, stdout);
  latdpc_string_free(text);
}

latdpc_experiment* build_experiment(const Options& o) {
  latdpc_experiment* exp = nullptr;
  check(latdpc_experiment_create(&exp));
  auto set = [&](const char* key, const std::string& v) {
    if (!v.empty()) check(latdpc_experiment_set(exp, key, v.c_str()));
  };
  if (!o.config.empty()) check(latdpc_experiment_load(exp, o.config.c_str()));
  set("scenario", o.scenario);
  set("snr_db", o.snr);
  set("rate", o.rate);
  set("trials", o.trials);
  set("seed", o.seed);
  set("baselines", o.baselines);
  set("pair", o.pair);
  for (const std::string& kv : o.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      latdpc_experiment_destroy(exp);
      std::fprintf(stderr, "latdpc_sim: error: --set expects key=value, got '%s'\n", kv.c_str());
      std::exit(2);
    }
    check(latdpc_experiment_set(exp, kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str()));
  }
  check(latdpc_experiment_validate(exp));
  return exp;
}

latdpc_format format_of(const Options& o) {
  return o.format == "table" ? LATDPC_FORMAT_TABLE : LATDPC_FORMAT_CSV;
}

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--config", o.config, "key=value experiment file");
  cmd->add_option("--snr", o.snr, "SNR grid in dB: a,b,c or start:step:stop");
  cmd->add_option("--rate", o.rate, "target rate R in bits per channel use");
  cmd->add_option("--trials", o.trials, "maximum trials per SNR point");
  cmd->add_option("--seed", o.seed, "master seed");
  cmd->add_option("--scenario", o.scenario,
                  "scalar-complex-slow | mimo-real-fixed | mimo-real-fast");
  cmd->add_option("--baselines", o.baselines,
                  "comma list of outage, interference-as-noise, dpc-naive, or none");
  cmd->add_option("--pair", o.pair, "nested pair fixture to load");
  cmd->add_option("--set", o.sets, "extra key=value override (repeatable)");
  cmd->add_option("--workers", o.workers, "worker threads (default: LATDPC_WORKERS or all cores)");
}

void add_output(CLI::App* cmd, Options& o) {
  cmd->add_option("--out", o.out, "output path, - for stdout");
  cmd->add_option("--format", o.format, "csv | table")
      ->check(CLI::IsMember({"csv", "table"}));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nested-lattice coding simulator for MIMO channels with transmitter side information"};
  app.require_subcommand(1);
  app.set_version_flag("--version", latdpc_version());
  Options o;

  auto* sweep = app.add_subcommand("sweep", "BLER vs SNR for the proposed scheme and baselines");
  add_common(sweep, o);
  add_output(sweep, o);
  auto* ian = app.add_subcommand("ian", "BLER of the interference-as-noise baseline only");
  add_common(ian, o);
  add_output(ian, o);
  auto* outage = app.add_subcommand("outage", "interference-free outage probability per SNR");
  add_common(outage, o);
  add_output(outage, o);
  auto* code = app.add_subcommand("code", "build the nested pair and describe it");
  add_common(code, o);
  code->add_option("--save", o.save_pair, "write the pair fixture to this path");
  auto* filters = app.add_subcommand("filters", "dump the filter chain of one trial");
  add_common(filters, o);
  filters->add_option("--point", o.point, "SNR grid index");
  filters->add_option("--trial", o.trial, "trial index");
  auto* trace = app.add_subcommand("trace", "JSON trace of one trial");
  add_common(trace, o);
  trace->add_option("--point", o.point, "SNR grid index");
  trace->add_option("--trial", o.trial, "trial index");
  trace->add_option("--scheme", o.scheme, "la-gpc | interference-as-noise");

  CLI11_PARSE(app, argc, argv);

  latdpc_experiment* exp = nullptr;
  latdpc_pair* pair = nullptr;
  latdpc_result* res = nullptr;
  int rc = 0;
  try {
    exp = build_experiment(o);
    if (sweep->parsed() || ian->parsed()) {
      check(latdpc_pair_create(exp, &pair));
      if (sweep->parsed()) {
        check(latdpc_run_sweep(exp, pair, o.workers, &res));
      } else {
        check(latdpc_run_interference_as_noise(exp, pair, o.workers, &res));
      }
      check(latdpc_result_write(res, format_of(o), o.out.c_str()));
    } else if (outage->parsed()) {
      check(latdpc_run_outage(exp, o.workers, &res));
      check(latdpc_result_write(res, format_of(o), o.out.c_str()));
    } else if (code->parsed()) {
      check(latdpc_pair_create(exp, &pair));
      char* text = nullptr;
      check(latdpc_pair_describe(pair, &text));
      print_and_free(text);
      if (!o.save_pair.empty()) check(latdpc_pair_save(pair, o.save_pair.c_str()));
    } else if (filters->parsed()) {
      char* text = nullptr;
      check(latdpc_filter_dump(exp, nullptr, o.point, o.trial, &text));
      print_and_free(text);
    } else if (trace->parsed()) {
      char* text = nullptr;
      check(latdpc_trace_trial(exp, nullptr, o.point, o.trial, o.scheme.c_str(), &text));
      print_and_free(text);
      std::fputs("\n", stdout);
    }
  } catch (const Failure& f) {
    std::fprintf(stderr, "latdpc_sim: %s: %s\n", latdpc_status_string(f.status),
                 latdpc_last_error());
    rc = f.status == LATDPC_ERR_CONFIG || f.status == LATDPC_ERR_INVALID_ARGUMENT ? 2 : 1;
  }
  latdpc_result_destroy(res);
  latdpc_pair_destroy(pair);
  latdpc_experiment_destroy(exp);
  return rc;
}
