// Copyright 2026 The latdpc Authors
// SPDX-License-Identifier: Apache-2.0

#include "latdpc/latdpc.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <new>
#include <optional>
#include <sstream>
#include <string>

#include "latdpc/error.hpp"
#include "latdpc/sim.hpp"

struct latdpc_experiment {
  latdpc::ExperimentConfig config;
};

struct latdpc_pair {
  std::unique_ptr<latdpc::NestedLatticePair> pair;
};

struct latdpc_result {
  latdpc::SimResult result;
};

namespace {

thread_local std::string g_last_error;

latdpc_status fail(latdpc_status s, const std::string& msg) {
  g_last_error = msg;
  return s;
}

template <class F>
latdpc_status guarded(F&& f) {
  try {
    g_last_error.clear();
    f();
    return LATDPC_OK;
  } catch (const latdpc::InvalidArgument& e) {
    return fail(LATDPC_ERR_INVALID_ARGUMENT, e.what());
  } catch (const latdpc::ConfigError& e) {
    return fail(LATDPC_ERR_CONFIG, e.what());
  } catch (const latdpc::NumericError& e) {
    return fail(LATDPC_ERR_NUMERIC, e.what());
  } catch (const latdpc::IoError& e) {
    return fail(LATDPC_ERR_IO, e.what());
  } catch (const std::bad_alloc&) {
    return fail(LATDPC_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(LATDPC_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(LATDPC_ERR_INTERNAL, "unknown error");
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

// Uses the handle's pair when given, else builds one from the config.
template <class F>
void with_pair(const latdpc_experiment* exp, const latdpc_pair* pair, F&& f) {
  if (pair) {
    f(*pair->pair);
  } else {
    const latdpc::NestedLatticePair built = latdpc::make_pair(exp->config);
    f(built);
  }
}

#define LATDPC_REQUIRE(p) \
  if (!(p)) return fail(LATDPC_ERR_NULL, "null argument: " #p)

}  // namespace

extern "C" {

const char* latdpc_version(void) { return latdpc::kVersion; }

const char* latdpc_last_error(void) { return g_last_error.c_str(); }

const char* latdpc_status_string(latdpc_status status) {
  switch (status) {
    case LATDPC_OK:
      return "ok";
    case LATDPC_ERR_NULL:
      return "null argument";
    case LATDPC_ERR_INVALID_ARGUMENT:
      return "invalid argument";
    case LATDPC_ERR_CONFIG:
      return "configuration error";
    case LATDPC_ERR_NUMERIC:
      return "numeric error";
    case LATDPC_ERR_IO:
      return "i/o error";
    case LATDPC_ERR_INTERNAL:
      return "internal error";
  }
  return "unknown status";
}

void latdpc_string_free(char* s) { std::free(s); }

latdpc_status latdpc_experiment_create(latdpc_experiment** out) {
  LATDPC_REQUIRE(out);
  *out = nullptr;
  return guarded([&] { *out = new latdpc_experiment(); });
}

latdpc_status latdpc_experiment_load(latdpc_experiment* exp, const char* path) {
  LATDPC_REQUIRE(exp);
  LATDPC_REQUIRE(path);
  return guarded([&] { exp->config = latdpc::load_config_file(path); });
}

latdpc_status latdpc_experiment_set(latdpc_experiment* exp, const char* key, const char* value) {
  LATDPC_REQUIRE(exp);
  LATDPC_REQUIRE(key);
  LATDPC_REQUIRE(value);
  return guarded([&] { exp->config.set(key, value); });
}

latdpc_status latdpc_experiment_validate(const latdpc_experiment* exp) {
  LATDPC_REQUIRE(exp);
  return guarded([&] { exp->config.validate(); });
}

latdpc_status latdpc_experiment_canonical(const latdpc_experiment* exp, char** out) {
  LATDPC_REQUIRE(exp);
  LATDPC_REQUIRE(out);
  return guarded([&] { *out = dup_string(exp->config.canonical()); });
}

latdpc_status latdpc_experiment_hash(const latdpc_experiment* exp, uint64_t* out) {
  LATDPC_REQUIRE(exp);
  LATDPC_REQUIRE(out);
  return guarded([&] { *out = exp->config.hash(); });
}

void latdpc_experiment_destroy(latdpc_experiment* exp) { delete exp; }

latdpc_status latdpc_pair_create(const latdpc_experiment* exp, latdpc_pair** out) {
  LATDPC_REQUIRE(exp);
  LATDPC_REQUIRE(out);
  *out = nullptr;
  return guarded([&] {
    auto h = std::make_unique<latdpc_pair>();
    h->pair = std::make_unique<latdpc::NestedLatticePair>(latdpc::make_pair(exp->config));
    *out = h.release();
  });
}

latdpc_status latdpc_pair_save(const latdpc_pair* pair, const char* path) {
  LATDPC_REQUIRE(pair);
  LATDPC_REQUIRE(path);
  return guarded([&] {
    std::ostringstream buf;
    latdpc::save_pair(*pair->pair, buf);
    if (std::strcmp(path, "-") == 0) {
      std::cout << buf.str();
      return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw latdpc::IoError(std::string("cannot write '") + path + "'");
    f << buf.str();
    if (!f) throw latdpc::IoError(std::string("write failed for '") + path + "'");
  });
}

latdpc_status latdpc_pair_describe(const latdpc_pair* pair, char** out) {
  LATDPC_REQUIRE(pair);
  LATDPC_REQUIRE(out);
  return guarded([&] {
    const latdpc::NestedLatticePair& p = *pair->pair;
    const Eigen::IOFormat fmt(Eigen::FullPrecision, 0, " ", "\n", "  ", "");
    std::ostringstream s;
    s << std::setprecision(17);
    s << "dimension " << p.dimension() << "\n";
    s << "symbols " << p.symbols() << "\n";
    s << "p " << p.config().p << "\n";
    s << "k " << p.config().k << "\n";
    s << "coarse "
      << (p.config().coarse == latdpc::CoarseMode::kHypercubic ? "hypercubic" : "self-similar")
      << "\n";
    s << "scale " << p.scale() << "\n";
    s << "coset_count " << p.coset_count() << "\n";
    s << "message_count " << p.message_count() << "\n";
    s << "rate_bits " << p.rate_bits() << "\n";
    s << "information_rate_bits " << p.information_rate_bits() << "\n";
    s << "second_moment " << p.coarse_stats().second_moment << "\n";
    s << "sigma_v_samples " << p.coarse_stats().sample_count << "\n";
    s << "fine_generator\n" << p.fine().generator().format(fmt) << "\n";
    s << "nesting_matrix\n" << p.nesting_matrix().format(fmt) << "\n";
    *out = dup_string(s.str());
  });
}

latdpc_status latdpc_pair_rate(const latdpc_pair* pair, double* rate_bits) {
  LATDPC_REQUIRE(pair);
  LATDPC_REQUIRE(rate_bits);
  return guarded([&] { *rate_bits = pair->pair->information_rate_bits(); });
}

void latdpc_pair_destroy(latdpc_pair* pair) { delete pair; }

latdpc_status latdpc_run_sweep(const latdpc_experiment* exp, const latdpc_pair* pair,
                               int workers, latdpc_result** out) {
  LATDPC_REQUIRE(exp);
  LATDPC_REQUIRE(out);
  *out = nullptr;
  return guarded([&] {
    auto h = std::make_unique<latdpc_result>();
    with_pair(exp, pair, [&](const latdpc::NestedLatticePair& p) {
      h->result = latdpc::run_bler_sweep(exp->config, p, workers);
    });
    *out = h.release();
  });
}

latdpc_status latdpc_run_interference_as_noise(const latdpc_experiment* exp,
                                               const latdpc_pair* pair, int workers,
                                               latdpc_result** out) {
  LATDPC_REQUIRE(exp);
  LATDPC_REQUIRE(out);
  *out = nullptr;
  return guarded([&] {
    auto h = std::make_unique<latdpc_result>();
    with_pair(exp, pair, [&](const latdpc::NestedLatticePair& p) {
      h->result = latdpc::interference_as_noise_baseline(exp->config, p, workers);
    });
    *out = h.release();
  });
}

latdpc_status latdpc_run_outage(const latdpc_experiment* exp, int workers, latdpc_result** out) {
  LATDPC_REQUIRE(exp);
  LATDPC_REQUIRE(out);
  *out = nullptr;
  return guarded([&] {
    auto h = std::make_unique<latdpc_result>();
    h->result = latdpc::outage_result(exp->config, workers);
    *out = h.release();
  });
}

latdpc_status latdpc_result_point_count(const latdpc_result* res, size_t* out) {
  LATDPC_REQUIRE(res);
  LATDPC_REQUIRE(out);
  *out = res->result.points.size();
  return LATDPC_OK;
}

latdpc_status latdpc_result_point(const latdpc_result* res, size_t index, const char* scheme,
                                  double* snr_db, int64_t* trials, int64_t* errors) {
  LATDPC_REQUIRE(res);
  LATDPC_REQUIRE(scheme);
  return guarded([&] {
    if (index >= res->result.points.size()) {
      throw latdpc::InvalidArgument("result point index out of range");
    }
    const latdpc::PointResult& p = res->result.points[index];
    std::int64_t t = 0, e = 0;
    const std::string name = scheme;
    if (name == "la-gpc" && p.proposed) {
      t = p.proposed->trials;
      e = p.proposed->errors;
    } else if ((name == "interference-as-noise" || name == "dpc-naive") &&
               p.interference_as_noise) {
      t = p.interference_as_noise->trials;
      e = p.interference_as_noise->errors;
    } else if (name == "interference-free-outage" && p.outage) {
      t = p.outage->draws;
      e = p.outage->outages;
    } else {
      throw latdpc::InvalidArgument("result has no scheme '" + name + "'");
    }
    if (snr_db) *snr_db = p.snr_db;
    if (trials) *trials = t;
    if (errors) *errors = e;
  });
}

latdpc_status latdpc_result_render(const latdpc_result* res, latdpc_format format, char** out) {
  LATDPC_REQUIRE(res);
  LATDPC_REQUIRE(out);
  return guarded([&] {
    std::ostringstream s;
    latdpc::emit_results(res->result,
                         format == LATDPC_FORMAT_TABLE ? latdpc::OutputFormat::kTable
                                                       : latdpc::OutputFormat::kCsv,
                         s);
    *out = dup_string(s.str());
  });
}

latdpc_status latdpc_result_write(const latdpc_result* res, latdpc_format format,
                                  const char* path) {
  LATDPC_REQUIRE(res);
  return guarded([&] {
    const auto f = format == LATDPC_FORMAT_TABLE ? latdpc::OutputFormat::kTable
                                                 : latdpc::OutputFormat::kCsv;
    if (!path || std::strcmp(path, "-") == 0) {
      latdpc::emit_results(res->result, f, std::cout);
      std::cout.flush();
    } else {
      latdpc::emit_results(res->result, f, std::string(path));
    }
  });
}

void latdpc_result_destroy(latdpc_result* res) { delete res; }

latdpc_status latdpc_trace_trial(const latdpc_experiment* exp, const latdpc_pair* pair,
                                 size_t point, uint64_t trial, const char* scheme,
                                 char** out_json) {
  LATDPC_REQUIRE(exp);
  LATDPC_REQUIRE(scheme);
  LATDPC_REQUIRE(out_json);
  return guarded([&] {
    with_pair(exp, pair, [&](const latdpc::NestedLatticePair& p) {
      const latdpc::TrialTrace t =
          latdpc::trace_trial(exp->config, p, static_cast<std::int64_t>(point),
                              static_cast<std::int64_t>(trial), scheme);
      *out_json = dup_string(latdpc::trace_to_json(t));
    });
  });
}

latdpc_status latdpc_filter_dump(const latdpc_experiment* exp, const latdpc_pair* pair,
                                 size_t point, uint64_t trial, char** out) {
  LATDPC_REQUIRE(exp);
  LATDPC_REQUIRE(out);
  return guarded([&] {
    with_pair(exp, pair, [&](const latdpc::NestedLatticePair& p) {
      const latdpc::FilterContext ctx = latdpc::trial_filter_context(
          exp->config, p, static_cast<std::int64_t>(point), static_cast<std::int64_t>(trial));
      std::ostringstream s;
      latdpc::dump_filter_context(ctx, s);
      *out = dup_string(s.str());
    });
  });
}

}  // extern "C"
