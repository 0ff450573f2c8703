// Copyright 2026 The latdpc Authors
// SPDX-License-Identifier: Apache-2.0

#include "latdpc/sim.hpp"

#include <algorithm>
#include <cctype>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <thread>

#include "latdpc/error.hpp"

namespace latdpc {
namespace {

constexpr std::uint64_t kOutageStream = 0x6f75746167650001ULL;
constexpr std::int64_t kOutageChunk = 1000;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(trim(cur));
  return out;
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size() || !std::isfinite(d)) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("config: " + key + " expects a number, got '" + v + "'");
  }
}

std::int64_t parse_int(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const long long d = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("config: " + key + " expects an integer, got '" + v + "'");
  }
}

std::uint64_t parse_uint(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    if (!v.empty() && v[0] == '-') throw std::invalid_argument(v);
    const unsigned long long d = std::stoull(v, &pos, 0);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("config: " + key + " expects an unsigned integer, got '" + v + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true" || v == "on" || v == "yes") return true;
  if (v == "0" || v == "false" || v == "off" || v == "no") return false;
  throw ConfigError("config: " + key + " expects on/off, got '" + v + "'");
}

// Rows separated by ';', entries by ',' or whitespace.
Matrix parse_matrix(const std::string& key, const std::string& v) {
  std::vector<std::vector<double>> rows;
  for (const std::string& row : split(v, ';')) {
    if (row.empty()) continue;
    std::string r = row;
    std::replace(r.begin(), r.end(), ',', ' ');
    std::istringstream in(r);
    std::vector<double> vals;
    std::string tok;
    while (in >> tok) vals.push_back(parse_double(key, tok));
    rows.push_back(std::move(vals));
  }
  if (rows.empty()) return Matrix();
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows[0].size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows[0].size()) throw ConfigError("config: " + key + " has ragged rows");
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return m;
}

// "a,b,c" or "start:step:stop" (inclusive).
std::vector<double> parse_grid(const std::string& key, const std::string& v) {
  std::vector<double> out;
  if (trim(v).empty()) return out;
  if (v.find(':') != std::string::npos) {
    const auto parts = split(v, ':');
    if (parts.size() != 3) throw ConfigError("config: " + key + " range must be start:step:stop");
    const double a = parse_double(key, parts[0]);
    const double step = parse_double(key, parts[1]);
    const double b = parse_double(key, parts[2]);
    if (!(step > 0.0) || b < a) throw ConfigError("config: " + key + " range is empty or invalid");
    const auto count = static_cast<std::int64_t>(std::floor((b - a) / step + 1e-9)) + 1;
    for (std::int64_t i = 0; i < count; ++i) out.push_back(a + static_cast<double>(i) * step);
    return out;
  }
  for (const std::string& t : split(v, ',')) {
    if (!t.empty()) out.push_back(parse_double(key, t));
  }
  return out;
}

std::string fmt(double v, int digits = 17) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

std::string matrix_text(const Matrix& m) {
  std::string out;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    if (i > 0) out += ";";
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out += ",";
      out += fmt(m(i, j));
    }
  }
  return out;
}

std::string baselines_text(unsigned b) {
  std::vector<std::string> names;
  if (b & kBaselineOutage) names.emplace_back("outage");
  if (b & kBaselineInterferenceAsNoise) names.emplace_back("interference-as-noise");
  if (b & kBaselineDpcNaiveAlias) names.emplace_back("dpc-naive");
  if (names.empty()) return "none";
  std::string out;
  for (std::size_t i = 0; i < names.size(); ++i) out += (i ? "," : "") + names[i];
  return out;
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

// β with (n/T)·log2 β = R, when it is an integer.
std::optional<int> self_similar_scale(double rate_bits, int n, int T) {
  const double beta = std::exp2(rate_bits * T / n);
  const double r = std::round(beta);
  if (r >= 2.0 && std::fabs(beta - r) < 1e-9 * r) return static_cast<int>(r);
  return std::nullopt;
}

CodeConfig resolved_code(const ExperimentConfig& c) {
  CodeConfig code = c.code;
  code.symbols = c.T;
  if (code.coarse == CoarseMode::kSelfSimilar && code.nesting_scale == 0) {
    const auto beta = self_similar_scale(c.rate_bits, code.n, c.T);
    if (!beta) {
      throw ConfigError("config: rate " + fmt(c.rate_bits, 6) +
                        " needs a non-integer self-similar scale 2^(R*T/n); set nesting_scale "
                        "and message_count explicitly or use coarse=hypercubic");
    }
    code.nesting_scale = *beta;
  }
  if (code.message_count == 0) {
    // Coset-subset rate control: use 2^{RT} messages when the pair carries more.
    const double messages = std::exp2(c.rate_bits * c.T);
    const double r = std::round(messages);
    if (std::fabs(messages - r) < 1e-9 * r && r < 9.2e18) {
      const std::int64_t want = static_cast<std::int64_t>(r);
      if (code.coarse == CoarseMode::kHypercubic) {
        long double cosets = 1.0L;
        for (int i = 0; i < code.k; ++i) cosets *= static_cast<long double>(code.p);
        if (static_cast<long double>(want) < cosets) code.message_count = want;
      }
    }
  }
  return code;
}

Assignment proposed_assignment(const ExperimentConfig& c) {
  switch (c.assignment) {
    case AssignmentKind::kDpc:
      return assignment::Dpc{};
    case AssignmentKind::kScalarSlow:
      return assignment::ScalarSlow{c.rate_bits};
    case AssignmentKind::kExplicitWb:
      return assignment::FromWb{c.W_B};
  }
  throw InternalError("unknown assignment kind");
}

struct Realization {
  std::uint64_t seed = 0;
  ChannelRealization channel;
  std::int64_t message = 0;
  Vector u;
  Vector s;
  Vector z;
};

Realization draw_realization(const ExperimentConfig& c, const NestedLatticePair& pair,
                             const PointSetup& setup, std::int64_t point, std::int64_t trial) {
  Realization r;
  r.seed = derive_seed(c.master_seed,
                       {static_cast<std::uint64_t>(point), static_cast<std::uint64_t>(trial)});
  Rng rng(r.seed);
  r.channel = draw_channel(setup.model, setup.shape, setup.fading, rng);
  std::uniform_int_distribution<std::int64_t> msg(0, pair.message_count() - 1);
  r.message = msg(rng);
  r.u = sample_dither(pair.coarse(), rng);
  r.s = setup.interference.draw(rng);
  r.z = draw_noise(static_cast<int>(r.channel.H.rows()), rng);
  return r;
}

struct SchemeRun {
  FilterContext ctx;
  EncodeRecord record;
  Vector y;
  Vector y_hat;
  DecodeResult decoded;
  double oracle_residual = 0.0;
};

SchemeRun run_scheme(const NestedLatticePair& pair, const PointSetup& setup,
                     const Realization& r, const Assignment& assignment, bool check_oracle) {
  SchemeRun run;
  run.ctx = build_filter_context(setup.spec, r.channel.H, pair.coarse_stats().covariance,
                                 assignment);
  run.record = encode(pair, run.ctx.F_t, run.ctx.F_s, r.message, r.s, r.u);
  run.y = transmit(r.channel.H, run.record.transmitted, r.s, r.z);
  run.y_hat = receiver_front_end(run.y, run.ctx.F_r, run.ctx.L, r.u);
  run.decoded = LatticeDecoder(pair, run.ctx.L).decode(run.y_hat);
  if (check_oracle) {
    const Vector oracle = equivalent_channel_oracle(run.record, r.s, r.z, run.ctx);
    run.oracle_residual = (oracle - run.y_hat).norm() / std::max(1.0, run.y_hat.norm());
    if (run.oracle_residual > 1e-8) {
      throw InternalError("equivalent-channel identity violated: residual " +
                          fmt(run.oracle_residual, 6));
    }
  }
  return run;
}

// Calls body(i) for i in [begin, end) on `workers` threads, interleaved.
template <class Body>
void parallel_for(std::int64_t begin, std::int64_t end, int workers, Body body) {
  const std::int64_t count = end - begin;
  if (count <= 0) return;
  workers = static_cast<int>(std::clamp<std::int64_t>(workers, 1, count));
  if (workers == 1) {
    for (std::int64_t i = begin; i < end; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
  std::vector<std::thread> threads;
  threads.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    threads.emplace_back([&, w] {
      try {
        for (std::int64_t i = begin + w; i < end; i += workers) body(i);
      } catch (...) {
        errors[static_cast<std::size_t>(w)] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

int resolve_workers(int workers) { return workers > 0 ? workers : default_workers(); }

bool done(const SchemeStats& s, const ExperimentConfig& c) {
  if (s.trials >= c.trials) return true;
  return s.errors >= c.min_errors && s.trials >= c.min_trials;
}

SimResult sweep(const ExperimentConfig& c, const NestedLatticePair& pair, int workers,
                bool want_proposed, bool want_ian) {
  c.validate();
  workers = resolve_workers(workers);
  SimResult result;
  result.config_hash = c.hash();
  result.master_seed = c.master_seed;
  for (std::size_t pi = 0; pi < c.snr_db.size(); ++pi) {
    const PointSetup setup = point_setup(c, c.snr_db[pi]);
    const Assignment proposed = proposed_assignment(c);
    PointResult point;
    point.snr_db = c.snr_db[pi];
    SchemeStats prop, ian;
    bool run_prop = want_proposed;
    bool run_ian = want_ian;
    std::int64_t next = 0;
    while (run_prop || run_ian) {
      const std::int64_t end = std::min(next + c.batch, c.trials);
      std::vector<TrialOutcome> out(static_cast<std::size_t>(end - next));
      const TrialRequest req{run_prop, run_ian};
      parallel_for(next, end, workers, [&](std::int64_t t) {
        out[static_cast<std::size_t>(t - next)] =
            run_trial(c, pair, setup, static_cast<std::int64_t>(pi), t, req);
      });
      for (const TrialOutcome& o : out) {
        if (run_prop) {
          ++prop.trials;
          prop.errors += o.proposed_error ? 1 : 0;
        }
        if (run_ian) {
          ++ian.trials;
          ian.errors += o.ian_error ? 1 : 0;
        }
      }
      next = end;
      if (run_prop && done(prop, c)) run_prop = false;
      if (run_ian && done(ian, c)) run_ian = false;
    }
    if (want_proposed) point.proposed = prop;
    if (want_ian) point.interference_as_noise = ian;
    result.points.push_back(point);
  }
  return result;
}

}  // namespace

ExperimentConfig::ExperimentConfig() {
  code.n = 12;
  code.p = 47;
  code.k = 6;
  code.symbols = 6;
  code.seed = 1;
  code.coarse = CoarseMode::kSelfSimilar;
  code.nesting_scale = 0;
  snr_db = {20.0, 22.5, 25.0, 27.5, 30.0};
}

void ExperimentConfig::set(const std::string& key_in, const std::string& value_in) {
  const std::string key = trim(key_in);
  const std::string v = trim(value_in);
  if (key == "scenario") {
    if (v == "scalar-complex-slow") {
      scenario = Scenario::kScalarComplexSlow;
    } else if (v == "mimo-real-fixed") {
      scenario = Scenario::kMimoRealFixed;
    } else if (v == "mimo-real-fast") {
      scenario = Scenario::kMimoRealFast;
    } else {
      throw ConfigError("config: unknown scenario '" + v +
                        "' (scalar-complex-slow | mimo-real-fixed | mimo-real-fast)");
    }
  } else if (key == "M") {
    M = static_cast<int>(parse_int(key, v));
  } else if (key == "N") {
    N = static_cast<int>(parse_int(key, v));
  } else if (key == "T") {
    T = static_cast<int>(parse_int(key, v));
  } else if (key == "rate") {
    rate_bits = parse_double(key, v);
  } else if (key == "n") {
    code.n = static_cast<int>(parse_int(key, v));
  } else if (key == "p") {
    code.p = parse_int(key, v);
  } else if (key == "k") {
    code.k = static_cast<int>(parse_int(key, v));
  } else if (key == "code_seed") {
    code.seed = parse_uint(key, v);
  } else if (key == "coarse") {
    if (v == "hypercubic") {
      code.coarse = CoarseMode::kHypercubic;
    } else if (v == "self-similar") {
      code.coarse = CoarseMode::kSelfSimilar;
    } else {
      throw ConfigError("config: coarse must be hypercubic or self-similar");
    }
  } else if (key == "nesting_scale") {
    code.nesting_scale = v == "auto" ? 0 : static_cast<int>(parse_int(key, v));
  } else if (key == "message_count") {
    code.message_count = v == "auto" ? 0 : parse_int(key, v);
  } else if (key == "sigma_v_samples") {
    code.sigma_v_samples = parse_int(key, v);
  } else if (key == "target_second_moment") {
    code.target_second_moment = parse_double(key, v);
  } else if (key == "pair") {
    pair_path = v;
  } else if (key == "assignment") {
    if (v == "dpc") {
      assignment = AssignmentKind::kDpc;
    } else if (v == "scalar-slow") {
      assignment = AssignmentKind::kScalarSlow;
    } else if (v == "explicit") {
      assignment = AssignmentKind::kExplicitWb;
    } else {
      throw ConfigError("config: assignment must be dpc, scalar-slow or explicit");
    }
  } else if (key == "W_B") {
    W_B = parse_matrix(key, v);
  } else if (key == "channel") {
    fixed_channel = parse_matrix(key, v);
  } else if (key == "fading_variance") {
    fading_variance = parse_double(key, v);
  } else if (key == "snr_db") {
    snr_db = parse_grid(key, v);
  } else if (key == "isr_db") {
    isr_db = parse_double(key, v);
  } else if (key == "interference") {
    interference = parse_bool(key, v);
  } else if (key == "trials") {
    trials = parse_int(key, v);
  } else if (key == "min_errors") {
    min_errors = parse_int(key, v);
  } else if (key == "min_trials") {
    min_trials = parse_int(key, v);
  } else if (key == "batch") {
    batch = parse_int(key, v);
  } else if (key == "outage_draws") {
    outage_draws = parse_int(key, v);
  } else if (key == "seed") {
    master_seed = parse_uint(key, v);
  } else if (key == "baselines") {
    unsigned b = 0;
    for (const std::string& t : split(v, ',')) {
      if (t == "outage" || t == "interference-free-outage") {
        b |= kBaselineOutage;
      } else if (t == "interference-as-noise") {
        b |= kBaselineInterferenceAsNoise;
      } else if (t == "dpc-naive" || t == "dpc-naive-alias") {
        b |= kBaselineDpcNaiveAlias | kBaselineInterferenceAsNoise;
      } else if (t == "none" || t.empty()) {
      } else {
        throw ConfigError("config: unknown baseline '" + t + "'");
      }
    }
    baselines = b;
  } else if (key == "check_oracle") {
    check_oracle = parse_bool(key, v);
  } else {
    throw ConfigError("config: unknown key '" + key + "'");
  }
}

ChannelShape ExperimentConfig::shape() const {
  ChannelShape s;
  s.M = M;
  s.N = N;
  s.T = T;
  s.complex_entries = scenario == Scenario::kScalarComplexSlow;
  return s;
}

int ExperimentConfig::lattice_dimension() const { return shape().real_inputs() * T; }

void ExperimentConfig::validate() const {
  if (M < 1 || N < 1 || T < 1) throw ConfigError("config: M, N and T must be positive");
  if (scenario == Scenario::kScalarComplexSlow && (M != 1 || N != 1)) {
    throw ConfigError("config: scalar-complex-slow requires M = N = 1");
  }
  if (!(rate_bits > 0.0)) throw ConfigError("config: rate must be positive");
  if (snr_db.empty()) throw ConfigError("config: snr_db grid is empty");
  if (trials < 1) throw ConfigError("config: trials must be >= 1");
  if (min_errors < 0 || min_trials < 0) throw ConfigError("config: min_errors/min_trials < 0");
  if (batch < 1) throw ConfigError("config: batch must be >= 1");
  if (outage_draws < 1) throw ConfigError("config: outage_draws must be >= 1");
  if (!(fading_variance > 0.0)) throw ConfigError("config: fading_variance must be positive");
  if (pair_path.empty()) {
    if (code.n != lattice_dimension()) {
      throw ConfigError("config: lattice dimension n = " + std::to_string(code.n) +
                        " but the scenario needs mT = " + std::to_string(lattice_dimension()));
    }
    resolved_code(*this).validate();
  }
  if (assignment == AssignmentKind::kExplicitWb) {
    const int m = shape().real_inputs();
    if (W_B.rows() != m || W_B.cols() != m) {
      throw ConfigError("config: W_B must be " + std::to_string(m) + "x" + std::to_string(m));
    }
  }
  if (scenario == Scenario::kMimoRealFixed && fixed_channel.size() > 0 &&
      (fixed_channel.rows() != N || fixed_channel.cols() != M)) {
    throw ConfigError("config: channel must be N x M");
  }
}

std::string ExperimentConfig::canonical() const {
  std::map<std::string, std::string> kv;
  kv["scenario"] = scenario_name(scenario);
  kv["M"] = std::to_string(M);
  kv["N"] = std::to_string(N);
  kv["T"] = std::to_string(T);
  kv["rate"] = fmt(rate_bits);
  kv["n"] = std::to_string(code.n);
  kv["p"] = std::to_string(code.p);
  kv["k"] = std::to_string(code.k);
  kv["code_seed"] = std::to_string(code.seed);
  kv["coarse"] = code.coarse == CoarseMode::kHypercubic ? "hypercubic" : "self-similar";
  kv["nesting_scale"] = code.nesting_scale == 0 ? "auto" : std::to_string(code.nesting_scale);
  kv["message_count"] = code.message_count == 0 ? "auto" : std::to_string(code.message_count);
  kv["sigma_v_samples"] = std::to_string(code.sigma_v_samples);
  kv["target_second_moment"] = fmt(code.target_second_moment);
  kv["pair"] = pair_path;
  kv["assignment"] = assignment_name(assignment);
  kv["W_B"] = matrix_text(W_B);
  kv["channel"] = matrix_text(fixed_channel);
  kv["fading_variance"] = fmt(fading_variance);
  std::string grid;
  for (std::size_t i = 0; i < snr_db.size(); ++i) grid += (i ? "," : "") + fmt(snr_db[i]);
  kv["snr_db"] = grid;
  kv["isr_db"] = fmt(isr_db);
  kv["interference"] = interference ? "on" : "off";
  kv["trials"] = std::to_string(trials);
  kv["min_errors"] = std::to_string(min_errors);
  kv["min_trials"] = std::to_string(min_trials);
  kv["batch"] = std::to_string(batch);
  kv["outage_draws"] = std::to_string(outage_draws);
  kv["seed"] = std::to_string(master_seed);
  kv["baselines"] = baselines_text(baselines);
  kv["check_oracle"] = check_oracle ? "on" : "off";
  std::string out;
  for (const auto& [k, v] : kv) out += k + "=" + v + "\n";
  return out;
}

std::uint64_t ExperimentConfig::hash() const { return fnv1a(canonical()); }

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig c;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key=value");
    }
    c.set(line.substr(0, eq), line.substr(eq + 1));
  }
  return c;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  return parse_config(in);
}

PointSetup point_setup(const ExperimentConfig& c, double snr_db) {
  PointSetup p;
  p.snr_db = snr_db;
  p.snr_linear = db_to_linear(snr_db);
  p.shape = c.shape();
  const int m = p.shape.real_inputs();
  // Complex: power per complex symbol = SNR. Real: total power ½SNR against
  // noise ½ per receive dimension.
  const double per_dim = c.scenario == Scenario::kScalarComplexSlow ? p.snr_linear
                                                                    : p.snr_linear / c.M;
  p.spec.T = c.T;
  p.spec.sigma_I = per_dim * Matrix::Identity(m, m);
  const double isr = c.interference ? db_to_linear(c.isr_db) : 0.0;
  p.spec.sigma_s = isr * per_dim * Matrix::Identity(m * c.T, m * c.T);
  p.interference = GaussianSource(p.spec.sigma_s);
  switch (c.scenario) {
    case Scenario::kScalarComplexSlow:
      p.model = FadingModel::kSlow;
      p.fading = fading::IidGaussian{c.fading_variance};
      break;
    case Scenario::kMimoRealFixed: {
      p.model = FadingModel::kSlow;
      Matrix h = c.fixed_channel.size() > 0 ? c.fixed_channel : Matrix::Identity(c.N, c.M);
      p.fading = fading::Fixed{h};
      break;
    }
    case Scenario::kMimoRealFast:
      p.model = FadingModel::kFast;
      p.fading = fading::IidGaussian{c.fading_variance};
      break;
  }
  return p;
}

NestedLatticePair make_pair(const ExperimentConfig& c) {
  if (!c.pair_path.empty()) {
    std::ifstream in(c.pair_path);
    if (!in) throw IoError("cannot open pair fixture '" + c.pair_path + "'");
    NestedLatticePair pair = load_pair(in);
    if (pair.dimension() != c.lattice_dimension() || pair.symbols() != c.T) {
      throw ConfigError("config: pair fixture dimension/symbols do not match the scenario");
    }
    return pair;
  }
  c.validate();
  NestedLatticePair pair = build_construction_a(resolved_code(c));
  if (std::fabs(pair.information_rate_bits() - c.rate_bits) > 1e-9) {
    throw ConfigError("config: code carries " + fmt(pair.information_rate_bits(), 6) +
                      " bits/use but rate = " + fmt(c.rate_bits, 6) +
                      "; adjust p, k, nesting_scale or message_count");
  }
  return pair;
}

Interval wilson_interval(std::int64_t errors, std::int64_t trials, double z) {
  if (trials <= 0) return {0.0, 1.0};
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(errors) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double centre = (p + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  Interval ci{std::max(0.0, centre - half), std::min(1.0, centre + half)};
  if (errors == 0) ci.lo = 0.0;
  if (errors == trials) ci.hi = 1.0;
  return ci;
}

int default_workers() {
  if (const char* env = std::getenv("LATDPC_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<int>(v);
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc > 0 ? static_cast<int>(hc) : 1;
}

TrialOutcome run_trial(const ExperimentConfig& c, const NestedLatticePair& pair,
                       const PointSetup& setup, std::int64_t point_index,
                       std::int64_t trial_index, TrialRequest request) {
  const Realization r = draw_realization(c, pair, setup, point_index, trial_index);
  TrialOutcome out;
  if (request.proposed) {
    const SchemeRun run = run_scheme(pair, setup, r, proposed_assignment(c), c.check_oracle);
    out.proposed_error = run.decoded.index != r.message;
    out.oracle_residual = std::max(out.oracle_residual, run.oracle_residual);
  }
  if (request.interference_as_noise) {
    const SchemeRun run = run_scheme(pair, setup, r, assignment::None{}, c.check_oracle);
    out.ian_error = run.decoded.index != r.message;
    out.oracle_residual = std::max(out.oracle_residual, run.oracle_residual);
  }
  return out;
}

TrialTrace trace_trial(const ExperimentConfig& c, const NestedLatticePair& pair,
                       std::int64_t point_index, std::int64_t trial_index,
                       const std::string& scheme) {
  c.validate();
  if (point_index < 0 || point_index >= static_cast<std::int64_t>(c.snr_db.size())) {
    throw InvalidArgument("trace: point index out of range");
  }
  Assignment a;
  if (scheme == "la-gpc") {
    a = proposed_assignment(c);
  } else if (scheme == "interference-as-noise") {
    a = assignment::None{};
  } else {
    throw InvalidArgument("trace: unknown scheme '" + scheme + "'");
  }
  const PointSetup setup = point_setup(c, c.snr_db[static_cast<std::size_t>(point_index)]);
  const Realization r = draw_realization(c, pair, setup, point_index, trial_index);
  const SchemeRun run = run_scheme(pair, setup, r, a, false);
  TrialTrace t;
  t.scheme = scheme;
  t.seed = r.seed;
  t.point_index = point_index;
  t.trial_index = trial_index;
  t.snr_db = setup.snr_db;
  t.H = r.channel.H;
  t.s = r.s;
  t.z = r.z;
  t.u = r.u;
  t.message_index = r.message;
  t.x = run.record.transmitted;
  t.y = run.y;
  t.y_hat = run.y_hat;
  t.decoded_index = run.decoded.index;
  t.R_LA_bits = run.ctx.R_LA_bits;
  const Vector oracle = equivalent_channel_oracle(run.record, r.s, r.z, run.ctx);
  t.oracle_residual = (oracle - run.y_hat).norm() / std::max(1.0, run.y_hat.norm());
  return t;
}

FilterContext trial_filter_context(const ExperimentConfig& c, const NestedLatticePair& pair,
                                   std::int64_t point_index, std::int64_t trial_index) {
  c.validate();
  if (point_index < 0 || point_index >= static_cast<std::int64_t>(c.snr_db.size())) {
    throw InvalidArgument("filters: point index out of range");
  }
  const PointSetup setup = point_setup(c, c.snr_db[static_cast<std::size_t>(point_index)]);
  const Realization r = draw_realization(c, pair, setup, point_index, trial_index);
  return build_filter_context(setup.spec, r.channel.H, pair.coarse_stats().covariance,
                              proposed_assignment(c));
}

SimResult run_bler_sweep(const ExperimentConfig& c, const NestedLatticePair& pair, int workers) {
  const bool ian = (c.baselines & (kBaselineInterferenceAsNoise | kBaselineDpcNaiveAlias)) != 0;
  SimResult r = sweep(c, pair, workers, true, ian);
  r.kind = "sweep";
  r.dpc_naive_alias = (c.baselines & kBaselineDpcNaiveAlias) != 0;
  if (c.baselines & kBaselineOutage) {
    const std::vector<OutagePoint> o = outage_curve(c, workers);
    for (std::size_t i = 0; i < r.points.size(); ++i) r.points[i].outage = o[i];
  }
  return r;
}

SimResult run_bler_sweep(const ExperimentConfig& c, int workers) {
  const NestedLatticePair pair = make_pair(c);
  return run_bler_sweep(c, pair, workers);
}

SimResult interference_as_noise_baseline(const ExperimentConfig& c,
                                         const NestedLatticePair& pair, int workers) {
  SimResult r = sweep(c, pair, workers, false, true);
  r.kind = "interference-as-noise";
  return r;
}

double rayleigh_outage_closed_form(double rate_bits, double snr_linear, double variance) {
  return 1.0 - std::exp(-(std::exp2(rate_bits) - 1.0) / (snr_linear * variance));
}

std::vector<OutagePoint> outage_curve(const ExperimentConfig& c, int workers) {
  c.validate();
  workers = resolve_workers(workers);
  std::vector<OutagePoint> out;
  const std::int64_t chunks = (c.outage_draws + kOutageChunk - 1) / kOutageChunk;
  for (std::size_t pi = 0; pi < c.snr_db.size(); ++pi) {
    const PointSetup setup = point_setup(c, c.snr_db[pi]);
    const Matrix sigma_G = build_sigma_G(setup.spec);
    std::vector<std::int64_t> counts(static_cast<std::size_t>(chunks), 0);
    parallel_for(0, chunks, workers, [&](std::int64_t ch) {
      Rng rng(derive_seed(c.master_seed, {kOutageStream, static_cast<std::uint64_t>(pi),
                                          static_cast<std::uint64_t>(ch)}));
      const std::int64_t draws = std::min(kOutageChunk, c.outage_draws - ch * kOutageChunk);
      std::int64_t n_out = 0;
      for (std::int64_t d = 0; d < draws; ++d) {
        const ChannelRealization h = draw_channel(setup.model, setup.shape, setup.fading, rng);
        if (interference_free_rate(h.H, sigma_G, c.T) < c.rate_bits) ++n_out;
      }
      counts[static_cast<std::size_t>(ch)] = n_out;
    });
    OutagePoint p;
    p.snr_db = c.snr_db[pi];
    p.draws = c.outage_draws;
    for (std::int64_t v : counts) p.outages += v;
    if (c.scenario == Scenario::kScalarComplexSlow) {
      p.closed_form = rayleigh_outage_closed_form(c.rate_bits, setup.snr_linear, c.fading_variance);
    }
    out.push_back(p);
  }
  return out;
}

SimResult outage_result(const ExperimentConfig& c, int workers) {
  SimResult r;
  r.kind = "outage";
  r.config_hash = c.hash();
  r.master_seed = c.master_seed;
  for (const OutagePoint& o : outage_curve(c, workers)) {
    PointResult p;
    p.snr_db = o.snr_db;
    p.outage = o;
    r.points.push_back(p);
  }
  return r;
}

void emit_results(const SimResult& result, OutputFormat format, std::ostream& out) {
  struct Row {
    std::vector<std::string> cells;
  };
  const std::vector<std::string> header = {"snr_db", "scheme", "trials", "errors", "bler",
                                           "ci_lo",  "ci_hi",  "outage_interference_free",
                                           "outage_closed_form"};
  std::vector<Row> rows;
  for (const PointResult& p : result.points) {
    const std::string snr = fmt(p.snr_db, 10);
    const std::string o_mc = p.outage ? fmt(p.outage->probability(), 10) : "";
    const std::string o_cf =
        p.outage && p.outage->closed_form ? fmt(*p.outage->closed_form, 10) : "";
    auto add = [&](const std::string& scheme, std::int64_t trials, std::int64_t errors) {
      const Interval ci = wilson_interval(errors, trials);
      const double bler = trials > 0 ? static_cast<double>(errors) / trials : 0.0;
      rows.push_back({{snr, scheme, std::to_string(trials), std::to_string(errors),
                       fmt(bler, 10), fmt(ci.lo, 10), fmt(ci.hi, 10), o_mc, o_cf}});
    };
    if (p.proposed) add("la-gpc", p.proposed->trials, p.proposed->errors);
    if (p.interference_as_noise) {
      add("interference-as-noise", p.interference_as_noise->trials,
          p.interference_as_noise->errors);
      if (result.dpc_naive_alias) {
        add("dpc-naive", p.interference_as_noise->trials, p.interference_as_noise->errors);
      }
    }
    if (!p.proposed && !p.interference_as_noise && p.outage) {
      add("interference-free-outage", p.outage->draws, p.outage->outages);
    }
  }

  char hash[32];
  std::snprintf(hash, sizeof hash, "%016" PRIx64, result.config_hash);
  out << "# latdpc " << kVersion << " " << (result.kind.empty() ? "sweep" : result.kind)
      << " config_hash=" << hash << " master_seed=" << result.master_seed << "\n";
  if (format == OutputFormat::kCsv) {
    for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
    out << "\n";
    for (const Row& r : rows) {
      for (std::size_t i = 0; i < r.cells.size(); ++i) out << (i ? "," : "") << r.cells[i];
      out << "\n";
    }
    return;
  }
  std::vector<std::size_t> width(header.size());
  for (std::size_t i = 0; i < header.size(); ++i) width[i] = header[i].size();
  for (const Row& r : rows) {
    for (std::size_t i = 0; i < r.cells.size(); ++i) width[i] = std::max(width[i], r.cells[i].size());
  }
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      out << (i ? "  " : "") << std::setw(static_cast<int>(width[i])) << cells[i];
    }
    out << "\n";
  };
  line(header);
  for (const Row& r : rows) line(r.cells);
}

void emit_results(const SimResult& result, OutputFormat format, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write '" + path + "'");
  emit_results(result, format, f);
  if (!f) throw IoError("write failed for '" + path + "'");
}

std::string scenario_name(Scenario s) {
  switch (s) {
    case Scenario::kScalarComplexSlow:
      return "scalar-complex-slow";
    case Scenario::kMimoRealFixed:
      return "mimo-real-fixed";
    case Scenario::kMimoRealFast:
      return "mimo-real-fast";
  }
  return "unknown";
}

std::string assignment_name(AssignmentKind a) {
  switch (a) {
    case AssignmentKind::kDpc:
      return "dpc";
    case AssignmentKind::kScalarSlow:
      return "scalar-slow";
    case AssignmentKind::kExplicitWb:
      return "explicit";
  }
  return "unknown";
}

}  // namespace latdpc
