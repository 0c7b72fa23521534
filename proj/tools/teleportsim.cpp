// Copyright 2026 The teleportsim developers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tsim/experiment.hpp"
#include "tsim/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace tsim;

namespace {

/// Anything the user got wrong: flags, config contents, unnormalized
/// states. Mapped to exit code 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// parsing helpers

std::vector<double> parse_csv_floats(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t pos = 0;
      const double v = std::stod(item, &pos);
      while (pos < item.size() && std::isspace(static_cast<unsigned char>(item[pos]))) ++pos;
      if (pos != item.size()) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      throw UsageError("cannot parse number '" + item + "' in '" + text + "'");
    }
  }
  return out;
}

QubitRegister fig6_state() {
  const double s3 = std::numbers::sqrt3;
  return QubitRegister::single(
      std::sqrt((1.0 + s3) / (2.0 * s3)),
      cplx{s3, 1.0} / (2.0 * std::sqrt(3.0 + s3)));
}

QubitRegister ket_from_bloch(const BlochVector& r) {
  const double theta = std::acos(std::clamp(r.z, -1.0, 1.0));
  const double phi = std::atan2(r.y, r.x);
  return QubitRegister::single(std::cos(theta / 2.0),
                               std::polar(std::sin(theta / 2.0), phi));
}

/// Accepts a named state, four amplitude components
/// (alpha_re, alpha_im, beta_re, beta_im), or three Bloch coordinates.
/// States off the normalization/unit sphere by more than 1e-6 are rejected;
/// smaller deviations are renormalized.
QubitRegister parse_state(const std::string& text) {
  if (text == "zero") return QubitRegister::basis(1, 0);
  if (text == "one") return QubitRegister::basis(1, 1);
  if (text == "plus") {
    const double s = 1.0 / std::numbers::sqrt2;
    return QubitRegister::single(s, s);
  }
  if (text == "paper-fig6") return fig6_state();

  const std::vector<double> v = parse_csv_floats(text);
  if (v.size() == 4) {
    const cplx alpha{v[0], v[1]};
    const cplx beta{v[2], v[3]};
    const double norm2 = std::norm(alpha) + std::norm(beta);
    if (std::abs(norm2 - 1.0) > 1e-6) {
      throw UsageError("state amplitudes are not normalized: |alpha|^2 + |beta|^2 = " +
                       fmt17(norm2));
    }
    const double inv = 1.0 / std::sqrt(norm2);
    return QubitRegister::single(alpha * inv, beta * inv);
  }
  if (v.size() == 3) {
    BlochVector r{v[0], v[1], v[2]};
    if (std::abs(r.norm() - 1.0) > 1e-6) {
      throw UsageError("Bloch state must be pure (|r| = 1), got |r| = " +
                       fmt17(r.norm()));
    }
    const double inv = 1.0 / r.norm();
    return ket_from_bloch({r.x * inv, r.y * inv, r.z * inv});
  }
  throw UsageError(
      "state must be a name (zero|one|plus|paper-fig6), four amplitude "
      "components or three Bloch coordinates");
}

/// For `evolve`: also permits mixed initial vectors (inside the ball).
BlochVector parse_bloch_state(const std::string& text) {
  const std::vector<double> v = parse_csv_floats(
      text == "zero" || text == "one" || text == "plus" || text == "paper-fig6"
          ? ""
          : text);
  if (v.empty()) {
    return density_to_bloch(DensityMatrix::from_register(parse_state(text)));
  }
  if (v.size() != 3) {
    throw UsageError("evolve expects a named state or three Bloch coordinates");
  }
  BlochVector r{v[0], v[1], v[2]};
  if (r.norm() > 1.0 + 1e-9) {
    throw UsageError("Bloch vector leaves the unit ball: |r| = " + fmt17(r.norm()));
  }
  return r;
}

BellState parse_resource(const std::string& text) {
  if (text == "phi-plus") return BellState::PhiPlus;
  if (text == "phi-minus") return BellState::PhiMinus;
  if (text == "psi-plus") return BellState::PsiPlus;
  if (text == "psi-minus") return BellState::PsiMinus;
  throw UsageError("unknown resource '" + text +
                   "' (phi-plus|phi-minus|psi-plus|psi-minus)");
}

std::string resource_name(BellState b) {
  switch (b) {
    case BellState::PhiPlus: return "phi-plus";
    case BellState::PhiMinus: return "phi-minus";
    case BellState::PsiPlus: return "psi-plus";
    case BellState::PsiMinus: return "psi-minus";
  }
  return "?";
}

Stage parse_stage(const std::string& text) {
  if (text == "input") return Stage::Input;
  if (text == "epr_alice") return Stage::EprAlice;
  if (text == "epr_bob") return Stage::EprBob;
  if (text == "pre_measure") return Stage::PreMeasure;
  if (text == "post_correction") return Stage::PostCorrection;
  throw UsageError("unknown stage '" + text +
                   "' (input|epr_alice|epr_bob|pre_measure|post_correction)");
}

std::string stage_name(Stage s) {
  switch (s) {
    case Stage::Input: return "input";
    case Stage::EprAlice: return "epr_alice";
    case Stage::EprBob: return "epr_bob";
    case Stage::PreMeasure: return "pre_measure";
    case Stage::PostCorrection: return "post_correction";
  }
  return "?";
}

unsigned thread_cap() {
  const char* env = std::getenv("TELEPORTSIM_THREADS");
  if (env == nullptr || *env == '\0') return 0;  // machine default
  try {
    std::size_t pos = 0;
    const long v = std::stol(env, &pos);
    if (pos != std::string(env).size() || v < 1) throw std::invalid_argument(env);
    return static_cast<unsigned>(v);
  } catch (const std::exception&) {
    throw UsageError(std::string("TELEPORTSIM_THREADS must be a positive integer, got '") +
                     env + "'");
  }
}

// ---------------------------------------------------------------------------
// output helpers

/// Writes via a temp file and renames, so failed runs leave no partial
/// outputs behind.
void write_file_atomic(const fs::path& path, const std::string& content) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string());
    out << content;
    if (!out.flush()) throw std::runtime_error("cannot write " + tmp.string());
  }
  fs::rename(tmp, path);
}

void write_manifest(const fs::path& dir, const std::string& command,
                    const json& resolved_config,
                    const std::vector<std::string>& outputs) {
  json manifest;
  manifest["command"] = command;
  manifest["version"] = kVersion;
  manifest["config"] = resolved_config;
  if (resolved_config.contains("master_seed")) {
    manifest["master_seed"] = resolved_config["master_seed"];
  }
  manifest["outputs"] = outputs;
  write_file_atomic(dir / "manifest.json", manifest.dump(2) + "\n");
}

json bloch_json(const BlochVector& r) {
  return json{{"x", r.x}, {"y", r.y}, {"z", r.z}};
}

// ---------------------------------------------------------------------------
// pipeline / config plumbing

struct ChannelFlags {
  double gamma_x = 0.0;
  double gamma_y = 0.0;
  double gamma_z = 0.0;
  double omega = 0.0;
  double t = 0.0;
  std::string stage = "post_correction";
  bool compensate = true;
  bool noiseless = false;

  bool has_noise() const {
    return gamma_x != 0.0 || gamma_y != 0.0 || gamma_z != 0.0 || omega != 0.0;
  }

  TeleportPipeline to_pipeline(BellState resource) const {
    if (noiseless && has_noise()) {
      throw UsageError("--noiseless conflicts with nonzero channel rates");
    }
    TeleportPipeline p;
    p.resource = resource;
    p.compensate = compensate;
    if (has_noise()) {
      NoiseChannel ch{gamma_x, gamma_y, gamma_z, omega, t};
      try {
        ch.validate();
      } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
      }
      p.stage_noise[parse_stage(stage)] = ch;
    }
    return p;
  }
};

void add_channel_flags(CLI::App* cmd, ChannelFlags& ch) {
  cmd->add_option("--gamma-x", ch.gamma_x, "x-coupling decay rate");
  cmd->add_option("--gamma-y", ch.gamma_y, "y-coupling decay rate");
  cmd->add_option("--gamma-z", ch.gamma_z, "z-coupling (phase damping) decay rate");
  cmd->add_option("--omega", ch.omega, "Hamiltonian energy splitting");
  cmd->add_option("--t", ch.t, "channel duration");
  cmd->add_option("--stage", ch.stage,
                  "noise stage (input|epr_alice|epr_bob|pre_measure|post_correction)");
  cmd->add_flag("--compensate,!--no-compensate", ch.compensate,
                "compensate the Hamiltonian phase rotation (default on)");
  cmd->add_flag("--noiseless", ch.noiseless, "assert a noiseless pipeline");
}

json state_json(const QubitRegister& psi) {
  return json::array({psi.amplitude(0).real(), psi.amplitude(0).imag(),
                      psi.amplitude(1).real(), psi.amplitude(1).imag()});
}

QubitRegister state_from_json(const json& j) {
  if (j.is_string()) return parse_state(j.get<std::string>());
  if (j.is_array() && j.size() == 4) {
    const cplx alpha{j[0].get<double>(), j[1].get<double>()};
    const cplx beta{j[2].get<double>(), j[3].get<double>()};
    const double norm2 = std::norm(alpha) + std::norm(beta);
    if (std::abs(norm2 - 1.0) > 1e-6) {
      throw UsageError("input_state is not normalized");
    }
    const double inv = 1.0 / std::sqrt(norm2);
    return QubitRegister::single(alpha * inv, beta * inv);
  }
  if (j.is_object() && j.contains("bloch")) {
    const auto& b = j["bloch"];
    if (!b.is_array() || b.size() != 3) {
      throw UsageError("input_state.bloch must be a 3-element array");
    }
    std::ostringstream ss;
    ss << fmt17(b[0].get<double>()) << ',' << fmt17(b[1].get<double>()) << ','
       << fmt17(b[2].get<double>());
    return parse_state(ss.str());
  }
  throw UsageError("input_state must be a name, a 4-element amplitude array "
                   "or {\"bloch\": [x, y, z]}");
}

NoiseChannel channel_from_json(const json& j) {
  NoiseChannel ch;
  ch.gamma_x = j.value("gamma_x", 0.0);
  ch.gamma_y = j.value("gamma_y", 0.0);
  ch.gamma_z = j.value("gamma_z", 0.0);
  ch.omega = j.value("omega", 0.0);
  ch.duration = j.value("t", 0.0);
  try {
    ch.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return ch;
}

json channel_json(const NoiseChannel& ch) {
  return json{{"gamma_x", ch.gamma_x},
              {"gamma_y", ch.gamma_y},
              {"gamma_z", ch.gamma_z},
              {"omega", ch.omega},
              {"t", ch.duration}};
}

json load_json_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open config file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    // e.byte is a 1-based offset into the input
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw UsageError("malformed JSON in " + path.string() + " at line " +
                     std::to_string(line) + ", column " + std::to_string(col));
  }
}

struct ResolvedExperiment {
  ExperimentConfig cfg;
  double histogram_bin_width;
  json resolved;  // the fully materialized config for the manifest
};

struct ExperimentOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  std::optional<int> shots;
};

ResolvedExperiment resolve_experiment_config(const fs::path& config_path,
                                             const ExperimentOverrides& over) {
  json j = load_json_file(config_path);
  if (j.contains("command") && j.contains("config")) {
    // re-running from a manifest
    j = j["config"];
  }

  QubitRegister input = j.contains("input_state")
                            ? state_from_json(j["input_state"])
                            : QubitRegister::basis(1, 0);

  TeleportPipeline pipeline;
  pipeline.resource = parse_resource(j.value("resource", std::string("phi-plus")));
  pipeline.compensate = j.value("compensate", true);
  if (j.contains("stages")) {
    if (!j["stages"].is_object()) throw UsageError("stages must be an object");
    for (const auto& [key, value] : j["stages"].items()) {
      pipeline.stage_noise[parse_stage(key)] = channel_from_json(value);
    }
  }

  ExperimentConfig cfg{std::move(input), std::move(pipeline),
                       over.trials.value_or(j.value("trials", 1000)),
                       over.shots.value_or(j.value("shots_per_basis", 1024)),
                       0, j.value("gamma_jitter", 0.0)};
  if (over.seed.has_value()) {
    cfg.master_seed = *over.seed;
  } else if (j.contains("master_seed")) {
    cfg.master_seed = j["master_seed"].get<std::uint64_t>();
  } else {
    throw UsageError("a seed is required: pass --seed or put master_seed in the config");
  }
  const double bin_width = j.value("histogram_bin_width", 0.01);
  if (!(bin_width > 0.0)) {
    throw UsageError("histogram_bin_width must be positive");
  }
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }

  json resolved;
  resolved["input_state"] = state_json(cfg.input_state);
  resolved["resource"] = resource_name(cfg.pipeline.resource);
  resolved["compensate"] = cfg.pipeline.compensate;
  resolved["trials"] = cfg.trials;
  resolved["shots_per_basis"] = cfg.shots_per_basis;
  resolved["master_seed"] = cfg.master_seed;
  resolved["gamma_jitter"] = cfg.gamma_jitter;
  resolved["histogram_bin_width"] = bin_width;
  json stages = json::object();
  for (const auto& [stage, ch] : cfg.pipeline.stage_noise) {
    stages[stage_name(stage)] = channel_json(ch);
  }
  resolved["stages"] = stages;
  return {std::move(cfg), bin_width, std::move(resolved)};
}

// ---------------------------------------------------------------------------
// subcommands

int cmd_teleport(const std::string& state_text, const std::string& resource_text,
                 const ChannelFlags& ch, std::uint64_t seed,
                 const std::string& out_dir) {
  const QubitRegister psi = parse_state(state_text);
  const TeleportPipeline pipeline = ch.to_pipeline(parse_resource(resource_text));

  RandomEngine rng = stream_engine(seed, 0);
  const TeleportResult result = teleport(psi, pipeline, rng);
  const BlochVector r = density_to_bloch(result.output_state);

  std::cout << "bits: " << result.classical_bits[0] << result.classical_bits[1]
            << "\n";
  std::cout << "bloch: [" << fmt17(r.x) << ", " << fmt17(r.y) << ", "
            << fmt17(r.z) << "]\n";
  std::cout << "fidelity: " << fmt17(result.fidelity_to_input) << "\n";

  if (!out_dir.empty()) {
    const fs::path dir(out_dir);
    fs::create_directories(dir);
    json out;
    out["bits"] = json::array({result.classical_bits[0], result.classical_bits[1]});
    out["bloch"] = bloch_json(r);
    out["fidelity"] = result.fidelity_to_input;
    write_file_atomic(dir / "teleport.json", out.dump(2) + "\n");

    json cfg;
    cfg["state"] = state_json(psi);
    cfg["resource"] = resource_name(pipeline.resource);
    cfg["compensate"] = pipeline.compensate;
    json stages = json::object();
    for (const auto& [stage, channel] : pipeline.stage_noise) {
      stages[stage_name(stage)] = channel_json(channel);
    }
    cfg["stages"] = stages;
    cfg["master_seed"] = seed;
    write_manifest(dir, "teleport", cfg, {"teleport.json"});
  }
  return 0;
}

int cmd_evolve(const std::string& state_text, const ChannelFlags& ch,
               int points, const std::string& out_dir) {
  if (points < 1) throw UsageError("--points must be >= 1");
  const BlochVector r0 = parse_bloch_state(state_text);
  const DensityMatrix rho0 = bloch_to_density(r0);
  const bool pure_input = r0.norm() >= 1.0 - 1e-9;
  const QubitRegister psi0 =
      pure_input ? ket_from_bloch(r0) : QubitRegister::basis(1, 0);

  NoiseChannel base{ch.gamma_x, ch.gamma_y, ch.gamma_z, ch.omega, 0.0};
  try {
    base.validate();
    if (!(ch.t >= 0.0)) throw std::invalid_argument("t must be non-negative");
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }

  std::string csv = "t,rx,ry,rz,purity,fidelity\n";
  for (int i = 0; i < points; ++i) {
    NoiseChannel step = base;
    step.duration = points == 1 ? 0.0 : ch.t * i / (points - 1);
    const DensityMatrix rho = evolve_closed_form(rho0, step, ch.compensate);
    const BlochVector r = density_to_bloch(rho);
    const double fid = pure_input
                           ? fidelity(rho, psi0)
                           : 0.5 * (1.0 + r.x * r0.x + r.y * r0.y + r.z * r0.z);
    csv += fmt17(step.duration);
    csv += ',';
    csv += fmt17(r.x);
    csv += ',';
    csv += fmt17(r.y);
    csv += ',';
    csv += fmt17(r.z);
    csv += ',';
    csv += fmt17(purity(rho));
    csv += ',';
    csv += fmt17(fid);
    csv += '\n';
  }

  const fs::path dir(out_dir);
  fs::create_directories(dir);
  write_file_atomic(dir / "trajectory.csv", csv);

  json cfg;
  cfg["state"] = json::array({r0.x, r0.y, r0.z});
  cfg["channel"] = channel_json(NoiseChannel{ch.gamma_x, ch.gamma_y, ch.gamma_z,
                                             ch.omega, ch.t});
  cfg["compensate"] = ch.compensate;
  cfg["points"] = points;
  write_manifest(dir, "evolve", cfg, {"trajectory.csv"});

  std::cout << "wrote " << (dir / "trajectory.csv").string() << " (" << points
            << " rows)\n";
  return 0;
}

int cmd_experiment(const fs::path& config_path, const ExperimentOverrides& over,
                   const std::string& out_dir) {
  ResolvedExperiment rx = resolve_experiment_config(config_path, over);
  const auto records = run_experiment(rx.cfg, thread_cap());
  const SummaryStats stats = summarize(records);

  std::string trials_csv =
      "trial,bits,rx_est,ry_est,rz_est,rx_exact,ry_exact,rz_exact,fidelity\n";
  for (const TrialRecord& r : records) {
    trials_csv += std::to_string(r.trial_index);
    trials_csv += ',';
    trials_csv += static_cast<char>('0' + r.classical_bits[0]);
    trials_csv += static_cast<char>('0' + r.classical_bits[1]);
    for (double v : {r.estimated_bloch.x, r.estimated_bloch.y,
                     r.estimated_bloch.z, r.exact_bloch.x, r.exact_bloch.y,
                     r.exact_bloch.z, r.fidelity}) {
      trials_csv += ',';
      trials_csv += fmt17(v);
    }
    trials_csv += '\n';
  }

  std::string cdf_csv = "coordinate,value,cum_prob\n";
  const char* coord_names[3] = {"x", "y", "z"};
  for (int k = 0; k < 3; ++k) {
    const auto& samples = stats.cdf_samples[k];
    for (std::size_t i = 0; i < samples.size(); ++i) {
      cdf_csv += coord_names[k];
      cdf_csv += ',';
      cdf_csv += fmt17(samples[i]);
      cdf_csv += ',';
      cdf_csv += fmt17(static_cast<double>(i + 1) / samples.size());
      cdf_csv += '\n';
    }
  }

  // joint PDF of the estimated vector, binned at the configured width
  const JointHistogram hist = joint_histogram(records, rx.histogram_bin_width);
  std::string hist_csv = "bin_x,bin_y,bin_z,count\n";
  for (const HistogramBin& b : hist.bins) {
    hist_csv += fmt17((b.ix + 0.5) * hist.bin_width);
    hist_csv += ',';
    hist_csv += fmt17((b.iy + 0.5) * hist.bin_width);
    hist_csv += ',';
    hist_csv += fmt17((b.iz + 0.5) * hist.bin_width);
    hist_csv += ',';
    hist_csv += std::to_string(b.count);
    hist_csv += '\n';
  }

  double mu_exact[3] = {0.0, 0.0, 0.0};
  for (const TrialRecord& r : records) {
    mu_exact[0] += r.exact_bloch.x;
    mu_exact[1] += r.exact_bloch.y;
    mu_exact[2] += r.exact_bloch.z;
  }
  for (double& v : mu_exact) v /= static_cast<double>(records.size());

  json summary;
  summary["trials"] = rx.cfg.trials;
  summary["shots_per_basis"] = rx.cfg.shots_per_basis;
  summary["mu"] = {{"x", stats.mean[0]}, {"y", stats.mean[1]}, {"z", stats.mean[2]}};
  summary["sigma"] = {
      {"x", stats.stddev[0]}, {"y", stats.stddev[1]}, {"z", stats.stddev[2]}};
  summary["correlations"] = {
      {"xy", stats.corr_xy}, {"xz", stats.corr_xz}, {"yz", stats.corr_yz}};
  summary["mu_exact"] = {
      {"x", mu_exact[0]}, {"y", mu_exact[1]}, {"z", mu_exact[2]}};

  const fs::path dir(out_dir);
  fs::create_directories(dir);
  write_file_atomic(dir / "trials.csv", trials_csv);
  write_file_atomic(dir / "cdf.csv", cdf_csv);
  write_file_atomic(dir / "histogram.csv", hist_csv);
  write_file_atomic(dir / "summary.json", summary.dump(2) + "\n");
  write_manifest(dir, "experiment", rx.resolved,
                 {"trials.csv", "cdf.csv", "histogram.csv", "summary.json"});

  std::cout << "trials: " << rx.cfg.trials << "\n";
  std::cout << "mu: [" << fmt17(stats.mean[0]) << ", " << fmt17(stats.mean[1])
            << ", " << fmt17(stats.mean[2]) << "]\n";
  std::cout << "sigma: [" << fmt17(stats.stddev[0]) << ", "
            << fmt17(stats.stddev[1]) << ", " << fmt17(stats.stddev[2]) << "]\n";
  std::cout << "wrote trials.csv, cdf.csv, histogram.csv, summary.json, "
               "manifest.json in "
            << dir.string() << "\n";
  return 0;
}

int cmd_calibrate(double att_x, double att_y, double att_z, double t,
                  const std::string& out_dir) {
  RateCalibration cal;
  try {
    cal = calibrate_gamma_axes(att_x, att_y, att_z, t);
  } catch (const std::domain_error& e) {
    throw UsageError(e.what());
  }
  std::cout << "gamma_x: " << fmt17(cal.gamma_x) << "\n";
  std::cout << "gamma_y: " << fmt17(cal.gamma_y) << "\n";
  std::cout << "gamma_z: " << fmt17(cal.gamma_z) << "\n";
  std::cout << "residual_x: " << fmt17(cal.residuals[0]) << "\n";
  std::cout << "residual_y: " << fmt17(cal.residuals[1]) << "\n";
  std::cout << "residual_z: " << fmt17(cal.residuals[2]) << "\n";

  if (!out_dir.empty()) {
    const fs::path dir(out_dir);
    fs::create_directories(dir);
    json out;
    out["gamma"] = {{"x", cal.gamma_x}, {"y", cal.gamma_y}, {"z", cal.gamma_z}};
    out["residuals"] = {{"x", cal.residuals[0]},
                        {"y", cal.residuals[1]},
                        {"z", cal.residuals[2]}};
    write_file_atomic(dir / "calibration.json", out.dump(2) + "\n");
    json cfg;
    cfg["attenuations"] = {{"x", att_x}, {"y", att_y}, {"z", att_z}};
    cfg["t"] = t;
    write_manifest(dir, "calibrate", cfg, {"calibration.json"});
  }
  return 0;
}

int cmd_swap(const std::string& resource_a, const std::string& resource_b,
             std::uint64_t seed, const std::string& out_dir) {
  const QubitRegister pair_ab = bell_state(parse_resource(resource_a));
  const QubitRegister pair_cd = bell_state(parse_resource(resource_b));
  RandomEngine rng = stream_engine(seed, 0);
  const SwapResult result = entanglement_swap(pair_ab, pair_cd, rng);

  // identify the projected pair by fidelity against all four Bell states
  std::string best_name = "none";
  double best_fid = -1.0;
  for (BellState kind : {BellState::PhiPlus, BellState::PhiMinus,
                         BellState::PsiPlus, BellState::PsiMinus}) {
    const double f = fidelity(result.state_ad, bell_state(kind));
    if (f > best_fid) {
      best_fid = f;
      best_name = resource_name(kind);
    }
  }

  std::cout << "bits: " << result.bits[0] << result.bits[1] << "\n";
  std::cout << "state: " << best_name << "\n";
  std::cout << "fidelity: " << fmt17(best_fid) << "\n";

  if (!out_dir.empty()) {
    const fs::path dir(out_dir);
    fs::create_directories(dir);
    json out;
    out["bits"] = json::array({result.bits[0], result.bits[1]});
    out["state"] = best_name;
    out["fidelity"] = best_fid;
    write_file_atomic(dir / "swap.json", out.dump(2) + "\n");
    json cfg;
    cfg["resource_a"] = resource_a;
    cfg["resource_b"] = resource_b;
    cfg["master_seed"] = seed;
    write_manifest(dir, "swap", cfg, {"swap.json"});
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"desk-scale quantum teleportation simulator"};
  app.set_version_flag("--version", std::string("teleportsim ") + kVersion);
  app.require_subcommand(1);

  // teleport
  auto* teleport_cmd = app.add_subcommand("teleport", "run one teleportation");
  std::string t_state, t_resource = "phi-plus", t_out_dir;
  std::uint64_t t_seed = 0;
  ChannelFlags t_ch;
  teleport_cmd->add_option("--state", t_state, "input state")->required();
  teleport_cmd->add_option("--resource", t_resource, "shared Bell resource");
  add_channel_flags(teleport_cmd, t_ch);
  teleport_cmd->add_option("--seed", t_seed, "measurement seed")->required();
  teleport_cmd->add_option("--out-dir", t_out_dir, "write teleport.json + manifest here");

  // evolve
  auto* evolve_cmd = app.add_subcommand("evolve", "trace a channel trajectory");
  std::string e_state, e_out_dir;
  int e_points = 201;
  ChannelFlags e_ch;
  evolve_cmd->add_option("--state", e_state, "initial state")->required();
  add_channel_flags(evolve_cmd, e_ch);
  evolve_cmd->add_option("--points", e_points, "number of grid points");
  evolve_cmd->add_option("--out-dir", e_out_dir, "output directory")->required();

  // experiment
  auto* exp_cmd = app.add_subcommand("experiment", "run a Monte Carlo campaign");
  std::string x_config, x_out_dir;
  std::uint64_t x_seed = 0;
  int x_trials = 0, x_shots = 0;
  bool x_seed_given = false, x_trials_given = false, x_shots_given = false;
  exp_cmd->add_option("--config", x_config, "JSON config (or a previous manifest)")
      ->required();
  exp_cmd->add_option("--seed", x_seed, "master seed")
      ->each([&](const std::string&) { x_seed_given = true; });
  exp_cmd->add_option("--trials", x_trials, "override the trial count")
      ->each([&](const std::string&) { x_trials_given = true; });
  exp_cmd->add_option("--shots", x_shots, "override shots per tomography basis")
      ->each([&](const std::string&) { x_shots_given = true; });
  exp_cmd->add_option("--out-dir", x_out_dir, "output directory")->required();

  // calibrate
  auto* cal_cmd = app.add_subcommand("calibrate", "solve decay rates from attenuations");
  double c_ax = 1.0, c_ay = 1.0, c_az = 1.0, c_t = 1.0;
  std::string c_out_dir;
  cal_cmd->add_option("--att-x", c_ax, "x attenuation target")->required();
  cal_cmd->add_option("--att-y", c_ay, "y attenuation target")->required();
  cal_cmd->add_option("--att-z", c_az, "z attenuation target")->required();
  cal_cmd->add_option("--t", c_t, "duration the attenuations refer to");
  cal_cmd->add_option("--out-dir", c_out_dir, "write calibration.json + manifest here");

  // swap
  auto* swap_cmd = app.add_subcommand("swap", "entanglement swap of two pairs");
  std::string s_a = "phi-plus", s_b = "phi-plus", s_out_dir;
  std::uint64_t s_seed = 0;
  swap_cmd->add_option("--resource-a", s_a, "first pair");
  swap_cmd->add_option("--resource-b", s_b, "second pair");
  swap_cmd->add_option("--seed", s_seed, "measurement seed")->required();
  swap_cmd->add_option("--out-dir", s_out_dir, "write swap.json + manifest here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (teleport_cmd->parsed()) {
      return cmd_teleport(t_state, t_resource, t_ch, t_seed, t_out_dir);
    }
    if (evolve_cmd->parsed()) {
      return cmd_evolve(e_state, e_ch, e_points, e_out_dir);
    }
    if (exp_cmd->parsed()) {
      ExperimentOverrides over;
      if (x_seed_given) over.seed = x_seed;
      if (x_trials_given) over.trials = x_trials;
      if (x_shots_given) over.shots = x_shots;
      return cmd_experiment(x_config, over, x_out_dir);
    }
    if (cal_cmd->parsed()) {
      return cmd_calibrate(c_ax, c_ay, c_az, c_t, c_out_dir);
    }
    if (swap_cmd->parsed()) {
      return cmd_swap(s_a, s_b, s_seed, s_out_dir);
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
