// Copyright 2026 The pqsim Authors
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

#include "pqsim/io.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include <openssl/evp.h>

namespace pqsim {

using nlohmann::json;

namespace {

// Reads one JSON object, remembering which keys were consumed so leftovers
// can be reported as unknown.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(where() + ": expected an object");
  }

  bool has(const char* key) const { return j_.contains(key); }

  template <typename T>
  void get(const char* key, T& out) {
    if (!j_.contains(key)) return;
    used_.insert(key);
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(field(key) + ": wrong type (" + e.what() + ")");
    }
  }

  // Enum-like string fields.
  template <typename E, typename Parse>
  void get_enum(const char* key, E& out, Parse parse) {
    std::string s;
    if (!j_.contains(key)) return;
    get(key, s);
    try {
      out = parse(s);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(field(key) + ": " + e.what());
    }
  }

  Reader child(const char* key) {
    used_.insert(key);
    static const json kEmpty = json::object();
    return Reader(j_.contains(key) ? j_.at(key) : kEmpty, field(key));
  }

  const json& raw(const char* key) {
    used_.insert(key);
    return j_.at(key);
  }

  std::string field(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  void finish() const {
    for (const auto& [k, v] : j_.items()) {
      if (!used_.count(k)) throw ConfigError("unknown key '" + field(k) + "'");
    }
  }

 private:
  std::string where() const { return path_.empty() ? "config" : path_; }

  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

template <typename F>
void checked(const std::string& what, F&& f) {
  try {
    f();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(what + ": " + e.what());
  }
}

void read_run(Reader r, RunConfig& run) {
  {
    Reader a = r.child("architecture");
    ArchitectureKind kind = run.arch.kind;
    a.get_enum("kind", kind, architecture_from_name);
    // Per-kind defaults first (readout path differs), then overrides.
    if (kind != run.arch.kind) run.arch = ArchitectureSpec::defaults(kind);
    a.get("t_1q_ns", run.arch.t_1q_ns);
    a.get("t_2q_ns", run.arch.t_2q_ns);
    a.get("t_r_ns", run.arch.t_r_ns);
    a.get("hop_time_ns", run.arch.hop_time_ns);
    a.get("hop_error", run.arch.hop_error);
    a.get("readout_path_nm", run.arch.readout_path_nm);
    a.finish();
  }
  NoiseParams& n = run.noise;
  {
    Reader g = r.child("gate");
    g.get("p_d", n.gate.p_d);
    g.get("p_phi", n.gate.p_phi);
    g.get("p_b", n.gate.p_b);
    g.finish();
  }
  {
    Reader c = r.child("coherence");
    c.get("t1_ns", n.coherence.t1_ns);
    c.get("t2_ns", n.coherence.t2_ns);
    c.get_enum("law", n.coherence.law, dephasing_law_from_name);
    c.get_enum("form", n.coherence.form, dephasing_form_from_name);
    c.finish();
  }
  {
    Reader s = r.child("shuttle");
    s.get("dot_size_nm", n.shuttle.dot_size_nm);
    s.get("noise_corr_length_nm", n.shuttle.noise_corr_length_nm);
    s.get("velocity_m_s", n.shuttle.velocity_m_s);
    s.get("flip_prob_per_10um", n.shuttle.flip_prob_per_10um);
    s.finish();
  }
  {
    Reader v = r.child("valley");
    double mean = n.valley.mean_ev, sd = n.valley.std_ev;
    v.get("mean_ev", mean);
    v.get("std_ev", sd);
    v.finish();
    checked(v.field("mean_ev"), [&] { n.valley = ValleyDistribution::from_moments(mean, sd); });
  }
  {
    Reader s = r.child("spam");
    s.get("f_m", n.spam.f_m);
    s.get("charge_error", n.spam.charge_error);
    s.finish();
  }
  {
    Reader s = r.child("switches");
    s.get("gate_noise", n.gate_noise);
    s.get("idle_noise", n.idle_noise);
    s.get("shuttle_noise", n.shuttle_noise);
    s.get("init_error", n.init_error);
    s.finish();
  }
  {
    Reader a = r.child("angles");
    a.get("beta", run.beta);
    a.get("gamma", run.gamma);
    a.get("omega", run.omega);
    a.finish();
  }
  r.get_enum("readout_basis", run.readout_basis, readout_basis_from_name);
  r.finish();
  n.spam.t_r_ns = run.arch.t_r_ns;
  checked("run", [&] { run.validate(); });
}

void read_sweep(Reader r, SweepSettings& s) {
  r.get("v_min_m_s", s.v_min_m_s);
  r.get("v_max_m_s", s.v_max_m_s);
  r.get("points_per_decade", s.points_per_decade);
  r.get("velocities", s.velocities);
  if (r.has("families")) {
    const json& fams = r.raw("families");
    if (!fams.is_array()) throw ConfigError(r.field("families") + ": expected an array");
    s.families.clear();
    for (std::size_t i = 0; i < fams.size(); ++i) {
      Reader f(fams[i], r.field("families[" + std::to_string(i) + "]"));
      Family fam;
      f.get("mean_ev", fam.mean_ev);
      f.get("std_ev", fam.std_ev);
      f.finish();
      if (!(fam.mean_ev > 0 && fam.std_ev > 0)) {
        throw ConfigError(f.field("mean_ev") + ": family moments must be positive");
      }
      s.families.push_back(fam);
    }
  }
  if (r.has("laws")) {
    std::vector<std::string> names;
    r.get("laws", names);
    s.laws.clear();
    for (const std::string& nm : names) {
      checked(r.field("laws"), [&] { s.laws.push_back(dephasing_law_from_name(nm)); });
    }
  }
  r.finish();
  checked("sweep", [&] { s.grid(); });
  for (double v : s.velocities) {
    if (!(v > 0)) throw ConfigError("sweep.velocities: velocities must be positive");
  }
  if (s.families.empty() || s.laws.empty()) {
    throw ConfigError("sweep: families and laws must be non-empty");
  }
}

void read_decode(Reader r, DecodeSettings& d) {
  r.get("n_min", d.n_min);
  r.get("n_max", d.n_max);
  r.get("x", d.x);
  r.get("curve_epsilons", d.curve_epsilons);
  if (r.has("rules")) {
    std::vector<std::string> names;
    r.get("rules", names);
    d.rules.clear();
    for (const std::string& nm : names) {
      checked(r.field("rules"), [&] { d.rules.push_back(tree_count_rule_from_name(nm)); });
    }
  }
  r.get("x_max_epsilons", d.x_max_epsilons);
  r.get("mc_sizes", d.mc_sizes);
  r.get("mc_max_m", d.mc_max_m);
  r.get("mc_trials", d.mc_trials);
  r.finish();
  if (d.n_min < 3 || d.n_max < d.n_min) throw ConfigError("decode.n_min: need 3 <= n_min <= n_max");
  if (!(d.x > 0 && d.x <= 1)) throw ConfigError("decode.x: must lie in (0, 1]");
  for (double e : d.curve_epsilons)
    if (!(e >= 0 && e <= 1)) throw ConfigError("decode.curve_epsilons: values must lie in [0, 1]");
  for (double e : d.x_max_epsilons)
    if (!(e >= 0 && e <= 1)) throw ConfigError("decode.x_max_epsilons: values must lie in [0, 1]");
  for (int n : d.mc_sizes)
    if (n < 3) throw ConfigError("decode.mc_sizes: sizes must be >= 3");
  if (d.mc_max_m < 0 || d.mc_trials < 2) throw ConfigError("decode.mc_trials: need >= 2 trials");
}

void read_verify(Reader r, VerifySettings& v) {
  r.get("omegas", v.omegas);
  r.get("quadrature_tuples", v.quadrature_tuples);
  r.get("quadrature_samples", v.quadrature_samples);
  r.get("flip_zz_sign", v.flip_zz_sign);
  r.finish();
  if (v.quadrature_tuples < 1 || v.quadrature_samples < 100) {
    throw ConfigError("verify.quadrature_samples: need >= 1 tuple and >= 100 samples");
  }
}

}  // namespace

SweepGrid SweepSettings::grid() const {
  SweepGrid g;
  g.velocities = velocities.empty()
                     ? log_velocity_grid(v_min_m_s, v_max_m_s, points_per_decade)
                     : velocities;
  g.families = families;
  g.laws = laws;
  return g;
}

ExperimentConfig default_experiment_config() {
  ExperimentConfig c;
  c.run.arch = ArchitectureSpec::defaults(ArchitectureKind::kSpinBus);
  c.run.noise.spam.t_r_ns = c.run.arch.t_r_ns;
  for (double m : {50.0, 100.0, 200.0})
    for (double s : {20.0, 30.0}) c.sweep.families.push_back({m, s});
  c.sweep.laws = {DephasingLaw::kLinear};
  c.decode.x_max_epsilons = {0.0, 0.01, 0.02, 0.03, 0.04, 0.05, 0.07, 0.1, 0.2, 0.5};
  c.verify.omegas = {0.0, 0.3, 1.1, std::numbers::pi / 2.0, 2.7};
  return c;
}

ExperimentConfig experiment_config_from_json(const json& j) {
  ExperimentConfig c = default_experiment_config();
  Reader r(j, "");
  r.get("output_dir", c.output_dir);
  r.get("seed", c.seed);
  r.get("workers", c.workers);
  if (c.workers < 1) throw ConfigError("workers: must be >= 1");
  read_run(r.child("run"), c.run);
  read_sweep(r.child("sweep"), c.sweep);
  read_decode(r.child("decode"), c.decode);
  read_verify(r.child("verify"), c.verify);
  r.finish();
  return c;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return experiment_config_from_json(j);
}

json to_json(const ArchitectureSpec& a) {
  return {{"kind", architecture_name(a.kind)}, {"t_1q_ns", a.t_1q_ns},
          {"t_2q_ns", a.t_2q_ns},              {"t_r_ns", a.t_r_ns},
          {"hop_time_ns", a.hop_time_ns},      {"hop_error", a.hop_error},
          {"readout_path_nm", a.readout_path_nm}};
}

json to_json(const RunConfig& run) {
  const NoiseParams& n = run.noise;
  return {
      {"architecture", to_json(run.arch)},
      {"gate", {{"p_d", n.gate.p_d}, {"p_phi", n.gate.p_phi}, {"p_b", n.gate.p_b}}},
      {"coherence",
       {{"t1_ns", n.coherence.t1_ns},
        {"t2_ns", n.coherence.t2_ns},
        {"law", dephasing_law_name(n.coherence.law)},
        {"form", dephasing_form_name(n.coherence.form)}}},
      {"shuttle",
       {{"dot_size_nm", n.shuttle.dot_size_nm},
        {"noise_corr_length_nm", n.shuttle.noise_corr_length_nm},
        {"velocity_m_s", n.shuttle.velocity_m_s},
        {"flip_prob_per_10um", n.shuttle.flip_prob_per_10um}}},
      {"valley", {{"mean_ev", n.valley.mean_ev}, {"std_ev", n.valley.std_ev}}},
      {"spam", {{"f_m", n.spam.f_m}, {"charge_error", n.spam.charge_error}}},
      {"switches",
       {{"gate_noise", n.gate_noise},
        {"idle_noise", n.idle_noise},
        {"shuttle_noise", n.shuttle_noise},
        {"init_error", n.init_error}}},
      {"angles", {{"beta", run.beta}, {"gamma", run.gamma}, {"omega", run.omega}}},
      {"readout_basis", readout_basis_name(run.readout_basis)}};
}

json to_json(const ExperimentConfig& c) {
  json fams = json::array();
  for (const Family& f : c.sweep.families) fams.push_back({{"mean_ev", f.mean_ev}, {"std_ev", f.std_ev}});
  json laws = json::array();
  for (DephasingLaw l : c.sweep.laws) laws.push_back(dephasing_law_name(l));
  json rules = json::array();
  for (TreeCountRule r : c.decode.rules) rules.push_back(tree_count_rule_name(r));
  return {{"output_dir", c.output_dir},
          {"seed", c.seed},
          {"workers", c.workers},
          {"run", to_json(c.run)},
          {"sweep",
           {{"v_min_m_s", c.sweep.v_min_m_s},
            {"v_max_m_s", c.sweep.v_max_m_s},
            {"points_per_decade", c.sweep.points_per_decade},
            {"velocities", c.sweep.velocities},
            {"families", fams},
            {"laws", laws}}},
          {"decode",
           {{"n_min", c.decode.n_min},
            {"n_max", c.decode.n_max},
            {"x", c.decode.x},
            {"curve_epsilons", c.decode.curve_epsilons},
            {"rules", rules},
            {"x_max_epsilons", c.decode.x_max_epsilons},
            {"mc_sizes", c.decode.mc_sizes},
            {"mc_max_m", c.decode.mc_max_m},
            {"mc_trials", c.decode.mc_trials}}},
          {"verify",
           {{"omegas", c.verify.omegas},
            {"quadrature_tuples", c.verify.quadrature_tuples},
            {"quadrature_samples", c.verify.quadrature_samples},
            {"flip_zz_sign", c.verify.flip_zz_sign}}}};
}

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 failed");
  }
  static const char* kHex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 15];
  }
  return out;
}

std::string config_hash(const ExperimentConfig& cfg) {
  // output_dir does not change results, so it stays out of the hash.
  json j = to_json(cfg);
  j.erase("output_dir");
  return sha256_hex(j.dump());
}

json to_json(const ParityLayout& l) {
  json labels = json::array();
  for (const auto& [a, b] : l.qubit_labels) labels.push_back({a, b});
  return {{"n_physical", l.n_physical}, {"n_logical", l.n_logical},
          {"qubit_labels", labels},     {"rows", l.rows},
          {"cols", l.cols},             {"plaquettes", l.plaquettes},
          {"triangles", l.triangles},   {"periodic", l.periodic},
          {"field_strengths", l.field_strengths}, {"degeneracy_d", l.degeneracy_d}};
}

json to_json(const AbstractCircuit& c) {
  json steps = json::array();
  for (const CircuitStep& s : c.steps) {
    json ops = json::array();
    for (const CircuitOp& op : s.ops) {
      ops.push_back({{"gate", gate_kind_name(op.kind)}, {"angle", op.angle}, {"qubits", op.qubits}});
    }
    steps.push_back({{"tag", s.tag}, {"ops", ops}});
  }
  return {{"n_qubits", c.n_qubits}, {"steps", steps}};
}

json to_json(const TimeExpr& t) {
  return {{"dist_nm", t.dist_nm}, {"n_1q", t.n1q}, {"n_2q", t.n2q},
          {"n_r", t.nr},          {"n_hop", t.nhop}, {"text", t.to_string()}};
}

json to_json(const Schedule& s) {
  json pos = json::array();
  for (const Position& p : s.initial_positions) pos.push_back({{"site", p.site}, {"dx", p.dx}, {"dy", p.dy}});
  json phases = json::array();
  for (const Phase& ph : s.phases) {
    json ops = json::array();
    for (const PhaseOp& op : ph.ops) {
      json o = {{"kind", event_kind_name(op.kind)}, {"qubits", op.qubits}};
      if (op.kind == EventKind::kGate) {
        o["gate"] = gate_kind_name(op.gate);
        o["angle"] = op.angle;
        o["images"] = op.images;
        if (op.relabel) o["relabel"] = true;
      }
      if (op.kind == EventKind::kShuttle) {
        o["distance_nm"] = op.distance_nm;
        o["dest"] = {{"site", op.dest.site}, {"dx", op.dest.dx}, {"dy", op.dest.dy}};
      }
      if (!op.role.empty()) o["role"] = op.role;
      ops.push_back(o);
    }
    json events = json::array();
    for (const auto& evs : ph.events) {
      json q = json::array();
      for (const Event& e : evs) {
        json je = {{"kind", event_kind_name(e.kind)}, {"duration", e.duration.to_string()}};
        if (e.op_index >= 0) je["op"] = e.op_index;
        q.push_back(je);
      }
      events.push_back(q);
    }
    phases.push_back({{"tag", ph.tag},
                      {"block", ph.block},
                      {"duration", to_json(ph.duration)},
                      {"ops", ops},
                      {"events", events}});
  }
  return {{"architecture", architecture_name(s.kind)},
          {"n_qubits", s.n_qubits},
          {"initial_positions", pos},
          {"phases", phases}};
}

json to_json(const ScheduleTotals& t) {
  json qs = json::array();
  for (const QubitTotals& q : t.qubits) {
    qs.push_back({{"shuttled_nm", q.shuttled_nm},
                  {"idle", to_json(q.idle)},
                  {"busy", to_json(q.busy)},
                  {"n_1q", q.n_1q},
                  {"n_cnot_control", q.n_cnot_control},
                  {"n_cnot_target", q.n_cnot_target},
                  {"n_zz", q.n_zz},
                  {"n_swap", q.n_swap},
                  {"n_hop", q.n_hop},
                  {"n_measure", q.n_measure},
                  {"n_init", q.n_init}});
  }
  return {{"wall", to_json(t.wall)}, {"qubits", qs}};
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

CsvWriter::CsvWriter(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvWriter::add_row(std::vector<std::string> row) {
  if (row.size() != header_.size()) throw std::logic_error("CSV row width does not match header");
  rows_.push_back(std::move(row));
}

std::string CsvWriter::str() const {
  auto field = [](const std::string& f) {
    if (f.find_first_of(",\"\n") == std::string::npos) return f;
    std::string q = "\"";
    for (char c : f) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
  };
  std::ostringstream os;
  auto line = [&](const std::vector<std::string>& r) {
    for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << field(r[i]);
    os << '\n';
  };
  line(header_);
  for (const auto& r : rows_) line(r);
  return os.str();
}

void write_text_file(const std::string& dir, const std::string& name, const std::string& content) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path p = std::filesystem::path(dir) / name;
  std::ofstream out(p, std::ios::binary);
  out << content;
  if (!out) throw std::runtime_error("cannot write '" + p.string() + "'");
}

}  // namespace pqsim
