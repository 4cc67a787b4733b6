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

#include "pqsim/commands.h"

#include <cmath>
#include <cstdio>
#include <ctime>
#include <set>
#include <sstream>

#include "pqsim/verify.h"

namespace pqsim {

using nlohmann::json;

namespace {

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json metadata(const ExperimentConfig& cfg, const CommandOptions& opts, const char* command) {
  json m = {{"schema_version", kSchemaVersion},
            {"config_hash", config_hash(cfg)},
            {"command", command},
            {"config", to_json(cfg)}};
  if (opts.timestamp) m["generated_at"] = utc_now();
  return m;
}

std::string g(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::string curve_name(DephasingLaw law, const Family& f) {
  return dephasing_law_name(law) + "_E" + g(f.mean_ev) + "_s" + g(f.std_ev);
}

void save(const ExperimentConfig& cfg, const std::string& name, const std::string& body,
          std::ostream& log) {
  write_text_file(cfg.output_dir, name, body);
  log << "wrote " << cfg.output_dir << "/" << name << "\n";
}

}  // namespace

int cmd_sweep(const ExperimentConfig& cfg, const CommandOptions& opts, std::ostream& log) {
  const SweepGrid grid = cfg.sweep.grid();
  const std::string hash = config_hash(cfg);
  const std::string schema = std::to_string(kSchemaVersion);
  const std::string arch = architecture_name(cfg.run.arch.kind);
  const SweepResult res = sweep(cfg.run, grid, cfg.workers);
  const Schedule schedule = build_round_schedule(cfg.run);

  CsvWriter csv({"schema_version", "config_hash", "architecture", "law", "mean_ev", "std_ev",
                 "velocity_m_s", "epsilon", "fidelity", "p_1q", "f_r", "f_m", "wall_ns"});
  for (const SweepPoint& p : res.points) {
    csv.add_row({schema, hash, arch, dephasing_law_name(p.law), format_double(p.family.mean_ev),
                 format_double(p.family.std_ev), format_double(p.velocity),
                 format_double(p.result.epsilon), format_double(p.result.fidelity),
                 format_double(p.result.p_1q), format_double(p.result.f_r),
                 format_double(p.result.f_m), format_double(p.result.wall_ns)});
  }

  // Points arrive curve by curve, each spanning the whole velocity grid.
  const std::size_t nv = grid.velocities.size();
  const std::size_t n_curves = nv ? res.points.size() / nv : 0;
  std::vector<std::string> plot_header{"schema_version", "config_hash", "velocity_m_s"};
  json curves = json::array();
  for (std::size_t c = 0; c < n_curves; ++c) {
    const SweepPoint& first = res.points[c * nv];
    plot_header.push_back(curve_name(first.law, first.family));
    std::vector<double> eps(nv);
    json pts = json::array();
    for (std::size_t i = 0; i < nv; ++i) {
      const SweepPoint& p = res.points[c * nv + i];
      eps[i] = p.result.epsilon;
      pts.push_back({{"velocity_m_s", p.velocity},
                     {"epsilon", p.result.epsilon},
                     {"fidelity", p.result.fidelity},
                     {"p_1q", p.result.p_1q},
                     {"f_r", p.result.f_r},
                     {"f_m", p.result.f_m},
                     {"wall_ns", p.result.wall_ns}});
    }
    json curve = {{"law", dephasing_law_name(first.law)},
                  {"mean_ev", first.family.mean_ev},
                  {"std_ev", first.family.std_ev}};
    if (nv >= 1) {
      const Optimum o = optimal_velocity(grid.velocities, eps);
      curve["optimum"] = {{"velocity_m_s", o.velocity},
                          {"epsilon", o.epsilon},
                          {"grid_index", o.index},
                          {"interior", o.interior}};
      if (o.epsilon > 0.0 && o.epsilon < 0.1) {
        const LayerAttribution a = attribute_layers(schedule, cfg.run.arch, o.velocity, o.epsilon, 0.1);
        curve["depth"] = {{"epsilon_target", 0.1}, {"d_max", a.d_max},   {"rounds", a.rounds},
                          {"f1", a.f1},            {"p1", a.p1},         {"f2", a.f2},
                          {"p2", a.p2},            {"share_1q", a.share_1q}, {"share_2q", a.share_2q}};
      }
      log << curve_name(first.law, first.family) << ": min epsilon " << g(o.epsilon) << " at v = "
          << g(o.velocity) << " m/s\n";
    }
    curve["points"] = pts;
    curves.push_back(curve);
  }
  CsvWriter plot(plot_header);
  for (std::size_t i = 0; i < nv && n_curves; ++i) {
    std::vector<std::string> row{schema, hash, format_double(grid.velocities[i])};
    for (std::size_t c = 0; c < n_curves; ++c) row.push_back(format_double(res.points[c * nv + i].result.epsilon));
    plot.add_row(row);
  }

  json skipped = json::array();
  for (const Family& f : res.skipped) skipped.push_back({{"mean_ev", f.mean_ev}, {"std_ev", f.std_ev}});
  json out = metadata(cfg, opts, "sweep");
  out["architecture"] = arch;
  out["skipped_families"] = skipped;
  out["curves"] = curves;

  save(cfg, "sweep.csv", csv.str(), log);
  save(cfg, "sweep_plot.csv", plot.str(), log);
  save(cfg, "sweep.json", out.dump(2) + "\n", log);
  return kExitOk;
}

int cmd_decode_stats(const ExperimentConfig& cfg, const CommandOptions& opts, std::ostream& log) {
  const DecodeSettings& d = cfg.decode;
  const std::string hash = config_hash(cfg);
  const std::string schema = std::to_string(kSchemaVersion);
  std::vector<int> n_range;
  for (int n = d.n_min; n <= d.n_max; ++n) n_range.push_back(n);

  json jumps = json::array();
  for (TreeCountRule rule : d.rules) {
    const std::string rn = tree_count_rule_name(rule);
    CsvWriter csv({"schema_version", "config_hash", "rule", "N", "n", "K", "epsilon", "x",
                   "threshold_n_ok", "p_fail"});
    for (double eps : d.curve_epsilons) {
      std::vector<double> curve;
      for (int big_n : n_range) {
        const TreeStatsConfig c{big_n, trees_for(big_n, rule), d.x, eps};
        const double pf = p_fail(c);
        curve.push_back(pf);
        csv.add_row({schema, hash, rn, std::to_string(big_n), std::to_string(c.n_trees),
                     std::to_string(c.n_physical()), format_double(eps), format_double(d.x),
                     std::to_string(threshold_n_ok(c)), format_double(pf)});
      }
      json at = json::array();
      for (std::size_t i : detect_jumps(curve)) at.push_back(n_range[i]);
      jumps.push_back({{"rule", rn}, {"epsilon", eps}, {"jump_at_N", at}});
    }
    save(cfg, "p_fail_" + rn + ".csv", csv.str(), log);
  }

  CsvWriter xcsv({"schema_version", "config_hash", "rule", "epsilon", "x_max"});
  for (TreeCountRule rule : d.rules) {
    for (double eps : d.x_max_epsilons) {
      xcsv.add_row({schema, hash, tree_count_rule_name(rule), format_double(eps),
                    format_double(x_max(n_range, rule, eps))});
    }
  }
  save(cfg, "x_max.csv", xcsv.str(), log);

  // Recursion against sampled tree sets.
  json mc = json::array();
  bool mc_ok = true;
  for (int big_n : d.mc_sizes) {
    for (TreeCountRule rule : d.rules) {
      const TreeStatsConfig c{big_n, trees_for(big_n, rule), d.x, 0.0};
      const int max_m = std::min(d.mc_max_m, c.n_physical());
      const MonteCarloStats s = monte_carlo_trees(c, max_m, d.mc_trials, cfg.seed,
                                                  Placement::kIndependent, cfg.workers);
      for (int m = 1; m <= max_m; ++m) {
        const double rec = expected_incorrect_trees(c, m);
        const double dev = std::abs(rec - s.mean_incorrect[m]);
        const bool ok = dev <= 3.0 * s.std_error[m] + 1e-12;
        mc_ok = mc_ok && ok;
        mc.push_back({{"N", big_n},
                      {"n", c.n_trees},
                      {"m", m},
                      {"recursion", rec},
                      {"monte_carlo", s.mean_incorrect[m]},
                      {"std_error", s.std_error[m]},
                      {"pass", ok}});
      }
    }
  }
  log << "monte-carlo validation: " << (mc_ok ? "pass" : "FAIL") << "\n";

  json out = metadata(cfg, opts, "decode-stats");
  out["jumps"] = jumps;
  out["monte_carlo"] = {{"trials", d.mc_trials}, {"placement", "independent"},
                        {"all_pass", mc_ok}, {"cases", mc}};
  save(cfg, "decode_stats.json", out.dump(2) + "\n", log);
  return mc_ok ? kExitOk : kExitVerification;
}

int cmd_verify(const ExperimentConfig& cfg, const CommandOptions& opts, std::ostream& log) {
  const VerifySettings& v = cfg.verify;
  std::vector<CheckResult> checks =
      check_circuit_equivalence(v.omegas, v.flip_zz_sign ? 1.0 : -1.0);
  for (CheckResult& c : check_valley_quadrature(v.quadrature_tuples, v.quadrature_samples, cfg.seed,
                                                cfg.workers)) {
    checks.push_back(c);
  }
  for (CheckResult& c : check_schedule_regression()) checks.push_back(c);
  checks.push_back(check_channel_properties(10000, cfg.seed));
  log << format_checks(checks);

  json rows = json::array();
  for (const CheckResult& c : checks) {
    rows.push_back({{"name", c.name}, {"passed", c.passed}, {"value", c.value},
                    {"tolerance", c.tolerance}, {"detail", c.detail}});
  }
  json out = metadata(cfg, opts, "verify");
  out["all_pass"] = all_passed(checks);
  out["checks"] = rows;
  save(cfg, "verify.json", out.dump(2) + "\n", log);
  return all_passed(checks) ? kExitOk : kExitVerification;
}

namespace {

std::string phase_summary(const Phase& p) {
  std::ostringstream os;
  os << p.block << "/" << p.tag << ":";
  for (const PhaseOp& op : p.ops) {
    os << " " << (op.kind == EventKind::kGate ? gate_kind_name(op.gate) : event_kind_name(op.kind))
       << "(";
    for (std::size_t i = 0; i < op.qubits.size(); ++i) os << (i ? "," : "") << op.qubits[i];
    os << ")";
  }
  return os.str();
}

// Line diff by longest common subsequence; the lists are a few dozen lines.
std::string line_diff(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  const std::size_t n = a.size(), m = b.size();
  std::vector<std::vector<int>> l(n + 1, std::vector<int>(m + 1, 0));
  for (std::size_t i = n; i-- > 0;)
    for (std::size_t j = m; j-- > 0;)
      l[i][j] = a[i] == b[j] ? l[i + 1][j + 1] + 1 : std::max(l[i + 1][j], l[i][j + 1]);
  std::ostringstream os;
  std::size_t i = 0, j = 0;
  while (i < n || j < m) {
    if (i < n && j < m && a[i] == b[j]) {
      os << "  " << a[i++] << "\n";
      ++j;
    } else if (j < m && (i == n || l[i][j + 1] >= l[i + 1][j])) {
      os << "+ " << b[j++] << "\n";
    } else {
      os << "- " << a[i++] << "\n";
    }
  }
  return os.str();
}

}  // namespace

int cmd_schedule_dump(const ExperimentConfig& cfg, const CommandOptions& opts, std::ostream& log) {
  const std::string hash = config_hash(cfg);
  const std::string schema = std::to_string(kSchemaVersion);
  const std::string arch = architecture_name(cfg.run.arch.kind);
  const Schedule s = build_round_schedule(cfg.run);
  check_locality(s);
  check_lock_step(s);

  std::vector<std::string> blocks;
  for (const Phase& p : s.phases) {
    if (std::find(blocks.begin(), blocks.end(), p.block) == blocks.end()) blocks.push_back(p.block);
  }
  CsvWriter csv({"schema_version", "config_hash", "architecture", "block", "qubit", "shuttled_nm",
                 "idle", "busy", "wall", "n_1q", "n_cnot_control", "n_cnot_target", "n_zz",
                 "n_swap", "n_hop", "n_measure", "n_init"});
  json totals = json::object();
  std::vector<std::string> scopes{"all"};
  scopes.insert(scopes.end(), blocks.begin(), blocks.end());
  for (const std::string& scope : scopes) {
    const ScheduleTotals t = schedule_totals(s, scope == "all" ? "" : scope);
    totals[scope] = to_json(t);
    for (std::size_t q = 0; q < t.qubits.size(); ++q) {
      const QubitTotals& x = t.qubits[q];
      csv.add_row({schema, hash, arch, scope, std::to_string(q), std::to_string(x.shuttled_nm),
                   x.idle.to_string(), x.busy.to_string(), t.wall.to_string(),
                   std::to_string(x.n_1q), std::to_string(x.n_cnot_control),
                   std::to_string(x.n_cnot_target), std::to_string(x.n_zz),
                   std::to_string(x.n_swap), std::to_string(x.n_hop), std::to_string(x.n_measure),
                   std::to_string(x.n_init)});
    }
  }
  json out = metadata(cfg, opts, "schedule-dump");
  out["architecture"] = arch;
  out["schedule"] = to_json(s);
  out["totals"] = totals;
  save(cfg, "schedule_" + arch + ".json", out.dump(2) + "\n", log);
  save(cfg, "totals_" + arch + ".csv", csv.str(), log);
  save(cfg, "timeline_" + arch + ".txt", "# config_hash " + hash + "\n" + timeline(s), log);

  if (cfg.run.arch.kind != ArchitectureKind::kSpinBus) {
    RunConfig swap_cfg = cfg.run, hop_cfg = cfg.run;
    swap_cfg.arch.kind = ArchitectureKind::kModular;
    hop_cfg.arch.kind = ArchitectureKind::kModularHop;
    const Schedule a = build_round_schedule(swap_cfg), b = build_round_schedule(hop_cfg);
    std::vector<std::string> la, lb;
    for (const Phase& p : a.phases) la.push_back(phase_summary(p));
    for (const Phase& p : b.phases) lb.push_back(phase_summary(p));
    std::ostringstream os;
    os << "# config_hash " << hash << "\n"
       << "# - modular (SWAP chains)  + modular_hop (hop moves)\n"
       << "# wall modular:     " << schedule_totals(a).wall.to_string() << "\n"
       << "# wall modular_hop: " << schedule_totals(b).wall.to_string() << "\n"
       << line_diff(la, lb);
    save(cfg, "swap_vs_hop.diff", os.str(), log);
  }
  return kExitOk;
}

int run_guarded(const std::function<int()>& body, std::ostream& err) {
  try {
    return body();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    err << "invalid parameter: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
}

}  // namespace pqsim
