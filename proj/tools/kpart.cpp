#include "kpart/baselines.hpp"
#include "kpart/io.hpp"
#include "kpart/parallel.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <iostream>

using namespace kpart;

namespace {

constexpr double certification_margin = 1e-9;

enum Exit { ok = 0, usage = 1, data = 2, validation = 3 };

struct Common {
  std::uint64_t seed = 20240611;
  std::string out = "-";
  unsigned threads = 1;
  int restarts = 32;
  double tol = 1e-8;
  std::size_t max_evals = 5000;

  OptimizerConfig optimizer() const {
    OptimizerConfig c;
    c.restarts = restarts;
    c.tol = tol;
    c.max_evals = max_evals;
    c.seed = seed;
    return c;
  }

  json to_json() const { return {{"seed", seed}, {"restarts", restarts}, {"tol", tol}, {"max_evals", max_evals}}; }
};

class Output {
 public:
  explicit Output(const std::string& path) : path_(path) {
    if (path_ != "-") {
      file_.open(path_, std::ios::binary);
      if (!file_) throw std::runtime_error("cannot write " + path_);
    }
    start_ = std::chrono::steady_clock::now();
  }

  std::ostream& stream() { return path_ == "-" ? std::cout : file_; }

  /// Wall time goes to a sidecar so the table itself stays reproducible.
  void finish(const json& config) {
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    if (path_ == "-") {
      std::cerr << "wall time " << wall << " s\n";
      return;
    }
    file_.close();
    std::ofstream meta(path_ + ".meta.json");
    meta << json{{"version", version_string}, {"config", config}, {"config_hash", hex64(fnv1a(config.dump()))},
                 {"wall_seconds", wall}}
                .dump(2)
         << '\n';
  }

 private:
  std::string path_;
  std::ofstream file_;
  std::chrono::steady_clock::time_point start_;
};

std::mt19937_64 substream(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

std::vector<double> linear_grid(double lo, double hi, double step) {
  if (!(step > 0.0) || hi < lo) throw std::invalid_argument("grid must be strictly increasing");
  std::vector<double> g;
  const int count = static_cast<int>(std::floor((hi - lo) / step + 1e-9)) + 1;
  for (int i = 0; i < count; ++i) g.push_back(lo + step * i);
  return g;
}

const char* verdict(double v) {
  if (v > certification_margin) return "certified";
  if (v > 0.0) return "inconclusive";
  return "not certified";
}

/// Linear-interpolated first sign changes from non-positive to positive.
/// Sign changes of y located by linear interpolation. Optimized tau values
/// sit at zero below threshold, so a step from a zero point is located by
/// extrapolating the two nearest nonzero samples, clamped to the step.
std::vector<double> crossings(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> out;
  const auto flat = [&](std::size_t i) { return std::abs(y[i]) <= certification_margin; };
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    if ((y[i] <= 0.0) == (y[i + 1] <= 0.0)) continue;
    double root = x[i] - y[i] * (x[i + 1] - x[i]) / (y[i + 1] - y[i]);
    if (flat(i) && i + 2 < x.size() && !flat(i + 1) && !flat(i + 2)) {
      root = x[i + 1] - y[i + 1] * (x[i + 2] - x[i + 1]) / (y[i + 2] - y[i + 1]);
    } else if (flat(i + 1) && i >= 1 && !flat(i) && !flat(i - 1)) {
      root = x[i] - y[i] * (x[i] - x[i - 1]) / (y[i] - y[i - 1]);
    }
    out.push_back(std::clamp(root, x[i], x[i + 1]));
  }
  return out;
}

/// Largest k with tau_{k,n} > margin under the table weights, else 1.
int hierarchy_depth(const DensityOperator& rho, OptimizerConfig cfg) {
  const int n = rho.n_parties();
  const TauEvaluator ev(rho);
  cfg.stop_above = certification_margin;
  for (int k = n; k >= 2; --k) {
    if (tau_optimized(ev, builtin_weights(k, n), cfg).value > certification_margin) return k;
  }
  return 1;
}

WeightVector select_weights(const std::string& kind, int k, int n) {
  if (kind == "table") return builtin_weights(k, n);
  if (kind == "wstate") return w_state_weights(k, n);
  WeightVector w = weights_from_json(parse_json_text(read_file(kind)));
  if (w.n != n) throw parse_error("weight file is for n = " + std::to_string(w.n));
  return w;
}

int cmd_tau(const Common& c, const std::string& state_file, int k, const std::string& weights, bool optimize) {
  const DensityOperator rho = load_state(state_file);
  const int n = rho.n_parties();
  const WeightVector w = select_weights(weights, k, n);
  TauResult r;
  if (optimize) {
    r = tau_optimized(rho, w, c.optimizer());
  } else {
    r = tau(rho, w, seed_probe(rho));
  }
  const json config = {{"command", "tau"}, {"state", state_file}, {"k", k}, {"weights", weights},
                       {"optimize", optimize}, {"common", c.to_json()}};
  Output out(c.out);
  json doc = to_json(r);
  doc["verdict"] = verdict(r.value);
  doc["seed"] = c.seed;
  doc["version"] = version_string;
  out.stream() << doc.dump(2) << '\n';
  out.finish(config);
  std::cerr << "tau_{" << k << "," << n << "} = " << CsvWriter::format(r.value) << " (" << verdict(r.value) << ")\n";
  return ok;
}

int cmd_werner_scan(const Common& c, const std::string& family, const std::string& noise, int n, double chi,
                    double q_lo, double q_hi, double q_step, const std::vector<std::string>& criteria, bool normalize) {
  const auto grid = linear_grid(q_lo, q_hi, q_step);
  PureState target = family == "w-state" ? make_w_state(n) : make_spin_squeezed(n, chi);
  const auto basis = single_excitation_basis(n);
  auto state_at = [&](double q) {
    if (noise == "subspace") {
      if (family != "w-state") throw std::invalid_argument("subspace noise applies to the w-state family");
      return werner_mix_subspace(target, q, basis);
    }
    return werner_mix(target, q);
  };
  for (const auto& cr : criteria) {
    if ((cr[0] == 'd') && n != 4) throw std::invalid_argument("d_k criteria need n = 4");
  }
  auto value = [&](const std::string& cr, const DensityOperator& rho) -> double {
    const int k = std::stoi(cr.substr(cr[0] == 'd' ? 1 : 3));
    if (cr[0] == 'd') return d_k(rho, k);
    const WeightVector w = family == "w-state" ? w_state_weights(k, n) : builtin_weights(k, n);
    return tau_optimized(rho, w, c.optimizer()).value;
  };
  std::vector<std::vector<double>> values(criteria.size());
  const auto rows = parallel_map(grid.size(), c.threads, [&](std::size_t i) {
    const DensityOperator rho = state_at(grid[i]);
    std::vector<double> v;
    for (const auto& cr : criteria) v.push_back(value(cr, rho));
    return v;
  });
  std::vector<double> scale(criteria.size(), 1.0);
  if (normalize) {
    const DensityOperator top = state_at(1.0);
    for (std::size_t j = 0; j < criteria.size(); ++j) {
      if (criteria[j][0] == 't') scale[j] = value(criteria[j], top);
    }
  }
  json config = {{"command", "werner-scan"}, {"family", family}, {"noise", noise}, {"n", n}, {"chi", chi},
                 {"q", {q_lo, q_hi, q_step}}, {"criteria", criteria}, {"normalize", normalize}, {"common", c.to_json()}};
  Output out(c.out);
  CsvWriter csv(out.stream(), config, c.seed);
  csv.header({"q", "criterion", "value"});
  for (std::size_t i = 0; i < grid.size(); ++i) {
    for (std::size_t j = 0; j < criteria.size(); ++j) {
      values[j].push_back(rows[i][j] / scale[j]);
      csv.row(grid[i], criteria[j], rows[i][j] / scale[j]);
    }
  }
  for (std::size_t j = 0; j < criteria.size(); ++j) {
    // d_k certifies below zero, tau above: report where each starts certifying.
    std::vector<double> y = values[j];
    if (criteria[j][0] == 'd') {
      for (double& v : y) v = -v;
    }
    std::string line = "crossing " + criteria[j];
    for (double x : crossings(grid, y)) line += " " + CsvWriter::format(x);
    csv.comment(line);
    std::cerr << line << '\n';
  }
  out.finish(config);
  return ok;
}

int cmd_ensemble(const Common& c, int count, double mean, double sigma, double boost) {
  if (count < 1) throw std::invalid_argument("count must be >= 1");
  const auto basis = single_excitation_basis(4);
  struct Row {
    double entropy;
    std::array<double, 3> tau, d;
  };
  auto cfg = c.optimizer();
  cfg.stop_above = certification_margin;
  const auto rows = parallel_map(static_cast<std::size_t>(count), c.threads, [&](std::size_t i) {
    auto rng = substream(c.seed, i);
    const DensityOperator rho = random_density(std::span<const PureState>(basis), mean, sigma, boost, rng);
    Row r{von_neumann_entropy(rho), {}, {}};
    const TauEvaluator ev(rho);
    const double dmin = min_delta(rho).value;
    for (int k = 2; k <= 4; ++k) {
      auto local = cfg;
      local.seed = c.seed ^ (0x9e3779b97f4a7c15ULL * (i + 1));
      r.tau[static_cast<std::size_t>(k - 2)] = tau_optimized(ev, w_state_weights(k, 4), local).value;
      r.d[static_cast<std::size_t>(k - 2)] = dmin - delta_threshold(k);
    }
    return r;
  });
  json config = {{"command", "ensemble"}, {"count", count}, {"mean", mean}, {"sigma", sigma}, {"diag_boost", boost},
                 {"common", c.to_json()}};
  Output out(c.out);
  CsvWriter csv(out.stream(), config, c.seed);
  csv.header({"index", "entropy", "tau2", "tau3", "tau4", "d2", "d3", "d4"});
  std::array<int, 3> tau_hits{}, d_hits{}, exceptions{};
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    csv.row(i, r.entropy, r.tau[0], r.tau[1], r.tau[2], r.d[0], r.d[1], r.d[2]);
    for (std::size_t k = 0; k < 3; ++k) {
      const bool t = r.tau[k] > certification_margin, d = r.d[k] < 0.0;
      tau_hits[k] += t;
      d_hits[k] += d;
      exceptions[k] += d && !t;
    }
  }
  for (std::size_t k = 0; k < 3; ++k) {
    std::ostringstream line;
    line << "k=" << k + 2 << " tau_fraction " << CsvWriter::format(double(tau_hits[k]) / count) << " d_fraction "
         << CsvWriter::format(double(d_hits[k]) / count) << " d_only " << exceptions[k];
    csv.comment(line.str());
    std::cerr << line.str() << '\n';
  }
  out.finish(config);
  return ok;
}

int cmd_spin_compare(const Common& c, int n, int count, double chi_lo, double chi_hi, double eta_lo, double eta_hi) {
  if (n != 4 && n != 6) throw std::invalid_argument("spin-compare supports n = 4 and n = 6");
  struct Row {
    double chi, eta, jx, var;
    int squeezing, hierarchy;
  };
  const auto rows = parallel_map(static_cast<std::size_t>(count), c.threads, [&](std::size_t i) {
    auto rng = substream(c.seed, i);
    std::uniform_real_distribution<double> uc(chi_lo, chi_hi), ue(eta_lo, eta_hi);
    const double chi = uc(rng), eta = ue(rng);
    const DensityOperator rho = werner_mix(make_spin_squeezed(n, chi), eta);
    const auto sq = certify_spin_squeezing(rho, n);
    auto cfg = c.optimizer();
    cfg.seed = c.seed ^ (0x9e3779b97f4a7c15ULL * (i + 1));
    return Row{chi, eta, sq.jx, sq.var_min, sq.depth, hierarchy_depth(rho, cfg)};
  });
  json config = {{"command", "spin-compare"}, {"n", n}, {"count", count}, {"chi", {chi_lo, chi_hi}},
                 {"eta", {eta_lo, eta_hi}}, {"common", c.to_json()}};
  Output out(c.out);
  CsvWriter csv(out.stream(), config, c.seed);
  csv.header({"index", "chi", "eta", "jx", "var_min", "squeezing_depth", "hierarchy_depth"});
  std::map<std::pair<int, int>, int> table;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    csv.row(i, r.chi, r.eta, r.jx, r.var, r.squeezing, r.hierarchy);
    ++table[{r.squeezing, r.hierarchy}];
  }
  for (const auto& [key, num] : table) {
    const std::string line = "squeezing_depth " + std::to_string(key.first) + " hierarchy_depth " +
                             std::to_string(key.second) + " count " + std::to_string(num);
    csv.comment(line);
    std::cerr << line << '\n';
  }
  out.finish(config);
  return ok;
}

int cmd_dephasing(const Common& c, int n, std::vector<int> ks, double lo, double hi, double step, bool with_lifetimes) {
  if (n < 2 || n > 12) throw std::invalid_argument("dephasing supports 2 <= n <= 12");
  if (ks.empty()) {
    for (int k = 2; k <= n; ++k) ks.push_back(k);
  }
  const PureState g = make_graph_state(complete_graph(n), n);
  const auto grid = linear_grid(lo, hi, step);
  const Probe probe = analytic_probe(n);
  const auto rows = parallel_map(grid.size(), c.threads, [&](std::size_t i) { return dephased_tau(g, grid[i], ks, probe); });
  json config = {{"command", "dephasing"}, {"n", n}, {"ks", ks}, {"gamma_t", {lo, hi, step}},
                 {"lifetimes", with_lifetimes}, {"common", c.to_json()}};
  Output out(c.out);
  CsvWriter csv(out.stream(), config, c.seed);
  csv.header({"gamma_t", "k", "tau", "probe_id"});
  for (std::size_t i = 0; i < grid.size(); ++i) {
    for (std::size_t j = 0; j < ks.size(); ++j) csv.row(grid[i], ks[j], rows[i][j], "analytic");
  }
  if (with_lifetimes) {
    const auto t = lifetimes(g, ks);
    for (int k : ks) {
      const auto it = t.find(k);
      const std::string line = "lifetime k=" + std::to_string(k) + " " + (it == t.end() ? "not-found" : CsvWriter::format(it->second));
      csv.comment(line);
      std::cerr << line << '\n';
    }
  }
  out.finish(config);
  return ok;
}

int cmd_growth(const Common& c, int n, int body, const std::string& boundary, int realizations, double lo_exp,
               double hi_exp, double step, bool fixed_probe) {
  if (boundary != "open" && boundary != "periodic") throw std::invalid_argument("boundary must be open or periodic");
  const Boundary bc = boundary == "open" ? Boundary::open : Boundary::periodic;
  const auto times = log_grid(lo_exp, hi_exp, step);
  const WeightVector w = builtin_weights(3, n);
  const PureState initial = PureState::basis(qubit_dims(n), total_dim(qubit_dims(n)) - 1);
  struct Run {
    HamiltonianSpec spec;
    GrowthTrajectory traj;
  };
  const auto runs = parallel_map(static_cast<std::size_t>(realizations), c.threads, [&](std::size_t r) {
    const std::uint64_t seed = substream(c.seed, r)();
    auto spec = HamiltonianSpec::random(n, body, bc, seed);
    auto cfg = c.optimizer();
    cfg.seed = seed;
    return Run{spec, growth_run(spec, initial, times, w, cfg, !fixed_probe)};
  });
  json config = {{"command", "growth"}, {"n", n}, {"body", body}, {"boundary", boundary},
                 {"realizations", realizations}, {"t_exp", {lo_exp, hi_exp, step}}, {"fixed_probe", fixed_probe},
                 {"common", c.to_json()}};
  Output out(c.out);
  CsvWriter csv(out.stream(), config, c.seed);
  csv.header({"realization", "t", "tau", "alpha"});
  for (std::size_t r = 0; r < runs.size(); ++r) {
    csv.comment("realization " + std::to_string(r) + " hamiltonian " + to_json(runs[r].spec).dump());
    std::vector<GrowthPoint> alpha;
    try {
      alpha = growth_exponent(runs[r].traj.tau, runs[r].traj.times);
    } catch (const insufficient_data_error&) {
    }
    for (std::size_t i = 0; i < times.size(); ++i) {
      std::string a;
      for (const auto& p : alpha) {
        if (std::abs(std::log10(p.t) - std::log10(times[i])) < 1e-9) a = CsvWriter::format(p.alpha);
      }
      csv.row(r, times[i], runs[r].traj.tau[i], a);
    }
    const std::string line = "realization " + std::to_string(r) + " alpha_first " +
                             (alpha.empty() ? std::string("insufficient-data") : CsvWriter::format(alpha.front().alpha)) +
                             " at_t " + (alpha.empty() ? std::string("-") : CsvWriter::format(alpha.front().t));
    csv.comment(line);
    std::cerr << line << '\n';
  }
  out.finish(config);
  return ok;
}

struct Check {
  std::string name;
  bool pass;
  std::string detail;
};

std::vector<PureState> computational_basis(int n) {
  std::vector<PureState> b;
  for (std::size_t i = 0; i < (std::size_t{1} << n); ++i) b.push_back(PureState::basis(qubit_dims(n), i));
  return b;
}

std::vector<Check> oracle_checks(std::uint64_t seed, int cases) {
  std::vector<Check> out;
  auto rng = substream(seed, 1);
  double worst = 0.0;
  for (int n = 2; n <= 4; ++n) {
    const auto basis = computational_basis(n);
    for (int s = 0; s < cases; ++s) {
      const DensityOperator rho = random_density(std::span<const PureState>(basis), 0.0, 1.0, 1.0, rng);
      const Probe p = probe_from_angles(random_probe_angles(n, rng), n);
      for (int k = 2; k <= n; ++k) {
        const WeightVector w = builtin_weights(k, n);
        worst = std::max(worst, std::abs(tau(rho, w, p).value - tau_bruteforce(rho, w, p)));
      }
    }
  }
  out.push_back({"oracle equivalence n<=4", worst <= 1e-10, "max diff " + CsvWriter::format(worst)});

  double cond3 = 0.0;
  for (int s = 0; s < cases; ++s) {
    const int n = 3 + s % 3;
    std::vector<int> sizes{1 + s % 2, n - 1 - s % 2};
    const PureState psi = random_block_state(sizes, rng);
    const Probe p = probe_from_angles(random_probe_angles(n, rng), n);
    const DensityOperator rho = DensityOperator::from_pure(psi);
    for (const auto& bp : all_bipartitions(n)) {
      if (is_biseparable(psi, bp)) cond3 = std::max(cond3, std::abs(f_global(rho, p) - f_bipartition(rho, p, bp)));
    }
  }
  out.push_back({"condition III", cond3 <= 1e-8, "max |f - f_S| " + CsvWriter::format(cond3)});

  double convex = -std::numeric_limits<double>::infinity();
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int s = 0; s < cases; ++s) {
    const int n = 2 + s % 3;
    const auto basis = computational_basis(n);
    const auto r1 = random_density(std::span<const PureState>(basis), 0.0, 1.0, 1.0, rng);
    const auto r2 = random_density(std::span<const PureState>(basis), 0.0, 1.0, 1.0, rng);
    const double mix = u(rng);
    const auto r = DensityOperator::from_dense(qubit_dims(n), mix * r1.matrix() + (1 - mix) * r2.matrix());
    const Probe p = probe_from_angles(random_probe_angles(n, rng), n);
    const WeightVector w = builtin_weights(n, n);
    convex = std::max(convex, tau(r, w, p).value - mix * tau(r1, w, p).value - (1 - mix) * tau(r2, w, p).value);
  }
  out.push_back({"fixed-probe convexity", convex <= 1e-10, "max violation " + CsvWriter::format(convex)});
  return out;
}

std::vector<Check> weight_checks(const Common& c, int samples, bool corrupt) {
  std::vector<Check> out;
  auto cfg = c.optimizer();
  cfg.stop_above = certification_margin;
  for (int n = 2; n <= 8; ++n) {
    for (int k = 2; k <= n; ++k) {
      WeightVector w = builtin_weights(k, n);
      if (corrupt && k == 3 && n == 5) w.a[1] /= 2;
      auto rng = substream(c.seed, static_cast<std::uint64_t>(100 * k + n));
      const auto rep = validate_weights(w, samples, rng, cfg);
      out.push_back({"soundness k=" + std::to_string(k) + " n=" + std::to_string(n), rep.max_violation <= 1e-9,
                     "max " + CsvWriter::format(rep.max_violation)});
    }
  }
  return out;
}

int cmd_validate(const Common& c, const std::string& scope, int samples, bool corrupt) {
  std::vector<Check> all;
  if (scope == "oracles" || scope == "all") {
    auto o = oracle_checks(c.seed, samples);
    all.insert(all.end(), o.begin(), o.end());
  }
  if (scope == "weights" || scope == "all") {
    auto w = weight_checks(c, samples, corrupt);
    all.insert(all.end(), w.begin(), w.end());
  }
  bool pass = true;
  for (const auto& ch : all) {
    std::cout << (ch.pass ? "PASS " : "FAIL ") << ch.name << "  " << ch.detail << '\n';
    pass = pass && ch.pass;
  }
  return pass ? ok : validation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"k-partite entanglement criteria toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  Common c;
  app.add_option("--seed", c.seed, "RNG seed");
  app.add_option("--out", c.out, "output path ('-' for stdout)");
  app.add_option("--threads", c.threads, "worker threads")->check(CLI::Range(1u, 256u));
  app.add_option("--restarts", c.restarts, "optimizer restarts")->check(CLI::Range(1, 100000));
  app.add_option("--tol", c.tol, "optimizer parameter tolerance");
  app.add_option("--max-evals", c.max_evals, "objective evaluations per restart");

  auto* tau_cmd = app.add_subcommand("tau", "evaluate tau_{k,n} for a state file");
  std::string state_file, weights = "table";
  int k = 2;
  bool optimize = false;
  tau_cmd->add_option("--state", state_file, "state JSON file")->required();
  tau_cmd->add_option("--k", k, "target depth")->required();
  tau_cmd->add_option("--weights", weights, "table, wstate or a weight JSON file");
  tau_cmd->add_flag("--optimize", optimize, "maximize over probes");

  auto* scan = app.add_subcommand("werner-scan", "criteria along a white-noise mixture");
  std::string family = "w-state", noise = "subspace";
  int scan_n = 4;
  double chi = 0.1, q_lo = 0.0, q_hi = 1.0, q_step = 0.01;
  std::vector<std::string> criteria{"tau2", "tau3", "tau4", "d2", "d3", "d4"};
  bool normalize = false;
  scan->add_option("--family", family)->check(CLI::IsMember({"w-state", "spin-squeezed"}));
  scan->add_option("--noise", noise, "full or subspace (single-excitation span)")->check(CLI::IsMember({"full", "subspace"}));
  scan->add_option("--n", scan_n)->check(CLI::Range(2, 12));
  scan->add_option("--chi", chi);
  scan->add_option("--q-min", q_lo);
  scan->add_option("--q-max", q_hi);
  scan->add_option("--q-step", q_step);
  scan->add_option("--criteria", criteria)->delimiter(',');
  scan->add_flag("--normalize", normalize, "divide tau by its value at q = 1");

  auto* ens = app.add_subcommand("ensemble", "random single-excitation mixed states");
  int count = 2000;
  double mean = 0.0, sigma = 1.0, boost = 1.0;
  ens->add_option("--count", count);
  ens->add_option("--mean", mean);
  ens->add_option("--sigma", sigma);
  ens->add_option("--diag-boost", boost);

  auto* spin = app.add_subcommand("spin-compare", "spin squeezing versus the hierarchy");
  int spin_n = 4, spin_count = 4000;
  double chi_lo = 0.0, chi_hi = 0.5, eta_lo = 0.8, eta_hi = 1.0;
  spin->add_option("--n", spin_n);
  spin->add_option("--count", spin_count);
  spin->add_option("--chi-min", chi_lo);
  spin->add_option("--chi-max", chi_hi);
  spin->add_option("--eta-min", eta_lo);
  spin->add_option("--eta-max", eta_hi);

  auto* deph = app.add_subcommand("dephasing", "dephasing of the fully connected graph state");
  int deph_n = 12;
  std::vector<int> ks;
  double g_lo = 0.0, g_hi = 3.0, g_step = 0.02;
  bool with_lifetimes = false;
  deph->add_option("--n", deph_n);
  deph->add_option("--ks", ks)->delimiter(',');
  deph->add_option("--gt-min", g_lo);
  deph->add_option("--gt-max", g_hi);
  deph->add_option("--gt-step", g_step);
  deph->add_flag("--lifetimes", with_lifetimes);

  auto* growth = app.add_subcommand("growth", "short-time growth of tau_{3,n} under random Hamiltonians");
  int growth_n = 5, body = 2, realizations = 20;
  std::string boundary = "open";
  double t_lo = -4.0, t_hi = 0.0, t_step = 0.1;
  bool fixed_probe = false;
  growth->add_option("--n", growth_n)->check(CLI::Range(3, 10));
  growth->add_option("--body", body)->check(CLI::IsMember({2, 3}));
  growth->add_option("--boundary", boundary);
  growth->add_option("--realizations", realizations);
  growth->add_option("--log10-t-min", t_lo);
  growth->add_option("--log10-t-max", t_hi);
  growth->add_option("--log10-t-step", t_step);
  growth->add_flag("--fixed-probe", fixed_probe);

  auto* val = app.add_subcommand("validate", "run the invariant suites");
  std::string scope = "all";
  int samples = 200;
  bool corrupt = false;
  val->add_option("--scope", scope)->check(CLI::IsMember({"weights", "oracles", "all"}));
  val->add_option("--samples", samples);
  val->add_flag("--corrupt-weights", corrupt, "halve a_2 of the (3,5) row to exercise failure");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? ok : usage;
  }

  try {
    if (*tau_cmd) return cmd_tau(c, state_file, k, weights, optimize);
    if (*scan) return cmd_werner_scan(c, family, noise, scan_n, chi, q_lo, q_hi, q_step, criteria, normalize);
    if (*ens) return cmd_ensemble(c, count, mean, sigma, boost);
    if (*spin) return cmd_spin_compare(c, spin_n, spin_count, chi_lo, chi_hi, eta_lo, eta_hi);
    if (*deph) return cmd_dephasing(c, deph_n, ks, g_lo, g_hi, g_step, with_lifetimes);
    if (*growth) return cmd_growth(c, growth_n, body, boundary, realizations, t_lo, t_hi, t_step, fixed_probe);
    if (*val) return cmd_validate(c, scope, samples, corrupt);
  } catch (const parse_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return data;
  } catch (const unsupported_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return usage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return usage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return data;
  }
  return usage;
}
