#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "faraday/elliptic.hpp"
#include "faraday/errors.hpp"
#include "faraday/field_io.hpp"
#include "faraday/floquet.hpp"
#include "faraday/functionals.hpp"
#include "faraday/geometry.hpp"
#include "faraday/norms.hpp"
#include "faraday/parallel.hpp"

namespace faraday::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

// Reads one JSON object, tracking consumed keys so leftovers can be reported.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError((path_.empty() ? std::string("config") : path_) + ": expected an object");
  }

  const json* find(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  void number(const std::string& key, double& out) {
    if (const json* v = find(key)) out = as_number(*v, join(path_, key));
  }

  void integer(const std::string& key, int& out) {
    if (const json* v = find(key)) {
      if (!v->is_number_integer()) throw ConfigError(join(path_, key) + ": expected an integer");
      out = v->get<int>();
    }
  }

  void boolean(const std::string& key, bool& out) {
    if (const json* v = find(key)) {
      if (!v->is_boolean()) throw ConfigError(join(path_, key) + ": expected a boolean");
      out = v->get<bool>();
    }
  }

  void string(const std::string& key, std::string& out) {
    if (const json* v = find(key)) {
      if (!v->is_string()) throw ConfigError(join(path_, key) + ": expected a string");
      out = v->get<std::string>();
    }
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) throw ConfigError(join(path_, it.key()) + ": unknown key");
    }
  }

  static double as_number(const json& v, const std::string& path) {
    if (!v.is_number()) throw ConfigError(path + ": expected a number");
    return v.get<double>();
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

std::vector<double> number_list(const json& v, const std::string& path) {
  std::vector<double> out;
  if (v.is_array()) {
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(Reader::as_number(v[i], path + "[" + std::to_string(i) + "]"));
  } else if (v.is_object()) {
    // Uniform range {min, max, count}.
    Reader r(v, path);
    double lo = 0.0, hi = 0.0;
    int count = 0;
    r.number("min", lo);
    r.number("max", hi);
    r.integer("count", count);
    r.finish();
    if (count < 1) throw ConfigError(path + ".count: must be at least 1");
    if (count == 1) return {lo};
    for (int i = 0; i < count; ++i) out.push_back(lo + (hi - lo) * i / (count - 1));
  } else {
    throw ConfigError(path + ": expected an array or {min, max, count}");
  }
  if (out.empty()) throw ConfigError(path + ": must be nonempty");
  return out;
}

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

InitialMode::Target parse_target(const std::string& s, const std::string& path) {
  if (s == "u1") return InitialMode::Target::u1;
  if (s == "u2") return InitialMode::Target::u2;
  if (s == "u3") return InitialMode::Target::u3;
  if (s == "eta") return InitialMode::Target::eta;
  throw ConfigError(path + ": expected one of u1, u2, u3, eta");
}

const char* target_name(InitialMode::Target t) {
  switch (t) {
    case InitialMode::Target::u1:
      return "u1";
    case InitialMode::Target::u2:
      return "u2";
    case InitialMode::Target::u3:
      return "u3";
    case InitialMode::Target::eta:
      break;
  }
  return "eta";
}

void parse_params(const json& j, Params& p) {
  Reader r(j, "params");
  r.number("L1", p.L1);
  r.number("L2", p.L2);
  r.number("b", p.b);
  r.number("g", p.g);
  r.number("mu", p.mu);
  r.number("sigma", p.sigma);
  r.number("amp", p.amp);
  r.number("omega", p.omega);
  r.finish();
}

OscillationProfile parse_profile(const json& j) {
  Reader r(j, "profile");
  std::string type = "cosine";
  r.string("type", type);
  if (type == "cosine") {
    double delta = 0.0;
    r.number("delta", delta);
    r.finish();
    return OscillationProfile::cosine(delta);
  }
  if (type == "fourier") {
    double c0 = 0.0;
    std::vector<double> a, b;
    r.number("c0", c0);
    if (const json* v = r.find("cos")) a = number_list(*v, "profile.cos");
    if (const json* v = r.find("sin")) b = number_list(*v, "profile.sin");
    r.finish();
    return OscillationProfile::fourier(c0, a, b);
  }
  throw ConfigError("profile.type: expected cosine or fourier");
}

void parse_run(const json& j, RunConfig& run) {
  Reader r(j, "run");
  r.number("dt", run.dt);
  r.number("t_end", run.t_end);
  r.integer("output_stride", run.output_stride);
  std::string scheme = run.scheme == TimeScheme::sbdf1 ? "sbdf1" : "sbdf2";
  r.string("scheme", scheme);
  if (scheme == "sbdf1") {
    run.scheme = TimeScheme::sbdf1;
  } else if (scheme == "sbdf2") {
    run.scheme = TimeScheme::sbdf2;
  } else {
    throw ConfigError("run.scheme: expected sbdf1 or sbdf2");
  }
  r.boolean("diagnostics", run.diagnostics);
  r.boolean("project_mean", run.project_mean);
  r.boolean("write_snapshots", run.write_snapshots);
  r.number("jacobian_floor", run.jacobian_floor);
  if (const json* v = r.find("initial")) {
    if (!v->is_array()) throw ConfigError("run.initial: expected an array");
    run.initial.clear();
    for (std::size_t i = 0; i < v->size(); ++i) {
      const std::string path = "run.initial[" + std::to_string(i) + "]";
      Reader m((*v)[i], path);
      InitialMode mode;
      std::string target = "eta";
      m.string("target", target);
      mode.target = parse_target(target, path + ".target");
      m.integer("m1", mode.m1);
      m.integer("m2", mode.m2);
      m.number("cos", mode.cos_amp);
      m.number("sin", mode.sin_amp);
      m.finish();
      run.initial.push_back(mode);
    }
  }
  r.finish();
}

std::vector<std::array<double, 2>> parse_k_list(const json& v, const std::string& path) {
  if (!v.is_array()) throw ConfigError(path + ": expected an array of [k1, k2] pairs");
  std::vector<std::array<double, 2>> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::string p = path + "[" + std::to_string(i) + "]";
    if (!v[i].is_array() || v[i].size() != 2) throw ConfigError(p + ": expected [k1, k2]");
    out.push_back({Reader::as_number(v[i][0], p + "[0]"), Reader::as_number(v[i][1], p + "[1]")});
    require(out.back()[0] != 0.0 || out.back()[1] != 0.0, p + ": k must be nonzero");
  }
  return out;
}

void validate(const CliConfig& c) {
  c.params.validate();
  require(c.grid.n1 >= 2 && c.grid.n2 >= 2, "grid.n1 and grid.n2 must be at least 2");
  require(c.grid.nz >= 5, "grid.nz must be at least 5");
  c.run.validate();
  require(c.sweep.k_per_axis >= 1, "sweep.k_per_axis must be at least 1");
  require(c.sweep.nz >= 3, "sweep.nz must be at least 3");
  require(c.sweep.steps_per_period >= 2, "sweep.steps_per_period must be at least 2");
  for (double a : c.sweep.amps) require(a >= 0.0 && std::isfinite(a), "sweep.amps: amplitudes must be >= 0");
  for (double w : c.sweep.omegas) require(w > 0.0 && std::isfinite(w), "sweep.omegas: frequencies must be positive");
  require(c.linstab.k_per_axis >= 1, "linstab.k_per_axis must be at least 1");
  require(c.linstab.nz >= 3, "linstab.nz must be at least 3");
  require(c.linstab.steps_per_period >= 2, "linstab.steps_per_period must be at least 2");
  require(c.verify.trials >= 1, "verify.trials must be at least 1");
  require(c.verify.amplitude >= 0.0 && c.verify.amplitude < 0.5, "verify.amplitude must lie in [0, 0.5)");
  require(c.fit.model == "exponential" || c.fit.model == "algebraic", "fit.model: expected exponential or algebraic");
  require(c.threads >= 0, "threads must be >= 0");
  require(!c.output.empty(), "output must be nonempty");
  if (!c.command.empty()) {
    require(std::find(std::begin(kCommands), std::end(kCommands), c.command) != std::end(kCommands),
            "command: unknown sub-command '" + c.command + "'");
  }
}

// ----- output helpers -----

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot write " + path.string());
  os << text;
}

SurfaceField random_surface(const GridPtr& grid, std::mt19937_64& rng, double amplitude) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  struct Term {
    int m1, m2;
    double a, phase;
  };
  // Band-limited to the modes the 2/3 rule retains, and to |m| <= 3.
  const int M1 = std::min(3, (grid->n1() - 1) / 3);
  const int M2 = std::min(3, (grid->n2() - 1) / 3);
  std::vector<Term> terms;
  for (int m1 = -M1; m1 <= M1; ++m1) {
    for (int m2 = 0; m2 <= M2; ++m2) {
      if (m2 == 0 && m1 <= 0) continue;
      terms.push_back({m1, m2, u(rng) / (1.0 + m1 * m1 + m2 * m2), std::numbers::pi * u(rng)});
    }
  }
  double norm = 0.0;
  for (const Term& t : terms) norm += std::abs(t.a);
  const double scale = amplitude / norm;
  const double L1 = grid->L1(), L2 = grid->L2();
  return sample_surface(grid, [&](double x1, double x2) {
    double s = 0.0;
    for (const Term& t : terms) s += t.a * std::cos(kTwoPi * (t.m1 * x1 / L1 + t.m2 * x2 / L2) + t.phase);
    return scale * s;
  });
}

VolumeField random_volume(const GridPtr& grid, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double c[6] = {u(rng), u(rng), u(rng), u(rng), u(rng), u(rng)};
  const double L1 = grid->L1(), L2 = grid->L2();
  return sample_volume(grid, [=](double x1, double x2, double z) {
    return c[0] + c[1] * z + c[2] * std::cos(kTwoPi * x1 / L1 + c[3]) * (1 + z * z) +
           c[4] * std::sin(kTwoPi * (x1 / L1 + x2 / L2) + c[5]) * z;
  });
}

double min_nodal(const VolumeField& f) {
  const Nodal n = to_nodal(f);
  return n.minCoeff();
}

// ----- sub-commands -----

struct Context {
  const CliConfig& cfg;
  fs::path dir;
  std::ostream& out;
  std::vector<std::string> outputs;
  json summary = json::object();

  void write(const std::string& name, const std::string& text) {
    write_text(dir / name, text);
    outputs.push_back(name);
  }
};

GridPtr make_cli_grid(const CliConfig& c) { return make_grid(c.params, c.grid.n1, c.grid.n2, c.grid.nz); }

void cmd_extend(Context& ctx) {
  const GridPtr grid = make_cli_grid(ctx.cfg);
  std::mt19937_64 rng(ctx.cfg.seed);
  std::string csv = "trial,trace_error,grad_ratio\n";
  double worst = 0.0;
  for (int t = 0; t < ctx.cfg.verify.trials; ++t) {
    const SurfaceField f = random_surface(grid, rng, 1.0);
    const VolumeField P = poisson_extend(f, grid);
    const double trace = max_nodal(trace_top(P) - f);
    double grad = 0.0;
    for (int a = 0; a < 3; ++a) grad += sobolev_norm_volume_sq(partial(P, a), 0);
    const double ratio = std::sqrt(grad) / sobolev_norm_surface(f, 0.5);
    worst = std::max(worst, trace);
    csv += std::to_string(t) + "," + fmt(trace) + "," + fmt(ratio) + "\n";
  }
  ctx.write("extend.csv", csv);
  ctx.summary["max_trace_error"] = worst;
  ctx.out << csv;
}

void cmd_geometry_check(Context& ctx) {
  const GridPtr grid = make_cli_grid(ctx.cfg);
  std::mt19937_64 rng(ctx.cfg.seed);
  std::string csv = "trial,min_J,piola_residual,curvature_nonlinear_max\n";
  for (int t = 0; t < ctx.cfg.verify.trials; ++t) {
    const SurfaceField eta = random_surface(grid, rng, ctx.cfg.verify.amplitude);
    const GeometryState geom = build_geometry(eta, std::nullopt, ctx.cfg.params, ctx.cfg.run.jacobian_floor);
    const CurvatureSplit H = mean_curvature(eta);
    csv += std::to_string(t) + "," + fmt(min_nodal(geom.J)) + "," + fmt(check_piola(geom)) + "," +
           fmt(max_nodal(H.nonlinear)) + "\n";
  }
  ctx.write("geometry.csv", csv);
  ctx.out << csv;
}

void cmd_elliptic_verify(Context& ctx) {
  const GridPtr grid = make_cli_grid(ctx.cfg);
  const Params& p = ctx.cfg.params;
  std::mt19937_64 rng(ctx.cfg.seed);
  std::string csv = "trial,dirichlet_residual,stress_residual,capillary_residual\n";
  double worst = 0.0;
  for (int t = 0; t < ctx.cfg.verify.trials; ++t) {
    StokesData data;
    data.f1 = stack<FieldKind::volume>({random_volume(grid, rng), random_volume(grid, rng), random_volume(grid, rng)});
    data.f2 = random_volume(grid, rng);
    data.f3 = stack<FieldKind::surface>(
        {random_surface(grid, rng, 1.0), random_surface(grid, rng, 1.0), random_surface(grid, rng, 1.0)});
    // Flux compatibility for the Dirichlet problem: int f2 over the layer equals int f3 . e3.
    const double flux = (integrate_volume(data.f2) - integrate_surface(data.f3, 2)) / (p.L1 * p.L2);
    data.f3.coeffs(2)(0) += flux;
    const double rd = stokes_dirichlet_residual(data, solve_stokes_dirichlet(data, p.mu), p.mu).max();
    const double rs = stokes_stress_residual(data, solve_stokes_stress(data, p.mu), p.mu).max();
    const SurfaceField f = random_surface(grid, rng, 1.0);
    const SurfaceField psi = solve_capillary(f, p.sigma, p.g);
    const double rc = max_nodal(p.g * psi - p.sigma * laplacian_h(psi) - f) / std::max(1.0, max_nodal(f));
    worst = std::max({worst, rd, rs, rc});
    csv += std::to_string(t) + "," + fmt(rd) + "," + fmt(rs) + "," + fmt(rc) + "\n";
  }
  ctx.write("elliptic.csv", csv);
  ctx.summary["max_residual"] = worst;
  ctx.out << csv;
}

void cmd_linstab(Context& ctx) {
  const CliConfig& c = ctx.cfg;
  const auto ks = c.linstab.k.empty() ? default_k_samples(c.params, c.linstab.k_per_axis) : c.linstab.k;
  const double dt = c.params.period() / c.linstab.steps_per_period;
  std::vector<double> mult(ks.size()), oracle(ks.size());
  parallel_for(
      static_cast<int>(ks.size()),
      [&](int i) {
        const auto& k = ks[static_cast<std::size_t>(i)];
        mult[static_cast<std::size_t>(i)] = dominant_multiplier(monodromy(k, c.params, c.linstab.nz, dt));
        oracle[static_cast<std::size_t>(i)] = mathieu_oracle(std::hypot(k[0], k[1]), c.params);
      },
      c.threads);
  std::string csv = "k1,k2,multiplier,classification,inviscid_multiplier\n";
  double best = 0.0;
  for (std::size_t i = 0; i < ks.size(); ++i) {
    best = std::max(best, mult[i]);
    csv += fmt(ks[i][0]) + "," + fmt(ks[i][1]) + "," + fmt(mult[i]) + "," + to_string(classify(mult[i])) + "," +
           fmt(oracle[i]) + "\n";
  }
  ctx.write("linstab.csv", csv);
  ctx.summary["max_multiplier"] = best;
  ctx.summary["classification"] = to_string(classify(best));
  ctx.out << csv;
}

void cmd_sweep(Context& ctx) {
  const CliConfig& c = ctx.cfg;
  const SweepOptions opt{c.sweep.nz, c.sweep.steps_per_period, c.threads};
  const StabilityMap map = stability_sweep(c.sweep.amps, c.sweep.omegas, c.params,
                                           default_k_samples(c.params, c.sweep.k_per_axis), opt);
  ctx.write("sweep.csv", map.csv());
  ctx.write("sweep_by_k.csv", map.csv_by_k());
  ctx.write("sweep_contour.csv", map.contour_csv());
  std::size_t unstable = 0;
  for (std::size_t ia = 0; ia < map.amps.size(); ++ia) {
    for (std::size_t io = 0; io < map.omegas.size(); ++io) unstable += map.classification(ia, io) == Stability::unstable;
  }
  ctx.summary["unstable_points"] = unstable;
  ctx.out << map.contour_csv();
}

void cmd_simulate(Context& ctx) {
  RunConfig run = ctx.cfg.run;
  run.threads = ctx.cfg.threads;
  const RunResult res = faraday::run(run, ctx.cfg.params, ctx.dir.string());
  ctx.outputs.push_back("diagnostics.csv");
  if (run.write_snapshots) ctx.outputs.push_back("snapshots");
  double worst_ed = 0.0;
  for (const auto& row : res.diagnostics) worst_ed = std::max(worst_ed, std::abs(row.ed_residual));
  ctx.summary["snapshots"] = res.snapshots.size();
  ctx.summary["max_mean_drift"] = res.max_mean_drift;
  ctx.summary["initial_divergence_residual"] = res.initial_divergence_residual;
  ctx.summary["max_ed_residual"] = worst_ed;
  if (!res.diagnostics.empty()) ctx.summary["final_E1"] = res.diagnostics.back().report.E1;
  ctx.out << "steps " << std::lround(run.t_end / run.dt) << ", snapshots " << res.snapshots.size()
          << ", max |ed residual| " << fmt(worst_ed) << "\n";
}

void cmd_verify_ed(Context& ctx) {
  const fs::path traj = ctx.cfg.verify_ed.trajectory.empty() ? ctx.dir : fs::path(ctx.cfg.verify_ed.trajectory);
  std::ifstream mf(traj / "manifest.json");
  if (!mf) throw ConfigError("verify_ed.trajectory: no manifest.json in " + traj.string());
  json manifest;
  try {
    manifest = json::parse(mf);
  } catch (const json::exception& e) {
    throw ConfigError("verify_ed.trajectory: unreadable manifest: " + std::string(e.what()));
  }
  if (!manifest.contains("config")) throw ConfigError("verify_ed.trajectory: manifest lacks config");
  const CliConfig rec = parse_config(manifest["config"].dump());

  std::vector<long> steps;
  const fs::path snaps = traj / "snapshots";
  if (fs::is_directory(snaps)) {
    for (const auto& e : fs::directory_iterator(snaps)) {
      const std::string name = e.path().filename().string();
      const auto pos = name.find("_eta.bin");
      if (pos != std::string::npos) steps.push_back(std::stol(name.substr(0, pos)));
    }
  }
  std::sort(steps.begin(), steps.end());
  if (steps.size() < 5) throw ConfigError("verify_ed.trajectory: need at least 5 snapshots");

  auto load = [&](long n) {
    char stem[32];
    std::snprintf(stem, sizeof stem, "%06ld", n);
    const std::string base = (snaps / stem).string();
    return FlowState{read_binary<FieldKind::volume>(base + "_u.bin"), read_binary<FieldKind::volume>(base + "_p.bin"),
                     read_binary<FieldKind::surface>(base + "_eta.bin"), n * rec.run.dt};
  };
  std::vector<FlowState> states;
  for (long n : steps) states.push_back(load(n));
  std::string csv = "t,ed_residual_geometric,ed_residual_flattened\n";
  double worst = 0.0;
  for (std::size_t i = 0; i + 5 <= states.size(); ++i) {
    TrajectoryWindow win{std::vector<FlowState>(states.begin() + static_cast<long>(i),
                                                states.begin() + static_cast<long>(i) + 5)};
    const double geo = ed_residual_geometric(win, rec.params);
    const double flat = ed_residual_flattened(win, rec.params);
    worst = std::max(worst, std::abs(geo));
    csv += fmt(win.center().t) + "," + fmt(geo) + "," + fmt(flat) + "\n";
  }
  ctx.write("verify_ed.csv", csv);
  ctx.summary["max_ed_residual"] = worst;
  ctx.out << csv;
}

void cmd_fit(Context& ctx) {
  const FitSpec& f = ctx.cfg.fit;
  const fs::path input = f.input.empty() ? ctx.dir / "diagnostics.csv" : fs::path(f.input);
  std::ifstream is(input);
  if (!is) throw ConfigError("fit.input: cannot read " + input.string());
  std::string line;
  std::getline(is, line);
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
  }
  const auto col = std::find(header.begin(), header.end(), f.column);
  if (col == header.end()) throw ConfigError("fit.column: no column '" + f.column + "' in " + input.string());
  const std::size_t idx = static_cast<std::size_t>(col - header.begin());
  std::vector<double> t, E;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    if (row.size() <= idx) throw ConfigError("fit.input: short row in " + input.string());
    if (row[0] < f.t_min) continue;
    t.push_back(row[0]);
    E.push_back(row[idx]);
  }
  const DecayFit fit = f.model == "exponential" ? fit_decay(t, E) : fit_algebraic(t, E);
  json result = {{"model", f.model}, {"column", f.column}, {"samples", t.size()},
                 {"rate", fit.rate},   {"coefficient", fit.coefficient}, {"r2", fit.r2}};
  ctx.write("fit.json", result.dump(2) + "\n");
  ctx.summary["fit"] = result;
  ctx.out << result.dump(2) << "\n";
}

}  // namespace

json CliConfig::to_json() const {
  json initial = json::array();
  for (const InitialMode& m : run.initial) {
    initial.push_back({{"target", target_name(m.target)}, {"m1", m.m1}, {"m2", m.m2}, {"cos", m.cos_amp}, {"sin", m.sin_amp}});
  }
  json k = json::array();
  for (const auto& kk : linstab.k) k.push_back({kk[0], kk[1]});
  json profile = {{"type", "fourier"},
                  {"c0", params.profile.mean()},
                  {"cos", params.profile.cos_coeffs()},
                  {"sin", params.profile.sin_coeffs()}};
  json j = {
      {"params",
       {{"L1", params.L1},
        {"L2", params.L2},
        {"b", params.b},
        {"g", params.g},
        {"mu", params.mu},
        {"sigma", params.sigma},
        {"amp", params.amp},
        {"omega", params.omega}}},
      {"profile", profile},
      {"grid", {{"n1", grid.n1}, {"n2", grid.n2}, {"nz", grid.nz}}},
      {"run",
       {{"dt", run.dt},
        {"t_end", run.t_end},
        {"output_stride", run.output_stride},
        {"scheme", run.scheme == TimeScheme::sbdf1 ? "sbdf1" : "sbdf2"},
        {"diagnostics", run.diagnostics},
        {"project_mean", run.project_mean},
        {"write_snapshots", run.write_snapshots},
        {"jacobian_floor", run.jacobian_floor},
        {"initial", initial}}},
      {"sweep",
       {{"amps", sweep.amps},
        {"omegas", sweep.omegas},
        {"k_per_axis", sweep.k_per_axis},
        {"nz", sweep.nz},
        {"steps_per_period", sweep.steps_per_period}}},
      {"linstab",
       {{"k", k}, {"k_per_axis", linstab.k_per_axis}, {"nz", linstab.nz}, {"steps_per_period", linstab.steps_per_period}}},
      {"verify", {{"trials", verify.trials}, {"amplitude", verify.amplitude}}},
      {"verify_ed", {{"trajectory", verify_ed.trajectory}}},
      {"fit", {{"input", fit.input}, {"column", fit.column}, {"model", fit.model}, {"t_min", fit.t_min}}},
      {"output", output},
      {"seed", seed},
      {"threads", threads},
  };
  if (!command.empty()) j["command"] = command;
  return j;
}

CliConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  CliConfig c;
  Reader r(j, "");
  r.string("command", c.command);
  if (const json* v = r.find("params")) parse_params(*v, c.params);
  if (const json* v = r.find("profile")) c.params.profile = parse_profile(*v);
  if (const json* v = r.find("grid")) {
    Reader g(*v, "grid");
    g.integer("n1", c.grid.n1);
    g.integer("n2", c.grid.n2);
    g.integer("nz", c.grid.nz);
    g.finish();
  }
  if (const json* v = r.find("run")) parse_run(*v, c.run);
  if (const json* v = r.find("sweep")) {
    Reader s(*v, "sweep");
    if (const json* a = s.find("amps")) c.sweep.amps = number_list(*a, "sweep.amps");
    if (const json* w = s.find("omegas")) c.sweep.omegas = number_list(*w, "sweep.omegas");
    s.integer("k_per_axis", c.sweep.k_per_axis);
    s.integer("nz", c.sweep.nz);
    s.integer("steps_per_period", c.sweep.steps_per_period);
    s.finish();
  }
  if (const json* v = r.find("linstab")) {
    Reader s(*v, "linstab");
    if (const json* k = s.find("k")) c.linstab.k = parse_k_list(*k, "linstab.k");
    s.integer("k_per_axis", c.linstab.k_per_axis);
    s.integer("nz", c.linstab.nz);
    s.integer("steps_per_period", c.linstab.steps_per_period);
    s.finish();
  }
  if (const json* v = r.find("verify")) {
    Reader s(*v, "verify");
    s.integer("trials", c.verify.trials);
    s.number("amplitude", c.verify.amplitude);
    s.finish();
  }
  if (const json* v = r.find("verify_ed")) {
    Reader s(*v, "verify_ed");
    s.string("trajectory", c.verify_ed.trajectory);
    s.finish();
  }
  if (const json* v = r.find("fit")) {
    Reader s(*v, "fit");
    s.string("input", c.fit.input);
    s.string("column", c.fit.column);
    s.string("model", c.fit.model);
    s.number("t_min", c.fit.t_min);
    s.finish();
  }
  r.string("output", c.output);
  if (const json* v = r.find("seed")) {
    if (!v->is_number_unsigned() && !(v->is_number_integer() && v->get<long long>() >= 0)) {
      throw ConfigError("seed: expected a non-negative integer");
    }
    c.seed = v->get<std::uint64_t>();
  }
  r.integer("threads", c.threads);
  r.finish();
  c.run.n1 = c.grid.n1;
  c.run.n2 = c.grid.n2;
  c.run.nz = c.grid.nz;
  validate(c);
  return c;
}

int dispatch(const CliConfig& config, std::ostream& out, std::ostream& err) {
  const auto start = std::chrono::steady_clock::now();
  int code = 0;
  std::string message;
  Context ctx{config, fs::path(config.output), out, {}, json::object()};
  try {
    validate(config);
    if (config.command.empty()) throw ConfigError("command: no sub-command given");
    fs::create_directories(ctx.dir);
    const std::string& cmd = config.command;
    if (cmd == "extend") {
      cmd_extend(ctx);
    } else if (cmd == "geometry-check") {
      cmd_geometry_check(ctx);
    } else if (cmd == "elliptic-verify") {
      cmd_elliptic_verify(ctx);
    } else if (cmd == "linstab") {
      cmd_linstab(ctx);
    } else if (cmd == "sweep") {
      cmd_sweep(ctx);
    } else if (cmd == "simulate") {
      cmd_simulate(ctx);
    } else if (cmd == "verify-ed") {
      cmd_verify_ed(ctx);
    } else {
      cmd_fit(ctx);
    }
  } catch (const ConfigError& e) {
    code = 2;
    message = e.what();
  } catch (const ContractError& e) {
    code = 2;
    message = e.what();
  } catch (const NumericalError& e) {
    code = 3;
    message = e.what();
  } catch (const std::exception& e) {
    code = 1;
    message = e.what();
  }
  if (code != 0) err << "error: " << message << "\n";

  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  json manifest = {{"command", config.command},
                   {"version", kVersion},
                   {"status", code == 0 ? "ok" : "error"},
                   {"exit_code", code},
                   {"wall_time_seconds", wall},
                   {"seed", config.seed},
                   {"threads", config.threads},
                   {"outputs", ctx.outputs},
                   {"summary", ctx.summary},
                   {"config", config.to_json()}};
  if (code != 0) manifest["error"] = message;
  try {
    fs::create_directories(ctx.dir);
    write_text(ctx.dir / "manifest.json", manifest.dump(2) + "\n");
  } catch (const std::exception& e) {
    err << "error: cannot write manifest: " << e.what() << "\n";
    if (code == 0) code = 1;
  }
  return code;
}

int main(int argc, char** argv) {
  CLI::App app{"Spectral laboratory for the viscous Faraday-wave problem"};
  app.require_subcommand(1);
  std::string config_path, output;
  int threads = -1;
  std::optional<std::uint64_t> seed;
  app.add_option("--config", config_path, "JSON configuration file");
  app.add_option("--output", output, "output directory (overrides the config)");
  app.add_option("--threads", threads, "worker cap, 0 for all cores (overrides the config)");
  app.add_option("--seed", seed, "seed for randomized verification data (overrides the config)");
  app.fallthrough();
  for (const char* name : kCommands) app.add_subcommand(name)->fallthrough();
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  CliConfig cfg;
  try {
    std::string text = "{}";
    if (!config_path.empty()) {
      std::ifstream is(config_path);
      if (!is) throw ConfigError("--config: cannot read " + config_path);
      std::stringstream ss;
      ss << is.rdbuf();
      text = ss.str();
    }
    cfg = parse_config(text);
    cfg.command = app.get_subcommands().front()->get_name();
    if (!output.empty()) cfg.output = output;
    if (threads >= 0) cfg.threads = threads;
    if (seed) cfg.seed = *seed;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ContractError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  if (cfg.threads > 0) set_default_threads(cfg.threads);
  return dispatch(cfg, std::cout, std::cerr);
}

}  // namespace faraday::cli
