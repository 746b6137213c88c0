// gvf: command-line front end for guiding-vector-field experiments.

#include <gvf/args.hpp>
#include <gvf/invariants.hpp>
#include <gvf/probe.hpp>
#include <gvf/scenarios.hpp>
#include <gvf/trajectory_io.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNumeric = 2;

struct ConfigFlags {
  std::optional<double> dt, t_max, tol_path, tol_singular, dwell, escape;
  std::optional<int> retract_every, record_stride;
  bool full_horizon = false;

  void attach(CLI::App* app) {
    app->add_option("--dt", dt, "Step size");
    app->add_option("--t-max", t_max, "Integration horizon");
    app->add_option("--tol-path", tol_path, "Path-convergence threshold on |e|");
    app->add_option("--tol-singular", tol_singular, "Singular-convergence threshold on |chi|");
    app->add_option("--dwell", dwell, "Time a threshold must hold");
    app->add_option("--escape", escape, "Escape radius");
    app->add_option("--retract-every", retract_every, "Steps between retractions");
    app->add_option("--record-stride", record_stride, "Keep every n-th sample");
    app->add_flag("--full-horizon", full_horizon, "Keep integrating to t_max after a verdict");
  }

  gvf::IntegratorConfig apply(gvf::IntegratorConfig c) const {
    if (dt) c.dt = *dt;
    if (t_max) c.t_max = *t_max;
    if (tol_path) c.tol_path = *tol_path;
    if (tol_singular) c.tol_singular = *tol_singular;
    if (dwell) c.dwell_time = *dwell;
    if (escape) c.escape_radius = *escape;
    if (retract_every) c.retract_every = *retract_every;
    if (record_stride) c.record_stride = *record_stride;
    if (full_horizon) c.stop_at_verdict = false;
    c.validate();
    return c;
  }
};

json vec_json(const gvf::Vec& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

void write_json(const fs::path& file, const json& j) { gvf::write_text_file(file, j.dump(2) + "\n"); }

int cmd_list() {
  for (const std::string& name : gvf::scenario_names()) {
    const gvf::Scenario& sc = gvf::get_scenario(name);
    std::cout << name << "  m=" << sc.ambient_dim() << " k=" << sc.constraints.constraint_count()
              << "  " << sc.notes << '\n';
  }
  return kExitOk;
}

int cmd_run(const gvf::Scenario& sc, const std::string& x0_text, const fs::path& out,
            const ConfigFlags& flags) {
  const gvf::IntegratorConfig cfg = flags.apply(sc.integrator);
  gvf::Vec x0;
  if (!x0_text.empty()) {
    x0 = gvf::parse_point(x0_text);
  } else if (!sc.starts.empty()) {
    x0 = sc.starts.front().x0;
  } else {
    throw gvf::InvalidInput("scenario has no default start; pass --x0");
  }
  if (x0.size() != sc.ambient_dim())
    throw gvf::InvalidInput("--x0 needs " + std::to_string(sc.ambient_dim()) + " coordinates");

  const gvf::Trajectory traj = gvf::integrate(sc.constraints, sc.surfaces, cfg, x0);
  gvf::write_trajectory_csv(out / "traj.csv", traj, sc.ambient_dim());

  json meta;
  meta["scenario"] = sc.name;
  meta["ambient_dim"] = sc.ambient_dim();
  meta["constraint_count"] = sc.constraints.constraint_count();
  meta["config"] = gvf::config_to_json(cfg);
  meta["x0"] = vec_json(x0);
  meta["verdict"] = gvf::to_string(traj.verdict);
  meta["verdict_time"] = traj.verdict_time;
  meta["samples"] = traj.samples.size();
  meta["max_residual"] = traj.max_residual;
  meta["max_relative_V_increase"] = traj.max_relative_V_increase;
  meta["global_hypothesis"] = sc.global_hypothesis;
  meta["constants"] = sc.constants;
  if (!traj.failure_message.empty()) meta["failure"] = traj.failure_message;
  if (!traj.samples.empty()) {
    const gvf::TrajectorySample& last = traj.final_sample();
    meta["final_x"] = vec_json(last.x);
    meta["final_e_norm"] = last.e_norm;
    if (sc.name == "so3_path") {
      meta["so3_component"] = gvf::to_string(gvf::so3_membership(last.x));
      meta["vectorization"] = "column-major";
    }
    if (sc.name == "torus_arm_lift") {
      const auto p = gvf::covering_project({last.x(0), last.x(1)});
      meta["final_torus"] = {p[0], p[1]};
    }
  }
  write_json(out / "meta.json", meta);

  std::cout << sc.name << ": " << gvf::to_string(traj.verdict);
  if (traj.verdict_time >= 0) std::cout << " at t=" << traj.verdict_time;
  if (meta.contains("so3_component")) std::cout << " component " << meta["so3_component"].get<std::string>();
  std::cout << "\nwrote " << (out / "traj.csv").string() << '\n';
  return traj.verdict == gvf::Verdict::NumericFailure ? kExitNumeric : kExitOk;
}

gvf::GridSpec select_grid(const gvf::Scenario& sc, const std::string& box, const std::string& angles) {
  if (!box.empty() && !angles.empty()) throw gvf::InvalidInput("use either --box or --angles");
  gvf::GridSpec g = sc.scan_grid;
  if (!box.empty()) {
    g.axes = gvf::parse_box(box);
    g.chart = nullptr;
    if (static_cast<int>(g.axes.size()) != sc.ambient_dim())
      throw gvf::InvalidInput("--box needs one axis per ambient coordinate");
  } else if (!angles.empty()) {
    if (!g.chart) throw gvf::InvalidInput("--angles needs a scenario with an angle chart");
    const std::vector<int> counts = gvf::parse_counts(angles);
    if (counts.size() != g.axes.size())
      throw gvf::InvalidInput("--angles needs " + std::to_string(g.axes.size()) + " counts");
    for (std::size_t i = 0; i < counts.size(); ++i) g.axes[i].count = counts[i];
  }
  if (g.axes.empty()) throw gvf::InvalidInput("scenario has no scan grid; pass --box");
  g.validate();
  return g;
}

int cmd_field(const gvf::Scenario& sc, const gvf::GridSpec& grid, const fs::path& out) {
  const int m = sc.ambient_dim();
  std::ostringstream os;
  for (int i = 0; i < m; ++i) os << "x_" << i << ',';
  for (int i = 0; i < m; ++i) os << "chi_" << i << ',';
  os << "e_norm,V\n";
  std::size_t rows = 0;
  for (std::size_t idx = 0; idx < grid.size(); ++idx) {
    gvf::Vec x = grid.point(grid.params(idx));
    if (!sc.constraints.is_euclidean()) {
      try {
        x = gvf::retract(sc.constraints, x).x;
      } catch (const gvf::RetractionDiverged&) {
        continue;
      }
    }
    const gvf::FieldSample f = gvf::evaluate_field(sc.constraints, sc.surfaces, x);
    for (int i = 0; i < m; ++i) os << gvf::format_number(x(i)) << ',';
    for (int i = 0; i < m; ++i) os << gvf::format_number(f.chi(i)) << ',';
    os << gvf::format_number(f.e.norm()) << ',' << gvf::format_number(f.V) << '\n';
    ++rows;
  }
  gvf::write_text_file(out / "field.csv", os.str());
  std::cout << "wrote " << rows << " rows to " << (out / "field.csv").string() << '\n';
  return kExitOk;
}

json singular_json(const gvf::SingularPoint& p) {
  json j;
  j["x"] = vec_json(p.x);
  j["chi_norm"] = p.chi_norm;
  j["eigen_real_parts"] = p.eigen_real_parts;
  j["label"] = gvf::to_string(p.label);
  j["dist_to_path"] = p.dist_to_path;
  if (!p.refined) j["refined"] = false;
  return j;
}

int cmd_singular(const gvf::Scenario& sc, const gvf::GridSpec& grid, const fs::path& out) {
  const gvf::SingularCensus census =
      gvf::find_singular_set(sc.constraints, sc.surfaces, grid, sc.sample_path());
  json arr = json::array();
  for (const gvf::SingularPoint& p : census.points) arr.push_back(singular_json(p));
  write_json(out / "singular.json", arr);

  json region = nullptr;
  if (census.region) {
    region = json::object();
    region["zero_cells"] = census.region->zero_cells;
    region["hull_area"] = census.region->hull_area;
    json seeds = json::array();
    for (const gvf::Vec& s : census.region->seeds) seeds.push_back(vec_json(s));
    region["seeds"] = seeds;
  }
  json summary;
  summary["scenario"] = sc.name;
  summary["count"] = census.points.size();
  summary["median_chi_norm"] = census.scan.median_chi_norm;
  summary["seed_tol"] = census.scan.seed_tol;
  summary["merge_radius"] = census.scan.merge_radius;
  summary["seeds"] = census.scan.seeds.size();
  summary["region"] = region;
  summary["diagnostics"] = census.diagnostics;
  write_json(out / "singular_summary.json", summary);

  std::cout << sc.name << ": " << census.points.size() << " singular point(s)\n";
  for (const gvf::SingularPoint& p : census.points) {
    std::cout << "  " << gvf::to_string(p.label) << " at (";
    for (int i = 0; i < p.x.size(); ++i) std::cout << (i ? ", " : "") << gvf::format_number(p.x(i));
    std::cout << ")\n";
  }
  if (census.region)
    std::cout << "  region: " << census.region->zero_cells << " zero cells, hull area "
              << census.region->hull_area << '\n';
  for (const std::string& d : census.diagnostics) std::cout << "  note: " << d << '\n';
  return kExitOk;
}

int cmd_probe(const gvf::Scenario& sc, double radius, int count, std::uint64_t seed,
              const fs::path& out, const ConfigFlags& flags) {
  const gvf::ProbeReport rep =
      gvf::probe_sphere(sc, radius, count, seed, flags.apply(sc.integrator));
  write_json(out / "probe.json", rep.to_json());
  std::cout << sc.name << ": " << rep.starts.size() << " starts, " << rep.non_converging.size()
            << " not path-converging\n";
  for (std::size_t i : rep.non_converging) {
    const gvf::ProbeStart& s = rep.starts[i];
    std::cout << "  " << (s.candidate ? "candidate " : "sample ") << gvf::to_string(s.verdict)
              << " final |x| = " << gvf::format_number(s.final_x.norm()) << '\n';
  }
  for (const std::string& n : rep.notes) std::cout << "  note: " << n << '\n';
  return kExitOk;
}

int cmd_check(const gvf::Scenario& sc, int samples, std::uint64_t seed, const fs::path& out) {
  gvf::CheckOptions opts;
  opts.samples = samples;
  opts.seed = seed;
  const gvf::CheckReport rep = gvf::run_checks(sc, opts);
  write_json(out / "check.json", rep.to_json());
  for (const gvf::CheckResult& r : rep.results) {
    const char* status = r.passed ? "PASS" : (r.assumption ? "FLAGGED" : "FAIL");
    std::cout << status << "  " << r.name << "  " << r.detail << '\n';
  }
  return rep.exit_code();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Guiding vector fields on embedded manifolds"};
  app.require_subcommand(1);

  std::string scenario_name;
  std::string x0_text;
  std::string box;
  std::string angles;
  std::string out_dir = "out";
  double radius = 3.0;
  int count = 200;
  std::uint64_t seed = 42;
  int samples = 1000;
  ConfigFlags flags;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("scenario", scenario_name, "Scenario name or .json file")->required();
    sub->add_option("--out", out_dir, "Output directory")->capture_default_str();
  };

  CLI::App* run = app.add_subcommand("run", "Integrate one trajectory");
  add_common(run);
  run->add_option("--x0", x0_text, "Start: comma list or @rx(a)ry(b)... for SO(3)");
  flags.attach(run);

  CLI::App* field = app.add_subcommand("field", "Sample the field on a grid");
  add_common(field);
  field->add_option("--box", box, "lo:hi:n per axis, comma separated");
  field->add_option("--angles", angles, "Counts per chart axis, comma separated");

  CLI::App* singular = app.add_subcommand("singular", "Locate and classify singular points");
  add_common(singular);
  singular->add_option("--box", box, "lo:hi:n per axis, comma separated");
  singular->add_option("--angles", angles, "Counts per chart axis, comma separated");

  CLI::App* probe = app.add_subcommand("probe-sphere", "Integrate from a sphere of starts");
  add_common(probe);
  probe->add_option("--R", radius, "Sphere radius")->capture_default_str();
  probe->add_option("--N", count, "Number of boundary samples")->capture_default_str();
  probe->add_option("--seed", seed, "Seed of the sampling shift")->capture_default_str();
  flags.attach(probe);

  CLI::App* check = app.add_subcommand("check", "Run the invariant and assumption suite");
  add_common(check);
  check->add_option("--samples", samples, "Random points per invariant")->capture_default_str();
  check->add_option("--seed", seed, "Sampling seed")->capture_default_str();

  app.add_subcommand("list", "List built-in scenarios");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    const fs::path out(out_dir);
    if (app.got_subcommand("list")) return cmd_list();
    const gvf::Scenario sc = gvf::resolve_scenario(scenario_name);
    if (run->parsed()) return cmd_run(sc, x0_text, out, flags);
    if (field->parsed()) return cmd_field(sc, select_grid(sc, box, angles), out);
    if (singular->parsed()) return cmd_singular(sc, select_grid(sc, box, angles), out);
    if (probe->parsed()) {
      if (count < 0) throw gvf::InvalidInput("--N must be non-negative");
      return cmd_probe(sc, radius, count, seed, out, flags);
    }
    if (check->parsed()) {
      if (samples < 1) throw gvf::InvalidInput("--samples must be positive");
      return cmd_check(sc, samples, seed, out);
    }
  } catch (const gvf::InvalidInput& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const gvf::UnknownScenario& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const gvf::Error& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumeric;
  }
  return kExitUsage;
}
