#include <gvf/trajectory_io.hpp>

#include <cstdio>
#include <fstream>
#include <ostream>

namespace gvf {

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string trajectory_csv_header(int m) {
  std::string h = "t";
  for (int i = 0; i < m; ++i) h += ",x_" + std::to_string(i);
  h += ",e_norm,V,chi_norm,residual";
  return h;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj, int m) {
  os << trajectory_csv_header(m) << '\n';
  for (const TrajectorySample& s : traj.samples) {
    os << format_number(s.t);
    for (int i = 0; i < m; ++i) os << ',' << format_number(s.x(i));
    os << ',' << format_number(s.e_norm) << ',' << format_number(s.V) << ','
       << format_number(s.chi_norm) << ',' << format_number(s.residual) << '\n';
  }
}

void write_trajectory_csv(const std::filesystem::path& file, const Trajectory& traj, int m) {
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
  std::ofstream os(file);
  if (!os) throw InvalidInput("cannot open " + file.string() + " for writing");
  write_trajectory_csv(os, traj, m);
}

nlohmann::json config_to_json(const IntegratorConfig& cfg) {
  return {{"dt", cfg.dt},
          {"t_max", cfg.t_max},
          {"retract_every", cfg.retract_every},
          {"tol_path", cfg.tol_path},
          {"tol_singular", cfg.tol_singular},
          {"dwell_time", cfg.dwell_time},
          {"escape_radius", cfg.escape_radius},
          {"stop_at_verdict", cfg.stop_at_verdict},
          {"record_stride", cfg.record_stride}};
}

IntegratorConfig config_from_json(const nlohmann::json& j, IntegratorConfig base) {
  base.dt = j.value("dt", base.dt);
  base.t_max = j.value("t_max", base.t_max);
  base.retract_every = j.value("retract_every", base.retract_every);
  base.tol_path = j.value("tol_path", base.tol_path);
  base.tol_singular = j.value("tol_singular", base.tol_singular);
  base.dwell_time = j.value("dwell_time", base.dwell_time);
  base.escape_radius = j.value("escape_radius", base.escape_radius);
  base.stop_at_verdict = j.value("stop_at_verdict", base.stop_at_verdict);
  base.record_stride = j.value("record_stride", base.record_stride);
  base.validate();
  return base;
}

void write_text_file(const std::filesystem::path& file, const std::string& text) {
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
  std::ofstream os(file);
  if (!os) throw InvalidInput("cannot open " + file.string() + " for writing");
  os << text;
}

}  // namespace gvf
