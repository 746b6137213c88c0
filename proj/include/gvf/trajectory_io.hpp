#pragma once

#include <gvf/integrate.hpp>

#include <json.hpp>

#include <filesystem>
#include <iosfwd>
#include <string>

namespace gvf {

/// Every number written by the library uses 17 significant digits.
std::string format_number(double v);

/// Header `t,x_0,...,x_{m-1},e_norm,V,chi_norm,residual`.
std::string trajectory_csv_header(int m);
void write_trajectory_csv(std::ostream& os, const Trajectory& traj, int m);
void write_trajectory_csv(const std::filesystem::path& file, const Trajectory& traj, int m);

nlohmann::json config_to_json(const IntegratorConfig& cfg);
IntegratorConfig config_from_json(const nlohmann::json& j, IntegratorConfig base = {});

/// Writes `text` to `file`, creating parent directories.
void write_text_file(const std::filesystem::path& file, const std::string& text);

}  // namespace gvf
