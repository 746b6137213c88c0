#include <gvf/args.hpp>
#include <gvf/scenarios.hpp>

#include <cmath>
#include <sstream>

namespace gvf {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(item);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

double to_double(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw InvalidInput("not a number: '" + s + "'");
  }
  if (used != s.size() || !std::isfinite(v)) throw InvalidInput("not a number: '" + s + "'");
  return v;
}

int to_count(const std::string& s) {
  const double v = to_double(s);
  if (v != std::floor(v) || v < 2 || v > 1e7) throw InvalidInput("bad count '" + s + "'");
  return static_cast<int>(v);
}

}  // namespace

Vec parse_point(const std::string& text) {
  if (!text.empty() && text.front() == '@') return vectorize(parse_rotation_product(text));
  const auto parts = split(text, ',');
  if (parts.empty()) throw InvalidInput("empty point");
  Vec x(static_cast<int>(parts.size()));
  for (std::size_t i = 0; i < parts.size(); ++i) x(static_cast<int>(i)) = to_double(parts[i]);
  return x;
}

std::vector<GridAxis> parse_box(const std::string& text) {
  std::vector<GridAxis> axes;
  for (const std::string& a : split(text, ',')) {
    const auto f = split(a, ':');
    if (f.size() != 3) throw InvalidInput("box axis '" + a + "' must be lo:hi:n");
    GridAxis ax{to_double(f[0]), to_double(f[1]), to_count(f[2])};
    if (!(ax.hi > ax.lo)) throw InvalidInput("box axis '" + a + "' needs hi > lo");
    axes.push_back(ax);
  }
  if (axes.empty()) throw InvalidInput("empty box");
  return axes;
}

std::vector<int> parse_counts(const std::string& text) {
  std::vector<int> out;
  for (const std::string& s : split(text, ',')) out.push_back(to_count(s));
  if (out.empty()) throw InvalidInput("empty count list");
  return out;
}

}  // namespace gvf
