#include <gvf/scenarios.hpp>

#include <gvf/trajectory_io.hpp>

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

namespace gvf {

namespace {

using nlohmann::json;

struct Term {
  double coeff = 0.0;
  std::vector<int> exponents;
};

using Polynomial = std::vector<Term>;

// Polynomials are either a bare array of terms or {"terms": [...]}.
Polynomial parse_polynomial(const json& j, int m, const std::string& where) {
  const json& terms = j.is_object() ? j.at("terms") : j;
  if (!terms.is_array()) throw InvalidInput(where + ": polynomial must be an array of terms");
  Polynomial p;
  for (const json& t : terms) {
    Term term;
    term.coeff = t.at("coeff").get<double>();
    term.exponents = t.at("exponents").get<std::vector<int>>();
    if (static_cast<int>(term.exponents.size()) != m)
      throw InvalidInput(where + ": each term needs " + std::to_string(m) + " exponents");
    for (int e : term.exponents)
      if (e < 0) throw InvalidInput(where + ": negative exponent");
    p.push_back(std::move(term));
  }
  return p;
}

double eval_polynomial(const Polynomial& p, const Vec& x) {
  double sum = 0.0;
  for (const Term& t : p) {
    double v = t.coeff;
    for (int i = 0; i < x.size(); ++i)
      if (t.exponents[i] != 0) v *= std::pow(x(i), t.exponents[i]);
    sum += v;
  }
  return sum;
}

Vec grad_polynomial(const Polynomial& p, const Vec& x) {
  Vec g = Vec::Zero(x.size());
  for (const Term& t : p) {
    for (int d = 0; d < x.size(); ++d) {
      if (t.exponents[d] == 0) continue;
      double v = t.coeff * t.exponents[d];
      for (int i = 0; i < x.size(); ++i) {
        const int e = i == d ? t.exponents[i] - 1 : t.exponents[i];
        if (e != 0) v *= std::pow(x(i), e);
      }
      g(d) += v;
    }
  }
  return g;
}

void add_polynomial(std::vector<ScalarField>& f, std::vector<GradientField>& g, Polynomial p) {
  auto shared = std::make_shared<const Polynomial>(std::move(p));
  f.push_back([shared](const Vec& x) { return eval_polynomial(*shared, x); });
  g.push_back([shared](const Vec& x) { return grad_polynomial(*shared, x); });
}

// level - (x0^2 + x1^2) b(x0, x1) on the first two coordinates.
void add_bump(std::vector<ScalarField>& f, std::vector<GradientField>& g, double level, int m) {
  f.push_back([level](const Vec& x) {
    return level - (x(0) * x(0) + x(1) * x(1)) * bump(x(0), x(1));
  });
  g.push_back([m](const Vec& x) {
    Vec out = Vec::Zero(m);
    const double r2 = x(0) * x(0) + x(1) * x(1);
    if (!(r2 > 1.0)) return out;
    const double d = 1.0 - r2;
    const double c = -2.0 * bump(x(0), x(1)) * (1.0 + r2 / (d * d));
    out(0) = c * x(0);
    out(1) = c * x(1);
    return out;
  });
}

GridAxis parse_axis(const json& a) {
  GridAxis ax;
  if (a.is_string()) {
    const std::string s = a.get<std::string>();
    char c1 = 0;
    char c2 = 0;
    std::istringstream in(s);
    if (!(in >> ax.lo >> c1 >> ax.hi >> c2 >> ax.count) || c1 != ':' || c2 != ':')
      throw InvalidInput("scan_box axis '" + s + "' must be lo:hi:n");
  } else if (a.is_array() && a.size() == 3) {
    ax.lo = a[0].get<double>();
    ax.hi = a[1].get<double>();
    ax.count = a[2].get<int>();
  } else {
    ax.lo = a.at("lo").get<double>();
    ax.hi = a.at("hi").get<double>();
    ax.count = a.at("n").get<int>();
  }
  if (ax.count < 2 || !(ax.hi > ax.lo)) throw InvalidInput("scan_box axis needs hi > lo, n >= 2");
  return ax;
}

Vec to_vec(const std::vector<double>& v) {
  return Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

Scenario scenario_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("scenario file is not valid JSON: ") + e.what());
  }
  try {
    Scenario sc;
    sc.name = j.at("name").get<std::string>();
    sc.notes = j.value("notes", std::string("user scenario"));
    const int m = j.at("ambient_dim").get<int>();
    if (m < 2) throw InvalidInput("ambient_dim must be >= 2");

    ConstraintSystem& c = sc.constraints;
    c.name = sc.name;
    c.ambient_dim = m;
    const json cons = j.value("constraints", json::array());
    for (std::size_t i = 0; i < cons.size(); ++i)
      add_polynomial(c.f, c.grad_f, parse_polynomial(cons[i], m, "constraint " + std::to_string(i)));
    c.regular_value = cons.empty() ? Vec(Vec::Zero(0))
                                   : to_vec(j.at("regular_value").get<std::vector<double>>());

    const json& surf = j.at("surfaces");
    for (std::size_t i = 0; i < surf.size(); ++i) {
      const json& sj = surf[i];
      const bool named = sj.is_string() || (sj.is_object() && sj.contains("special"));
      if (named) {
        const std::string kind = sj.is_string() ? sj.get<std::string>() : sj.at("special").get<std::string>();
        if (kind != "bump") throw InvalidInput("unknown special surface '" + kind + "'");
        const double level = sj.is_object() ? sj.value("level", 4.0) : 4.0;
        add_bump(sc.surfaces.phi, sc.surfaces.grad_phi, level, m);
      } else {
        add_polynomial(sc.surfaces.phi, sc.surfaces.grad_phi,
                       parse_polynomial(sj, m, "surface " + std::to_string(i)));
      }
    }
    sc.surfaces.gains = to_vec(j.at("gains").get<std::vector<double>>());
    sc.surfaces.propagation_sign = j.value("propagation_sign", 1);

    if (j.contains("scan_box")) {
      for (const json& a : j.at("scan_box")) sc.scan_grid.axes.push_back(parse_axis(a));
      if (static_cast<int>(sc.scan_grid.axes.size()) != m)
        throw InvalidInput("scan_box needs one axis per ambient coordinate");
    }
    for (const json& st : j.value("starts", json::array())) {
      StartSpec s;
      const json& x0 = st.is_object() ? st.at("x0") : st;
      s.x0 = to_vec(x0.get<std::vector<double>>());
      if (s.x0.size() != m) throw InvalidInput("start has wrong dimension");
      if (st.is_object() && st.contains("expected"))
        s.expected = verdict_from_string(st.at("expected").get<std::string>());
      sc.starts.push_back(std::move(s));
    }
    if (j.contains("integrator")) sc.integrator = config_from_json(j.at("integrator"), sc.integrator);
    sc.global_hypothesis = "not verified";

    const auto axes = sc.scan_grid.axes;
    if (!axes.empty()) {
      const ConstraintSystem cs = sc.constraints;
      sc.random_point = [axes, cs](std::mt19937_64& rng) {
        Vec x(static_cast<int>(axes.size()));
        for (std::size_t d = 0; d < axes.size(); ++d) {
          std::uniform_real_distribution<double> u(axes[d].lo, axes[d].hi);
          x(static_cast<int>(d)) = u(rng);
        }
        return cs.is_euclidean() ? x : retract(cs, x).x;
      };
    }
    sc.constraints.validate();
    sc.surfaces.validate(sc.constraints);
    return sc;
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("malformed scenario file: ") + e.what());
  }
}

Scenario load_scenario_file(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw InvalidInput("cannot read scenario file " + file.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return scenario_from_json(ss.str());
}

}  // namespace gvf
