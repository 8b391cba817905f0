#include "nvpol/config.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace nvpol::cli {

using json = nlohmann::ordered_json;

namespace {

std::string source_kind_name(EnvironmentSource::Kind k) {
  switch (k) {
    case EnvironmentSource::Kind::Table1: return "table1";
    case EnvironmentSource::Kind::File: return "file";
    case EnvironmentSource::Kind::Generated: return "generated";
  }
  return "table1";
}

EnvironmentSource::Kind source_kind_from_name(const std::string& name) {
  if (name == "table1") return EnvironmentSource::Kind::Table1;
  if (name == "file") return EnvironmentSource::Kind::File;
  if (name == "generated") return EnvironmentSource::Kind::Generated;
  throw ConfigError("unknown environment source '" + name +
                    "' (expected table1, file or generated)");
}

std::string profile_name(PolarizationSpec::Profile p) {
  switch (p) {
    case PolarizationSpec::Profile::Uniform: return "uniform";
    case PolarizationSpec::Profile::Graded: return "graded";
    case PolarizationSpec::Profile::Explicit: return "explicit";
  }
  return "uniform";
}

PolarizationSpec::Profile profile_from_name(const std::string& name) {
  if (name == "uniform") return PolarizationSpec::Profile::Uniform;
  if (name == "graded") return PolarizationSpec::Profile::Graded;
  if (name == "explicit") return PolarizationSpec::Profile::Explicit;
  throw ConfigError("unknown polarization profile '" + name +
                    "' (expected uniform, graded or explicit)");
}

void expect_keys(const json& obj, const std::vector<std::string>& allowed,
                 const std::string& where) {
  for (const auto& [key, _] : obj.items()) {
    bool ok = false;
    for (const auto& a : allowed)
      if (key == a) {
        ok = true;
        break;
      }
    if (!ok) throw ConfigError("unknown key '" + where + key + "'");
  }
}

json grid_to_json(const est::GridRange& g) {
  return json{{"min", g.min}, {"max", g.max}, {"points", g.points}};
}

est::GridRange grid_from_json(const json& j, const std::string& where) {
  expect_keys(j, {"min", "max", "points"}, where);
  est::GridRange g;
  if (j.contains("min")) g.min = j["min"].get<double>();
  if (j.contains("max")) g.max = j["max"].get<double>();
  if (j.contains("points")) g.points = j["points"].get<std::size_t>();
  return g;
}

}  // namespace

std::string to_json(const RunConfig& c) {
  json doc;
  json src;
  src["source"] = source_kind_name(c.environment.kind);
  switch (c.environment.kind) {
    case EnvironmentSource::Kind::Table1:
      src["n"] = c.environment.n;
      break;
    case EnvironmentSource::Kind::File:
      src["path"] = c.environment.path;
      break;
    case EnvironmentSource::Kind::Generated:
      src["n"] = c.environment.n;
      src["seed"] = c.environment.seed;
      src["shell"] = json::array({c.environment.shell_min, c.environment.shell_max});
      break;
  }
  doc["environment"] = src;
  doc["b_z_gauss"] = c.b_z_gauss;

  json pol;
  pol["profile"] = profile_name(c.polarization.profile);
  switch (c.polarization.profile) {
    case PolarizationSpec::Profile::Uniform:
      pol["p"] = c.polarization.p;
      break;
    case PolarizationSpec::Profile::Graded:
      pol["mean"] = c.polarization.mean;
      pol["sigma"] = c.polarization.sigma;
      pol["seed"] = c.polarization.seed;
      break;
    case PolarizationSpec::Profile::Explicit:
      pol["values"] = c.polarization.values;
      break;
  }
  doc["polarization"] = pol;
  doc["tau_grid"] = grid_to_json(c.tau_grid);
  doc["t_grid"] = grid_to_json(c.t_grid);
  doc["method"] = est::method_name(c.method);
  doc["sin_floor"] = c.sin_floor;
  if (c.per_tau) doc["per_tau"] = true;
  if (!c.p_list.empty()) doc["p_list"] = c.p_list;
  doc["seed"] = c.seed;
  if (!c.out.empty()) doc["out"] = c.out;
  return doc.dump();
}

namespace {

RunConfig config_from_parsed(const json& doc) {
  expect_keys(doc,
              {"environment", "b_z_gauss", "polarization", "tau_grid", "t_grid", "method",
               "sin_floor", "per_tau", "p_list", "seed", "out"},
              "");
  RunConfig c;
  if (doc.contains("environment")) {
    const json& src = doc["environment"];
    expect_keys(src, {"source", "n", "path", "seed", "shell"}, "environment.");
    if (src.contains("source"))
      c.environment.kind = source_kind_from_name(src["source"].get<std::string>());
    if (src.contains("n")) c.environment.n = src["n"].get<std::size_t>();
    if (src.contains("path")) c.environment.path = src["path"].get<std::string>();
    if (src.contains("seed")) c.environment.seed = src["seed"].get<std::uint64_t>();
    if (src.contains("shell")) {
      const auto shell = src["shell"].get<std::vector<double>>();
      if (shell.size() != 2) throw ConfigError("environment.shell must be [min, max]");
      c.environment.shell_min = shell[0];
      c.environment.shell_max = shell[1];
    }
  }
  if (doc.contains("b_z_gauss")) c.b_z_gauss = doc["b_z_gauss"].get<double>();
  if (!(c.b_z_gauss >= 0.0)) throw ConfigError("b_z_gauss must be >= 0");
  if (doc.contains("polarization")) {
    const json& pol = doc["polarization"];
    expect_keys(pol, {"profile", "p", "mean", "sigma", "seed", "values"}, "polarization.");
    if (pol.contains("profile"))
      c.polarization.profile = profile_from_name(pol["profile"].get<std::string>());
    if (pol.contains("p")) c.polarization.p = pol["p"].get<double>();
    if (pol.contains("mean")) c.polarization.mean = pol["mean"].get<double>();
    if (pol.contains("sigma")) c.polarization.sigma = pol["sigma"].get<double>();
    if (pol.contains("seed")) c.polarization.seed = pol["seed"].get<std::uint64_t>();
    if (pol.contains("values")) c.polarization.values = pol["values"].get<std::vector<double>>();
  }
  if (doc.contains("tau_grid")) c.tau_grid = grid_from_json(doc["tau_grid"], "tau_grid.");
  if (doc.contains("t_grid")) c.t_grid = grid_from_json(doc["t_grid"], "t_grid.");
  if (doc.contains("method")) c.method = est::method_from_name(doc["method"].get<std::string>());
  if (doc.contains("sin_floor")) c.sin_floor = doc["sin_floor"].get<double>();
  if (doc.contains("per_tau")) c.per_tau = doc["per_tau"].get<bool>();
  if (doc.contains("p_list")) c.p_list = doc["p_list"].get<std::vector<double>>();
  if (doc.contains("seed")) c.seed = doc["seed"].get<std::uint64_t>();
  if (doc.contains("out")) c.out = doc["out"].get<std::string>();
  return c;
}

}  // namespace

RunConfig config_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& ex) {
    throw ConfigError(std::string("config parse error: ") + ex.what());
  }
  try {
    return config_from_parsed(doc);
  } catch (const json::exception& ex) {
    throw ConfigError(std::string("config schema error: ") + ex.what());
  }
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return config_from_json(ss.str());
}

void apply_override(RunConfig& c, const std::string& key_equals_value) {
  const auto eq = key_equals_value.find('=');
  if (eq == std::string::npos || eq == 0)
    throw ConfigError("--set expects key=value, got '" + key_equals_value + "'");
  const std::string key = key_equals_value.substr(0, eq);
  const std::string raw = key_equals_value.substr(eq + 1);

  // Re-serialize, patch the JSON document at the dotted path, re-parse: one
  // code path validates both config files and overrides.
  json doc = json::parse(to_json(c));
  json value;
  try {
    value = json::parse(raw);
  } catch (const json::exception&) {
    value = raw;  // bare strings (e.g. method=time-dependent) need no quotes
  }

  json* node = &doc;
  std::size_t begin = 0;
  while (true) {
    const std::size_t dot = key.find('.', begin);
    const std::string part = key.substr(begin, dot == std::string::npos ? dot : dot - begin);
    if (part.empty()) throw ConfigError("--set: empty path segment in '" + key + "'");
    if (dot == std::string::npos) {
      (*node)[part] = value;
      break;
    }
    if (!node->contains(part) || !(*node)[part].is_object()) (*node)[part] = json::object();
    node = &(*node)[part];
    begin = dot + 1;
  }

  try {
    c = config_from_parsed(doc);
  } catch (const json::exception& ex) {
    throw ConfigError(std::string("--set '") + key_equals_value + "': " + ex.what());
  }
}

env::Environment build_environment(const RunConfig& c) {
  env::Environment e;
  switch (c.environment.kind) {
    case EnvironmentSource::Kind::Table1:
      e = env::load_table1();
      if (c.environment.n < 1 || c.environment.n > e.n())
        throw ConfigError("environment.n must be in [1, " + std::to_string(e.n()) + "]");
      e = e.truncated(c.environment.n);
      break;
    case EnvironmentSource::Kind::File:
      if (c.environment.path.empty()) throw ConfigError("environment.path is required");
      e = env::load_environment(c.environment.path);
      break;
    case EnvironmentSource::Kind::Generated:
      e = env::generate_environment(c.environment.seed, c.environment.n,
                                    c.environment.shell_min, c.environment.shell_max);
      break;
  }
  e.b_z_gauss = c.b_z_gauss;
  switch (c.polarization.profile) {
    case PolarizationSpec::Profile::Uniform:
      e = env::set_polarization(e, env::Uniform{c.polarization.p});
      break;
    case PolarizationSpec::Profile::Graded:
      e = env::set_polarization(
          e, env::Graded{c.polarization.mean, c.polarization.sigma, c.polarization.seed});
      break;
    case PolarizationSpec::Profile::Explicit:
      e = env::set_polarization(e, env::Explicit{c.polarization.values});
      break;
  }
  return e;
}

}  // namespace nvpol::cli
