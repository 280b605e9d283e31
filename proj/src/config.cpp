#include "bpre/config.hpp"

#include <cmath>
#include <map>

#include <json.hpp>

#include "bpre/table.hpp"

namespace bpre {

using nlohmann::json;

std::string kind_name(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::Validate: return "validate";
    case ExperimentKind::Simulate: return "simulate";
    case ExperimentKind::BeScan: return "be-scan";
    case ExperimentKind::CramerScan: return "cramer-scan";
    case ExperimentKind::SteinCheck: return "stein-check";
    case ExperimentKind::WTail: return "wtail";
  }
  return "?";
}

std::uint64_t fnv1a_hash(const std::string& text) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

namespace {

OffspringLaw law_from_json(const json& j) {
  if (!j.is_object() || !j.contains("family"))
    throw ConfigError("law description must be an object with a \"family\" field");
  std::string family = j.at("family").get<std::string>();
  if (family == "shifted_geometric") {
    if (!j.contains("p")) throw ConfigError("shifted_geometric law requires \"p\"");
    return OffspringLaw::shifted_geometric(j.at("p").get<double>());
  }
  if (family == "shifted_poisson") {
    if (!j.contains("rate")) throw ConfigError("shifted_poisson law requires \"rate\"");
    return OffspringLaw::shifted_poisson(j.at("rate").get<double>());
  }
  if (family == "finite") {
    if (!j.contains("pmf") || !j.at("pmf").is_object())
      throw ConfigError("finite law requires a \"pmf\" object keyed by support points");
    std::map<int, double> pm;
    for (const auto& [key, val] : j.at("pmf").items()) {
      int k = std::stoi(key);
      if (k < 1) throw ConfigError("finite pmf support must lie in {1,2,...}");
      pm[k] = val.get<double>();
    }
    if (pm.empty()) throw ConfigError("finite pmf must be nonempty");
    std::vector<double> weights(static_cast<std::size_t>(pm.rbegin()->first), 0.0);
    for (const auto& [k, w] : pm) weights[static_cast<std::size_t>(k) - 1] = w;
    return OffspringLaw::finite_pmf(std::move(weights));
  }
  throw ConfigError("unknown offspring family: " + family);
}

EnvironmentModel model_from_json(const json& j) {
  if (!j.is_object() || !j.contains("atoms") || !j.at("atoms").is_array())
    throw ConfigError("model description requires an \"atoms\" array");
  std::vector<Atom> atoms;
  for (const auto& aj : j.at("atoms")) {
    if (!aj.contains("law") || !aj.contains("prob"))
      throw ConfigError("each atom requires \"law\" and \"prob\"");
    atoms.push_back({law_from_json(aj.at("law")), aj.at("prob").get<double>()});
  }
  double lambda0 = j.value("lambda0", 1.0);
  try {
    return EnvironmentModel(std::move(atoms), lambda0);
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
}

json parse_json_or_throw(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("JSON parse error: ") + e.what());
  }
}

std::vector<double> double_grid(const json& j, const char* key) {
  std::vector<double> grid;
  for (const auto& v : j.at(key)) grid.push_back(v.get<double>());
  if (grid.empty()) throw ConfigError(std::string(key) + " must be nonempty");
  return grid;
}

}  // namespace

OffspringLaw law_from_json_text(const std::string& text) {
  return law_from_json(parse_json_or_throw(text));
}

EnvironmentModel model_from_json_text(const std::string& text) {
  return model_from_json(parse_json_or_throw(text));
}

ExperimentConfig parse_config(const std::string& text, ExperimentKind kind) {
  json j = parse_json_or_throw(text);
  if (!j.is_object()) throw ConfigError("config root must be a JSON object");

  ExperimentConfig cfg;
  cfg.kind = kind;
  cfg.config_hash = "fnv1a-" + std::to_string(fnv1a_hash(text));

  if (!j.contains("model")) throw ConfigError("config requires a \"model\" object");
  cfg.model = model_from_json(j.at("model"));

  if (!j.contains("seed")) throw ConfigError("config requires \"seed\"");
  if (!j.contains("replications")) throw ConfigError("config requires \"replications\"");
  cfg.seed = j.at("seed").get<std::uint64_t>();
  cfg.replications = j.at("replications").get<std::uint64_t>();
  if (cfg.replications < 1) throw ConfigError("replications must be >= 1");

  if (j.contains("workers")) {
    cfg.workers = j.at("workers").get<unsigned>();
  } else {
    cfg.defaults_used.push_back("workers=auto");
  }
  if (j.contains("exact_threshold")) {
    cfg.exact_threshold = j.at("exact_threshold").get<std::uint64_t>();
  } else {
    cfg.defaults_used.push_back("exact_threshold=2^40");
  }
  cfg.p = j.value("p", 1.5);
  if (!j.contains("p")) cfg.defaults_used.push_back("p=1.5");

  auto need_n = [&] {
    if (!j.contains("n")) throw ConfigError("config requires \"n\" for this experiment");
    cfg.n = j.at("n").get<int>();
    if (cfg.n < 1) throw ConfigError("n must be >= 1");
  };
  auto need_n_grid = [&] {
    if (!j.contains("n_grid")) throw ConfigError("config requires \"n_grid\" for this experiment");
    for (const auto& v : j.at("n_grid")) cfg.n_grid.push_back(v.get<int>());
    if (cfg.n_grid.size() < 3) throw ConfigError("n_grid requires >= 3 values");
    for (int n : cfg.n_grid)
      if (n < 1) throw ConfigError("n_grid values must be >= 1");
  };

  switch (kind) {
    case ExperimentKind::Validate:
      break;
    case ExperimentKind::Simulate:
      need_n();
      break;
    case ExperimentKind::BeScan:
      need_n_grid();
      break;
    case ExperimentKind::CramerScan: {
      need_n();
      if (!j.contains("x_grid")) throw ConfigError("cramer-scan config requires \"x_grid\"");
      cfg.x_grid = double_grid(j, "x_grid");
      double sigma = std::sqrt(cfg.model->sigma2());
      double guard = 0.5 * std::sqrt(static_cast<double>(cfg.n)) * cfg.model->lambda0() * sigma;
      for (double x : cfg.x_grid) {
        if (x < 0.0) throw ConfigError("x_grid values must be >= 0");
        if (x > guard)
          throw ConfigError("x_grid value " + format_double(x) +
                            " violates the x = o(sqrt n) regime guard");
      }
      break;
    }
    case ExperimentKind::SteinCheck: {
      if (j.contains("x_grid")) {
        cfg.x_grid = double_grid(j, "x_grid");
      } else {
        cfg.x_grid = {-3.0, -1.5, 0.0, 1.5, 3.0};
        cfg.defaults_used.push_back("x_grid=built-in");
      }
      need_n();
      break;
    }
    case ExperimentKind::WTail: {
      need_n();
      if (j.contains("t_grid")) {
        cfg.t_grid = double_grid(j, "t_grid");
        for (double t : cfg.t_grid)
          if (t < 0.0) throw ConfigError("t_grid values must be >= 0");
      } else {
        for (int k = 0; k <= 24; ++k) cfg.t_grid.push_back(std::pow(10.0, -2.0 + 0.25 * k));
        cfg.defaults_used.push_back("t_grid=logspace(1e-2,1e4,25)");
      }
      cfg.a = j.value("a", 0.0);
      if (cfg.a == 0.0) {
        cfg.a = 0.5 * cfg.model->a0_bound();
        cfg.defaults_used.push_back("a=a0/2");
      }
      if (cfg.a <= 0.0) throw ConfigError("harmonic exponent a must be > 0");
      break;
    }
  }

  AssumptionReport report = cfg.model->validate_assumptions(cfg.p);
  if (!report.admissible()) throw ConfigError("inadmissible model: " + report.first_failure());
  return cfg;
}

}  // namespace bpre
