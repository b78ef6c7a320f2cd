#include "adjrobust/config.hpp"

#include <cmath>
#include <json.hpp>
#include <map>

namespace adjrobust {

namespace {

using nlohmann::json;

json parse_json(const std::string& text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded())
    throw Error(ErrorCode::InvalidValue, "config is not valid JSON");
  if (!j.is_object()) throw Error(ErrorCode::InvalidValue, "config must be a JSON object");
  return j;
}

AdjustmentSpec spec_from_json(const json& j, const ObservationTable& table) {
  if (!j.contains("adjustment_sets") || !j["adjustment_sets"].is_array())
    throw Error(ErrorCode::InvalidValue, "config needs an \"adjustment_sets\" array");

  std::map<std::string, int> index;
  if (j.contains("covariates")) {
    for (const auto& name : j["covariates"]) {
      const std::string s = name.get<std::string>();
      bool found = false;
      for (std::size_t c = 0; c < table.col_names.size(); ++c)
        if (table.col_names[c] == s) {
          index[s] = static_cast<int>(c);
          found = true;
        }
      if (!found)
        throw Error(ErrorCode::UnknownColumn, "covariate '" + s + "' not in table");
    }
  } else {
    for (std::size_t c = 0; c < table.col_names.size(); ++c)
      index[table.col_names[c]] = static_cast<int>(c);
  }

  AdjustmentSpec spec;
  for (const auto& arr : j["adjustment_sets"]) {
    std::vector<int> set;
    for (const auto& name : arr) {
      const std::string s = name.get<std::string>();
      auto it = index.find(s);
      if (it == index.end())
        throw Error(ErrorCode::UnknownColumn, "unknown column '" + s + "' in adjustment set");
      set.push_back(it->second);
    }
    spec.sets.push_back(std::move(set));
  }
  if (spec.sets.size() < 2)
    throw Error(ErrorCode::FewerThanTwoSets, "need at least two adjustment sets");
  spec.intersection = intersect_sets(spec.sets);
  if (j.contains("overlap_floor")) spec.overlap_floor = j["overlap_floor"].get<double>();
  spec.validate(table.p());
  return spec;
}

}  // namespace

AdjustmentSpec parse_adjustment_config(const std::string& json_text,
                                       const ObservationTable& table) {
  return spec_from_json(parse_json(json_text), table);
}

AnalysisConfig parse_analysis_config(const std::string& json_text,
                                     const ObservationTable& table) {
  const json j = parse_json(json_text);
  AnalysisConfig cfg;
  cfg.spec = spec_from_json(j, table);
  if (j.contains("alpha")) cfg.alpha = j["alpha"].get<double>();
  if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0))
    throw Error(ErrorCode::InvalidValue, "alpha must lie in (0,1)");
  if (j.contains("method")) cfg.method = j["method"].get<std::string>();
  if (cfg.method != "lm" && cfg.method != "aipw")
    throw Error(ErrorCode::InvalidValue, "method must be \"lm\" or \"aipw\"");
  if (j.contains("folds")) cfg.folds = j["folds"].get<int>();
  if (j.contains("bootstrap")) cfg.bootstrap = j["bootstrap"].get<int>();
  if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
  return cfg;
}

int default_knn_k(Eigen::Index n) {
  return static_cast<int>(std::ceil(std::pow(static_cast<double>(n), 0.7) / 2.0));
}

}  // namespace adjrobust
