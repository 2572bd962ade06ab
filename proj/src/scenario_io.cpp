#include "tvmed/scenario_io.hpp"

#include "tvmed/io.hpp"

#include <fstream>

namespace tvmed {

using nlohmann::json;

json scenario_to_json(const SimScenario& s) {
  json arms = json::array();
  for (const auto& a : s.arms)
    arms.push_back({{"alpha", a.alpha.source()},
                    {"gamma", a.gamma.source()},
                    {"probability", a.probability}});
  json j = {{"name", s.name},
            {"alpha0", s.alpha0.source()},
            {"beta0", s.beta0.source()},
            {"beta", s.beta.source()},
            {"arms", arms},
            {"sigma2", s.sigma2},
            {"phi", s.phi},
            {"n_times", s.n_times},
            {"t_start", s.t_start},
            {"t_end", s.t_end},
            {"dt", s.resolved_dt()},
            {"n_subjects", s.n_subjects},
            {"seed", s.seed},
            {"lag_mode", to_string(s.lag_mode)},
            {"dropout", s.dropout}};
  if (s.sigma2_outcome) j["sigma2_outcome"] = *s.sigma2_outcome;
  return j;
}

namespace {

Expression expression_field(const json& v, const char* key) {
  if (v.is_number()) return Expression::constant(v.get<double>());
  if (v.is_string()) return Expression::parse(v.get<std::string>());
  throw InvalidArgument(std::string("scenario field '") + key + "' must be a string or number");
}

}  // namespace

SimScenario scenario_from_json(const json& j) {
  if (!j.is_object()) throw InvalidArgument("scenario must be a JSON object");
  try {
    SimScenario s;
    s.alpha0 = Expression::constant(0.0);
    s.beta0 = Expression::constant(0.0);
    if (j.contains("model")) s = builtin_scenario(parse_builtin_model(j.at("model").get<std::string>()));
    if (j.contains("name")) s.name = j.at("name").get<std::string>();
    if (j.contains("alpha0")) s.alpha0 = expression_field(j.at("alpha0"), "alpha0");
    if (j.contains("beta0")) s.beta0 = expression_field(j.at("beta0"), "beta0");
    if (j.contains("beta")) s.beta = expression_field(j.at("beta"), "beta");
    if (j.contains("arms")) {
      s.arms.clear();
      for (const auto& a : j.at("arms")) {
        ArmEffects arm;
        arm.alpha = expression_field(a.at("alpha"), "alpha");
        arm.gamma = expression_field(a.at("gamma"), "gamma");
        arm.probability = a.value("probability", 0.5);
        s.arms.push_back(std::move(arm));
      }
    }
    if (j.contains("sigma2")) s.sigma2 = j.at("sigma2").get<double>();
    if (j.contains("sigma2_outcome")) s.sigma2_outcome = j.at("sigma2_outcome").get<double>();
    if (j.contains("phi")) s.phi = j.at("phi").get<double>();
    if (j.contains("n_times")) s.n_times = j.at("n_times").get<std::size_t>();
    if (j.contains("t_start")) s.t_start = j.at("t_start").get<double>();
    if (j.contains("t_end")) s.t_end = j.at("t_end").get<double>();
    if (j.contains("dt") && !j.at("dt").is_null()) s.dt = j.at("dt").get<double>();
    if (j.contains("n_subjects")) s.n_subjects = j.at("n_subjects").get<std::size_t>();
    if (j.contains("seed")) s.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("lag_mode")) s.lag_mode = parse_lag_mode(j.at("lag_mode").get<std::string>());
    if (j.contains("dropout")) s.dropout = j.at("dropout").get<double>();
    s.validate();
    return s;
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("invalid scenario: ") + e.what());
  }
}

SimScenario load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw InvalidArgument("scenario '" + path + "' is not valid JSON: " + e.what());
  }
  return scenario_from_json(j);
}

}  // namespace tvmed
