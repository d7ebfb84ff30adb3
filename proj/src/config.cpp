#include "qpl/config.hpp"

#include <fstream>
#include <set>
#include <stdexcept>

#include <json.hpp>

namespace qpl {
namespace {

using nlohmann::json;

void reject_unknown_keys(const json& obj, const std::string& where,
                         const std::set<std::string>& allowed) {
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    if (!allowed.contains(key))
      throw std::invalid_argument("unknown config key '" + where + key + "'");
  }
}

double get_number(const json& obj, const char* key, double fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number())
    throw std::invalid_argument(std::string("config key '") + key + "' must be a number");
  return v.get<double>();
}

int get_int(const json& obj, const char* key, int fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_integer())
    throw std::invalid_argument(std::string("config key '") + key + "' must be an integer");
  return v.get<int>();
}

std::uint64_t get_u64(const json& obj, const char* key, std::uint64_t fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_integer() ||
      (!v.is_number_unsigned() && v.get<long long>() < 0))
    throw std::invalid_argument(std::string("config key '") + key +
                                "' must be a non-negative integer");
  return v.get<std::uint64_t>();
}

bool get_bool(const json& obj, const char* key, bool fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_boolean())
    throw std::invalid_argument(std::string("config key '") + key + "' must be a boolean");
  return v.get<bool>();
}

std::string get_string(const json& obj, const char* key, const std::string& fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_string())
    throw std::invalid_argument(std::string("config key '") + key + "' must be a string");
  return v.get<std::string>();
}

RampProfile ramp_profile_from_string(const std::string& name) {
  if (name == "sin2") return RampProfile::sin2;
  if (name == "linear") return RampProfile::linear;
  throw std::invalid_argument("unknown ramp profile '" + name +
                              "' (expected sin2 | linear)");
}

const char* to_string(RampProfile profile) {
  return profile == RampProfile::sin2 ? "sin2" : "linear";
}

}  // namespace

RunConfig parse_run_config_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw std::invalid_argument("config root must be a JSON object");
  reject_unknown_keys(doc, "", {"params", "ramp", "ensemble", "outputs"});

  RunConfig cfg;
  if (doc.contains("params")) {
    const json& p = doc.at("params");
    if (!p.is_object()) throw std::invalid_argument("'params' must be an object");
    reject_unknown_keys(p, "params.",
                        {"g", "kappa2_half", "gamma2_half", "alpha_max", "fock_dim",
                         "dt", "t_final"});
    cfg.params.g = get_number(p, "g", cfg.params.g);
    cfg.params.kappa2_half = get_number(p, "kappa2_half", cfg.params.kappa2_half);
    cfg.params.gamma2_half = get_number(p, "gamma2_half", cfg.params.gamma2_half);
    cfg.params.alpha_max = get_number(p, "alpha_max", cfg.params.alpha_max);
    cfg.params.fock_dim = get_int(p, "fock_dim", cfg.params.fock_dim);
    cfg.params.dt = get_number(p, "dt", cfg.params.dt);
    cfg.params.t_final = get_number(p, "t_final", cfg.params.t_final);
  }
  if (doc.contains("ramp")) {
    const json& r = doc.at("ramp");
    if (!r.is_object()) throw std::invalid_argument("'ramp' must be an object");
    reject_unknown_keys(r, "ramp.", {"t_on", "t_rise", "t_off", "t_fall", "profile"});
    cfg.params.ramp.t_on = get_number(r, "t_on", cfg.params.ramp.t_on);
    cfg.params.ramp.t_rise = get_number(r, "t_rise", cfg.params.ramp.t_rise);
    cfg.params.ramp.t_off = get_number(r, "t_off", cfg.params.ramp.t_off);
    cfg.params.ramp.t_fall = get_number(r, "t_fall", cfg.params.ramp.t_fall);
    cfg.params.ramp.profile = ramp_profile_from_string(
        get_string(r, "profile", to_string(cfg.params.ramp.profile)));
  }
  if (doc.contains("ensemble")) {
    const json& e = doc.at("ensemble");
    if (!e.is_object()) throw std::invalid_argument("'ensemble' must be an object");
    reject_unknown_keys(e, "ensemble.", {"n_traj", "seed_base", "mode"});
    cfg.n_traj = get_int(e, "n_traj", cfg.n_traj);
    cfg.seed_base = get_u64(e, "seed_base", cfg.seed_base);
    cfg.mode = ensemble_mode_from_string(get_string(e, "mode", to_string(cfg.mode)));
  }
  if (doc.contains("outputs")) {
    const json& o = doc.at("outputs");
    if (!o.is_object()) throw std::invalid_argument("'outputs' must be an object");
    reject_unknown_keys(o, "outputs.", {"dir", "emit_svg", "decimation"});
    cfg.outputs.dir = get_string(o, "dir", cfg.outputs.dir);
    cfg.outputs.emit_svg = get_bool(o, "emit_svg", cfg.outputs.emit_svg);
    cfg.outputs.decimation = get_int(o, "decimation", cfg.outputs.decimation);
  }

  cfg.params.validate();
  if (cfg.n_traj < 1) throw std::invalid_argument("ensemble.n_traj must be >= 1");
  if (cfg.outputs.decimation < 1)
    throw std::invalid_argument("outputs.decimation must be >= 1");
  if (cfg.outputs.dir.empty()) throw std::invalid_argument("outputs.dir must be non-empty");
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_run_config_text(text);
}

std::string run_config_to_json_text(const RunConfig& config) {
  json doc;
  doc["params"] = {{"g", config.params.g},
                   {"kappa2_half", config.params.kappa2_half},
                   {"gamma2_half", config.params.gamma2_half},
                   {"alpha_max", config.params.alpha_max},
                   {"fock_dim", config.params.fock_dim},
                   {"dt", config.params.dt},
                   {"t_final", config.params.t_final}};
  doc["ramp"] = {{"t_on", config.params.ramp.t_on},
                 {"t_rise", config.params.ramp.t_rise},
                 {"t_off", config.params.ramp.t_off},
                 {"t_fall", config.params.ramp.t_fall},
                 {"profile", to_string(config.params.ramp.profile)}};
  doc["ensemble"] = {{"n_traj", config.n_traj},
                     {"seed_base", config.seed_base},
                     {"mode", qpl::to_string(config.mode)}};
  doc["outputs"] = {{"dir", config.outputs.dir},
                    {"emit_svg", config.outputs.emit_svg},
                    {"decimation", config.outputs.decimation}};
  return doc.dump(2) + "\n";
}

void write_run_config(const std::filesystem::path& path, const RunConfig& config) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file " + path.string());
  out << run_config_to_json_text(config);
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace qpl
