#include "kglri/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

namespace kglri {

namespace {

const std::map<std::string, std::vector<std::string>>& schema() {
  static const std::map<std::string, std::vector<std::string>> s = {
      {"problem", {"nonlinearity", "lambda", "rho", "d", "n_x", "a", "b"}},
      {"data", {"kind", "theta", "seed", "n_seeds"}},
      {"study",
       {"methods", "method", "h", "T", "k_min", "k_max", "reference", "k_ref",
        "fit_lo", "fit_hi", "dealias", "threads", "check_ref_floor",
        "nx_list", "nx_ref", "h_spatial", "spatial_probe", "T_eff",
        "target_err", "sample_every", "diagnostics"}},
      {"output", {"dir", "write_state", "write_plot_data", "quiet"}},
  };
  return s;
}

bool known_key(const std::string& section, const std::string& key) {
  auto it = schema().find(section);
  if (it == schema().end()) return false;
  return std::find(it->second.begin(), it->second.end(), key) !=
         it->second.end();
}

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  std::size_t e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? "" : s.substr(b, e - b + 1);
}

// section.key -> value, last write wins
using KvMap = std::map<std::string, std::string>;

void parse_ini(const std::string& path, KvMap& kv) {
  std::ifstream is(path);
  if (!is) throw ConfigError("config: cannot open '" + path + "'");
  std::string line, section;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']')
        throw ConfigError(path + ":" + std::to_string(lineno) +
                          ": malformed section header");
      section = trim(t.substr(1, t.size() - 2));
      if (schema().find(section) == schema().end())
        throw ConfigError(path + ":" + std::to_string(lineno) +
                          ": unknown section [" + section + "]");
      continue;
    }
    auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path + ":" + std::to_string(lineno) +
                        ": expected key = value");
    if (section.empty())
      throw ConfigError(path + ":" + std::to_string(lineno) +
                        ": key outside of any section");
    std::string key = trim(t.substr(0, eq));
    std::string value = trim(t.substr(eq + 1));
    if (!known_key(section, key))
      throw ConfigError(path + ":" + std::to_string(lineno) +
                        ": unknown key '" + key + "' in section [" + section +
                        "]");
    kv[section + "." + key] = value;
  }
}

void apply_env(KvMap& kv) {
  for (const auto& [section, keys] : schema()) {
    for (const auto& key : keys) {
      std::string env = "KGLRI_" + section + "_" + key;
      std::transform(env.begin(), env.end(), env.begin(),
                     [](unsigned char c) { return std::toupper(c); });
      if (const char* v = std::getenv(env.c_str()))
        kv[section + "." + key] = v;
    }
  }
}

void apply_overrides(const std::vector<std::string>& overrides, KvMap& kv) {
  for (const auto& o : overrides) {
    auto eq = o.find('=');
    auto dot = o.find('.');
    if (eq == std::string::npos || dot == std::string::npos || dot > eq)
      throw ConfigError("--set expects section.key=value, got '" + o + "'");
    std::string section = trim(o.substr(0, dot));
    std::string key = trim(o.substr(dot + 1, eq - dot - 1));
    if (!known_key(section, key))
      throw ConfigError("--set: unknown key '" + key + "' in section [" +
                        section + "]");
    kv[section + "." + key] = trim(o.substr(eq + 1));
  }
}

class Reader {
 public:
  explicit Reader(const KvMap& kv) : kv_(kv) {}

  bool has(const std::string& k) const { return kv_.count(k) > 0; }

  std::string str(const std::string& k, const std::string& dflt) const {
    auto it = kv_.find(k);
    return it == kv_.end() ? dflt : it->second;
  }

  double num(const std::string& k, double dflt) const {
    auto it = kv_.find(k);
    if (it == kv_.end()) return dflt;
    try {
      std::size_t pos = 0;
      double v = std::stod(it->second, &pos);
      if (pos != it->second.size()) throw std::invalid_argument("");
      return v;
    } catch (...) {
      throw ConfigError("config: key '" + k + "': '" + it->second +
                        "' is not a number");
    }
  }

  long integer(const std::string& k, long dflt) const {
    double v = num(k, static_cast<double>(dflt));
    long i = static_cast<long>(v);
    if (static_cast<double>(i) != v)
      throw ConfigError("config: key '" + k + "' must be an integer");
    return i;
  }

  bool flag(const std::string& k, bool dflt) const {
    auto it = kv_.find(k);
    if (it == kv_.end()) return dflt;
    const std::string& v = it->second;
    if (v == "true" || v == "1" || v == "on" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "off" || v == "no") return false;
    throw ConfigError("config: key '" + k + "' must be a boolean, got '" + v +
                      "'");
  }

  std::vector<std::string> list(const std::string& k,
                                const std::string& dflt) const {
    std::string raw = str(k, dflt);
    std::vector<std::string> out;
    std::stringstream ss(raw);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (!item.empty()) out.push_back(item);
    }
    return out;
  }

 private:
  const KvMap& kv_;
};

bool is_pow2(long v) { return v > 0 && (v & (v - 1)) == 0; }

}  // namespace

RunConfig parse_config(const std::string& path,
                       const std::vector<std::string>& overrides) {
  KvMap kv;
  if (!path.empty()) parse_ini(path, kv);
  apply_env(kv);
  apply_overrides(overrides, kv);
  Reader r(kv);

  RunConfig cfg;
  StudySpec& s = cfg.study;

  s.nonlinearity = r.str("problem.nonlinearity", "sine");
  s.lambda = r.num("problem.lambda", 1.0);
  s.rho = r.num("problem.rho", 0.0);
  s.dim = static_cast<int>(r.integer("problem.d", 1));
  s.n_x = static_cast<int>(r.integer("problem.n_x", 256));
  s.a = r.num("problem.a", -3.14159265358979323846);
  s.b = r.num("problem.b", 3.14159265358979323846);

  if (s.nonlinearity != "zero" && s.nonlinearity != "sine" &&
      s.nonlinearity != "cubic")
    throw ConfigError(
        "config: problem.nonlinearity must be one of zero, sine, cubic");
  if (s.rho < 0.0) throw ConfigError("config: problem.rho must be >= 0");
  if (s.dim < 1 || s.dim > 3)
    throw ConfigError("config: problem.d must be 1, 2 or 3");
  if (!is_pow2(s.n_x) || s.n_x < 4)
    throw ConfigError("config: n_x must be a power of two >= 4");
  if (!(s.b > s.a)) throw ConfigError("config: problem requires b > a");

  std::string kind = r.str("data.kind", "rough");
  if (kind == "rough") {
    s.data.kind = DataKind::Rough;
  } else if (kind == "single_mode") {
    s.data.kind = DataKind::SingleMode;
  } else {
    throw ConfigError("config: data.kind must be rough or single_mode");
  }
  s.data.theta = r.num("data.theta", 2.0);
  if (!(s.data.theta > 0.5))
    throw ConfigError("config: data.theta must be > 1/2");
  long seed = r.integer("data.seed", 1);
  if (seed < 0) throw ConfigError("config: data.seed must be >= 0");
  s.data.seed = static_cast<std::uint64_t>(seed);
  long n_seeds = r.integer("data.n_seeds", 0);
  if (n_seeds < 0 || n_seeds > 1024)
    throw ConfigError("config: data.n_seeds must be in [0, 1024]");
  // 0 selects the default ensemble: 4 seeds for rough data, 1 otherwise.
  s.data.n_seeds = n_seeds > 0 ? static_cast<int>(n_seeds)
                   : s.data.kind == DataKind::Rough ? 4
                                                    : 1;

  s.methods.clear();
  for (const auto& name : r.list("study.methods", "lri3,etdrk3"))
    s.methods.push_back(method_from_name(name));
  if (s.methods.empty())
    throw ConfigError("config: study.methods must not be empty");
  cfg.run_method = method_from_name(r.str("study.method", "lri3"));
  cfg.run_h = r.num("study.h", 1.0 / 256.0);
  if (!(cfg.run_h > 0.0)) throw ConfigError("config: study.h must be > 0");
  s.T = r.num("study.T", 1.0);
  if (!(s.T > 0.0)) throw ConfigError("config: study.T must be > 0");
  s.k_min = static_cast<int>(r.integer("study.k_min", 2));
  s.k_max = static_cast<int>(r.integer("study.k_max", 8));
  if (s.k_min < 0 || s.k_max <= s.k_min)
    throw ConfigError("config: requires 0 <= k_min < k_max");
  std::string ref = r.str("study.reference", "rk4ref");
  if (ref == "rk4ref") {
    s.reference = ReferenceMode::Rk4Ref;
  } else if (ref == "lri3") {
    s.reference = ReferenceMode::FineLri3;
  } else {
    throw ConfigError("config: study.reference must be rk4ref or lri3");
  }
  s.k_ref = static_cast<int>(r.integer("study.k_ref", 14));
  if (s.k_ref < s.k_max + 5)
    throw ConfigError(
        "config: study.k_ref must be >= k_max + 5 (reference stepsize at "
        "most smallest h / 32)");
  s.fit_lo = static_cast<int>(r.integer("study.fit_lo", 0));
  s.fit_hi = static_cast<int>(r.integer("study.fit_hi", 0));
  s.dealias = r.flag("study.dealias", false);
  s.threads = static_cast<int>(r.integer("study.threads", 1));
  if (s.threads < 1 || s.threads > 256)
    throw ConfigError("config: study.threads must be in [1, 256]");
  s.check_ref_floor = r.flag("study.check_ref_floor", true);

  s.nx_list.clear();
  for (const auto& item : r.list("study.nx_list", "32,64,128,256,512")) {
    int nx = 0;
    try {
      nx = std::stoi(item);
    } catch (...) {
      throw ConfigError("config: study.nx_list entry '" + item +
                        "' is not an integer");
    }
    if (!is_pow2(nx) || nx < 4)
      throw ConfigError("config: study.nx_list entries must be powers of two >= 4");
    s.nx_list.push_back(nx);
  }
  if (s.nx_list.empty())
    throw ConfigError("config: study.nx_list must not be empty");
  if (!std::is_sorted(s.nx_list.begin(), s.nx_list.end()))
    throw ConfigError("config: study.nx_list must be increasing");
  s.nx_ref = static_cast<int>(r.integer("study.nx_ref", 2048));
  if (!is_pow2(s.nx_ref) || s.nx_ref < 4 * s.nx_list.back())
    throw ConfigError(
        "config: study.nx_ref must be a power of two >= 4x the largest n_x");
  s.h_spatial = r.num("study.h_spatial", 1e-5);
  if (!(s.h_spatial > 0.0))
    throw ConfigError("config: study.h_spatial must be > 0");
  s.spatial_probe = r.flag("study.spatial_probe", true);
  s.T_eff = r.num("study.T_eff", 5.0);
  if (!(s.T_eff > 0.0)) throw ConfigError("config: study.T_eff must be > 0");
  s.target_err = r.num("study.target_err", 1e-6);
  if (!(s.target_err > 0.0))
    throw ConfigError("config: study.target_err must be > 0");

  cfg.sample_every = static_cast<int>(r.integer("study.sample_every", 0));
  if (cfg.sample_every < 0)
    throw ConfigError("config: study.sample_every must be >= 0");
  for (const auto& d : r.list("study.diagnostics", "none")) {
    if (d == "none") continue;
    if (d == "norms") {
      cfg.diag_norms = true;
    } else if (d == "energy") {
      cfg.diag_energy = true;
    } else {
      throw ConfigError(
          "config: study.diagnostics entries must be none, norms or energy");
    }
  }

  cfg.out_dir = r.str("output.dir", "out");
  if (cfg.out_dir.empty())
    throw ConfigError("config: output.dir must not be empty");
  cfg.write_state_file = r.flag("output.write_state", true);
  cfg.write_plot_data = r.flag("output.write_plot_data", true);
  cfg.quiet = r.flag("output.quiet", false);
  return cfg;
}

std::string RunConfig::echo_json() const {
  nlohmann::json j;
  j["problem"] = {{"nonlinearity", study.nonlinearity},
                  {"lambda", study.lambda},
                  {"rho", study.rho},
                  {"d", study.dim},
                  {"n_x", study.n_x},
                  {"a", study.a},
                  {"b", study.b}};
  j["data"] = {{"kind", study.data.kind == DataKind::Rough ? "rough"
                                                           : "single_mode"},
               {"theta", study.data.theta},
               {"seed", study.data.seed},
               {"n_seeds", study.data.n_seeds}};
  std::vector<std::string> methods;
  for (Method m : study.methods) methods.push_back(method_name(m));
  j["study"] = {
      {"methods", methods},
      {"method", method_name(run_method)},
      {"h", run_h},
      {"T", study.T},
      {"k_min", study.k_min},
      {"k_max", study.k_max},
      {"reference",
       study.reference == ReferenceMode::Rk4Ref ? "rk4ref" : "lri3"},
      {"k_ref", study.k_ref},
      {"dealias", study.dealias},
      {"threads", study.threads},
      {"nx_list", study.nx_list},
      {"nx_ref", study.nx_ref},
      {"h_spatial", study.h_spatial},
      {"T_eff", study.T_eff},
      {"target_err", study.target_err},
      {"sample_every", sample_every}};
  j["output"] = {{"dir", out_dir},
                 {"write_state", write_state_file},
                 {"write_plot_data", write_plot_data},
                 {"quiet", quiet}};
  return j.dump(2);
}

}  // namespace kglri
