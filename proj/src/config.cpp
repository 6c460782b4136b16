#include "detshock/config.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "detshock/errors.hpp"

namespace detshock {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

const std::set<std::string>& known_keys() {
  static const std::set<std::string> k = {
      "gamma",     "B0",         "eps",         "theta_w_degrees",
      "h0",        "d0",         "L",           "L_list",
      "eps_list",  "n_s",        "n_t",         "grading",
      "damping",   "omega",      "tol_f",       "tol_psi",
      "tol_pde",   "eps_guard",  "max_outer",   "max_picard",
      "ellipticity", "seed_profile", "body",    "polar_samples",
      "out_dir",   "M1",         "M2",          "norm_beta",
      "norm_alpha"};
  return k;
}

std::string canonical_key(const std::string& k) {
  if (k == "b0_bernoulli") return "B0";
  return k;
}

double to_double(const Config& c, const std::string& key, double def) {
  if (!c.has(key)) return def;
  const std::string& s = c.get(key);
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size() || !std::isfinite(v)) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': not a number: '" + s + "'");
  }
}

int to_int(const Config& c, const std::string& key, int def) {
  const double v = to_double(c, key, def);
  if (v != std::floor(v) || std::abs(v) > 1e9)
    throw ConfigError("config key '" + key + "': not an integer");
  return static_cast<int>(v);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

void require(bool ok, const std::string& key, const std::string& what) {
  if (!ok) throw ConfigError("config key '" + key + "': " + what);
}

}  // namespace

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  Config c;
  const auto dir = std::filesystem::path(path).parent_path().string();
  c.parse_into(ss.str(), dir.empty() ? "." : dir, 0);
  return c;
}

Config Config::parse(const std::string& text, const std::string& base_dir) {
  Config c;
  c.parse_into(text, base_dir, 0);
  return c;
}

void Config::parse_into(const std::string& text, const std::string& base_dir,
                        int depth) {
  if (depth > 16) throw ConfigError("config include nesting too deep");
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key == "include") {
      std::filesystem::path p(val);
      if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
      std::ifstream in(p);
      if (!in) throw ConfigError("cannot open included config '" + p.string() + "'");
      std::stringstream inc;
      inc << in.rdbuf();
      const auto dir = p.parent_path().string();
      parse_into(inc.str(), dir.empty() ? "." : dir, depth + 1);
      continue;
    }
    set(key, val);
  }
}

void Config::set(const std::string& key_in, const std::string& value) {
  const std::string key = canonical_key(trim(key_in));
  if (!known_keys().count(key)) throw ConfigError("unknown config key '" + key + "'");
  if (value.empty()) throw ConfigError("config key '" + key + "' has no value");
  values_[key] = value;
}

void Config::apply_override(const std::string& kv) {
  const auto eq = kv.find('=');
  if (eq == std::string::npos)
    throw ConfigError("override '" + kv + "' is not key=value");
  set(kv.substr(0, eq), trim(kv.substr(eq + 1)));
}

bool Config::has(const std::string& key) const { return values_.count(key) > 0; }

const std::string& Config::get(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("missing config key '" + key + "'");
  return it->second;
}

std::string Config::canonical() const {
  std::string out;
  for (const auto& [k, v] : values_)
    if (k != "out_dir") out += k + "=" + v + "\n";
  return out;
}

std::string Config::hash() const {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : canonical()) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

double parse_length(const std::string& text, double l_min) {
  std::string s = trim(text);
  double mult = 1.0;
  const auto pos = s.find("Lmin");
  if (pos != std::string::npos) {
    if (trim(s.substr(pos + 4)) != "") throw ConfigError("bad length '" + text + "'");
    s = trim(s.substr(0, pos));
    if (!s.empty() && s.back() == '*') s = trim(s.substr(0, s.size() - 1));
    mult = l_min;
    if (s.empty()) return l_min;
  }
  try {
    std::size_t p = 0;
    const double v = std::stod(s, &p);
    if (p != s.size()) throw std::invalid_argument(s);
    return v * mult;
  } catch (const std::exception&) {
    throw ConfigError("bad length '" + text + "'");
  }
}

double RunConfig::theta_w() const {
  return theta_w_degrees * std::numbers::pi / 180.0;
}

BluntBody RunConfig::make_body() const {
  if (body == "wedge") return wedge_body(theta_w(), 0.5 * h0 / std::tan(theta_w()));
  return default_body(theta_w(), h0);
}

RunConfig make_run_config(const Config& c) {
  RunConfig r;
  r.gas.gamma = to_double(c, "gamma", 2.0);
  require(r.gas.gamma > 1.0, "gamma", "must be > 1");
  r.gas.b0_bernoulli = to_double(c, "B0", 1.0);
  require(r.gas.b0_bernoulli > 0.0, "B0", "must be > 0");
  r.fb.polar.eps_guard = to_double(c, "eps_guard", 0.25);
  require(r.fb.polar.eps_guard > 0.0 && r.fb.polar.eps_guard < 1.0, "eps_guard",
          "must lie in (0, 1)");
  r.eps = to_double(c, "eps", 0.05);
  require(r.eps > 0.0 && r.eps <= r.fb.polar.eps_guard, "eps",
          "must lie in (0, eps_guard]");
  r.theta_w_degrees = to_double(c, "theta_w_degrees", 30.0);
  require(r.theta_w_degrees > 0.0 && r.theta_w_degrees < 90.0,
          "theta_w_degrees", "must lie in (0, 90)");
  r.h0 = to_double(c, "h0", 1.0);
  require(r.h0 > 0.0, "h0", "must be > 0");
  r.d0 = to_double(c, "d0", 1.0);
  require(r.d0 > 0.0, "d0", "must be > 0");
  if (c.has("body")) r.body = c.get("body");
  require(r.body == "smoothstep" || r.body == "wedge", "body",
          "must be smoothstep or wedge");
  r.fb.ns = to_int(c, "n_s", 64);
  r.fb.nt = to_int(c, "n_t", 128);
  require(r.fb.ns >= 8, "n_s", "must be >= 8");
  require(r.fb.nt >= 8, "n_t", "must be >= 8");
  r.fb.grading = to_double(c, "grading", 3.0);
  require(r.fb.grading >= 0.0 && r.fb.grading <= 12.0, "grading",
          "must lie in [0, 12]");
  r.fb.damping = to_double(c, "damping", 0.5);
  require(r.fb.damping > 0.0 && r.fb.damping <= 1.0, "damping", "must lie in (0, 1]");
  r.fb.inner.omega = to_double(c, "omega", 0.7);
  require(r.fb.inner.omega > 0.0 && r.fb.inner.omega <= 1.0, "omega",
          "must lie in (0, 1]");
  r.fb.tol_f = to_double(c, "tol_f", 1e-10);
  require(r.fb.tol_f > 0.0, "tol_f", "must be > 0");
  r.fb.inner.tol_psi = to_double(c, "tol_psi", 1e-9);
  require(r.fb.inner.tol_psi > 0.0, "tol_psi", "must be > 0");
  r.fb.inner.tol_pde = to_double(c, "tol_pde", 1e-6);
  require(r.fb.inner.tol_pde > 0.0, "tol_pde", "must be > 0");
  r.fb.max_outer = to_int(c, "max_outer", 200);
  require(r.fb.max_outer >= 1, "max_outer", "must be >= 1");
  r.fb.inner.max_iters = to_int(c, "max_picard", 200);
  require(r.fb.inner.max_iters >= 1, "max_picard", "must be >= 1");
  r.fb.inner.ellipticity = to_double(c, "ellipticity", 1e-2);
  require(r.fb.inner.ellipticity >= 0.0 && r.fb.inner.ellipticity < 1.0,
          "ellipticity", "must lie in [0, 1)");
  const std::string seed = c.has("seed_profile") ? c.get("seed_profile") : "blend";
  require(seed == "blend" || seed == "background", "seed_profile",
          "must be blend or background");
  r.fb.seed = seed == "blend" ? SeedProfile::Blend : SeedProfile::Background;
  r.polar_samples = to_int(c, "polar_samples", 129);
  require(r.polar_samples >= 16, "polar_samples", "must be >= 16");
  r.fb.m1 = to_double(c, "M1", 0.0);
  r.fb.m2 = to_double(c, "M2", 0.0);
  require(r.fb.m1 >= 0.0, "M1", "must be >= 0");
  require(r.fb.m2 >= 0.0, "M2", "must be >= 0");
  r.fb.norm_beta = to_double(c, "norm_beta", 0.5);
  r.fb.norm_alpha = to_double(c, "norm_alpha", 0.5);
  require(r.fb.norm_beta > 0.0 && r.fb.norm_beta < 1.0, "norm_beta",
          "must lie in (0, 1)");
  require(r.fb.norm_alpha > 0.0 && r.fb.norm_alpha < 1.0, "norm_alpha",
          "must lie in (0, 1)");
  if (c.has("out_dir")) r.out_dir = c.get("out_dir");

  const BluntBody body = r.make_body();
  const double lmin = min_cutoff_height(body, r.d0);
  r.L = parse_length(c.has("L") ? c.get("L") : "4Lmin", lmin);
  require(r.L >= lmin, "L", "must be >= the minimum cutoff height " +
                                std::to_string(lmin));
  if (c.has("L_list")) {
    for (const auto& item : split_list(c.get("L_list"))) {
      const double v = parse_length(item, lmin);
      require(v >= lmin, "L_list", "entries must be >= the minimum cutoff height");
      require(r.L_list.empty() || v > r.L_list.back(), "L_list",
              "must be increasing");
      r.L_list.push_back(v);
    }
  }
  if (c.has("eps_list")) {
    for (const auto& item : split_list(c.get("eps_list"))) {
      double v;
      try {
        v = std::stod(item);
      } catch (const std::exception&) {
        throw ConfigError("config key 'eps_list': bad entry '" + item + "'");
      }
      require(v > 0.0 && v <= r.fb.polar.eps_guard, "eps_list",
              "entries must lie in (0, eps_guard]");
      r.eps_list.push_back(v);
    }
  }
  r.hash = c.hash();
  return r;
}

}  // namespace detshock
