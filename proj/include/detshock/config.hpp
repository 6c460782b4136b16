#ifndef DETSHOCK_CONFIG_HPP_
#define DETSHOCK_CONFIG_HPP_

#include <map>
#include <string>
#include <vector>

#include "detshock/free_boundary.hpp"
#include "detshock/gas_model.hpp"

namespace detshock {

// Flat key = value text. '#' starts a comment; "include = path" pulls in
// another file (relative to the including file); later keys win.
class Config {
 public:
  static Config load(const std::string& path);
  static Config parse(const std::string& text, const std::string& base_dir = ".");

  void set(const std::string& key, const std::string& value);
  // "key=value"; throws ConfigError when malformed.
  void apply_override(const std::string& kv);
  bool has(const std::string& key) const;
  const std::string& get(const std::string& key) const;
  const std::map<std::string, std::string>& values() const { return values_; }

  // Sorted "key=value" lines (out_dir excluded) and their FNV-1a hash.
  std::string canonical() const;
  std::string hash() const;

 private:
  void parse_into(const std::string& text, const std::string& base_dir,
                  int depth);
  std::map<std::string, std::string> values_;
};

struct RunConfig {
  GasParams gas;
  double eps = 0.05;
  double theta_w_degrees = 30.0;
  double h0 = 1.0;
  double d0 = 1.0;
  double L = 0.0;  // resolved against the minimum cutoff height
  std::vector<double> L_list;
  std::vector<double> eps_list;
  std::string body = "smoothstep";  // or "wedge"
  int polar_samples = 129;
  FreeBoundaryOptions fb;
  std::string out_dir = "out";
  std::string hash;

  double theta_w() const;
  BluntBody make_body() const;
};

// Validates every field; throws ConfigError naming the offending key.
RunConfig make_run_config(const Config& cfg);

// Parses "12.5", "4Lmin" or "4*Lmin".
double parse_length(const std::string& text, double l_min);

}  // namespace detshock

#endif  // DETSHOCK_CONFIG_HPP_
