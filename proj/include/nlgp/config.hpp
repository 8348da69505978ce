#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "nlgp/error.hpp"

namespace nlgp::config {

enum class ValueType { real, integer, boolean, text, real_list };

struct KeySpec {
  std::string key;
  ValueType type;
  std::string default_value;
  std::string help;
};

inline const std::vector<KeySpec>& schema()
{
  static const std::vector<KeySpec> keys = {
      {"run.seed", ValueType::integer, "1", "seed of the perturbation profile"},
      {"run.threads", ValueType::integer, "1", "worker threads for independent sweep points"},
      {"run.output_dir", ValueType::text, "nlgp-out", "directory receiving all artifacts"},
      {"run.log_level", ValueType::text, "info", "quiet | info | debug"},

      {"solution.B", ValueType::real, "1", "offset size B >= max(-A, 0)"},
      {"solution.V0", ValueType::real, "-0.01", "potential height in V0 sin^2(kx)"},
      {"solution.k", ValueType::real, "1", "wavenumber k > 0"},
      {"solution.alpha", ValueType::integer, "1", "interaction sign, +1 or -1"},

      {"kernel.name", ValueType::text, "gaussian-normalized",
       "gaussian-normalized | gaussian-raw | algebraic:p | custom:path | local"},
      {"kernel.epsilon", ValueType::real, "0.01", "nonlocality parameter eps >= 0"},

      {"grid.period", ValueType::real, "25.132741228718345", "domain length (default 8 pi)"},
      {"grid.modes", ValueType::integer, "128", "grid points = Fourier modes, even"},

      {"evolution.horizon", ValueType::real, "30", "final time"},
      {"evolution.record_every", ValueType::real, "0.1", "snapshot interval"},
      {"evolution.stepper", ValueType::text, "rk45", "rk45 (adaptive Dormand-Prince) | rk4 (fixed)"},
      {"evolution.rtol", ValueType::real, "1e-10", "relative tolerance of rk45"},
      {"evolution.atol", ValueType::real, "1e-10", "absolute tolerance of rk45"},
      {"evolution.dt", ValueType::real, "0.001", "time step of rk4"},
      {"evolution.filter", ValueType::text, "per-rhs", "per-rhs | off"},
      {"evolution.filter_alpha", ValueType::real, "-36.04365338911715", "filter strength, < 0"},
      {"evolution.filter_gamma", ValueType::integer, "4", "filter order, > 0"},
      {"evolution.integrating_factor", ValueType::boolean, "false",
       "integrate the linear part exactly"},
      {"evolution.write_states", ValueType::boolean, "true", "write trajectory.csv"},

      {"perturbation.nu", ValueType::real, "0.01", "perturbation amplitude"},
      {"perturbation.mode_cutoff", ValueType::integer, "16", "largest Fourier mode of m(x)"},

      {"spectrum.n_periods", ValueType::integer, "4", "Bloch samples mu = r/n"},
      {"spectrum.truncation", ValueType::integer, "64", "Fourier modes -M..M, M >= 8"},
      {"spectrum.expect", ValueType::text, "any", "any | stable | unstable (exit 1 on mismatch)"},

      {"aes.epsilons", ValueType::real_list, "0.1,0.05,0.025,0.0125", "decreasing eps values"},
      {"aes.horizon", ValueType::real, "5", "sweep horizon"},
      {"aes.record_every", ValueType::real, "0.05", "sampling interval of the sup-in-time error"},
      {"aes.min_order", ValueType::real, "0.8", "smallest accepted empirical order (exit 1 below)"},

      {"figures.kernel", ValueType::text, "gaussian-raw", "kernel for the figure regimes"},
      {"figures.nu", ValueType::real, "nan", "override the regime amplitude (nan keeps it)"},

      {"validate.set", ValueType::text, "H", "H | Hprime"},

      {"map.B_values", ValueType::real_list, "0.01,0.1,0.5,1,1.5,2", "offset grid"},
      {"map.V0_values", ValueType::real_list, "-3,-2.46,-1,-0.5,-0.1,0", "potential grid"},
      {"map.truncation", ValueType::integer, "32", "Fourier truncation per map point"},
      {"map.n_periods", ValueType::integer, "4", "Bloch samples per map point"},
  };
  return keys;
}

inline const KeySpec* find_key(std::string_view key)
{
  for (const auto& k : schema())
    if (k.key == key)
      return &k;
  return nullptr;
}

inline std::string trim(std::string_view s)
{
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos)
    return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline std::string format_real(double v)
{
  if (std::isnan(v))
    return "nan";
  if (std::isinf(v))
    return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

inline double parse_real(const std::string& key, const std::string& text)
{
  if (text == "nan")
    return std::nan("");
  double v = 0.0;
  const char* end = text.data() + text.size();
  const auto r = std::from_chars(text.data(), end, v);
  if (r.ec != std::errc() || r.ptr != end)
    throw error(errc::config, key + ": '" + text + "' is not a number");
  return v;
}

inline std::vector<std::string> split(const std::string& text, char sep)
{
  std::vector<std::string> out;
  std::string item;
  std::istringstream ss(text);
  while (std::getline(ss, item, sep))
    out.push_back(trim(item));
  return out;
}

// canonical spelling, so that an echoed config parses to identical values
inline std::string canonical(const KeySpec& spec, const std::string& raw)
{
  switch (spec.type) {
  case ValueType::real: return format_real(parse_real(spec.key, raw));
  case ValueType::integer: {
    long long v = 0;
    const char* end = raw.data() + raw.size();
    const auto r = std::from_chars(raw.data(), end, v);
    if (r.ec != std::errc() || r.ptr != end)
      throw error(errc::config, spec.key + ": '" + raw + "' is not an integer");
    return std::to_string(v);
  }
  case ValueType::boolean:
    if (raw == "true" || raw == "1" || raw == "yes")
      return "true";
    if (raw == "false" || raw == "0" || raw == "no")
      return "false";
    throw error(errc::config, spec.key + ": '" + raw + "' is not a boolean");
  case ValueType::real_list: {
    std::string out;
    for (const auto& item : split(raw, ',')) {
      if (item.empty())
        throw error(errc::config, spec.key + ": empty list entry");
      if (!out.empty())
        out += ',';
      out += format_real(parse_real(spec.key, item));
    }
    if (out.empty())
      throw error(errc::config, spec.key + ": list is empty");
    return out;
  }
  case ValueType::text: return raw;
  }
  return raw;
}

class RunConfig {
public:
  RunConfig()
  {
    for (const auto& k : schema())
      values_[k.key] = canonical(k, k.default_value);
  }

  // "key = value" lines, '#' comments, optional [section] prefixes
  void merge(std::istream& in, const std::string& origin = "config")
  {
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (auto hash = line.find('#'); hash != std::string::npos)
        line.erase(hash);
      const std::string t = trim(line);
      if (t.empty())
        continue;
      if (t.front() == '[' && t.back() == ']') {
        section = trim(std::string_view(t).substr(1, t.size() - 2));
        continue;
      }
      const auto eq = t.find('=');
      if (eq == std::string::npos)
        throw error(errc::config, origin + ":" + std::to_string(lineno) + ": expected key = value");
      std::string key = trim(std::string_view(t).substr(0, eq));
      if (!section.empty())
        key = section + "." + key;
      set(key, trim(std::string_view(t).substr(eq + 1)), origin + ":" + std::to_string(lineno));
    }
  }

  void merge_file(const std::filesystem::path& path)
  {
    std::ifstream in(path);
    if (!in)
      throw error(errc::config, "cannot read config file " + path.string());
    merge(in, path.string());
  }

  void set(const std::string& key, const std::string& value, const std::string& where = "override")
  {
    const KeySpec* spec = find_key(key);
    if (!spec)
      throw error(errc::config, where + ": unknown key '" + key + "'");
    values_[key] = canonical(*spec, value);
  }

  const std::string& text(const std::string& key) const
  {
    const auto it = values_.find(key);
    if (it == values_.end())
      throw error(errc::config, "unknown key '" + key + "'");
    return it->second;
  }
  double real(const std::string& key) const { return parse_real(key, text(key)); }
  long long integer(const std::string& key) const { return std::stoll(text(key)); }
  bool boolean(const std::string& key) const { return text(key) == "true"; }
  std::vector<double> reals(const std::string& key) const
  {
    std::vector<double> v;
    for (const auto& item : split(text(key), ','))
      v.push_back(parse_real(key, item));
    return v;
  }

  std::string echo() const
  {
    std::ostringstream os;
    std::string section;
    for (const auto& k : schema()) {
      const std::string head = k.key.substr(0, k.key.find('.'));
      if (head != section) {
        os << (section.empty() ? "" : "\n") << "# " << head << '\n';
        section = head;
      }
      os << k.key << " = " << values_.at(k.key) << '\n';
    }
    return os.str();
  }

private:
  std::map<std::string, std::string> values_;
};

inline std::string keys_help()
{
  std::ostringstream os;
  os << "Config keys (key = value, '#' comments):\n";
  for (const auto& k : schema())
    os << "  " << k.key << " [" << k.default_value << "]  " << k.help << '\n';
  return os.str();
}

} // namespace nlgp::config
