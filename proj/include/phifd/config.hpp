#pragma once

/// Run configuration and a reader for the flat TOML subset it is stored in:
/// `key = value` lines, `[table]` headers, `#` comments; values are strings,
/// integers, reals, booleans or one-line arrays of those.

#include <cctype>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "phifd/assembly.hpp"
#include "phifd/errors.hpp"

namespace phifd {

using TomlScalar = std::variant<std::string, long long, double, bool>;
using TomlValue = std::variant<TomlScalar, std::vector<TomlScalar>>;
/// Keys are dotted: `[multigrid]` + `n0 = 1` gives "multigrid.n0".
using TomlTable = std::map<std::string, TomlValue>;

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

/// Drops a trailing comment that is not inside a string.
inline std::string strip_comment(const std::string& s) {
  bool quoted = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"' && (i == 0 || s[i - 1] != '\\')) quoted = !quoted;
    if (s[i] == '#' && !quoted) return s.substr(0, i);
  }
  return s;
}

inline TomlScalar parse_scalar(const std::string& raw, int line) {
  const std::string t = trim(raw);
  auto fail = [&](const std::string& what) -> ConfigError {
    return ConfigError("config line " + std::to_string(line) + ": " + what);
  };
  if (t.empty()) throw fail("missing value");
  if (t.front() == '"') {
    if (t.size() < 2 || t.back() != '"') throw fail("unterminated string");
    std::string out;
    for (std::size_t i = 1; i + 1 < t.size(); ++i) {
      if (t[i] == '\\' && i + 2 < t.size()) {
        const char c = t[++i];
        out += c == 'n' ? '\n' : c == 't' ? '\t' : c;
      } else {
        out += t[i];
      }
    }
    return out;
  }
  if (t == "true") return true;
  if (t == "false") return false;
  std::string digits;
  for (char c : t)
    if (c != '_') digits += c;
  const char* first = digits.data();
  const char* last = first + digits.size();
  if (*first == '+') ++first;
  const bool real = digits.find_first_of(".eE") != std::string::npos ||
                    digits == "inf" || digits == "nan";
  if (!real) {
    long long v = 0;
    const auto [p, ec] = std::from_chars(first, last, v);
    if (ec == std::errc() && p == last) return v;
  } else {
    double v = 0.0;
    const auto [p, ec] = std::from_chars(first, last, v);
    if (ec == std::errc() && p == last) return v;
  }
  throw fail("cannot parse value '" + t + "'");
}

inline std::vector<std::string> split_array(const std::string& inner) {
  std::vector<std::string> parts;
  std::string cur;
  bool quoted = false;
  for (char c : inner) {
    if (c == '"') quoted = !quoted;
    if (c == ',' && !quoted) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!trim(cur).empty()) parts.push_back(cur);
  return parts;
}

} // namespace detail

inline TomlTable parse_toml(std::istream& in) {
  TomlTable table;
  std::string prefix, line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = detail::trim(detail::strip_comment(line));
    if (t.empty()) continue;
    if (t.front() == '[') {
      if (t.back() != ']' || t.size() < 3)
        throw ConfigError("config line " + std::to_string(lineno) + ": bad table header");
      prefix = detail::trim(t.substr(1, t.size() - 2)) + ".";
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = prefix + detail::trim(t.substr(0, eq));
    const std::string val = detail::trim(t.substr(eq + 1));
    if (table.count(key))
      throw ConfigError("config line " + std::to_string(lineno) + ": duplicate key " + key);
    if (!val.empty() && val.front() == '[') {
      if (val.back() != ']')
        throw ConfigError("config line " + std::to_string(lineno) + ": unterminated array");
      std::vector<TomlScalar> items;
      for (const auto& part : detail::split_array(val.substr(1, val.size() - 2)))
        items.push_back(detail::parse_scalar(part, lineno));
      table[key] = std::move(items);
    } else {
      table[key] = detail::parse_scalar(val, lineno);
    }
  }
  return table;
}

inline TomlTable parse_toml_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  return parse_toml(in);
}

inline TomlTable parse_toml_string(const std::string& text) {
  std::istringstream in(text);
  return parse_toml(in);
}

enum class SolverKind { Direct, Bicgstab };

inline SolverKind parse_solver(const std::string& s) {
  if (s == "direct") return SolverKind::Direct;
  if (s == "bicgstab") return SolverKind::Bicgstab;
  throw ConfigError("unknown solver '" + s + "' (expected direct or bicgstab)");
}

inline const char* to_string(SolverKind s) {
  return s == SolverKind::Direct ? "direct" : "bicgstab";
}

/// Everything a CLI run needs. Optional fields fall back to scheme defaults.
struct RunConfig {
  std::string case_name = "circle2d";
  Scheme scheme = Scheme::PhiFD;
  int dim = 0; ///< 0: the case's natural dimension
  std::vector<int> n_list{10, 20, 40, 80, 160, 320};
  std::optional<double> gamma;
  std::optional<double> sigma;
  std::vector<double> gamma_list;
  std::vector<double> sigma_list;
  SolverKind solver = SolverKind::Direct;
  double tol = 1e-4;
  int maxiter = 10000;
  bool kappa = false;
  std::uint64_t seed = 12345;
  std::string out;
  std::string vtk;
  int n0 = 100;
  int n_obj = 400;
  bool cold_baseline = false;
  int spline_degree = 2;

  SchemeParams params() const {
    SchemeParams p = default_params(scheme);
    if (gamma) p.gamma = *gamma;
    if (sigma) p.sigma = *sigma;
    return p;
  }

  void validate() const {
    if (n_list.empty()) throw ConfigError("N list is empty");
    for (int n : n_list)
      if (n < 2) throw ConfigError("every N must be at least 2");
    if (dim != 0 && dim != 2 && dim != 3) throw ConfigError("dim must be 2 or 3");
    if (!(tol > 0.0)) throw ConfigError("tol must be positive");
    if (maxiter < 1) throw ConfigError("maxiter must be positive");
    if (spline_degree != 1 && spline_degree != 2) throw ConfigError("spline degree must be 1 or 2");
    if (!gamma_list.empty() && !sigma_list.empty())
      throw ConfigError("give a gamma list or a sigma list, not both");
    params().validate();
  }
};

namespace detail {

template <class T> T scalar_as(const TomlScalar& s, const std::string& key);

template <> inline double scalar_as<double>(const TomlScalar& s, const std::string& key) {
  if (auto p = std::get_if<double>(&s)) return *p;
  if (auto p = std::get_if<long long>(&s)) return static_cast<double>(*p);
  throw ConfigError("config key " + key + " must be a number");
}
template <> inline long long scalar_as<long long>(const TomlScalar& s, const std::string& key) {
  if (auto p = std::get_if<long long>(&s)) return *p;
  throw ConfigError("config key " + key + " must be an integer");
}
template <> inline bool scalar_as<bool>(const TomlScalar& s, const std::string& key) {
  if (auto p = std::get_if<bool>(&s)) return *p;
  throw ConfigError("config key " + key + " must be true or false");
}
template <>
inline std::string scalar_as<std::string>(const TomlScalar& s, const std::string& key) {
  if (auto p = std::get_if<std::string>(&s)) return *p;
  throw ConfigError("config key " + key + " must be a string");
}

template <class T> T get_scalar(const TomlValue& v, const std::string& key) {
  if (auto s = std::get_if<TomlScalar>(&v)) return scalar_as<T>(*s, key);
  throw ConfigError("config key " + key + " must not be an array");
}

template <class T> std::vector<T> get_list(const TomlValue& v, const std::string& key) {
  if (auto s = std::get_if<TomlScalar>(&v)) return {scalar_as<T>(*s, key)};
  std::vector<T> out;
  for (const auto& item : std::get<std::vector<TomlScalar>>(v)) out.push_back(scalar_as<T>(item, key));
  return out;
}

} // namespace detail

/// Applies a parsed document on top of `cfg`. Unknown keys are rejected.
inline void apply_toml(const TomlTable& t, RunConfig& cfg) {
  using detail::get_list;
  using detail::get_scalar;
  for (const auto& [key, v] : t) {
    if (key == "case") cfg.case_name = get_scalar<std::string>(v, key);
    else if (key == "scheme") cfg.scheme = parse_scheme(get_scalar<std::string>(v, key));
    else if (key == "dim") cfg.dim = static_cast<int>(get_scalar<long long>(v, key));
    else if (key == "n") {
      cfg.n_list.clear();
      for (long long n : get_list<long long>(v, key)) cfg.n_list.push_back(static_cast<int>(n));
    } else if (key == "gamma") cfg.gamma = get_scalar<double>(v, key);
    else if (key == "sigma") cfg.sigma = get_scalar<double>(v, key);
    else if (key == "gamma_list") cfg.gamma_list = get_list<double>(v, key);
    else if (key == "sigma_list") cfg.sigma_list = get_list<double>(v, key);
    else if (key == "solver") cfg.solver = parse_solver(get_scalar<std::string>(v, key));
    else if (key == "tol") cfg.tol = get_scalar<double>(v, key);
    else if (key == "maxiter") cfg.maxiter = static_cast<int>(get_scalar<long long>(v, key));
    else if (key == "kappa") cfg.kappa = get_scalar<bool>(v, key);
    else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(get_scalar<long long>(v, key));
    else if (key == "out") cfg.out = get_scalar<std::string>(v, key);
    else if (key == "vtk") cfg.vtk = get_scalar<std::string>(v, key);
    else if (key == "multigrid.n0") cfg.n0 = static_cast<int>(get_scalar<long long>(v, key));
    else if (key == "multigrid.n_obj") cfg.n_obj = static_cast<int>(get_scalar<long long>(v, key));
    else if (key == "multigrid.cold_baseline") cfg.cold_baseline = get_scalar<bool>(v, key);
    else if (key == "multigrid.spline_degree")
      cfg.spline_degree = static_cast<int>(get_scalar<long long>(v, key));
    else throw ConfigError("unknown config key '" + key + "'");
  }
}

} // namespace phifd
