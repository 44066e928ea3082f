#include "rh/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "rh/expr.hpp"

namespace rh {

namespace {

std::string format_config_error(int line, const std::string& message) {
  return line > 0 ? "line " + std::to_string(line) + ": " + message : message;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"problem", {"T", "omega", "h", "g"}},
      {"strip", {"a"}},
      {"certify", {"cone", "radii", "threshold_source", "manual_m", "manual_M", "margin"}},
      {"solver", {"nodes", "theta", "tol", "max_iter", "rule", "u0", "divergence_ceiling", "verify_threshold"}},
      {"reference", {"m", "M", "f_bounds"}},
  };
  return keys;
}

double to_double(std::string_view s) {
  s = trim(s);
  double x = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), x);
  if (s.empty() || res.ec != std::errc{} || res.ptr != s.data() + s.size() || !std::isfinite(x))
    throw std::invalid_argument("expected a finite decimal number, got '" + std::string(s) + "'");
  return x;
}

int to_int(std::string_view s) {
  s = trim(s);
  int x = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), x);
  if (s.empty() || res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw std::invalid_argument("expected an integer, got '" + std::string(s) + "'");
  return x;
}

std::vector<std::pair<double, std::string>> split_pairs(std::string_view text) {
  std::vector<std::pair<double, std::string>> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    const std::string_view item = trim(text.substr(start, comma == std::string_view::npos ? std::string_view::npos
                                                                                          : comma - start));
    if (item.empty()) throw std::invalid_argument("empty entry in list");
    const std::size_t colon = item.find(':');
    if (colon == std::string_view::npos)
      throw std::invalid_argument("list entry '" + std::string(item) + "' is not of the form rho:value");
    out.emplace_back(to_double(item.substr(0, colon)), std::string(trim(item.substr(colon + 1))));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

struct RawValue {
  std::string text;
  bool quoted{false};
  std::size_t column{0};  // 0-based column where the value text begins
};

void check_expression(const std::string& src, expr::Variables vars, const std::string& key, int line,
                      std::size_t column) {
  try {
    expr::parse(src, vars);
  } catch (const expr::ParseError& e) {
    std::ostringstream os;
    os << key << ": column " << (column + e.offset() + 1) << ": " << e.what();
    throw ConfigError(line, os.str());
  }
}

}  // namespace

ConfigError::ConfigError(int line, const std::string& message)
    : std::runtime_error(format_config_error(line, message)), line_(line), detail_(message) {}

std::vector<RadiusSpec> parse_radii(std::string_view text) {
  std::vector<RadiusSpec> out;
  for (const auto& [rho, kind] : split_pairs(text)) {
    if (!(rho > 0.0)) throw std::invalid_argument("radius must be positive");
    out.push_back({rho, condition_kind_from_string(kind)});
  }
  return out;
}

StripInterval<double> ProblemConfig::strip() const {
  if (!a) throw ConfigError(0, "missing [strip] a");
  return StripInterval<double>{*a};
}

const std::string& ProblemConfig::h_source() const {
  if (!h) throw ConfigError(0, "missing [problem] h");
  return *h;
}

int ProblemConfig::line_of(const std::string& key) const {
  const auto it = key_lines.find(key);
  return it == key_lines.end() ? 0 : it->second;
}

void ProblemConfig::validate() const {
  try {
    params().validate();
  } catch (const DomainError& e) {
    throw ConfigError(line_of(std::isfinite(T) && T > 0 ? "problem.omega" : "problem.T"), e.what());
  }
  if (a) {
    try {
      validate_strip(params(), StripInterval<double>::make(*a), true);
    } catch (const DomainError& e) {
      throw ConfigError(line_of("strip.a"), e.what());
    }
  }
  if (threshold_source == ThresholdSource::ManualOverride) {
    if (!manual_m || !manual_M)
      throw ConfigError(line_of("certify.threshold_source"), "threshold_source = manual needs manual_m and manual_M");
    if (!(*manual_m > 0.0) || !(*manual_M > 0.0))
      throw ConfigError(line_of("certify.manual_m"), "manual thresholds must be positive");
  }
  if (!(margin >= 0.0)) throw ConfigError(line_of("certify.margin"), "margin must be non-negative");
  if (solver.nodes < 3 || solver.nodes % 2 == 0)
    throw ConfigError(line_of("solver.nodes"), "nodes must be an odd integer >= 3");
  if (!(solver.theta > 0.0 && solver.theta <= 1.0))
    throw ConfigError(line_of("solver.theta"), "theta must lie in (0, 1]");
  if (!(solver.tol > 0.0)) throw ConfigError(line_of("solver.tol"), "tol must be positive");
  if (solver.max_iter < 1) throw ConfigError(line_of("solver.max_iter"), "max_iter must be at least 1");
  if (!(solver.divergence_ceiling > 0.0))
    throw ConfigError(line_of("solver.divergence_ceiling"), "divergence_ceiling must be positive");
  if (!(solver.verify_threshold > 0.0))
    throw ConfigError(line_of("solver.verify_threshold"), "verify_threshold must be positive");
}

ProblemConfig parse_config(std::string_view text) {
  ProblemConfig cfg;
  std::map<std::string, RawValue> raw;
  std::string section;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = text.find('\n', pos);
    const std::string_view full = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;

    const std::string_view line = trim(full);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (line[0] == '[') {
      const std::size_t close = line.find(']');
      if (close == std::string_view::npos) throw ConfigError(line_no, "unterminated section header");
      section = std::string(trim(line.substr(1, close - 1)));
      if (!known_keys().count(section)) throw ConfigError(line_no, "unknown section [" + section + "]");
      const std::string_view rest = trim(line.substr(close + 1));
      if (!rest.empty() && rest[0] != '#' && rest[0] != ';')
        throw ConfigError(line_no, "unexpected text after section header");
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(line_no, "expected 'key = value'");
    if (section.empty()) throw ConfigError(line_no, "key outside of any section");
    const std::string key(trim(line.substr(0, eq)));
    if (!known_keys().at(section).count(key))
      throw ConfigError(line_no, "unknown key '" + key + "' in section [" + section + "]");

    std::string_view value = line.substr(eq + 1);
    const std::size_t lead = value.find_first_not_of(" \t");
    RawValue rv;
    rv.column = static_cast<std::size_t>(line.data() - full.data()) + eq + 1 +
                (lead == std::string_view::npos ? 0 : lead);
    value = trim(value);
    if (!value.empty() && value[0] == '"') {
      const std::size_t close = value.find('"', 1);
      if (close == std::string_view::npos) throw ConfigError(line_no, "unterminated quoted value for '" + key + "'");
      const std::string_view rest = trim(value.substr(close + 1));
      if (!rest.empty() && rest[0] != '#' && rest[0] != ';')
        throw ConfigError(line_no, "unexpected text after quoted value for '" + key + "'");
      rv.text = std::string(value.substr(1, close - 1));
      rv.quoted = true;
      rv.column += 1;
    } else {
      const std::size_t comment = value.find_first_of("#;");
      rv.text = std::string(trim(value.substr(0, comment)));
    }
    if (rv.text.empty()) throw ConfigError(line_no, "empty value for '" + key + "'");
    const std::string full_key = section + "." + key;
    if (raw.count(full_key)) throw ConfigError(line_no, "duplicate key '" + key + "' in section [" + section + "]");
    raw[full_key] = rv;
    cfg.key_lines[full_key] = line_no;
  }

  for (const auto& [key, rv] : raw) {
    const int ln = cfg.key_lines.at(key);
    try {
      if (key == "problem.T") cfg.T = to_double(rv.text);
      else if (key == "problem.omega") cfg.omega = to_double(rv.text);
      else if (key == "problem.h" || key == "problem.g") {
        if (!rv.quoted) throw std::invalid_argument("expression values must be quoted");
        const bool is_h = key == "problem.h";
        check_expression(rv.text, is_h ? expr::Variables::State : expr::Variables::Weight, key, ln, rv.column);
        if (is_h) cfg.h = rv.text;
        else cfg.g = rv.text;
      } else if (key == "strip.a") cfg.a = to_double(rv.text);
      else if (key == "certify.cone") cfg.cone = cone_variant_from_string(rv.text);
      else if (key == "certify.radii") cfg.radii = parse_radii(rv.text);
      else if (key == "certify.threshold_source") cfg.threshold_source = threshold_source_from_string(rv.text);
      else if (key == "certify.manual_m") cfg.manual_m = to_double(rv.text);
      else if (key == "certify.manual_M") cfg.manual_M = to_double(rv.text);
      else if (key == "certify.margin") cfg.margin = to_double(rv.text);
      else if (key == "solver.nodes") cfg.solver.nodes = to_int(rv.text);
      else if (key == "solver.theta") cfg.solver.theta = to_double(rv.text);
      else if (key == "solver.tol") cfg.solver.tol = to_double(rv.text);
      else if (key == "solver.max_iter") cfg.solver.max_iter = to_int(rv.text);
      else if (key == "solver.rule") cfg.solver.rule = nystrom_rule_from_string(rv.text);
      else if (key == "solver.u0") cfg.solver.u0 = to_double(rv.text);
      else if (key == "solver.divergence_ceiling") cfg.solver.divergence_ceiling = to_double(rv.text);
      else if (key == "solver.verify_threshold") cfg.solver.verify_threshold = to_double(rv.text);
      else if (key == "reference.m") cfg.reference.m = to_double(rv.text);
      else if (key == "reference.M") cfg.reference.M = to_double(rv.text);
      else if (key == "reference.f_bounds") {
        for (const auto& [rho, value] : split_pairs(rv.text)) cfg.reference.f_bounds.emplace_back(rho, to_double(value));
      }
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw ConfigError(ln, key + ": " + e.what());
    }
  }
  if (!raw.count("problem.T")) throw ConfigError(0, "missing [problem] T");
  if (!raw.count("problem.omega")) throw ConfigError(0, "missing [problem] omega");
  cfg.validate();
  return cfg;
}

ProblemConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(0, "cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace rh
