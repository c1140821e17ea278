#include "tvsaddle/cli/config.hpp"

#include <charconv>
#include <cmath>
#include <functional>
#include <set>
#include <sstream>

namespace tvsaddle::cli {

std::optional<std::string> KindSpec::get(const std::string& key) const {
  if (auto it = params.find(key); it != params.end()) return it->second;
  return std::nullopt;
}

std::string format_number(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return ec == std::errc() ? std::string(buf, ptr) : std::to_string(v);
}

std::string format_spec(const KindSpec& spec) {
  std::string out = spec.kind;
  char sep = ':';
  for (const auto& [k, v] : spec.params) {
    out += sep;
    out += k + "=" + v;
    sep = ',';
  }
  return out;
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::optional<double> to_double(std::string_view s) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::optional<std::uint64_t> to_uint(std::string_view s) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

class Parser {
 public:
  std::vector<ConfigError> errors;

  void error(std::size_t line, std::string field, std::string message) {
    errors.push_back({line, std::move(field), std::move(message)});
  }

  // Parses "kind:k=v,k=v" without validating the kind.
  std::optional<KindSpec> split_spec(std::size_t line, const std::string& field,
                                     std::string_view text) {
    KindSpec spec;
    const auto colon = text.find(':');
    spec.kind = std::string(trim(text.substr(0, colon)));
    if (spec.kind.empty()) {
      error(line, field, "missing kind");
      return std::nullopt;
    }
    if (colon == std::string_view::npos) return spec;
    std::string_view rest = text.substr(colon + 1);
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      const std::string_view item = trim(rest.substr(0, comma));
      rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
      if (item.empty()) continue;
      const auto eq = item.find('=');
      if (eq == std::string_view::npos) {
        error(line, field, "expected key=value, got '" + std::string(item) + "'");
        return std::nullopt;
      }
      const std::string key(trim(item.substr(0, eq)));
      if (!spec.params.emplace(key, std::string(trim(item.substr(eq + 1)))).second) {
        error(line, field + "." + key, "duplicate parameter");
        return std::nullopt;
      }
    }
    return spec;
  }

  struct ParamRule {
    std::string name;
    enum Type { kInt, kReal } type;
    std::optional<std::string> fallback;  // filled in when absent
    std::function<bool(double)> valid;
    const char* range;
  };

  // Checks params against `rules`, normalizes numbers and fills defaults.
  bool apply_rules(std::size_t line, const std::string& field, KindSpec& spec,
                   const std::vector<ParamRule>& rules) {
    bool ok = true;
    std::set<std::string> known;
    for (const auto& rule : rules) {
      known.insert(rule.name);
      auto it = spec.params.find(rule.name);
      if (it == spec.params.end()) {
        if (rule.fallback) spec.params[rule.name] = *rule.fallback;
        continue;
      }
      const std::string where = field + "." + rule.name;
      if (rule.type == ParamRule::kInt) {
        const auto v = to_uint(it->second);
        if (!v || !rule.valid(static_cast<double>(*v))) {
          error(line, where, "'" + it->second + "' out of range (expected " + rule.range + ")");
          ok = false;
        } else {
          it->second = std::to_string(*v);
        }
      } else {
        const auto v = to_double(it->second);
        if (!v || !rule.valid(*v)) {
          error(line, where, "'" + it->second + "' out of range (expected " + rule.range + ")");
          ok = false;
        } else {
          it->second = format_number(*v);
        }
      }
    }
    for (const auto& [k, v] : spec.params) {
      if (!known.count(k)) {
        error(line, field + "." + k, "unknown parameter for '" + spec.kind + "'");
        ok = false;
      }
    }
    return ok;
  }

  static bool positive(double v) { return v > 0.0; }
  static bool any(double) { return true; }

  std::optional<KindSpec> problem(std::size_t line, std::string_view text) {
    auto spec = split_spec(line, "problem", text);
    if (!spec) return std::nullopt;
    std::vector<ParamRule> rules;
    const ParamRule seed{"seed", ParamRule::kInt, std::nullopt, any, "integer >= 0"};
    if (spec->kind == "quadratic") {
      rules = {{"nx", ParamRule::kInt, "2", positive, "integer >= 1"},
               {"ny", ParamRule::kInt, "2", positive, "integer >= 1"},
               {"mu", ParamRule::kReal, "0.1", positive, "> 0"},
               {"L", ParamRule::kReal, "1", positive, "> 0"},
               {"het", ParamRule::kReal, "0.5", [](double v) { return v >= 0 && v <= 1; },
                "[0, 1]"},
               seed};
    } else if (spec->kind == "matrix_game") {
      rules = {{"nx", ParamRule::kInt, "2", positive, "integer >= 1"},
               {"ny", ParamRule::kInt, "2", positive, "integer >= 1"},
               seed};
    } else if (spec->kind == "matching_pennies") {
      rules = {{"het", ParamRule::kReal, "0.5", [](double v) { return v >= 0; }, ">= 0"}, seed};
    } else {
      error(line, "problem", "unknown problem kind '" + spec->kind +
                                 "' (expected quadratic, matrix_game or matching_pennies)");
      return std::nullopt;
    }
    if (!apply_rules(line, "problem", *spec, rules)) return std::nullopt;
    if (spec->kind == "quadratic") {
      const double mu = *to_double(*spec->get("mu"));
      const double l = *to_double(*spec->get("L"));
      if (l < 2.0 * mu) {
        error(line, "problem.L", "L must be at least 2*mu");
        return std::nullopt;
      }
    }
    return spec;
  }

  std::optional<KindSpec> modifier(std::size_t line, std::string_view text) {
    auto spec = split_spec(line, "modifier", text);
    if (!spec) return std::nullopt;
    if (spec->kind != "regularize") {
      error(line, "modifier", "unknown modifier '" + spec->kind + "' (expected regularize)");
      return std::nullopt;
    }
    if (!spec->get("eps")) {
      error(line, "modifier.eps", "regularize requires eps");
      return std::nullopt;
    }
    if (!apply_rules(line, "modifier", *spec,
                     {{"eps", ParamRule::kReal, std::nullopt, positive, "> 0"}}))
      return std::nullopt;
    return spec;
  }

  std::optional<KindSpec> topology(std::size_t line, std::string_view text) {
    auto spec = split_spec(line, "topology", text);
    if (!spec) return std::nullopt;
    const ParamRule nodes{"M", ParamRule::kInt, std::nullopt, [](double v) { return v >= 2; },
                          "integer >= 2"};
    std::vector<ParamRule> rules;
    const std::string& k = spec->kind;
    if (k == "ring" || k == "path" || k == "complete" || k == "star") {
      rules = {nodes};
    } else if (k == "rotating_star") {
      rules = {{"period", ParamRule::kInt, "1", positive, "integer >= 1"}, nodes};
    } else if (k == "random") {
      rules = {{"p", ParamRule::kReal, "0.3", [](double v) { return v > 0 && v <= 1; },
                "(0, 1]"},
               {"seed", ParamRule::kInt, std::nullopt, any, "integer >= 0"},
               nodes};
    } else {
      error(line, "topology", "unknown topology kind '" + k +
                                  "' (expected ring, path, complete, star, rotating_star, "
                                  "random)");
      return std::nullopt;
    }
    if (!apply_rules(line, "topology", *spec, rules)) return std::nullopt;
    return spec;
  }
};

struct Assignment {
  std::size_t line;
  std::string key;
  std::string value;
};

ParseResult parse_assignments(const std::vector<Assignment>& items,
                              std::vector<ConfigError> errors) {
  Parser p;
  p.errors = std::move(errors);
  RunConfig cfg;
  bool have_problem = false, have_topology = false;
  std::size_t topology_line = 0;

  for (const auto& [line, key, value] : items) {
    if (key == "problem") {
      if (auto s = p.problem(line, value)) {
        cfg.problem = *s;
        have_problem = true;
      }
    } else if (key == "modifier") {
      if (value.empty() || value == "none") {
        cfg.modifier.reset();
      } else if (auto s = p.modifier(line, value)) {
        cfg.modifier = *s;
      }
    } else if (key == "topology") {
      if (auto s = p.topology(line, value)) {
        cfg.topology = *s;
        have_topology = true;
        topology_line = line;
      }
    } else if (key == "M") {
      const auto v = to_uint(value);
      if (!v || *v < 2) {
        p.error(line, "M", "'" + value + "' out of range (expected integer >= 2)");
      } else {
        cfg.nodes = static_cast<std::size_t>(*v);
      }
    } else if (key == "gamma") {
      if (value == "auto") {
        cfg.gamma.reset();
      } else if (const auto v = to_double(value); !v || *v <= 0.0) {
        p.error(line, "gamma", "'" + value + "' out of range (expected > 0 or 'auto')");
      } else {
        cfg.gamma = *v;
      }
    } else if (key == "H") {
      if (value.rfind("auto", 0) == 0) {
        cfg.gossip_steps.reset();
        std::string_view rest = std::string_view(value).substr(4);
        if (!rest.empty()) {
          constexpr std::string_view kPrefix = ":eps=";
          const auto eps = rest.rfind(kPrefix, 0) == 0 ? to_double(rest.substr(kPrefix.size()))
                                                        : std::nullopt;
          if (!eps || *eps <= 0.0 || *eps >= 1.0) {
            p.error(line, "H", "expected an integer >= 0 or auto:eps=<value in (0,1)>");
          } else {
            cfg.h_auto_eps = *eps;
          }
        }
      } else if (const auto v = to_uint(value); !v) {
        p.error(line, "H", "'" + value + "' out of range (expected integer >= 0 or auto)");
      } else {
        cfg.gossip_steps = static_cast<std::size_t>(*v);
        cfg.h_auto_eps = RunConfig{}.h_auto_eps;
      }
    } else if (key == "K") {
      const auto v = to_uint(value);
      if (!v || *v < 1) {
        p.error(line, "K", "'" + value + "' out of range (expected integer >= 1)");
      } else {
        cfg.iterations = static_cast<std::size_t>(*v);
      }
    } else if (key == "seed") {
      if (const auto v = to_uint(value)) {
        cfg.seed = *v;
      } else {
        p.error(line, "seed", "'" + value + "' is not a non-negative integer");
      }
    } else if (key == "record_every") {
      const auto v = to_uint(value);
      if (!v || *v < 1) {
        p.error(line, "record_every", "'" + value + "' out of range (expected integer >= 1)");
      } else {
        cfg.record_every = static_cast<std::size_t>(*v);
      }
    } else if (key == "out") {
      if (value.empty()) {
        p.error(line, "out", "empty output path");
      } else {
        cfg.out = value;
      }
    } else {
      p.error(line, key, "unknown key");
    }
  }

  if (!have_problem) p.error(0, "problem", "missing required key");
  if (!have_topology) p.error(0, "topology", "missing required key");
  if (have_topology && !resolve_nodes(cfg)) {
    p.error(topology_line, "M",
            "topology '" + cfg.topology.kind + "' requires the node count M (set M=<n>)");
  }

  ParseResult result;
  result.errors = std::move(p.errors);
  if (result.errors.empty()) result.config = std::move(cfg);
  return result;
}

void split_lines(std::string_view text, std::vector<Assignment>& items,
                 std::vector<ConfigError>& errors) {
  std::set<std::string> seen;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const std::size_t end = nl == std::string_view::npos ? text.size() : nl;
    std::string_view line = text.substr(pos, end - pos);
    ++line_no;
    pos = end + 1;
    if (const auto hash = line.find('#'); hash != std::string_view::npos)
      line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      errors.push_back({line_no, std::string(line), "expected key=value"});
      continue;
    }
    std::string key(trim(line.substr(0, eq)));
    if (!seen.insert(key).second) {
      errors.push_back({line_no, key, "duplicate key"});
      continue;
    }
    items.push_back({line_no, std::move(key), std::string(trim(line.substr(eq + 1)))});
  }
}

}  // namespace

ParseResult parse_config(std::string_view text) { return parse_config(text, {}); }

ParseResult parse_config(std::string_view text, const std::vector<std::string>& overrides) {
  std::vector<Assignment> items;
  std::vector<ConfigError> errors;
  split_lines(text, items, errors);
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos) {
      errors.push_back({0, o, "override must be key=value"});
      continue;
    }
    std::string key(trim(std::string_view(o).substr(0, eq)));
    std::string value(trim(std::string_view(o).substr(eq + 1)));
    // An override replaces the file's assignment for the same key.
    std::erase_if(items, [&](const Assignment& a) { return a.key == key; });
    items.push_back({0, std::move(key), std::move(value)});
  }
  return parse_assignments(items, std::move(errors));
}

std::optional<std::size_t> resolve_nodes(const RunConfig& cfg) {
  if (cfg.nodes) return cfg.nodes;
  if (auto m = cfg.topology.get("M")) return static_cast<std::size_t>(std::stoull(*m));
  if (cfg.topology.kind == "rotating_star" || cfg.topology.kind == "random")
    return kDefaultTimeVaryingNodes;
  return std::nullopt;
}

std::string serialize(const RunConfig& cfg) {
  std::ostringstream out;
  out << "problem=" << format_spec(cfg.problem) << "\n";
  if (cfg.modifier) out << "modifier=" << format_spec(*cfg.modifier) << "\n";
  out << "topology=" << format_spec(cfg.topology) << "\n";
  if (cfg.nodes) out << "M=" << *cfg.nodes << "\n";
  out << "gamma=" << (cfg.gamma ? format_number(*cfg.gamma) : std::string("auto")) << "\n";
  if (cfg.gossip_steps) {
    out << "H=" << *cfg.gossip_steps << "\n";
  } else {
    out << "H=auto:eps=" << format_number(cfg.h_auto_eps) << "\n";
  }
  out << "K=" << cfg.iterations << "\n";
  out << "seed=" << cfg.seed << "\n";
  out << "record_every=" << cfg.record_every << "\n";
  out << "out=" << cfg.out << "\n";
  return out.str();
}

}  // namespace tvsaddle::cli
