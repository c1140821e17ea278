#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tvsaddle::cli {

/// "kind:key=value,key=value" with keys kept in canonical order.
struct KindSpec {
  std::string kind;
  std::map<std::string, std::string> params;

  std::optional<std::string> get(const std::string& key) const;
  friend bool operator==(const KindSpec&, const KindSpec&) = default;
};

struct RunConfig {
  KindSpec problem;
  std::optional<KindSpec> modifier;      // e.g. regularize:eps=0.1
  KindSpec topology;
  std::optional<std::size_t> nodes;      // "M"
  std::optional<double> gamma;           // empty = auto
  std::optional<std::size_t> gossip_steps;  // empty = auto
  double h_auto_eps = 1e-8;              // target for H=auto:eps=..
  std::size_t iterations = 1000;         // "K"
  std::uint64_t seed = 0;
  std::size_t record_every = 1;
  std::string out = ".";

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

struct ConfigError {
  std::size_t line = 0;  // 1-based; 0 for errors not tied to a line
  std::string field;
  std::string message;
};

struct ParseResult {
  std::optional<RunConfig> config;
  std::vector<ConfigError> errors;

  bool ok() const noexcept { return config.has_value(); }
};

/// Parses one key=value per line. '#' starts a comment. Every problem is
/// reported; nothing is silently defaulted when a value is malformed.
ParseResult parse_config(std::string_view text);

/// Applies "key=value" overrides on top of already-parsed text; overrides
/// are reported with line 0 and field set to the key.
ParseResult parse_config(std::string_view text, const std::vector<std::string>& overrides);

/// Canonical text form; parse_config(serialize(c)) reproduces c.
std::string serialize(const RunConfig& cfg);

std::string format_spec(const KindSpec& spec);
std::string format_number(double v);

/// Node count for the run: explicit M, M inside the topology spec, or the
/// default for generated time-varying topologies.
std::optional<std::size_t> resolve_nodes(const RunConfig& cfg);

inline constexpr std::size_t kDefaultTimeVaryingNodes = 5;

}  // namespace tvsaddle::cli
