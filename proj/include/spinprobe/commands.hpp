#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>

#include <json.hpp>

#include "spinprobe/config.hpp"
#include "spinprobe/csv.hpp"

namespace spinprobe {

inline constexpr std::string_view kToolkitName = "spinprobe";
inline constexpr std::string_view kToolkitVersion = SPINPROBE_VERSION;

[[nodiscard]] std::span<const std::string_view> command_names() noexcept;

struct CommandOutput {
  std::string command;
  Table table;
  nlohmann::json summary;        // null when the table says it all
  std::string block_column;      // gnuplot blank-line grouping, may be empty
  OutputFormat default_format = OutputFormat::csv;
};

/// Runs one of fraction | rates | evolve | steady | sensitivity | profile |
/// scan | maxima | fit | group. Sub-operation errors are rethrown with the
/// command name prefixed. `threads` affects wall time only.
[[nodiscard]] CommandOutput run_command(std::string_view name, const RunConfig& config,
                                        unsigned threads = 0);

/// The deterministic part of an output file.
[[nodiscard]] std::string render_payload(const CommandOutput& out, OutputFormat format);

/// Payload preceded by toolkit, version, command, timestamp, config hash and
/// the resolved config on one line. Text formats carry these as '#' lines;
/// JSON wraps everything in one object.
[[nodiscard]] std::string render_envelope(const CommandOutput& out, const RunConfig& config,
                                          OutputFormat format, std::string_view timestamp);

struct Envelope {
  std::string command;
  OutputFormat format = OutputFormat::csv;
  std::string version;
  std::string created;
  std::string config_hash;
  nlohmann::json config;
  std::string payload;
};

/// Parses a file written by render_envelope. Throws FormatError when the
/// header is incomplete or the config hash does not match the embedded config.
[[nodiscard]] Envelope read_envelope(std::istream& in);

/// FNV-1a of the compact config dump.
[[nodiscard]] std::string config_hash(const nlohmann::json& config);

/// Current UTC time as YYYY-MM-DDTHH:MM:SSZ.
[[nodiscard]] std::string utc_timestamp();

}  // namespace spinprobe
