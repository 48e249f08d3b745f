#pragma once
// Config-driven experiments: one JSON config in, one deterministic artifact
// out. Shared by the C API and the `asf` CLI; see README.md for the schema.

#include <string>
#include <vector>

namespace asf {

struct CommandResult {
  std::string command;
  std::string artifact;  // JSON text, independent of worker count and timing
  std::string csv;       // empty for commands without a table
  std::vector<std::string> summary;  // one line per check, then PASS or FAIL
  bool pass = false;
};

const std::vector<std::string>& command_names();
// throws Error (InvalidArgument for an unknown command or malformed config);
// module errors carry the offending q and element
CommandResult run_command(const std::string& command, const std::string& config_json);
// the config re-serialized with sorted keys and the worker count dropped: the cache key input
std::string canonical_config(const std::string& command, const std::string& config_json);

// envelope {command, pass, summary, artifact, csv} and its inverse
std::string result_to_json(const CommandResult& r);
CommandResult result_from_json(const std::string& text);

}  // namespace asf
