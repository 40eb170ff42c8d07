#pragma once

#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "photostyle/pipeline.hpp"

namespace photostyle {

/// Config-file key with its command-line flag, e.g. {"match_fraction", "--match-fraction"}.
struct ConfigKey {
  std::string key;
  std::string flag;
};

/// Every PipelineConfig field, in declaration order.
const std::vector<ConfigKey>& config_keys();

/// Sets one field from its textual value. Throws ValidationError for an
/// unknown key or a value of the wrong type.
void set_config_value(PipelineConfig& config, const std::string& key, const std::string& value);

/// Applies flat `key = value` lines; '#' starts a comment line. Throws
/// ParseError (with line number) on malformed lines, unknown or repeated keys.
void apply_config_text(PipelineConfig& config, std::istream& text);

/// Entry point of the photostyle tool. Returns the process exit code:
/// 0 success, 2 usage or configuration error, 1 input or pipeline error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace photostyle
