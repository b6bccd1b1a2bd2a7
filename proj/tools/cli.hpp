#pragma once

#include <string>

#include <json.hpp>

namespace hscale::cli {

// exit codes: 0 success, 1 invariant violation (a checked property failed),
// 2 config error, 3 precondition-certificate failure
inline constexpr int kExitOk = 0;
inline constexpr int kExitInvariant = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitPrecondition = 3;

/// Builds the resolved config for a verb from argv-style arguments.
/// Throws std::invalid_argument on bad input (mapped to exit 2 by main).
nlohmann::ordered_json parse_cli(int argc, const char* const* argv);

/// Runs a fully resolved experiment config. Deterministic: identical config
/// (including seed) produces byte-identical artifacts. Artifacts go to
/// cfg["output"] (stdout when empty; HSCALE_OUTPUT_DIR prefixes bare names).
int run_experiment(const nlohmann::ordered_json& cfg);

/// JSON serialization with doubles at 17 significant digits, stable key
/// order, 2-space indentation.
std::string dump_json17(const nlohmann::ordered_json& j, int indent = 0);

}  // namespace hscale::cli
