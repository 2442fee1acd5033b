#pragma once

#include "pqtopk/core.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace pqtopk::cli {

/// Stable process exit codes.
enum ExitCode : int { kSuccess = 0, kUserError = 1, kInternalError = 2 };

/// Runs the command line with argv[0] as the program name. Output goes to out/err
/// so tests can drive the CLI in-process.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Count with optional scientific notation ("1000", "1e6", "2.5e3").
std::uint64_t parse_count(std::string_view text);

/// Byte size with optional K/M/G/T suffix, powers of 1024 ("8G", "512M", "1073741824").
std::uint64_t parse_bytes(std::string_view text);

/// Comma-separated list of counts.
std::vector<std::uint64_t> parse_count_list(std::string_view text);

/// One ranked line as printed by `score`: "rank item_id score", rank starting at 1.
std::string format_ranked_line(std::size_t rank, const ScoredItem& item);

} // namespace pqtopk::cli
