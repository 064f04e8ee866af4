#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace tocd::cli {

inline constexpr std::string_view kVersion = "1.0.0";

enum ExitCode : int { kOk = 0, kUsage = 1, kDataError = 2, kModelError = 3 };

/// Runs the `tocdetect` command line. `args` excludes the program name.
/// Payloads go to `out` unless --out names a file; diagnostics go to `err` as
/// `tocdetect: error[Code]: message`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Writes through a sibling temp file and renames it into place, so readers
/// never observe a partial file. Throws Error{IoError}.
void write_file_atomic(const std::string& path, std::string_view bytes);

std::string read_file(const std::string& path);

}  // namespace tocd::cli
