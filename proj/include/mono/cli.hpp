#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mono::cli {

inline constexpr const char* kVersion = "0.1.0";
/// Output directory used when --out is not given.
inline constexpr const char* kOutDirEnv = "MONO_OUT_DIR";

/// Runs one subcommand; args exclude the program name.
/// Returns 0 on success, 1 on usage errors, 2 on data errors.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// FNV-1a 64-bit digest of a file's bytes as 16 hex digits. Throws Io.
std::string file_digest(const std::string& path);

}  // namespace mono::cli
