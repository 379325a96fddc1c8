#pragma once

#include <cstdint>
#include <string>

namespace sirspline::cli {

// Entry point shared by the executable and the tests. Returns the process
// exit status; usage errors print to stderr.
int run(int argc, const char* const* argv);

// 64-bit FNV-1a of a file's bytes (0 when the file cannot be read).
std::uint64_t fnv1a_file(const std::string& path);

}  // namespace sirspline::cli
