#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace ebv {

struct SourcePos {
  std::string file;
  int line = 0;  // 1-based; 0 = unknown
  int col = 0;

  std::string str() const {
    if (line == 0) return file.empty() ? std::string("<unknown>") : file;
    return file + ":" + std::to_string(line) + ":" + std::to_string(col);
  }
};

// Fatal user-facing error carrying a source position.  Parsing and checking
// fail fast on the first error; the CLI renders these as "file:line:col: message".
struct CompileError : std::runtime_error {
  SourcePos pos;
  CompileError(SourcePos p, const std::string& msg)
      : std::runtime_error(p.str() + ": " + msg), pos(std::move(p)) {}
};

// Internal invariant violation or API misuse.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// i128 helpers: stream values and interval bounds use __int128 so that
// 64-bit-wide streams and their intermediate products stay representable.
using i128 = __int128;

std::string i128_str(i128 v);
bool i128_add_ok(i128 a, i128 b, i128& out);
bool i128_mul_ok(i128 a, i128 b, i128& out);
i128 i128_parse(const std::string& s);  // throws Error on overflow/garbage

}  // namespace ebv
