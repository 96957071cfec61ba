// Error types, logging and small string helpers shared by every module.

#ifndef XLPARSE_COMMON_H_
#define XLPARSE_COMMON_H_

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace xlparse {

// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad input data: malformed files, inconsistent corpora, violated
// preconditions on data values.
class DataError : public Error {
 public:
  using Error::Error;
};

// A text-format parse failure. The message always names the line.
class ParseError : public DataError {
 public:
  ParseError(std::size_t line, const std::string& what)
      : DataError("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Caller misuse: missing options, contradictory configuration.
class UsageError : public Error {
 public:
  using Error::Error;
};

// Diagnostics go to stderr unless silenced (tests silence them).
void set_log_quiet(bool quiet);
bool log_quiet();
void log_info(const std::string& msg);
void log_warning(const std::string& msg);

// Splits on runs of ASCII whitespace; never returns empty fields.
std::vector<std::string> split_whitespace(std::string_view line);
// Splits on a single delimiter; keeps empty fields.
std::vector<std::string> split(std::string_view line, char delim);
std::string_view trim(std::string_view s);
std::string join(const std::vector<std::string>& parts, std::string_view sep);

// FNV-1a 64. Stable across platforms; used for feature payloads.
std::uint64_t hash_string(std::string_view s);
// Order-dependent combination of two 64-bit hashes.
inline std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t v) {
  v *= 0x9e3779b97f4a7c15ULL;
  v ^= v >> 31;
  seed ^= v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2);
  return seed;
}

}  // namespace xlparse

#endif  // XLPARSE_COMMON_H_
