#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace szbench {

// Base class for everything thrown by the toolkit.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// An operation was called outside its contract (caller bug, not bad data).
class ContractError : public Error {
 public:
  using Error::Error;
};

// Filesystem or OS level failure.
class IoError : public Error {
 public:
  using Error::Error;
};

// Malformed input data. Carries the source and, when known, the byte offset
// (binary formats) or line number (text formats) of the problem.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::string source,
             std::int64_t byte_offset = -1, long line = -1)
      : Error(describe(what, source, byte_offset, line)),
        source_(std::move(source)),
        byte_offset_(byte_offset),
        line_(line) {}

  const std::string& source() const { return source_; }
  std::int64_t byte_offset() const { return byte_offset_; }  // -1 if n/a
  long line() const { return line_; }                        // -1 if n/a

 private:
  static std::string describe(const std::string& what, const std::string& source,
                              std::int64_t byte_offset, long line) {
    std::string s = source.empty() ? what : source + ": " + what;
    if (byte_offset >= 0) s += " (byte offset " + std::to_string(byte_offset) + ")";
    if (line >= 0) s += " (line " + std::to_string(line) + ")";
    return s;
  }

  std::string source_;
  std::int64_t byte_offset_;
  long line_;
};

// A recording cannot be brought to the canonical channel set.
class StandardizeError : public Error {
 public:
  StandardizeError(const std::string& what, std::vector<std::string> missing = {})
      : Error(what), missing_channels_(std::move(missing)) {}

  const std::vector<std::string>& missing_channels() const { return missing_channels_; }

 private:
  std::vector<std::string> missing_channels_;
};

// Dataset indexing failure (duplicate recording identity and the like).
class IndexError : public Error {
 public:
  using Error::Error;
};

}  // namespace szbench
