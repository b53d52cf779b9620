#pragma once

#include <stdexcept>
#include <string>

namespace safs {

// Input data is unusable: unreadable file, bad CSV, degenerate outcome.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// A caller passed an argument outside an operation's contract.
class ArgumentError : public std::invalid_argument {
 public:
  explicit ArgumentError(const std::string& what) : std::invalid_argument(what) {}
};

}  // namespace safs
