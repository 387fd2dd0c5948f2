#pragma once

#include <stdexcept>
#include <string>

namespace mcd {

// Bad parameters, violated preconditions, malformed configs. CLI exit code 2.
class validation_error : public std::runtime_error {
 public:
  explicit validation_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Unreadable or unwritable files. CLI exit code 3.
class io_error : public std::runtime_error {
 public:
  explicit io_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Code construction gave up (retry budget exhausted). CLI exit code 4.
class construction_error : public std::runtime_error {
 public:
  explicit construction_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace mcd
