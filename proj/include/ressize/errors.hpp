#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ressize {

/// Invalid user-supplied configuration. Carries a dotted field path when known.
class ConfigError : public std::runtime_error {
public:
  ConfigError(const std::string& path, const std::string& message)
      : std::runtime_error(path.empty() ? message : path + ": " + message), path_(path) {}
  explicit ConfigError(const std::string& message) : ConfigError("", message) {}

  const std::string& path() const noexcept { return path_; }

private:
  std::string path_;
};

/// Malformed or inconsistent input data (CSV series, curve tables).
class DataError : public std::runtime_error {
public:
  DataError(const std::string& source, std::size_t line, const std::string& message)
      : std::runtime_error(format(source, line, message)), line_(line) {}

  std::size_t line() const noexcept { return line_; }

private:
  static std::string format(const std::string& source, std::size_t line, const std::string& message) {
    std::string out = source;
    if (line > 0) out += ":" + std::to_string(line);
    if (!out.empty()) out += ": ";
    return out + message;
  }

  std::size_t line_;
};

}  // namespace ressize
