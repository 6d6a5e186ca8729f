#pragma once

#include <stdexcept>
#include <string>

namespace metaet {

/// Malformed input file (taxonomy, dataset, checkpoint). Messages carry
/// the offending line number where one exists.
class FormatError : public std::runtime_error {
 public:
  explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

/// Inconsistent run configuration, e.g. a semantic schedule without a
/// taxonomy or a plan that violates its own ranges.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace metaet
