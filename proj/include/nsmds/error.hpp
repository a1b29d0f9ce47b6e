#pragma once

#include <stdexcept>
#include <string>

namespace nsmds {

/// Caller supplied something that violates an operation's precondition.
class InvalidInput : public std::invalid_argument {
 public:
  explicit InvalidInput(const std::string& what) : std::invalid_argument(what) {}
};

/// Geometry is too degenerate for the requested computation
/// (affinely dependent anchors, coincident circle centers, ...).
class DegenerateConfiguration : public std::runtime_error {
 public:
  explicit DegenerateConfiguration(const std::string& what) : std::runtime_error(what) {}
};

/// A vertex does not have a usable stable anchor triple; callers fall back
/// to nearest-anchor selection.
class NotInterior : public std::runtime_error {
 public:
  explicit NotInterior(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace nsmds
