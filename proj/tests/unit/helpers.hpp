#pragma once

#include <functional>
#include <optional>

#include "meteor/error.hpp"

// Kind of the meteor::Error thrown by fn, or nullopt if it returned normally.
inline std::optional<meteor::ErrorKind> error_kind(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const meteor::Error& e) {
    return e.kind();
  }
  return std::nullopt;
}
