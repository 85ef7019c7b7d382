#pragma once

#include <optional>

#include "clap/core.hpp"

namespace clap::testing {

// Kind of the clap::Error thrown by f, or nothing if it returns normally.
template <typename F>
std::optional<ErrorKind> error_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  return std::nullopt;
}

}  // namespace clap::testing
