#pragma once

#include <optional>

#include <typelab/core.hpp>

// Code of the typelab::Error thrown by f, or nullopt when nothing is thrown.
template <class F>
std::optional<typelab::ErrorCode> code_of(F&& f) {
  try {
    f();
  } catch (const typelab::Error& e) {
    return e.code();
  }
  return std::nullopt;
}
