#pragma once

#include <gtest/gtest.h>

#include <optional>

#include "shellxy/error.hpp"

// Error code raised by `f`, or nothing.
template <class F>
std::optional<shellxy::ErrorCode> error_code(F&& f) {
  try {
    f();
  } catch (const shellxy::Error& e) {
    return e.code();
  }
  return std::nullopt;
}

#define EXPECT_ERROR(stmt, code_) \
  EXPECT_EQ(error_code([&] { (void)(stmt); }), std::optional<shellxy::ErrorCode>(code_))
