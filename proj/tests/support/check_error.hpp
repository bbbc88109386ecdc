#pragma once

#include <doctest.h>

#include "keycast/error.hpp"

// Runs `expr` and requires a KeycastError carrying `expected`.
#define CHECK_KEYCAST_ERROR(expr, expected)                                        \
  do {                                                                             \
    bool keycast_thrown = false;                                                   \
    try {                                                                          \
      (void)(expr);                                                                \
    } catch (const ::keycast::KeycastError& keycast_e) {                           \
      keycast_thrown = true;                                                       \
      CHECK_MESSAGE(keycast_e.code() == (expected), keycast_e.what());             \
    }                                                                              \
    CHECK_MESSAGE(keycast_thrown, "expected " << ::keycast::to_string(expected));  \
  } while (false)
