#pragma once

#include <catch2/catch_amalgamated.hpp>

#include <string>

#include "regmine/errors.hpp"

// Matcher for CHECK_THROWS_MATCHES: asserts on the error code, not the text.
struct ErrorCodeIs : Catch::Matchers::MatcherGenericBase {
  explicit ErrorCodeIs(regmine::Errc expected) : expected_(expected) {}

  bool match(const regmine::Error& err) const { return err.code() == expected_; }

  std::string describe() const override {
    return std::string("has error code ") + regmine::errc_name(expected_);
  }

 private:
  regmine::Errc expected_;
};
