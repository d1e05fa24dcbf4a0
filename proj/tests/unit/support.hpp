#pragma once

#include <doctest.h>

#include <random>

#include "hannay/errors.hpp"
#include "hannay/types.hpp"

namespace test {

// Runs `fn` and returns the kind of the hannay::Error it throws.
template <class Fn>
std::optional<hannay::ErrorKind> error_kind(Fn&& fn) {
  try {
    fn();
  } catch (const hannay::Error& e) {
    return e.kind();
  }
  return std::nullopt;
}

template <class Fn>
std::string error_message(Fn&& fn) {
  try {
    fn();
  } catch (const hannay::Error& e) {
    return e.what();
  }
  return {};
}

// Random admissible oscillator parameters: Z in [0.5, 2], omega^2 in [0.25, 4].
inline hannay::ParamPoint random_oscillator_point(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> z(0.5, 2.0), y(-1.0, 1.0), w2(0.25, 4.0);
  const double Z = z(rng), Y = y(rng);
  const double X = (w2(rng) + Y * Y) / Z;
  return {X, Y, Z};
}

}  // namespace test

#define CHECK_ERROR_KIND(expr, k) CHECK(test::error_kind([&] { (void)(expr); }) == (k))
