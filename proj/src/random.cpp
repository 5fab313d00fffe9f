// SPDX-License-Identifier: Apache-2.0

#include "saloha/random.hpp"

#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_int_distribution.hpp>
#include <boost/random/uniform_real_distribution.hpp>

namespace saloha {

namespace {

// FNV-1a, 32-bit: folds the purpose label into a seed word.
std::uint32_t label_hash(std::string_view label) {
  std::uint32_t h = 2166136261u;
  for (char c : label) {
    h ^= static_cast<std::uint8_t>(c);
    h *= 16777619u;
  }
  return h;
}

std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t node, std::string_view purpose) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(node), static_cast<std::uint32_t>(node >> 32),
                    label_hash(purpose)};
  return std::mt19937_64{seq};
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t node, std::string_view purpose)
    : engine_(make_engine(seed, node, purpose)) {}

double RngStream::uniform(double lo, double hi) {
  return boost::random::uniform_real_distribution<double>{lo, hi}(engine_);
}

std::int64_t RngStream::uniform_int(std::int64_t lo, std::int64_t hi) {
  return boost::random::uniform_int_distribution<std::int64_t>{lo, hi}(engine_);
}

double RngStream::normal(double mean, double stddev) {
  return boost::random::normal_distribution<double>{mean, stddev}(engine_);
}

bool RngStream::coin() { return uniform_int(0, 1) == 1; }

}  // namespace saloha
