#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace semdrift {

// Error taxonomy. Anything derived from Error aborts the current unit of work
// (a pipeline cell, a CLI command); record-level problems are counted instead.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// 64-bit FNV-1a over raw bytes. Stable across platforms; used for sentence
// keys in embedding files and for output fingerprints.
constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

constexpr std::uint64_t fnv1a64(std::string_view bytes,
                                std::uint64_t h = kFnvOffset) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= kFnvPrime;
  }
  return h;
}

// Feeds the 8 little-endian bytes of v into an FNV-1a state.
constexpr std::uint64_t fnv1a64_u64(std::uint64_t v, std::uint64_t h) {
  for (int i = 0; i < 8; ++i) {
    h ^= (v >> (8 * i)) & 0xffU;
    h *= kFnvPrime;
  }
  return h;
}

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Sub-seed for one (stream, a, b) draw. Bytes hashed: master seed, a, b as
// little-endian 64-bit integers (two's complement for negatives), then mixed.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::int64_t a,
                                    std::int64_t b) {
  std::uint64_t h = fnv1a64_u64(master, kFnvOffset);
  h = fnv1a64_u64(static_cast<std::uint64_t>(a), h);
  h = fnv1a64_u64(static_cast<std::uint64_t>(b), h);
  return mix64(h);
}

std::string to_hex64(std::uint64_t v);
// Throws FormatError unless s is 1-16 hex digits.
std::uint64_t parse_hex64(std::string_view s);

}  // namespace semdrift
