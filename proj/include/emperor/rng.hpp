#pragma once

#include <cstdint>
#include <random>

namespace emperor {

/// Derives an independent substream seed from a base seed and a stream index
/// (SplitMix64 finalizer over seed xor golden-ratio multiples). Substreams for
/// distinct indices are decorrelated, so work items keyed by index produce the
/// same draws regardless of evaluation order or parallel schedule.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

/// Deterministic, portable random generator.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the
/// standard. Uniform doubles are built from the top 53 bits of the raw output
/// and normals via the Box-Muller transform, so the stream depends only on the
/// seed and the sequence of calls, never on implementation-defined
/// distribution internals.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1), 53-bit resolution.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  /// Standard normal. Box-Muller pairs; the second variate of each pair is
  /// cached and returned by the next call.
  double normal();

  /// Uniform integer in [0, n). Rejection sampling, no modulo bias.
  std::uint64_t uniform_index(std::uint64_t n);

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace emperor
