#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>

namespace subdiff::rng {

// Philox4x32-10 block function (Salmon et al., "Parallel random numbers: as
// easy as 1, 2, 3"). Exposed for the known-answer tests.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key) noexcept;

// Labels used to carve independent substreams out of one master seed.
enum class StreamRole : std::uint64_t {
  kSubordinator = 1,
  kDriver = 2,
  kAuxiliary = 3,
};

// Counter-based random stream. A stream is identified by a 64-bit key plus a
// 64-bit stream id (both hashed from the master seed and a label tuple) and
// produces the Philox output for successive counter values. Two streams with
// different labels are statistically independent; the same labels always
// reproduce the same sequence, regardless of how work is scheduled.
class RandomStream {
 public:
  using result_type = std::uint64_t;

  RandomStream(std::uint64_t seed, std::initializer_list<std::uint64_t> labels);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  result_type operator()() { return next_u64(); }
  std::uint64_t next_u64();

  // Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform();
  // Unit-rate exponential.
  double exponential();
  // Standard normal (Box-Muller; the second variate of each pair is cached).
  double normal();

  std::uint64_t key() const noexcept { return key_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }
  std::uint64_t counter() const noexcept { return counter_; }

  friend bool operator==(const RandomStream& a, const RandomStream& b) noexcept {
    return a.key_ == b.key_ && a.stream_id_ == b.stream_id_;
  }

 private:
  void refill();

  std::uint64_t key_;
  std::uint64_t stream_id_;
  std::uint64_t counter_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int buffered_ = 0;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

}  // namespace subdiff::rng
