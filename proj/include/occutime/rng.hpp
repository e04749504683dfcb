#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace occutime {

// Stream tags keep draws for different purposes in disjoint counter ranges.
enum class StreamTag : std::uint16_t {
  kPath = 0,
  kLimit = 1,
  kProbe = 2,
};

struct StreamKey {
  std::uint64_t master_seed = 0;
  std::uint64_t path_index = 0;
  StreamTag tag = StreamTag::kPath;
  // Secondary index for repeated auxiliary draws on the same path.
  std::uint16_t replica = 0;
};

// Philox4x32-10 block function. Pure; exposed for tests.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

// Counter-based random stream. Every (master_seed, path_index, tag, replica)
// addresses its own counter range, so streams never overlap and a path can
// be regenerated without touching any other path.
//
// Satisfies UniformRandomBitGenerator.
class RandomStream {
 public:
  using result_type = std::uint32_t;

  explicit RandomStream(const StreamKey& key);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()();

  // Uniform on the open interval (0, 1), 53 bits of resolution.
  double uniform();
  double standard_normal();

 private:
  void refill();

  std::array<std::uint32_t, 2> key_{};
  std::uint32_t tag_word_ = 0;
  std::uint32_t path_lo_ = 0;
  std::uint32_t path_hi_ = 0;
  std::uint32_t block_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int buffer_pos_ = 4;
  bool has_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

}  // namespace occutime
