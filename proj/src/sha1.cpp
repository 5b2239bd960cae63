#include "ddfl/sha1.hpp"

#include <array>
#include <cstdint>
#include <cstring>

namespace ddfl {

namespace {

inline std::uint32_t rol(std::uint32_t x, int n) {
  return (x << n) | (x >> (32 - n));
}

struct Sha1State {
  std::array<std::uint32_t, 5> h{0x67452301u, 0xEFCDAB89u, 0x98BADCFEu,
                                 0x10325476u, 0xC3D2E1F0u};
  std::uint64_t total_bits = 0;
  std::array<unsigned char, 64> block{};
  std::size_t fill = 0;

  void process(const unsigned char* p) {
    std::uint32_t w[80];
    for (int i = 0; i < 16; ++i)
      w[i] = (std::uint32_t(p[4 * i]) << 24) |
             (std::uint32_t(p[4 * i + 1]) << 16) |
             (std::uint32_t(p[4 * i + 2]) << 8) | std::uint32_t(p[4 * i + 3]);
    for (int i = 16; i < 80; ++i)
      w[i] = rol(w[i - 3] ^ w[i - 8] ^ w[i - 14] ^ w[i - 16], 1);

    std::uint32_t a = h[0], b = h[1], c = h[2], d = h[3], e = h[4];
    for (int i = 0; i < 80; ++i) {
      std::uint32_t f, k;
      if (i < 20) {
        f = (b & c) | (~b & d);
        k = 0x5A827999u;
      } else if (i < 40) {
        f = b ^ c ^ d;
        k = 0x6ED9EBA1u;
      } else if (i < 60) {
        f = (b & c) | (b & d) | (c & d);
        k = 0x8F1BBCDCu;
      } else {
        f = b ^ c ^ d;
        k = 0xCA62C1D6u;
      }
      const std::uint32_t tmp = rol(a, 5) + f + e + k + w[i];
      e = d;
      d = c;
      c = rol(b, 30);
      b = a;
      a = tmp;
    }
    h[0] += a;
    h[1] += b;
    h[2] += c;
    h[3] += d;
    h[4] += e;
  }

  void update(const unsigned char* data, std::size_t len) {
    total_bits += std::uint64_t(len) * 8;
    while (len > 0) {
      const std::size_t take = std::min(len, block.size() - fill);
      std::memcpy(block.data() + fill, data, take);
      fill += take;
      data += take;
      len -= take;
      if (fill == block.size()) {
        process(block.data());
        fill = 0;
      }
    }
  }

  std::string finish() {
    const std::uint64_t bits = total_bits;
    const unsigned char pad = 0x80;
    update(&pad, 1);
    const unsigned char zero = 0x00;
    while (fill != 56) update(&zero, 1);
    unsigned char len_be[8];
    for (int i = 0; i < 8; ++i)
      len_be[i] = static_cast<unsigned char>(bits >> (56 - 8 * i));
    // update() would double-count the length bytes into total_bits, which no
    // longer matters: consume them directly.
    std::memcpy(block.data() + fill, len_be, 8);
    process(block.data());

    static const char* hex = "0123456789abcdef";
    std::string out(40, '0');
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 4; ++j) {
        const unsigned byte = (h[i] >> (24 - 8 * j)) & 0xFFu;
        out[8 * i + 2 * j] = hex[byte >> 4];
        out[8 * i + 2 * j + 1] = hex[byte & 0xF];
      }
    return out;
  }
};

}  // namespace

std::string sha1_hex(std::string_view data) {
  Sha1State s;
  s.update(reinterpret_cast<const unsigned char*>(data.data()), data.size());
  return s.finish();
}

std::string git_blob_sha1(std::string_view content) {
  Sha1State s;
  const std::string header = "blob " + std::to_string(content.size());
  s.update(reinterpret_cast<const unsigned char*>(header.data()),
           header.size() + 1);  // include the trailing NUL
  s.update(reinterpret_cast<const unsigned char*>(content.data()),
           content.size());
  return s.finish();
}

}  // namespace ddfl
