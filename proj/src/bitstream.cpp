#include "lqgcodec/bitstream.hpp"

#include <bit>

#include "lqgcodec/errors.hpp"

namespace lqgcodec {

void BitWriter::push(bool bit) {
  const std::size_t byte = nbits_ >> 3;
  if (byte == buf_.size()) buf_.push_back(0);
  if (bit) buf_[byte] |= static_cast<std::uint8_t>(0x80u >> (nbits_ & 7));
  ++nbits_;
}

void BitWriter::append(std::uint64_t bits, int len) {
  for (int i = len - 1; i >= 0; --i) push((bits >> i) & 1u);
}

std::vector<std::uint8_t> BitWriter::bytes() const { return buf_; }

bool BitReader::next() {
  if (pos_ >= *nbits_) throw MalformedStream("bit read past end of stream");
  const bool bit = ((*buf_)[pos_ >> 3] >> (7 - (pos_ & 7))) & 1u;
  ++pos_;
  return bit;
}

std::uint64_t BitReader::take(int len) {
  std::uint64_t v = 0;
  for (int i = 0; i < len; ++i) v = (v << 1) | (next() ? 1u : 0u);
  return v;
}

std::uint64_t zigzag(std::int64_t k) {
  return (static_cast<std::uint64_t>(k) << 1) ^
         static_cast<std::uint64_t>(k >> 63);
}

std::int64_t unzigzag(std::uint64_t u) {
  return static_cast<std::int64_t>(u >> 1) ^
         -static_cast<std::int64_t>(u & 1u);
}

void elias_gamma_append(BitWriter& w, std::uint64_t n) {
  // Gamma codes positive integers; shift the domain up by one. n+1 wraps to
  // 0 exactly for n = 2^64-1 (zigzag of the most negative int64), whose
  // conceptual value 2^64 needs the one 65-bit codeword: 64 zeros, a one,
  // and a zero payload.
  const std::uint64_t m = n + 1;
  if (m == 0) {
    for (int i = 0; i < 64; ++i) w.push(false);
    w.push(true);
    for (int i = 0; i < 64; ++i) w.push(false);
    return;
  }
  const int width = std::bit_width(m);  // bits in m, >= 1
  for (int i = 0; i < width - 1; ++i) w.push(false);
  w.append(m, width);
}

std::uint64_t elias_gamma_read(BitReader& r) {
  int zeros = 0;
  while (!r.next()) {
    if (++zeros > 64) throw MalformedStream("gamma prefix too long");
  }
  if (zeros == 64) {
    // Only the top of the shifted domain reaches 65 bits (m = 2^64).
    std::uint64_t payload = 0;
    for (int i = 0; i < 64; ++i)
      payload = (payload << 1) | (r.next() ? 1u : 0u);
    if (payload != 0) throw MalformedStream("gamma value out of range");
    return ~0ull;
  }
  std::uint64_t m = 1;
  for (int i = 0; i < zeros; ++i) m = (m << 1) | (r.next() ? 1u : 0u);
  return m - 1;
}

}  // namespace lqgcodec
