#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace lqgcodec {

// Bits are packed big-endian within each byte (first bit written lands in the
// MSB of byte 0). The final byte of a finished stream is zero-padded.

struct Codeword {
  std::uint64_t bits = 0;  // right-aligned, left-padded with zeros
  int len = 0;             // 0..63

  bool operator==(const Codeword&) const = default;
};

class BitWriter {
 public:
  void push(bool bit);
  void append(std::uint64_t bits, int len);  // MSB of the len-bit field first
  void append(const Codeword& w) { append(w.bits, w.len); }

  std::size_t bit_count() const { return nbits_; }
  // Zero-padded byte image of the stream so far.
  std::vector<std::uint8_t> bytes() const;

 private:
  std::vector<std::uint8_t> buf_;
  std::size_t nbits_ = 0;
  friend class BitReader;
};

class BitReader {
 public:
  // Reads directly from a writer's live buffer; cheap lockstep decode.
  explicit BitReader(const BitWriter& w) : buf_(&w.buf_), nbits_(&w.nbits_) {}

  bool next();                       // throws MalformedStream past the end
  std::uint64_t take(int len);       // MSB-first field
  std::size_t consumed() const { return pos_; }
  bool exhausted() const { return pos_ >= *nbits_; }

 private:
  const std::vector<std::uint8_t>* buf_;
  const std::size_t* nbits_;
  std::size_t pos_ = 0;
};

// zigzag: 0,-1,1,-2,2,... -> 0,1,2,3,4,...
std::uint64_t zigzag(std::int64_t k);
std::int64_t unzigzag(std::uint64_t u);

// Elias gamma over n >= 0 (classic gamma of n+1).
void elias_gamma_append(BitWriter& w, std::uint64_t n);
std::uint64_t elias_gamma_read(BitReader& r);

}  // namespace lqgcodec
