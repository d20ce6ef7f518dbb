#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "lqgcodec/bitstream.hpp"
#include "lqgcodec/pmf.hpp"

namespace lqgcodec {

enum class CodeKind {
  kFano,           // midpoint cumulative, len = ceil(-log2 p) + 1, any order
  kShannonSorted,  // plain cumulative on descending probs, len = ceil(-log2 p)
};

// Prefix-free table built from a dyadic (2^-62 fixed point) rounding of a
// FinitePmf. When escape_mass > 0 the escape path is itself a codeword in the
// table construction; unlisted symbols ride escape ++ gamma(zigzag).
class Codebook {
 public:
  static Codebook build(const FinitePmf& pmf, CodeKind kind);

  CodeKind kind() const { return kind_; }
  int size() const { return static_cast<int>(symbols_.size()); }
  const std::vector<std::int64_t>& symbols() const { return symbols_; }
  const std::vector<Codeword>& words() const { return words_; }
  const std::optional<Codeword>& escape_word() const { return escape_word_; }
  int max_len() const { return max_len_; }

  const Codeword* word_for(std::int64_t symbol) const;

  // Appends the (possibly escaped) codeword; returns bits written.
  int encode(BitWriter& w, std::int64_t symbol) const;
  std::int64_t decode(BitReader& r) const;

  // Exact diagnostics over the dyadic table (escape word included).
  double kraft_sum() const;            // sum 2^-len  (<= 1 guaranteed)
  double expected_length_bits() const; // E[len] under the dyadic pmf
  double dyadic_entropy_bits() const;  // H of the dyadic pmf
  // E[len] when symbols are drawn from `p` instead of the build pmf
  // (p's support must be listed here); escape mass of `p` charged at the
  // escape word's table length.
  double expected_length_under(const FinitePmf& p) const;

  // Exhaustive pairwise prefix check over table + escape word.
  bool is_prefix_free(std::string* why = nullptr) const;

  double dyadic_prob(int row) const;  // row in [0, size()), table order
  double dyadic_escape_prob() const;

 private:
  CodeKind kind_ = CodeKind::kFano;
  std::vector<std::int64_t> symbols_;
  std::vector<Codeword> words_;
  std::vector<std::uint64_t> raw_;  // dyadic probs, scale 2^62, aligned
  std::optional<Codeword> escape_word_;
  std::uint64_t escape_raw_ = 0;
  int max_len_ = 0;
  std::unordered_map<std::int64_t, std::uint32_t> index_of_;
  // (1 << len) | bits  ->  row, or kEscapeRow for the escape word
  std::unordered_map<std::uint64_t, std::uint32_t> decode_map_;
  static constexpr std::uint32_t kEscapeRow = 0xFFFFFFFFu;
};

}  // namespace lqgcodec
