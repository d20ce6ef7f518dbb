#include "lqgcodec/codebook.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "lqgcodec/errors.hpp"

namespace lqgcodec {
namespace {

// Probabilities live as integers in units of 2^-62; all cumulative sums and
// codeword bit extraction is then exact, so the classic prefix-freeness and
// length-bound arguments hold verbatim in integer arithmetic.
constexpr int kScaleBits = 62;
constexpr std::uint64_t kScale = 1ull << kScaleBits;

int floor_log2(std::uint64_t x) { return std::bit_width(x) - 1; }

std::uint64_t round_to_scale(double p) {
  const auto r = static_cast<std::uint64_t>(
      std::llroundl(static_cast<long double>(p) * kScale));
  return std::max<std::uint64_t>(r, 1);
}

}  // namespace

Codebook Codebook::build(const FinitePmf& pmf, CodeKind kind) {
  pmf.validate();
  Codebook book;
  book.kind_ = kind;
  book.symbols_ = pmf.cells;

  const std::size_t k = pmf.cells.size();
  book.raw_.resize(k);
  for (std::size_t i = 0; i < k; ++i) book.raw_[i] = round_to_scale(pmf.probs[i]);
  const bool has_escape = pmf.escape_mass > 0.0;
  book.escape_raw_ = has_escape ? round_to_scale(pmf.escape_mass) : 0;

  // Renormalize the dyadic table exactly: push the rounding residual into the
  // largest cell so sum(raw) + escape_raw == 2^62.
  std::uint64_t sum = book.escape_raw_;
  for (std::uint64_t r : book.raw_) sum += r;
  const std::size_t top = static_cast<std::size_t>(
      std::max_element(book.raw_.begin(), book.raw_.end()) - book.raw_.begin());
  const auto residual = static_cast<std::int64_t>(kScale - sum);
  const auto fixed = static_cast<std::int64_t>(book.raw_[top]) + residual;
  if (fixed < 1)
    throw NumericalFailure("codebook: dyadic renormalization underflow");
  book.raw_[top] = static_cast<std::uint64_t>(fixed);

  // Construction order: ascending symbols with escape conceptually last
  // (Fano), or descending probability with symbol-order tiebreak (sorted).
  // Escape is just one more symbol in that order, so the standard prefix
  // arguments cover it too.
  const std::size_t esc_index = k;  // virtual row
  std::vector<std::size_t> order(k + (has_escape ? 1 : 0));
  std::iota(order.begin(), order.end(), 0);
  auto raw_of = [&](std::size_t i) {
    return i == esc_index ? book.escape_raw_ : book.raw_[i];
  };
  if (kind == CodeKind::kShannonSorted) {
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (raw_of(a) != raw_of(b)) return raw_of(a) > raw_of(b);
      return a < b;  // symbol order; escape (largest index) sorts last
    });
  }

  book.words_.resize(k);
  std::uint64_t cum = 0;  // scale 2^62
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    const std::size_t row = order[pos];
    const std::uint64_t raw = raw_of(row);
    const int ceil_neg_log2 = kScaleBits - floor_log2(raw);
    Codeword w;
    if (kind == CodeKind::kFano) {
      // Midpoint cumulative at scale 2^63, truncated to ceil(-log2 p) + 1 bits.
      const std::uint64_t mid = 2 * cum + raw;
      w.len = ceil_neg_log2 + 1;
      w.bits = mid >> (kScaleBits + 1 - w.len);
    } else {
      // Plain cumulative at scale 2^62, truncated to ceil(-log2 p) bits.
      w.len = ceil_neg_log2;
      w.bits = w.len == 0 ? 0 : (cum >> (kScaleBits - w.len));
    }
    cum += raw;
    if (row == esc_index)
      book.escape_word_ = w;
    else
      book.words_[row] = w;
    book.max_len_ = std::max(book.max_len_, w.len);
  }

  for (std::size_t i = 0; i < k; ++i) {
    book.index_of_.emplace(book.symbols_[i], static_cast<std::uint32_t>(i));
    const Codeword& w = book.words_[i];
    book.decode_map_.emplace((1ull << w.len) | w.bits,
                             static_cast<std::uint32_t>(i));
  }
  if (has_escape) {
    const Codeword& w = *book.escape_word_;
    book.decode_map_.emplace((1ull << w.len) | w.bits, kEscapeRow);
  }
  return book;
}

const Codeword* Codebook::word_for(std::int64_t symbol) const {
  auto it = index_of_.find(symbol);
  return it == index_of_.end() ? nullptr : &words_[it->second];
}

int Codebook::encode(BitWriter& w, std::int64_t symbol) const {
  if (const Codeword* cw = word_for(symbol)) {
    w.append(*cw);
    return cw->len;
  }
  if (!escape_word_)
    throw MalformedStream("encode: symbol outside table and no escape word");
  const std::size_t before = w.bit_count();
  w.append(*escape_word_);
  elias_gamma_append(w, zigzag(symbol));
  return static_cast<int>(w.bit_count() - before);
}

std::int64_t Codebook::decode(BitReader& r) const {
  std::uint64_t key = 1;  // sentinel bit; grows as bits arrive
  for (int depth = 0; depth <= max_len_; ++depth) {
    auto it = decode_map_.find(key);
    if (it != decode_map_.end()) {
      if (it->second == kEscapeRow) return unzigzag(elias_gamma_read(r));
      return symbols_[it->second];
    }
    if (depth == max_len_) break;
    key = (key << 1) | (r.next() ? 1u : 0u);
  }
  throw MalformedStream("decode: no codeword matches the stream");
}

double Codebook::kraft_sum() const {
  // Exact in units of 2^-64.
  unsigned __int128 total = 0;
  for (const Codeword& w : words_) total += static_cast<unsigned __int128>(1)
                                            << (64 - w.len);
  if (escape_word_) total += static_cast<unsigned __int128>(1)
                             << (64 - escape_word_->len);
  return static_cast<double>(static_cast<long double>(total) / 1.8446744073709551616e19L);
}

double Codebook::expected_length_bits() const {
  unsigned __int128 total = 0;  // units of 2^-62 bits
  for (std::size_t i = 0; i < words_.size(); ++i)
    total += static_cast<unsigned __int128>(raw_[i]) *
             static_cast<unsigned>(words_[i].len);
  if (escape_word_)
    total += static_cast<unsigned __int128>(escape_raw_) *
             static_cast<unsigned>(escape_word_->len);
  return static_cast<double>(static_cast<long double>(total) /
                             static_cast<long double>(kScale));
}

double Codebook::dyadic_entropy_bits() const {
  double h = 0.0;
  for (std::size_t i = 0; i < raw_.size(); ++i) {
    const double p = dyadic_prob(static_cast<int>(i));
    h -= p * std::log2(p);
  }
  if (escape_raw_ > 0) {
    const double p = dyadic_escape_prob();
    h -= p * std::log2(p);
  }
  return h;
}

double Codebook::expected_length_under(const FinitePmf& p) const {
  double total = 0.0;
  for (std::size_t i = 0; i < p.cells.size(); ++i) {
    const Codeword* w = word_for(p.cells[i]);
    if (w == nullptr) {
      if (!escape_word_)
        throw std::invalid_argument(
            "expected_length_under: unlisted symbol and no escape word");
      total += p.probs[i] * escape_word_->len;
      continue;
    }
    total += p.probs[i] * w->len;
  }
  if (p.escape_mass > 0.0 && escape_word_)
    total += p.escape_mass * escape_word_->len;
  return total;
}

bool Codebook::is_prefix_free(std::string* why) const {
  std::vector<Codeword> all = words_;
  if (escape_word_) all.push_back(*escape_word_);
  for (std::size_t i = 0; i < all.size(); ++i) {
    for (std::size_t j = 0; j < all.size(); ++j) {
      if (i == j) continue;
      const Codeword& a = all[i];
      const Codeword& b = all[j];
      if (a.len > b.len) continue;
      const bool a_prefix_of_b =
          a.len == 0 || (b.bits >> (b.len - a.len)) == a.bits;
      if (a_prefix_of_b) {
        if (why != nullptr)
          *why = "word " + std::to_string(i) + " is a prefix of word " +
                 std::to_string(j);
        return false;
      }
    }
  }
  return true;
}

double Codebook::dyadic_prob(int row) const {
  return static_cast<double>(static_cast<long double>(raw_[static_cast<std::size_t>(row)]) /
                             static_cast<long double>(kScale));
}

double Codebook::dyadic_escape_prob() const {
  return static_cast<double>(static_cast<long double>(escape_raw_) /
                             static_cast<long double>(kScale));
}

}  // namespace lqgcodec
