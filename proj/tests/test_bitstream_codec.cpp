#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdint>
#include <vector>

#include "lqgcodec/bitstream.hpp"
#include "lqgcodec/codebook.hpp"
#include "lqgcodec/codec_check.hpp"
#include "lqgcodec/errors.hpp"
#include "lqgcodec/pmf.hpp"
#include "lqgcodec/rng.hpp"

using namespace lqgcodec;

namespace {

FinitePmf make_pmf(std::vector<std::int64_t> cells, std::vector<double> probs,
                   double escape = 0.0) {
  FinitePmf p;
  p.cells = std::move(cells);
  p.probs = std::move(probs);
  p.escape_mass = escape;
  p.validate();
  return p;
}

}  // namespace

TEST_CASE("bit packing is MSB-first within each byte") {
  BitWriter w;
  w.push(true);
  w.push(false);
  w.push(true);
  CHECK(w.bit_count() == 3);
  auto bytes = w.bytes();
  REQUIRE(bytes.size() == 1);
  CHECK(bytes[0] == 0xA0);  // 101 packed into the high bits

  w.append(0x5, 3);  // 101 -> byte now 10110100...
  CHECK(w.bit_count() == 6);
  CHECK(w.bytes()[0] == 0xB4);
}

TEST_CASE("append/take round-trips MSB-first fields across byte boundaries") {
  BitWriter w;
  w.append(0x1F2E3D4C5B6A7980ull, 64);
  w.append(0x2A, 7);
  w.append(0x1, 1);
  BitReader r(w);
  CHECK(r.take(64) == 0x1F2E3D4C5B6A7980ull);
  CHECK(r.take(7) == 0x2A);
  CHECK(r.take(1) == 0x1);
  CHECK(r.exhausted());
}

TEST_CASE("reading past the stream end throws") {
  BitWriter w;
  w.push(true);
  BitReader r(w);
  CHECK(r.next() == true);
  CHECK_THROWS_AS(r.next(), MalformedStream);
}

TEST_CASE("reader sees bits appended after its construction") {
  BitWriter w;
  BitReader r(w);
  w.push(true);
  w.push(false);
  CHECK(r.next() == true);
  w.push(true);
  CHECK(r.next() == false);
  CHECK(r.next() == true);
  CHECK(r.consumed() == 3);
}

TEST_CASE("zigzag interleaves signs") {
  CHECK(zigzag(0) == 0);
  CHECK(zigzag(-1) == 1);
  CHECK(zigzag(1) == 2);
  CHECK(zigzag(-2) == 3);
  CHECK(zigzag(2) == 4);
  for (std::int64_t k : {std::int64_t{0}, std::int64_t{-1}, std::int64_t{7},
                         std::int64_t{-123456789}, std::int64_t{987654321},
                         std::int64_t{INT64_MAX}, std::int64_t{INT64_MIN}})
    CHECK(unzigzag(zigzag(k)) == k);
}

TEST_CASE("elias gamma codes known small values") {
  // gamma of n+1: n=0 -> "1", n=1 -> "010", n=2 -> "011", n=3 -> "00100".
  auto bits_of = [](std::uint64_t n) {
    BitWriter w;
    elias_gamma_append(w, n);
    std::string s;
    BitReader r(w);
    while (!r.exhausted()) s += r.next() ? '1' : '0';
    return s;
  };
  CHECK(bits_of(0) == "1");
  CHECK(bits_of(1) == "010");
  CHECK(bits_of(2) == "011");
  CHECK(bits_of(3) == "00100");
  CHECK(bits_of(6) == "00111");
}

TEST_CASE("elias gamma round-trips across magnitudes") {
  BitWriter w;
  std::vector<std::uint64_t> vals;
  for (std::uint64_t n = 0; n < 300; ++n) vals.push_back(n);
  for (int p = 10; p < 63; p += 7) vals.push_back((1ull << p) + 12345);
  vals.push_back(zigzag(INT64_MIN));
  for (std::uint64_t v : vals) elias_gamma_append(w, v);
  BitReader r(w);
  for (std::uint64_t v : vals) CHECK(elias_gamma_read(r) == v);
  CHECK(r.exhausted());
}

TEST_CASE("elias gamma rejects an over-long zero prefix") {
  BitWriter w;
  for (int i = 0; i < 70; ++i) w.push(false);
  BitReader r(w);
  CHECK_THROWS_AS(elias_gamma_read(r), MalformedStream);
}

TEST_CASE("Fano words for the uniform-4 table") {
  // Midpoint cumulatives 1/8, 3/8, 5/8, 7/8 truncated to 3 bits.
  auto book = Codebook::build(
      make_pmf({-1, 0, 1, 2}, {0.25, 0.25, 0.25, 0.25}), CodeKind::kFano);
  REQUIRE(book.size() == 4);
  const auto& words = book.words();
  CHECK(words[0] == Codeword{0b001, 3});
  CHECK(words[1] == Codeword{0b011, 3});
  CHECK(words[2] == Codeword{0b101, 3});
  CHECK(words[3] == Codeword{0b111, 3});
  CHECK(book.is_prefix_free());
  CHECK(book.kraft_sum() == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(book.expected_length_bits() == doctest::Approx(3.0).epsilon(1e-15));
  // H = 2 exactly for the uniform-4 law; E[len] - H = 1 <= 2.
  CHECK(book.dyadic_entropy_bits() == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("a single-symbol Fano table spends one bit") {
  auto book = Codebook::build(make_pmf({42}, {1.0}), CodeKind::kFano);
  REQUIRE(book.size() == 1);
  CHECK(book.words()[0] == Codeword{0b1, 1});
  BitWriter w;
  CHECK(book.encode(w, 42) == 1);
  BitReader r(w);
  CHECK(book.decode(r) == 42);
}

TEST_CASE("a single-symbol sorted table decodes at zero cost") {
  // len = ceil(-log2 1) = 0: legal, encodes to nothing, decodes instantly.
  auto book = Codebook::build(make_pmf({7}, {1.0}), CodeKind::kShannonSorted);
  REQUIRE(book.size() == 1);
  CHECK(book.words()[0].len == 0);
  CHECK(book.is_prefix_free());
  BitWriter w;
  CHECK(book.encode(w, 7) == 0);
  CHECK(w.bit_count() == 0);
  BitReader r(w);
  CHECK(book.decode(r) == 7);
  CHECK(r.consumed() == 0);
}

TEST_CASE("sorted words for the uniform-2 table") {
  auto book = Codebook::build(make_pmf({0, 1}, {0.5, 0.5}),
                              CodeKind::kShannonSorted);
  CHECK(book.words()[0] == Codeword{0b0, 1});
  CHECK(book.words()[1] == Codeword{0b1, 1});
  CHECK(book.kraft_sum() == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("sorted words for a dyadic staircase") {
  // {1/2, 1/4, 1/8, 1/8} in descending order: lengths 1,2,3,3 and a complete
  // tree, so E[len] = H exactly.
  auto book = Codebook::build(
      make_pmf({10, 20, 30, 40}, {0.5, 0.25, 0.125, 0.125}),
      CodeKind::kShannonSorted);
  const auto& words = book.words();
  CHECK(words[0] == Codeword{0b0, 1});
  CHECK(words[1] == Codeword{0b10, 2});
  CHECK(words[2] == Codeword{0b110, 3});
  CHECK(words[3] == Codeword{0b111, 3});
  CHECK(book.kraft_sum() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(book.expected_length_bits() ==
        doctest::Approx(book.dyadic_entropy_bits()).epsilon(1e-15));
}

TEST_CASE("descending-probability order breaks ties by symbol order") {
  auto book = Codebook::build(
      make_pmf({-5, 3, 9}, {0.2, 0.6, 0.2}), CodeKind::kShannonSorted);
  // Rows keep symbol order; word lengths follow sorted position.
  CHECK(book.words()[1].len == 1);       // p = 0.6 heads the sort
  CHECK(book.words()[0].len == 3);       // ceil(-log2 0.2)
  CHECK(book.words()[2].len == 3);
  CHECK(book.is_prefix_free());
}

TEST_CASE("length bounds hold on both kinds for an awkward table") {
  const FinitePmf p = make_pmf({-3, -1, 0, 2, 5, 11},
                               {0.37, 0.22, 0.18, 0.13, 0.07, 0.02},
                               0.01);
  for (CodeKind kind : {CodeKind::kFano, CodeKind::kShannonSorted}) {
    auto book = Codebook::build(p, kind);
    CHECK(book.is_prefix_free());
    CHECK(book.kraft_sum() <= 1.0 + 1e-15);
    const double h = book.dyadic_entropy_bits();
    const double e = book.expected_length_bits();
    const double slack = kind == CodeKind::kFano ? 2.0 : 1.0;
    CHECK(e >= h - 1e-12);
    CHECK(e <= h + slack + 1e-12);
  }
}

TEST_CASE("escape encodes table misses as escape word plus gamma payload") {
  const FinitePmf p = make_pmf({-1, 0, 1}, {0.4, 0.3, 0.2}, 0.1);
  for (CodeKind kind : {CodeKind::kFano, CodeKind::kShannonSorted}) {
    auto book = Codebook::build(p, kind);
    REQUIRE(book.escape_word().has_value());
    BitWriter w;
    std::vector<std::int64_t> symbols = {-1,        0, 1, 55, -8,
                                         987654321, 0, -55555, 1};
    for (std::int64_t s : symbols) {
      const int n = book.encode(w, s);
      CHECK(n >= 1);
      if (book.word_for(s) == nullptr)
        CHECK(n > book.escape_word()->len);  // gamma payload follows
    }
    BitReader r(w);
    for (std::int64_t s : symbols) CHECK(book.decode(r) == s);
    CHECK(r.exhausted());
  }
}

TEST_CASE("encoding an unlisted symbol without an escape word throws") {
  auto book = Codebook::build(make_pmf({0, 1}, {0.5, 0.5}), CodeKind::kFano);
  BitWriter w;
  CHECK_THROWS_AS(book.encode(w, 99), MalformedStream);
}

TEST_CASE("decode rejects bit patterns outside the table") {
  // Sorted code for {0.6, 0.4}: words "0" and "10"; the pattern "11" dangles.
  auto book = Codebook::build(make_pmf({0, 1}, {0.6, 0.4}),
                              CodeKind::kShannonSorted);
  BitWriter w;
  w.push(true);
  w.push(true);
  BitReader r(w);
  CHECK_THROWS_AS(book.decode(r), MalformedStream);
}

TEST_CASE("expected_length_under matches the dyadic tally on the build pmf") {
  const FinitePmf p = make_pmf({1, 2, 3, 4}, {0.4, 0.3, 0.2, 0.05}, 0.05);
  auto book = Codebook::build(p, CodeKind::kShannonSorted);
  CHECK(book.expected_length_under(p) ==
        doctest::Approx(book.expected_length_bits()).epsilon(1e-9));

  // A different pmf on the same support reweights the same lengths.
  const FinitePmf q = make_pmf({1, 2, 3, 4}, {0.25, 0.25, 0.25, 0.25});
  double manual = 0.0;
  for (std::size_t i = 0; i < q.cells.size(); ++i)
    manual += q.probs[i] * book.word_for(q.cells[i])->len;
  CHECK(book.expected_length_under(q) == doctest::Approx(manual));

  auto no_escape = Codebook::build(make_pmf({1, 2}, {0.5, 0.5}), CodeKind::kFano);
  const FinitePmf wider = make_pmf({1, 2, 9}, {0.4, 0.4, 0.2});
  CHECK_THROWS_AS(no_escape.expected_length_under(wider), std::invalid_argument);
}

TEST_CASE("pmf validation names defects") {
  FinitePmf p;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);  // empty
  p.cells = {0, 0};
  p.probs = {0.5, 0.5};
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);  // not ascending
  p.cells = {0, 1};
  p.probs = {0.5, 0.6};
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);  // mass != 1
  p.probs = {0.5, 0.5};
  CHECK_NOTHROW(p.validate());
}

TEST_CASE("pmf entropy and lookup") {
  const FinitePmf p = make_pmf({-1, 4}, {0.5, 0.25}, 0.25);
  CHECK(p.entropy_bits() == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(p.prob_of(-1) == 0.5);
  CHECK(p.prob_of(4) == 0.25);
  CHECK(p.prob_of(17) == 0.25);  // unlisted reports escape mass
}

TEST_CASE("generated pmf families validate and cycle kinds") {
  for (int i = 0; i < 12; ++i) {
    const FinitePmf p = generated_pmf(i, 0xABCDEFull);
    CHECK_NOTHROW(p.validate());
    if (i % 3 == 1) CHECK(p.escape_mass > 0.0);  // geometric family
  }
}

TEST_CASE("codec self-check sweep passes on a small budget") {
  const CodecCheckReport rep = run_codec_checks(9, 40, 0x5EEDull);
  CHECK(rep.pmfs == 9);
  CHECK(rep.streams == 9 * 40);
  CHECK(rep.symbols > 0);
  CHECK(rep.mismatches == 0);
  CHECK(rep.misaligned == 0);
  CHECK(rep.prefix_free);
  CHECK(rep.kraft_ok);
  CHECK(rep.shannon_bound_ok);
  CHECK(rep.fano_bound_ok);
  CHECK(rep.all_ok());
  CHECK(rep.first_failure.empty());
}
