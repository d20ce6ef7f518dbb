#include "lqgcodec/codec_check.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>
#include <vector>

#include "lqgcodec/bitstream.hpp"
#include "lqgcodec/codebook.hpp"
#include "lqgcodec/rng.hpp"

namespace lqgcodec {

namespace {

// Strictly ascending random cells with gaps in [1, 8].
std::vector<std::int64_t> random_cells(int count, std::uint64_t seed) {
  std::vector<std::int64_t> cells(static_cast<std::size_t>(count));
  std::int64_t c =
      -static_cast<std::int64_t>(rng::at(seed, 0) % 1000);
  for (int i = 0; i < count; ++i) {
    cells[static_cast<std::size_t>(i)] = c;
    c += 1 + static_cast<std::int64_t>(rng::at(seed, static_cast<std::uint64_t>(i) + 1) % 8);
  }
  return cells;
}

FinitePmf dyadic_pmf(std::uint64_t seed) {
  const int L = 1 + static_cast<int>(rng::at(seed, 100) % 12);
  std::vector<double> probs;
  for (int i = 1; i <= L; ++i) probs.push_back(std::ldexp(1.0, -i));
  probs.push_back(std::ldexp(1.0, -L));  // closes the sum to exactly 1
  // Shuffle so sorted order differs from cell order.
  for (std::size_t i = probs.size(); i > 1; --i) {
    const std::size_t j = rng::at(seed, 200 + i) % i;
    std::swap(probs[i - 1], probs[j]);
  }
  FinitePmf pmf;
  pmf.cells = random_cells(static_cast<int>(probs.size()), rng::mix(seed));
  pmf.probs = std::move(probs);
  pmf.escape_mass = 0.0;
  return pmf;
}

FinitePmf geometric_pmf(std::uint64_t seed) {
  const int K = 3 + static_cast<int>(rng::at(seed, 100) % 10);
  const double rho = 0.35 + 0.55 * rng::unit(rng::at(seed, 101));
  const double c = (1.0 - rho) / (1.0 + rho);
  FinitePmf pmf;
  double listed = 0.0;
  for (int k = -K; k <= K; ++k) {
    pmf.cells.push_back(k);
    const double p = c * std::pow(rho, std::abs(k));
    pmf.probs.push_back(p);
    listed += p;
  }
  pmf.escape_mass = std::max(1.0 - listed, 0.0);  // the untruncated tail
  return pmf;
}

FinitePmf random_pmf(int index, std::uint64_t seed) {
  const int K = 2 + static_cast<int>(rng::at(seed, 100) % 29);
  std::vector<double> w(static_cast<std::size_t>(K));
  double total = 0.0;
  for (int i = 0; i < K; ++i) {
    w[static_cast<std::size_t>(i)] =
        -std::log(rng::unit_pos(rng::at(seed, 200 + static_cast<std::uint64_t>(i))));
    total += w[static_cast<std::size_t>(i)];
  }
  const double esc =
      (index % 2 == 0) ? 0.0 : 0.02 + 0.03 * rng::unit(rng::at(seed, 300));
  FinitePmf pmf;
  pmf.cells = random_cells(K, rng::mix(seed ^ 0x5555555555555555ull));
  for (double x : w) pmf.probs.push_back((1.0 - esc) * x / total);
  pmf.escape_mass = esc;
  return pmf;
}

// Draw a symbol: a listed cell by its probability, or (on escape mass) a cell
// the table does not list.
std::int64_t sample_symbol(const FinitePmf& pmf, const std::vector<double>& cum,
                           std::uint64_t seed, std::uint64_t ctr) {
  const double u = rng::unit(rng::at(seed, ctr));
  const auto it = std::upper_bound(cum.begin(), cum.end(), u);
  if (it != cum.end())
    return pmf.cells[static_cast<std::size_t>(it - cum.begin())];
  for (std::uint64_t k = 0;; ++k) {
    const std::uint64_t r = rng::at(seed ^ 0xD6E8FEB86659FD93ull, ctr * 64 + k);
    const auto cell =
        static_cast<std::int64_t>(r % (1ull << 40)) - (1ll << 39);
    if (!std::binary_search(pmf.cells.begin(), pmf.cells.end(), cell))
      return cell;
  }
}

}  // namespace

FinitePmf generated_pmf(int index, std::uint64_t seed) {
  const std::uint64_t s = rng::derive(seed, 0x243F6A8885A308D3ull +
                                                static_cast<std::uint64_t>(index));
  FinitePmf pmf;
  switch (index % 3) {
    case 0:
      pmf = dyadic_pmf(s);
      break;
    case 1:
      pmf = geometric_pmf(s);
      break;
    default:
      pmf = random_pmf(index, s);
      break;
  }
  pmf.validate();
  return pmf;
}

CodecCheckReport run_codec_checks(int n_pmfs, long streams_per_pmf,
                                  std::uint64_t seed) {
  CodecCheckReport rep;
  rep.pmfs = n_pmfs;
  auto fail = [&](const std::string& what, int pmf_index) {
    if (rep.first_failure.empty())
      rep.first_failure = what + " (pmf " + std::to_string(pmf_index) + ")";
  };

  for (int i = 0; i < n_pmfs; ++i) {
    const FinitePmf pmf = generated_pmf(i, seed);

    for (CodeKind kind : {CodeKind::kFano, CodeKind::kShannonSorted}) {
      const Codebook book = Codebook::build(pmf, kind);
      std::string why;
      if (!book.is_prefix_free(&why)) {
        rep.prefix_free = false;
        fail("prefix violation: " + why, i);
      }
      if (book.kraft_sum() > 1.0) {
        rep.kraft_ok = false;
        fail("Kraft sum " + std::to_string(book.kraft_sum()), i);
      }
      const double H = book.dyadic_entropy_bits();
      const double E = book.expected_length_bits();
      const double slack = kind == CodeKind::kFano ? 2.0 : 1.0;
      // Both quantities are exact dyadic sums; the 1e-9 covers only the final
      // float conversion.
      const bool ok = E >= H - 1e-9 && E <= H + slack + 1e-9;
      if (kind == CodeKind::kFano) {
        if (!ok) {
          rep.fano_bound_ok = false;
          fail("Fano E[len]=" + std::to_string(E) + " vs H=" + std::to_string(H), i);
        }
      } else if (!ok) {
        rep.shannon_bound_ok = false;
        fail("Shannon E[len]=" + std::to_string(E) + " vs H=" + std::to_string(H), i);
      }
    }

    // Round-trip random streams through alternating code kinds.
    std::vector<double> cum;
    cum.reserve(pmf.probs.size());
    double acc = 0.0;
    for (double p : pmf.probs) {
      acc += p;
      cum.push_back(acc);
    }
    const std::uint64_t sseed =
        rng::derive(seed, 0x452821E638D01377ull + static_cast<std::uint64_t>(i));
    for (long s = 0; s < streams_per_pmf; ++s) {
      const CodeKind kind =
          (s % 2 == 0) ? CodeKind::kShannonSorted : CodeKind::kFano;
      const Codebook book = Codebook::build(pmf, kind);
      const int nsym =
          1 + static_cast<int>(rng::at(sseed, static_cast<std::uint64_t>(s)) % 64);
      std::vector<std::int64_t> sent(static_cast<std::size_t>(nsym));
      BitWriter w;
      for (int k = 0; k < nsym; ++k) {
        const std::uint64_t ctr =
            static_cast<std::uint64_t>(s) * 257 + static_cast<std::uint64_t>(k) + 1;
        std::int64_t sym = sample_symbol(pmf, cum, sseed, ctr);
        if (pmf.escape_mass == 0.0 &&
            !std::binary_search(pmf.cells.begin(), pmf.cells.end(), sym))
          sym = pmf.cells.front();  // no escape word; keep the stream codable
        sent[static_cast<std::size_t>(k)] = sym;
        book.encode(w, sym);
      }
      BitReader r(w);
      bool bad = false;
      for (int k = 0; k < nsym; ++k) {
        if (book.decode(r) != sent[static_cast<std::size_t>(k)]) {
          ++rep.mismatches;
          bad = true;
          break;
        }
      }
      if (!bad && r.consumed() != w.bit_count()) {
        ++rep.misaligned;
        bad = true;
      }
      if (bad) fail("round-trip stream " + std::to_string(s), i);
      ++rep.streams;
      rep.symbols += nsym;
    }
  }
  return rep;
}

}  // namespace lqgcodec
