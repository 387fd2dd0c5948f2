#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <vector>

#include "mcd/errors.hpp"
#include "mcd/ldpc.hpp"
#include "mcd/rng.hpp"

using namespace mcd;

namespace {

// Independent dense GF(2) helpers used as oracles against the sparse code.
using DenseMatrix = std::vector<std::vector<uint8_t>>;

DenseMatrix dense_h(const LdpcCode& code) {
  DenseMatrix h(size_t(code.checks()),
                std::vector<uint8_t>(size_t(code.n), 0));
  for (int i = 0; i < code.checks(); ++i) {
    for (int v : code.check_cols[size_t(i)]) h[size_t(i)][size_t(v)] = 1;
  }
  return h;
}

int gf2_rank(DenseMatrix rows) {
  size_t rank = 0;
  size_t cols = rows.empty() ? 0 : rows[0].size();
  for (size_t c = 0; c < cols && rank < rows.size(); ++c) {
    size_t pivot = rank;
    while (pivot < rows.size() && !rows[pivot][c]) ++pivot;
    if (pivot == rows.size()) continue;
    std::swap(rows[pivot], rows[rank]);
    for (size_t r = 0; r < rows.size(); ++r) {
      if (r != rank && rows[r][c]) {
        for (size_t j = 0; j < cols; ++j) rows[r][j] ^= rows[rank][j];
      }
    }
    ++rank;
  }
  return int(rank);
}

BitVector dense_syndrome(const DenseMatrix& h, const BitVector& word) {
  BitVector s(h.size(), 0);
  for (size_t i = 0; i < h.size(); ++i) {
    uint8_t acc = 0;
    for (size_t j = 0; j < word.size(); ++j) acc ^= h[i][j] & word[j];
    s[i] = acc;
  }
  return s;
}

bool is_zero(const BitVector& v) {
  return std::all_of(v.begin(), v.end(), [](uint8_t b) { return b == 0; });
}

// All codewords of a small code by filtering every n-bit word through H.
std::vector<BitVector> enumerate_codewords(const LdpcCode& code) {
  DenseMatrix h = dense_h(code);
  std::vector<BitVector> words;
  for (uint32_t w = 0; w < (1u << code.n); ++w) {
    BitVector word(static_cast<size_t>(code.n));
    for (int i = 0; i < code.n; ++i) word[size_t(i)] = (w >> i) & 1;
    if (is_zero(dense_syndrome(h, word))) words.push_back(word);
  }
  return words;
}

// Maximum-correlation decoding over an explicit codeword list.
BitVector ml_decode(const std::vector<BitVector>& codewords,
                    const LlrVector& llr) {
  double best = -1e300;
  const BitVector* pick = nullptr;
  for (const auto& c : codewords) {
    double metric = 0;
    for (size_t i = 0; i < c.size(); ++i) {
      metric += (c[i] ? -1.0 : 1.0) * llr[i];
    }
    if (metric > best) {
      best = metric;
      pick = &c;
    }
  }
  return *pick;
}

BitVector random_message(int k, Xoshiro256pp& rng) {
  BitVector u(static_cast<size_t>(k));
  for (auto& b : u) b = uint8_t(rng() & 1);
  return u;
}

}  // namespace

TEST_CASE("construction yields a regular full-rank code") {
  auto code = build_regular_code(200, 100, 7);
  CHECK(code.n == 200);
  CHECK(code.k == 100);
  REQUIRE(code.check_cols.size() == 100);
  REQUIRE(code.var_checks.size() == 200);
  for (const auto& cols : code.check_cols) {
    CHECK(cols.size() == 6);
    CHECK(std::is_sorted(cols.begin(), cols.end()));
    CHECK(std::set<int>(cols.begin(), cols.end()).size() == 6);
  }
  for (const auto& rows : code.var_checks) CHECK(rows.size() == 3);
  CHECK(gf2_rank(dense_h(code)) == 100);
  REQUIRE(code.message_cols.size() == 100);
  CHECK(std::is_sorted(code.message_cols.begin(), code.message_cols.end()));
}

TEST_CASE("construction removes short cycles at practical sizes") {
  auto code = build_regular_code(200, 100, 7);
  CHECK(code.four_cycle_count == 0);
}

TEST_CASE("construction is deterministic in the seed") {
  auto a = build_regular_code(200, 100, 3);
  auto b = build_regular_code(200, 100, 3);
  auto c = build_regular_code(200, 100, 4);
  CHECK(a.check_cols == b.check_cols);
  CHECK(a.gen_rows == b.gen_rows);
  CHECK(a.check_cols != c.check_cols);
}

TEST_CASE("construction rejects unusable shapes") {
  CHECK_THROWS_AS(build_regular_code(200, 99, 1), validation_error);
  CHECK_THROWS_AS(build_regular_code(4, 2, 1), validation_error);
}

TEST_CASE("generator rows are codewords and message bits pass through") {
  auto code = build_regular_code(200, 100, 7);
  DenseMatrix h = dense_h(code);
  for (int j = 0; j < code.k; ++j) {
    BitVector u(size_t(code.k), 0);
    u[size_t(j)] = 1;
    auto c = encode(code, u);
    CHECK(is_zero(dense_syndrome(h, c)));
    for (int col = 0; col < code.n; ++col) {
      CHECK(c[size_t(col)] == uint8_t(code.gen_bit(j, col)));
    }
  }

  Xoshiro256pp rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    auto u = random_message(code.k, rng);
    auto c = encode(code, u);
    CHECK(is_zero(syndrome(code, c)));
    for (int j = 0; j < code.k; ++j) {
      CHECK(c[size_t(code.message_cols[size_t(j)])] == u[size_t(j)]);
    }
  }
}

TEST_CASE("encode is linear and maps zero to zero") {
  auto code = build_regular_code(40, 20, 2);
  BitVector zero(size_t(code.k), 0);
  CHECK(is_zero(encode(code, zero)));

  Xoshiro256pp rng(9);
  auto u = random_message(code.k, rng);
  auto v = random_message(code.k, rng);
  BitVector uv(size_t(code.k));
  for (int j = 0; j < code.k; ++j) uv[size_t(j)] = u[size_t(j)] ^ v[size_t(j)];
  auto cu = encode(code, u), cv = encode(code, v), cuv = encode(code, uv);
  for (int i = 0; i < code.n; ++i) {
    CHECK(cuv[size_t(i)] == uint8_t(cu[size_t(i)] ^ cv[size_t(i)]));
  }

  CHECK_THROWS_AS(encode(code, BitVector(size_t(code.k) - 1, 0)),
                  validation_error);
  BitVector bad(size_t(code.k), 0);
  bad[0] = 2;
  CHECK_THROWS_AS(encode(code, bad), validation_error);
}

TEST_CASE("syndrome matches the dense oracle and flags single flips") {
  auto code = build_regular_code(16, 8, 11);
  DenseMatrix h = dense_h(code);
  Xoshiro256pp rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    BitVector word(static_cast<size_t>(code.n));
    for (auto& b : word) b = uint8_t(rng() & 1);
    CHECK(syndrome(code, word) == dense_syndrome(h, word));
  }

  auto c = encode(code, random_message(code.k, rng));
  for (int j = 0; j < code.n; ++j) {
    auto flipped = c;
    flipped[size_t(j)] ^= 1;
    auto s = syndrome(code, flipped);
    for (int i = 0; i < code.checks(); ++i) {
      bool in_col = std::find(code.var_checks[size_t(j)].begin(),
                              code.var_checks[size_t(j)].end(),
                              i) != code.var_checks[size_t(j)].end();
      CHECK(s[size_t(i)] == uint8_t(in_col));
    }
  }

  CHECK_THROWS_AS(syndrome(code, BitVector(3, 0)), validation_error);
}

TEST_CASE("tiny code: full rank, known cycle census, all-ones codeword") {
  auto code = build_regular_code(8, 4, 1);
  CHECK(gf2_rank(dense_h(code)) == 4);
  // every simple 4x8 (3,6) graph pairs each column against every other
  // through at least two checks, totalling exactly 36 length-4 cycles
  CHECK(code.four_cycle_count == 36);
  CHECK(is_zero(syndrome(code, BitVector(8, 1))));
  CHECK(enumerate_codewords(code).size() == 16);
}

TEST_CASE("strong correct-sign inputs decode without message passing") {
  auto code = build_regular_code(200, 100, 7);
  Xoshiro256pp rng(17);
  for (int trial = 0; trial < 1000; ++trial) {
    auto c = encode(code, random_message(code.k, rng));
    LlrVector llr(size_t(code.n));
    for (int i = 0; i < code.n; ++i) llr[size_t(i)] = c[size_t(i)] ? -20 : 20;
    auto r = decode_bp(code, llr, 10);
    CHECK(r.converged);
    CHECK(r.iterations <= 1);
    CHECK(r.decoded == c);
  }
}

TEST_CASE("all-zero llr decodes to the zero word immediately") {
  auto code = build_regular_code(16, 8, 2);
  auto r = decode_bp(code, LlrVector(16, 0.0), 10);
  CHECK(r.converged);
  CHECK(r.iterations == 0);
  CHECK(is_zero(r.decoded));
}

TEST_CASE("tiny code pairs columns, so single flips are exact ties") {
  // Each of the 8 columns misses exactly one of the 4 checks, and each check
  // is missed by exactly two columns, so columns come in identical pairs and
  // the minimum distance is 2. A single flipped sign therefore sits exactly
  // between two codewords: maximum-likelihood decoding ties, and flooding
  // message passing oscillates between the two error patterns.
  auto code = build_regular_code(8, 4, 1);
  auto codewords = enumerate_codewords(code);
  REQUIRE(codewords.size() == 16);

  std::vector<int> partner(8, -1);
  for (int a = 0; a < 8; ++a) {
    for (int b = 0; b < 8; ++b) {
      if (a != b && code.var_checks[size_t(a)] == code.var_checks[size_t(b)]) {
        partner[size_t(a)] = b;
      }
    }
  }
  for (int a = 0; a < 8; ++a) {
    REQUIRE(partner[size_t(a)] >= 0);
    CHECK(partner[size_t(partner[size_t(a)])] == a);
  }

  auto metric = [](const BitVector& c, const LlrVector& llr) {
    double m = 0;
    for (size_t i = 0; i < c.size(); ++i) m += (c[i] ? -1.0 : 1.0) * llr[i];
    return m;
  };

  for (const auto& c : codewords) {
    for (int j = 0; j < 8; ++j) {
      LlrVector llr(8);
      for (int i = 0; i < 8; ++i) llr[size_t(i)] = c[size_t(i)] ? -20 : 20;
      llr[size_t(j)] = -llr[size_t(j)];

      BitVector rival = c;
      rival[size_t(j)] ^= 1;
      rival[size_t(partner[size_t(j)])] ^= 1;
      CHECK(is_zero(syndrome(code, rival)));
      CHECK(metric(c, llr) == doctest::Approx(metric(rival, llr)));

      auto r = decode_bp(code, llr, 10);
      CHECK_FALSE(r.converged);
    }
  }
}

TEST_CASE("single flipped signs are repaired at practical sizes") {
  auto code = build_regular_code(200, 100, 7);
  Xoshiro256pp rng(29);
  for (int trial = 0; trial < 100; ++trial) {
    auto c = encode(code, random_message(code.k, rng));
    LlrVector llr(size_t(code.n));
    for (int i = 0; i < code.n; ++i) llr[size_t(i)] = c[size_t(i)] ? -20 : 20;
    size_t j = size_t(bounded(rng, uint64_t(code.n)));
    llr[j] = -llr[j];
    auto r = decode_bp(code, llr, 10);
    CHECK(r.converged);
    CHECK(r.decoded == c);
  }
}

TEST_CASE("negating all inputs complements the decision pattern") {
  auto code = build_regular_code(8, 4, 1);
  REQUIRE(is_zero(syndrome(code, BitVector(8, 1))));
  Xoshiro256pp rng(23);
  for (int trial = 0; trial < 500; ++trial) {
    LlrVector llr(8);
    for (auto& x : llr) x = normal(rng, 0.0, 5.0);
    auto pos = decode_bp(code, llr, 10);
    LlrVector neg(8);
    for (int i = 0; i < 8; ++i) neg[size_t(i)] = -llr[size_t(i)];
    auto flip = decode_bp(code, neg, 10);
    CHECK(pos.converged == flip.converged);
    CHECK(pos.iterations == flip.iterations);
    for (int i = 0; i < 8; ++i) {
      CHECK(flip.decoded[size_t(i)] == uint8_t(1 - pos.decoded[size_t(i)]));
    }
  }
}

TEST_CASE("block error rate stays within twice exhaustive search") {
  auto code = build_regular_code(8, 4, 1);
  auto codewords = enumerate_codewords(code);
  Xoshiro256pp rng(31);
  int agree = 0, bp_errors = 0, ml_errors = 0;
  const int trials = 10000;
  for (int t = 0; t < trials; ++t) {
    const auto& c = codewords[size_t(bounded(rng, codewords.size()))];
    LlrVector llr(8);
    for (int i = 0; i < 8; ++i) {
      llr[size_t(i)] = normal(rng, c[size_t(i)] ? -2.0 : 2.0, 2.0);
    }
    auto bp = decode_bp(code, llr, 10);
    auto ml = ml_decode(codewords, llr);
    if (bp.decoded == ml) ++agree;
    if (bp.decoded != c) ++bp_errors;
    if (ml != c) ++ml_errors;
  }
  CHECK(bp_errors <= 2 * ml_errors);
  CHECK(ml_errors > 100);  // the noise level genuinely stresses the decoder
  // distance-2 ties cap the achievable agreement on this code; guard against
  // regressions without overstating what message passing can do here
  CHECK(agree > trials / 2);
}

TEST_CASE("converged results always satisfy every parity check") {
  auto code = build_regular_code(32, 16, 5);
  Xoshiro256pp rng(41);
  int non_converged = 0;
  for (int t = 0; t < 500; ++t) {
    LlrVector llr(32);
    for (auto& x : llr) x = normal(rng, 0.0, 3.0);
    auto r = decode_bp(code, llr, 5);
    CHECK(r.iterations <= 5);
    if (r.converged) {
      CHECK(is_zero(syndrome(code, r.decoded)));
    } else {
      ++non_converged;
      CHECK(r.iterations == 5);
    }
    auto again = decode_bp(code, llr, 5);
    CHECK(again.decoded == r.decoded);
  }
  CHECK(non_converged > 0);
}

TEST_CASE("decode input validation") {
  auto code = build_regular_code(16, 8, 2);
  CHECK_THROWS_AS(decode_bp(code, LlrVector(15, 0.0), 10), validation_error);
  CHECK_THROWS_AS(decode_bp(code, LlrVector(16, 0.0), 0), validation_error);
  LlrVector nan_llr(16, 1.0);
  nan_llr[3] = std::nan("");
  CHECK_THROWS_AS(decode_bp(code, nan_llr, 10), validation_error);
}

TEST_CASE("alist round trip preserves the code exactly") {
  auto code = build_regular_code(64, 32, 13);
  const char* path = "code_roundtrip.tmp";
  write_alist(code, path);
  auto back = read_alist(path);
  CHECK(back.n == code.n);
  CHECK(back.k == code.k);
  CHECK(back.check_cols == code.check_cols);
  CHECK(back.var_checks == code.var_checks);
  CHECK(back.message_cols == code.message_cols);
  CHECK(back.gen_rows == code.gen_rows);
  CHECK(back.four_cycle_count == code.four_cycle_count);
  std::remove(path);
}

TEST_CASE("alist reader rejects corrupt files") {
  const char* path = "code_bad.tmp";
  auto write = [&](const char* body) {
    std::ofstream out(path);
    out << body;
  };

  write("8 4\n3 6\n");  // truncated
  CHECK_THROWS_AS(read_alist(path), io_error);
  write("9 4\n3 6\n");  // not rate 1/2
  CHECK_THROWS_AS(read_alist(path), io_error);
  write("8 4\n4 6\n");  // wrong degrees
  CHECK_THROWS_AS(read_alist(path), io_error);

  auto code = build_regular_code(8, 4, 1);
  write_alist(code, path);
  {
    std::ifstream in(path);
    std::stringstream body;
    body << in.rdbuf();
    std::string text = body.str();
    text.back() = '9';  // variable id out of range in the last check row
    std::ofstream out(path);
    out << text;
  }
  CHECK_THROWS_AS(read_alist(path), io_error);
  std::remove(path);
}

TEST_CASE("alist reader rejects a rank-deficient parity matrix") {
  // two duplicated check supports force rank 5 < 6 while staying (3,6)
  const char* path = "code_rankdef.tmp";
  std::ofstream out(path);
  out << "12 6\n3 6\n";
  for (int v = 0; v < 12; ++v) out << "3" << (v + 1 < 12 ? " " : "\n");
  for (int i = 0; i < 6; ++i) out << "6" << (i + 1 < 6 ? " " : "\n");
  const char* var_rows[12] = {"1 2 5", "1 2 5", "1 2 5", "1 2 6",
                              "1 2 6", "1 2 6", "3 4 5", "3 4 5",
                              "3 4 5", "3 4 6", "3 4 6", "3 4 6"};
  for (const char* r : var_rows) out << r << "\n";
  out << "1 2 3 4 5 6\n1 2 3 4 5 6\n7 8 9 10 11 12\n7 8 9 10 11 12\n"
      << "1 2 3 7 8 9\n4 5 6 10 11 12\n";
  out.close();
  CHECK_THROWS_AS(read_alist(path), construction_error);
  std::remove(path);
}
