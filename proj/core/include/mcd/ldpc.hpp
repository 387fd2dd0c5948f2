#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mcd/types.hpp"

namespace mcd {

// Regular LDPC code with a dense systematic generator derived from H.
// check_cols / var_checks are the sparse parity-check matrix as sorted
// adjacency lists. The generator keeps the original column order; the k
// columns listed in message_cols carry the message bits verbatim.
struct LdpcCode {
  int n = 0;
  int k = 0;
  int var_degree = 3;
  int check_degree = 6;
  std::vector<std::vector<int>> check_cols;  // per check, its variables
  std::vector<std::vector<int>> var_checks;  // per variable, its checks
  std::vector<int> message_cols;             // k systematic positions
  std::vector<uint64_t> gen_rows;            // k rows, bit-packed, n wide
  int gen_words = 0;                         // 64-bit words per row
  // Tanner-graph edges grouped by check; per-variable edge ids for decoding.
  std::vector<int> var_edges;  // n * var_degree ids into check-major order
  int four_cycle_count = 0;    // 0 means girth >= 6
  uint64_t seed = 0;

  int checks() const { return n - k; }
  bool gen_bit(int row, int col) const {
    return (gen_rows[size_t(row) * size_t(gen_words) + size_t(col >> 6)] >>
            (col & 63)) &
           1;
  }
};

// Random (3,6)-regular construction: uniform stub matching repaired to a
// simple graph, short-cycle reduction by edge swaps inside a fixed budget,
// then full-rank verification over GF(2). Rank-deficient draws are resampled
// with a new attempt index; after 100 attempts a construction_error reports
// the diagnostics. Deterministic given (n, k, seed).
LdpcCode build_regular_code(int n, int k, uint64_t seed);

// c = u * G over GF(2); row j of G is encode of the j-th unit message.
BitVector encode(const LdpcCode& code, const BitVector& u);

// H * word^T over GF(2), one bit per check.
BitVector syndrome(const LdpcCode& code, const BitVector& word);

struct DecodeResult {
  BitVector decoded;
  int iterations = 0;
  bool converged = false;
};

// Log-domain sum-product on the Tanner graph. Input LLRs are clamped to
// |llr| <= 30 (sign convention: positive means bit 0). Hard decision after
// every iteration; returns as soon as the syndrome is zero, including for
// the channel-only decision before any message passing.
DecodeResult decode_bp(const LdpcCode& code, const LlrVector& llr,
                       int max_iter = 10);

// Sparse parity-check interchange format (alist) for --code-file caching.
void write_alist(const LdpcCode& code, const std::string& path);
LdpcCode read_alist(const std::string& path);

}  // namespace mcd
