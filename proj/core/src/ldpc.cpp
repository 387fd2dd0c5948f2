#include "mcd/ldpc.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <utility>

#include "mcd/errors.hpp"
#include "mcd/rng.hpp"

namespace mcd {
namespace {

constexpr double kTanhFloor = 1e-12;
constexpr int kBuildAttempts = 100;

bool contains(const std::vector<int>& v, int x) {
  return std::find(v.begin(), v.end(), x) != v.end();
}

// Uniform stub matching between variable and check sockets.
std::vector<std::vector<int>> stub_matching(int n, int m, int dv, int dc,
                                            Xoshiro256pp& rng) {
  std::vector<int> sockets;
  sockets.reserve(size_t(m) * size_t(dc));
  for (int i = 0; i < m; ++i) {
    for (int t = 0; t < dc; ++t) sockets.push_back(i);
  }
  shuffle(sockets, rng);
  std::vector<std::vector<int>> checks(static_cast<size_t>(m));
  for (auto& c : checks) c.reserve(size_t(dc));
  size_t s = 0;
  for (int v = 0; v < n; ++v) {
    for (int t = 0; t < dv; ++t) checks[size_t(sockets[s++])].push_back(v);
  }
  return checks;
}

// Swap duplicate edges against random partners until the graph is simple.
bool make_simple(std::vector<std::vector<int>>& checks, int dc,
                 Xoshiro256pp& rng) {
  int m = int(checks.size());
  for (int guard = 0; guard < 10000; ++guard) {
    int dup_check = -1, dup_slot = -1;
    for (int i = 0; i < m && dup_check < 0; ++i) {
      for (int a = 0; a < dc && dup_check < 0; ++a) {
        for (int b = a + 1; b < dc; ++b) {
          if (checks[size_t(i)][size_t(a)] == checks[size_t(i)][size_t(b)]) {
            dup_check = i;
            dup_slot = b;
            break;
          }
        }
      }
    }
    if (dup_check < 0) return true;

    int v = checks[size_t(dup_check)][size_t(dup_slot)];
    bool swapped = false;
    for (int tries = 0; tries < 400 && !swapped; ++tries) {
      int d = int(bounded(rng, uint64_t(m)));
      int s = int(bounded(rng, uint64_t(dc)));
      int w = checks[size_t(d)][size_t(s)];
      if (d == dup_check || w == v) continue;
      if (contains(checks[size_t(dup_check)], w)) continue;
      if (contains(checks[size_t(d)], v)) continue;
      checks[size_t(dup_check)][size_t(dup_slot)] = w;
      checks[size_t(d)][size_t(s)] = v;
      swapped = true;
    }
    if (!swapped) return false;
  }
  return false;
}

// Number of length-4 cycles: variable pairs sharing c checks give C(c,2).
int count_four_cycles(const std::vector<std::vector<int>>& checks) {
  std::map<std::pair<int, int>, int> shared;
  for (const auto& cols : checks) {
    for (size_t a = 0; a < cols.size(); ++a) {
      for (size_t b = a + 1; b < cols.size(); ++b) {
        int x = cols[a], y = cols[b];
        if (x > y) std::swap(x, y);
        ++shared[{x, y}];
      }
    }
  }
  int total = 0;
  for (const auto& [pair, c] : shared) total += c * (c - 1) / 2;
  return total;
}

// Greedy cycle reduction: locate one 4-cycle, break one of its edges by
// swapping against a random edge, keep the move only if the global count
// drops. Leaves the best configuration seen when the budget runs out.
int reduce_four_cycles(std::vector<std::vector<int>>& checks, int dc,
                       Xoshiro256pp& rng) {
  int m = int(checks.size());
  int current = count_four_cycles(checks);
  auto best = checks;
  int best_count = current;
  int stale = 0;

  for (int moves = 0; moves < 500 && current > 0 && stale < 3; ++moves) {
    // first variable pair seen twice, in deterministic scan order
    std::map<std::pair<int, int>, int> first_seen;
    int c2 = -1, vb = -1;
    for (int i = 0; i < m && c2 < 0; ++i) {
      const auto& cols = checks[size_t(i)];
      for (size_t a = 0; a < cols.size() && c2 < 0; ++a) {
        for (size_t b = a + 1; b < cols.size(); ++b) {
          int x = cols[a], y = cols[b];
          if (x > y) std::swap(x, y);
          auto [it, fresh] = first_seen.try_emplace({x, y}, i);
          if (!fresh) {
            c2 = i;
            vb = y;
            break;
          }
        }
      }
    }
    if (c2 < 0) break;

    int slot = -1;
    for (int t = 0; t < dc; ++t) {
      if (checks[size_t(c2)][size_t(t)] == vb) slot = t;
    }
    bool improved = false;
    for (int tries = 0; tries < 60 && !improved; ++tries) {
      int d = int(bounded(rng, uint64_t(m)));
      int s = int(bounded(rng, uint64_t(dc)));
      int w = checks[size_t(d)][size_t(s)];
      if (d == c2 || w == vb) continue;
      if (contains(checks[size_t(c2)], w)) continue;
      if (contains(checks[size_t(d)], vb)) continue;
      checks[size_t(c2)][size_t(slot)] = w;
      checks[size_t(d)][size_t(s)] = vb;
      int count = count_four_cycles(checks);
      if (count < current) {
        current = count;
        improved = true;
        if (count < best_count) {
          best_count = count;
          best = checks;
        }
      } else {
        checks[size_t(c2)][size_t(slot)] = vb;
        checks[size_t(d)][size_t(s)] = w;
      }
    }
    stale = improved ? 0 : stale + 1;
  }
  if (best_count < current) checks = best;
  return std::min(best_count, current);
}

// Full reduction over GF(2); returns rank and fills the systematic
// generator plus the free (message) columns on success.
bool solve_generator(const std::vector<std::vector<int>>& checks, int n,
                     int m, LdpcCode& code) {
  int words = (n + 63) / 64;
  std::vector<uint64_t> rows(size_t(m) * size_t(words), 0);
  auto bit = [&](int r, int c) -> uint64_t {
    return (rows[size_t(r) * size_t(words) + size_t(c >> 6)] >> (c & 63)) & 1;
  };
  for (int i = 0; i < m; ++i) {
    for (int v : checks[size_t(i)]) {
      rows[size_t(i) * size_t(words) + size_t(v >> 6)] ^= 1ULL << (v & 63);
    }
  }

  std::vector<int> pivot_cols;
  int r = 0;
  for (int col = 0; col < n && r < m; ++col) {
    int pr = -1;
    for (int i = r; i < m; ++i) {
      if (bit(i, col)) {
        pr = i;
        break;
      }
    }
    if (pr < 0) continue;
    for (int w = 0; w < words; ++w) {
      std::swap(rows[size_t(pr) * size_t(words) + size_t(w)],
                rows[size_t(r) * size_t(words) + size_t(w)]);
    }
    for (int i = 0; i < m; ++i) {
      if (i != r && bit(i, col)) {
        for (int w = 0; w < words; ++w) {
          rows[size_t(i) * size_t(words) + size_t(w)] ^=
              rows[size_t(r) * size_t(words) + size_t(w)];
        }
      }
    }
    pivot_cols.push_back(col);
    ++r;
  }
  if (r < m) return false;

  std::vector<uint8_t> is_pivot(size_t(n), 0);
  for (int c : pivot_cols) is_pivot[size_t(c)] = 1;
  code.message_cols.clear();
  for (int c = 0; c < n; ++c) {
    if (!is_pivot[size_t(c)]) code.message_cols.push_back(c);
  }

  code.gen_words = words;
  code.gen_rows.assign(size_t(code.k) * size_t(words), 0);
  for (int j = 0; j < code.k; ++j) {
    int f = code.message_cols[size_t(j)];
    uint64_t* row = &code.gen_rows[size_t(j) * size_t(words)];
    row[f >> 6] |= 1ULL << (f & 63);
    for (int i = 0; i < m; ++i) {
      if (bit(i, f)) {
        int p = pivot_cols[size_t(i)];
        row[p >> 6] |= 1ULL << (p & 63);
      }
    }
  }
  return true;
}

// Sorted adjacency plus the edge ids each variable owns in check-major order.
void index_graph(LdpcCode& code) {
  int m = code.checks();
  for (auto& cols : code.check_cols) std::sort(cols.begin(), cols.end());
  code.var_checks.assign(size_t(code.n), {});
  code.var_edges.assign(size_t(code.n) * size_t(code.var_degree), 0);
  std::vector<int> fill(size_t(code.n), 0);
  for (int i = 0; i < m; ++i) {
    for (int t = 0; t < code.check_degree; ++t) {
      int v = code.check_cols[size_t(i)][size_t(t)];
      code.var_checks[size_t(v)].push_back(i);
      code.var_edges[size_t(v) * size_t(code.var_degree) +
                     size_t(fill[size_t(v)])] = i * code.check_degree + t;
      ++fill[size_t(v)];
    }
  }
}

void check_regular(const LdpcCode& code) {
  for (const auto& cols : code.check_cols) {
    if (int(cols.size()) != code.check_degree) {
      throw construction_error("check degree mismatch");
    }
  }
  for (const auto& rows : code.var_checks) {
    if (int(rows.size()) != code.var_degree) {
      throw construction_error("variable degree mismatch");
    }
  }
}

void require_bits(const BitVector& v, const char* what) {
  for (uint8_t b : v) {
    if (b > 1) throw validation_error(std::string(what) + " must be 0/1");
  }
}

}  // namespace

LdpcCode build_regular_code(int n, int k, uint64_t seed) {
  if (k < 3 || n != 2 * k) {
    throw validation_error("need n = 2k and k >= 3 for a (3,6) code");
  }
  int m = n - k;
  LdpcCode code;
  code.n = n;
  code.k = k;
  code.seed = seed;

  int rank_failures = 0, simple_failures = 0;
  for (int attempt = 0; attempt < kBuildAttempts; ++attempt) {
    Xoshiro256pp rng(derive_seed(seed, seed_tag::ldpc, uint64_t(attempt)));
    auto checks = stub_matching(n, m, code.var_degree, code.check_degree, rng);
    if (!make_simple(checks, code.check_degree, rng)) {
      ++simple_failures;
      continue;
    }
    code.four_cycle_count =
        reduce_four_cycles(checks, code.check_degree, rng);
    code.check_cols = std::move(checks);
    if (!solve_generator(code.check_cols, n, m, code)) {
      ++rank_failures;
      continue;
    }
    index_graph(code);
    check_regular(code);
    return code;
  }
  std::ostringstream msg;
  msg << "no full-rank (3,6) code for n=" << n << " k=" << k << " seed="
      << seed << " after " << kBuildAttempts << " attempts ("
      << rank_failures << " rank-deficient, " << simple_failures
      << " multi-edge repairs failed)";
  throw construction_error(msg.str());
}

BitVector encode(const LdpcCode& code, const BitVector& u) {
  if (int(u.size()) != code.k) throw validation_error("message length != k");
  require_bits(u, "message");
  std::vector<uint64_t> acc(size_t(code.gen_words), 0);
  for (int j = 0; j < code.k; ++j) {
    if (!u[size_t(j)]) continue;
    const uint64_t* row = &code.gen_rows[size_t(j) * size_t(code.gen_words)];
    for (int w = 0; w < code.gen_words; ++w) acc[size_t(w)] ^= row[w];
  }
  BitVector c(static_cast<size_t>(code.n));
  for (int i = 0; i < code.n; ++i) {
    c[size_t(i)] = uint8_t((acc[size_t(i >> 6)] >> (i & 63)) & 1);
  }
  return c;
}

BitVector syndrome(const LdpcCode& code, const BitVector& word) {
  if (int(word.size()) != code.n) throw validation_error("word length != n");
  require_bits(word, "word");
  BitVector s(static_cast<size_t>(code.checks()));
  for (int i = 0; i < code.checks(); ++i) {
    uint8_t acc = 0;
    for (int v : code.check_cols[size_t(i)]) acc ^= word[size_t(v)];
    s[size_t(i)] = acc;
  }
  return s;
}

DecodeResult decode_bp(const LdpcCode& code, const LlrVector& llr,
                       int max_iter) {
  if (int(llr.size()) != code.n) throw validation_error("llr length != n");
  if (max_iter < 1) throw validation_error("max_iter must be >= 1");
  const int n = code.n, m = code.checks(), dv = code.var_degree,
            dc = code.check_degree;

  LlrVector channel(static_cast<size_t>(n));
  for (int v = 0; v < n; ++v) {
    double x = llr[size_t(v)];
    if (std::isnan(x)) throw validation_error("llr must not be NaN");
    channel[size_t(v)] = std::clamp(x, -kLlrClamp, kLlrClamp);
  }

  DecodeResult result;
  result.decoded.assign(size_t(n), 0);
  auto harden = [&](const LlrVector& posterior) {
    for (int v = 0; v < n; ++v) {
      result.decoded[size_t(v)] = posterior[size_t(v)] < 0 ? 1 : 0;
    }
  };
  auto satisfied = [&]() {
    for (int i = 0; i < m; ++i) {
      uint8_t acc = 0;
      for (int v : code.check_cols[size_t(i)]) acc ^= result.decoded[size_t(v)];
      if (acc) return false;
    }
    return true;
  };

  harden(channel);
  if (satisfied()) {
    result.iterations = 0;
    result.converged = true;
    return result;
  }

  const int edges = m * dc;
  LlrVector v2c(static_cast<size_t>(edges)), c2v(static_cast<size_t>(edges));
  for (int i = 0; i < m; ++i) {
    for (int t = 0; t < dc; ++t) {
      v2c[size_t(i * dc + t)] =
          channel[size_t(code.check_cols[size_t(i)][size_t(t)])];
    }
  }

  std::vector<double> tanh_in(static_cast<size_t>(dc)), prefix(size_t(dc) + 1),
      suffix(size_t(dc) + 1);
  LlrVector posterior(static_cast<size_t>(n));
  for (int iter = 1; iter <= max_iter; ++iter) {
    for (int i = 0; i < m; ++i) {
      const int base = i * dc;
      for (int t = 0; t < dc; ++t) {
        double f = std::tanh(0.5 * v2c[size_t(base + t)]);
        if (std::fabs(f) < kTanhFloor) f = std::copysign(kTanhFloor, f);
        tanh_in[size_t(t)] = f;
      }
      prefix[0] = 1.0;
      for (int t = 0; t < dc; ++t) {
        prefix[size_t(t + 1)] = prefix[size_t(t)] * tanh_in[size_t(t)];
      }
      suffix[size_t(dc)] = 1.0;
      for (int t = dc - 1; t >= 0; --t) {
        suffix[size_t(t)] = suffix[size_t(t + 1)] * tanh_in[size_t(t)];
      }
      for (int t = 0; t < dc; ++t) {
        c2v[size_t(base + t)] =
            2.0 * std::atanh(prefix[size_t(t)] * suffix[size_t(t + 1)]);
      }
    }

    for (int v = 0; v < n; ++v) {
      double total = channel[size_t(v)];
      const int* ve = &code.var_edges[size_t(v) * size_t(dv)];
      for (int t = 0; t < dv; ++t) total += c2v[size_t(ve[t])];
      posterior[size_t(v)] = total;
      for (int t = 0; t < dv; ++t) {
        v2c[size_t(ve[t])] =
            std::clamp(total - c2v[size_t(ve[t])], -kLlrClamp, kLlrClamp);
      }
    }

    harden(posterior);
    result.iterations = iter;
    if (satisfied()) {
      result.converged = true;
      return result;
    }
  }
  result.converged = false;
  return result;
}

void write_alist(const LdpcCode& code, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot open for writing: " + path);
  int m = code.checks();
  out << code.n << " " << m << "\n";
  out << code.var_degree << " " << code.check_degree << "\n";
  for (int v = 0; v < code.n; ++v) {
    out << code.var_degree << (v + 1 < code.n ? " " : "\n");
  }
  for (int i = 0; i < m; ++i) {
    out << code.check_degree << (i + 1 < m ? " " : "\n");
  }
  for (int v = 0; v < code.n; ++v) {
    const auto& cs = code.var_checks[size_t(v)];
    for (size_t t = 0; t < cs.size(); ++t) {
      out << cs[t] + 1 << (t + 1 < cs.size() ? " " : "\n");
    }
  }
  for (int i = 0; i < m; ++i) {
    const auto& vs = code.check_cols[size_t(i)];
    for (size_t t = 0; t < vs.size(); ++t) {
      out << vs[t] + 1 << (t + 1 < vs.size() ? " " : "\n");
    }
  }
  if (!out) throw io_error("write failed: " + path);
}

LdpcCode read_alist(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open: " + path);
  auto next_int = [&](const char* what) {
    long long v;
    if (!(in >> v)) throw io_error(path + ": truncated alist, expected " +
                                   what);
    return v;
  };
  long long n = next_int("n"), m = next_int("m");
  if (n < 6 || m < 3 || n != 2 * m) {
    throw io_error(path + ": not a rate-1/2 code layout");
  }
  long long dv = next_int("max var degree"), dc = next_int("max check degree");
  if (dv != 3 || dc != 6) throw io_error(path + ": not a (3,6) code");
  for (long long v = 0; v < n; ++v) {
    if (next_int("var degree") != dv) {
      throw io_error(path + ": irregular variable degree");
    }
  }
  for (long long i = 0; i < m; ++i) {
    if (next_int("check degree") != dc) {
      throw io_error(path + ": irregular check degree");
    }
  }

  std::vector<std::vector<int>> var_checks(static_cast<size_t>(n));
  for (long long v = 0; v < n; ++v) {
    for (int t = 0; t < dv; ++t) {
      long long c = next_int("check id");
      if (c == 0) continue;  // tolerated alist padding
      if (c < 1 || c > m) throw io_error(path + ": check id out of range");
      var_checks[size_t(v)].push_back(int(c - 1));
    }
    if (int(var_checks[size_t(v)].size()) != dv) {
      throw io_error(path + ": padded variable row below degree 3");
    }
  }
  std::vector<std::vector<int>> check_cols(static_cast<size_t>(m));
  for (long long i = 0; i < m; ++i) {
    for (int t = 0; t < dc; ++t) {
      long long v = next_int("variable id");
      if (v == 0) continue;
      if (v < 1 || v > n) throw io_error(path + ": variable id out of range");
      check_cols[size_t(i)].push_back(int(v - 1));
    }
    if (int(check_cols[size_t(i)].size()) != dc) {
      throw io_error(path + ": padded check row below degree 6");
    }
  }

  // the two adjacency views must describe the same edge set
  std::vector<std::pair<int, int>> a, b;
  for (long long v = 0; v < n; ++v) {
    for (int c : var_checks[size_t(v)]) a.push_back({int(v), c});
  }
  for (long long i = 0; i < m; ++i) {
    for (int v : check_cols[size_t(i)]) b.push_back({v, int(i)});
  }
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  if (a != b) throw io_error(path + ": row and column lists disagree");
  for (size_t e = 1; e < a.size(); ++e) {
    if (a[e] == a[e - 1]) throw io_error(path + ": duplicate edge");
  }

  LdpcCode code;
  code.n = int(n);
  code.k = int(n - m);
  code.check_cols = std::move(check_cols);
  code.four_cycle_count = count_four_cycles(code.check_cols);
  if (!solve_generator(code.check_cols, code.n, int(m), code)) {
    throw construction_error(path + ": parity-check matrix is rank-deficient");
  }
  index_graph(code);
  check_regular(code);
  return code;
}

}  // namespace mcd
