#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "pmr/codes.hpp"
#include "pmr/ldpc.hpp"

using namespace pmr;

namespace {

const char* kHammingAlist =
    "7 3\n"
    "3 4\n"
    "2 2 2 3 1 1 1\n"
    "4 4 4\n"
    "1 2 0\n1 3 0\n2 3 0\n1 2 3\n1 0 0\n2 0 0\n3 0 0\n"
    "1 2 4 5\n1 3 4 6\n2 3 4 7\n";

std::uint64_t pack(const Bits& b) {
  std::uint64_t w = 0;
  for (std::size_t i = 0; i < b.size(); ++i) w |= std::uint64_t{b[i]} << i;
  return w;
}

LlrVector clean_llr(const Bits& c, double mag) {
  LlrVector l(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) l[i] = c[i] ? mag : -mag;
  return l;
}

}  // namespace

TEST_CASE("alist: Hamming(7,4)") {
  std::istringstream is(kHammingAlist);
  const auto h = load_alist(is);
  CHECK(h.n() == 7);
  CHECK(h.m() == 3);
  CHECK(h.k() == 4);
  CHECK(h.rows() == codes::hamming74().rows());
}

TEST_CASE("alist: error paths carry line numbers") {
  SUBCASE("truncated") {
    std::istringstream is("7 3\n3 4\n2 2 2 3 1 1 1\n4 4 4\n1 2 0\n1 3 0\n");
    try {
      load_alist(is);
      FAIL("expected error");
    } catch (const AlistError& e) {
      CHECK(std::string(e.what()).find("truncated") != std::string::npos);
      CHECK(std::string(e.what()).find("column list 3") != std::string::npos);
    }
  }
  SUBCASE("weight count mismatch") {
    std::istringstream is("7 3\n3 4\n2 2 2 3 1 1\n");
    try {
      load_alist(is);
      FAIL("expected error");
    } catch (const AlistError& e) {
      CHECK(e.line() == 3);
    }
  }
  SUBCASE("index out of range") {
    std::string text = kHammingAlist;
    text.replace(text.find("1 2 0\n"), 6, "1 9 0\n");
    std::istringstream is(text);
    CHECK_THROWS_AS(load_alist(is), AlistError);
  }
  SUBCASE("duplicate") {
    std::string text = kHammingAlist;
    text.replace(text.find("1 2 4 5\n"), 8, "1 2 4 4\n");
    std::istringstream is(text);
    CHECK_THROWS_AS(load_alist(is), AlistError);
  }
  SUBCASE("row and column lists disagree") {
    std::string text = kHammingAlist;
    text.replace(text.find("2 3 4 7\n"), 8, "2 3 5 7\n");
    std::istringstream is(text);
    CHECK_THROWS_AS(load_alist(is), AlistError);
  }
  SUBCASE("non-integer token") {
    std::istringstream is("7 x\n");
    CHECK_THROWS_AS(load_alist(is), AlistError);
  }
}

TEST_CASE("alist: save/load round trip on random sparse matrices") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 25; ++trial) {
    const std::size_t n = 5 + rng() % 40, m = 1 + rng() % 20;
    std::vector<std::vector<std::uint32_t>> rows(m);
    for (auto& r : rows)
      for (std::uint32_t c = 0; c < n; ++c)
        if (rng() % 5 == 0) r.push_back(c);
    const ParityCheckMatrix h(n, rows);
    std::stringstream ss;
    save_alist(ss, h);
    const auto back = load_alist(ss);
    CHECK(back.n() == h.n());
    CHECK(back.rows() == h.rows());
    CHECK(back.cols() == h.cols());
  }
}

TEST_CASE("encode: linearity and syndrome") {
  const auto h = codes::euclidean_geometry(2);
  CHECK(h.k() == 7);
  CHECK(h.rank() == 8);
  CHECK(encode(h, Bits(7, 0)) == Bits(15, 0));
  std::mt19937_64 rng(9);
  for (int t = 0; t < 50; ++t) {
    Bits a(7), b(7), s(7);
    for (int i = 0; i < 7; ++i) {
      a[i] = rng() & 1;
      b[i] = rng() & 1;
      s[i] = a[i] ^ b[i];
    }
    const auto ca = encode(h, a), cb = encode(h, b), cs = encode(h, s);
    CHECK(h.is_codeword(ca));
    CHECK(h.extract_message(ca) == a);
    for (int i = 0; i < 15; ++i) CHECK(cs[i] == (ca[i] ^ cb[i]));
  }
  CHECK_THROWS(encode(h, Bits(6, 0)));
}

TEST_CASE("encode: Hamming(7,4) against textbook generator") {
  // G = [I_4 | P] for H = [P^T | I_3]
  const int g[4][7] = {{1, 0, 0, 0, 1, 1, 0},
                       {0, 1, 0, 0, 1, 0, 1},
                       {0, 0, 1, 0, 0, 1, 1},
                       {0, 0, 0, 1, 1, 1, 1}};
  const Bits msg{1, 0, 1, 1};
  Bits want(7, 0);
  for (int r = 0; r < 4; ++r)
    if (msg[r])
      for (int c = 0; c < 7; ++c) want[c] ^= g[r][c];
  const auto h = codes::hamming74();
  CHECK(h.info_positions() == std::vector<std::uint32_t>{0, 1, 2, 3});
  CHECK(encode(h, msg) == want);
  CHECK(want == Bits{1, 0, 1, 1, 0, 1, 0});
  const auto gen = h.generator();
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 7; ++c) CHECK(gen[r][c] == g[r][c]);
}

TEST_CASE("rank-deficient matrices reduce k") {
  // duplicate a row of the Hamming code
  auto rows = codes::hamming74().rows();
  rows.push_back(rows[0]);
  const ParityCheckMatrix h(7, rows);
  CHECK(h.m() == 4);
  CHECK(h.rank() == 3);
  CHECK(h.k() == 4);
}

TEST_CASE("bp: clean codeword is a fixed point") {
  const auto h = codes::euclidean_geometry(2);
  const Bits c = encode(h, Bits{1, 0, 1, 1, 0, 0, 1});
  const auto res = bp_decode(h, clean_llr(c, 20.0));
  CHECK(res.is_codeword);
  CHECK(res.iterations_used == 1);
  CHECK(res.hard_bits == c);
}

TEST_CASE("bp: Hamming single weak flip matches exhaustive ML") {
  const auto h = codes::hamming74();
  const auto cw = oracle::codewords(h.rows(), 7);
  CHECK(cw.size() == 16);
  std::mt19937_64 rng(21);
  for (int t = 0; t < 7; ++t) {
    Bits msg(4);
    for (auto& b : msg) b = rng() & 1;
    const auto c = encode(h, msg);
    auto llr = clean_llr(c, 4.0);
    llr[t] = c[t] ? -1.0 : 1.0;  // weak wrong sign
    const auto res = bp_decode(h, llr);
    std::vector<double> z(7);
    for (int i = 0; i < 7; ++i) z[i] = llr[i];
    const auto ml = oracle::ml_decode(cw, z, 1.0);
    CHECK(res.hard_bits == c);
    CHECK(pack(res.hard_bits) == ml.word);
  }
}

TEST_CASE("bp: saturated channel LLR pins the bit") {
  const auto h = codes::hamming74();
  auto llr = clean_llr(Bits(7, 0), 5.0);
  llr.pin(2, +1);
  const auto res = bp_decode(h, llr);
  CHECK(res.hard_bits[2] == 1);
  for (double v : res.soft_llr.values()) CHECK(!std::isnan(v));

  auto all = LlrVector(7);
  all.pin(0, -1);
  all.pin(1, +1);
  const auto r2 = bp_decode(h, all);
  CHECK(r2.hard_bits[0] == 0);
  CHECK(r2.hard_bits[1] == 1);
}

TEST_CASE("bp: exact on a cycle-free code") {
  const auto h = codes::tree7();
  const auto cw = oracle::codewords(h.rows(), 7);
  std::mt19937_64 rng(31);
  std::normal_distribution<double> g(0.0, 1.5);
  for (int t = 0; t < 50; ++t) {
    std::vector<double> l(7);
    for (auto& v : l) v = g(rng);
    const auto ref = oracle::bitwise_map(cw, l);
    const auto res = bp_decode(h, LlrVector(l), BpConfig{20, false, 1.0});
    for (int i = 0; i < 7; ++i) CHECK(std::abs(res.soft_llr[i] - ref[i]) < 1e-9);
    const auto box = bp_decode(h, LlrVector(l), BpConfig{20, false, 1.0, CheckRule::kBoxPlus});
    for (int i = 0; i < 7; ++i) CHECK(std::abs(box.soft_llr[i] - ref[i]) < 1e-9);
  }
}

TEST_CASE("bp: syndrome soundness, symmetry, determinism") {
  const auto h = codes::euclidean_geometry(2);
  std::mt19937_64 rng(41);
  std::normal_distribution<double> g(0.0, 2.0);
  for (int t = 0; t < 200; ++t) {
    std::vector<double> l(15);
    for (auto& v : l) v = g(rng);
    const BpConfig cfg{t % 3 == 0 ? 1 : 30, t % 2 == 0, t % 5 == 0 ? 0.7 : 1.0};
    const auto a = bp_decode(h, LlrVector(l), cfg);
    CHECK(a.is_codeword == (h.syndrome_weight(a.hard_bits) == 0));
    const auto b = bp_decode(h, LlrVector(l), cfg);
    CHECK(a.soft_llr == b.soft_llr);
    std::vector<double> neg(15);
    for (int i = 0; i < 15; ++i) neg[i] = -l[i];
    const auto c = bp_decode(h, LlrVector(neg), BpConfig{cfg.max_iters, false, cfg.damping});
    const auto a2 = bp_decode(h, LlrVector(l), BpConfig{cfg.max_iters, false, cfg.damping});
    // parity checks of even weight map the code onto its complement
    for (int i = 0; i < 15; ++i) CHECK(c.soft_llr[i] == doctest::Approx(-a2.soft_llr[i]).epsilon(1e-12));
  }
}

TEST_CASE("bp: odd-weight checks break output sign symmetry") {
  // With weight-3 checks, negating the inputs does not map the code onto
  // itself, so the posteriors are not simply negated; BP still matches the
  // exact MAP of the negated input on this cycle-free code.
  const auto h = codes::tree7();
  std::vector<double> l{0.3, -1.0, 2.0, 0.5, -0.7, 1.1, 0.2};
  const auto a = bp_decode(h, LlrVector(l), BpConfig{10, false, 1.0});
  std::vector<double> neg(7);
  for (int i = 0; i < 7; ++i) neg[i] = -l[i];
  const auto b = bp_decode(h, LlrVector(neg), BpConfig{10, false, 1.0});
  const auto cw = oracle::codewords(h.rows(), 7);
  const auto ref = oracle::bitwise_map(cw, neg);
  for (int i = 0; i < 7; ++i) CHECK(b.soft_llr[i] == doctest::Approx(ref[i]).epsilon(1e-9));
  double asym = 0.0;
  for (int i = 0; i < 7; ++i) asym = std::max(asym, std::abs(a.soft_llr[i] + b.soft_llr[i]));
  CHECK(asym > 1e-3);
}

TEST_CASE("bp: uncoded matrix passes LLRs through") {
  const auto h = ParityCheckMatrix::uncoded(5);
  CHECK(h.k() == 5);
  std::vector<double> l{1.0, -2.0, 0.5, -0.1, 3.0};
  const auto res = bp_decode(h, LlrVector(l));
  CHECK(res.is_codeword);
  CHECK(res.soft_llr == LlrVector(l));
}

TEST_CASE("bp config validation") {
  const auto h = codes::hamming74();
  CHECK_THROWS(bp_decode(h, LlrVector(7), BpConfig{0, true, 1.0}));
  CHECK_THROWS(bp_decode(h, LlrVector(7), BpConfig{10, true, 0.0}));
  CHECK_THROWS(bp_decode(h, LlrVector(6)));
}
