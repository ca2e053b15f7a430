#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pmr/ldpc.hpp"

namespace pmr::codes {

/// Textbook H = [P^T | I_3].
ParityCheckMatrix hamming74();

/// Cycle-free chain of three weight-3 checks on 7 bits.
ParityCheckMatrix tree7();

/// Type-I two-dimensional Euclidean-geometry cyclic code over GF(2^s):
/// n = 4^s - 1, one circulant of the incidence vector of a line that misses
/// the origin. s = 2 gives (15,7), s = 4 gives (255,175).
ParityCheckMatrix euclidean_geometry(int s);

/// Binary cyclic code of length 2^m - 1 whose parity-check matrix is the
/// circulant of a low-weight idempotent. Searches unions of up to two
/// cyclotomic cosets (plus {0}) for rank n - k, preferring the largest BCH
/// bound. m = 7, k = 84 gives the (127,84) code.
ParityCheckMatrix idempotent_cyclic(int m, int k);

/// 4 x 13 array of 96 x 96 circulant permutation matrices with one zero block
/// in each of the first four block columns; shifts are drawn from a fixed
/// seed, rejecting 4-cycles, until H has full rank 384. (1248,864).
ParityCheckMatrix quasi_cyclic_1248();

struct ShippedCode {
  std::string file_name;
  ParityCheckMatrix h;
};

/// Every code shipped under data/codes, in a fixed order.
std::vector<ShippedCode> shipped();

/// Longest run of consecutive (any step coprime to n) zeros + 1 for the
/// cyclic code whose first parity-check row is `first_row`.
int bch_bound(const std::vector<std::uint8_t>& first_row, int m);

}  // namespace pmr::codes
