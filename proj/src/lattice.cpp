#include "hiercubes/lattice.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "hiercubes/error.hpp"

namespace hiercubes {

LatticeParams::LatticeParams(int d) : d_(d) {
  require(d >= 1 && d <= kMaxDimension,
          "dimension must be in [1, " + std::to_string(kMaxDimension) + "], got " + std::to_string(d));
}

double LatticeParams::block_volume(int j) const {
  require(j >= 0, "block level must be nonnegative");
  return std::ldexp(1.0, d_ * j);
}

double LatticeParams::log_block_volume(int j) const {
  require(j >= 0, "block level must be nonnegative");
  return static_cast<double>(d_) * j * std::numbers::ln2;
}

mpz_class LatticeParams::block_volume_exact(int j) const {
  require(j >= 0, "block level must be nonnegative");
  mpz_class v = 1;
  mpz_mul_2exp(v.get_mpz_t(), v.get_mpz_t(), static_cast<mp_bitcnt_t>(d_) * static_cast<mp_bitcnt_t>(j));
  return v;
}

}  // namespace hiercubes
