#include "hiercubes/oracle.hpp"

#include <bit>
#include <functional>
#include <cmath>
#include <numbers>

#include "hiercubes/error.hpp"

namespace hiercubes {

namespace {

std::vector<std::uint32_t> product(const std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b) {
  std::vector<std::uint32_t> out;
  out.reserve(a.size() * b.size());
  for (auto x : a)
    for (auto y : b) out.push_back(x | y);
  return out;
}

}  // namespace

double log_rational(const mpq_class& q) {
  require(q > 0, "log of a nonpositive rational");
  long en = 0, ed = 0;
  const double mn = mpz_get_d_2exp(&en, q.get_num_mpz_t());
  const double md = mpz_get_d_2exp(&ed, q.get_den_mpz_t());
  return std::log(mn / md) + static_cast<double>(en - ed) * std::numbers::ln2;
}

EnumerationOracle::EnumerationOracle(const LatticeParams& params, int n) : params_(params), n_(n) {
  require(n >= 0, "level must be nonnegative");
  const int d = params.d();
  // block count sum_j 2^{d(n-j)}
  long total = 0;
  for (int j = 0; j <= n; ++j) {
    if (d * (n - j) >= 6) fail(ErrorCode::TooLarge, "more than 32 blocks to enumerate");
    total += 1L << (d * (n - j));
    if (total > kMaxBlocks) fail(ErrorCode::TooLarge, "more than 32 blocks to enumerate");
  }
  level_start_.resize(n + 2);
  level_mask_.assign(n + 1, 0);
  for (int j = 0; j <= n; ++j) {
    level_start_[j] = static_cast<int>(blocks_.size());
    const std::uint64_t side = std::uint64_t{1} << (n - j);
    const std::uint64_t per_level = std::uint64_t{1} << (d * (n - j));
    for (std::uint64_t lin = 0; lin < per_level; ++lin) {
      PlacedBlock b{j, std::vector<std::uint64_t>(d)};
      std::uint64_t rest = lin;
      for (int a = 0; a < d; ++a) {
        b.offset[a] = rest % side;
        rest /= side;
      }
      level_mask_[j] |= std::uint32_t{1} << blocks_.size();
      blocks_.push_back(std::move(b));
    }
  }
  level_start_[n + 1] = static_cast<int>(blocks_.size());

  // configurations of the block at (j, offset): occupied, or a product over children
  std::function<std::vector<std::uint32_t>(int, const std::vector<std::uint64_t>&)> rec =
      [&](int j, const std::vector<std::uint64_t>& off) {
        const std::uint32_t self = std::uint32_t{1} << block_index(PlacedBlock{j, off});
        if (j == 0) return std::vector<std::uint32_t>{self, 0};
        std::vector<std::uint32_t> acc{0};
        for (int c = 0; c < params_.children(); ++c) {
          std::vector<std::uint64_t> child(d);
          for (int a = 0; a < d; ++a) child[a] = 2 * off[a] + ((c >> a) & 1);
          acc = product(acc, rec(j - 1, child));
        }
        acc.push_back(self);
        return acc;
      };
  masks_ = rec(n, std::vector<std::uint64_t>(d, 0));

  radix_.resize(n + 1);
  std::size_t cells = 1;
  for (int j = 0; j <= n; ++j) {
    radix_[j] = (std::uint64_t{1} << (d * (n - j))) + 1;
    cells *= radix_[j];
  }
  tally_.assign(cells, 0);
  for (auto mask : masks_) ++tally_[dense_index(mask)];
}

int EnumerationOracle::block_index(const PlacedBlock& b) const {
  require(b.level >= 0 && b.level <= n_, "block level outside Lambda_n");
  require(static_cast<int>(b.offset.size()) == params_.d(), "block offset has the wrong dimension");
  const std::uint64_t side = std::uint64_t{1} << (n_ - b.level);
  std::uint64_t lin = 0;
  for (int a = params_.d() - 1; a >= 0; --a) {
    require(b.offset[a] < side, "block offset outside Lambda_n");
    lin = lin * side + b.offset[a];
  }
  return level_start_[b.level] + static_cast<int>(lin);
}

std::uint32_t EnumerationOracle::mask_of(const Configuration& config) const {
  require(config.d() == params_.d() && config.level() == n_, "configuration shape does not match the oracle");
  std::uint32_t mask = 0;
  for (const auto& b : config.blocks()) mask |= std::uint32_t{1} << block_index(b);
  return mask;
}

std::vector<std::uint64_t> EnumerationOracle::counts_of(std::uint32_t mask) const {
  std::vector<std::uint64_t> out(n_ + 1);
  for (int j = 0; j <= n_; ++j) out[j] = std::popcount(mask & level_mask_[j]);
  return out;
}

std::size_t EnumerationOracle::dense_index(std::uint32_t mask) const {
  std::size_t idx = 0;
  for (int j = n_; j >= 0; --j) idx = idx * radix_[j] + std::popcount(mask & level_mask_[j]);
  return idx;
}

std::vector<std::uint64_t> EnumerationOracle::decode(std::size_t index) const {
  std::vector<std::uint64_t> out(n_ + 1);
  for (int j = 0; j <= n_; ++j) {
    out[j] = index % radix_[j];
    index /= radix_[j];
  }
  return out;
}

std::uint64_t EnumerationOracle::multicanonical_count(const std::vector<std::uint64_t>& counts) const {
  require(static_cast<int>(counts.size()) <= n_ + 1, "counts beyond level n");
  std::size_t idx = 0;
  for (int j = n_; j >= 0; --j) {
    const std::uint64_t c = j < static_cast<int>(counts.size()) ? counts[j] : 0;
    if (c >= radix_[j]) return 0;
    idx = idx * radix_[j] + c;
  }
  return tally_[idx];
}

std::vector<std::pair<std::vector<std::uint64_t>, std::uint64_t>> EnumerationOracle::count_table() const {
  std::vector<std::pair<std::vector<std::uint64_t>, std::uint64_t>> out;
  for (std::size_t i = 0; i < tally_.size(); ++i)
    if (tally_[i] != 0) out.emplace_back(decode(i), tally_[i]);
  return out;
}

mpq_class EnumerationOracle::weight(std::uint32_t mask, const std::vector<mpq_class>& z) const {
  require(static_cast<int>(z.size()) == n_ + 1, "need one activity per level");
  mpq_class w = 1;
  const auto counts = counts_of(mask);
  for (int j = 0; j <= n_; ++j)
    for (std::uint64_t k = 0; k < counts[j]; ++k) w *= z[j];
  return w;
}

mpq_class EnumerationOracle::sum_tally(const std::vector<std::uint64_t>& tally, const std::vector<mpq_class>& z) const {
  require(static_cast<int>(z.size()) == n_ + 1, "need one activity per level");
  for (const auto& x : z) require(x >= 0, "activities must be nonnegative");
  // powers z_j^k for k up to the radix
  std::vector<std::vector<mpq_class>> pw(n_ + 1);
  for (int j = 0; j <= n_; ++j) {
    pw[j].resize(radix_[j]);
    pw[j][0] = 1;
    for (std::uint64_t k = 1; k < radix_[j]; ++k) pw[j][k] = pw[j][k - 1] * z[j];
  }
  mpq_class total = 0;
  for (std::size_t i = 0; i < tally.size(); ++i) {
    if (tally[i] == 0) continue;
    const auto counts = decode(i);
    mpq_class term(static_cast<unsigned long>(tally[i]));
    for (int j = 0; j <= n_; ++j) term *= pw[j][counts[j]];
    total += term;
  }
  return total;
}

mpq_class EnumerationOracle::partition(const std::vector<mpq_class>& z) const { return sum_tally(tally_, z); }

mpq_class EnumerationOracle::block_probability(const std::vector<mpq_class>& z, const PlacedBlock& block) const {
  const std::uint32_t bit = std::uint32_t{1} << block_index(block);
  std::vector<std::uint64_t> tally(tally_.size(), 0);
  for (auto mask : masks_)
    if (mask & bit) ++tally[dense_index(mask)];
  mpq_class p = sum_tally(tally, z) / partition(z);
  p.canonicalize();
  return p;
}

PartitionValue enumerate_partition(const LatticeParams& params, int n, const std::vector<mpq_class>& z) {
  EnumerationOracle oracle(params, n);
  PartitionValue out;
  out.exact = oracle.partition(z);
  out.log_value = log_rational(out.exact);
  return out;
}

mpq_class block_probability(const LatticeParams& params, int n, const std::vector<mpq_class>& z,
                            const PlacedBlock& block) {
  return EnumerationOracle(params, n).block_probability(z, block);
}

std::uint64_t multicanonical_count(const LatticeParams& params, int n, const std::vector<std::uint64_t>& counts) {
  return EnumerationOracle(params, n).multicanonical_count(counts);
}

}  // namespace hiercubes
