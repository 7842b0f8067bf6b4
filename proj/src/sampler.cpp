#include "hiercubes/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <thread>

#include "hiercubes/error.hpp"

namespace hiercubes {

namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ull;
constexpr std::uint64_t kChunk = 4096;

std::uint64_t mix(std::uint64_t x) {
  x += kGolden;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

std::uint64_t child_key(std::uint64_t parent, int c) { return mix(parent + static_cast<std::uint64_t>(c + 1) * kGolden); }

double uniform(std::uint64_t key) { return static_cast<double>(mix(key ^ 0x5851f42d4c957f2dull) >> 11) * 0x1.0p-53; }

// Walks the preorder encoding; visit(node, level, child index path offsets).
template <class Visit>
std::size_t walk(const std::vector<Configuration::Node>& nodes, std::size_t pos, int level, int m,
                 std::vector<std::uint64_t>& offset, int d, Visit&& visit) {
  const auto node = nodes.at(pos);
  visit(node, level, offset);
  ++pos;
  if (node != Configuration::Node::Split) return pos;
  for (int c = 0; c < m; ++c) {
    std::vector<std::uint64_t> child(offset);
    for (int a = 0; a < d; ++a) child[a] = 2 * offset[a] + ((c >> a) & 1);
    pos = walk(nodes, pos, level - 1, m, child, d, visit);
  }
  return pos;
}

}  // namespace

Configuration::Configuration(int d, int n, std::vector<Node> preorder) : d_(d), n_(n), nodes_(std::move(preorder)) {
  require(d >= 1 && n >= 0, "invalid configuration shape");
  std::vector<std::uint64_t> origin(d, 0);
  const std::size_t used = walk(nodes_, 0, n, 1 << d, origin, d, [&](Node node, int level, const auto&) {
    require(node != Node::EmptySite || level == 0, "empty sites exist only at level 0");
    require(node != Node::Split || level > 0, "level-0 nodes cannot split");
  });
  require(used == nodes_.size(), "preorder encoding has trailing nodes");
}

std::vector<std::uint64_t> Configuration::counts() const {
  std::vector<std::uint64_t> out(n_ + 1, 0);
  std::vector<std::uint64_t> origin(d_, 0);
  walk(nodes_, 0, n_, 1 << d_, origin, d_, [&](Node node, int level, const auto&) {
    if (node == Node::Occupied) ++out[level];
  });
  return out;
}

std::uint64_t Configuration::origin_mask() const {
  // The origin's block is always the first child, which follows its parent in preorder.
  std::uint64_t mask = 0;
  int level = n_;
  for (Node node : nodes_) {
    if (node == Node::Occupied) return mask | (std::uint64_t{1} << level);
    if (node == Node::EmptySite) return mask;
    --level;
  }
  return mask;
}

std::vector<PlacedBlock> Configuration::blocks() const {
  std::vector<PlacedBlock> out;
  std::vector<std::uint64_t> origin(d_, 0);
  walk(nodes_, 0, n_, 1 << d_, origin, d_, [&](Node node, int level, const std::vector<std::uint64_t>& offset) {
    if (node == Node::Occupied) out.push_back(PlacedBlock{level, offset});
  });
  return out;
}

std::string Configuration::key() const {
  std::string out;
  out.reserve(nodes_.size());
  for (Node node : nodes_) out.push_back(node == Node::Occupied ? 'O' : node == Node::Split ? 'S' : '.');
  return out;
}

Configuration sample_configuration(const EffectiveActivities& zhat, int n, std::uint64_t seed,
                                   const std::vector<std::uint64_t>& path) {
  require(n >= 0 && n <= zhat.N, "level outside the computed range");
  const int d = zhat.params.d();
  const int m = 1 << d;
  require(d * n <= 40, "configuration too large to materialize");
  std::vector<double> occupy(n + 1);
  for (int j = 0; j <= n; ++j) occupy[j] = logistic_from_log(zhat.log_zhat[j]);
  std::uint64_t key = mix(seed);
  for (std::uint64_t p : path) key = mix(key ^ mix(p + kGolden));

  std::vector<Configuration::Node> nodes;
  std::function<void(int, std::uint64_t)> rec = [&](int level, std::uint64_t k) {
    if (uniform(k) < occupy[level]) {
      nodes.push_back(Configuration::Node::Occupied);
      return;
    }
    if (level == 0) {
      nodes.push_back(Configuration::Node::EmptySite);
      return;
    }
    nodes.push_back(Configuration::Node::Split);
    for (int c = 0; c < m; ++c) rec(level - 1, child_key(k, c));
  };
  rec(n, key);
  return Configuration(d, n, std::move(nodes));
}

StatsAccumulator::StatsAccumulator(int d, int n)
    : d_(d), n_(n), fixed_sum_(n + 1, 0.0), volume_sum_(n + 1, 0.0), volume_sq_(n + 1, 0.0) {}

void StatsAccumulator::add(const Configuration& config) {
  if (config.d() != d_ || config.level() != n_) fail(ErrorCode::MixedEnsembles, "configurations differ in d or n");
  ++count_;
  const auto mask = config.origin_mask();
  const auto counts = config.counts();
  double covered = 0;
  for (int j = 0; j <= n_; ++j) {
    if (mask & (std::uint64_t{1} << j)) fixed_sum_[j] += 1.0;
    const double frac = std::ldexp(static_cast<double>(counts[j]), d_ * (j - n_));
    volume_sum_[j] += frac;
    volume_sq_[j] += frac * frac;
    covered += frac;
  }
  sigma_sum_ += covered;
  sigma_sq_ += covered * covered;
}

void StatsAccumulator::merge(const StatsAccumulator& other) {
  if (other.d_ != d_ || other.n_ != n_) fail(ErrorCode::MixedEnsembles, "accumulators differ in d or n");
  count_ += other.count_;
  for (int j = 0; j <= n_; ++j) {
    fixed_sum_[j] += other.fixed_sum_[j];
    volume_sum_[j] += other.volume_sum_[j];
    volume_sq_[j] += other.volume_sq_[j];
  }
  sigma_sum_ += other.sigma_sum_;
  sigma_sq_ += other.sigma_sq_;
}

namespace {

MeanSE mean_se(double sum, double sq, std::uint64_t count) {
  if (count == 0) return {};
  const double c = static_cast<double>(count);
  const double mean = sum / c;
  const double var = count > 1 ? std::max(0.0, (sq - c * mean * mean) / (c - 1)) : 0.0;
  return {mean, std::sqrt(var / c)};
}

}  // namespace

SampleStats StatsAccumulator::finish(std::uint64_t seed) const {
  SampleStats out;
  out.d = d_;
  out.n = n_;
  out.replicas = count_;
  out.seed = seed;
  const LatticeParams params(d_);
  for (int j = 0; j <= n_; ++j) {
    // indicator variance: sum of squares equals the sum
    out.rho_fixed.push_back(mean_se(fixed_sum_[j], fixed_sum_[j], count_));
    out.rho_volume.push_back(mean_se(volume_sum_[j], volume_sq_[j], count_));
    const double vol = params.block_volume(j);
    out.nu.push_back({out.rho_volume.back().mean / vol, out.rho_volume.back().se / vol});
  }
  out.sigma = mean_se(sigma_sum_, sigma_sq_, count_);
  return out;
}

SampleStats empirical_densities(const std::vector<Configuration>& configs, std::uint64_t seed) {
  require(!configs.empty(), "no configurations");
  StatsAccumulator acc(configs.front().d(), configs.front().level());
  for (const auto& c : configs) acc.add(c);
  return acc.finish(seed);
}

SampleStats sample_stats(const EffectiveActivities& zhat, int n, std::uint64_t replicas, std::uint64_t seed,
                         unsigned threads) {
  require(replicas >= 1, "at least one replica is needed");
  require(n >= 0 && n <= zhat.N, "level outside the computed range");
  const int d = zhat.params.d();
  const std::uint64_t chunks = (replicas + kChunk - 1) / kChunk;
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, chunks));

  std::vector<StatsAccumulator> partial(chunks, StatsAccumulator(d, n));
  auto run_chunk = [&](std::uint64_t c) {
    const std::uint64_t end = std::min(replicas, (c + 1) * kChunk);
    for (std::uint64_t r = c * kChunk; r < end; ++r) partial[c].add(sample_configuration(zhat, n, seed, {r}));
  };
  if (threads <= 1) {
    for (std::uint64_t c = 0; c < chunks; ++c) run_chunk(c);
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        for (std::uint64_t c = t; c < chunks; c += threads) run_chunk(c);
      });
    }
    for (auto& th : pool) th.join();
  }
  StatsAccumulator total(d, n);
  for (const auto& p : partial) total.merge(p);
  return total.finish(seed);
}

std::vector<Cube> fractal_export(const Configuration& config) {
  const int d = config.d();
  const int n = config.level();
  std::vector<Cube> out;
  std::vector<std::uint64_t> origin(d, 0);
  walk(config.preorder(), 0, n, 1 << d, origin, d,
       [&](Configuration::Node node, int level, const std::vector<std::uint64_t>& offset) {
         if (node != Configuration::Node::Occupied) return;
         Cube cube;
         cube.level = level;
         cube.side = std::ldexp(1.0, level - n);
         for (int a = 0; a < d; ++a) cube.corner.push_back(static_cast<double>(offset[a]) * cube.side);
         out.push_back(std::move(cube));
       });
  return out;
}

}  // namespace hiercubes
