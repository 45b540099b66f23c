#include "abcmc/coalescent.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace abcmc {

void PopGenConfig::validate() const {
  if (ne <= 0.0) throw DomainError("popgen.ne must be positive");
  if (!(0.0 < t_recent && t_recent < t_ancient)) {
    throw DomainError("popgen divergence times must satisfy 0 < t_recent < t_ancient");
  }
  if (n_diploid == 0) throw DomainError("popgen.n_diploid must be positive");
  if (n_loci == 0) throw DomainError("popgen.n_loci must be positive");
}

namespace {

// Removes one uniformly chosen entry, preserving the order of the rest.
// Keeping the order fixed makes the draw sequence, and hence the tree,
// a pure function of the seed.
int take_uniform(std::vector<int>& ids, RngStream& rng) {
  const std::size_t i = rng.uniform_index(ids.size());
  const int id = ids[i];
  ids.erase(ids.begin() + static_cast<std::ptrdiff_t>(i));
  return id;
}

}  // namespace

Genealogy simulate_genealogy(const PopGenConfig& cfg, RngStream& rng) {
  cfg.validate();
  const std::size_t copies = cfg.copies_per_population();
  const std::size_t n_leaves = 3 * copies;

  Genealogy g;
  g.n_leaves = n_leaves;
  g.copies_per_population = copies;
  g.nodes.resize(n_leaves);
  g.nodes.reserve(2 * n_leaves - 1);

  // Group 0/1/2 mirror populations 1/2/3 until the divergence events pool
  // them; afterwards unused groups simply stay empty.
  std::vector<std::vector<int>> groups(3);
  for (std::size_t leaf = 0; leaf < n_leaves; ++leaf) {
    groups[leaf / copies].push_back(static_cast<int>(leaf));
  }

  const double pair_rate = 1.0 / (2.0 * cfg.ne);
  double now = 0.0;
  int merges_done = 0;

  auto boundary = [&]() {
    if (merges_done == 0) return cfg.t_recent;
    if (merges_done == 1) return cfg.t_ancient;
    return std::numeric_limits<double>::infinity();
  };
  auto apply_merge = [&]() {
    if (merges_done == 0) {
      const std::size_t target = cfg.topology == Topology::pop3_from_pop1 ? 0 : 1;
      auto& src = groups[2];
      groups[target].insert(groups[target].end(), src.begin(), src.end());
      src.clear();
    } else {
      groups[0].insert(groups[0].end(), groups[1].begin(), groups[1].end());
      groups[1].clear();
    }
    ++merges_done;
  };

  std::size_t active = n_leaves;
  while (active > 1) {
    double total_rate = 0.0;
    double group_rate[3];
    for (int p = 0; p < 3; ++p) {
      const double k = static_cast<double>(groups[p].size());
      group_rate[p] = 0.5 * k * (k - 1.0) * pair_rate;
      total_rate += group_rate[p];
    }
    if (total_rate == 0.0) {
      now = boundary();
      apply_merge();
      continue;
    }
    const double wait = rng.exponential(total_rate);
    if (now + wait >= boundary()) {
      now = boundary();
      apply_merge();
      continue;
    }
    now += wait;
    double pick = rng.uniform01() * total_rate;
    int p = 0;
    while (p < 2 && pick >= group_rate[p]) {
      pick -= group_rate[p];
      ++p;
    }
    const int a = take_uniform(groups[p], rng);
    const int b = take_uniform(groups[p], rng);
    const int id = static_cast<int>(g.nodes.size());
    g.nodes.push_back({now, a, b, -1});
    g.nodes[static_cast<std::size_t>(a)].parent = id;
    g.nodes[static_cast<std::size_t>(b)].parent = id;
    groups[p].push_back(id);
    --active;
  }

  g.root = static_cast<int>(g.nodes.size()) - 1;
  return g;
}

Genealogy simulate_genealogy(const PopGenConfig& cfg, const SeedSpec& seed) {
  RngStream rng(seed);
  return simulate_genealogy(cfg, rng);
}

std::vector<int> drop_mutations(const Genealogy& g, double theta,
                                RngStream& rng) {
  if (theta < 0.0) throw DomainError("mutation rate must be non-negative");
  const std::size_t n = g.nodes.size();
  // Net allelic displacement per branch; nodes are in increasing-time order
  // so a single reverse pass pushes alleles from the root to the leaves.
  std::vector<int> allele(n, 0);
  std::vector<int> step(n, 0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const int parent = g.nodes[i].parent;
    const double length = g.nodes[static_cast<std::size_t>(parent)].time - g.nodes[i].time;
    const std::uint64_t k = rng.poisson(theta * length);
    int net = 0;
    for (std::uint64_t m = 0; m < k; ++m) {
      net += (rng.next_u64() & 1ULL) ? 1 : -1;
    }
    step[i] = net;
  }
  for (std::size_t i = n - 1; i-- > 0;) {
    const int parent = g.nodes[i].parent;
    allele[i] = allele[static_cast<std::size_t>(parent)] + step[i];
  }
  allele.resize(g.n_leaves);
  return allele;
}

std::vector<int> drop_mutations(const Genealogy& g, double theta,
                                const SeedSpec& seed) {
  RngStream rng(seed);
  return drop_mutations(g, theta, rng);
}

MicrosatDataset simulate_microsat_dataset(const PopGenConfig& cfg, double theta,
                                          std::size_t n_loci, RngStream& rng) {
  if (n_loci == 0) throw DomainError("dataset needs at least one locus");
  const std::size_t copies = cfg.copies_per_population();
  MicrosatDataset out;
  out.loci.resize(n_loci);
  for (std::size_t l = 0; l < n_loci; ++l) {
    const Genealogy g = simulate_genealogy(cfg, rng);
    const std::vector<int> alleles = drop_mutations(g, theta, rng);
    for (int p = 0; p < 3; ++p) {
      auto& pop = out.loci[l][static_cast<std::size_t>(p)];
      pop.assign(alleles.begin() + static_cast<std::ptrdiff_t>(p * copies),
                 alleles.begin() + static_cast<std::ptrdiff_t>((p + 1) * copies));
    }
  }
  return out;
}

}  // namespace abcmc
