#pragma once

#include <cstddef>
#include <vector>

#include "abcmc/rng.hpp"
#include "abcmc/stats.hpp"

namespace abcmc {

enum class Topology { pop3_from_pop1, pop3_from_pop2 };

// Three-population history with two divergence events, time measured
// backwards in generations: population 3 joins its source at t_recent and
// the remaining pair joins at t_ancient. Effective size is shared.
struct PopGenConfig {
  Topology topology = Topology::pop3_from_pop1;
  double ne = 60.0;
  double t_recent = 30.0;
  double t_ancient = 60.0;
  std::size_t n_diploid = 50;
  std::size_t n_loci = 50;

  std::size_t copies_per_population() const { return 2 * n_diploid; }
  void validate() const;
};

struct GenealogyNode {
  double time = 0.0;
  int left = -1;
  int right = -1;
  int parent = -1;
};

// Binary tree over 3 * copies_per_population leaves. Leaves come first,
// population-blocked; internal nodes follow in coalescence order.
struct Genealogy {
  std::vector<GenealogyNode> nodes;
  std::size_t n_leaves = 0;
  std::size_t copies_per_population = 0;
  int root = -1;

  int leaf_population(std::size_t leaf) const {
    return static_cast<int>(leaf / copies_per_population) + 1;
  }
  std::size_t branch_count() const { return nodes.size() - 1; }
};

// Kingman coalescent within epochs: each active pair in a population merges
// at rate 1 / (2 Ne) per generation; divergence times only pool lineages.
Genealogy simulate_genealogy(const PopGenConfig& cfg, RngStream& rng);
Genealogy simulate_genealogy(const PopGenConfig& cfg, const SeedSpec& seed);

// Stepwise mutation: per branch a Poisson(theta * length) count of steps of
// size +1 or -1 with equal probability; the root allele is 0. Returns the
// per-leaf allele sizes.
std::vector<int> drop_mutations(const Genealogy& g, double theta,
                                RngStream& rng);
std::vector<int> drop_mutations(const Genealogy& g, double theta,
                                const SeedSpec& seed);

// Full dataset: n_loci independent genealogies with mutations.
MicrosatDataset simulate_microsat_dataset(const PopGenConfig& cfg, double theta,
                                          std::size_t n_loci, RngStream& rng);

}  // namespace abcmc
