#pragma once

// Induction of a true Young tower from the auxiliary partition, plus the
// abstract renewal simulator for the tail lemma's selection scheme.

#include <cstdint>
#include <vector>

#include "nue/partition.hpp"
#include "nue/seq.hpp"
#include "nue/tails.hpp"

namespace nue {

struct TowerElement {
    long id = 0;
    double lo = 0.0;
    double hi = 0.0;               // Z_j, inside the base cell
    long return_time = 0;          // R' = t_k
    std::vector<long> step_times;  // t_0 = 0 < t_1 < ... < t_k = R'
    long k() const noexcept { return static_cast<long>(step_times.size()) - 1; }
    double width() const noexcept { return hi - lo; }
};

struct TowerResult {
    std::vector<TowerElement> elements;
    double residual_mass = 0.0;  // unreturned chains at depth L_cap + coverage defects
    int base_cell = 0;
    bool truncated = false;  // node budget exhausted before depth L_cap
};

// Composes partition return maps through actual 1D branch geometry until a
// chain lands back in the base cell. Chains are expanded breadth-first up to
// depth L_cap; everything deeper (or past `max_nodes`) is residual mass.
// `elements` must hold the partitions of every cell (tagged by source_cell).
TowerResult induce_tower(const MapSystem& map, const std::vector<PartitionElement>& elements,
                         const std::vector<Cell>& cells, int base_cell, long L_cap,
                         std::size_t max_nodes = 500000);

// Survival mass Leb{tau > n} of the explicit tower, n in [0, horizon];
// residual mass never returns and stays in every entry.
std::vector<double> tower_tail(const TowerResult& tower, long horizon);

// Full-depth tail by dynamic programming over cell-level transition masses:
// mass moves between cells with the element return times, absorbing at the
// base. For constant-derivative maps the distortion is 1 and this is the
// exact tower tail; otherwise it is the mass-level approximation.
std::vector<double> tower_tail_dp(const std::vector<PartitionElement>& elements,
                                  const std::vector<Cell>& cells, int base_cell,
                                  long tau_horizon);

// gcd of the return times; throws ContractError on an empty tower.
long gcd_period(const std::vector<TowerElement>& tower);

struct RenewalConfig {
    Seq u;                        // increment tail: P(step > n) = min(1, C u_n)
    double C = 1.0;
    double selection_prob = 0.0;  // epsilon, checked after each block of L steps
    long block_len = 1;           // L
};

// Draws i.i.d. increments with survival exactly min(1, C u_n); after every
// L-th step the walk is absorbed with probability epsilon. Returns the
// empirical tail of tau; samples passing the horizon count as censored.
// Deterministic given the seed, independent of thread count.
TailHistogram renewal_simulate(const RenewalConfig& cfg, std::size_t samples, long horizon,
                               std::uint64_t seed, unsigned threads = 1);

}  // namespace nue
