#include "nue/tower.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>

#include "nue/numeric.hpp"
#include "nue/parallel.hpp"
#include "nue/rng.hpp"

namespace nue {
namespace {

// inverse-branch pullback of [a, b] through a concatenated itinerary;
// duplicated from the partition internals on purpose: the tower composes the
// same maps, and sharing the helper keeps the two modules decoupled only at
// the interface level.
std::pair<double, double> pull_chain_tower(const MapSystem& map,
                                           const std::vector<int>& branches, double a,
                                           double b) {
    for (std::size_t k = branches.size(); k > 0; --k) {
        const int j = branches[k - 1];
        switch (map.kind) {
            case MapKind::doubling:
                a = 0.5 * (a + j);
                b = 0.5 * (b + j);
                break;
            case MapKind::ternary:
                a = (a + j) / 3.0;
                b = (b + j) / 3.0;
                break;
            case MapKind::quadratic: {
                if (!(b < map.a0))
                    throw DomainError("tower pullback leaves the quadratic branch image");
                const double pa = std::sqrt(map.a0 - a);
                const double pb = std::sqrt(map.a0 - b);
                if (j == 0) {
                    a = -pa;
                    b = -pb;
                } else {
                    a = pb;
                    b = pa;
                }
                if (a > b) std::swap(a, b);
                break;
            }
            case MapKind::cubic:
                a = std::cbrt(a);
                b = std::cbrt(b);
                break;
            default:
                throw DomainError("tower pullback: unsupported map kind");
        }
    }
    return {a, b};
}

struct ChainNode {
    double lo, hi;
    std::vector<int> itinerary;
    std::vector<long> step_times;
    int cell;
    long depth;
};

}  // namespace

TowerResult induce_tower(const MapSystem& map, const std::vector<PartitionElement>& elements,
                         const std::vector<Cell>& cells, int base_cell, long L_cap,
                         std::size_t max_nodes) {
    if (L_cap < 1) throw ContractError("induce_tower: L_cap must be >= 1");
    if (base_cell < 0 || static_cast<std::size_t>(base_cell) >= cells.size())
        throw ContractError("induce_tower: invalid base cell");

    std::vector<std::vector<const PartitionElement*>> per_cell(cells.size());
    for (const PartitionElement& e : elements)
        per_cell[static_cast<std::size_t>(e.source_cell)].push_back(&e);
    if (per_cell[static_cast<std::size_t>(base_cell)].empty())
        throw ContractError("induce_tower: base cell has no partition elements");

    // every cell must be reachable / partitioned; report rather than fail
    TowerResult res;
    res.base_cell = base_cell;

    NeumaierSum residual;
    NeumaierSum emitted;
    std::deque<ChainNode> queue;
    queue.push_back(ChainNode{cells[static_cast<std::size_t>(base_cell)].lo,
                              cells[static_cast<std::size_t>(base_cell)].hi,
                              {},
                              {0},
                              base_cell,
                              0});
    std::size_t nodes = 0;
    long next_id = 0;

    while (!queue.empty()) {
        ChainNode node = std::move(queue.front());
        queue.pop_front();
        if (++nodes > max_nodes) {
            res.truncated = true;
            residual.add(node.hi - node.lo);
            continue;
        }
        if (node.depth >= L_cap) {
            residual.add(node.hi - node.lo);
            continue;
        }
        NeumaierSum child_mass;
        for (const PartitionElement* e : per_cell[static_cast<std::size_t>(node.cell)]) {
            double a = e->lo, b = e->hi;
            try {
                if (!node.itinerary.empty()) {
                    auto [na, nb] = pull_chain_tower(map, node.itinerary, a, b);
                    a = na;
                    b = nb;
                }
            } catch (const DomainError&) {
                continue;  // degenerate sliver; its mass stays in the defect
            }
            if (!(a < b)) continue;
            child_mass.add(b - a);
            std::vector<int> itin = node.itinerary;
            itin.insert(itin.end(), e->branches.begin(), e->branches.end());
            std::vector<long> steps = node.step_times;
            steps.push_back(steps.back() + e->return_time);
            if (e->target_cell == base_cell) {
                TowerElement z;
                z.id = next_id++;
                z.lo = a;
                z.hi = b;
                z.step_times = std::move(steps);
                z.return_time = z.step_times.back();
                res.elements.push_back(std::move(z));
                emitted.add(b - a);
            } else {
                queue.push_back(
                    ChainNode{a, b, std::move(itin), std::move(steps), e->target_cell,
                              node.depth + 1});
            }
        }
        // the part of the node not covered by the cell's partition
        residual.add((node.hi - node.lo) - child_mass.value());
    }
    res.residual_mass = residual.value();
    return res;
}

std::vector<double> tower_tail(const TowerResult& tower, long horizon) {
    if (tower.elements.empty() && tower.residual_mass == 0.0)
        throw ContractError("tower_tail: empty tower");
    std::vector<double> absorbed(static_cast<std::size_t>(horizon) + 1, 0.0);
    NeumaierSum total;
    total.add(tower.residual_mass);
    for (const TowerElement& z : tower.elements) {
        total.add(z.width());
        if (z.return_time <= horizon)
            absorbed[static_cast<std::size_t>(z.return_time)] += z.width();
    }
    std::vector<double> surv(static_cast<std::size_t>(horizon) + 1, 0.0);
    NeumaierSum cum;
    for (long n = 0; n <= horizon; ++n) {
        if (n >= 1) cum.add(absorbed[static_cast<std::size_t>(n)]);
        surv[static_cast<std::size_t>(n)] = total.value() - cum.value();
    }
    return surv;
}

std::vector<double> tower_tail_dp(const std::vector<PartitionElement>& elements,
                                  const std::vector<Cell>& cells, int base_cell,
                                  long tau_horizon) {
    if (base_cell < 0 || static_cast<std::size_t>(base_cell) >= cells.size())
        throw ContractError("tower_tail_dp: invalid base cell");
    std::vector<std::vector<const PartitionElement*>> per_cell(cells.size());
    for (const PartitionElement& e : elements)
        per_cell[static_cast<std::size_t>(e.source_cell)].push_back(&e);

    const std::size_t H = static_cast<std::size_t>(tau_horizon);
    const std::size_t C = cells.size();
    // in_flight[c][s]: base-cell mass currently at cell c with elapsed time s
    std::vector<std::vector<double>> in_flight(C, std::vector<double>(H + 1, 0.0));
    std::vector<double> absorbed(H + 1, 0.0);
    const double base_mass = cells[static_cast<std::size_t>(base_cell)].width();
    in_flight[static_cast<std::size_t>(base_cell)][0] = base_mass;

    for (std::size_t s = 0; s <= H; ++s) {
        for (std::size_t c = 0; c < C; ++c) {
            const double m = in_flight[c][s];
            if (m <= 0.0) continue;
            in_flight[c][s] = 0.0;
            const double cw = cells[c].width();
            for (const PartitionElement* e : per_cell[c]) {
                const double frac = e->width() / cw;
                const std::size_t t = s + static_cast<std::size_t>(e->return_time);
                if (t > H) continue;  // past the horizon: stays unreturned
                const double moved = m * frac;
                if (e->target_cell == base_cell)
                    absorbed[t] += moved;
                else
                    in_flight[static_cast<std::size_t>(e->target_cell)][t] += moved;
            }
            // the cell's unpartitioned defect never returns; it stays censored
        }
    }

    std::vector<double> surv(H + 1, 0.0);
    NeumaierSum cum;
    for (std::size_t n = 0; n <= H; ++n) {
        if (n >= 1) cum.add(absorbed[n]);
        surv[n] = base_mass - cum.value();
    }
    return surv;
}

long gcd_period(const std::vector<TowerElement>& tower) {
    if (tower.empty()) throw ContractError("gcd_period: empty tower");
    long g = 0;
    for (const TowerElement& z : tower) g = std::gcd(g, z.return_time);
    return g;
}

TailHistogram renewal_simulate(const RenewalConfig& cfg, std::size_t samples, long horizon,
                               std::uint64_t seed, unsigned threads) {
    if (samples < 1) throw ContractError("renewal_simulate: samples must be >= 1");
    if (horizon < 1) throw ContractError("renewal_simulate: horizon must be >= 1");
    if (!(cfg.selection_prob > 0.0 && cfg.selection_prob <= 1.0))
        throw ConfigError("renewal_simulate: selection probability must lie in (0,1]");
    if (cfg.block_len < 1) throw ConfigError("renewal_simulate: block length must be >= 1");
    if (static_cast<long>(cfg.u.horizon()) <= horizon)
        throw ConfigError("renewal_simulate: increment tail u does not cover the horizon");

    // S[n] = P(increment > n) = min(1, C u_n) for n >= 1; S[0] = 1.
    const std::size_t slen = cfg.u.horizon();
    std::vector<double> S(slen, 1.0);
    bool some_finite = false;
    for (std::size_t n = 1; n < slen; ++n) {
        const double v = cfg.C * cfg.u.values[n];
        if (!(v >= 0.0) || std::isnan(v))
            throw ConfigError("renewal_simulate: u is not a nonnegative sequence");
        S[n] = std::min(1.0, v);
        if (S[n] < 1.0) some_finite = true;
    }
    for (std::size_t n = 1; n < slen; ++n)  // survival curves are nonincreasing
        S[n] = std::min(S[n], S[n - 1]);
    if (!some_finite)
        throw ConfigError("renewal_simulate: increment tail never drops below 1");

    auto draw_increment = [&](double v) {
        // smallest n >= 1 with v >= S(n); S nonincreasing
        std::size_t lo = 1, hi = slen - 1;
        if (v < S[hi]) return static_cast<long>(slen);  // beyond the table
        while (lo < hi) {
            const std::size_t mid = (lo + hi) / 2;
            if (v >= S[mid])
                hi = mid;
            else
                lo = mid + 1;
        }
        return static_cast<long>(lo);
    };

    constexpr std::size_t kBlock = 8192;
    const std::size_t blocks = (samples + kBlock - 1) / kBlock;
    struct Tally {
        std::vector<std::int64_t> absorbed_at;
        std::int64_t censored = 0;
        std::int64_t total = 0;
    };
    std::vector<Tally> tallies(blocks);

    parallel_for(blocks, threads, [&](std::size_t bi) {
        Tally tally;
        tally.absorbed_at.assign(static_cast<std::size_t>(horizon) + 1, 0);
        const std::size_t count = std::min(kBlock, samples - bi * kBlock);
        std::uint64_t sm = block_seed(seed, bi);
        for (std::size_t i = 0; i < count; ++i) {
            long t = 0;
            long tau = -1;
            for (long j = 1; t <= horizon; ++j) {
                t += draw_increment(to_unit(splitmix64(sm)));
                if (t > horizon) break;
                if (j % cfg.block_len == 0 &&
                    to_unit(splitmix64(sm)) < cfg.selection_prob) {
                    tau = t;
                    break;
                }
            }
            ++tally.total;
            if (tau < 0)
                ++tally.censored;
            else
                ++tally.absorbed_at[static_cast<std::size_t>(tau)];
        }
        tallies[bi] = std::move(tally);
    });

    TailHistogram hist;
    hist.seed = seed;
    std::vector<std::int64_t> absorbed(static_cast<std::size_t>(horizon) + 1, 0);
    for (const auto& t : tallies) {
        hist.total += t.total;
        hist.censored += t.censored;
        for (long n = 0; n <= horizon; ++n)
            absorbed[static_cast<std::size_t>(n)] += t.absorbed_at[static_cast<std::size_t>(n)];
    }
    hist.survivors.assign(static_cast<std::size_t>(horizon) + 1, 0);
    std::int64_t cum = 0;
    for (long n = 0; n <= horizon; ++n) {
        if (n >= 1) cum += absorbed[static_cast<std::size_t>(n)];
        hist.survivors[static_cast<std::size_t>(n)] = hist.total - cum;
    }
    hist.validate();
    return hist;
}

}  // namespace nue
