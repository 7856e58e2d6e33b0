#include "nue/partition.hpp"

#include <algorithm>
#include <cmath>

#include "nue/numeric.hpp"

namespace nue {
namespace {

bool is_partition_map(const MapSystem& map) {
    switch (map.kind) {
        case MapKind::doubling:
        case MapKind::ternary:
        case MapKind::quadratic:
        case MapKind::cubic:
            return true;
        default:
            return false;
    }
}

int branch_of(const MapSystem& map, double x) {
    switch (map.kind) {
        case MapKind::doubling:
            return x < 0.5 ? 0 : 1;
        case MapKind::ternary:
            return std::min(2, static_cast<int>(std::floor(3.0 * x)));
        case MapKind::quadratic:
            return x < 0.0 ? 0 : 1;
        case MapKind::cubic:
            return 0;
        default:
            throw DomainError("branch structure undefined for this map kind");
    }
}

double forward_point(const MapSystem& map, double x) {
    switch (map.kind) {
        case MapKind::doubling: {
            const double y = 2.0 * x;
            return y - std::floor(y);
        }
        case MapKind::ternary: {
            const double y = 3.0 * x;
            return y - std::floor(y);
        }
        case MapKind::quadratic:
            return std::fma(-x, x, map.a0);
        case MapKind::cubic:
            return x * x * x;
        default:
            throw DomainError("forward_point: unsupported map kind");
    }
}

struct GridOrbit {
    std::vector<double> points;   // x_0..x_n
    std::vector<int> branches;    // branch of x_k, k < n
    bool singular = false;
    long singular_index = 0;
};

GridOrbit forward_orbit(const MapSystem& map, double x, long n) {
    GridOrbit o;
    o.points.reserve(static_cast<std::size_t>(n) + 1);
    o.branches.reserve(static_cast<std::size_t>(n));
    o.points.push_back(x);
    for (long k = 0; k < n; ++k) {
        const double cur = o.points.back();
        if (!map.singular_set_empty() && dist_to_singular(map, Point::one_d(cur)) == 0.0) {
            o.singular = true;
            o.singular_index = k;
            return o;
        }
        o.branches.push_back(branch_of(map, cur));
        o.points.push_back(forward_point(map, cur));
    }
    return o;
}

// One inverse-branch application to a lift interval [a, b] anchored at the
// image orbit point; returns the sorted preimage interval. Throws when the
// interval leaves the branch image (pullback would cross a critical point).
std::pair<double, double> pull_once(const MapSystem& map, int branch, double a, double b) {
    switch (map.kind) {
        case MapKind::doubling:
            return {0.5 * (a + branch), 0.5 * (b + branch)};
        case MapKind::ternary:
            return {(a + branch) / 3.0, (b + branch) / 3.0};
        case MapKind::quadratic: {
            const Interval dom = map.domain;
            const double edge = branch == 0 ? dom.lo : dom.hi;
            const double img_lo = map.a0 - edge * edge;
            if (!(a >= img_lo) || !(b < map.a0))
                throw DomainError("pullback leaves the quadratic branch image");
            const double pa = std::sqrt(map.a0 - a);
            const double pb = std::sqrt(map.a0 - b);
            return branch == 0 ? std::make_pair(-pa, -pb) : std::make_pair(pb, pa);
        }
        case MapKind::cubic: {
            if (!(a >= -1.0) || !(b <= 1.0))
                throw DomainError("pullback leaves the cubic branch image");
            return {std::cbrt(a), std::cbrt(b)};
        }
        default:
            throw DomainError("pull_once: unsupported map kind");
    }
}

std::pair<double, double> pull_chain(const MapSystem& map, const std::vector<int>& branches,
                                     long depth, double a, double b) {
    for (long k = depth - 1; k >= 0; --k) {
        auto [na, nb] = pull_once(map, branches[static_cast<std::size_t>(k)], a, b);
        a = na;
        b = nb;
    }
    return {a, b};
}

int locate_cell(const std::vector<Cell>& cells, double y) {
    // cells tile [lo, hi); boundary points belong to the right-hand cell by
    // the half-open convention, i.e. to the cell whose lo <= y < hi.
    long lo = 0, hi = static_cast<long>(cells.size()) - 1;
    while (lo < hi) {
        const long mid = (lo + hi + 1) / 2;
        if (cells[static_cast<std::size_t>(mid)].lo <= y)
            lo = mid;
        else
            hi = mid - 1;
    }
    return static_cast<int>(lo);
}

}  // namespace

std::vector<Cell> base_cells(Interval domain, double delta2) {
    if (!(delta2 > 0.0)) throw DomainError("base_cells: delta2 must be positive");
    const double len = domain.length();
    if (!(len > 0.0)) throw DomainError("base_cells: empty domain");
    const long m = static_cast<long>(std::ceil(10.0 * len / delta2));
    const double w = len / static_cast<double>(m);
    std::vector<Cell> cells(static_cast<std::size_t>(m));
    for (long i = 0; i < m; ++i) {
        cells[static_cast<std::size_t>(i)] = {
            static_cast<int>(i),
            i == 0 ? domain.lo : domain.lo + w * static_cast<double>(i),
            i == m - 1 ? domain.hi : domain.lo + w * static_cast<double>(i + 1)};
    }
    return cells;
}

BoundaryConstants boundary_constants(const std::vector<Cell>& cells, double delta2,
                                     double sigma) {
    BoundaryConstants bc;
    bc.lambda1 = std::sqrt(sigma);
    bc.lambda2 = bc.lambda1;
    double min_w = cells.empty() ? 1.0 : cells[0].width();
    for (const Cell& c : cells) min_w = std::min(min_w, c.width());
    bc.C2 = std::max(2.0, 2.0 * delta2 / min_w);
    return bc;
}

Interval branch_domain(const MapSystem& map, double x, long n, double delta2) {
    if (!is_partition_map(map))
        throw DomainError("branch_domain: map has no 1D branch structure");
    if (n < 1) throw ContractError("branch_domain: n must be >= 1");
    if (!(delta2 > 0.0)) throw DomainError("branch_domain: delta2 must be positive");
    if (map.circle && 2.0 * delta2 >= 1.0)
        throw DomainError("branch_domain: ball exceeds the branch image");

    const GridOrbit orbit = forward_orbit(map, x, n);
    if (orbit.singular)
        throw DomainError("branch_domain: the orbit crosses a critical point");
    const double xn = orbit.points[static_cast<std::size_t>(n)];
    auto [a, b] = pull_chain(map, orbit.branches, n, xn - delta2, xn + delta2);
    return Interval{a, b};
}

std::pair<Interval, int> core_set(const MapSystem& map, double x, long n,
                                  const std::vector<Cell>& cells, double delta2) {
    // branch_domain validates the chain; the core pulls the cell back instead
    (void)branch_domain(map, x, n, delta2);
    const GridOrbit orbit = forward_orbit(map, x, n);
    const double xn = orbit.points[static_cast<std::size_t>(n)];
    const int ci = locate_cell(cells, xn);
    const Cell& cell = cells[static_cast<std::size_t>(ci)];
    auto [a, b] = pull_chain(map, orbit.branches, n, cell.lo, cell.hi);
    return {Interval{a, b}, ci};
}

Interval forbid_interval(const MapSystem& map, const PartitionElement& e,
                         const std::vector<Cell>& cells, double sigma, double delta2,
                         long m) {
    if (m <= e.birth_time) throw ContractError("forbid_interval: m must exceed birth time");
    const Cell& cell = cells[static_cast<std::size_t>(e.target_cell)];
    const double rho =
        delta2 / 10.0 * std::pow(sigma, 0.5 * static_cast<double>(m - e.birth_time - 1));
    auto [a, b] =
        pull_chain(map, e.branches, e.birth_time, cell.lo - rho, cell.hi + rho);
    return Interval{a, b};
}

Annulus annulus(const MapSystem& map, const PartitionElement& e,
                const std::vector<Cell>& cells, double sigma, double delta2, long m) {
    if (m <= e.birth_time) throw ContractError("annulus: m must exceed birth time");
    const Cell& cell = cells[static_cast<std::size_t>(e.target_cell)];
    const double rho_out =
        delta2 / 10.0 * std::pow(sigma, 0.5 * static_cast<double>(m - e.birth_time - 1));
    const double rho_in =
        delta2 / 10.0 * std::pow(sigma, 0.5 * static_cast<double>(m - e.birth_time));
    auto [ol, oh] = pull_chain(map, e.branches, e.birth_time, cell.lo - rho_out,
                               cell.hi + rho_out);
    auto [il, ih] =
        pull_chain(map, e.branches, e.birth_time, cell.lo - rho_in, cell.hi + rho_in);
    Annulus ann;
    ann.left = Interval{ol, il};
    ann.right = Interval{ih, oh};
    return ann;
}

PartitionResult build_partition(const MapSystem& map, const HyperbolicParams& params,
                                const std::vector<Cell>& cells, const PartitionConfig& cfg) {
    if (!is_partition_map(map))
        throw DomainError("build_partition: map has no 1D branch structure");
    if (cfg.source_cell < 0 || static_cast<std::size_t>(cfg.source_cell) >= cells.size())
        throw ContractError("build_partition: invalid source cell");
    if (cfg.grid < 1000) throw ContractError("build_partition: grid must be >= 1000 per cell");
    if (cfg.horizon < 1) throw ContractError("build_partition: horizon must be >= 1");
    if (!(cfg.delta2 > 0.0)) throw ContractError("build_partition: delta2 must be positive");
    if (map.circle && 2.0 * cfg.delta2 >= 1.0)
        throw DomainError("build_partition: ball exceeds the branch image");

    const Cell& u1 = cells[static_cast<std::size_t>(cfg.source_cell)];
    const long grid = cfg.grid;
    const double spacing = u1.width() / static_cast<double>(grid);

    PartitionResult res;
    ConstructionState& st = res.state;
    st.grid_points.resize(static_cast<std::size_t>(grid));
    for (long i = 0; i < grid; ++i)
        st.grid_points[static_cast<std::size_t>(i)] =
            u1.lo + spacing * (static_cast<double>(i) + 0.5);
    st.forbidden_counts.assign(static_cast<std::size_t>(grid), 0);
    st.covered.assign(static_cast<std::size_t>(grid), false);
    st.excluded.assign(static_cast<std::size_t>(grid), false);
    st.grid_spacing = spacing;
    st.unselected_mass.assign(static_cast<std::size_t>(cfg.horizon) + 1, u1.width());
    res.mass_error_bound = spacing * static_cast<double>(cells.size());

    // Orbits, traces and hyperbolic-time sets per grid point, up front.
    std::vector<GridOrbit> orbits(static_cast<std::size_t>(grid));
    std::vector<HyperbolicTimeSet> hyper(static_cast<std::size_t>(grid));
    for (long i = 0; i < grid; ++i) {
        const double y = st.grid_points[static_cast<std::size_t>(i)];
        GridOrbit o = forward_orbit(map, y, cfg.horizon);
        if (o.singular) {
            st.excluded[static_cast<std::size_t>(i)] = true;
            orbits[static_cast<std::size_t>(i)] = std::move(o);
            continue;
        }
        std::vector<double> a(static_cast<std::size_t>(cfg.horizon));
        std::vector<double> r(static_cast<std::size_t>(cfg.horizon));
        bool bad = false;
        for (long k = 0; k < cfg.horizon && !bad; ++k) {
            const Point p = Point::one_d(o.points[static_cast<std::size_t>(k)]);
            const double dist = dist_to_singular(map, p);
            if (dist == 0.0) {
                bad = true;
                break;
            }
            a[static_cast<std::size_t>(k)] = coexpansion(map, p);
            const double dd = dist < params.delta ? dist : 1.0;
            r[static_cast<std::size_t>(k)] = dd < 1.0 ? -std::log(dd) : 0.0;
        }
        if (bad) {
            st.excluded[static_cast<std::size_t>(i)] = true;
            orbits[static_cast<std::size_t>(i)] = std::move(o);
            continue;
        }
        const OrbitTrace tr = trace_from_arrays(std::move(a), {params.delta}, {std::move(r)});
        HyperbolicParams hp = params;
        hp.eps.clear();  // super flags are irrelevant here
        hyper[static_cast<std::size_t>(i)] = hyperbolic_times(tr, hp);
        orbits[static_cast<std::size_t>(i)] = std::move(o);
    }

    // selected cores sorted by lo, for exact-disjointness clipping
    std::vector<std::pair<double, double>> taken;  // (lo, hi)
    NeumaierSum mass;
    long next_id = 0;

    auto grid_range = [&](double lo, double hi) {
        // indices i with lo <= grid_points[i] < hi
        const auto first = std::lower_bound(st.grid_points.begin(), st.grid_points.end(), lo);
        const auto last = std::lower_bound(st.grid_points.begin(), st.grid_points.end(), hi);
        return std::make_pair(first - st.grid_points.begin(), last - st.grid_points.begin());
    };

    for (long n = 1; n <= cfg.horizon; ++n) {
        st.current_time = n;

        // forbidden union at instant n
        std::vector<std::pair<double, double>> forbid;
        forbid.reserve(res.elements.size());
        for (const PartitionElement& e : res.elements) {
            const Interval f = forbid_interval(map, e, cells, params.sigma, cfg.delta2, n);
            forbid.emplace_back(f.lo, f.hi);
        }
        std::sort(forbid.begin(), forbid.end());
        std::vector<std::pair<double, double>> merged;
        for (const auto& iv : forbid) {
            if (!merged.empty() && iv.first <= merged.back().second)
                merged.back().second = std::max(merged.back().second, iv.second);
            else
                merged.push_back(iv);
        }
        auto is_forbidden = [&](double y) {
            auto it = std::upper_bound(merged.begin(), merged.end(),
                                       std::make_pair(y, std::numeric_limits<double>::max()));
            if (it == merged.begin()) return false;
            --it;
            return y <= it->second;
        };

        // forbidden-instant counters (uncovered, unexcluded points only)
        for (const auto& iv : merged) {
            auto [il, ir] = grid_range(iv.first, std::nextafter(iv.second, 1e300));
            for (long i = il; i < ir; ++i) {
                const auto ui = static_cast<std::size_t>(i);
                if (!st.covered[ui] && !st.excluded[ui]) ++st.forbidden_counts[ui];
            }
        }

        // selection scan, left to right; first representative wins
        for (long i = 0; i < grid; ++i) {
            const auto ui = static_cast<std::size_t>(i);
            if (st.covered[ui] || st.excluded[ui]) continue;
            if (!hyper[ui].is_time(n)) continue;
            const double y = st.grid_points[ui];
            if (is_forbidden(y)) continue;

            Interval vn;
            try {
                const double xn = orbits[ui].points[static_cast<std::size_t>(n)];
                auto [a, b] = pull_chain(map, orbits[ui].branches, n, xn - cfg.delta2,
                                         xn + cfg.delta2);
                vn = Interval{a, b};
            } catch (const DomainError&) {
                continue;  // neighborhood ill-defined at this time
            }
            if (!(vn.lo >= u1.lo && vn.hi <= u1.hi)) continue;  // V_n(y) must sit in U1

            // core of y at time n
            const double xn = orbits[ui].points[static_cast<std::size_t>(n)];
            const int ci = locate_cell(cells, xn);
            const Cell& cell = cells[static_cast<std::size_t>(ci)];
            auto [clo, chi] = pull_chain(map, orbits[ui].branches, n, cell.lo, cell.hi);

            // clip to the free gap around y; exact disjointness by construction
            double lo = std::max(clo, u1.lo);
            double hi = std::min(chi, u1.hi);
            auto it = std::upper_bound(taken.begin(), taken.end(),
                                       std::make_pair(y, std::numeric_limits<double>::max()));
            if (it != taken.end()) hi = std::min(hi, it->first);
            if (it != taken.begin()) lo = std::max(lo, std::prev(it)->second);
            if (!(lo < hi)) continue;
            const double trimmed = (hi - lo) / (chi - clo);
            if (trimmed < 1.0 - 1e-9) ++res.clipped_cores;

            PartitionElement e;
            e.id = next_id++;
            e.lo = lo;
            e.hi = hi;
            e.birth_time = n;
            e.return_time = n;
            e.source_cell = cfg.source_cell;
            e.target_cell = ci;
            e.base_point = y;
            e.branches.assign(orbits[ui].branches.begin(),
                              orbits[ui].branches.begin() + static_cast<long>(n));
            res.elements.push_back(std::move(e));
            taken.insert(it, {lo, hi});
            mass.add(hi - lo);

            auto [il, ir] = grid_range(lo, hi);
            for (long j = il; j < ir; ++j) st.covered[static_cast<std::size_t>(j)] = true;
        }

        st.unselected_mass[static_cast<std::size_t>(n)] = u1.width() - mass.value();
    }
    st.selected_mass = mass.value();
    return res;
}

ElementCheckReport element_checks(const MapSystem& map, const PartitionElement& e,
                                  const std::vector<Cell>& cells, double sigma,
                                  long subgrid) {
    ElementCheckReport rep;
    const long R = e.return_time;
    rep.required_expansion = std::pow(sigma, -0.5 * static_cast<double>(R));

    // subgrid orbits (endpoints included), with per-step derivative products
    const long pts = std::max<long>(subgrid, 3);
    std::vector<std::vector<double>> orbit(static_cast<std::size_t>(pts));
    std::vector<double> deriv(static_cast<std::size_t>(pts), 1.0);
    for (long j = 0; j < pts; ++j) {
        double y = e.lo + (e.hi - e.lo) * static_cast<double>(j) / static_cast<double>(pts - 1);
        if (j == pts - 1) y = std::nextafter(e.hi, e.lo);  // stay inside [lo, hi)
        auto& o = orbit[static_cast<std::size_t>(j)];
        o.reserve(static_cast<std::size_t>(R) + 1);
        o.push_back(y);
        for (long k = 0; k < R; ++k) {
            const double cur = o.back();
            deriv[static_cast<std::size_t>(j)] *= derivative_abs(map, Point::one_d(cur));
            o.push_back(forward_point(map, cur));
        }
    }

    rep.min_expansion = *std::min_element(deriv.begin(), deriv.end());
    rep.expansion_ok = rep.min_expansion >= rep.required_expansion;

    auto metric = [&](double u, double v) {
        double d = std::fabs(u - v);
        if (map.circle) d = std::min(d, 1.0 - d);
        return d;
    };

    double d1 = 0.0;
    bool inter_ok = true;
    for (long j = 0; j < pts; ++j) {
        for (long k = j + 1; k < pts; ++k) {
            const auto& oj = orbit[static_cast<std::size_t>(j)];
            const auto& ok_ = orbit[static_cast<std::size_t>(k)];
            const double dr = metric(oj[static_cast<std::size_t>(R)],
                                     ok_[static_cast<std::size_t>(R)]);
            if (dr > 0.0) {
                const double ratio = deriv[static_cast<std::size_t>(j)] /
                                     deriv[static_cast<std::size_t>(k)];
                d1 = std::max(d1, std::fabs(1.0 - ratio) / dr);
            }
            for (long m = 0; m <= R; ++m) {
                if (metric(oj[static_cast<std::size_t>(m)], ok_[static_cast<std::size_t>(m)]) >
                    dr + 1e-12)
                    inter_ok = false;
            }
        }
    }
    rep.distortion_const = d1;
    rep.intermediate_ok = inter_ok;

    // T^R maps the (unclipped) core onto the target cell: the cell's pullback
    // endpoints must agree with the element's to 1e-9.
    const Cell& cell = cells[static_cast<std::size_t>(e.target_cell)];
    auto [ia, ib] = pull_chain(map, e.branches, R, cell.lo, cell.hi);
    const double want_lo = std::min(ia, ib), want_hi = std::max(ia, ib);
    rep.maps_onto_cell =
        std::fabs(want_lo - e.lo) <= 1e-9 && std::fabs(want_hi - e.hi) <= 1e-9;

    rep.pass = rep.expansion_ok && rep.intermediate_ok && rep.maps_onto_cell;
    return rep;
}

ForbiddenProfile forbidden_profile(const ConstructionState& state) {
    ForbiddenProfile prof;
    long kmax = 0;
    for (std::size_t i = 0; i < state.forbidden_counts.size(); ++i)
        if (!state.covered[i] && !state.excluded[i])
            kmax = std::max(kmax, state.forbidden_counts[i]);
    prof.mass_by_k.assign(static_cast<std::size_t>(kmax) + 1, 0.0);
    for (std::size_t i = 0; i < state.forbidden_counts.size(); ++i) {
        if (state.covered[i] || state.excluded[i]) continue;
        for (long k = 0; k <= state.forbidden_counts[i]; ++k)
            prof.mass_by_k[static_cast<std::size_t>(k)] += state.grid_spacing;
    }
    std::vector<double> ks, logm;
    for (long k = 1; k <= kmax; ++k) {
        if (prof.mass_by_k[static_cast<std::size_t>(k)] > 0.0) {
            ks.push_back(static_cast<double>(k));
            logm.push_back(std::log(prof.mass_by_k[static_cast<std::size_t>(k)]));
        }
    }
    if (ks.size() >= 2) {
        const LinFit lf = linear_fit(ks, logm);
        prof.lambda5_hat = std::exp(lf.slope);
        prof.r2 = lf.r2;
    }
    return prof;
}

std::optional<double> select_delta2(const MapSystem& map, const HyperbolicParams& params,
                                    long horizon, long grid) {
    const double len = map.circle && !map.skew() ? 1.0 : map.domain.length();
    for (int j = 1; j <= 24; ++j) {
        const double delta2 = len * std::ldexp(1.0, -j);
        bool ok = true;
        const Interval dom = map.circle && !map.skew() ? Interval{0.0, 1.0} : map.domain;
        for (long i = 0; i < grid && ok; ++i) {
            const double y =
                dom.lo + dom.length() * (static_cast<double>(i) + 0.5) / static_cast<double>(grid);
            GridOrbit o = forward_orbit(map, y, horizon);
            if (o.singular) continue;
            std::vector<double> a(static_cast<std::size_t>(horizon));
            std::vector<double> r(static_cast<std::size_t>(horizon), 0.0);
            bool bad = false;
            for (long k = 0; k < horizon && !bad; ++k) {
                const Point p = Point::one_d(o.points[static_cast<std::size_t>(k)]);
                const double dist = dist_to_singular(map, p);
                if (dist == 0.0) {
                    bad = true;
                    break;
                }
                a[static_cast<std::size_t>(k)] = coexpansion(map, p);
                const double dd = dist < params.delta ? dist : 1.0;
                r[static_cast<std::size_t>(k)] = dd < 1.0 ? -std::log(dd) : 0.0;
            }
            if (bad) continue;
            const OrbitTrace tr =
                trace_from_arrays(std::move(a), {params.delta}, {std::move(r)});
            HyperbolicParams hp = params;
            hp.eps.clear();
            const HyperbolicTimeSet hs = hyperbolic_times(tr, hp);
            for (long n : hs.times) {
                try {
                    (void)branch_domain(map, y, n, delta2);
                } catch (const DomainError&) {
                    ok = false;
                    break;
                }
            }
        }
        if (ok) return delta2;
    }
    return std::nullopt;
}

}  // namespace nue
