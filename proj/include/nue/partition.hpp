#pragma once

// The inductive auxiliary-partition construction for 1D piecewise-monotone
// expanding maps: base cells, hyperbolic-time neighborhoods V_n(x) by
// monotone-branch pullback, cores I^n_inf(x), the forbidden-annulus ledger
// and the forbidden-instant profile diagnostic.
//
// Geometry notes. Everything is computed on the covering space: pullback
// intervals are anchored at orbit points and never reduced mod 1, and the
// construction only ever keeps sets with V_n(y) inside the source cell, so
// no stored interval wraps. Grid orbits iterate in plain doubles (exact for
// dyadic data under the doubling map); they are the geometric itineraries,
// so the digit-stream orbit engines are deliberately not used here.

#include <cstdint>
#include <optional>
#include <vector>

#include "nue/hyperbolic.hpp"
#include "nue/map.hpp"

namespace nue {

struct Cell {
    int index = 0;
    double lo = 0.0;
    double hi = 0.0;  // [lo, hi)
    double width() const noexcept { return hi - lo; }
};

// Uniform tiling by cells of width len/ceil(10 len / delta2) (the largest
// width <= delta2/10 that divides the domain exactly). delta2 <= 0 rejected.
std::vector<Cell> base_cells(Interval domain, double delta2);

// 1D versions of the boundary-measure constants: lambda2 = lambda1 = sqrt(sigma)
// and C2 = max(2, 2 delta2 / min cell width).
struct BoundaryConstants {
    double C2 = 0.0;
    double lambda2 = 0.0;
    double lambda1 = 0.0;
};
BoundaryConstants boundary_constants(const std::vector<Cell>& cells, double delta2,
                                     double sigma);

// V_n(x): the interval mapped onto B(T^n x, delta2) by the branch chain of x.
// Throws DomainError when a pullback step would cross a critical point or the
// ball exceeds the branch image.
Interval branch_domain(const MapSystem& map, double x, long n, double delta2);

// I^n_inf(x): the sub-interval of V_n(x) sent onto the cell containing T^n x,
// plus that cell's index.
std::pair<Interval, int> core_set(const MapSystem& map, double x, long n,
                                  const std::vector<Cell>& cells, double delta2);

struct PartitionElement {
    long id = 0;
    double lo = 0.0;
    double hi = 0.0;  // core interval [lo, hi)
    long birth_time = 0;
    long return_time = 0;  // equals birth_time in this construction
    int source_cell = 0;
    int target_cell = 0;
    double base_point = 0.0;
    std::vector<int> branches;  // branch itinerary of the base point
    double width() const noexcept { return hi - lo; }
};

// Forbidden set of an element at instant m (> birth): the pullback of the
// rho_out(m)-neighborhood of its target cell; contains the core.
Interval forbid_interval(const MapSystem& map, const PartitionElement& e,
                         const std::vector<Cell>& cells, double sigma, double delta2,
                         long m);

// The two shells of the annulus I^n_m (left and right of the core); either
// may be empty when the pullback degenerates.
struct Annulus {
    Interval left;
    Interval right;
};
Annulus annulus(const MapSystem& map, const PartitionElement& e,
                const std::vector<Cell>& cells, double sigma, double delta2, long m);

struct ConstructionState {
    long current_time = 0;
    std::vector<double> grid_points;
    std::vector<long> forbidden_counts;  // per grid point: instants it was forbidden at
    std::vector<bool> covered;           // grid point lies in a selected core
    std::vector<bool> excluded;          // orbit hit S exactly; never selectable
    double grid_spacing = 0.0;
    double selected_mass = 0.0;
    std::vector<double> unselected_mass;  // unselected_mass[n], n in [0, horizon]
};

struct PartitionConfig {
    double delta2 = 0.0;  // neighborhood ball radius
    long horizon = 0;
    long grid = 0;  // sample points across the source cell, >= 1000
    int source_cell = 0;
};

struct PartitionResult {
    std::vector<PartitionElement> elements;
    ConstructionState state;
    // grid-resolution error bound on reported measures
    double mass_error_bound = 0.0;
    long clipped_cores = 0;  // cores trimmed by more than the fp tolerance
};

// Runs the inductive loop: at each instant n <= horizon, grid points of the
// source cell that are hyperbolic at n, have V_n inside the cell, are not
// forbidden and not yet covered spawn cores (left-to-right, first
// representative wins). Selected cores are exactly pairwise disjoint; new
// cores are clipped to the free gap and flagged when the trim exceeds fp
// noise. Membership in H_n(U1) uses the direct inclusion test V_n(y) <= U1;
// see the ledger for why the paper's lambda1^n strip is not used.
PartitionResult build_partition(const MapSystem& map, const HyperbolicParams& params,
                                const std::vector<Cell>& cells, const PartitionConfig& cfg);

struct ElementCheckReport {
    bool pass = false;
    bool expansion_ok = false;
    double min_expansion = 0.0;
    double required_expansion = 0.0;
    double distortion_const = 0.0;  // fitted D1
    bool intermediate_ok = false;   // dist(T^n y, T^n z) <= dist(T^R y, T^R z)
    bool maps_onto_cell = false;    // endpoint images within 1e-9 of the cell
};

ElementCheckReport element_checks(const MapSystem& map, const PartitionElement& e,
                                  const std::vector<Cell>& cells, double sigma,
                                  long subgrid = 16);

struct ForbiddenProfile {
    std::vector<double> mass_by_k;  // unselected grid mass forbidden at >= k instants
    double lambda5_hat = 0.0;       // exp of the log-linear slope over k >= 1
    double r2 = 0.0;
};

ForbiddenProfile forbidden_profile(const ConstructionState& state);

// Largest delta2 from a dyadic scan such that branch_domain succeeds for all
// selected-grid hyperbolic points up to the horizon.
std::optional<double> select_delta2(const MapSystem& map, const HyperbolicParams& params,
                                    long horizon, long grid);

}  // namespace nue
