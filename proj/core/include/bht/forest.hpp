#pragma once

#include <array>
#include <map>
#include <optional>
#include <vector>

#include "bht/cutoff.hpp"
#include "bht/field.hpp"
#include "bht/multiplier.hpp"
#include "bht/tiling.hpp"

namespace bht {

/// Half-length of the top frequency window at square scale step j
/// (the paper's 500 * 2^{jJ}, scaled with the configured enlargement).
Rational bar_half_length(const GridParams& p, int j);
RationalInterval top_window(const GridParams& p, const Rational& xi, int j);
/// omega_{xi,R}: the dual-length window [xi - 2^{jJ}/2, xi + 2^{jJ}/2].
RationalInterval core_window(const GridParams& p, const Rational& xi, int j);

struct Tree {
    enum class Kind { lacunary, overlapping, mixed };
    std::vector<int> tiles; ///< indices into the TileSet (nonempty)
    Rational xi;
    DyadicSquare top;
    Kind kind = Kind::mixed;
};

/// Scale step of a J-dyadic square (side 2^{-jJ}); throws if not J-dyadic.
int square_scale_step(const GridParams& p, const DyadicSquare& R);

Tree::Kind classify_tree(const TileSet& ts, const GridParams& p,
                         const std::vector<int>& tiles, const Rational& xi);

/// All P in `pool` with R_P inside `top` and top_window(xi) inside omega_bar_P.
std::vector<int> maximal_tree_tiles(const TileSet& ts, const GridParams& p,
                                    const std::vector<int>& pool, const Rational& xi,
                                    const DyadicSquare& top);
std::optional<Tree> maximal_tree(const TileSet& ts, const GridParams& p,
                                 const std::vector<int>& pool, const Rational& xi,
                                 const DyadicSquare& top);

/// Partition by the xi in 2 omega_P predicate; both parts keep the top data.
std::pair<std::optional<Tree>, std::optional<Tree>> split_lac_over(const TileSet& ts,
                                                                   const GridParams& p,
                                                                   const Tree& t);

/// Strong disjointness of two lacunary trees (exact rational predicate).
bool strongly_disjoint(const TileSet& ts, const Tree& a, const Tree& b);

struct SizeReport {
    double value = 0;
    Rational witness_xi{0};
    DyadicSquare witness_top;
    int dict_id = -1;      ///< dictionary entry achieving the value (overlapping/v index)
    bool overlapping = false;
};

struct SelectionParams {
    double lambda = 0.25;
    double epsilon = 0.5;
    int n_max = 4;
    int s_max = 4; ///< must cover the engine's derived-dictionary truncation
    int n_v = 3; ///< size of the vanishing-point lattice in 10 omega_T
};

struct SelectionRecord {
    int pass = 0; ///< 0 upper, 1 lower, 2 overlap -, 3 overlap +, 4 third-index
    int n = 0, s = 0;
    Rational xi{0};
    DyadicSquare top;
    double bad_value = 0; ///< offending functional of the bad tree
    int tiles_removed = 0;
};

struct BesselBucket {
    int pass = 0, n = 0, s = 0;
    double top_area = 0;
    int trees = 0;
};

struct SelectionResult {
    std::vector<Tree> selected;   ///< all eliminated (companion) trees, nonempty
    std::vector<Tree> bad_trees;  ///< the bad trees that triggered eliminations
    std::vector<int> bad_pass, bad_n, bad_s;
    std::vector<SelectionRecord> log;
    std::vector<int> remainder;
    std::vector<BesselBucket> buckets;
    double selected_top_area = 0; ///< sum |R_T| over selected trees
    int first_empty_n = -1;
};

/// Size machinery with caching; fields are held by pointer and must outlive it.
class SizeEngine {
public:
    SizeEngine(const TileSet& ts, const GridParams& p, int grid_n, double L,
               const Field2D* F1, const Field2D* F2, const Field2D* F3);

    /// sup over the adapted dictionary of ||chi~_{R_P,n}^{10} T_m F_i||^2;
    /// n = -1 uses the full weight chi~_{R_P}^{10}.
    double tile_weight(int i, int tile, int n);
    double lacunary_size(int i, const std::vector<int>& tiles, const DyadicSquare& top);
    /// sup over the vanishing-point dictionary (derived from the +/- pieces).
    double overlapping_size(int i, const Rational& xi, const DyadicSquare& top,
                            int* witness_v = nullptr);
    /// One +/- annular piece norm |R|^{-1/2} ||chi~_{R,n}^{10} T_m F_i||.
    double overlapping_piece(int i, const Rational& xi, const DyadicSquare& top, int s,
                             int sign, int v_idx, int n);
    Rational vanishing_point(const Rational& xi, int j_top, int v_idx) const;

    double size3(const std::vector<int>& tiles, const DyadicSquare& top);

    SizeReport size_i(const Tree& t, int i);
    SizeReport size_3(const Tree& t);
    /// sup of size over all candidate maximal trees with tops from the
    /// breakpoint lattice (lacunary and overlapping parts for i in {1,2}).
    SizeReport max_size(const std::vector<int>& pool, int i);

    const GridParams& params() const { return params_; }
    const TileSet& tiles() const { return tiles_; }
    int grid_n() const { return n_; }

    /// Candidate tops: all J-dyadic ancestors (up to the torus) of occupied squares.
    std::vector<DyadicSquare> candidate_tops(const std::vector<int>& pool) const;
    /// xi breakpoints for the pool (2w, 100w endpoints, centers, window edges).
    std::vector<Rational> xi_lattice(const std::vector<int>& pool,
                                     const std::vector<int>& top_scales) const;

    const Field2D& field(int i) const { return *F_[i - 1]; }

private:
    const TileSet& tiles_;
    GridParams params_;
    int n_;
    double L_;
    std::array<const Field2D*, 3> F_;

    std::map<std::tuple<int, int, int>, std::vector<double>> proj_cache_; // (i, cube, entry) -> |T_m F|^2
    std::map<std::tuple<int, int, int>, double> weight_cache_;            // (i, tile, n)
    std::map<std::string, std::vector<double>> over_cache_;               // key -> |T_m F|^2

    const std::vector<double>& projected_density(int i, int cube, int entry);
    const std::vector<double>& overlapping_density(int i, const Rational& xi, int j_top,
                                                   int s, int sign, int v_idx);
    const std::vector<double>& overlapping_density_sum(int i, const Rational& xi, int j_top,
                                                       int v_idx);
    double weighted_l2sq(const std::vector<double>& density, const DyadicSquare& R, int n);
};

SelectionResult greedy_select(SizeEngine& eng, const std::vector<int>& pool, int i,
                              const SelectionParams& params);

struct LevelForest {
    int m = 0;
    double lambda = 0;
    SelectionResult sel;
};

struct LevelDecomposition {
    std::vector<LevelForest> levels;
    std::vector<int> residual; ///< the zero-size leftover set
};

LevelDecomposition select_all_levels(SizeEngine& eng, const std::vector<int>& pool, int i,
                                     double epsilon, const SelectionParams& base = {});

struct CountingStats {
    Rational l1{0};
    int linf = 0;
    double bmo = 0;
};

CountingStats counting_stats(const std::vector<Tree>& trees, double torus = 1.0);

struct ExpandedSplit {
    std::vector<int> sharp, flat;
    double threshold = 0;    ///< expanded-count cap used for the sharp part
    double achieved_inf = 0; ///< measured max of the expanded counting function
    int doublings = 0;
};

/// Split squares so the 2^n-expanded counting function of the sharp part is
/// capped while the flat part holds at most half the area mass.
ExpandedSplit split_expanded(const std::vector<DyadicSquare>& squares, int n,
                             double torus = 1.0);

// --- one dimensional forests ------------------------------------------------

struct Tile1D {
    DyadicInterval I;
    DyadicInterval omega;
};

struct Tree1D {
    std::vector<int> tiles;
    Rational xi{0};
    DyadicInterval I_top;
};

struct OrthReport {
    double lhs = 0;      ///< sum of projected weighted norms squared
    double ratio = 0;    ///< lhs / (log^2(2 + N_inf) ||f||_2^2)
    double n_inf = 0;    ///< max of the top counting function
};

/// Almost-orthogonality functional for a 1D forest; throws if the input is
/// not a forest of lacunary strongly disjoint trees.  I0 restricts to tiles
/// with I_P inside I0 and weights the denominator by chi~_{I0}^2.
OrthReport almost_orthogonality_report(const std::vector<Tile1D>& tiles,
                                       const std::vector<Tree1D>& forest, const Field1D& f,
                                       const GridParams& p,
                                       std::optional<DyadicInterval> I0 = std::nullopt);

// --- structural checkers -----------------------------------------------------

struct NestednessReport {
    bool nested = true;
    Rational boundary_sum_max{0}; ///< max over sampled fibers of sum_j 2^{-jJ} #boundary
    Rational top_side{0};
};

NestednessReport tree_nestedness(const TileSet& ts, const GridParams& p, const Tree& t);

/// Fiberwise reliable split: partition tile indices so that within each part
/// distinct tiles have distinct (I_P, omega_P); at most 2^{n+2} parts.
std::vector<std::vector<int>> split_reliable(const TileSet& ts, const std::vector<int>& tiles,
                                             int n);

} // namespace bht
