#pragma once

#include <optional>
#include <vector>

#include "bht/dyadic.hpp"
#include "bht/field.hpp"
#include "bht/multiplier.hpp"

namespace bht {

/// One frequency cube omega x omega x omega3 with its companion interval.
struct FrequencyCube {
    DyadicInterval omega;      ///< omega_1 = omega_2
    DyadicInterval omega3;
    RationalInterval omega_bar; ///< enlarged companion, in the shifted auxiliary grid
    int j = 0;                  ///< scale: |omega| = 2^{jJ}

    Rational len() const { return omega.length(); }
};

struct CubeBuildReport {
    int candidates = 0;
    int skipped_no_companion = 0;
    int skipped_offset = 0;
    std::vector<int> empty_scales;
};

struct CubeFamily {
    GridParams params;
    std::vector<FrequencyCube> cubes;
    CubeBuildReport report;

    const FrequencyCube& at(int idx) const { return cubes[idx]; }
};

/// Family over scales j in [j_min, j_max] with omega inside `window`,
/// satisfying the one-parameter, separation, companion-containment and
/// offset properties (validated before return).
CubeFamily build_cube_family(const GridParams& params, int j_min, int j_max,
                             const RationalInterval& window);

/// Exhaustive exact validation; throws parameter_error on any violation.
void validate_cube_family(const CubeFamily& family);

/// Spatial square x frequency cube, |I_P| |omega| = 1.
struct MultiTile {
    DyadicSquare square;
    int cube = 0; ///< index into the family
    int j = 0;

    bool operator==(const MultiTile& o) const { return square == o.square && cube == o.cube; }
};

struct TileSet {
    CubeFamily family;
    std::vector<MultiTile> tiles;

    const FrequencyCube& cube_of(const MultiTile& t) const { return family.cubes[t.cube]; }
    const FrequencyCube& cube_of(std::size_t i) const { return family.cubes[tiles[i].cube]; }
};

/// All J-dyadic squares of each cube's dual scale inside `region`.
TileSet tiles_for_region(const CubeFamily& family, const RationalRect& region);

/// Multi-tile of the x-separated model: one spatial interval, three
/// frequency intervals of equal length |I_P|^{-1}.
struct PsiConeMultiTile {
    DyadicInterval I;
    DyadicInterval omega1, omega2, omega3;
};

/// Tiles over scales [j_min, j_max] (|I| = 2^{-jJ}) with omega1 in `window`,
/// pairwise-overlap rule validated exactly.
std::vector<PsiConeMultiTile> psi_cone_tiles(const GridParams& params, int j_min, int j_max,
                                             const RationalInterval& window,
                                             const RationalInterval& spatial =
                                                 RationalInterval(0, 1));

/// Exact check of the coupling rule: xi in 2 omega_i forces the companion
/// coordinates into C0 omega_j minus 2 omega_j for j != i.
void validate_psi_cone_tile(const PsiConeMultiTile& t, const GridParams& params);

struct HyperMultiTile {
    int tile = 0; ///< index into the psi-cone tile list
    DyadicInterval Jint;
};

/// L^2-normalized wave packet of tile component i on an n-grid.
/// The prototype has Fourier transform supported in [-1/2, 1/2].
Field1D wave_packet(const PsiConeMultiTile& t, int i, int n, double L = 1.0);
/// Un-modulated vertical packet psi_J for a dyadic interval J.
Field1D vertical_packet(const DyadicInterval& Jint, int n, double L, int dict_entry);
int vertical_dictionary_size();

struct WavePacketCoeffs {
    // a[i-1][tile * N + y] for i in {1,2,3}
    std::array<std::vector<double>, 3> a;
    std::vector<double> b; ///< per hyper-multi-tile
    int grid_n = 0;
    double at(int i, std::size_t tile, int y) const {
        return a[i - 1][tile * (std::size_t(1) << grid_n) + y];
    }
};

WavePacketCoeffs extract_coeffs(const Field2D& F1, const Field2D& F2, const Field2D& F3,
                                const std::vector<PsiConeMultiTile>& tiles,
                                const std::vector<HyperMultiTile>& hyper);

} // namespace bht
