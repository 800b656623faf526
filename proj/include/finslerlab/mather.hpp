#pragma once

#include <vector>

#include "finslerlab/action_graph.hpp"
#include "finslerlab/minimizers.hpp"

namespace fin {

/// beta(h) = (stable norm of h)^2 / 2. Rational directions are evaluated
/// exactly at graph resolution; other directions by convex Farey-neighbor
/// interpolation of the stable norm at denominator <= Q.
double beta(const ActionGraph& g, const Vec2& h, int Q = 64);

/// Asymmetric stable norm of a real homology class at graph resolution.
double stableNormReal(const ActionGraph& g, const Vec2& h, int Q = 64);

struct AlphaTable {
    std::vector<double> theta;   ///< direction angles
    std::vector<double> radius;  ///< H_F radius 1/sqrt(2 alpha(e(theta)))
    std::vector<Vec2> eta;       ///< points on H_F
    std::vector<double> alphaUnit;  ///< alpha(e(theta))
};

/// Level set H_F = {alpha = 1/2} by one ratio-cycle solve per direction.
AlphaTable alphaLevel(const ActionGraph& g, int directions);

/// Supporting cohomology class on H_F in a given homology direction:
/// maximizes <eta, hhat> over the level set (golden-section refined).
Vec2 supportEta(const ActionGraph& g, const Vec2& hDirection, const AlphaTable* table = nullptr);

struct BetaCornerReport {
    double leftSlope = 0.0;
    double rightSlope = 0.0;
    bool corner = false;
    double jump = 0.0;  ///< rightSlope - leftSlope after extrapolation
};

/// One-sided derivatives of beta along the unit sphere of the stable norm at a
/// primitive class z, from refined continuous minimizers in the perturbed
/// classes q z +- w at denominators q = Q/2 and Q (Richardson-extrapolated to
/// remove the smooth 1/q curvature term). corner = jump > 5e-3.
BetaCornerReport betaCorner(const Metric& m, const ActionGraph& g, Vec2i z, int Q = 16);

struct BetaTableEntry {
    Vec2i z;
    Vec2 h;           ///< z normalized by the stable norm (point on G_F)
    double beta = 0.0;
    double leftSlope = 0.0;   ///< graph-level one-sided differences
    double rightSlope = 0.0;
};

/// Stable-norm table over Farey directions of denominator <= Q (all four
/// quadrant sign patterns).
std::vector<BetaTableEntry> betaTable(const ActionGraph& g, int Q);

}  // namespace fin
