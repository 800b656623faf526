#pragma once

#include <vector>

#include "finslerlab/minimizers.hpp"

namespace fin {

struct GapStrip {
    int lower = 0, upper = 0;          ///< family indices of the bounding minimizers
    double width = 0.0;                ///< max transverse separation
    bool hetPlusFound = false, hetMinusFound = false;
    double omegaPlus = 0.0, omegaMinus = 0.0;
    double omegaPlusWindowChange = 0.0, omegaMinusWindowChange = 0.0;
    double hetCoveragePlus = 0.0, hetCoverageMinus = 0.0;
    LiftedPath hetPlus, hetMinus;
};

struct GapReport {
    Vec2i z;
    std::vector<LiftedPath> family;    ///< clustered global periodic minimizers
    std::vector<double> familyLength;
    double minLength = 0.0;
    double coverage = 0.0;             ///< fraction of T^2 within 1/128 of the family
    std::vector<GapStrip> gaps;
    bool gapCondition = false;         ///< coverage < 1 and some gap has both het fans partial
    double boundedDeviation = 0.0;     ///< max transverse excursion over the family
};

struct GapScanOptions {
    int resolution = 128;     ///< initial transverse heights
    int graphN = 32, graphS = 3;
    int nodesPerUnit = 24;
    double clusterTol = 1.0 / 128.0;
    double lengthTol = 1e-3;  ///< relative filter for global minimality
    int hetWindow = 8;
    int fanProbes = 8;        ///< interior pinning probes per gap and sign
    bool runHeteroclinics = true;
};

/// Scans periodic minimizers of a primitive class z from many initial heights,
/// clusters them, measures coverage, and probes each gap with + and -
/// heteroclinics (fans of interior pinning points estimate the N^+- coverage).
GapReport gapScan(MetricPtr m, Vec2i z, const GapScanOptions& opt = {});

struct TorusGraphSample {
    Vec2 h;
    int grid = 0;
    std::vector<Vec2> field;       ///< unit velocity per base grid point (row-major)
    std::vector<char> defined;
    double lipschitz = 0.0;
    int multiValued = 0;           ///< count of angle conflicts > 0.05 rad
};

struct AssembleOptions {
    int Q = 32;
    int grid = 24;
    GapScanOptions scan;
};

/// Invariant-torus candidate for an irrational direction h: launches periodic
/// families for the two Farey approximants at denominator <= Q, samples unit
/// velocities over a base grid, and merges by nearest-approximant weighting.
TorusGraphSample assembleTorus(MetricPtr m, const Vec2& h, const AssembleOptions& opt = {});

struct GraphPropertyReport {
    int crossingPairs = 0;
    double minClearance = 0.0;
};

/// Pairwise polyline intersection test over the computed windows.
GraphPropertyReport graphPropertyTest(const std::vector<const LiftedPath*>& paths,
                                      double trimFraction = 0.0);

}  // namespace fin
