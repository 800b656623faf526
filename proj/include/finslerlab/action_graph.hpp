#pragma once

#include <optional>
#include <vector>

#include "finslerlab/metric.hpp"

namespace fin {

/// Periodic lattice graph on the fundamental domain whose directed edges carry
/// the Finsler length of the straight segment and its displacement vector.
/// Nodes sit at (i/N, j/N); the stencil holds all gcd-reduced integer offsets
/// with max-norm <= S.
class ActionGraph {
public:
    ActionGraph(MetricPtr m, int N, int S);

    int N() const { return N_; }
    int S() const { return S_; }
    const Metric& metric() const { return *m_; }
    MetricPtr metricPtr() const { return m_; }
    int nodes() const { return N_ * N_; }
    const std::vector<Vec2i>& stencil() const { return stencil_; }
    /// length of edge (node, direction index)
    double len(int node, int dir) const { return len_[size_t(dir) * nodes() + node]; }
    /// real displacement of direction d (in chart units)
    Vec2 disp(int dir) const { return stencil_[dir].toVec() / double(N_); }
    Vec2 nodePos(int node) const {
        return {double(node % N_) / N_, double(node / N_) / N_};
    }
    int nodeAt(int i, int j) const {
        i %= N_; if (i < 0) i += N_;
        j %= N_; if (j < 0) j += N_;
        return j * N_ + i;
    }
    int edgeTarget(int node, int dir) const {
        return nodeAt(node % N_ + stencil_[dir].x, node / N_ + stencil_[dir].y);
    }

private:
    MetricPtr m_;
    int N_, S_;
    std::vector<Vec2i> stencil_;
    std::vector<double> len_;  // dir-major
};

/// Discrete Mane critical value alpha(eta) = r*^2/2 where r* is the maximum of
/// (sum of <eta,d>)/(sum of lengths) over directed cycles, found by bisection
/// with Bellman-Ford negative-cycle detection on weights r*len - <eta,d>.
double criticalAlpha(const ActionGraph& g, const Vec2& eta, double tol = 1e-7);

/// Mane potential Phi_{L-eta+k}(source, .) at optimal parametrisation:
/// single-source shortest paths for edge cost sqrt(2k)*len - <eta,d>.
/// Throws SubcriticalEnergy when a negative cycle exists.
std::vector<double> manePotential(const ActionGraph& g, const Vec2& eta, double k, int source);

/// u(x) = min_y Phi_{L-eta+k}(y, x); satisfies the discrete domination
/// inequality u(y)-u(x) <= sqrt(2k) len(e) - <eta, d(e)> on every edge.
struct DominatedPotential {
    Vec2 eta;
    double k = 0.0;
    std::vector<double> u;
    double maxResidual() const { return residual; }
    double residual = 0.0;
};
DominatedPotential dominatedPotential(const ActionGraph& g, const Vec2& eta, double k);

struct StableNormResult {
    double length = 0.0;
    std::vector<Vec2> path;  ///< minimizing discrete path in the cover
    int source = 0;
};

/// Minimal F-length of a discrete loop in class z: min over fundamental-domain
/// start nodes of the cover shortest-path length from x to x+z. The window
/// unrolls reps*|z|_inf + 2 periods around the corridor.
StableNormResult stableNorm(const ActionGraph& g, Vec2i z, int reps = 1);

}  // namespace fin
