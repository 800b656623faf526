#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "finslerlab/metric.hpp"

namespace fin {

/// A discretized curve in the universal cover, parametrised piecewise-linearly.
/// Closed paths represent loops of homotopy class z via nodes.back() == nodes
/// .front() + z (the wrap segment is implicit: the stored nodes are the free
/// ones; segment i runs nodes[i] -> nodes[i+1], and for closed paths the last
/// segment runs nodes.back() -> nodes.front() + z).
struct LiftedPath {
    std::vector<Vec2> nodes;
    std::optional<Vec2i> closedClass;

    size_t segments() const {
        return closedClass ? nodes.size() : (nodes.empty() ? 0 : nodes.size() - 1);
    }
    Vec2 segStart(size_t i) const { return nodes[i]; }
    Vec2 segEnd(size_t i) const {
        if (closedClass && i + 1 == nodes.size()) return nodes.front() + closedClass->toVec();
        return nodes[i + 1];
    }
    Vec2 displacement() const {
        if (closedClass) return closedClass->toVec();
        return nodes.back() - nodes.front();
    }
};

double pathLengthF(const LiftedPath& p, const Metric& m);
/// d(length)/d(node) for every node (wrap segment handled for closed paths).
std::vector<Vec2> pathLengthGrad(const LiftedPath& p, const Metric& m);

/// Resample to n nodes at equal F-arc-length along the polyline (trace kept).
LiftedPath resampleArcLength(const LiftedPath& p, const Metric& m, size_t n);
/// Resample to n nodes at equal euclidean arc-length.
LiftedPath resampleEuclid(const LiftedPath& p, size_t n);
/// Concatenate k copies of a closed path (class becomes k*z).
LiftedPath tileClosed(const LiftedPath& p, int k);
/// Translate all nodes.
LiftedPath translate(const LiftedPath& p, const Vec2& t);

struct MinimizeOptions {
    double gradTol = 1e-9;       ///< sup-norm target for the length gradient
    int maxIter = 10000;
    bool fixFirst = false;       ///< pin nodes.front()
    bool fixLast = false;        ///< pin nodes.back()
    std::vector<int> fixedNodes; ///< additional pinned node indices
    /// Optional feasibility projection applied to every node after each step;
    /// returns true if the node was moved.
    std::function<bool(Vec2&)> project;
};

struct MinimizeReport {
    double length = 0.0;
    double gradResidual = 0.0;
    int iterations = 0;
    bool converged = false;
    int projectionsActive = 0;  ///< nodes moved by the projection in the final iterate
};

/// Minimizes F-length over node positions by Polak-Ribiere nonlinear CG with a
/// monotone backtracking line search; the length never increases. Constraints
/// are enforced by projecting nodes after each accepted step.
MinimizeReport minimizeLength(LiftedPath& p, const Metric& m, const MinimizeOptions& opt = {});

/// First-order stationarity sup-norm (free nodes only).
double stationarityResidual(const LiftedPath& p, const Metric& m, const MinimizeOptions& opt = {});

/// All proper crossings between two polylines (shared endpoints ignored).
struct CrossingReport {
    int crossings = 0;
    double clearance = 0.0;  ///< min distance between the polylines (0 if crossing)
};
CrossingReport polylineCrossings(const std::vector<Vec2>& a, const std::vector<Vec2>& b,
                                 bool skipSharedEndpoints = true);

}  // namespace fin
