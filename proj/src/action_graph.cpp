#include "finslerlab/action_graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "finslerlab/quadrature.hpp"

namespace fin {

ActionGraph::ActionGraph(MetricPtr m, int N, int S) : m_(std::move(m)), N_(N), S_(S) {
    if (m_->chart() != Chart::Torus)
        throw ChartMismatchError("action graph requires a torus-chart metric");
    if (N < 16 || S < 1) throw ValidationError("need N >= 16 and S >= 1");
    for (int p = -S; p <= S; ++p)
        for (int q = -S; q <= S; ++q) {
            if (p == 0 && q == 0) continue;
            if (gcd2(p, q) != 1) continue;
            stencil_.push_back({p, q});
        }
    double edges = double(N) * N * double(stencil_.size());
    if (edges > 1e8) throw OutOfMemoryError("N^2 * |stencil| exceeds 1e8 edges");

    len_.resize(size_t(edges));
    const Metric& M = *m_;
    for (size_t d = 0; d < stencil_.size(); ++d) {
        Vec2 dd = stencil_[d].toVec() / double(N_);
        for (int node = 0; node < nodes(); ++node) {
            double L = segmentLengthF(M, nodePos(node), dd);
            if (!(L > 0.0)) throw DegenerateMetricError("non-positive edge length");
            len_[d * size_t(nodes()) + size_t(node)] = L;
        }
    }
}

namespace {

// Bellman-Ford from a virtual source (all distances zero). Returns true when a
// negative cycle exists; the predecessor graph is probed for cycles after each
// pass so that negative cycles surface long before the V-pass worst case.
bool negativeCycle(const ActionGraph& g, const std::vector<double>& cost) {
    int n = g.nodes();
    int ndir = int(g.stencil().size());
    std::vector<double> dist(n, 0.0);
    std::vector<int> pred(n, -1), mark(n, -1);
    for (int pass = 0; pass < n + 1; ++pass) {
        bool any = false;
        for (int d = 0; d < ndir; ++d) {
            const double* c = cost.data() + size_t(d) * n;
            for (int u = 0; u < n; ++u) {
                double nd = dist[u] + c[u];
                int v = g.edgeTarget(u, d);
                if (nd < dist[v] - 1e-15) {
                    dist[v] = nd;
                    pred[v] = u;
                    any = true;
                }
            }
        }
        if (!any) return false;
        // cycle probe in the predecessor graph
        std::fill(mark.begin(), mark.end(), -1);
        for (int s = 0; s < n; ++s) {
            if (mark[s] >= 0) continue;
            int u = s;
            while (u >= 0 && mark[u] < 0) {
                mark[u] = s;
                u = pred[u];
            }
            if (u >= 0 && mark[u] == s) return true;
        }
    }
    return true;  // still relaxing after V passes
}

std::vector<double> edgeCosts(const ActionGraph& g, double r, const Vec2& eta) {
    int n = g.nodes();
    int ndir = int(g.stencil().size());
    std::vector<double> cost(size_t(ndir) * n);
    for (int d = 0; d < ndir; ++d) {
        double flux = dot(eta, g.disp(d));
        for (int u = 0; u < n; ++u) cost[size_t(d) * n + u] = r * g.len(u, d) - flux;
    }
    return cost;
}

}  // namespace

double criticalAlpha(const ActionGraph& g, const Vec2& eta, double tol) {
    if (eta.x == 0.0 && eta.y == 0.0) return 0.0;
    // upper bound: max single-edge ratio; at r=hi no edge (hence no cycle) is negative
    double hi = 0.0;
    int ndir = int(g.stencil().size());
    for (int d = 0; d < ndir; ++d) {
        double flux = dot(eta, g.disp(d));
        if (flux <= 0) continue;
        for (int u = 0; u < g.nodes(); ++u) hi = std::max(hi, flux / g.len(u, d));
    }
    if (hi == 0.0) return 0.0;
    double lo = 0.0;
    if (!negativeCycle(g, edgeCosts(g, lo + tol * 0.01, eta))) return 0.0;
    while (hi - lo > tol) {
        double mid = 0.5 * (lo + hi);
        if (negativeCycle(g, edgeCosts(g, mid, eta)))
            lo = mid;
        else
            hi = mid;
    }
    double r = 0.5 * (lo + hi);
    return 0.5 * r * r;
}

std::vector<double> manePotential(const ActionGraph& g, const Vec2& eta, double k, int source) {
    if (!(k >= 0.0)) throw ValidationError("k must be nonnegative");
    int n = g.nodes();
    int ndir = int(g.stencil().size());
    double s2k = std::sqrt(2.0 * k);
    std::vector<double> cost = edgeCosts(g, s2k, eta);

    double minCost = *std::min_element(cost.begin(), cost.end());
    std::vector<double> dist(n, std::numeric_limits<double>::infinity());
    dist[source] = 0.0;

    if (minCost >= 0.0) {
        using Item = std::pair<double, int>;
        std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
        pq.push({0.0, source});
        while (!pq.empty()) {
            auto [du, u] = pq.top();
            pq.pop();
            if (du > dist[u]) continue;
            for (int d = 0; d < ndir; ++d) {
                double nd = du + cost[size_t(d) * n + u];
                int v = g.edgeTarget(u, d);
                if (nd < dist[v]) {
                    dist[v] = nd;
                    pq.push({nd, v});
                }
            }
        }
        return dist;
    }

    // Bellman-Ford with negative-cycle detection
    for (int pass = 0; pass <= n; ++pass) {
        bool any = false;
        for (int d = 0; d < ndir; ++d) {
            const double* c = cost.data() + size_t(d) * n;
            for (int u = 0; u < n; ++u) {
                if (!std::isfinite(dist[u])) continue;
                double nd = dist[u] + c[u];
                int v = g.edgeTarget(u, d);
                if (nd < dist[v] - 1e-15) {
                    dist[v] = nd;
                    any = true;
                }
            }
        }
        if (!any) return dist;
    }
    throw SubcriticalEnergyError("negative cycle: k below the critical value");
}

DominatedPotential dominatedPotential(const ActionGraph& g, const Vec2& eta, double k) {
    int n = g.nodes();
    int ndir = int(g.stencil().size());
    double s2k = std::sqrt(2.0 * std::max(0.0, k));
    std::vector<double> cost = edgeCosts(g, s2k, eta);

    DominatedPotential out;
    out.eta = eta;
    out.k = k;
    out.u.assign(size_t(n), 0.0);
    // multi-source relaxation to the fixpoint u(x) = min_y Phi(y,x)
    for (int pass = 0; pass <= n; ++pass) {
        bool any = false;
        for (int d = 0; d < ndir; ++d) {
            const double* c = cost.data() + size_t(d) * n;
            for (int u = 0; u < n; ++u) {
                double nd = out.u[u] + c[u];
                int v = g.edgeTarget(u, d);
                if (nd < out.u[v] - 1e-15) {
                    out.u[v] = nd;
                    any = true;
                }
            }
        }
        if (!any) break;
        if (pass == n) throw SubcriticalEnergyError("negative cycle: k below the critical value");
    }
    double res = -1e300;
    for (int d = 0; d < ndir; ++d)
        for (int u = 0; u < n; ++u)
            res = std::max(res, out.u[g.edgeTarget(u, d)] - out.u[u] - cost[size_t(d) * n + u]);
    out.residual = res;
    return out;
}

// ---------------------------------------------------------------------------
// stable norm: A* point-to-point queries in an unrolled cover window

namespace {

struct CoverWindow {
    int aLo, aHi, bLo, bHi;  // inclusive cell ranges
    int N, ncellsA;
    int cellCount() const { return (aHi - aLo + 1) * (bHi - bLo + 1); }
    long nodeCount() const { return long(cellCount()) * N * N; }
    long index(int a, int b, int node) const {
        long cell = long(b - bLo) * ncellsA + (a - aLo);
        return cell * (long(N) * N) + node;
    }
};

}  // namespace

StableNormResult stableNorm(const ActionGraph& g, Vec2i z, int reps) {
    if (z.x == 0 && z.y == 0) throw ValidationError("class must be nonzero");
    int margin = 2;
    int W = reps * maxAbs(z) + margin;
    (void)W;
    CoverWindow win;
    win.N = g.N();
    win.aLo = std::min(0, z.x) - margin;
    win.aHi = std::max(0, z.x) + margin;
    win.bLo = std::min(0, z.y) - margin;
    win.bHi = std::max(0, z.y) + margin;
    win.ncellsA = win.aHi - win.aLo + 1;

    const int n2 = g.nodes();
    const int ndir = int(g.stencil().size());
    long total = win.nodeCount();
    std::vector<double> dist(size_t(total));
    std::vector<long> pred(size_t(total));
    std::vector<int> stamp(size_t(total), -1);

    // crude admissible lower bound on F-distance: euclidean / cF-bound
    double cfBound = 1.0;
    for (int d = 0; d < ndir; ++d) {
        double nd = norm(g.disp(d));
        for (int u = 0; u < n2; ++u) cfBound = std::max(cfBound, nd / g.len(u, d));
    }

    // sources restricted to a cut the optimal cycle must pass through
    std::vector<int> sources;
    if (z.x != 0) {
        for (int i = 0; i < std::min(g.S(), g.N()); ++i)
            for (int j = 0; j < g.N(); ++j) sources.push_back(g.nodeAt(i, j));
    } else {
        for (int j = 0; j < std::min(g.S(), g.N()); ++j)
            for (int i = 0; i < g.N(); ++i) sources.push_back(g.nodeAt(i, j));
    }

    StableNormResult best;
    best.length = std::numeric_limits<double>::infinity();

    using Item = std::pair<double, long>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;

    for (size_t si = 0; si < sources.size(); ++si) {
        int s = sources[si];
        Vec2 target = g.nodePos(s) + z.toVec();
        auto heur = [&](const Vec2& p) { return norm(target - p) / cfBound; };

        int myStamp = int(si);
        long startIdx = win.index(0, 0, s);
        long goalIdx = win.index(z.x, z.y, s);
        dist[startIdx] = 0.0;
        pred[startIdx] = -1;
        stamp[startIdx] = myStamp;
        while (!pq.empty()) pq.pop();
        pq.push({heur(g.nodePos(s)), startIdx});

        while (!pq.empty()) {
            auto [f, idx] = pq.top();
            pq.pop();
            if (f >= best.length) break;  // bound prune
            long cell = idx / n2;
            int node = int(idx % n2);
            int a = win.aLo + int(cell % win.ncellsA);
            int b = win.bLo + int(cell / win.ncellsA);
            Vec2 p = g.nodePos(node) + Vec2(a, b);
            double du = dist[idx];
            if (f > du + heur(p) + 1e-12) continue;  // stale
            if (idx == goalIdx) break;
            int i0 = node % win.N, j0 = node / win.N;
            for (int d = 0; d < ndir; ++d) {
                Vec2i off = g.stencil()[d];
                int i1 = i0 + off.x, j1 = j0 + off.y;
                int a1 = a, b1 = b;
                while (i1 < 0) { i1 += win.N; --a1; }
                while (i1 >= win.N) { i1 -= win.N; ++a1; }
                while (j1 < 0) { j1 += win.N; --b1; }
                while (j1 >= win.N) { j1 -= win.N; ++b1; }
                if (a1 < win.aLo || a1 > win.aHi || b1 < win.bLo || b1 > win.bHi) continue;
                long vidx = win.index(a1, b1, j1 * win.N + i1);
                double nd = du + g.len(node, d);
                if (stamp[vidx] != myStamp || nd < dist[vidx] - 1e-15) {
                    stamp[vidx] = myStamp;
                    dist[vidx] = nd;
                    pred[vidx] = idx;
                    pq.push({nd + heur(g.nodePos(j1 * win.N + i1) + Vec2(a1, b1)), vidx});
                }
            }
        }

        if (stamp[goalIdx] == myStamp && dist[goalIdx] < best.length) {
            best.length = dist[goalIdx];
            best.source = s;
            best.path.clear();
            for (long idx = goalIdx; idx >= 0; idx = pred[idx]) {
                long cell = idx / n2;
                int node = int(idx % n2);
                int a = win.aLo + int(cell % win.ncellsA);
                int b = win.bLo + int(cell / win.ncellsA);
                best.path.push_back(g.nodePos(node) + Vec2(a, b));
                if (pred[idx] < 0) break;
            }
            std::reverse(best.path.begin(), best.path.end());
        }
    }
    if (!std::isfinite(best.length)) throw NoConvergenceError("no path found in the cover window");
    return best;
}

}  // namespace fin
