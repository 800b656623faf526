#include "finslerlab/path.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "finslerlab/quadrature.hpp"

namespace fin {

double pathLengthF(const LiftedPath& p, const Metric& m) {
    double L = 0.0;
    for (size_t i = 0; i < p.segments(); ++i) {
        Vec2 a = p.segStart(i);
        L += segmentLengthF(m, a, p.segEnd(i) - a);
    }
    return L;
}

std::vector<Vec2> pathLengthGrad(const LiftedPath& p, const Metric& m) {
    std::vector<Vec2> grad(p.nodes.size(), Vec2{0, 0});
    for (size_t i = 0; i < p.segments(); ++i) {
        Vec2 a = p.segStart(i), b = p.segEnd(i);
        Vec2 ga, gb;
        segmentLengthGrad(m, a, b, ga, gb);
        grad[i] += ga;
        size_t j = (i + 1 == p.nodes.size() && p.closedClass) ? 0 : i + 1;
        if (p.closedClass && i + 1 == p.nodes.size())
            grad[0] += gb;  // wrap: end node is nodes[0] + z
        else
            grad[j] += gb;
    }
    return grad;
}

static std::vector<double> cumulativeLengthF(const LiftedPath& p, const Metric& m) {
    std::vector<double> cum(p.segments() + 1, 0.0);
    for (size_t i = 0; i < p.segments(); ++i) {
        Vec2 a = p.segStart(i);
        cum[i + 1] = cum[i] + segmentLengthF(m, a, p.segEnd(i) - a);
    }
    return cum;
}

static LiftedPath resampleByTable(const LiftedPath& p, const std::vector<double>& cum, size_t n) {
    LiftedPath out;
    out.closedClass = p.closedClass;
    out.nodes.reserve(n);
    double total = cum.back();
    size_t nOut = p.closedClass ? n : n;  // closed: n free nodes; open: n nodes inc. endpoints
    size_t denom = p.closedClass ? n : n - 1;
    size_t j = 0;
    for (size_t i = 0; i < nOut; ++i) {
        double s = total * double(i) / double(denom);
        while (j + 1 < cum.size() - 1 && cum[j + 1] < s) ++j;
        double span = cum[j + 1] - cum[j];
        double u = span > 0 ? (s - cum[j]) / span : 0.0;
        out.nodes.push_back(p.segStart(j) * (1 - u) + p.segEnd(j) * u);
    }
    if (!p.closedClass) out.nodes.back() = p.nodes.back();
    return out;
}

LiftedPath resampleArcLength(const LiftedPath& p, const Metric& m, size_t n) {
    return resampleByTable(p, cumulativeLengthF(p, m), n);
}

LiftedPath resampleEuclid(const LiftedPath& p, size_t n) {
    std::vector<double> cum(p.segments() + 1, 0.0);
    for (size_t i = 0; i < p.segments(); ++i)
        cum[i + 1] = cum[i] + norm(p.segEnd(i) - p.segStart(i));
    return resampleByTable(p, cum, n);
}

LiftedPath tileClosed(const LiftedPath& p, int k) {
    if (!p.closedClass) throw ValidationError("tileClosed needs a closed path");
    LiftedPath out;
    Vec2 z = p.closedClass->toVec();
    out.closedClass = Vec2i{p.closedClass->x * k, p.closedClass->y * k};
    out.nodes.reserve(p.nodes.size() * size_t(k));
    for (int c = 0; c < k; ++c)
        for (const Vec2& q : p.nodes) out.nodes.push_back(q + z * double(c));
    return out;
}

LiftedPath translate(const LiftedPath& p, const Vec2& t) {
    LiftedPath out = p;
    for (auto& q : out.nodes) q += t;
    return out;
}

namespace {

struct FreeMask {
    std::vector<char> fixed;
    explicit FreeMask(size_t n, const MinimizeOptions& opt) : fixed(n, 0) {
        if (opt.fixFirst && n) fixed[0] = 1;
        if (opt.fixLast && n) fixed[n - 1] = 1;
        for (int i : opt.fixedNodes)
            if (i >= 0 && size_t(i) < n) fixed[size_t(i)] = 1;
    }
};

double supNorm(const std::vector<Vec2>& g, const FreeMask& mask) {
    double s = 0.0;
    for (size_t i = 0; i < g.size(); ++i)
        if (!mask.fixed[i]) s = std::max(s, std::max(std::abs(g[i].x), std::abs(g[i].y)));
    return s;
}

}  // namespace

double stationarityResidual(const LiftedPath& p, const Metric& m, const MinimizeOptions& opt) {
    FreeMask mask(p.nodes.size(), opt);
    return supNorm(pathLengthGrad(p, m), mask);
}

MinimizeReport minimizeLength(LiftedPath& p, const Metric& m, const MinimizeOptions& opt) {
    const size_t n = p.nodes.size();
    FreeMask mask(n, opt);
    MinimizeReport rep;

    auto applyProjection = [&](LiftedPath& q) {
        int moved = 0;
        if (opt.project)
            for (size_t i = 0; i < n; ++i)
                if (!mask.fixed[i] && opt.project(q.nodes[i])) ++moved;
        return moved;
    };

    applyProjection(p);
    double f = pathLengthF(p, m);
    std::vector<Vec2> g = pathLengthGrad(p, m);
    for (size_t i = 0; i < n; ++i)
        if (mask.fixed[i]) g[i] = {0, 0};
    std::vector<Vec2> dir(n);
    for (size_t i = 0; i < n; ++i) dir[i] = -g[i];
    double g2 = 0.0;
    for (const auto& gi : g) g2 += norm2(gi);

    double step = 0.1 / std::max(1.0, std::sqrt(g2));
    int it = 0;
    for (; it < opt.maxIter; ++it) {
        double res = supNorm(g, mask);
        rep.gradResidual = res;
        if (res <= opt.gradTol) {
            rep.converged = true;
            break;
        }
        double slope = 0.0;
        for (size_t i = 0; i < n; ++i) slope += dot(g[i], dir[i]);
        if (slope >= 0.0) {  // reset to steepest descent
            for (size_t i = 0; i < n; ++i) dir[i] = -g[i];
            slope = -g2;
        }

        // monotone backtracking with one expansion attempt
        double t = step;
        LiftedPath cand = p;
        double fNew = f;
        bool accepted = false;
        int projMoved = 0;
        for (int ls = 0; ls < 40; ++ls) {
            for (size_t i = 0; i < n; ++i)
                cand.nodes[i] = p.nodes[i] + (mask.fixed[i] ? Vec2{0, 0} : dir[i] * t);
            projMoved = applyProjection(cand);
            fNew = pathLengthF(cand, m);
            if (fNew <= f + 1e-4 * t * slope) {
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if (!accepted) break;  // line search exhausted: stationary to rounding
        if (fNew > f) break;   // safety: never increase the length
        p = cand;
        f = fNew;
        step = std::min(t * 2.0, 1.0);
        rep.projectionsActive = projMoved;

        std::vector<Vec2> gNew = pathLengthGrad(p, m);
        for (size_t i = 0; i < n; ++i)
            if (mask.fixed[i]) gNew[i] = {0, 0};
        double g2New = 0.0, gyDot = 0.0;
        for (size_t i = 0; i < n; ++i) {
            g2New += norm2(gNew[i]);
            gyDot += dot(gNew[i], gNew[i] - g[i]);
        }
        double betaPR = projMoved > 0 ? 0.0 : std::max(0.0, gyDot / std::max(g2, 1e-300));
        for (size_t i = 0; i < n; ++i) dir[i] = -gNew[i] + dir[i] * betaPR;
        g = std::move(gNew);
        g2 = g2New;
    }
    rep.iterations = it;
    rep.length = f;
    rep.gradResidual = supNorm(g, mask);
    if (rep.gradResidual <= opt.gradTol) rep.converged = true;
    return rep;
}

// ---------------------------------------------------------------------------

namespace {

bool segIntersect(const Vec2& p1, const Vec2& p2, const Vec2& q1, const Vec2& q2) {
    auto orient = [](const Vec2& a, const Vec2& b, const Vec2& c) {
        double v = cross(b - a, c - a);
        return v > 1e-15 ? 1 : (v < -1e-15 ? -1 : 0);
    };
    int o1 = orient(p1, p2, q1), o2 = orient(p1, p2, q2);
    int o3 = orient(q1, q2, p1), o4 = orient(q1, q2, p2);
    return o1 != o2 && o3 != o4 && o1 != 0 && o2 != 0 && o3 != 0 && o4 != 0;
}

double segDistance(const Vec2& p1, const Vec2& p2, const Vec2& q1, const Vec2& q2) {
    auto ptSeg = [](const Vec2& p, const Vec2& a, const Vec2& b) {
        Vec2 d = b - a;
        double len2 = norm2(d);
        double t = len2 > 0 ? std::clamp(dot(p - a, d) / len2, 0.0, 1.0) : 0.0;
        return norm(p - (a + d * t));
    };
    return std::min(std::min(ptSeg(p1, q1, q2), ptSeg(p2, q1, q2)),
                    std::min(ptSeg(q1, p1, p2), ptSeg(q2, p1, p2)));
}

}  // namespace

CrossingReport polylineCrossings(const std::vector<Vec2>& a, const std::vector<Vec2>& b,
                                 bool skipSharedEndpoints) {
    CrossingReport rep;
    rep.clearance = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i + 1 < a.size(); ++i) {
        for (size_t j = 0; j + 1 < b.size(); ++j) {
            double d = segDistance(a[i], a[i + 1], b[j], b[j + 1]);
            if (skipSharedEndpoints && d < 1e-12) {
                bool shared = norm(a[i] - b[j]) < 1e-12 || norm(a[i] - b[j + 1]) < 1e-12 ||
                              norm(a[i + 1] - b[j]) < 1e-12 || norm(a[i + 1] - b[j + 1]) < 1e-12;
                if (shared) continue;
            }
            rep.clearance = std::min(rep.clearance, d);
            if (segIntersect(a[i], a[i + 1], b[j], b[j + 1])) ++rep.crossings;
        }
    }
    if (!std::isfinite(rep.clearance)) rep.clearance = 0.0;
    return rep;
}

}  // namespace fin
