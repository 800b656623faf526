#include "finslerlab/minimizers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "finslerlab/quadrature.hpp"

namespace fin {

// ---------------------------------------------------------------------------
// periodic minimizers

PeriodicMinimizer refineClosedPath(const Metric& m, LiftedPath seed, int nPath) {
    if (!seed.closedClass) throw ValidationError("seed must be a closed path");
    LiftedPath p = resampleEuclid(seed, size_t(nPath));
    MinimizeOptions opt;
    opt.gradTol = 1e-9;
    opt.maxIter = 10000;
    MinimizeReport rep = minimizeLength(p, m, opt);

    PeriodicMinimizer out;
    out.path = resampleArcLength(p, m, size_t(nPath));
    out.length = pathLengthF(out.path, m);
    out.residual = stationarityResidual(out.path, m, {});
    out.iterations = rep.iterations;
    out.converged = rep.gradResidual <= 1e-8;
    return out;
}

PeriodicMinimizer periodicMinimizer(const Metric& m, Vec2i z, int nPath, const ActionGraph& g) {
    if (z.x == 0 && z.y == 0) throw ValidationError("class must be nonzero");
    StableNormResult sn = stableNorm(g, z);
    LiftedPath seed;
    seed.nodes.assign(sn.path.begin(), sn.path.end() - 1);
    seed.closedClass = z;
    return refineClosedPath(m, std::move(seed), nPath);
}

// ---------------------------------------------------------------------------
// rotation vectors

RotationData rotationVector(const std::vector<double>& times, const std::vector<Vec2>& pos) {
    if (times.size() != pos.size() || times.size() < 4)
        throw ValidationError("need matching time/position samples");
    double total = times.back() - times.front();
    if (total < 50.0) throw TooShortError("need total length/time >= 50");
    size_t i0 = 0;
    double tCut = times.back() - 0.8 * total;
    while (i0 + 1 < times.size() && times[i0] < tCut) ++i0;

    double n = 0, st = 0, stt = 0;
    Vec2 sx{0, 0}, stx{0, 0};
    for (size_t i = i0; i < times.size(); ++i) {
        double t = times[i];
        n += 1;
        st += t;
        stt += t * t;
        sx += pos[i];
        stx += pos[i] * t;
    }
    double den = stt - st * st / n;
    Vec2 rho = (stx - sx * (st / n)) / den;
    Vec2 mean = sx / n;
    double tmean = st / n;
    double ss = 0;
    for (size_t i = i0; i < times.size(); ++i) {
        Vec2 r = pos[i] - mean - rho * (times[i] - tmean);
        ss += norm2(r);
    }
    RotationData out;
    out.rho = rho;
    out.deltaPlus = normalized(pos.back() - pos[i0]);
    out.residual = std::sqrt(ss / n);
    return out;
}

RotationData rotationVector(const LiftedPath& p, const Metric& m) {
    std::vector<double> t(p.nodes.size() + (p.closedClass ? 1 : 0), 0.0);
    std::vector<Vec2> x;
    x.reserve(t.size());
    for (const auto& q : p.nodes) x.push_back(q);
    if (p.closedClass) x.push_back(p.nodes.front() + p.closedClass->toVec());
    for (size_t i = 0; i + 1 < x.size(); ++i)
        t[i + 1] = t[i] + segmentLengthF(m, x[i], x[i + 1] - x[i]);
    return rotationVector(t, x);
}

RotationData rotationVector(const OrbitSample& o) {
    std::vector<Vec2> x;
    x.reserve(o.states.size());
    for (const auto& s : o.states) x.push_back(s.x);
    return rotationVector(o.times, x);
}

// ---------------------------------------------------------------------------
// strip frame helpers

namespace {

/// Station/transverse frame attached to a class direction z.
struct Frame {
    Vec2 zhat, what;
    double P;  // station advance of one tau-translate
    explicit Frame(Vec2i z) {
        Vec2 zv = z.toVec();
        P = norm(zv);
        zhat = zv / P;
        what = perp(zhat);
    }
    double s(const Vec2& x) const { return dot(zhat, x); }
    double w(const Vec2& x) const { return dot(what, x); }
    Vec2 point(double s, double w) const { return zhat * s + what * w; }
};

/// Closed-path position at a real phase (in periods).
Vec2 closedPathAt(const LiftedPath& q, double phase) {
    double k = std::floor(phase);
    double frac = phase - k;
    size_t M = q.nodes.size();
    double u = frac * double(M);
    size_t i = size_t(u);
    if (i >= M) i = M - 1;
    double a = u - double(i);
    Vec2 p0 = q.nodes[i];
    Vec2 p1 = (i + 1 == M) ? q.nodes[0] + q.closedClass->toVec() : q.nodes[i + 1];
    return p0 * (1 - a) + p1 * a + q.closedClass->toVec() * k;
}

/// Tiled polyline of a closed path over [pLo, pHi] periods with a station
/// bucket index for fast closest-point queries.
struct TiledCurve {
    std::vector<Vec2> pts;
    std::vector<double> station;
    double sMin = 0, sMax = 0, ds = 1;
    std::vector<std::pair<int, int>> buckets;  // segment index ranges
    Frame frame{Vec2i{1, 0}};

    TiledCurve(const LiftedPath& q, const Frame& fr, int pLo, int pHi) : frame(fr) {
        size_t M = q.nodes.size();
        for (int p = pLo; p <= pHi; ++p)
            for (size_t i = 0; i < M; ++i)
                pts.push_back(q.nodes[i] + q.closedClass->toVec() * double(p));
        pts.push_back(q.nodes[0] + q.closedClass->toVec() * double(pHi + 1));
        station.resize(pts.size());
        for (size_t i = 0; i < pts.size(); ++i) station[i] = fr.s(pts[i]);
        sMin = station.front();
        sMax = station.back();
        int nb = int(pts.size());
        ds = (sMax - sMin) / nb;
        buckets.assign(size_t(nb) + 1, {INT_MAX_SEG, -1});
        for (size_t i = 0; i + 1 < pts.size(); ++i) {
            double a = std::min(station[i], station[i + 1]);
            double b = std::max(station[i], station[i + 1]);
            int ka = std::clamp(int((a - sMin) / ds), 0, nb);
            int kb = std::clamp(int((b - sMin) / ds), 0, nb);
            for (int k = ka; k <= kb; ++k) {
                buckets[k].first = std::min(buckets[k].first, int(i));
                buckets[k].second = std::max(buckets[k].second, int(i));
            }
        }
    }
    static constexpr int INT_MAX_SEG = 1 << 30;

    /// closest point; also reports the signed side (positive = left of the
    /// curve's orientation, i.e. toward +what for curves running along +zhat)
    void closest(const Vec2& x, Vec2& cp, double& side, double& dist) const {
        double sx = frame.s(x);
        int nb = int(buckets.size()) - 1;
        int k = std::clamp(int((sx - sMin) / ds), 0, nb);
        double best = std::numeric_limits<double>::infinity();
        Vec2 bp{0, 0};
        size_t bseg = 0;
        for (int radius = 2;; radius *= 2) {
            int lo = std::max(0, k - radius), hi = std::min(nb, k + radius);
            int segLo = INT_MAX_SEG, segHi = -1;
            for (int kk = lo; kk <= hi; ++kk) {
                segLo = std::min(segLo, buckets[kk].first);
                segHi = std::max(segHi, buckets[kk].second);
            }
            if (segHi >= 0) {
                for (int i = segLo; i <= segHi; ++i) {
                    Vec2 d = pts[i + 1] - pts[i];
                    double len2 = norm2(d);
                    double t = len2 > 0 ? std::clamp(dot(x - pts[i], d) / len2, 0.0, 1.0) : 0.0;
                    Vec2 c = pts[i] + d * t;
                    double dd = norm(x - c);
                    if (dd < best) {
                        best = dd;
                        bp = c;
                        bseg = size_t(i);
                    }
                }
                // unscanned segments are at least (radius-1)*ds away in station
                if (best <= (radius - 1) * ds || (lo == 0 && hi == nb)) break;
            } else if (lo == 0 && hi == nb) {
                break;
            }
        }
        cp = bp;
        dist = best;
        Vec2 d = pts[bseg + 1] - pts[bseg];
        side = cross(d, x - bp) >= 0 ? 1.0 : -1.0;
        if (best == 0.0) side = 0.0;
    }
};

/// Projection onto the closed strip between q0 (below) and q1 (above).
struct StripProjector {
    const TiledCurve &lo, &hi;
    bool operator()(Vec2& x) const {
        Vec2 cp;
        double side, dist;
        lo.closest(x, cp, side, dist);
        if (side < 0 && dist > 0) {
            x = cp;
            return true;
        }
        hi.closest(x, cp, side, dist);
        if (side > 0 && dist > 0) {
            x = cp;
            return true;
        }
        return false;
    }
};

}  // namespace

// ---------------------------------------------------------------------------
// asymptotic action

HeteroclinicProblem HeteroclinicProblem::make(MetricPtr m, const PeriodicMinimizer& q0,
                                              const PeriodicMinimizer& q1, Vec2i z, int window,
                                              int sign) {
    HeteroclinicProblem p;
    p.metric = std::move(m);
    p.q0 = q0.path;
    p.q1 = q1.path;
    p.z = z;
    p.theta = q0.length;
    Vec2 zv = z.toVec();
    p.h = zv / p.theta;
    p.h0 = zv * (p.theta / norm2(zv));
    p.window = window;
    p.sign = sign;

    Frame fr(z);
    double w0 = 0, w1 = 0;
    for (const auto& q : p.q0.nodes) w0 += fr.w(q);
    for (const auto& q : p.q1.nodes) w1 += fr.w(q);
    w0 /= double(p.q0.nodes.size());
    w1 /= double(p.q1.nodes.size());
    if (w1 < w0) std::swap(p.q0, p.q1);

    CrossingReport cr = polylineCrossings(p.q0.nodes, p.q1.nodes, false);
    if (cr.clearance < 1e-9 && std::abs(w1 - w0) < 1e-9)
        throw NoGapError("q0 and q1 coincide");
    return p;
}

double actionA(const LiftedPath& c, const Metric& m, const Vec2& h0) {
    return pathLengthF(c, m) - dot(h0, c.displacement());
}

double asymptoticActionJ(const HeteroclinicProblem& p, const LiftedPath& c) {
    const Metric& m = *p.metric;
    int W = p.window;
    const LiftedPath& qa = p.sign >= 0 ? p.q0 : p.q1;
    const LiftedPath& qb = p.sign >= 0 ? p.q1 : p.q0;
    Vec2 start = closedPathAt(qa, -double(W));
    Vec2 end = closedPathAt(qb, double(W));
    double e0 = norm(c.nodes.front() - start);
    double e1 = norm(c.nodes.back() - end);
    if (e0 > 1e-2 || e1 > 1e-2)
        throw BadAsymptoticsError("curve ends too far from the asymptotic periodic points");
    double J = actionA(c, m, p.h0);
    if (e0 > 0) {
        LiftedPath snap;
        snap.nodes = {start, c.nodes.front()};
        J += actionA(snap, m, p.h0);
    }
    if (e1 > 0) {
        LiftedPath snap;
        snap.nodes = {c.nodes.back(), end};
        J += actionA(snap, m, p.h0);
    }
    return J;
}

// ---------------------------------------------------------------------------
// heteroclinic minimizer

namespace {

struct WindowSolve {
    LiftedPath path;
    double omega = 0.0;
    bool converged = false;
};

WindowSolve solveWindow(const HeteroclinicProblem& p, int W, int M, std::optional<Vec2> pin,
                        const LiftedPath* warmStart) {
    const Metric& m = *p.metric;
    Frame fr(p.z);
    const LiftedPath& qa = p.sign >= 0 ? p.q0 : p.q1;
    const LiftedPath& qb = p.sign >= 0 ? p.q1 : p.q0;

    LiftedPath c;
    size_t nNodes = size_t(2 * W) * size_t(M) + 1;
    c.nodes.reserve(nNodes);
    if (warmStart) {
        // extend the previous window by periodic tails on both sides
        int Wold = int((warmStart->nodes.size() - 1) / (2 * size_t(M)));
        for (int k = -W * M; k < -Wold * M; ++k)
            c.nodes.push_back(closedPathAt(qa, double(k) / M));
        for (const auto& q : warmStart->nodes) c.nodes.push_back(q);
        for (int k = Wold * M + 1; k <= W * M; ++k)
            c.nodes.push_back(closedPathAt(qb, double(k) / M));
    } else {
        for (int k = -W * M; k <= W * M; ++k) {
            double phase = double(k) / M;
            Vec2 a = closedPathAt(qa, phase);
            Vec2 b = closedPathAt(qb, phase);
            double mu = mollifierStep(phase + 0.5);
            c.nodes.push_back(a * (1 - mu) + b * mu);
        }
    }

    TiledCurve lo(p.q0, fr, -W - 2, W + 2), hi(p.q1, fr, -W - 2, W + 2);
    StripProjector strip{lo, hi};

    MinimizeOptions opt;
    opt.gradTol = 1e-9;
    opt.maxIter = 20000;
    opt.fixFirst = opt.fixLast = true;
    opt.project = [&](Vec2& x) { return strip(x); };
    if (pin) {
        size_t best = 0;
        double bd = std::numeric_limits<double>::infinity();
        for (size_t i = 0; i < c.nodes.size(); ++i) {
            double d = norm(c.nodes[i] - *pin);
            if (d < bd) { bd = d; best = i; }
        }
        c.nodes[best] = *pin;
        opt.fixedNodes.push_back(int(best));
    }
    MinimizeReport rep = minimizeLength(c, m, opt);

    WindowSolve out;
    out.path = std::move(c);
    out.omega = actionA(out.path, m, p.h0);
    out.converged = rep.gradResidual <= 1e-6 || rep.iterations < opt.maxIter;
    return out;
}

}  // namespace

HeteroclinicResult heteroclinic(const HeteroclinicProblem& p, int nodesPerPeriod,
                                std::optional<Vec2> pinPoint) {
    int W = std::max(2, p.window);
    WindowSolve cur = solveWindow(p, W, nodesPerPeriod, pinPoint, nullptr);
    HeteroclinicResult out;
    double change = std::numeric_limits<double>::infinity();
    const int Wmax = 64;
    while (W + 2 <= Wmax) {
        WindowSolve next = solveWindow(p, W + 2, nodesPerPeriod, pinPoint, &cur.path);
        change = std::abs(next.omega - cur.omega);
        cur = std::move(next);
        W += 2;
        if (change <= 1e-5) break;
    }
    out.path = std::move(cur.path);
    out.omega = cur.omega;
    out.windowChange = change;
    out.windowUsed = W;
    out.converged = change <= 1e-5;
    return out;
}

// ---------------------------------------------------------------------------
// switches and multibump minimizers

namespace {

/// Transverse profile w(s) of a curve on a uniform station grid.
struct StationProfile {
    double sLo = 0, sHi = 0, ds = 0;
    std::vector<double> w;
    double at(double s) const {
        if (s <= sLo) return w.front();
        if (s >= sHi) return w.back();
        double u = (s - sLo) / ds;
        size_t i = size_t(u);
        if (i + 1 >= w.size()) i = w.size() - 2;
        double a = u - double(i);
        return w[i] * (1 - a) + w[i + 1] * a;
    }
    StationProfile shifted(double dsft) const {
        StationProfile out = *this;
        out.sLo += dsft;
        out.sHi += dsft;
        return out;
    }
};

StationProfile profileOf(const std::vector<Vec2>& pts, const Frame& fr, int cells) {
    StationProfile pr;
    pr.sLo = fr.s(pts.front());
    pr.sHi = fr.s(pts.back());
    pr.ds = (pr.sHi - pr.sLo) / cells;
    pr.w.assign(size_t(cells) + 1, std::numeric_limits<double>::quiet_NaN());
    for (size_t i = 0; i + 1 < pts.size(); ++i) {
        double s0 = fr.s(pts[i]), s1 = fr.s(pts[i + 1]);
        double w0 = fr.w(pts[i]), w1 = fr.w(pts[i + 1]);
        if (s1 < s0) { std::swap(s0, s1); std::swap(w0, w1); }
        int k0 = std::clamp(int(std::ceil((s0 - pr.sLo) / pr.ds)), 0, cells);
        int k1 = std::clamp(int(std::floor((s1 - pr.sLo) / pr.ds)), 0, cells);
        for (int k = k0; k <= k1; ++k) {
            double s = pr.sLo + k * pr.ds;
            double t = s1 > s0 ? (s - s0) / (s1 - s0) : 0.0;
            pr.w[k] = w0 * (1 - t) + w1 * t;
        }
    }
    // fill any unset cells from neighbors
    for (size_t k = 1; k < pr.w.size(); ++k)
        if (std::isnan(pr.w[k])) pr.w[k] = pr.w[k - 1];
    for (size_t k = pr.w.size() - 1; k-- > 0;)
        if (std::isnan(pr.w[k])) pr.w[k] = pr.w[k + 1];
    return pr;
}

/// Obstacles in the (station, transverse) frame: lens slabs between offset
/// heteroclinic translates and thin tube rectangles.
struct Obstacles {
    struct Slab {
        double sLo, sHi, ds;
        std::vector<double> wLo, wHi;
        bool inside(double s, double w) const {
            if (s <= sLo || s >= sHi) return false;
            double u = (s - sLo) / ds;
            size_t i = size_t(u);
            if (i + 1 >= wLo.size()) return false;
            double a = u - double(i);
            double lo = wLo[i] * (1 - a) + wLo[i + 1] * a;
            double hi = wHi[i] * (1 - a) + wHi[i + 1] * a;
            return w > lo && w < hi;
        }
        double escape(double s, double w) const {  // signed move in w or s to leave
            double u = (s - sLo) / ds;
            size_t i = size_t(std::clamp(u, 0.0, double(wLo.size() - 2)));
            double a = u - double(i);
            double lo = wLo[i] * (1 - a) + wLo[i + 1] * a;
            double hi = wHi[i] * (1 - a) + wHi[i + 1] * a;
            double dw = (w - lo < hi - w) ? lo - w : hi - w;
            return dw;
        }
    };
    struct Box {
        double sLo, sHi, wLo, wHi;
        bool inside(double s, double w) const {
            return s > sLo && s < sHi && w > wLo && w < wHi;
        }
    };
    std::vector<Slab> slabs;
    std::vector<Box> boxes;
    Frame fr{Vec2i{1, 0}};

    bool projectOut(Vec2& x) const {
        double s = fr.s(x), w = fr.w(x);
        bool moved = false;
        for (const auto& sl : slabs) {
            if (sl.inside(s, w)) {
                w += sl.escape(s, w);
                moved = true;
            }
        }
        for (const auto& b : boxes) {
            if (b.inside(s, w)) {
                double cand[4] = {b.sLo - s, b.sHi - s, b.wLo - w, b.wHi - w};
                int best = 0;
                for (int i = 1; i < 4; ++i)
                    if (std::abs(cand[i]) < std::abs(cand[best])) best = i;
                if (best < 2)
                    s += cand[best];
                else
                    w += cand[best];
                moved = true;
            }
        }
        if (moved) x = fr.point(s, w);
        return moved;
    }

    double distance(const Vec2& x) const {  // crude exterior distance (0 if inside)
        double s = fr.s(x), w = fr.w(x);
        double best = std::numeric_limits<double>::infinity();
        for (const auto& sl : slabs) {
            if (sl.inside(s, w)) return 0.0;
            if (s > sl.sLo && s < sl.sHi) {
                double u = (s - sl.sLo) / sl.ds;
                size_t i = size_t(std::clamp(u, 0.0, double(sl.wLo.size() - 2)));
                double a = u - double(i);
                double lo = sl.wLo[i] * (1 - a) + sl.wLo[i + 1] * a;
                double hi = sl.wHi[i] * (1 - a) + sl.wHi[i + 1] * a;
                if (hi > lo) best = std::min(best, w > hi ? w - hi : (w < lo ? lo - w : 0.0));
            }
        }
        for (const auto& b : boxes) {
            if (b.inside(s, w)) return 0.0;
            double dsd = std::max({b.sLo - s, 0.0, s - b.sHi});
            double dwd = std::max({b.wLo - w, 0.0, w - b.wHi});
            if (b.sLo < b.sHi && b.wLo < b.wHi) best = std::min(best, std::hypot(dsd, dwd));
        }
        return best;
    }
};

struct SwitchGeometry {
    Obstacles obs;       ///< one switch at translate offset zero
    double sCenter = 0;  ///< nominal center station
    double extent = 0;   ///< max |station - center| over the switch
};

/// Builds the switch for one sign from the computed heteroclinic: two lens
/// cells (between consecutive tau-translates, inner delta-offset) and two
/// tubes connecting them to the bounding periodics. The tau-translate between
/// the lenses stays admissible and acts as the test curve.
SwitchGeometry buildSwitch(const HeteroclinicProblem& p, const HeteroclinicResult& het,
                           double delta) {
    Frame fr(p.z);
    SwitchGeometry sg;
    sg.obs.fr = fr;
    StationProfile hw = profileOf(het.path.nodes, fr, 512);
    int kLo = int(std::floor(hw.sLo / fr.P)) - 2;
    int kHi = int(std::ceil(hw.sHi / fr.P)) + 4;
    auto tiled = [&](const LiftedPath& q) {
        std::vector<Vec2> pts;
        for (int k = kLo; k <= kHi; ++k)
            for (const auto& node : q.nodes) pts.push_back(node + p.z.toVec() * double(k));
        return pts;
    };
    StationProfile q0w = profileOf(tiled(p.q0), fr, 1024);
    StationProfile q1w = profileOf(tiled(p.q1), fr, 1024);

    bool ascending = p.sign >= 0;
    auto makeLens = [&](int cellIndex) -> std::optional<Obstacles::Slab> {
        // cell between tau^cellIndex het and tau^{cellIndex+1} het
        StationProfile up = ascending ? hw.shifted(cellIndex * fr.P)
                                      : hw.shifted((cellIndex + 1) * fr.P);
        StationProfile lo = ascending ? hw.shifted((cellIndex + 1) * fr.P)
                                      : hw.shifted(cellIndex * fr.P);
        double sLo = std::min(up.sLo, lo.sLo), sHi = std::max(up.sHi, lo.sHi);
        int cells = 768;
        Obstacles::Slab slab;
        slab.ds = (sHi - sLo) / cells;
        // restrict to the maximal interval where the offset cell is nonempty
        std::vector<double> lw(cells + 1), uw(cells + 1);
        for (int k = 0; k <= cells; ++k) {
            double s = sLo + slab.ds * k;
            lw[k] = lo.at(s) + delta;
            uw[k] = up.at(s) - delta;
        }
        int mid = cells / 2;
        if (uw[mid] - lw[mid] <= 0) return std::nullopt;
        int a = mid, b = mid;
        while (a > 0 && uw[a - 1] - lw[a - 1] > 0) --a;
        while (b < cells && uw[b + 1] - lw[b + 1] > 0) ++b;
        slab.sLo = sLo + slab.ds * a;
        slab.sHi = sLo + slab.ds * b;
        slab.wLo.assign(lw.begin() + a, lw.begin() + b + 1);
        slab.wHi.assign(uw.begin() + a, uw.begin() + b + 1);
        return slab;
    };

    auto lens0 = makeLens(0);
    auto lens1 = makeLens(1);
    if (!lens0 || !lens1)
        throw ConstraintInfeasibleError("switch lens empty at this delta; reduce delta");
    sg.obs.slabs.push_back(*lens0);
    sg.obs.slabs.push_back(*lens1);

    auto lensAnchor = [&](const Obstacles::Slab& sl, double frac, double& s, double& w) {
        s = sl.sLo + (sl.sHi - sl.sLo) * frac;
        double u = (s - sl.sLo) / sl.ds;
        size_t i = size_t(std::clamp(u, 0.0, double(sl.wLo.size() - 2)));
        double a = u - double(i);
        double lo = sl.wLo[i] * (1 - a) + sl.wLo[i + 1] * a;
        double hi = sl.wHi[i] * (1 - a) + sl.wHi[i + 1] * a;
        w = 0.5 * (lo + hi);
    };

    double tubeHalf = std::max(delta * 0.5, 0.01);
    // lens 0: tube from its left part to the far periodic; lens 1: from its
    // right part to the near periodic (mirrored for the descending sign)
    {
        double s, w;
        lensAnchor(*lens0, 0.25, s, w);
        Obstacles::Box box;
        box.sLo = s - tubeHalf;
        box.sHi = s + tubeHalf;
        if (ascending) {
            box.wLo = w;
            box.wHi = q1w.at(s);
        } else {
            box.wLo = q0w.at(s);
            box.wHi = w;
        }
        if (box.wHi > box.wLo) sg.obs.boxes.push_back(box);
    }
    {
        double s, w;
        lensAnchor(*lens1, 0.75, s, w);
        Obstacles::Box box;
        box.sLo = s - tubeHalf;
        box.sHi = s + tubeHalf;
        if (ascending) {
            box.wLo = q0w.at(s);
            box.wHi = w;
        } else {
            box.wLo = w;
            box.wHi = q1w.at(s);
        }
        if (box.wHi > box.wLo) sg.obs.boxes.push_back(box);
    }

    double lo = std::min(lens0->sLo, lens1->sLo);
    double hi = std::max(lens0->sHi, lens1->sHi);
    sg.sCenter = 0.5 * (lo + hi);
    sg.extent = 0.5 * (hi - lo);
    return sg;
}

}  // namespace

MultibumpResult multibump(const HeteroclinicProblem& p, const HeteroclinicResult& hetPlus,
                          const HeteroclinicResult& hetMinus, const SwitchSpec& spec,
                          const std::vector<int>& W, int nodesPerPeriod) {
    if (W.empty()) throw ValidationError("need at least one switch window");
    const Metric& m = *p.metric;
    Frame fr(p.z);

    HeteroclinicProblem pPlus = p, pMinus = p;
    pPlus.sign = +1;
    pMinus.sign = -1;
    SwitchGeometry swPlus = buildSwitch(pPlus, hetPlus, spec.delta);
    SwitchGeometry swMinus = buildSwitch(pMinus, hetMinus, spec.delta);

    int kappa = spec.kappa;
    if (kappa <= 0)
        kappa = int(std::ceil(std::max(swPlus.extent, swMinus.extent) / fr.P)) + 1;
    for (size_t i = 0; i + 1 < W.size(); ++i)
        if (W[i + 1] < W[i] + 2 * kappa + spec.nu)
            throw ValidationError("window sequence violates the 2*kappa+nu spacing");

    // assemble the translated obstacle set
    Obstacles obs;
    obs.fr = fr;
    auto addSwitch = [&](const SwitchGeometry& sg, int wi) {
        double shift = wi * fr.P;
        for (auto sl : sg.obs.slabs) {
            sl.sLo += shift;
            sl.sHi += shift;
            obs.slabs.push_back(std::move(sl));
        }
        for (auto b : sg.obs.boxes) {
            b.sLo += shift;
            b.sHi += shift;
            obs.boxes.push_back(b);
        }
    };
    for (size_t i = 0; i < W.size(); ++i)
        addSwitch(i % 2 == 0 ? swPlus : swMinus, W[i]);

    int tail = std::max(4, p.window);
    int pLo = W.front() - kappa - tail;
    int pHi = W.back() + kappa + tail;
    int M = nodesPerPeriod;

    // seed: blend level toggling at each switch
    LiftedPath c;
    bool endUp = (W.size() % 2 == 1);  // odd number of switches lands on q1
    for (int k = pLo * M; k <= pHi * M; ++k) {
        double phase = double(k) / M;
        double mu = 0.0;
        for (size_t i = 0; i < W.size(); ++i) {
            double t = mollifierStep(phase - double(W[i]) - 0.5);
            mu += (i % 2 == 0) ? t : -t;
        }
        mu = std::clamp(mu, 0.0, 1.0);
        Vec2 a = closedPathAt(p.q0, phase);
        Vec2 b = closedPathAt(p.q1, phase);
        c.nodes.push_back(a * (1 - mu) + b * mu);
    }

    TiledCurve lo(p.q0, fr, pLo - 2, pHi + 2), hi(p.q1, fr, pLo - 2, pHi + 2);
    StripProjector strip{lo, hi};

    MinimizeOptions opt;
    opt.gradTol = 1e-9;
    opt.maxIter = 30000;
    opt.fixFirst = opt.fixLast = true;
    opt.project = [&](Vec2& x) {
        bool moved = strip(x);
        if (obs.projectOut(x)) moved = true;
        return moved;
    };
    MinimizeReport rep = minimizeLength(c, m, opt);

    MultibumpResult out;
    out.kappaUsed = kappa;
    out.omega = actionA(c, m, p.h0);
    out.converged = rep.gradResidual <= 1e-6 || rep.iterations < opt.maxIter;
    double clear = std::numeric_limits<double>::infinity();
    for (const auto& q : c.nodes) clear = std::min(clear, obs.distance(q));
    out.obstacleClearance = std::isfinite(clear) ? clear : 0.0;
    out.touchesObstacle = rep.projectionsActive > 0 || out.obstacleClearance < 1e-9;

    // arc length between the sigma0 crossings at stations (W.front()-kappa)P
    // and (W.back()+kappa)P
    double sA = (W.front() - kappa) * fr.P;
    double sB = (W.back() + kappa) * fr.P;
    std::vector<double> cum(c.nodes.size(), 0.0);
    for (size_t i = 0; i + 1 < c.nodes.size(); ++i)
        cum[i + 1] = cum[i] + segmentLengthF(m, c.nodes[i], c.nodes[i + 1] - c.nodes[i]);
    double tA = -1, tB = -1;
    for (size_t i = 0; i + 1 < c.nodes.size(); ++i) {
        double s0 = fr.s(c.nodes[i]), s1 = fr.s(c.nodes[i + 1]);
        if (tA < 0 && s0 <= sA && s1 > sA)
            tA = cum[i] + (cum[i + 1] - cum[i]) * (sA - s0) / (s1 - s0);
        if (s0 <= sB && s1 > sB)
            tB = cum[i] + (cum[i + 1] - cum[i]) * (sB - s0) / (s1 - s0);
    }
    out.traversalLength = (tA >= 0 && tB >= 0) ? tB - tA : 0.0;
    out.path = std::move(c);
    return out;
}

}  // namespace fin
