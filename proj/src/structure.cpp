#include "finslerlab/structure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "finslerlab/mather.hpp"
#include "finslerlab/quadrature.hpp"

namespace fin {

namespace {

struct Frame {
    Vec2 zhat, what;
    double P, cellH;
    explicit Frame(Vec2i z) {
        Vec2 zv = z.toVec();
        P = norm(zv);
        zhat = zv / P;
        what = perp(zhat);
        cellH = 1.0 / P;  // transverse spacing of lattice translates
    }
};

/// lattice vector with det[z, k0] = 1, i.e. transverse offset exactly 1/|z|
Vec2i transverseUnit(Vec2i z) {
    int p = z.x, q = z.y;
    Vec2i w{0, 0};
    for (int a = -std::abs(q) - 1; a <= std::abs(q) + 1; ++a) {
        long num = 1 + long(q) * a;
        if (p != 0 && num % p == 0) {
            Vec2i cand{a, int(num / p)};
            if (w == Vec2i{0, 0} || maxAbs(cand) < maxAbs(w)) w = cand;
        }
    }
    if (w == Vec2i{0, 0}) w = {-z.y, 0};
    return w;
}

double meanTransverse(const LiftedPath& p, const Frame& fr) {
    double s = 0;
    for (const auto& q : p.nodes) s += dot(fr.what, q);
    return s / double(p.nodes.size());
}

/// Hausdorff-type trace distance between closed class-z paths, modulo the
/// tau-translation (paths are compared against +-1 period tiles).
double traceDistance(const LiftedPath& a, const LiftedPath& b, Vec2i z) {
    std::vector<Vec2> tiled;
    for (int k = -1; k <= 1; ++k)
        for (const auto& q : b.nodes) tiled.push_back(q + z.toVec() * double(k));
    tiled.push_back(b.nodes.front() + z.toVec() * 2.0);
    auto oneSided = [&](const std::vector<Vec2>& from) {
        double worst = 0;
        for (const auto& q : from) {
            double best = std::numeric_limits<double>::infinity();
            for (size_t i = 0; i + 1 < tiled.size(); ++i) {
                Vec2 d = tiled[i + 1] - tiled[i];
                double len2 = norm2(d);
                double t = len2 > 0 ? std::clamp(dot(q - tiled[i], d) / len2, 0.0, 1.0) : 0.0;
                best = std::min(best, norm(q - (tiled[i] + d * t)));
            }
            worst = std::max(worst, best);
        }
        return worst;
    };
    return oneSided(a.nodes);
}

/// coverage of the torus by the 1/128-neighborhood of a set of paths
double rasterCoverage(const std::vector<const LiftedPath*>& paths, double radius) {
    const int G = 256;
    std::vector<char> hit(size_t(G) * G, 0);
    auto mark = [&](Vec2 p) {
        double fx = p.x - std::floor(p.x);
        double fy = p.y - std::floor(p.y);
        int i = int(fx * G) % G, j = int(fy * G) % G;
        hit[size_t(j) * G + i] = 1;
    };
    for (const auto* p : paths) {
        for (size_t i = 0; i < p->segments(); ++i) {
            Vec2 a = p->segStart(i), b = p->segEnd(i);
            int steps = std::max(1, int(norm(b - a) * G * 2));
            for (int k = 0; k <= steps; ++k) mark(a + (b - a) * (double(k) / steps));
        }
    }
    int r = int(std::ceil(radius * G));
    std::vector<char> dil(size_t(G) * G, 0);
    std::vector<std::pair<int, int>> kernel;
    for (int dy = -r; dy <= r; ++dy)
        for (int dx = -r; dx <= r; ++dx)
            if (dx * dx + dy * dy <= r * r) kernel.push_back({dx, dy});
    for (int j = 0; j < G; ++j)
        for (int i = 0; i < G; ++i) {
            if (!hit[size_t(j) * G + i]) continue;
            for (auto [dx, dy] : kernel) {
                int ii = (i + dx + G) % G, jj = (j + dy + G) % G;
                dil[size_t(jj) * G + ii] = 1;
            }
        }
    long covered = std::accumulate(dil.begin(), dil.end(), 0L);
    return double(covered) / double(G * G);
}

}  // namespace

GapReport gapScan(MetricPtr m, Vec2i z, const GapScanOptions& opt) {
    if (!isPrimitive(z)) throw ValidationError("gap scan requires a primitive class");
    if (opt.resolution < 16) throw ValidationError("resolution too small");
    Frame fr(z);
    ActionGraph graph(m, opt.graphN, opt.graphS);
    int nPath = std::max(48, opt.nodesPerUnit * (std::abs(z.x) + std::abs(z.y)));

    GapReport rep;
    rep.z = z;

    // refine minimizers from a fan of straight seeds at sampled heights
    std::vector<LiftedPath> results;
    std::vector<double> lengths;
    for (int j = 0; j < opt.resolution; ++j) {
        double w = fr.cellH * double(j) / opt.resolution;
        LiftedPath seed;
        seed.closedClass = z;
        for (int k = 0; k < nPath; ++k)
            seed.nodes.push_back(fr.what * w + z.toVec() * (double(k) / nPath));
        PeriodicMinimizer pm = refineClosedPath(*m, seed, nPath);
        if (!pm.converged && pm.residual > 1e-5) continue;  // stalled on a ridge
        results.push_back(pm.path);
        lengths.push_back(pm.length);
    }
    if (results.empty()) throw NoConvergenceError("no periodic minimizer converged");

    double minLen = *std::min_element(lengths.begin(), lengths.end());
    rep.minLength = minLen;

    // keep global minimizers, normalized into the transverse fundamental cell
    Vec2i k0 = transverseUnit(z);
    std::vector<LiftedPath> family;
    std::vector<double> famLen, famW;
    for (size_t i = 0; i < results.size(); ++i) {
        if (lengths[i] > minLen * (1.0 + opt.lengthTol)) continue;
        double w = meanTransverse(results[i], fr);
        double shift = std::floor(w / fr.cellH);
        LiftedPath p = translate(results[i], k0.toVec() * (-shift));
        family.push_back(std::move(p));
        famLen.push_back(lengths[i]);
        famW.push_back(w - shift * fr.cellH);
    }

    // cluster by trace distance
    std::vector<int> cluster(family.size(), -1);
    int nc = 0;
    for (size_t i = 0; i < family.size(); ++i) {
        if (cluster[i] >= 0) continue;
        cluster[i] = nc;
        for (size_t j = i + 1; j < family.size(); ++j) {
            if (cluster[j] >= 0) continue;
            if (traceDistance(family[i], family[j], z) < opt.clusterTol) cluster[j] = int(nc);
        }
        ++nc;
    }
    std::vector<LiftedPath> reps(nc);
    std::vector<double> repLen(nc, 1e300), repW(nc);
    for (size_t i = 0; i < family.size(); ++i) {
        int c = cluster[i];
        if (famLen[i] < repLen[c]) {
            repLen[c] = famLen[i];
            reps[c] = family[i];
            repW[c] = famW[i];
        }
    }
    // order by transverse position
    std::vector<int> order(nc);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return repW[a] < repW[b]; });
    for (int c : order) {
        rep.family.push_back(reps[c]);
        rep.familyLength.push_back(repLen[c]);
    }

    std::vector<const LiftedPath*> famPtr;
    for (const auto& p : rep.family) famPtr.push_back(&p);
    rep.coverage = rasterCoverage(famPtr, opt.clusterTol);

    double dev = 0.0;
    for (const auto& p : rep.family) {
        double lo = 1e300, hi = -1e300;
        for (const auto& q : p.nodes) {
            double w = dot(fr.what, q);
            lo = std::min(lo, w);
            hi = std::max(hi, w);
        }
        dev = std::max(dev, 0.5 * (hi - lo));
    }
    rep.boundedDeviation = dev;

    if (rep.coverage >= 1.0 - 1.0 / 64.0) return rep;  // foliated: no gaps

    // gaps between transversally consecutive family members (cyclic via k0)
    int nf = int(rep.family.size());
    for (int i = 0; i < nf; ++i) {
        const LiftedPath& q0 = rep.family[i];
        LiftedPath q1 = (i + 1 < nf) ? rep.family[i + 1] : translate(rep.family[0], k0.toVec());
        double sep = traceDistance(q0, q1, z);
        if (sep < 2 * opt.clusterTol) continue;
        GapStrip gap;
        gap.lower = i;
        gap.upper = (i + 1) % nf;
        gap.width = sep;
        if (opt.runHeteroclinics) {
            PeriodicMinimizer pm0{q0, rep.familyLength[size_t(i)], 0, true, 0};
            PeriodicMinimizer pm1{q1, rep.familyLength[size_t((i + 1) % nf)], 0, true, 0};
            for (int sign : {+1, -1}) {
                try {
                    HeteroclinicProblem hp =
                        HeteroclinicProblem::make(m, pm0, pm1, z, opt.hetWindow, sign);
                    HeteroclinicResult hr = heteroclinic(hp, opt.nodesPerUnit);
                    // fan probes: pin interior points spread across the strip at
                    // the mid-window station and accept those reaching omega
                    int covered = 0, probes = 0;
                    if (opt.fanProbes > 0) {
                        Frame f2(z);
                        double w0 = meanTransverse(q0, f2), w1 = meanTransverse(q1, f2);
                        double tolJ = std::max(1e-5, 5 * hr.windowChange);
                        for (int t = 1; t <= opt.fanProbes; ++t) {
                            double w = w0 + (w1 - w0) * double(t) / (opt.fanProbes + 1);
                            Vec2 pin = f2.zhat * (0.31 * f2.P) + f2.what * w;
                            try {
                                HeteroclinicProblem hp2 = hp;
                                hp2.window = hr.windowUsed;
                                HeteroclinicResult pr = heteroclinic(hp2, opt.nodesPerUnit, pin);
                                ++probes;
                                if (pr.omega <= hr.omega + tolJ) ++covered;
                            } catch (const Error&) {
                                ++probes;
                            }
                        }
                    }
                    double cov = probes > 0 ? double(covered) / probes : 1.0;
                    if (sign > 0) {
                        gap.hetPlusFound = true;
                        gap.omegaPlus = hr.omega;
                        gap.omegaPlusWindowChange = hr.windowChange;
                        gap.hetCoveragePlus = cov;
                        gap.hetPlus = hr.path;
                    } else {
                        gap.hetMinusFound = true;
                        gap.omegaMinus = hr.omega;
                        gap.omegaMinusWindowChange = hr.windowChange;
                        gap.hetCoverageMinus = cov;
                        gap.hetMinus = hr.path;
                    }
                } catch (const Error&) {
                    // per-gap failures are recorded, not fatal
                }
            }
        }
        rep.gaps.push_back(std::move(gap));
    }
    for (const auto& gap : rep.gaps)
        if (gap.hetPlusFound && gap.hetMinusFound && gap.hetCoveragePlus < 1.0 &&
            gap.hetCoverageMinus < 1.0)
            rep.gapCondition = true;
    return rep;
}

// ---------------------------------------------------------------------------

namespace {

struct TraceSamples {
    // points mod 1 with F-unit tangents, bucketed on a coarse grid
    int B = 64;
    std::vector<std::vector<std::pair<Vec2, Vec2>>> buckets;
    TraceSamples() : buckets(size_t(B) * B) {}
    void add(Vec2 p, Vec2 tangent) {
        double fx = p.x - std::floor(p.x), fy = p.y - std::floor(p.y);
        int i = std::min(B - 1, int(fx * B)), j = std::min(B - 1, int(fy * B));
        buckets[size_t(j) * B + i].push_back({{fx, fy}, tangent});
    }
    /// nearest sample within maxDist (torus metric on the base)
    bool nearest(Vec2 x, double maxDist, Vec2& tangent, double& dist,
                 std::vector<Vec2>* nearby = nullptr, double nearRadius = 0.0) const {
        double fx = x.x - std::floor(x.x), fy = x.y - std::floor(x.y);
        int ci = int(fx * B), cj = int(fy * B);
        int r = int(std::ceil(maxDist * B)) + 1;
        dist = std::numeric_limits<double>::infinity();
        bool found = false;
        for (int dj = -r; dj <= r; ++dj)
            for (int di = -r; di <= r; ++di) {
                int i = (ci + di + B * 4) % B, j = (cj + dj + B * 4) % B;
                for (const auto& [p, t] : buckets[size_t(j) * B + i]) {
                    double dx = std::remainder(p.x - fx, 1.0);
                    double dy = std::remainder(p.y - fy, 1.0);
                    double d = std::hypot(dx, dy);
                    if (d < dist) {
                        dist = d;
                        tangent = t;
                        found = d <= maxDist;
                    }
                    if (nearby && d <= nearRadius) nearby->push_back(t);
                }
            }
        return found;
    }
};

TraceSamples sampleDirection(MetricPtr m, Vec2i z, const GapScanOptions& scanOpt, double step) {
    GapReport rep = gapScan(m, z, scanOpt);
    TraceSamples ts;
    auto addPath = [&](const LiftedPath& p, bool closed) {
        size_t nseg = closed ? p.nodes.size() : p.nodes.size() - 1;
        for (size_t i = 0; i < nseg; ++i) {
            Vec2 a = p.segStart(i), b = p.segEnd(i);
            Vec2 d = b - a;
            int steps = std::max(1, int(norm(d) / step));
            for (int k = 0; k < steps; ++k) {
                Vec2 pt = a + d * ((k + 0.5) / steps);
                double f = m->F(pt, d);
                ts.add(pt, d / f);
            }
        }
    };
    for (const auto& p : rep.family) addPath(p, true);
    for (const auto& gap : rep.gaps) {
        if (gap.hetPlusFound)
            for (int k = -1; k <= 1; ++k) addPath(translate(gap.hetPlus, z.toVec() * double(k)), false);
        if (gap.hetMinusFound)
            for (int k = -1; k <= 1; ++k) addPath(translate(gap.hetMinus, z.toVec() * double(k)), false);
    }
    return ts;
}

}  // namespace

TorusGraphSample assembleTorus(MetricPtr m, const Vec2& h, const AssembleOptions& opt) {
    if (h.x == 0 && h.y == 0) throw ValidationError("need a nonzero direction");
    // Farey bracket at denominator <= Q
    Vec2 hhat = normalized(h);
    int sx = hhat.x >= 0 ? 1 : -1, sy = hhat.y >= 0 ? 1 : -1;
    Vec2 habs{std::abs(hhat.x), std::abs(hhat.y)};
    Vec2i lo{1, 0}, hi{0, 1};
    while (true) {
        Vec2i med{lo.x + hi.x, lo.y + hi.y};
        if (maxAbs(med) > opt.Q) break;
        if (habs.x * med.y - habs.y * med.x > 0)
            hi = med;
        else
            lo = med;
    }
    Vec2i za{sx * lo.x, sy * lo.y}, zb{sx * hi.x, sy * hi.y};
    for (Vec2i zz : {za, zb}) {
        double par = std::abs(cross(zz.toVec(), hhat));
        if (par < 1e-12 && maxAbs(zz) <= opt.Q / 4)
            throw ValidationError("direction is parallel to a low class; not irrational enough");
    }

    double step = 1.0 / (4.0 * opt.grid);
    TraceSamples ta = sampleDirection(m, za, opt.scan, step);
    TraceSamples tb = sampleDirection(m, zb, opt.scan, step);
    double da = std::abs(std::remainder(std::atan2(hhat.y, hhat.x) -
                                        std::atan2(double(za.y), double(za.x)), 2 * M_PI));
    double db = std::abs(std::remainder(std::atan2(hhat.y, hhat.x) -
                                        std::atan2(double(zb.y), double(zb.x)), 2 * M_PI));
    double wa = db / (da + db), wb = da / (da + db);  // nearest approximant dominates

    TorusGraphSample out;
    out.h = h;
    out.grid = opt.grid;
    out.field.assign(size_t(opt.grid) * opt.grid, Vec2{0, 0});
    out.defined.assign(size_t(opt.grid) * opt.grid, 0);
    double maxDist = 0.25;
    for (int j = 0; j < opt.grid; ++j)
        for (int i = 0; i < opt.grid; ++i) {
            Vec2 x{(i + 0.5) / opt.grid, (j + 0.5) / opt.grid};
            Vec2 va, vb;
            double dista, distb;
            std::vector<Vec2> nearA, nearB;
            bool okA = ta.nearest(x, maxDist, va, dista, &nearA, 0.02);
            bool okB = tb.nearest(x, maxDist, vb, distb, &nearB, 0.02);
            if (!okA || !okB) continue;
            auto spread = [&](const std::vector<Vec2>& v) {
                double worst = 0;
                for (size_t a = 0; a < v.size(); ++a)
                    for (size_t b = a + 1; b < v.size(); ++b) {
                        double ang = std::atan2(std::abs(cross(v[a], v[b])), dot(v[a], v[b]));
                        worst = std::max(worst, ang);
                    }
                return worst;
            };
            if (spread(nearA) > 0.05 || spread(nearB) > 0.05) {
                ++out.multiValued;
                continue;
            }
            if (dot(va, hhat) < 0) va = -va;
            if (dot(vb, hhat) < 0) vb = -vb;
            Vec2 blend = va * wa + vb * wb;
            double f = m->F(x, blend);
            out.field[size_t(j) * opt.grid + i] = blend / f;
            out.defined[size_t(j) * opt.grid + i] = 1;
        }

    double lip = 0.0;
    for (int j = 0; j < opt.grid; ++j)
        for (int i = 0; i < opt.grid; ++i) {
            if (!out.defined[size_t(j) * opt.grid + i]) continue;
            int ii = (i + 1) % opt.grid, jj = (j + 1) % opt.grid;
            double hstep = 1.0 / opt.grid;
            if (out.defined[size_t(j) * opt.grid + ii])
                lip = std::max(lip, norm(out.field[size_t(j) * opt.grid + ii] -
                                         out.field[size_t(j) * opt.grid + i]) / hstep);
            if (out.defined[size_t(jj) * opt.grid + i])
                lip = std::max(lip, norm(out.field[size_t(jj) * opt.grid + i] -
                                         out.field[size_t(j) * opt.grid + i]) / hstep);
        }
    out.lipschitz = lip;
    return out;
}

GraphPropertyReport graphPropertyTest(const std::vector<const LiftedPath*>& paths,
                                      double trimFraction) {
    if (paths.size() < 2) throw ValidationError("need at least two paths");
    GraphPropertyReport rep;
    rep.minClearance = std::numeric_limits<double>::infinity();
    auto trimmed = [&](const LiftedPath& p) {
        size_t n = p.nodes.size();
        size_t cut = size_t(double(n) * trimFraction);
        std::vector<Vec2> out(p.nodes.begin() + cut, p.nodes.end() - std::min(n - cut - 1, cut));
        if (p.closedClass && trimFraction == 0.0) {
            out = p.nodes;
            out.push_back(p.nodes.front() + p.closedClass->toVec());
        }
        return out;
    };
    for (size_t a = 0; a < paths.size(); ++a)
        for (size_t b = a + 1; b < paths.size(); ++b) {
            CrossingReport cr = polylineCrossings(trimmed(*paths[a]), trimmed(*paths[b]));
            if (cr.crossings > 0) ++rep.crossingPairs;
            rep.minClearance = std::min(rep.minClearance, cr.clearance);
        }
    if (!std::isfinite(rep.minClearance)) rep.minClearance = 0.0;
    return rep;
}

}  // namespace fin
