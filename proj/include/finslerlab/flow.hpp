#pragma once

#include <vector>

#include "finslerlab/metric.hpp"

namespace fin {

/// A sampled orbit of the geodesic flow, lifted to the universal cover.
struct OrbitSample {
    std::vector<double> times;
    std::vector<TangentVec> states;    ///< lifted base points and velocities
    std::vector<double> energyTrace;   ///< E = F^2/2 along the orbit
    std::vector<Vec2> momenta;         ///< covectors (cylinder charts only)
    bool cotangent = false;            ///< integrated in the cotangent chart

    size_t size() const { return times.size(); }
    double energyDrift() const;        ///< max |E(t)-E(0)| / E(0)
};

/// Fixed-step RK4 integration of the geodesic flow for time T.
/// Torus charts integrate the Euler-Lagrange system of F^2/2 in (x,v);
/// cylinder charts integrate the Hamiltonian flow of the degree-one dual
/// norm F* in (x,eta), which traces unit-speed geodesics on {F*=1}.
/// Snapshots are stored every `stride` steps (default every step).
OrbitSample integrate(const Metric& m, const TangentVec& w0, double T, double dt,
                      int stride = 1);

/// Continuation: integrate further from the last state of an orbit.
OrbitSample integrateFrom(const Metric& m, const OrbitSample& o, double T, double dt,
                          int stride = 1);

/// Resample an orbit to F-arc-length parametrisation (F(c') = 1 at nodes).
OrbitSample arcLengthReparam(const OrbitSample& o, const Metric& m);

/// F-length of the polyline through the orbit's base points.
double orbitLengthF(const OrbitSample& o, const Metric& m);

}  // namespace fin
