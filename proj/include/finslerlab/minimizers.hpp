#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "finslerlab/action_graph.hpp"
#include "finslerlab/flow.hpp"
#include "finslerlab/path.hpp"

namespace fin {

// ---------------------------------------------------------------------------
// periodic minimizers

struct PeriodicMinimizer {
    LiftedPath path;       ///< closed, class z, F-arc-length node spacing
    double length = 0.0;
    double residual = 0.0;
    bool converged = false;
    int iterations = 0;
};

/// Minimal closed geodesic in homotopy class z: seeded from the action graph's
/// cached stable-norm path, then refined by nonlinear conjugate gradient.
PeriodicMinimizer periodicMinimizer(const Metric& m, Vec2i z, int nPath, const ActionGraph& seed);

/// Same refinement from an explicit seed polyline.
PeriodicMinimizer refineClosedPath(const Metric& m, LiftedPath seed, int nPath);

// ---------------------------------------------------------------------------
// rotation vectors

struct RotationData {
    Vec2 rho;        ///< least-squares drift per unit time over the trailing 80%
    Vec2 deltaPlus;  ///< normalized displacement over the same window
    double residual = 0.0;
};

RotationData rotationVector(const std::vector<double>& times, const std::vector<Vec2>& pos);
/// Path overload: times are the cumulative F-arc-length.
RotationData rotationVector(const LiftedPath& p, const Metric& m);
RotationData rotationVector(const OrbitSample& o);

// ---------------------------------------------------------------------------
// heteroclinics and the asymptotic action

/// A gap between two neighboring periodic minimizers q0 < q1 of class z.
/// All curves are lifted; q1 sits on the positive side of q0 with respect to
/// the transverse direction perp(z).
struct HeteroclinicProblem {
    MetricPtr metric;
    LiftedPath q0, q1;  ///< closed representatives, one period each
    Vec2i z;
    double theta = 0.0;  ///< common prime period (F-length of q0)
    Vec2 h, h0;          ///< rotation vector z/theta and h/|h|^2
    int window = 8;      ///< periods pinned on each side
    int sign = +1;

    static HeteroclinicProblem make(MetricPtr m, const PeriodicMinimizer& q0,
                                    const PeriodicMinimizer& q1, Vec2i z, int window = 8,
                                    int sign = +1);
};

/// Action A_{L_F - h0 + 1/2} of a polyline at optimal parametrisation:
/// length_F minus the pairing of h0 with the displacement.
double actionA(const LiftedPath& c, const Metric& m, const Vec2& h0);

/// Finite-window asymptotic action of a curve whose ends approach
/// q0(-n theta) and q1(+n theta); straight snap segments to the exact periodic
/// points contribute the |A| <= b*eps endpoint correction.
double asymptoticActionJ(const HeteroclinicProblem& p, const LiftedPath& c);

struct HeteroclinicResult {
    LiftedPath path;
    double omega = 0.0;       ///< J at the minimizer
    double windowChange = 0.0;///< |omega(W) - omega(W-2)| at the accepted window
    int windowUsed = 0;
    bool converged = false;
};

/// Minimizes J over curves in the closed strip between q0 and q1 with pinned
/// asymptotic ends; the window is enlarged until omega moves by < 1e-5.
/// An optional interior pinning point constrains the curve to pass through it.
HeteroclinicResult heteroclinic(const HeteroclinicProblem& p, int nodesPerPeriod = 24,
                                std::optional<Vec2> pinPoint = std::nullopt);

// ---------------------------------------------------------------------------
// multibump minimizers

struct SwitchSpec {
    double delta = 0.02;
    int kappa = 0;  ///< 0: derive from the switch geometry
    int nu = 8;
};

struct MultibumpResult {
    LiftedPath path;
    double omega = 0.0;
    bool touchesObstacle = false;
    double obstacleClearance = 0.0;
    double traversalLength = 0.0;  ///< arc length between the sigma0 crossings
                                   ///< at tau^{w_j - kappa} and tau^{w_k + kappa}
    int kappaUsed = 0;
    bool converged = false;
};

/// Constrained minimizer oscillating between q0 and q1 through the prescribed
/// switch translates tau^{w_i} S^{eps_i}; obstacle constraints are enforced by
/// projection after each descent step.
MultibumpResult multibump(const HeteroclinicProblem& p, const HeteroclinicResult& hetPlus,
                          const HeteroclinicResult& hetMinus, const SwitchSpec& spec,
                          const std::vector<int>& W, int nodesPerPeriod = 24);

}  // namespace fin
