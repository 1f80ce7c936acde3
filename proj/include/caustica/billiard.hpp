#pragma once

#include <iosfwd>
#include <utility>
#include <vector>

#include "caustica/expansions.hpp"
#include "caustica/rotation.hpp"
#include "caustica/trig_poly.hpp"

namespace caustica {

// Oriented line cos(phi)x + sin(phi)y = lambda: phi is the direction of the
// right normal, lambda the signed distance to the origin. The line meets the
// table interior iff -h(phi+pi) < lambda < h(phi).
struct LineCoords {
    double phi;
    double lambda;
};

// Truncated support function h(psi;eps) = 1 + sum_{k<=K} eps^k h_k(psi) of a
// deformed unit circle, with pointwise derivatives. Construction verifies
// strict convexity (h > 0 and h + h'' > 0) on a 1024-point grid.
class SupportEvaluator {
public:
    // h_orders is order-indexed (slot 0 ignored); truncation < 0 keeps all.
    SupportEvaluator(const std::vector<TrigPoly>& h_orders, double epsilon,
                     int truncation = -1);

    struct Jet {
        double h;
        double dh;
        double ddh;
    };
    Jet eval(double psi) const;
    double epsilon() const { return epsilon_; }
    int truncation_order() const { return truncation_; }

private:
    TrigPoly h_, dh_, ddh_;
    double epsilon_;
    int truncation_;
};

// One reflection in line coordinates. Solves the implicit equation
//   lambda = h(psi) cos(theta) - h'(psi) sin(theta),
//   psi = (phi1 + phi)/2, theta = (phi1 - phi)/2
// for phi1 in (phi, phi + 2*pi) by safeguarded Newton (the left side is
// strictly decreasing in phi1 by the twist condition), then returns
//   lambda1 = h(psi) cos(theta) + h'(psi) sin(theta).
// dphi_guess seeds the Newton iterate with phi1 = phi + dphi_guess; pass the
// previous chord angle 2*theta when iterating an orbit, or omega when the
// line is near a resonant caustic.
LineCoords billiard_step(const LineCoords& line, const SupportEvaluator& ev,
                         double dphi_guess = 3.141592653589793);

// Convenience orbit iteration threading the previous chord angle as a guess.
std::vector<LineCoords> iterate_billiard(LineCoords start, const SupportEvaluator& ev,
                                         int steps, double first_dphi_guess);

// Evaluates the truncated side/normal/incidence-reflection functions
//   phi(t;eps) = t - omega/2 + sum_{k<=m} eps^k phi_k(t)   (etc.)
// at a fixed epsilon. order < 0 means all committed orders.
class OrbitExpansion {
public:
    OrbitExpansion(const ExpansionState& st, double epsilon, int order = -1);

    const RotationNumber& rot() const { return rot_; }
    int order() const { return order_; }
    double phi(double t) const { return t - 0.5 * rot_.omega() + dphi_.eval(t); }
    double psi(double t) const { return t + dpsi_.eval(t); }
    double theta(double t) const { return 0.5 * rot_.omega() + dtheta_.eval(t); }

private:
    RotationNumber rot_;
    int order_;
    TrigPoly dphi_, dpsi_, dtheta_;
};

std::vector<double> uniform_grid(int n);

struct ResidualSamples {
    std::vector<double> values;
    double max_abs = 0.0;
};

// Pointwise residual of the difference equation,
//   sum{h'(psi) sin(theta)} - diff{h(psi) cos(theta)},
// evaluated with the order-m functions against the evaluator's support
// function. O(eps^{m+1}) when the caustic persists to order m.
ResidualSamples residual_function(const ExpansionState& st, const SupportEvaluator& ev,
                                  const std::vector<double>& t_grid, int order = -1);

struct InvarianceSamples {
    std::vector<double> horizontal; // phi gap of f(c(t)) vs c(t+omega)
    std::vector<double> vertical;   // lambda gap
    double max_horizontal = 0.0;
    double max_vertical = 0.0;
};

// Builds the approximate invariant curve c(t) = (phi(t), lambda(t)) with
// lambda = h(psi)cos(theta) - h'(psi)sin(theta), pushes it through
// billiard_step and compares against c(t+omega). The horizontal gap vanishes
// up to solver tolerance; the vertical gap equals the residual_function
// samples at the same t.
InvarianceSamples invariance_residual(const ExpansionState& st, const SupportEvaluator& ev,
                                      const std::vector<double>& t_grid, int order = -1);

struct ActionDiagnostics {
    double action_mean = 0.0;      // average over the grid of 2q*mu{h(psi)sin(theta)}
    double action_deviation = 0.0; // max |A(t) - action_mean|
    double mu_dh_sin_max = 0.0;    // max |mu{h'(psi)sin(theta)}|
    double mu_theta_deviation = 0.0; // max |mu{theta} - pi p/q|
};

ActionDiagnostics action_and_identities(const ExpansionState& st, const SupportEvaluator& ev,
                                        const std::vector<double>& t_grid, int order = -1);

struct CausticReconstruction {
    std::vector<std::pair<double, double>> samples; // (phi, g)
    double min_g = 0.0;
    bool monotone = true; // phi strictly increasing over the grid
};

// Samples the support function g(phi(t)) = lambda(t) of the approximate
// caustic. Non-monotone phi means epsilon is beyond the validity range;
// reported, not thrown.
CausticReconstruction reconstruct_caustic(const ExpansionState& st,
                                          const SupportEvaluator& ev,
                                          const std::vector<double>& t_grid,
                                          int order = -1);

struct ScalingFit {
    double slope = 0.0;
    double r2 = 0.0;
    int points_used = 0;
    bool at_noise_floor = false; // residuals too close to machine precision to fit
};

// Least-squares slope of log(residual) against log(epsilon). Requires at
// least 3 pairs spanning two decades of epsilon; points below 100x machine
// epsilon are discarded, and if fewer than 3 usable points (or less than one
// decade of usable span) remain the data is flagged as at the noise floor.
ScalingFit scaling_fit(const std::vector<std::pair<double, double>>& pairs);

struct SweepPoint {
    double epsilon;
    double max_residual;
    double slope_window; // local slope against the previous point (0 for the first)
};

// "t,residual" and "epsilon,max_residual,slope_window" CSV emission
void write_residual_csv(std::ostream& os, const std::vector<double>& t_grid,
                        const std::vector<double>& residual);
void write_sweep_csv(std::ostream& os, const std::vector<SweepPoint>& points);

} // namespace caustica
