#include "caustica/billiard.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

namespace caustica {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr int kConvexityGrid = 1024;
constexpr int kNewtonMaxIter = 64;
constexpr double kNewtonTol = 1e-13;
} // namespace

SupportEvaluator::SupportEvaluator(const std::vector<TrigPoly>& h_orders, double epsilon,
                                   int truncation)
    : epsilon_(epsilon) {
    const int kmax = static_cast<int>(h_orders.size()) - 1;
    truncation_ = truncation < 0 ? kmax : std::min(truncation, kmax);
    TrigPoly h(1.0);
    double ek = 1.0;
    for (int k = 1; k <= truncation_; ++k) {
        ek *= epsilon;
        if (!h_orders[k].is_real())
            throw std::invalid_argument("support coefficients must be real trig polynomials");
        h += h_orders[k] * ek;
    }
    h_ = h;
    dh_ = h.derivative();
    ddh_ = dh_.derivative();
    for (int i = 0; i < kConvexityGrid; ++i) {
        const double psi = 2.0 * kPi * i / kConvexityGrid;
        const double hv = h_.eval(psi);
        const double rho = hv + ddh_.eval(psi);
        if (hv <= 0.0 || rho <= 0.0) {
            std::ostringstream msg;
            msg << "support function loses strict convexity at epsilon=" << epsilon
                << " (psi=" << psi << ", h=" << hv << ", h+h''=" << rho
                << "): epsilon too large for this deformation";
            throw OracleError(msg.str());
        }
    }
}

SupportEvaluator::Jet SupportEvaluator::eval(double psi) const {
    return {h_.eval(psi), dh_.eval(psi), ddh_.eval(psi)};
}

LineCoords billiard_step(const LineCoords& line, const SupportEvaluator& ev,
                         double dphi_guess) {
    const double phi = line.phi;
    const double lambda = line.lambda;
    const double h_fwd = ev.eval(phi).h;
    const double h_bwd = ev.eval(phi + kPi).h;
    if (lambda >= h_fwd || lambda <= -h_bwd)
        throw OracleError("line does not meet the table interior: lambda=" +
                          std::to_string(lambda));

    // F(phi1) = h(psi)cos(theta) - h'(psi)sin(theta) - lambda, strictly
    // decreasing on (phi, phi+2pi); F(phi) > 0 > F(phi+2pi).
    auto F = [&](double phi1, double& dF) {
        const double psi = 0.5 * (phi1 + phi);
        const double theta = 0.5 * (phi1 - phi);
        const auto jet = ev.eval(psi);
        dF = -0.5 * (jet.h + jet.ddh) * std::sin(theta);
        return jet.h * std::cos(theta) - jet.dh * std::sin(theta) - lambda;
    };

    double lo = phi, hi = phi + 2.0 * kPi;
    double x = std::clamp(phi + dphi_guess, lo + 1e-12, hi - 1e-12);
    const double scale = std::max(1.0, std::abs(lambda));
    double best_x = x;
    double best_f = std::numeric_limits<double>::infinity();
    for (int it = 0; it < kNewtonMaxIter; ++it) {
        double dF = 0.0;
        const double f = F(x, dF);
        if (std::abs(f) < std::abs(best_f)) {
            best_f = f;
            best_x = x;
        }
        if (std::abs(f) <= 1e-16 * scale) break;
        if (f > 0.0)
            lo = x;
        else
            hi = x;
        double next = dF != 0.0 ? x - f / dF : lo;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi); // bisection fallback
        if (next == x) break;
        x = next;
    }
    if (std::abs(best_f) > kNewtonTol * scale)
        throw OracleError("billiard step did not converge: residual " +
                          std::to_string(std::abs(best_f)));

    const double psi = 0.5 * (best_x + phi);
    const double theta = 0.5 * (best_x - phi);
    const auto jet = ev.eval(psi);
    return {best_x, jet.h * std::cos(theta) + jet.dh * std::sin(theta)};
}

std::vector<LineCoords> iterate_billiard(LineCoords start, const SupportEvaluator& ev,
                                         int steps, double first_dphi_guess) {
    std::vector<LineCoords> orbit{start};
    double guess = first_dphi_guess;
    for (int i = 0; i < steps; ++i) {
        LineCoords next = billiard_step(orbit.back(), ev, guess);
        guess = next.phi - orbit.back().phi;
        orbit.push_back(next);
    }
    return orbit;
}

OrbitExpansion::OrbitExpansion(const ExpansionState& st, double epsilon, int order)
    : rot_(st.rot()), order_(order < 0 ? st.completed_order() : order) {
    if (order_ > st.completed_order())
        throw std::invalid_argument("OrbitExpansion: order beyond committed expansion");
    double ek = 1.0;
    for (int k = 1; k <= order_; ++k) {
        ek *= epsilon;
        dphi_ += st.phi(k) * ek;
        dpsi_ += st.psi(k) * ek;
        dtheta_ += st.theta(k) * ek;
    }
}

std::vector<double> uniform_grid(int n) {
    std::vector<double> grid(n);
    for (int i = 0; i < n; ++i) grid[i] = 2.0 * kPi * i / n;
    return grid;
}

namespace {

double equation_residual(const OrbitExpansion& fns, const SupportEvaluator& ev, double t) {
    const double omega = fns.rot().omega();
    auto qr = [&](double u, double& Q, double& R) {
        const double psi = fns.psi(u);
        const double theta = fns.theta(u);
        const auto jet = ev.eval(psi);
        Q = jet.dh * std::sin(theta);
        R = jet.h * std::cos(theta);
    };
    double q0, r0, q1, r1;
    qr(t, q0, r0);
    qr(t + omega, q1, r1);
    return (q1 + q0) - (r1 - r0);
}

} // namespace

ResidualSamples residual_function(const ExpansionState& st, const SupportEvaluator& ev,
                                  const std::vector<double>& t_grid, int order) {
    OrbitExpansion fns(st, ev.epsilon(), order);
    ResidualSamples out;
    out.values.reserve(t_grid.size());
    for (double t : t_grid) {
        const double r = equation_residual(fns, ev, t);
        out.values.push_back(r);
        out.max_abs = std::max(out.max_abs, std::abs(r));
    }
    return out;
}

InvarianceSamples invariance_residual(const ExpansionState& st, const SupportEvaluator& ev,
                                      const std::vector<double>& t_grid, int order) {
    OrbitExpansion fns(st, ev.epsilon(), order);
    const double omega = fns.rot().omega();
    auto curve = [&](double t) -> LineCoords {
        const double psi = fns.psi(t);
        const double theta = fns.theta(t);
        const auto jet = ev.eval(psi);
        return {fns.phi(t), jet.h * std::cos(theta) - jet.dh * std::sin(theta)};
    };
    InvarianceSamples out;
    out.horizontal.reserve(t_grid.size());
    out.vertical.reserve(t_grid.size());
    for (double t : t_grid) {
        const LineCoords c = curve(t);
        const LineCoords mapped = billiard_step(c, ev, 2.0 * fns.theta(t));
        const LineCoords shifted = curve(t + omega);
        const double dh_gap = mapped.phi - shifted.phi;
        const double dv_gap = mapped.lambda - shifted.lambda;
        out.horizontal.push_back(dh_gap);
        out.vertical.push_back(dv_gap);
        out.max_horizontal = std::max(out.max_horizontal, std::abs(dh_gap));
        out.max_vertical = std::max(out.max_vertical, std::abs(dv_gap));
    }
    return out;
}

ActionDiagnostics action_and_identities(const ExpansionState& st, const SupportEvaluator& ev,
                                        const std::vector<double>& t_grid, int order) {
    OrbitExpansion fns(st, ev.epsilon(), order);
    const RotationNumber& rot = st.rot();
    const double omega = rot.omega();
    const int q = rot.q();

    std::vector<double> action(t_grid.size());
    ActionDiagnostics diag;
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        double a = 0.0, mu_dh = 0.0, mu_theta = 0.0;
        for (int j = 0; j < q; ++j) {
            const double u = t_grid[i] + j * omega;
            const double psi = fns.psi(u);
            const double theta = fns.theta(u);
            const auto jet = ev.eval(psi);
            a += jet.h * std::sin(theta);
            mu_dh += jet.dh * std::sin(theta);
            mu_theta += theta;
        }
        action[i] = 2.0 * a; // = 2q * mu{h(psi)sin(theta)}
        diag.mu_dh_sin_max = std::max(diag.mu_dh_sin_max, std::abs(mu_dh / q));
        diag.mu_theta_deviation =
            std::max(diag.mu_theta_deviation, std::abs(mu_theta / q - 0.5 * omega));
    }
    double mean = 0.0;
    for (double a : action) mean += a;
    mean /= static_cast<double>(action.size());
    diag.action_mean = mean;
    for (double a : action)
        diag.action_deviation = std::max(diag.action_deviation, std::abs(a - mean));
    return diag;
}

CausticReconstruction reconstruct_caustic(const ExpansionState& st,
                                          const SupportEvaluator& ev,
                                          const std::vector<double>& t_grid, int order) {
    OrbitExpansion fns(st, ev.epsilon(), order);
    CausticReconstruction out;
    out.samples.reserve(t_grid.size());
    out.min_g = std::numeric_limits<double>::infinity();
    for (double t : t_grid) {
        const double psi = fns.psi(t);
        const double theta = fns.theta(t);
        const auto jet = ev.eval(psi);
        const double g = jet.h * std::cos(theta) - jet.dh * std::sin(theta);
        out.samples.emplace_back(fns.phi(t), g);
        out.min_g = std::min(out.min_g, g);
    }
    for (std::size_t i = 0; i + 1 < out.samples.size(); ++i)
        if (out.samples[i + 1].first <= out.samples[i].first) out.monotone = false;
    if (!out.samples.empty() &&
        out.samples.front().first + 2.0 * kPi <= out.samples.back().first)
        out.monotone = false;
    return out;
}

ScalingFit scaling_fit(const std::vector<std::pair<double, double>>& pairs) {
    if (pairs.size() < 3)
        throw ConfigError("scaling fit needs at least 3 (epsilon, residual) pairs");
    double emin = std::numeric_limits<double>::infinity(), emax = 0.0;
    for (const auto& [eps, r] : pairs) {
        if (eps <= 0.0 || r < 0.0)
            throw std::invalid_argument("scaling fit needs positive epsilon values");
        emin = std::min(emin, eps);
        emax = std::max(emax, eps);
    }
    if (emax / emin < 99.0)
        throw ConfigError("scaling fit needs epsilon values spanning at least two decades");

    const double floor = 100.0 * std::numeric_limits<double>::epsilon();
    std::vector<std::pair<double, double>> usable;
    for (const auto& pr : pairs)
        if (pr.second > floor) usable.push_back(pr);

    ScalingFit fit;
    fit.points_used = static_cast<int>(usable.size());
    double umin = std::numeric_limits<double>::infinity(), umax = 0.0;
    for (const auto& [eps, r] : usable) {
        umin = std::min(umin, eps);
        umax = std::max(umax, eps);
    }
    if (usable.size() < 3 || umax / umin < 9.0) {
        fit.at_noise_floor = true;
        return fit;
    }

    const int n = static_cast<int>(usable.size());
    double sx = 0.0, sy = 0.0;
    for (const auto& [eps, r] : usable) {
        sx += std::log(eps);
        sy += std::log(r);
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (const auto& [eps, r] : usable) {
        const double dx = std::log(eps) - mx;
        const double dy = std::log(r) - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    fit.slope = sxy / sxx;
    fit.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    return fit;
}

void write_residual_csv(std::ostream& os, const std::vector<double>& t_grid,
                        const std::vector<double>& residual) {
    os << "t,residual\n";
    for (std::size_t i = 0; i < t_grid.size() && i < residual.size(); ++i)
        os << t_grid[i] << "," << residual[i] << "\n";
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepPoint>& points) {
    os << "epsilon,max_residual,slope_window\n";
    for (const SweepPoint& p : points)
        os << p.epsilon << "," << p.max_residual << "," << p.slope_window << "\n";
}

} // namespace caustica
