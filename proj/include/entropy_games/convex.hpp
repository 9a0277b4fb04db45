#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "entropy_games/error.hpp"
#include "entropy_games/game.hpp"
#include "entropy_games/matrix.hpp"
#include "entropy_games/operators.hpp"
#include "entropy_games/spectral.hpp"
#include "entropy_games/structure.hpp"

namespace entropy_games {

/// A point (u, mu) of R^D x R.
struct ConvexPoint {
    Vector u;
    double mu = 0.0;
};

/**
 * The conditioned convex program of an irreducible Despot-free game:
 *   minimize mu  subject to  f(u) <= mu e + u,  0 <= u_d <= u_max,  0 <= mu <= mu_max,
 * with L = ceil(log(nW)) (natural log), u_max = (n-1) L and mu_max = L + 2.
 * Its optimal value is the log of the game value.
 */
class ConvexProgram {
public:
    explicit ConvexProgram(const EntropyGame& g) : game_(g) {
        const GameClassification cls = classify(g);
        if (!cls.despot_free) throw PreconditionViolated("convex program: game is not Despot-free");
        if (!cls.irreducible) throw PreconditionViolated("convex program: game is not irreducible");
        if (!g.integral_weights())
            throw PreconditionViolated("convex program: the box constants need integer weights");
        sigma_ = despot_free_successor(g);
        n_ = g.num_despot();
        w_ = g.max_weight();
        const double nn = static_cast<double>(n_);
        log_nw_ = std::log(nn * w_);
        big_l_ = std::ceil(log_nw_ - 1e-12);
        // With a single state the box of u degenerates to {0}; widen it to keep an interior ball.
        u_max_ = std::max((nn - 1.0) * big_l_, 1.0);
        mu_max_ = big_l_ + 2.0;
        radius_outer_ = std::sqrt(nn + 1.0) * ((nn - 1.0) * log_nw_ + nn + 1.0);
        // Keep the outer ball large enough to contain the whole box around the center.
        double box = 0.0;
        for (Index d = 0; d < n_; ++d) box += std::pow(std::max(0.5, u_max_ - 0.5), 2.0);
        box += std::pow(std::max(big_l_ + 1.5, 0.5), 2.0);
        radius_outer_ = std::max(radius_outer_, std::sqrt(box));
    }

    const EntropyGame& game() const { return game_; }
    std::size_t n() const { return n_; }
    std::size_t dimension() const { return n_ + 1; }
    double L() const { return big_l_; }
    double u_max() const { return u_max_; }
    double mu_max() const { return mu_max_; }
    double inner_radius() const { return 1.0 / 3.0; }
    double outer_radius() const { return radius_outer_; }
    const DespotPolicy& sigma() const { return sigma_; }

    /// Center of the inner ball: u = e/2, mu = L + 3/2.
    ConvexPoint center() const { return {Vector(n_, 0.5), big_l_ + 1.5}; }

    /// g_{d,p}(u, mu) = log sum_d' m_{pd'} exp(u_d') - u_d - mu.
    double constraint(Index d, Index p, const ConvexPoint& y) const {
        return log_people_sum(game_, p, y.u) - y.u[d] - y.mu;
    }

    /// Largest constraint violation (box and nonlinear), 0 when feasible.
    double violation(const ConvexPoint& y) const {
        double v = std::max({0.0, -y.mu, y.mu - mu_max_});
        for (Index d = 0; d < n_; ++d) {
            v = std::max({v, -y.u[d], y.u[d] - u_max_});
            for (Index p : game_.tribune_actions(sigma_[d])) v = std::max(v, constraint(d, p, y));
        }
        return v;
    }

    bool contains(const ConvexPoint& y, double slack = 0.0) const { return violation(y) <= slack; }

private:
    EntropyGame game_;
    DespotPolicy sigma_;
    std::size_t n_ = 0;
    double w_ = 1.0;
    double log_nw_ = 0.0;
    double big_l_ = 0.0;
    double u_max_ = 0.0;
    double mu_max_ = 0.0;
    double radius_outer_ = 0.0;
};

/// Either "near feasible" or a halfspace {x : c.x <= c.y} containing the feasible set up to nu.
struct SeparationResult {
    bool near_feasible = false;
    Vector c;             ///< coefficients over (u_1..u_n, mu); empty when near feasible
    double offset = 0.0;  ///< c.y
};

/**
 * Weak separation oracle. Constraints are tested with slack
 * eps = min(nu / ((5 + 2(n-1)L) sqrt(n+1)), nu / (M (n+1))), M = (n-1)L + 3.
 * A violated box constraint yields a coordinate halfspace; a violated
 * nonlinear constraint yields its gradient, whose mu coefficient is -1.
 */
inline SeparationResult separation_oracle(const ConvexProgram& k, const ConvexPoint& y, double nu) {
    if (!(nu > 0.0)) throw std::invalid_argument("separation_oracle: nu must be positive");
    const std::size_t n = k.n();
    const double nn = static_cast<double>(n);
    const double eps1 = nu / ((5.0 + 2.0 * (nn - 1.0) * k.L()) * std::sqrt(nn + 1.0));
    const double eps2 = nu / (((nn - 1.0) * k.L() + 3.0) * (nn + 1.0));
    const double eps = std::min(eps1, eps2);
    SeparationResult r;
    auto coordinate = [&](Index i, double sign) {
        r.c.assign(n + 1, 0.0);
        r.c[i] = sign;
        r.offset = sign * (i < n ? y.u[i] : y.mu);
        return r;
    };
    for (Index d = 0; d < n; ++d) {
        if (y.u[d] < -eps) return coordinate(d, -1.0);
        if (y.u[d] > k.u_max() + eps) return coordinate(d, 1.0);
    }
    if (y.mu < -eps) return coordinate(n, -1.0);
    if (y.mu > k.mu_max() + eps) return coordinate(n, 1.0);

    const EntropyGame& g = k.game();
    double worst = eps;
    Index worst_d = 0, worst_p = 0;
    bool violated = false;
    for (Index d = 0; d < n; ++d)
        for (Index p : g.tribune_actions(k.sigma()[d])) {
            const double v = k.constraint(d, p, y);
            if (v > worst) {
                worst = v;
                worst_d = d;
                worst_p = p;
                violated = true;
            }
        }
    if (!violated) {
        r.near_feasible = true;
        return r;
    }
    // Gradient of g_{d,p}: softmax weights on u, minus 1 on u_d, minus 1 on mu.
    r.c.assign(n + 1, 0.0);
    double top = -std::numeric_limits<double>::infinity();
    for (const WeightedArc& a : g.people_arcs(worst_p)) top = std::max(top, y.u[a.despot]);
    double total = 0.0;
    for (const WeightedArc& a : g.people_arcs(worst_p)) total += a.weight * std::exp(y.u[a.despot] - top);
    for (const WeightedArc& a : g.people_arcs(worst_p)) r.c[a.despot] += a.weight * std::exp(y.u[a.despot] - top) / total;
    r.c[worst_d] -= 1.0;
    r.c[n] = -1.0;
    r.offset = dot(std::span<const double>(r.c).first(n), y.u) - y.mu;
    return r;
}

struct EllipsoidResult {
    ConvexPoint point;          ///< best near-feasible point found
    double mu_lower = 0.0;      ///< lower bound on the optimal mu implied by the final ellipsoid
    std::size_t iterations = 0;
    std::size_t budget = 0;
    bool converged = false;
};

/**
 * Central-cut ellipsoid method on the conditioned program, starting from the
 * ball of radius R around the inner-ball center. Feasibility cuts come from
 * the separation oracle (nu = eps / 4); near-feasible points are recorded and
 * cut by the objective. Each update is inflated by 1 + 1/(4 q^2), q = n + 1.
 * Stops when the best mu is within eps / 2 of the ellipsoid's lower bound, or
 * after 2 (n+1)(n+2) ln(R / (r eps)) steps.
 */
inline EllipsoidResult ellipsoid_solve(const ConvexProgram& k, double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("ellipsoid_solve: eps must be positive");
    const std::size_t n = k.n();
    const std::size_t q = n + 1;
    const double qd = static_cast<double>(q);
    EllipsoidResult out;
    out.budget = static_cast<std::size_t>(
        std::ceil(2.0 * qd * (qd + 1.0) * std::log(k.outer_radius() / (k.inner_radius() * eps))));

    Vector y(q);
    {
        const ConvexPoint a = k.center();
        std::copy(a.u.begin(), a.u.end(), y.begin());
        y[n] = a.mu;
    }
    // The ellipsoid is {y + J z : |z| <= 1}, i.e. P = J J^T. Updating the factor keeps P
    // positive semidefinite; the program is nearly invariant along u + t e, so P becomes
    // very ill-conditioned and the plain rank-one update of P breaks down.
    Matrix j(q);
    for (Index i = 0; i < q; ++i) j(i, i) = k.outer_radius();
    const double nu = eps / 4.0;
    const double expand = qd * qd / (qd * qd - 1.0) * (1.0 + 1.0 / (4.0 * qd * qd));
    const double root_expand = std::sqrt(expand);
    const double beta = 1.0 - std::sqrt((qd - 1.0) / (qd + 1.0));
    double best_mu = std::numeric_limits<double>::infinity();
    std::optional<ConvexPoint> best;

    auto as_point = [&](const Vector& v) {
        ConvexPoint pt;
        pt.u.assign(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(n));
        pt.mu = v[n];
        return pt;
    };

    for (out.iterations = 0; out.iterations < out.budget; ++out.iterations) {
        const ConvexPoint pt = as_point(y);
        const SeparationResult sep = separation_oracle(k, pt, nu);
        Vector c;
        if (sep.near_feasible) {
            if (pt.mu < best_mu) {
                best_mu = pt.mu;
                best = pt;
            }
            c.assign(q, 0.0);
            c[n] = 1.0;
        } else {
            c = sep.c;
        }
        double pnn = 0.0;
        for (Index i = 0; i < q; ++i) pnn += j(n, i) * j(n, i);
        const double lower = y[n] - std::sqrt(pnn);
        out.mu_lower = lower;
        if (best && best_mu - lower <= eps / 2.0) {
            out.converged = true;
            break;
        }
        // a = J^T c / |J^T c|, b = J a = P c / sqrt(c^T P c)
        Vector a(q, 0.0);
        for (Index i = 0; i < q; ++i)
            for (Index r = 0; r < q; ++r) a[i] += j(r, i) * c[r];
        const double norm = std::sqrt(dot(a, a));
        if (!(norm > 0.0) || !std::isfinite(norm)) break;
        for (double& v : a) v /= norm;
        const Vector b = multiply(j, a);
        for (Index i = 0; i < q; ++i) y[i] -= b[i] / (qd + 1.0);
        // J' = sqrt(expand) J (I - beta a a^T), so P' = expand (P - 2/(q+1) b b^T).
        for (Index r = 0; r < q; ++r)
            for (Index i = 0; i < q; ++i) j(r, i) = root_expand * (j(r, i) - beta * b[r] * a[i]);
    }
    if (best) {
        out.point = *best;
    } else {
        out.point = as_point(y);
    }
    return out;
}

struct SynthesisResult {
    TribunePolicy tau;
    double rho = 0.0;          ///< spectral radius of the synthesized policy matrix
    std::size_t sweeps = 0;    ///< passes of the B' refinement loop
    std::vector<Index> kept;   ///< the final set B'
};

/**
 * Tribune policy from an approximate solution (u, mu) of the convex program.
 * Starts from a policy attaining F(U) = M^tau U with U = exp(u), refines the
 * set B' of states whose rows keep F_d(U) >= lambda_under U_d with at most
 * eps' U_d of mass outside B', then redirects the other states toward B'.
 * The result is verified: when M^tau is irreducible its Perron vector must
 * certify optimality; otherwise rho(M^tau) must reach the upper bound
 * max_d F_d(U) / U_d within 1e-8 relative. Throws VerificationFailed.
 */
inline SynthesisResult synthesize_tribune_policy(const EntropyGame& g, const ConvexPoint& y, double eps) {
    const GameClassification cls = classify(g);
    if (!cls.despot_free) throw PreconditionViolated("policy synthesis: game is not Despot-free");
    const DespotPolicy sigma = despot_free_successor(g);
    const std::size_t n = g.num_despot();
    const double nn = static_cast<double>(n);
    const double w = g.max_weight();

    const double top = *std::max_element(y.u.begin(), y.u.end());
    Vector big_u(n);
    for (Index d = 0; d < n; ++d) big_u[d] = std::exp(y.u[d] - top);

    const double lambda_star = std::exp(y.mu);
    const double grow = std::expm1(4.0 * eps);
    const double log_spread = 2.0 * (nn - 1.0) * std::log(std::exp(1.0) * nn * w);
    const double spread = std::exp(std::min(log_spread, 700.0));
    const double lambda_under = lambda_star * (1.0 - grow * (nn - 1.0) * std::exp(1.0) * spread);
    const double eps_prime = lambda_star * grow * std::exp(1.0) * nn * spread;

    // Policy attaining F(U) = M^tau U, ties to the smallest index.
    std::vector<Index> tau(g.num_tribune());
    for (Index t = 0; t < g.num_tribune(); ++t) {
        Index best = g.tribune_actions(t).front();
        double best_value = -1.0;
        for (Index p : g.tribune_actions(t)) {
            const double v = people_sum(g, p, big_u);
            if (v > best_value) {
                best_value = v;
                best = p;
            }
        }
        tau[t] = best;
    }

    std::vector<bool> in_b(n, false);
    for (Index d = 0; d < n; ++d) in_b[d] = people_sum(g, tau[sigma[d]], big_u) >= lambda_under * big_u[d];
    auto outside_mass = [&](Index p) {
        double s = 0.0;
        for (const WeightedArc& a : g.people_arcs(p))
            if (!in_b[a.despot]) s += a.weight * big_u[a.despot];
        return s;
    };

    SynthesisResult out;
    bool changed = true;
    while (changed) {
        changed = false;
        ++out.sweeps;
        for (Index d = 0; d < n; ++d) {
            if (!in_b[d]) continue;
            const Index t = sigma[d];
            if (outside_mass(tau[t]) <= eps_prime * big_u[d]) continue;
            bool fixed = false;
            for (Index p : g.tribune_actions(t))
                if (people_sum(g, p, big_u) >= lambda_under * big_u[d] && outside_mass(p) <= eps_prime * big_u[d]) {
                    tau[t] = p;
                    fixed = true;
                    break;
                }
            if (!fixed) {
                in_b[d] = false;
                changed = true;
            }
        }
    }
    for (Index d = 0; d < n; ++d)
        if (in_b[d]) out.kept.push_back(d);

    // Make B' reachable from every state: grow the reached set through fixed rows,
    // and fix a free Tribune node when one of its actions enters the reached set.
    std::vector<bool> fixed_t(g.num_tribune(), false), reached = in_b;
    for (Index d = 0; d < n; ++d)
        if (in_b[d]) fixed_t[sigma[d]] = true;
    auto enters = [&](Index p) {
        for (const WeightedArc& a : g.people_arcs(p))
            if (reached[a.despot]) return true;
        return false;
    };
    bool grew = !out.kept.empty();
    while (grew) {
        grew = false;
        for (Index d = 0; d < n; ++d) {
            if (reached[d]) continue;
            const Index t = sigma[d];
            if (fixed_t[t]) {
                if (enters(tau[t])) reached[d] = grew = true;
                continue;
            }
            for (Index p : g.tribune_actions(t))
                if (enters(p)) {
                    tau[t] = p;
                    fixed_t[t] = true;
                    reached[d] = grew = true;
                    break;
                }
        }
    }

    out.tau = TribunePolicy(tau);
    const Matrix m = policy_matrix(g, sigma, out.tau);
    const Condensation c = scc_condense(digraph_of(m));
    if (c.size() == 1 && c.nontrivial[0]) {
        const PerronPair pp = perron_root(m);
        out.rho = pp.rho;
        const ValueVector fx = apply_F(g, pp.right);
        for (Index d = 0; d < n; ++d)
            if (fx[d] - pp.rho * pp.right[d] > 1e-9 * (1.0 + pp.rho) * pp.right[d])
                throw VerificationFailed("policy synthesis: policy is not optimal (improvable at state " +
                                         g.despot_ids()[d] + "); retry with a smaller eps");
    } else {
        out.rho = class_structure(m).rho;
        const ValueVector fu = apply_F(g, big_u);
        double upper = 0.0;
        for (Index d = 0; d < n; ++d) upper = std::max(upper, fu[d] / big_u[d]);
        if (out.rho < upper * (1.0 - 1e-8))
            throw VerificationFailed("policy synthesis: spectral radius " + std::to_string(out.rho) +
                                     " is below the certified bound " + std::to_string(upper) +
                                     "; retry with a smaller eps");
    }
    return out;
}

}  // namespace entropy_games
