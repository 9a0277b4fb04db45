#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "entropy_games/error.hpp"
#include "entropy_games/game.hpp"
#include "entropy_games/operators.hpp"
#include "entropy_games/solvers.hpp"
#include "entropy_games/spectral.hpp"

namespace entropy_games {

/// Which Collatz-Wielandt inequality the certificate claims.
enum class CwDirection {
    upper,  ///< F(X) <= lambda X with X > 0: lambda bounds every value from above
    exact,  ///< F(X) = lambda X with X >= 0, X != 0
    lower,  ///< F(X) >= lambda X with X >= 0, X != 0: lambda bounds the largest value from below
};

inline const char* to_string(CwDirection d) {
    switch (d) {
        case CwDirection::upper: return "<=";
        case CwDirection::exact: return "=";
        case CwDirection::lower: return ">=";
    }
    return "?";
}

inline CwDirection parse_direction(const std::string& s) {
    if (s == "<=") return CwDirection::upper;
    if (s == "=") return CwDirection::exact;
    if (s == ">=") return CwDirection::lower;
    throw InvalidGame("certificate: direction must be one of \"<=\", \"=\", \">=\" (got \"" + s + "\")");
}

struct CwCertificate {
    double lambda = 0.0;
    Vector x;
    CwDirection direction = CwDirection::exact;
    double tolerance = 1e-8;
};

struct CwCheck {
    bool pass = false;
    std::optional<Index> witness;  ///< first violating state
    double max_violation = 0.0;    ///< scaled violation, pass iff <= tolerance
    std::string reason;
};

/**
 * Checks F(X) against lambda X entrywise. A violation at d is measured as
 * the signed gap divided by max(1, lambda) ||X||_inf and compared with the
 * certificate tolerance.
 */
inline CwCheck check_cw(const EntropyGame& g, const CwCertificate& cert) {
    CwCheck out;
    const std::size_t n = g.num_despot();
    if (cert.x.size() != n) {
        out.reason = "vector length " + std::to_string(cert.x.size()) + " does not match " + std::to_string(n) +
                     " Despot states";
        return out;
    }
    if (!(cert.lambda > 0.0) || !std::isfinite(cert.lambda)) {
        out.reason = "lambda must be positive and finite";
        return out;
    }
    for (Index d = 0; d < n; ++d) {
        const double v = cert.x[d];
        const bool bad = !std::isfinite(v) || v < 0.0 || (cert.direction == CwDirection::upper && v <= 0.0);
        if (bad) {
            out.witness = d;
            out.reason = cert.direction == CwDirection::upper ? "X must be strictly positive"
                                                                : "X must be nonnegative";
            return out;
        }
    }
    const double norm = sup_norm(cert.x);
    if (norm == 0.0) {
        out.reason = "X must be nonzero";
        return out;
    }
    const ValueVector fx = apply_F(g, cert.x);
    const double scale = std::max(1.0, cert.lambda) * norm;
    for (Index d = 0; d < n; ++d) {
        const double diff = (fx[d] - cert.lambda * cert.x[d]) / scale;
        double violation = 0.0;
        switch (cert.direction) {
            case CwDirection::upper: violation = diff; break;
            case CwDirection::exact: violation = std::abs(diff); break;
            case CwDirection::lower: violation = -diff; break;
        }
        if (violation > out.max_violation) out.max_violation = violation;
        if (violation > cert.tolerance && !out.witness) out.witness = d;
    }
    out.pass = !out.witness;
    if (!out.pass)
        out.reason = std::string("F(X) ") + to_string(cert.direction) + " lambda X fails at state " +
                     g.despot_ids()[*out.witness];
    return out;
}

namespace detail {

/**
 * Limit direction of (sI - M)^{-1} e as s decreases to lambda = rho(M).
 * Each class gets a height: the largest number of basic classes on a path
 * leaving it. The resolvent grows like (s - lambda)^{-height} on a class,
 * and the leading coefficients on the classes of maximal height form a
 * nonnegative eigenvector. Coefficients are computed downstream first.
 */
inline Vector limiting_eigenvector(const Matrix& m) {
    const ClassStructure cs = class_structure(m);
    const Condensation& c = cs.condensation;
    const double lambda = cs.rho;
    Vector a(m.size(), 0.0);
    std::vector<std::size_t> height(c.size(), 0);
    for (auto it = c.topological_order.rbegin(); it != c.topological_order.rend(); ++it) {
        const Index k = *it;
        std::size_t below = 0;
        for (Index j : c.dag[k]) below = std::max(below, height[j]);
        height[k] = below + (cs.basic[k] ? 1 : 0);
        // Order of the right-hand side the class needs.
        const std::size_t need = cs.basic[k] ? height[k] - 1 : height[k];
        const auto& nodes = c.components[k];
        Vector rhs(nodes.size(), need == 0 ? 1.0 : 0.0);
        for (Index i = 0; i < nodes.size(); ++i)
            for (Index j : c.dag[k])
                if (height[j] == need)
                    for (Index v : c.components[j]) rhs[i] += m(nodes[i], v) * a[v];
        if (cs.basic[k]) {
            // Only the Perron direction of the block survives at leading order.
            Vector r(1, 1.0), l(1, 1.0);
            if (nodes.size() > 1) {
                const PerronPair pp = perron_pair(submatrix(m, nodes));
                r = pp.right;
                l = pp.left;
            }
            const double coef = dot(l, rhs) / dot(l, r);
            for (Index i = 0; i < nodes.size(); ++i) a[nodes[i]] = coef * r[i];
        } else {
            Matrix block(nodes.size());
            for (Index i = 0; i < nodes.size(); ++i)
                for (Index j = 0; j < nodes.size(); ++j)
                    block(i, j) = (i == j ? lambda : 0.0) - m(nodes[i], nodes[j]);
            const Vector sol = solve_linear(block, rhs);
            for (Index i = 0; i < nodes.size(); ++i) a[nodes[i]] = std::max(0.0, sol[i]);
        }
    }
    const std::size_t top_height = *std::max_element(height.begin(), height.end());
    Vector x(m.size(), 0.0);
    for (Index k = 0; k < c.size(); ++k)
        if (height[k] == top_height)
            for (Index v : c.components[k]) x[v] = a[v];
    const double top = sup_norm(x);
    if (top > 0.0)
        for (double& v : x) v /= top;
    return x;
}

/**
 * Policy iteration for the resolvent game X = (F(X) + e) / s with s above
 * the value. Despot starts from an optimal policy, so every Tribune reply
 * keeps the spectral radius below s and each evaluation is a nonnegative
 * solve. Returns false when an evaluation breaks down.
 */
inline bool resolvent_policies(const EntropyGame& g, double s, DespotPolicy& delta, TribunePolicy& tau) {
    const std::size_t n = g.num_despot();
    auto evaluate = [&](Vector& x) {
        const Matrix m = policy_matrix(g, delta, tau);
        Matrix a(n);
        for (Index i = 0; i < n; ++i)
            for (Index j = 0; j < n; ++j) a(i, j) = (i == j ? s : 0.0) - m(i, j);
        x = solve_linear(a, Vector(n, 1.0));
        return std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v) && v > 0.0; });
    };
    const std::size_t cap = 1000;
    Vector x;
    for (std::size_t outer = 0; outer < cap; ++outer) {
        for (std::size_t inner = 0;; ++inner) {
            if (inner == cap || !evaluate(x)) return false;
            const double gate = 1e-12 * sup_norm(x);
            bool changed = false;
            for (Index t = 0; t < g.num_tribune(); ++t) {
                double best = people_sum(g, tau[t], x);
                for (Index p : g.tribune_actions(t)) {
                    const double v = people_sum(g, p, x);
                    if (v > best + gate) {
                        best = v;
                        tau[t] = p;
                        changed = true;
                    }
                }
            }
            if (!changed) break;
        }
        const double gate = 1e-12 * sup_norm(x);
        bool changed = false;
        for (Index d = 0; d < n; ++d) {
            double best = tribune_value(g, delta[d], x);
            for (Index t : g.despot_actions(d)) {
                const double v = tribune_value(g, t, x);
                if (v < best - gate) {
                    best = v;
                    delta[d] = t;
                    changed = true;
                }
            }
        }
        if (!changed) return true;
    }
    return false;
}

}  // namespace detail

/**
 * Builds an exact certificate from a solver report. The report's eigenvector
 * is used when it passes. Otherwise the policies are refined on the
 * resolvent game just above the value, where the optimal pair settles, and
 * the certificate is the limiting eigenvector of that pair's matrix. The
 * result is always returned; callers should run check_cw on it.
 */
inline CwCertificate certificate_from_report(const EntropyGame& g, const SolveReport& rep, double tolerance = 1e-8) {
    CwCertificate cert;
    cert.direction = CwDirection::exact;
    cert.tolerance = tolerance;
    cert.lambda = rep.max_value();
    if (rep.eigenvector) {
        cert.x = *rep.eigenvector;
        const double top = sup_norm(cert.x);
        if (top > 0.0)
            for (double& v : cert.x) v /= top;
        if (check_cw(g, cert).pass || !rep.despot_policy || !rep.tribune_policy) return cert;
    }
    if (!rep.despot_policy || !rep.tribune_policy)
        throw PreconditionViolated("certificate: report carries neither an eigenvector nor a policy pair");
    const Matrix pair = policy_matrix(g, *rep.despot_policy, *rep.tribune_policy);
    CwCertificate best = cert;
    best.x = nonnegative_right_eigenvector(pair, class_structure(pair));
    double best_violation = check_cw(g, best).max_violation;
    if (best_violation <= tolerance) return best;
    for (double h : {1e-7, 1e-5, 1e-9, 1e-3}) {
        DespotPolicy delta = *rep.despot_policy;
        TribunePolicy tau = *rep.tribune_policy;
        if (!detail::resolvent_policies(g, cert.lambda * (1.0 + h), delta, tau)) continue;
        CwCertificate trial = cert;
        trial.x = detail::limiting_eigenvector(policy_matrix(g, delta, tau));
        const CwCheck check = check_cw(g, trial);
        if (check.max_violation < best_violation || (check.pass && !check_cw(g, best).pass)) {
            best = trial;
            best_violation = check.max_violation;
        }
        if (check.pass) return trial;
    }
    return best;
}

inline nlohmann::json to_json(const CwCertificate& c) {
    return {{"lambda", c.lambda}, {"X", c.x}, {"direction", to_string(c.direction)}, {"tolerance", c.tolerance}};
}

inline CwCertificate parse_certificate(const nlohmann::json& doc) {
    auto fail = [](const std::string& what) { throw InvalidGame("certificate schema violation: " + what); };
    if (!doc.is_object()) fail("top level must be an object");
    for (const char* key : {"lambda", "X", "direction"})
        if (!doc.contains(key)) fail(std::string("missing \"") + key + "\"");
    CwCertificate c;
    if (!doc["lambda"].is_number()) fail("\"lambda\" must be a number");
    c.lambda = doc["lambda"].get<double>();
    if (!doc["X"].is_array()) fail("\"X\" must be an array of numbers");
    for (const auto& v : doc["X"]) {
        if (!v.is_number()) fail("\"X\" must be an array of numbers");
        c.x.push_back(v.get<double>());
    }
    if (!doc["direction"].is_string()) fail("\"direction\" must be a string");
    c.direction = parse_direction(doc["direction"].get<std::string>());
    if (doc.contains("tolerance")) {
        if (!doc["tolerance"].is_number()) fail("\"tolerance\" must be a number");
        c.tolerance = doc["tolerance"].get<double>();
    }
    return c;
}

/**
 * Natural log of the separation bound
 *   eta_sep(n, W) = 1 / (2 (2n)^(n+2) ((2 ceil(sqrt n) W)^(2n) + 1)^(2n)),
 * evaluated in the log domain.
 */
inline double eta_sep_log(std::size_t n, double w) {
    if (n < 1 || !(w >= 1.0)) throw std::invalid_argument("eta_sep_log: need n >= 1 and W >= 1");
    const double nn = static_cast<double>(n);
    std::size_t root = static_cast<std::size_t>(std::sqrt(nn));
    while (root * root < n) ++root;
    while (root > 0 && (root - 1) * (root - 1) >= n) --root;
    const double log_a = std::log(2.0 * static_cast<double>(root) * w);
    // log(a^(2n) + 1) = 2n log a + log1p(a^(-2n))
    const double log_inner = 2.0 * nn * log_a + std::log1p(std::exp(-2.0 * nn * log_a));
    return -(std::log(2.0) + (nn + 2.0) * std::log(2.0 * nn) + 2.0 * nn * log_inner);
}

}  // namespace entropy_games
