#include "frugal/display_optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <ostream>

#include "frugal/error.hpp"
#include "frugal/random.hpp"

namespace frugal {

namespace {

double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

std::vector<double> cluster_mass(std::span<const double> mu, const Matrix& C) {
    std::vector<double> m(C.cols(), 0.0);
    for (std::size_t i = 0; i < C.rows(); ++i) {
        if (mu[i] == 0.0) continue;
        for (std::size_t k = 0; k < C.cols(); ++k) m[k] += C(i, k) * mu[i];
    }
    return m;
}

double own_distance(const Matrix& C, const Matrix& D, std::size_t i) {
    double s = 0.0;
    for (std::size_t k = 0; k < C.cols(); ++k) s += C(i, k) * D(i, k);
    return s;
}

double score_neg_entropy(const Matrix& F, std::size_t i) {
    double s = 0.0;
    for (std::size_t c = 0; c < F.cols(); ++c) s += xlogx(F(i, c));
    return s;
}

double l1_distance(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
    return s;
}

void check_simplex(std::span<const double> mu, double tol) {
    double sum = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) {
        require(std::isfinite(mu[i]) && mu[i] >= -tol, ErrorKind::invalid_argument,
                "mu[" + std::to_string(i) + "] is negative or non-finite");
        sum += mu[i];
    }
    require(std::abs(sum - 1.0) <= tol, ErrorKind::invalid_argument,
            "mu is off the simplex (sum = " + std::to_string(sum) + ")");
}

}  // namespace

void check_problem_shapes(const Matrix& C, const Matrix& D, const Matrix& F) {
    require(C.rows() >= 1 && C.cols() >= 1, ErrorKind::invalid_argument, "C must be non-empty");
    require(D.rows() == C.rows() && D.cols() == C.cols(), ErrorKind::invalid_argument,
            "D must have the same shape as C");
    require(F.rows() == C.rows() && F.cols() >= 1, ErrorKind::invalid_argument, "F must have one row per sample");
}

ObjectiveTerms objective_terms(std::span<const double> mu, const Matrix& C, const Matrix& D, const Matrix& F,
                               const Hyperparams& hp) {
    check_problem_shapes(C, D, F);
    require(mu.size() == C.rows(), ErrorKind::invalid_argument, "mu length does not match the pool size");
    check_simplex(mu, 1e-6);

    ObjectiveTerms t;
    for (std::size_t i = 0; i < mu.size(); ++i) {
        t.representativity += mu[i] * own_distance(C, D, i);
        t.ambiguity += mu[i] * score_neg_entropy(F, i);
        t.cardinality += xlogx(mu[i]);
    }
    for (double m : cluster_mass(mu, C)) t.diversity += xlogx(m);
    t.total = hp.rep_weight * t.representativity + hp.alpha * t.diversity + hp.beta * t.ambiguity +
              hp.gamma * t.cardinality;
    return t;
}

double objective(std::span<const double> mu, const Matrix& C, const Matrix& D, const Matrix& F,
                 const Hyperparams& hp) {
    return objective_terms(mu, C, D, F, hp).total;
}

std::vector<double> objective_gradient(std::span<const double> mu, const Matrix& C, const Matrix& D,
                                       const Matrix& F, const Hyperparams& hp) {
    check_problem_shapes(C, D, F);
    require(mu.size() == C.rows(), ErrorKind::invalid_argument, "mu length does not match the pool size");
    const auto m = cluster_mass(mu, C);
    std::vector<double> log_mass(m.size());
    for (std::size_t k = 0; k < m.size(); ++k) log_mass[k] = std::log(m[k]);
    auto g = update_exponent(log_mass, C, D, F, hp);
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += hp.gamma * (std::log(mu[i]) + 1.0);
    return g;
}

std::vector<double> update_exponent(std::span<const double> log_mass, const Matrix& C, const Matrix& D,
                                    const Matrix& F, const Hyperparams& hp) {
    std::vector<double> e(C.rows());
    for (std::size_t i = 0; i < C.rows(); ++i) {
        double div = 0.0;
        if (hp.alpha != 0.0) {
            for (std::size_t k = 0; k < C.cols(); ++k)
                if (C(i, k) != 0.0) div += C(i, k) * (log_mass[k] + 1.0);
        }
        double v = 0.0;
        if (hp.rep_weight != 0.0) v += hp.rep_weight * own_distance(C, D, i);
        if (hp.alpha != 0.0) v += hp.alpha * div;
        if (hp.beta != 0.0) v += hp.beta * score_neg_entropy(F, i);
        e[i] = v;
    }
    return e;
}

std::vector<double> gibbs_normalize(std::span<const double> exponent, double gamma) {
    require(gamma > 0, ErrorKind::invalid_argument, "gamma must be positive");
    double lo = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < exponent.size(); ++i) {
        if (!std::isfinite(exponent[i]))
            fail(ErrorKind::numeric_failure, "non-finite update exponent at index " + std::to_string(i));
        lo = std::min(lo, exponent[i]);
    }
    std::vector<double> mu(exponent.size());
    double total = 0.0;
    for (std::size_t i = 0; i < exponent.size(); ++i) {
        mu[i] = std::exp(-(exponent[i] - lo) / gamma);
        total += mu[i];
    }
    for (double& v : mu) v /= total;
    return mu;
}

std::vector<double> clamped_log_mass(std::span<const double> mu, const Matrix& C, double eps_mass) {
    auto m = cluster_mass(mu, C);
    for (double& v : m) v = std::log(std::max(v, eps_mass));
    return m;
}

Membership fixed_point_update(const Membership& mu_prev, const Matrix& C, const Matrix& D, const Matrix& F,
                              const Hyperparams& hp) {
    check_problem_shapes(C, D, F);
    require(hp.gamma > 0, ErrorKind::invalid_argument, "gamma must be positive");
    require(mu_prev.mu.size() == C.rows(), ErrorKind::invalid_argument, "mu length does not match the pool size");
    check_simplex(mu_prev.mu, 1e-6);

    Membership next;
    next.mu = gibbs_normalize(update_exponent(clamped_log_mass(mu_prev.mu, C, hp.eps_mass), C, D, F, hp), hp.gamma);
    next.tau = mu_prev.tau + 1;
    next.final_l1_delta = l1_distance(next.mu, mu_prev.mu);
    next.converged = next.final_l1_delta < hp.eps_fp;
    return next;
}

double effective_relaxation(const Hyperparams& hp) {
    if (hp.fp_relaxation > 0.0) return hp.fp_relaxation;
    return hp.gamma / (hp.gamma + hp.alpha);
}

// Log cluster mass of gibbs_normalize(exponent) computed in the log domain,
// so a cluster whose mass underflows keeps its true log value. Clusters with
// no member fall back to log eps_mass.
static std::vector<double> exact_log_mass(std::span<const double> exponent, const Matrix& C, double gamma,
                                          double eps_mass) {
    const std::size_t n = C.rows(), K = C.cols();
    double lo = std::numeric_limits<double>::infinity();
    for (double e : exponent) lo = std::min(lo, e);
    std::vector<double> s(n);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        s[i] = -(exponent[i] - lo) / gamma;
        total += std::exp(s[i]);
    }
    const double log_total = std::log(total);
    std::vector<double> out(K, std::log(eps_mass));
    for (std::size_t k = 0; k < K; ++k) {
        double top = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < n; ++i)
            if (C(i, k) != 0.0) top = std::max(top, s[i]);
        if (!std::isfinite(top)) continue;
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            if (C(i, k) != 0.0) sum += C(i, k) * std::exp(s[i] - top);
        out[k] = top + std::log(sum) - log_total;
    }
    return out;
}

std::pair<Membership, SolverReport> solve(const Matrix& C, const Matrix& D, const Matrix& F, const Hyperparams& hp,
                                          std::uint64_t seed) {
    check_problem_shapes(C, D, F);
    require(hp.gamma > 0, ErrorKind::invalid_argument, "gamma must be positive");
    const std::size_t n = C.rows();

    Rng rng(seed);
    std::vector<double> mu(n);
    double total = 0.0;
    for (double& v : mu) {
        v = rng.uniform_pos();
        total += v;
    }
    for (double& v : mu) v /= total;

    SolverReport report;
    report.objective_trace.push_back(objective(mu, C, D, F, hp));
    report.l1_delta_trace.push_back(std::numeric_limits<double>::quiet_NaN());

    const double w = effective_relaxation(hp);
    auto log_mass = clamped_log_mass(mu, C, hp.eps_mass);

    Membership out;
    std::size_t tau = 0;
    double delta = std::numeric_limits<double>::infinity();
    while (tau < hp.max_fp_iter) {
        const auto exponent = update_exponent(log_mass, C, D, F, hp);
        auto next = gibbs_normalize(exponent, hp.gamma);
        delta = l1_distance(next, mu);
        mu = std::move(next);
        ++tau;
        report.objective_trace.push_back(objective(mu, C, D, F, hp));
        report.l1_delta_trace.push_back(delta);
        if (delta < hp.eps_fp) break;

        const auto observed = exact_log_mass(exponent, C, hp.gamma, hp.eps_mass);
        for (std::size_t k = 0; k < log_mass.size(); ++k) log_mass[k] = (1.0 - w) * log_mass[k] + w * observed[k];
    }
    out.mu = std::move(mu);
    out.tau = tau;
    out.final_l1_delta = delta;
    out.converged = delta < hp.eps_fp;
    return {std::move(out), std::move(report)};
}

std::vector<std::size_t> select_top_B(std::span<const double> mu, const std::vector<bool>& labeled_mask,
                                      std::size_t B) {
    require(labeled_mask.size() == mu.size(), ErrorKind::invalid_argument, "labeled mask length mismatch");
    std::vector<std::size_t> candidates;
    for (std::size_t i = 0; i < mu.size(); ++i)
        if (!labeled_mask[i]) candidates.push_back(i);
    require(!candidates.empty(), ErrorKind::invalid_state, "every sample is already labeled");
    const std::size_t take = std::min(B, candidates.size());
    std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(take), candidates.end(),
                      [&](std::size_t a, std::size_t b) { return mu[a] > mu[b] || (mu[a] == mu[b] && a < b); });
    candidates.resize(take);
    return candidates;
}

void write_solver_report_csv(const SolverReport& report, std::ostream& out) {
    out << "tau,objective,l1_delta\n";
    char buf[96];
    for (std::size_t j = 0; j < report.objective_trace.size(); ++j) {
        const double delta = report.l1_delta_trace[j];
        if (std::isnan(delta))
            std::snprintf(buf, sizeof buf, "%zu,%.17g,\n", j, report.objective_trace[j]);
        else
            std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g\n", j, report.objective_trace[j], delta);
        out << buf;
    }
}

}  // namespace frugal
