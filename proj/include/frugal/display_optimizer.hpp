#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "frugal/types.hpp"

namespace frugal {

// Selection distribution over the pool.
struct Membership {
    std::vector<double> mu;
    std::size_t tau = 0;
    bool converged = false;
    double final_l1_delta = 0.0;

    bool operator==(const Membership&) const = default;
};

struct SolverReport {
    // Entry j describes mu^(j), j = 0..tau. l1_delta_trace[0] is NaN since
    // the initial point has no predecessor.
    std::vector<double> objective_trace;
    std::vector<double> l1_delta_trace;
};

struct ObjectiveTerms {
    double representativity = 0.0;  // sum_i mu_i D_{i,cluster(i)}
    double diversity = 0.0;         // sum_k m_k log m_k with m = C'mu
    double ambiguity = 0.0;         // sum_i mu_i sum_c F_ic log F_ic
    double cardinality = 0.0;       // sum_i mu_i log mu_i
    double total = 0.0;             // weighted sum
};

// Checks the shapes of C (n x K), D (n x K) and F (n x nc).
void check_problem_shapes(const Matrix& C, const Matrix& D, const Matrix& F);

// Throws invalid_argument when mu is off the simplex by more than 1e-6.
ObjectiveTerms objective_terms(std::span<const double> mu, const Matrix& C, const Matrix& D, const Matrix& F,
                               const Hyperparams& hp);

double objective(std::span<const double> mu, const Matrix& C, const Matrix& D, const Matrix& F,
                 const Hyperparams& hp);

// Gradient of the objective at a strictly positive mu (off-simplex allowed).
std::vector<double> objective_gradient(std::span<const double> mu, const Matrix& C, const Matrix& D,
                                       const Matrix& F, const Hyperparams& hp);

// Per-sample exponent for given log cluster masses:
//   rep_weight * (D o C) 1_K + alpha * C (log_mass + 1_K) + beta * (F o log F) 1_nc
std::vector<double> update_exponent(std::span<const double> log_mass, const Matrix& C, const Matrix& D,
                                    const Matrix& F, const Hyperparams& hp);

// exp(-e / gamma) normalized to the simplex, shifted by min(e) first.
// Throws numeric_failure naming the first non-finite exponent.
std::vector<double> gibbs_normalize(std::span<const double> exponent, double gamma);

// log(max(C'mu, eps_mass)).
std::vector<double> clamped_log_mass(std::span<const double> mu, const Matrix& C, double eps_mass);

// One application of the closed-form update at mu_prev.
Membership fixed_point_update(const Membership& mu_prev, const Matrix& C, const Matrix& D, const Matrix& F,
                              const Hyperparams& hp);

// Relaxation applied to the log cluster masses inside solve().
double effective_relaxation(const Hyperparams& hp);

// Iterates the update from a seeded random start until the L1 change drops
// below eps_fp or max_fp_iter is reached. The log cluster mass fed to each
// update is relaxed: l <- (1 - w) l + w log(C'mu), w = effective_relaxation,
// with log(C'mu) taken in the log domain rather than through the eps_mass
// clamp so that underflowed clusters still pull their mass back.
// The mass map has gain -alpha/gamma in log space, so the plain iteration
// (w = 1) oscillates once alpha >= gamma; w = gamma/(gamma+alpha) cancels it.
std::pair<Membership, SolverReport> solve(const Matrix& C, const Matrix& D, const Matrix& F, const Hyperparams& hp,
                                          std::uint64_t seed);

// Indices of the B largest mu among unlabeled samples, in rank order
// (ties to the smallest index). Throws invalid_state if all are labeled.
std::vector<std::size_t> select_top_B(std::span<const double> mu, const std::vector<bool>& labeled_mask,
                                      std::size_t B);

// CSV with header "tau,objective,l1_delta".
void write_solver_report_csv(const SolverReport& report, std::ostream& out);

}  // namespace frugal
