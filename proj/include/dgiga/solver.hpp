#pragma once

#include "dgiga/assembly.hpp"

#include <span>
#include <vector>

namespace dgiga {

struct SolveReport {
    int iterations = 0;
    double relative_residual = 0.0; // recomputed from scratch after the solve
    bool converged = false;
    bool breakdown = false;
    double wall_time_s = 0.0;
};

struct SolveResult {
    std::vector<double> x;
    SolveReport report;
};

struct SolverOptions {
    double tol = 1e-10;
    int max_iter = 0; // <= 0 selects 10 * dofs
    bool jacobi = true;
};

/// Preconditioned conjugate gradients for symmetric systems (SIP). Throws
/// std::invalid_argument if the matrix fails the symmetry precheck.
SolveResult solve_spd(const CsrMatrix& matrix, std::span<const double> rhs,
                      const SolverOptions& opts = {});
SolveResult solve_spd(const DGSystem& system, const SolverOptions& opts = {});

/// Preconditioned BiCGStab for general systems (IIP). Breakdown or
/// non-convergence is reported, never silently ignored.
SolveResult solve_general(const CsrMatrix& matrix, std::span<const double> rhs,
                          const SolverOptions& opts = {});
SolveResult solve_general(const DGSystem& system, const SolverOptions& opts = {});

} // namespace dgiga
