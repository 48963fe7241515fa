#pragma once

#include "dgiga/assembly.hpp"
#include "dgiga/fields.hpp"
#include "dgiga/geometry.hpp"

#include <span>
#include <string>
#include <vector>

namespace dgiga {

/// Broken dG-norm of the error u - u_h:
///   sum_i alpha_i ||grad(u - u_h)||^2_{L2(Omega_i)}
/// + sum_F (mu alpha_i/h_i + mu alpha_j/h_j) ||[u - u_h]||^2_{L2(F)},
/// with one-sided traces against the Dirichlet data on boundary faces.
/// Quadrature runs at the data order (k+2 by default).
double dg_norm_error(const MultiPatchDomain& domain, std::span<const TensorSplineSpace> spaces,
                     const DofMap& dofmap, std::span<const double> coeffs,
                     const ScalarField& u_exact, const GradientField& grad_u_exact,
                     const DGConfig& config);

double l2_error(const MultiPatchDomain& domain, std::span<const TensorSplineSpace> spaces,
                const DofMap& dofmap, std::span<const double> coeffs,
                const ScalarField& u_exact, const DGConfig& config);

/// rate_i = log2(errors[i-1] / errors[i]); requires positive errors.
std::vector<double> observed_rates(std::span<const double> errors);

/// Theoretical dG-norm rate: min(l, k+1) - 1 for p = 2, otherwise
/// delta(p,d) = min(l, k+1) + d/2 - d/p - 1. Throws std::domain_error when
/// p lies outside (2d/(d+2(l-1)), 2].
double predicted_rate(int k, int l, double p, int d);

struct ErrorRecord {
    int level = 0;
    double h_max = 0.0;
    long dofs = 0;
    double dg_error = 0.0;
    double l2_error = 0.0;
};

struct ConvergenceReport {
    std::string problem;
    std::string scheme;
    int degree = 0;
    int dim = 0;
    double mu = 0.0;
    double predicted = 0.0;
    bool complete = true;
    std::vector<ErrorRecord> records;

    std::vector<double> dg_rates() const;
    std::vector<double> l2_rates() const;
};

} // namespace dgiga
