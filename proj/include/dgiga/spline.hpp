#pragma once

#include <functional>
#include <span>
#include <vector>

namespace dgiga {

/// Open knot vector on [0,1] for a univariate B-spline basis of fixed degree.
///
/// Invariants enforced at construction: knots non-decreasing, endpoint
/// multiplicity exactly degree+1, interior multiplicity <= degree, and at
/// least degree+1 basis functions.
struct KnotVector {
    int degree = 0;
    std::vector<double> knots;

    KnotVector() = default;
    KnotVector(int degree, std::vector<double> knots);

    /// Uniform open knot vector with `elements` equal spans on [0,1].
    static KnotVector uniform_open(int degree, int elements);

    int num_basis() const { return static_cast<int>(knots.size()) - degree - 1; }
    const std::vector<double>& breakpoints() const { return breaks_; }
    int num_elements() const { return static_cast<int>(breaks_.size()) - 1; }
    double element_start(int e) const { return breaks_[e]; }
    double element_end(int e) const { return breaks_[e + 1]; }

    /// Knot vector with the midpoint of every nonempty span inserted once.
    KnotVector refined_dyadic() const;

    /// Greville abscissa of basis function j.
    double greville(int j) const;

private:
    std::vector<double> breaks_;
};

/// Index i such that knots[i] <= xhat < knots[i+1]; xhat = 1 clamps to the
/// last nonempty span. Throws std::domain_error outside [0,1].
int find_span(const KnotVector& kv, double xhat);

/// Nonzero basis values and derivatives at one point.
/// Row r of `data` holds the r-th derivatives of the degree+1 basis
/// functions with global indices first..first+degree.
struct BasisDerivs {
    int first = 0;
    int count = 0;
    int nderiv = 0;
    std::vector<double> data; // (nderiv+1) x count, row-major

    double value(int i) const { return data[i]; }
    double deriv(int order, int i) const { return data[order * count + i]; }
};

/// Cox-de Boor evaluation with derivatives up to order nderiv (<= 2).
BasisDerivs eval_basis(const KnotVector& kv, double xhat, int nderiv);

/// d-variate tensor-product B-spline space, same degree on every axis.
struct TensorSplineSpace {
    std::vector<KnotVector> axes;

    TensorSplineSpace() = default;
    explicit TensorSplineSpace(std::vector<KnotVector> axes);

    int dim() const { return static_cast<int>(axes.size()); }
    int degree() const { return axes[0].degree; }
    int total_dim() const;
    int total_elements() const;

    int basis_index(std::span<const int> j) const;
    int element_index(std::span<const int> e) const;
    void element_multi_index(int flat, std::span<int> e) const;

    /// Parametric box of micro-element `flat` as per-axis [lo, hi].
    void element_box(int flat, std::span<double> lo, std::span<double> hi) const;

    /// Max micro-element diameter (the parametric mesh size h).
    double mesh_size() const;

    /// Max element edge / min element edge over all axes and spans.
    double quasi_uniformity_ratio() const;
};

/// Basis values (and optionally parametric gradients) at one parametric point.
struct TensorBasisEval {
    std::vector<int> indices;    // (degree+1)^d global flat indices
    std::vector<double> values;  // same length
    std::vector<double> grads;   // d per entry, [p*d + axis]; empty if nderiv = 0
};

TensorBasisEval eval_tensor_basis(const TensorSplineSpace& space,
                                  std::span<const double> xhat, int nderiv);

/// Coefficient vector over a TensorSplineSpace; `components` values per
/// basis function (1 for scalar fields, d for geometry control points).
struct SplineCoefficients {
    int components = 1;
    std::vector<double> values;
};

double eval_spline_value(const TensorSplineSpace& space, std::span<const double> coeffs,
                         std::span<const double> xhat);

/// Value and parametric gradient of a scalar spline field.
void eval_spline_value_grad(const TensorSplineSpace& space, std::span<const double> coeffs,
                            std::span<const double> xhat, double& value,
                            std::span<double> grad);

/// Local quasi-interpolant onto `space`: a projector built from per-axis
/// dual functionals (least-squares fit over each basis function's knot-span
/// support). Coefficient j depends on f only inside supp B_j.
SplineCoefficients quasi_interpolate(const TensorSplineSpace& space,
                                     const std::function<double(std::span<const double>)>& f);

} // namespace dgiga
