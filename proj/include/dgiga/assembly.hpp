#pragma once

#include "dgiga/fields.hpp"
#include "dgiga/geometry.hpp"
#include "dgiga/quadrature.hpp"
#include "dgiga/spline.hpp"

#include <span>
#include <vector>

namespace dgiga {

enum class Scheme { IIP, SIP };

struct DGConfig {
    Scheme scheme = Scheme::SIP;
    double mu = 0.0;           // <= 0 selects the default 2(k+1)(k+d)
    int quadrature_order = 0;  // points per axis for bilinear forms; <= 0 selects k+1

    double penalty_mu(int degree, int dim) const {
        return mu > 0.0 ? mu : 2.0 * (degree + 1) * (degree + dim);
    }
    int bilinear_points(int degree) const {
        return quadrature_order > 0 ? quadrature_order : degree + 1;
    }
    // error norms and data (f, u_D) integration run one order higher
    int data_points(int degree) const { return bilinear_points(degree) + 1; }
};

/// Per-patch blocks of the global discontinuous space: patch i owns the
/// contiguous index range [offsets[i], offsets[i+1]).
struct DofMap {
    std::vector<int> offsets;
    int total = 0;

    static DofMap build(std::span<const TensorSplineSpace> spaces);
    int global(int patch, int local) const { return offsets[patch] + local; }
    int patch_dofs(int patch) const { return offsets[patch + 1] - offsets[patch]; }
};

struct Triplet {
    int row = 0;
    int col = 0;
    double value = 0.0;
};

/// Compressed sparse rows with sorted column indices. Built from a triplet
/// buffer by a stable sort and in-order summation, so repeated assembly of
/// the same problem is bit-identical.
struct CsrMatrix {
    int rows = 0;
    std::vector<int> row_ptr;
    std::vector<int> col_idx;
    std::vector<double> values;

    static CsrMatrix from_triplets(int rows, std::vector<Triplet> triplets);

    void apply(std::span<const double> x, std::span<double> y) const;
    CsrMatrix transposed() const;
    double diagonal(int i) const;
};

/// ||A - A^T||_F / ||A||_F.
double symmetry_defect(const CsrMatrix& a);

struct DGSystem {
    CsrMatrix matrix;
    std::vector<double> rhs;
    DofMap dofmap;
};

std::vector<InterfaceSegmentation> build_segmentations(const MultiPatchDomain& domain);

/// Volume terms sum_i alpha_i (grad u, grad phi)_{Omega_i}.
void assemble_volume(const MultiPatchDomain& domain, std::span<const TensorSplineSpace> spaces,
                     const DGConfig& config, const DofMap& dofmap,
                     std::vector<Triplet>& triplets);

/// Interface and boundary consistency fluxes -sum_F int {alpha grad u} . n [phi] ds;
/// SIP adds the transposed term. Boundary faces use the one-sided traces.
void assemble_interface(const MultiPatchDomain& domain, std::span<const TensorSplineSpace> spaces,
                        const DGConfig& config, const DofMap& dofmap,
                        std::span<const InterfaceSegmentation> segmentations,
                        std::vector<Triplet>& triplets);

/// Jump penalties with weight mu alpha_i / h_i + mu alpha_j / h_j (one-sided
/// on the boundary).
void assemble_penalty(const MultiPatchDomain& domain, std::span<const TensorSplineSpace> spaces,
                      const DGConfig& config, const DofMap& dofmap,
                      std::span<const InterfaceSegmentation> segmentations,
                      std::vector<Triplet>& triplets);

/// Load vector plus Dirichlet penalty data term; SIP adds the Nitsche
/// consistency term -int alpha (grad phi . n) u_D ds.
void assemble_rhs(const MultiPatchDomain& domain, std::span<const TensorSplineSpace> spaces,
                  const DGConfig& config, const DofMap& dofmap, const ScalarField& f,
                  const ScalarField& u_dirichlet, std::span<double> rhs);

/// Full system. SIP symmetry is validated after compression.
DGSystem assemble(const MultiPatchDomain& domain, std::span<const TensorSplineSpace> spaces,
                  const DGConfig& config, const ScalarField& f, const ScalarField& u_dirichlet);

} // namespace dgiga
