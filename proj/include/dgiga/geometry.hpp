#pragma once

#include "dgiga/spline.hpp"

#include <array>
#include <span>
#include <vector>

namespace dgiga {

using Vec3 = std::array<double, 3>;

/// One face of the parametric cube: xhat[axis] = side (side 0 or 1).
struct FaceSelector {
    int axis = 0;
    int side = 0;
};

/// Axis-permutation-with-flips between the two parametric coordinate
/// systems of a shared face. Maps left-face coords to right-face coords:
/// s[perm[j]] = flip[j] ? 1 - t[j] : t[j].
struct FaceOrientation {
    std::array<int, 2> perm{0, 1};
    std::array<bool, 2> flip{false, false};
};

struct InterfaceFace {
    int left_patch = 0;
    int right_patch = 0;
    FaceSelector left_face;
    FaceSelector right_face;
    FaceOrientation orientation;
};

struct BoundaryFace {
    int patch = 0;
    FaceSelector face;
};

/// Spline parametrization of one patch: x = sum_j C_j B_j(xhat).
struct GeometryPatch {
    int patch_id = 0;
    TensorSplineSpace space;
    std::vector<double> control_points; // d values per basis function

    int dim() const { return space.dim(); }
};

/// Multi-patch decomposition with per-patch diffusion coefficient and a
/// separately refinable solution space per patch (geometry stays exact
/// under refinement).
struct MultiPatchDomain {
    std::vector<GeometryPatch> patches;
    std::vector<TensorSplineSpace> solution_spaces;
    std::vector<InterfaceFace> interfaces;
    std::vector<BoundaryFace> boundary_faces;
    std::vector<double> alpha;

    int dim() const { return patches.empty() ? 0 : patches[0].dim(); }
    int num_patches() const { return static_cast<int>(patches.size()); }

    /// Bounding-box diagonal of all control nets.
    double diameter() const;
};

/// The varying parametric axes of a face, in increasing order.
std::array<int, 2> face_axes(const FaceSelector& face, int d);

/// Embed face coordinates (d-1 values) into the parametric cube.
Vec3 face_to_volume(const FaceSelector& face, std::span<const double> t, int d);

/// Apply the orientation map to left-face coordinates.
std::array<double, 2> map_face_coords(const FaceOrientation& o, std::span<const double> t,
                                      int face_dim);
std::array<double, 2> inverse_face_coords(const FaceOrientation& o, std::span<const double> s,
                                          int face_dim);

Vec3 map_point(const GeometryPatch& patch, std::span<const double> xhat);

/// Jacobian J[r][c] = d x_r / d xhat_c (row-major d x d), its determinant,
/// and inverse-transpose. Throws on |det| < 1e-14.
struct Jacobian {
    std::array<double, 9> j{};
    std::array<double, 9> jinv_t{};
    double det = 0.0;
};

Jacobian jacobian(const GeometryPatch& patch, std::span<const double> xhat);

/// Unit normal and surface measure factor at a face point (Nanson formula:
/// factor = |det J| * |J^-T N|). Interface normals point from left_patch
/// into right_patch; boundary normals point out of the domain.
struct FaceNormal {
    Vec3 normal{};
    double surface_factor = 0.0;
};

FaceNormal face_normal(const MultiPatchDomain& domain, const InterfaceFace& face,
                       std::span<const double> t_face);
FaceNormal face_normal(const MultiPatchDomain& domain, const BoundaryFace& face,
                       std::span<const double> t_face);

struct InterfaceCheck {
    bool pass = false;
    double max_mismatch = 0.0;
    std::array<double, 2> worst_t{};
};

/// Samples both parametrizations at orientation-mapped points and compares
/// the physical images; pass iff max distance < 1e-10 * domain diameter.
InterfaceCheck verify_interface(const MultiPatchDomain& domain, const InterfaceFace& face,
                                int samples);

/// New domain with every solution space's breakpoints halved; geometry is
/// untouched.
MultiPatchDomain refine_dyadic(const MultiPatchDomain& domain);

/// Structural and geometric validation: positive alpha, no face claimed
/// twice, Jacobian bounds on a sample grid, pairwise non-overlap spot
/// checks, and verify_interface on every declared interface.
/// Throws config_error with a distinct diagnostic per failure mode.
void validate_domain(const MultiPatchDomain& domain);

} // namespace dgiga
