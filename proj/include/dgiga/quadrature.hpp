#pragma once

#include "dgiga/geometry.hpp"
#include "dgiga/spline.hpp"

#include <array>
#include <vector>

namespace dgiga {

/// Gauss-Legendre rule on the reference interval [0,1]; weights sum to 1
/// and an n-point rule is exact for polynomials of degree <= 2n-1.
struct QuadratureRule {
    std::vector<double> points;
    std::vector<double> weights;
};

QuadratureRule gauss_rule(int n);

/// Tensor Gauss points of one parametric micro-element; weights carry the
/// parametric measure (they sum to |E_m|).
struct ElementQuadrature {
    std::vector<double> points;  // d per point
    std::vector<double> weights;
};

ElementQuadrature element_quadrature(const TensorSplineSpace& space, int element_index,
                                     int n_per_axis);

/// One cell of the merged face mesh, in left-face parametric coordinates.
/// Tagged with the flat index of the adjacent volume micro-element on each
/// side.
struct InterfaceCell {
    std::array<double, 2> lo{};
    std::array<double, 2> hi{};
    int left_element = -1;
    int right_element = -1;
};

/// Partition of an interface into cells whose boundaries are the union of
/// both sides' face-trace breakpoints, so no cell straddles a knot line of
/// either mesh.
struct InterfaceSegmentation {
    InterfaceFace face;
    int face_dim = 1;
    std::vector<InterfaceCell> cells;
};

InterfaceSegmentation merge_interface(const InterfaceFace& face,
                                      const TensorSplineSpace& left_space,
                                      const TensorSplineSpace& right_space);

/// Quadrature points of a face, expressed in both sides' volumetric
/// parametric coordinates. Weights are parametric face measures in the
/// left face chart; the physical surface factor is applied at assembly.
struct FaceQuadrature {
    int dim = 2;                     // volume dimension d
    std::vector<double> left_xhat;   // d per point
    std::vector<double> right_xhat;  // d per point; empty for boundary faces
    std::vector<double> face_coords; // (d-1) per point, left face chart
    std::vector<double> weights;
};

FaceQuadrature face_quadrature(const InterfaceSegmentation& seg, int n_per_axis);

/// Face quadrature for a boundary face, segmented by the patch's own
/// face-trace breakpoints.
FaceQuadrature boundary_face_quadrature(const TensorSplineSpace& space, const FaceSelector& face,
                                        int n_per_axis);

} // namespace dgiga
