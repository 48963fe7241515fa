#include "dgiga/assembly.hpp"

#include "dgiga/errors.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dgiga {

DofMap DofMap::build(std::span<const TensorSplineSpace> spaces) {
    DofMap map;
    map.offsets.resize(spaces.size() + 1, 0);
    for (std::size_t i = 0; i < spaces.size(); ++i)
        map.offsets[i + 1] = map.offsets[i] + spaces[i].total_dim();
    map.total = map.offsets.back();
    return map;
}

CsrMatrix CsrMatrix::from_triplets(int rows, std::vector<Triplet> triplets) {
    std::stable_sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });

    CsrMatrix m;
    m.rows = rows;
    m.row_ptr.assign(rows + 1, 0);
    m.col_idx.reserve(triplets.size());
    m.values.reserve(triplets.size());

    for (std::size_t i = 0; i < triplets.size();) {
        const int r = triplets[i].row;
        const int c = triplets[i].col;
        double v = 0.0;
        while (i < triplets.size() && triplets[i].row == r && triplets[i].col == c)
            v += triplets[i++].value;
        m.col_idx.push_back(c);
        m.values.push_back(v);
        ++m.row_ptr[r + 1];
    }
    for (int r = 0; r < rows; ++r) m.row_ptr[r + 1] += m.row_ptr[r];
    return m;
}

void CsrMatrix::apply(std::span<const double> x, std::span<double> y) const {
    for (int r = 0; r < rows; ++r) {
        double s = 0.0;
        for (int p = row_ptr[r]; p < row_ptr[r + 1]; ++p) s += values[p] * x[col_idx[p]];
        y[r] = s;
    }
}

CsrMatrix CsrMatrix::transposed() const {
    CsrMatrix t;
    t.rows = rows;
    t.row_ptr.assign(rows + 1, 0);
    t.col_idx.resize(col_idx.size());
    t.values.resize(values.size());
    for (int c : col_idx) ++t.row_ptr[c + 1];
    for (int r = 0; r < rows; ++r) t.row_ptr[r + 1] += t.row_ptr[r];
    std::vector<int> next(t.row_ptr.begin(), t.row_ptr.end() - 1);
    for (int r = 0; r < rows; ++r) {
        for (int p = row_ptr[r]; p < row_ptr[r + 1]; ++p) {
            const int dst = next[col_idx[p]]++;
            t.col_idx[dst] = r;
            t.values[dst] = values[p];
        }
    }
    return t;
}

double CsrMatrix::diagonal(int i) const {
    const auto begin = col_idx.begin() + row_ptr[i];
    const auto end = col_idx.begin() + row_ptr[i + 1];
    const auto it = std::lower_bound(begin, end, i);
    if (it == end || *it != i) return 0.0;
    return values[row_ptr[i] + (it - begin)];
}

double symmetry_defect(const CsrMatrix& a) {
    const CsrMatrix t = a.transposed();
    double diff2 = 0.0, norm2 = 0.0;
    for (int r = 0; r < a.rows; ++r) {
        int pa = a.row_ptr[r], pt = t.row_ptr[r];
        const int ea = a.row_ptr[r + 1], et = t.row_ptr[r + 1];
        while (pa < ea || pt < et) {
            const int ca = pa < ea ? a.col_idx[pa] : a.rows;
            const int ct = pt < et ? t.col_idx[pt] : a.rows;
            double va = 0.0, vt = 0.0;
            if (ca <= ct) va = a.values[pa++];
            if (ct <= ca) vt = t.values[pt++];
            diff2 += (va - vt) * (va - vt);
            norm2 += va * va;
        }
    }
    return norm2 > 0.0 ? std::sqrt(diff2 / norm2) : 0.0;
}

std::vector<InterfaceSegmentation> build_segmentations(const MultiPatchDomain& domain) {
    std::vector<InterfaceSegmentation> segs;
    segs.reserve(domain.interfaces.size());
    for (const auto& face : domain.interfaces)
        segs.push_back(merge_interface(face, domain.solution_spaces[face.left_patch],
                                       domain.solution_spaces[face.right_patch]));
    return segs;
}

namespace {

void physical_gradient(const Jacobian& jac, const double* gparam, int d, double* gphys) {
    for (int r = 0; r < d; ++r) {
        double s = 0.0;
        for (int c = 0; c < d; ++c) s += jac.jinv_t[r * d + c] * gparam[c];
        gphys[r] = s;
    }
}

// Traces of one side's basis functions at a face quadrature point.
struct SideTrace {
    std::vector<int> global;
    std::vector<double> value;
    std::vector<double> grad_n; // grad B . n (physical)
};

SideTrace side_trace(const GeometryPatch& patch, const TensorSplineSpace& space, int dof_offset,
                     std::span<const double> xhat, const Vec3& normal) {
    const int d = space.dim();
    const Jacobian jac = jacobian(patch, xhat);
    const auto tb = eval_tensor_basis(space, xhat, 1);
    const std::size_t n = tb.indices.size();

    SideTrace out;
    out.global.resize(n);
    out.value.resize(n);
    out.grad_n.resize(n);
    double gp[3];
    for (std::size_t p = 0; p < n; ++p) {
        out.global[p] = dof_offset + tb.indices[p];
        out.value[p] = tb.values[p];
        physical_gradient(jac, &tb.grads[p * d], d, gp);
        double s = 0.0;
        for (int a = 0; a < d; ++a) s += gp[a] * normal[a];
        out.grad_n[p] = s;
    }
    return out;
}

void dump_local(const std::vector<int>& rows, const std::vector<int>& cols,
                const std::vector<double>& local, std::vector<Triplet>& triplets) {
    const std::size_t nc = cols.size();
    for (std::size_t a = 0; a < rows.size(); ++a)
        for (std::size_t b = 0; b < nc; ++b) {
            const double v = local[a * nc + b];
            if (v != 0.0) triplets.push_back({rows[a], cols[b], v});
        }
}

} // namespace

void assemble_volume(const MultiPatchDomain& domain, std::span<const TensorSplineSpace> spaces,
                     const DGConfig& config, const DofMap& dofmap,
                     std::vector<Triplet>& triplets) {
    const int d = domain.dim();
    for (int i = 0; i < domain.num_patches(); ++i) {
        const auto& patch = domain.patches[i];
        const auto& space = spaces[i];
        const double alpha = domain.alpha[i];
        const int nq = config.bilinear_points(space.degree());

        for (int e = 0; e < space.total_elements(); ++e) {
            const ElementQuadrature quad = element_quadrature(space, e, nq);
            std::vector<int> dofs;
            std::vector<double> local;
            std::vector<double> gphys;

            for (std::size_t q = 0; q < quad.weights.size(); ++q) {
                const std::span<const double> xhat(&quad.points[q * d], d);
                const Jacobian jac = jacobian(patch, xhat);
                const auto tb = eval_tensor_basis(space, xhat, 1);
                const std::size_t n = tb.indices.size();
                if (dofs.empty()) {
                    dofs.resize(n);
                    for (std::size_t p = 0; p < n; ++p)
                        dofs[p] = dofmap.global(i, tb.indices[p]);
                    local.assign(n * n, 0.0);
                    gphys.resize(n * d);
                }
                for (std::size_t p = 0; p < n; ++p)
                    physical_gradient(jac, &tb.grads[p * d], d, &gphys[p * d]);
                const double w = alpha * quad.weights[q] * std::abs(jac.det);
                for (std::size_t a = 0; a < n; ++a)
                    for (std::size_t b = 0; b < n; ++b) {
                        double s = 0.0;
                        for (int c = 0; c < d; ++c) s += gphys[a * d + c] * gphys[b * d + c];
                        local[a * n + b] += w * s;
                    }
            }
            dump_local(dofs, dofs, local, triplets);
        }
    }
}

void assemble_interface(const MultiPatchDomain& domain, std::span<const TensorSplineSpace> spaces,
                        const DGConfig& config, const DofMap& dofmap,
                        std::span<const InterfaceSegmentation> segmentations,
                        std::vector<Triplet>& triplets) {
    const int d = domain.dim();
    const bool sip = config.scheme == Scheme::SIP;
    const int nq = config.bilinear_points(spaces[0].degree());

    // active basis sets change across segmentation cells, so local blocks
    // are accumulated and flushed per cell
    int per_cell = 1;
    for (int j = 0; j < d - 1; ++j) per_cell *= nq;

    for (const auto& seg : segmentations) {
        const auto& face = seg.face;
        const int li = face.left_patch, ri = face.right_patch;
        const double al = domain.alpha[li], ar = domain.alpha[ri];
        const FaceQuadrature quad = face_quadrature(seg, nq);

        for (std::size_t q0 = 0; q0 < quad.weights.size(); q0 += per_cell) {
            std::vector<int> dofs;
            std::vector<double> local;
            for (std::size_t q = q0; q < q0 + per_cell; ++q) {
                const std::span<const double> tf(&quad.face_coords[q * (d - 1)], d - 1);
                const FaceNormal fn = face_normal(domain, face, tf);
                const std::span<const double> xl(&quad.left_xhat[q * d], d);
                const std::span<const double> xr(&quad.right_xhat[q * d], d);
                const SideTrace left = side_trace(domain.patches[li], spaces[li],
                                                  dofmap.offsets[li], xl, fn.normal);
                const SideTrace right = side_trace(domain.patches[ri], spaces[ri],
                                                   dofmap.offsets[ri], xr, fn.normal);
                const std::size_t nl = left.global.size(), nr = right.global.size();
                const std::size_t n = nl + nr;
                if (dofs.empty()) {
                    dofs.resize(n);
                    for (std::size_t p = 0; p < nl; ++p) dofs[p] = left.global[p];
                    for (std::size_t p = 0; p < nr; ++p) dofs[nl + p] = right.global[p];
                    local.assign(n * n, 0.0);
                }
                const double w = quad.weights[q] * fn.surface_factor;
                // jump sign +1 on the left side, -1 on the right; averages carry 1/2
                auto value = [&](std::size_t p) {
                    return p < nl ? left.value[p] : -right.value[p - nl];
                };
                auto flux = [&](std::size_t p) {
                    return p < nl ? 0.5 * al * left.grad_n[p] : 0.5 * ar * right.grad_n[p - nl];
                };
                for (std::size_t a = 0; a < n; ++a)
                    for (std::size_t b = 0; b < n; ++b) {
                        double v = -flux(b) * value(a);
                        if (sip) v -= flux(a) * value(b);
                        local[a * n + b] += w * v;
                    }
            }
            dump_local(dofs, dofs, local, triplets);
        }
    }

    // boundary faces: one-sided traces, full alpha, outward normal
    for (const auto& bf : domain.boundary_faces) {
        const int i = bf.patch;
        const double alpha = domain.alpha[i];
        const FaceQuadrature quad = boundary_face_quadrature(spaces[i], bf.face, nq);

        for (std::size_t q0 = 0; q0 < quad.weights.size(); q0 += per_cell) {
            std::vector<int> dofs;
            std::vector<double> local;
            for (std::size_t q = q0; q < q0 + per_cell; ++q) {
                const std::span<const double> tf(&quad.face_coords[q * (d - 1)], d - 1);
                const FaceNormal fn = face_normal(domain, bf, tf);
                const std::span<const double> xh(&quad.left_xhat[q * d], d);
                const SideTrace tr =
                    side_trace(domain.patches[i], spaces[i], dofmap.offsets[i], xh, fn.normal);
                const std::size_t n = tr.global.size();
                if (dofs.empty()) {
                    dofs = tr.global;
                    local.assign(n * n, 0.0);
                }
                const double w = quad.weights[q] * fn.surface_factor;
                for (std::size_t a = 0; a < n; ++a)
                    for (std::size_t b = 0; b < n; ++b) {
                        double v = -alpha * tr.grad_n[b] * tr.value[a];
                        if (sip) v -= alpha * tr.grad_n[a] * tr.value[b];
                        local[a * n + b] += w * v;
                    }
            }
            dump_local(dofs, dofs, local, triplets);
        }
    }
}

void assemble_penalty(const MultiPatchDomain& domain, std::span<const TensorSplineSpace> spaces,
                      const DGConfig& config, const DofMap& dofmap,
                      std::span<const InterfaceSegmentation> segmentations,
                      std::vector<Triplet>& triplets) {
    const int d = domain.dim();
    const int k = spaces[0].degree();
    const double mu = config.penalty_mu(k, d);
    const int nq = config.bilinear_points(k);

    int per_cell = 1;
    for (int j = 0; j < d - 1; ++j) per_cell *= nq;

    for (const auto& seg : segmentations) {
        const auto& face = seg.face;
        const int li = face.left_patch, ri = face.right_patch;
        const double rho = mu * domain.alpha[li] / spaces[li].mesh_size() +
                           mu * domain.alpha[ri] / spaces[ri].mesh_size();
        const FaceQuadrature quad = face_quadrature(seg, nq);

        for (std::size_t q0 = 0; q0 < quad.weights.size(); q0 += per_cell) {
            std::vector<int> dofs;
            std::vector<double> local;
            for (std::size_t q = q0; q < q0 + per_cell; ++q) {
                const std::span<const double> tf(&quad.face_coords[q * (d - 1)], d - 1);
                const FaceNormal fn = face_normal(domain, face, tf);
                const std::span<const double> xl(&quad.left_xhat[q * d], d);
                const std::span<const double> xr(&quad.right_xhat[q * d], d);
                const SideTrace left = side_trace(domain.patches[li], spaces[li],
                                                  dofmap.offsets[li], xl, fn.normal);
                const SideTrace right = side_trace(domain.patches[ri], spaces[ri],
                                                   dofmap.offsets[ri], xr, fn.normal);
                const std::size_t nl = left.global.size();
                const std::size_t n = nl + right.global.size();
                if (dofs.empty()) {
                    dofs.resize(n);
                    for (std::size_t p = 0; p < nl; ++p) dofs[p] = left.global[p];
                    for (std::size_t p = nl; p < n; ++p) dofs[p] = right.global[p - nl];
                    local.assign(n * n, 0.0);
                }
                auto value = [&](std::size_t p) {
                    return p < nl ? left.value[p] : -right.value[p - nl];
                };
                const double w = rho * quad.weights[q] * fn.surface_factor;
                for (std::size_t a = 0; a < n; ++a)
                    for (std::size_t b = 0; b < n; ++b)
                        local[a * n + b] += w * value(a) * value(b);
            }
            dump_local(dofs, dofs, local, triplets);
        }
    }

    for (const auto& bf : domain.boundary_faces) {
        const int i = bf.patch;
        const double rho = mu * domain.alpha[i] / spaces[i].mesh_size();
        const FaceQuadrature quad = boundary_face_quadrature(spaces[i], bf.face, nq);

        for (std::size_t q0 = 0; q0 < quad.weights.size(); q0 += per_cell) {
            std::vector<int> dofs;
            std::vector<double> local;
            for (std::size_t q = q0; q < q0 + per_cell; ++q) {
                const std::span<const double> tf(&quad.face_coords[q * (d - 1)], d - 1);
                const FaceNormal fn = face_normal(domain, bf, tf);
                const std::span<const double> xh(&quad.left_xhat[q * d], d);
                const SideTrace tr =
                    side_trace(domain.patches[i], spaces[i], dofmap.offsets[i], xh, fn.normal);
                const std::size_t n = tr.global.size();
                if (dofs.empty()) {
                    dofs = tr.global;
                    local.assign(n * n, 0.0);
                }
                const double w = rho * quad.weights[q] * fn.surface_factor;
                for (std::size_t a = 0; a < n; ++a)
                    for (std::size_t b = 0; b < n; ++b)
                        local[a * n + b] += w * tr.value[a] * tr.value[b];
            }
            dump_local(dofs, dofs, local, triplets);
        }
    }
}

void assemble_rhs(const MultiPatchDomain& domain, std::span<const TensorSplineSpace> spaces,
                  const DGConfig& config, const DofMap& dofmap, const ScalarField& f,
                  const ScalarField& u_dirichlet, std::span<double> rhs) {
    const int d = domain.dim();
    const int k = spaces[0].degree();
    const double mu = config.penalty_mu(k, d);
    const bool sip = config.scheme == Scheme::SIP;
    const int nq = config.data_points(k);

    for (int i = 0; i < domain.num_patches(); ++i) {
        const auto& patch = domain.patches[i];
        const auto& space = spaces[i];
        for (int e = 0; e < space.total_elements(); ++e) {
            const ElementQuadrature quad = element_quadrature(space, e, nq);
            for (std::size_t q = 0; q < quad.weights.size(); ++q) {
                const std::span<const double> xhat(&quad.points[q * d], d);
                const Jacobian jac = jacobian(patch, xhat);
                const Vec3 x = map_point(patch, xhat);
                const double fw =
                    f(std::span<const double>(x.data(), d)) * quad.weights[q] * std::abs(jac.det);
                const auto tb = eval_tensor_basis(space, xhat, 0);
                for (std::size_t p = 0; p < tb.indices.size(); ++p)
                    rhs[dofmap.global(i, tb.indices[p])] += fw * tb.values[p];
            }
        }
    }

    for (const auto& bf : domain.boundary_faces) {
        const int i = bf.patch;
        const double rho = mu * domain.alpha[i] / spaces[i].mesh_size();
        const FaceQuadrature quad = boundary_face_quadrature(spaces[i], bf.face, nq);
        for (std::size_t q = 0; q < quad.weights.size(); ++q) {
            const std::span<const double> tf(&quad.face_coords[q * (d - 1)], d - 1);
            const FaceNormal fn = face_normal(domain, bf, tf);
            const std::span<const double> xh(&quad.left_xhat[q * d], d);
            const SideTrace tr =
                side_trace(domain.patches[i], spaces[i], dofmap.offsets[i], xh, fn.normal);
            const Vec3 x = map_point(domain.patches[i], xh);
            const double ud = u_dirichlet(std::span<const double>(x.data(), d));
            const double w = quad.weights[q] * fn.surface_factor;
            for (std::size_t p = 0; p < tr.global.size(); ++p) {
                double v = rho * ud * tr.value[p];
                if (sip) v -= domain.alpha[i] * tr.grad_n[p] * ud;
                rhs[tr.global[p]] += w * v;
            }
        }
    }
}

DGSystem assemble(const MultiPatchDomain& domain, std::span<const TensorSplineSpace> spaces,
                  const DGConfig& config, const ScalarField& f, const ScalarField& u_dirichlet) {
    DGSystem sys;
    sys.dofmap = DofMap::build(spaces);
    const auto segs = build_segmentations(domain);

    std::vector<Triplet> triplets;
    assemble_volume(domain, spaces, config, sys.dofmap, triplets);
    assemble_interface(domain, spaces, config, sys.dofmap, segs, triplets);
    assemble_penalty(domain, spaces, config, sys.dofmap, segs, triplets);
    sys.matrix = CsrMatrix::from_triplets(sys.dofmap.total, std::move(triplets));

    sys.rhs.assign(sys.dofmap.total, 0.0);
    assemble_rhs(domain, spaces, config, sys.dofmap, f, u_dirichlet, sys.rhs);

    if (config.scheme == Scheme::SIP && symmetry_defect(sys.matrix) > 1e-12)
        throw std::logic_error("assemble: SIP matrix failed the symmetry check");
    return sys;
}

} // namespace dgiga
