#include "dgiga/geometry.hpp"

#include "dgiga/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace dgiga {

double MultiPatchDomain::diameter() const {
    double lo[3], hi[3];
    const int d = dim();
    for (int a = 0; a < d; ++a) {
        lo[a] = std::numeric_limits<double>::max();
        hi[a] = std::numeric_limits<double>::lowest();
    }
    for (const auto& p : patches) {
        const int n = p.space.total_dim();
        for (int j = 0; j < n; ++j)
            for (int a = 0; a < d; ++a) {
                lo[a] = std::min(lo[a], p.control_points[j * d + a]);
                hi[a] = std::max(hi[a], p.control_points[j * d + a]);
            }
    }
    double s = 0.0;
    for (int a = 0; a < d; ++a) s += (hi[a] - lo[a]) * (hi[a] - lo[a]);
    return std::sqrt(s);
}

std::array<int, 2> face_axes(const FaceSelector& face, int d) {
    std::array<int, 2> axes{-1, -1};
    int n = 0;
    for (int a = 0; a < d; ++a)
        if (a != face.axis) axes[n++] = a;
    return axes;
}

Vec3 face_to_volume(const FaceSelector& face, std::span<const double> t, int d) {
    Vec3 xhat{0.0, 0.0, 0.0};
    xhat[face.axis] = static_cast<double>(face.side);
    const auto axes = face_axes(face, d);
    for (int j = 0; j < d - 1; ++j) xhat[axes[j]] = t[j];
    return xhat;
}

std::array<double, 2> map_face_coords(const FaceOrientation& o, std::span<const double> t,
                                      int face_dim) {
    std::array<double, 2> s{0.0, 0.0};
    for (int j = 0; j < face_dim; ++j) s[o.perm[j]] = o.flip[j] ? 1.0 - t[j] : t[j];
    return s;
}

std::array<double, 2> inverse_face_coords(const FaceOrientation& o, std::span<const double> s,
                                          int face_dim) {
    std::array<double, 2> t{0.0, 0.0};
    for (int j = 0; j < face_dim; ++j) t[j] = o.flip[j] ? 1.0 - s[o.perm[j]] : s[o.perm[j]];
    return t;
}

Vec3 map_point(const GeometryPatch& patch, std::span<const double> xhat) {
    const int d = patch.dim();
    const auto tb = eval_tensor_basis(patch.space, xhat, 0);
    Vec3 x{0.0, 0.0, 0.0};
    for (std::size_t p = 0; p < tb.indices.size(); ++p) {
        const double* c = &patch.control_points[static_cast<std::size_t>(tb.indices[p]) * d];
        for (int a = 0; a < d; ++a) x[a] += c[a] * tb.values[p];
    }
    return x;
}

Jacobian jacobian(const GeometryPatch& patch, std::span<const double> xhat) {
    const int d = patch.dim();
    const auto tb = eval_tensor_basis(patch.space, xhat, 1);

    Jacobian jac;
    auto J = [&](int r, int c) -> double& { return jac.j[r * d + c]; };
    for (std::size_t p = 0; p < tb.indices.size(); ++p) {
        const double* cp = &patch.control_points[static_cast<std::size_t>(tb.indices[p]) * d];
        for (int r = 0; r < d; ++r)
            for (int c = 0; c < d; ++c) J(r, c) += cp[r] * tb.grads[p * d + c];
    }

    if (d == 2) {
        jac.det = J(0, 0) * J(1, 1) - J(0, 1) * J(1, 0);
        if (std::abs(jac.det) < 1e-14)
            throw degenerate_geometry_error("jacobian: singular map on patch " +
                                            std::to_string(patch.patch_id));
        const double inv = 1.0 / jac.det;
        // (J^-1)^T, row-major
        jac.jinv_t[0 * d + 0] = J(1, 1) * inv;
        jac.jinv_t[0 * d + 1] = -J(1, 0) * inv;
        jac.jinv_t[1 * d + 0] = -J(0, 1) * inv;
        jac.jinv_t[1 * d + 1] = J(0, 0) * inv;
    } else {
        const double c00 = J(1, 1) * J(2, 2) - J(1, 2) * J(2, 1);
        const double c01 = J(1, 2) * J(2, 0) - J(1, 0) * J(2, 2);
        const double c02 = J(1, 0) * J(2, 1) - J(1, 1) * J(2, 0);
        jac.det = J(0, 0) * c00 + J(0, 1) * c01 + J(0, 2) * c02;
        if (std::abs(jac.det) < 1e-14)
            throw degenerate_geometry_error("jacobian: singular map on patch " +
                                            std::to_string(patch.patch_id));
        const double inv = 1.0 / jac.det;
        // J^-1 = cofactor(J)^T / det, so (J^-1)^T = cofactor(J) / det
        jac.jinv_t[0 * d + 0] = c00 * inv;
        jac.jinv_t[0 * d + 1] = c01 * inv;
        jac.jinv_t[0 * d + 2] = c02 * inv;
        jac.jinv_t[1 * d + 0] = (J(0, 2) * J(2, 1) - J(0, 1) * J(2, 2)) * inv;
        jac.jinv_t[1 * d + 1] = (J(0, 0) * J(2, 2) - J(0, 2) * J(2, 0)) * inv;
        jac.jinv_t[1 * d + 2] = (J(0, 1) * J(2, 0) - J(0, 0) * J(2, 1)) * inv;
        jac.jinv_t[2 * d + 0] = (J(0, 1) * J(1, 2) - J(0, 2) * J(1, 1)) * inv;
        jac.jinv_t[2 * d + 1] = (J(0, 2) * J(1, 0) - J(0, 0) * J(1, 2)) * inv;
        jac.jinv_t[2 * d + 2] = (J(0, 0) * J(1, 1) - J(0, 1) * J(1, 0)) * inv;
    }
    return jac;
}

namespace {

FaceNormal normal_from_patch(const GeometryPatch& patch, const FaceSelector& face,
                             std::span<const double> t_face) {
    const int d = patch.dim();
    const Vec3 xhat = face_to_volume(face, t_face, d);
    const Jacobian jac = jacobian(patch, std::span<const double>(xhat.data(), d));

    // J^-T e_axis is the physical gradient of the pulled-back coordinate
    // xhat_axis, so it points toward increasing xhat_axis; the side sign
    // makes it outward. Surface measure by Nanson: |det J| |J^-T N|.
    const double sign = (face.side == 1) ? 1.0 : -1.0;
    Vec3 v{0.0, 0.0, 0.0};
    for (int r = 0; r < d; ++r) v[r] = sign * jac.jinv_t[r * d + face.axis];
    double len = 0.0;
    for (int r = 0; r < d; ++r) len += v[r] * v[r];
    len = std::sqrt(len);
    if (!(len > 0.0) || !std::isfinite(len))
        throw degenerate_geometry_error("face_normal: degenerate tangent on patch " +
                                        std::to_string(patch.patch_id));

    FaceNormal out;
    out.surface_factor = std::abs(jac.det) * len;
    for (int r = 0; r < d; ++r) out.normal[r] = v[r] / len;
    return out;
}

} // namespace

FaceNormal face_normal(const MultiPatchDomain& domain, const InterfaceFace& face,
                       std::span<const double> t_face) {
    return normal_from_patch(domain.patches[face.left_patch], face.left_face, t_face);
}

FaceNormal face_normal(const MultiPatchDomain& domain, const BoundaryFace& face,
                       std::span<const double> t_face) {
    return normal_from_patch(domain.patches[face.patch], face.face, t_face);
}

InterfaceCheck verify_interface(const MultiPatchDomain& domain, const InterfaceFace& face,
                                int samples) {
    if (samples < 2) throw std::invalid_argument("verify_interface: samples must be >= 2");
    const int d = domain.dim();
    const int fd = d - 1;
    const auto& left = domain.patches[face.left_patch];
    const auto& right = domain.patches[face.right_patch];
    const double tol = 1e-10 * domain.diameter();

    InterfaceCheck check;
    check.pass = true;

    int idx[2] = {0, 0};
    const int total = (fd == 1) ? samples : samples * samples;
    for (int p = 0; p < total; ++p) {
        double t[2];
        for (int j = 0; j < fd; ++j) t[j] = static_cast<double>(idx[j]) / (samples - 1);
        const auto s = map_face_coords(face.orientation, std::span<const double>(t, fd), fd);
        const Vec3 xl = face_to_volume(face.left_face, std::span<const double>(t, fd), d);
        const Vec3 xr = face_to_volume(face.right_face, std::span<const double>(s.data(), fd), d);
        const Vec3 pl = map_point(left, std::span<const double>(xl.data(), d));
        const Vec3 pr = map_point(right, std::span<const double>(xr.data(), d));
        double dist = 0.0;
        for (int a = 0; a < d; ++a) dist += (pl[a] - pr[a]) * (pl[a] - pr[a]);
        dist = std::sqrt(dist);
        if (dist > check.max_mismatch) {
            check.max_mismatch = dist;
            check.worst_t = {t[0], fd > 1 ? t[1] : 0.0};
        }
        for (int j = 0; j < fd; ++j) {
            if (++idx[j] < samples) break;
            idx[j] = 0;
        }
    }
    check.pass = check.max_mismatch < tol;
    return check;
}

MultiPatchDomain refine_dyadic(const MultiPatchDomain& domain) {
    MultiPatchDomain fine = domain;
    for (auto& space : fine.solution_spaces) {
        std::vector<KnotVector> axes;
        axes.reserve(space.axes.size());
        for (const auto& kv : space.axes) axes.push_back(kv.refined_dyadic());
        space = TensorSplineSpace(std::move(axes));
    }
    return fine;
}

namespace {

// Clamped Gauss-Newton inversion of the patch map; used only for the
// load-time overlap spot check, never on the discretization path.
bool contains_point(const GeometryPatch& patch, const Vec3& x, double tol) {
    const int d = patch.dim();
    double xhat[3] = {0.5, 0.5, 0.5};
    for (int it = 0; it < 50; ++it) {
        const Vec3 fx = map_point(patch, std::span<const double>(xhat, d));
        double r[3], rnorm = 0.0;
        for (int a = 0; a < d; ++a) {
            r[a] = x[a] - fx[a];
            rnorm += r[a] * r[a];
        }
        rnorm = std::sqrt(rnorm);
        if (rnorm < tol) {
            const double margin = 1e-7;
            for (int a = 0; a < d; ++a)
                if (xhat[a] < margin || xhat[a] > 1.0 - margin) return false;
            return true;
        }
        Jacobian jac;
        try {
            jac = jacobian(patch, std::span<const double>(xhat, d));
        } catch (const degenerate_geometry_error&) {
            return false;
        }
        // dxhat = J^-1 r = (J^-T)^T r
        for (int a = 0; a < d; ++a) {
            double step = 0.0;
            for (int rr = 0; rr < d; ++rr) step += jac.jinv_t[rr * d + a] * r[rr];
            xhat[a] = std::clamp(xhat[a] + step, 0.0, 1.0);
        }
    }
    return false;
}

} // namespace

void validate_domain(const MultiPatchDomain& domain) {
    const int np = domain.num_patches();
    if (np == 0) throw config_error("domain: no patches");
    const int d = domain.dim();
    if (d < 2 || d > 3) throw config_error("domain: dimension must be 2 or 3");
    if (static_cast<int>(domain.solution_spaces.size()) != np)
        throw config_error("domain: one solution space per patch required");
    if (static_cast<int>(domain.alpha.size()) != np)
        throw config_error("domain: one alpha per patch required");

    for (int i = 0; i < np; ++i) {
        if (!(domain.alpha[i] > 0.0))
            throw config_error("domain: non-positive alpha on patch " + std::to_string(i));
        const auto& p = domain.patches[i];
        if (p.dim() != d || domain.solution_spaces[i].dim() != d)
            throw config_error("domain: mixed patch dimensions");
        if (static_cast<int>(p.control_points.size()) != p.space.total_dim() * d)
            throw config_error("domain: control net size mismatch on patch " + std::to_string(i));
    }

    // each cube face may be claimed by at most one interface, and a declared
    // boundary face may not collide with an interface claim
    auto face_key = [d](int patch, const FaceSelector& f) {
        return (patch * d + f.axis) * 2 + f.side;
    };
    std::vector<int> claims(static_cast<std::size_t>(np) * d * 2, 0);
    for (const auto& f : domain.interfaces) {
        if (f.left_patch < 0 || f.left_patch >= np || f.right_patch < 0 || f.right_patch >= np)
            throw config_error("domain: interface references unknown patch");
        if (f.left_patch == f.right_patch)
            throw config_error("domain: interface joins a patch to itself");
        for (int j = 0; j < d - 1; ++j)
            if (f.orientation.perm[j] < 0 || f.orientation.perm[j] >= d - 1)
                throw config_error("domain: invalid orientation permutation");
        if (d == 3 && f.orientation.perm[0] == f.orientation.perm[1])
            throw config_error("domain: orientation permutation not invertible");
        if (++claims[face_key(f.left_patch, f.left_face)] > 1 ||
            ++claims[face_key(f.right_patch, f.right_face)] > 1)
            throw config_error("domain: face claimed by multiple interfaces");
    }
    for (const auto& b : domain.boundary_faces) {
        if (b.patch < 0 || b.patch >= np)
            throw config_error("domain: boundary face references unknown patch");
        if (claims[face_key(b.patch, b.face)] > 0)
            throw config_error("domain: boundary face already claimed by an interface");
    }

    // Jacobian bounds on a sample grid
    for (int i = 0; i < np; ++i) {
        const auto& p = domain.patches[i];
        const int ns = 10;
        double dmin = std::numeric_limits<double>::max(), dmax = 0.0;
        int idx[3] = {0, 0, 0};
        const int total = (d == 2) ? ns * ns : ns * ns * ns;
        for (int q = 0; q < total; ++q) {
            double xhat[3];
            for (int a = 0; a < d; ++a) xhat[a] = (idx[a] + 0.5) / ns;
            double det;
            try {
                det = std::abs(jacobian(p, std::span<const double>(xhat, d)).det);
            } catch (const degenerate_geometry_error&) {
                throw config_error("domain: degenerate geometry on patch " + std::to_string(i));
            }
            dmin = std::min(dmin, det);
            dmax = std::max(dmax, det);
            for (int a = 0; a < d; ++a) {
                if (++idx[a] < ns) break;
                idx[a] = 0;
            }
        }
        if (!(dmin > 0.0) || dmax / dmin > 1e8)
            throw config_error("domain: jacobian bound check failed on patch " + std::to_string(i));
    }

    // pairwise non-overlap spot check on interior samples
    const double tol = 1e-9 * domain.diameter();
    for (int i = 0; i < np; ++i) {
        const int ns = 3;
        int idx[3] = {0, 0, 0};
        const int total = (d == 2) ? ns * ns : ns * ns * ns;
        for (int q = 0; q < total; ++q) {
            double xhat[3];
            for (int a = 0; a < d; ++a) xhat[a] = (idx[a] + 0.5) / ns;
            const Vec3 x = map_point(domain.patches[i], std::span<const double>(xhat, d));
            for (int j = 0; j < np; ++j) {
                if (j != i && contains_point(domain.patches[j], x, tol))
                    throw config_error("domain: patches " + std::to_string(i) + " and " +
                                       std::to_string(j) + " overlap");
            }
            for (int a = 0; a < d; ++a) {
                if (++idx[a] < ns) break;
                idx[a] = 0;
            }
        }
    }

    for (std::size_t f = 0; f < domain.interfaces.size(); ++f) {
        const auto check = verify_interface(domain, domain.interfaces[f], 8);
        if (!check.pass)
            throw config_error("domain: interface " + std::to_string(f) +
                               " verification failed, mismatch " +
                               std::to_string(check.max_mismatch));
    }
}

} // namespace dgiga
