#include "dgiga/analysis.hpp"

#include <cmath>
#include <stdexcept>

namespace dgiga {

namespace {

double patch_value(const TensorSplineSpace& space, const DofMap& dofmap, int patch,
                   std::span<const double> coeffs, std::span<const double> xhat) {
    return eval_spline_value(space, coeffs.subspan(dofmap.offsets[patch], space.total_dim()),
                             xhat);
}

} // namespace

double dg_norm_error(const MultiPatchDomain& domain, std::span<const TensorSplineSpace> spaces,
                     const DofMap& dofmap, std::span<const double> coeffs,
                     const ScalarField& u_exact, const GradientField& grad_u_exact,
                     const DGConfig& config) {
    const int d = domain.dim();
    const int k = spaces[0].degree();
    const double mu = config.penalty_mu(k, d);
    const int nq = config.data_points(k);
    double total = 0.0;

    // per-patch weighted H1 seminorm of the error
    for (int i = 0; i < domain.num_patches(); ++i) {
        const auto& patch = domain.patches[i];
        const auto& space = spaces[i];
        const auto local = coeffs.subspan(dofmap.offsets[i], space.total_dim());
        double acc = 0.0;
        for (int e = 0; e < space.total_elements(); ++e) {
            const ElementQuadrature quad = element_quadrature(space, e, nq);
            for (std::size_t q = 0; q < quad.weights.size(); ++q) {
                const std::span<const double> xhat(&quad.points[q * d], d);
                const Jacobian jac = jacobian(patch, xhat);
                double value, gparam[3], gphys[3];
                eval_spline_value_grad(space, local, xhat, value, std::span<double>(gparam, d));
                for (int r = 0; r < d; ++r) {
                    double s = 0.0;
                    for (int c = 0; c < d; ++c) s += jac.jinv_t[r * d + c] * gparam[c];
                    gphys[r] = s;
                }
                const Vec3 x = map_point(patch, xhat);
                const auto ge = grad_u_exact(std::span<const double>(x.data(), d));
                double diff2 = 0.0;
                for (int r = 0; r < d; ++r) diff2 += (ge[r] - gphys[r]) * (ge[r] - gphys[r]);
                acc += quad.weights[q] * std::abs(jac.det) * diff2;
            }
        }
        total += domain.alpha[i] * acc;
    }

    // interface jump penalty terms; the exact solution is single-valued, so
    // both sides use it at the same physical point
    for (const auto& face : domain.interfaces) {
        const int li = face.left_patch, ri = face.right_patch;
        const double rho = mu * domain.alpha[li] / spaces[li].mesh_size() +
                           mu * domain.alpha[ri] / spaces[ri].mesh_size();
        const auto seg = merge_interface(face, spaces[li], spaces[ri]);
        const FaceQuadrature quad = face_quadrature(seg, nq);
        double acc = 0.0;
        for (std::size_t q = 0; q < quad.weights.size(); ++q) {
            const std::span<const double> tf(&quad.face_coords[q * (d - 1)], d - 1);
            const FaceNormal fn = face_normal(domain, face, tf);
            const std::span<const double> xl(&quad.left_xhat[q * d], d);
            const std::span<const double> xr(&quad.right_xhat[q * d], d);
            const Vec3 x = map_point(domain.patches[li], xl);
            const double ue = u_exact(std::span<const double>(x.data(), d));
            const double el = ue - patch_value(spaces[li], dofmap, li, coeffs, xl);
            const double er = ue - patch_value(spaces[ri], dofmap, ri, coeffs, xr);
            acc += quad.weights[q] * fn.surface_factor * (el - er) * (el - er);
        }
        total += rho * acc;
    }

    // boundary penalty terms against the Dirichlet trace
    for (const auto& bf : domain.boundary_faces) {
        const int i = bf.patch;
        const double rho = mu * domain.alpha[i] / spaces[i].mesh_size();
        const FaceQuadrature quad = boundary_face_quadrature(spaces[i], bf.face, nq);
        double acc = 0.0;
        for (std::size_t q = 0; q < quad.weights.size(); ++q) {
            const std::span<const double> tf(&quad.face_coords[q * (d - 1)], d - 1);
            const FaceNormal fn = face_normal(domain, bf, tf);
            const std::span<const double> xh(&quad.left_xhat[q * d], d);
            const Vec3 x = map_point(domain.patches[i], xh);
            const double e =
                u_exact(std::span<const double>(x.data(), d)) -
                patch_value(spaces[i], dofmap, i, coeffs, xh);
            acc += quad.weights[q] * fn.surface_factor * e * e;
        }
        total += rho * acc;
    }

    return std::sqrt(total);
}

double l2_error(const MultiPatchDomain& domain, std::span<const TensorSplineSpace> spaces,
                const DofMap& dofmap, std::span<const double> coeffs,
                const ScalarField& u_exact, const DGConfig& config) {
    const int d = domain.dim();
    const int nq = config.data_points(spaces[0].degree());
    double total = 0.0;
    for (int i = 0; i < domain.num_patches(); ++i) {
        const auto& patch = domain.patches[i];
        const auto& space = spaces[i];
        const auto local = coeffs.subspan(dofmap.offsets[i], space.total_dim());
        for (int e = 0; e < space.total_elements(); ++e) {
            const ElementQuadrature quad = element_quadrature(space, e, nq);
            for (std::size_t q = 0; q < quad.weights.size(); ++q) {
                const std::span<const double> xhat(&quad.points[q * d], d);
                const Jacobian jac = jacobian(patch, xhat);
                const Vec3 x = map_point(patch, xhat);
                const double diff = u_exact(std::span<const double>(x.data(), d)) -
                                    eval_spline_value(space, local, xhat);
                total += quad.weights[q] * std::abs(jac.det) * diff * diff;
            }
        }
    }
    return std::sqrt(total);
}

std::vector<double> observed_rates(std::span<const double> errors) {
    if (errors.size() < 2)
        throw std::invalid_argument("observed_rates: need at least two errors");
    std::vector<double> rates;
    rates.reserve(errors.size() - 1);
    for (std::size_t i = 1; i < errors.size(); ++i) {
        if (!(errors[i - 1] > 0.0) || !(errors[i] > 0.0))
            throw std::domain_error("observed_rates: errors must be positive");
        rates.push_back(std::log2(errors[i - 1] / errors[i]));
    }
    return rates;
}

double predicted_rate(int k, int l, double p, int d) {
    if (l < 2) throw std::domain_error("predicted_rate: regularity l must be >= 2");
    if (k < 1) throw std::domain_error("predicted_rate: degree must be >= 1");
    const double p_min = 2.0 * d / (d + 2.0 * (l - 1));
    if (!(p > p_min) || !(p <= 2.0))
        throw std::domain_error("predicted_rate: p outside the admissible interval");
    const int l_eff = std::min(l, k + 1);
    if (p == 2.0) return static_cast<double>(l_eff - 1);
    return l_eff + 0.5 * d - static_cast<double>(d) / p - 1.0;
}

std::vector<double> ConvergenceReport::dg_rates() const {
    std::vector<double> e;
    e.reserve(records.size());
    for (const auto& r : records) e.push_back(r.dg_error);
    return e.size() < 2 ? std::vector<double>{} : observed_rates(e);
}

std::vector<double> ConvergenceReport::l2_rates() const {
    std::vector<double> e;
    e.reserve(records.size());
    for (const auto& r : records) e.push_back(r.l2_error);
    return e.size() < 2 ? std::vector<double>{} : observed_rates(e);
}

} // namespace dgiga
