#include "dgiga/solver.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

namespace dgiga {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

std::vector<double> jacobi_inverse(const CsrMatrix& m, bool enabled) {
    std::vector<double> inv(m.rows, 1.0);
    if (!enabled) return inv;
    for (int i = 0; i < m.rows; ++i) {
        const double d = m.diagonal(i);
        inv[i] = (d != 0.0) ? 1.0 / d : 1.0;
    }
    return inv;
}

double final_residual(const CsrMatrix& a, std::span<const double> b, std::span<const double> x,
                      double bnorm) {
    std::vector<double> r(a.rows);
    a.apply(x, r);
    for (int i = 0; i < a.rows; ++i) r[i] = b[i] - r[i];
    return norm2(r) / bnorm;
}

} // namespace

SolveResult solve_spd(const CsrMatrix& a, std::span<const double> b, const SolverOptions& opts) {
    if (symmetry_defect(a) > 1e-10)
        throw std::invalid_argument("solve_spd: matrix is not symmetric");

    const auto t0 = std::chrono::steady_clock::now();
    const int n = a.rows;
    const int max_iter = opts.max_iter > 0 ? opts.max_iter : 10 * n;

    SolveResult res;
    res.x.assign(n, 0.0);
    const double bnorm = norm2(b);
    if (bnorm == 0.0) {
        res.report.converged = true;
        return res;
    }
    const auto minv = jacobi_inverse(a, opts.jacobi);

    std::vector<double> r(b.begin(), b.end());
    std::vector<double> z(n), p(n), ap(n);
    for (int i = 0; i < n; ++i) z[i] = minv[i] * r[i];
    p = z;
    double rz = dot(r, z);

    int it = 0;
    for (; it < max_iter; ++it) {
        if (norm2(r) / bnorm <= opts.tol) break;
        a.apply(p, ap);
        const double pap = dot(p, ap);
        if (pap <= 0.0) {
            res.report.breakdown = true;
            break;
        }
        const double alpha = rz / pap;
        for (int i = 0; i < n; ++i) {
            res.x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        for (int i = 0; i < n; ++i) z[i] = minv[i] * r[i];
        const double rz_new = dot(r, z);
        const double beta = rz_new / rz;
        rz = rz_new;
        for (int i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }

    res.report.iterations = it;
    res.report.relative_residual = final_residual(a, b, res.x, bnorm);
    res.report.converged = !res.report.breakdown && res.report.relative_residual <= opts.tol;
    res.report.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

SolveResult solve_general(const CsrMatrix& a, std::span<const double> b,
                          const SolverOptions& opts) {
    const auto t0 = std::chrono::steady_clock::now();
    const int n = a.rows;
    const int max_iter = opts.max_iter > 0 ? opts.max_iter : 10 * n;

    SolveResult res;
    res.x.assign(n, 0.0);
    const double bnorm = norm2(b);
    if (bnorm == 0.0) {
        res.report.converged = true;
        return res;
    }
    const auto minv = jacobi_inverse(a, opts.jacobi);

    // BiCGStab with Jacobi preconditioning
    std::vector<double> r(b.begin(), b.end());
    std::vector<double> r0 = r;
    std::vector<double> p(n, 0.0), v(n, 0.0), s(n), t(n), phat(n), shat(n);
    double rho = 1.0, alpha = 1.0, omega = 1.0;

    int it = 0;
    for (; it < max_iter; ++it) {
        if (norm2(r) / bnorm <= opts.tol) break;
        const double rho_new = dot(r0, r);
        if (std::abs(rho_new) < 1e-300) {
            res.report.breakdown = true;
            break;
        }
        if (it == 0) {
            p = r;
        } else {
            const double beta = (rho_new / rho) * (alpha / omega);
            for (int i = 0; i < n; ++i) p[i] = r[i] + beta * (p[i] - omega * v[i]);
        }
        rho = rho_new;
        for (int i = 0; i < n; ++i) phat[i] = minv[i] * p[i];
        a.apply(phat, v);
        const double r0v = dot(r0, v);
        if (std::abs(r0v) < 1e-300) {
            res.report.breakdown = true;
            break;
        }
        alpha = rho / r0v;
        for (int i = 0; i < n; ++i) s[i] = r[i] - alpha * v[i];
        if (norm2(s) / bnorm <= opts.tol) {
            for (int i = 0; i < n; ++i) res.x[i] += alpha * phat[i];
            r = s;
            ++it;
            break;
        }
        for (int i = 0; i < n; ++i) shat[i] = minv[i] * s[i];
        a.apply(shat, t);
        const double tt = dot(t, t);
        if (tt < 1e-300) {
            res.report.breakdown = true;
            break;
        }
        omega = dot(t, s) / tt;
        if (std::abs(omega) < 1e-300) {
            res.report.breakdown = true;
            break;
        }
        for (int i = 0; i < n; ++i) {
            res.x[i] += alpha * phat[i] + omega * shat[i];
            r[i] = s[i] - omega * t[i];
        }
    }

    res.report.iterations = it;
    res.report.relative_residual = final_residual(a, b, res.x, bnorm);
    res.report.converged = !res.report.breakdown && res.report.relative_residual <= opts.tol;
    res.report.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

SolveResult solve_spd(const DGSystem& system, const SolverOptions& opts) {
    return solve_spd(system.matrix, system.rhs, opts);
}

SolveResult solve_general(const DGSystem& system, const SolverOptions& opts) {
    return solve_general(system.matrix, system.rhs, opts);
}

} // namespace dgiga
