#include "dgiga/spline.hpp"

#include "dgiga/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace dgiga {

namespace {

std::vector<double> unique_knots(const std::vector<double>& knots) {
    std::vector<double> breaks;
    for (double t : knots) {
        if (breaks.empty() || t > breaks.back()) breaks.push_back(t);
    }
    return breaks;
}

} // namespace

KnotVector::KnotVector(int degree, std::vector<double> kn)
    : degree(degree), knots(std::move(kn)) {
    if (degree < 0) throw std::invalid_argument("knot vector: negative degree");
    const int m = static_cast<int>(knots.size());
    if (m < 2 * (degree + 1))
        throw std::invalid_argument("knot vector: too few knots for open vector");
    for (int i = 1; i < m; ++i)
        if (knots[i] < knots[i - 1])
            throw std::invalid_argument("knot vector: knots must be non-decreasing");
    for (int i = 0; i <= degree; ++i) {
        if (knots[i] != knots[0] || knots[m - 1 - i] != knots[m - 1])
            throw std::invalid_argument("knot vector: endpoint multiplicity must be degree+1");
    }
    if (num_basis() < degree + 1)
        throw std::invalid_argument("knot vector: fewer than degree+1 basis functions");
    // interior multiplicity <= degree
    int run = 1;
    for (int i = degree + 2; i < m - degree - 1; ++i) {
        run = (knots[i] == knots[i - 1]) ? run + 1 : 1;
        if (run > degree)
            throw std::invalid_argument("knot vector: interior multiplicity exceeds degree");
    }
    if (knots[degree] == knots[m - degree - 1])
        throw std::invalid_argument("knot vector: empty parametric domain");
    breaks_ = unique_knots(knots);
}

KnotVector KnotVector::uniform_open(int degree, int elements) {
    if (elements < 1) throw std::invalid_argument("uniform_open: need at least one element");
    std::vector<double> kn;
    kn.reserve(2 * (degree + 1) + elements - 1);
    for (int i = 0; i <= degree; ++i) kn.push_back(0.0);
    for (int i = 1; i < elements; ++i)
        kn.push_back(static_cast<double>(i) / static_cast<double>(elements));
    for (int i = 0; i <= degree; ++i) kn.push_back(1.0);
    return KnotVector(degree, std::move(kn));
}

KnotVector KnotVector::refined_dyadic() const {
    std::vector<double> kn;
    kn.reserve(knots.size() + breaks_.size() - 1);
    std::size_t next = 0;
    for (std::size_t b = 0; b + 1 < breaks_.size(); ++b) {
        while (next < knots.size() && knots[next] <= breaks_[b]) kn.push_back(knots[next++]);
        kn.push_back(0.5 * (breaks_[b] + breaks_[b + 1]));
    }
    while (next < knots.size()) kn.push_back(knots[next++]);
    return KnotVector(degree, std::move(kn));
}

double KnotVector::greville(int j) const {
    double s = 0.0;
    for (int i = 1; i <= degree; ++i) s += knots[j + i];
    return degree > 0 ? s / degree : 0.5 * (knots[j] + knots[j + 1]);
}

int find_span(const KnotVector& kv, double xhat) {
    if (xhat < 0.0 || xhat > 1.0)
        throw std::domain_error("find_span: coordinate outside [0,1]");
    const int n = kv.num_basis();
    const int k = kv.degree;
    if (xhat >= kv.knots[n]) {
        // right-end clamp: last nonempty span
        int i = n - 1;
        while (kv.knots[i + 1] <= kv.knots[i]) --i;
        return i;
    }
    int lo = k, hi = n;
    while (hi - lo > 1) {
        const int mid = (lo + hi) / 2;
        if (xhat < kv.knots[mid]) hi = mid; else lo = mid;
    }
    return lo;
}

BasisDerivs eval_basis(const KnotVector& kv, double xhat, int nderiv) {
    if (nderiv < 0 || nderiv > 2)
        throw std::invalid_argument("eval_basis: nderiv must be in [0,2]");
    const int k = kv.degree;
    const int span = find_span(kv, xhat);
    const auto& t = kv.knots;

    BasisDerivs out;
    out.first = span - k;
    out.count = k + 1;
    out.nderiv = nderiv;
    out.data.assign(static_cast<std::size_t>(nderiv + 1) * (k + 1), 0.0);

    // ndu[j][r]: triangular table of basis values and knot differences
    std::vector<double> ndu((k + 1) * (k + 1), 0.0);
    std::vector<double> left(k + 1, 0.0), right(k + 1, 0.0);
    auto NDU = [&](int j, int r) -> double& { return ndu[j * (k + 1) + r]; };

    NDU(0, 0) = 1.0;
    for (int j = 1; j <= k; ++j) {
        left[j] = xhat - t[span + 1 - j];
        right[j] = t[span + j] - xhat;
        double saved = 0.0;
        for (int r = 0; r < j; ++r) {
            NDU(j, r) = right[r + 1] + left[j - r];
            const double temp = NDU(r, j - 1) / NDU(j, r);
            NDU(r, j) = saved + right[r + 1] * temp;
            saved = left[j - r] * temp;
        }
        NDU(j, j) = saved;
    }
    for (int i = 0; i <= k; ++i) out.data[i] = NDU(i, k);

    if (nderiv == 0) return out;

    // derivative part of NURBS-book algorithm A2.3
    std::vector<double> a(2 * (k + 1), 0.0);
    for (int r = 0; r <= k; ++r) {
        int s1 = 0, s2 = 1;
        a[0] = 1.0;
        for (int deriv = 1; deriv <= nderiv; ++deriv) {
            double dv = 0.0;
            const int rk = r - deriv;
            const int pk = k - deriv;
            if (r >= deriv) {
                a[s2 * (k + 1)] = a[s1 * (k + 1)] / NDU(pk + 1, rk);
                dv = a[s2 * (k + 1)] * NDU(rk, pk);
            }
            const int j1 = (rk >= -1) ? 1 : -rk;
            const int j2 = (r - 1 <= pk) ? deriv - 1 : k - r;
            for (int j = j1; j <= j2; ++j) {
                a[s2 * (k + 1) + j] =
                    (a[s1 * (k + 1) + j] - a[s1 * (k + 1) + j - 1]) / NDU(pk + 1, rk + j);
                dv += a[s2 * (k + 1) + j] * NDU(rk + j, pk);
            }
            if (r <= pk) {
                a[s2 * (k + 1) + deriv] = -a[s1 * (k + 1) + deriv - 1] / NDU(pk + 1, r);
                dv += a[s2 * (k + 1) + deriv] * NDU(r, pk);
            }
            out.data[deriv * (k + 1) + r] = dv;
            std::swap(s1, s2);
        }
    }
    double factor = static_cast<double>(k);
    for (int deriv = 1; deriv <= nderiv; ++deriv) {
        for (int r = 0; r <= k; ++r) out.data[deriv * (k + 1) + r] *= factor;
        factor *= static_cast<double>(k - deriv);
    }
    return out;
}

TensorSplineSpace::TensorSplineSpace(std::vector<KnotVector> ax) : axes(std::move(ax)) {
    if (axes.empty() || axes.size() > 3)
        throw std::invalid_argument("tensor space: dimension must be 1..3");
    for (const auto& kv : axes)
        if (kv.degree != axes[0].degree)
            throw std::invalid_argument("tensor space: all axes must share one degree");
}

int TensorSplineSpace::total_dim() const {
    int n = 1;
    for (const auto& kv : axes) n *= kv.num_basis();
    return n;
}

int TensorSplineSpace::total_elements() const {
    int n = 1;
    for (const auto& kv : axes) n *= kv.num_elements();
    return n;
}

int TensorSplineSpace::basis_index(std::span<const int> j) const {
    int idx = 0;
    for (int a = dim() - 1; a >= 0; --a) idx = idx * axes[a].num_basis() + j[a];
    return idx;
}

int TensorSplineSpace::element_index(std::span<const int> e) const {
    int idx = 0;
    for (int a = dim() - 1; a >= 0; --a) idx = idx * axes[a].num_elements() + e[a];
    return idx;
}

void TensorSplineSpace::element_multi_index(int flat, std::span<int> e) const {
    for (int a = 0; a < dim(); ++a) {
        e[a] = flat % axes[a].num_elements();
        flat /= axes[a].num_elements();
    }
}

void TensorSplineSpace::element_box(int flat, std::span<double> lo, std::span<double> hi) const {
    int e[3];
    element_multi_index(flat, std::span<int>(e, dim()));
    for (int a = 0; a < dim(); ++a) {
        lo[a] = axes[a].element_start(e[a]);
        hi[a] = axes[a].element_end(e[a]);
    }
}

double TensorSplineSpace::mesh_size() const {
    double h = 0.0;
    double edge2[3];
    for (int a = 0; a < dim(); ++a) {
        double worst = 0.0;
        for (int e = 0; e < axes[a].num_elements(); ++e)
            worst = std::max(worst, axes[a].element_end(e) - axes[a].element_start(e));
        edge2[a] = worst * worst;
    }
    for (int a = 0; a < dim(); ++a) h += edge2[a];
    return std::sqrt(h);
}

double TensorSplineSpace::quasi_uniformity_ratio() const {
    double emin = 1.0, emax = 0.0;
    for (const auto& kv : axes) {
        for (int e = 0; e < kv.num_elements(); ++e) {
            const double len = kv.element_end(e) - kv.element_start(e);
            emin = std::min(emin, len);
            emax = std::max(emax, len);
        }
    }
    return emax / emin;
}

TensorBasisEval eval_tensor_basis(const TensorSplineSpace& space,
                                  std::span<const double> xhat, int nderiv) {
    if (nderiv < 0 || nderiv > 1)
        throw std::invalid_argument("eval_tensor_basis: nderiv must be 0 or 1");
    const int d = space.dim();
    const int k = space.degree();
    BasisDerivs uni[3];
    for (int a = 0; a < d; ++a) uni[a] = eval_basis(space.axes[a], xhat[a], nderiv);

    const int per_axis = k + 1;
    int total = 1;
    for (int a = 0; a < d; ++a) total *= per_axis;

    TensorBasisEval out;
    out.indices.resize(total);
    out.values.resize(total);
    if (nderiv >= 1) out.grads.resize(static_cast<std::size_t>(total) * d);

    int mi[3] = {0, 0, 0};
    for (int p = 0; p < total; ++p) {
        int j[3];
        for (int a = 0; a < d; ++a) j[a] = uni[a].first + mi[a];
        out.indices[p] = space.basis_index(std::span<const int>(j, d));
        double v = 1.0;
        for (int a = 0; a < d; ++a) v *= uni[a].value(mi[a]);
        out.values[p] = v;
        if (nderiv >= 1) {
            for (int g = 0; g < d; ++g) {
                double dv = 1.0;
                for (int a = 0; a < d; ++a)
                    dv *= (a == g) ? uni[a].deriv(1, mi[a]) : uni[a].value(mi[a]);
                out.grads[static_cast<std::size_t>(p) * d + g] = dv;
            }
        }
        for (int a = 0; a < d; ++a) {
            if (++mi[a] < per_axis) break;
            mi[a] = 0;
        }
    }
    return out;
}

double eval_spline_value(const TensorSplineSpace& space, std::span<const double> coeffs,
                         std::span<const double> xhat) {
    const auto tb = eval_tensor_basis(space, xhat, 0);
    double v = 0.0;
    for (std::size_t p = 0; p < tb.indices.size(); ++p)
        v += coeffs[tb.indices[p]] * tb.values[p];
    return v;
}

void eval_spline_value_grad(const TensorSplineSpace& space, std::span<const double> coeffs,
                            std::span<const double> xhat, double& value,
                            std::span<double> grad) {
    const int d = space.dim();
    const auto tb = eval_tensor_basis(space, xhat, 1);
    value = 0.0;
    for (int a = 0; a < d; ++a) grad[a] = 0.0;
    for (std::size_t p = 0; p < tb.indices.size(); ++p) {
        const double c = coeffs[tb.indices[p]];
        value += c * tb.values[p];
        for (int a = 0; a < d; ++a) grad[a] += c * tb.grads[p * d + a];
    }
}

namespace {

// Solves the small SPD system G x = b in place (Cholesky).
void solve_spd_dense(std::vector<double>& G, std::vector<double>& b, int n) {
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j <= i; ++j) {
            double s = G[i * n + j];
            for (int m = 0; m < j; ++m) s -= G[i * n + m] * G[j * n + m];
            if (i == j) {
                if (s <= 0.0) throw std::runtime_error("quasi-interpolant: singular local Gram matrix");
                G[i * n + i] = std::sqrt(s);
            } else {
                G[i * n + j] = s / G[j * n + j];
            }
        }
    }
    for (int i = 0; i < n; ++i) {
        double s = b[i];
        for (int m = 0; m < i; ++m) s -= G[i * n + m] * b[m];
        b[i] = s / G[i * n + i];
    }
    for (int i = n - 1; i >= 0; --i) {
        double s = b[i];
        for (int m = i + 1; m < n; ++m) s -= G[m * n + i] * b[m];
        b[i] = s / G[i * n + i];
    }
}

struct DualFunctional {
    std::vector<double> points;
    std::vector<double> weights;
};

// Dual functional for basis function j: lambda_j(B_a) = delta_{ja}, built
// from an L2 fit over the nonempty spans of supp B_j. Quadrature with
// degree+1 Gauss points per span keeps the fit exact on splines, so the
// resulting interpolant is a projector.
std::vector<DualFunctional> build_dual_functionals(const KnotVector& kv) {
    const int k = kv.degree;
    const int n = kv.num_basis();
    const int nq = k + 1;
    const QuadratureRule rule = gauss_rule(nq);
    const std::vector<double>& gp = rule.points;
    const std::vector<double>& gw = rule.weights;

    std::vector<DualFunctional> duals(n);
    for (int j = 0; j < n; ++j) {
        // nonempty spans inside supp B_j = [t_j, t_{j+k+1}]
        std::vector<int> spans;
        for (int s = std::max(j, k); s <= std::min(j + k, n - 1); ++s)
            if (kv.knots[s + 1] > kv.knots[s]) spans.push_back(s);

        // local basis index range covering those spans
        int amin = n, amax = -1;
        for (int s : spans) {
            amin = std::min(amin, s - k);
            amax = std::max(amax, s);
        }
        const int nl = amax - amin + 1;

        std::vector<double> G(static_cast<std::size_t>(nl) * nl, 0.0);
        std::vector<double> pts, Bcols;
        std::vector<double> wq;
        for (int s : spans) {
            const double a = kv.knots[s], b = kv.knots[s + 1];
            for (int q = 0; q < nq; ++q) {
                const double x = a + (b - a) * gp[q];
                const double w = (b - a) * gw[q];
                const auto bd = eval_basis(kv, x, 0);
                std::vector<double> col(nl, 0.0);
                for (int i = 0; i <= k; ++i) col[bd.first + i - amin] = bd.value(i);
                for (int r = 0; r < nl; ++r)
                    for (int c = 0; c < nl; ++c) G[r * nl + c] += w * col[r] * col[c];
                pts.push_back(x);
                wq.push_back(w);
                Bcols.insert(Bcols.end(), col.begin(), col.end());
            }
        }
        std::vector<double> g(nl, 0.0);
        g[j - amin] = 1.0;
        solve_spd_dense(G, g, nl);

        DualFunctional f;
        const std::size_t np = pts.size();
        f.points = std::move(pts);
        f.weights.resize(np);
        for (std::size_t q = 0; q < np; ++q) {
            double s = 0.0;
            for (int r = 0; r < nl; ++r) s += g[r] * Bcols[q * nl + r];
            f.weights[q] = wq[q] * s;
        }
        duals[j] = std::move(f);
    }
    return duals;
}

} // namespace

SplineCoefficients quasi_interpolate(const TensorSplineSpace& space,
                                     const std::function<double(std::span<const double>)>& f) {
    const int d = space.dim();
    std::vector<std::vector<DualFunctional>> duals(d);
    for (int a = 0; a < d; ++a) duals[a] = build_dual_functionals(space.axes[a]);

    SplineCoefficients out;
    out.components = 1;
    out.values.assign(space.total_dim(), 0.0);

    int j[3] = {0, 0, 0};
    for (int flat = 0; flat < space.total_dim(); ++flat) {
        const DualFunctional* lam[3];
        for (int a = 0; a < d; ++a) lam[a] = &duals[a][j[a]];

        double c = 0.0;
        int q[3] = {0, 0, 0};
        bool done = false;
        while (!done) {
            double x[3], w = 1.0;
            for (int a = 0; a < d; ++a) {
                x[a] = lam[a]->points[q[a]];
                w *= lam[a]->weights[q[a]];
            }
            c += w * f(std::span<const double>(x, d));
            done = true;
            for (int a = 0; a < d; ++a) {
                if (++q[a] < static_cast<int>(lam[a]->points.size())) { done = false; break; }
                q[a] = 0;
            }
        }
        out.values[flat] = c;

        for (int a = 0; a < d; ++a) {
            if (++j[a] < space.axes[a].num_basis()) break;
            j[a] = 0;
        }
    }
    return out;
}

} // namespace dgiga
