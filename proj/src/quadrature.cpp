#include "dgiga/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dgiga {

QuadratureRule gauss_rule(int n) {
    if (n < 1 || n > 30) throw std::invalid_argument("gauss_rule: n must be in [1,30]");
    QuadratureRule rule;
    rule.points.resize(n);
    rule.weights.resize(n);

    // Newton iteration on P_n over [-1,1], then map to [0,1]
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int j = 2; j <= n; ++j) {
                const double p2 = ((2 * j - 1) * x * p1 - (j - 1) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            pp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        const double w = 2.0 / ((1.0 - x * x) * pp * pp);
        rule.points[i] = 0.5 * (1.0 - x); // descending cos order -> ascending points
        rule.points[n - 1 - i] = 0.5 * (1.0 + x);
        rule.weights[i] = 0.5 * w;
        rule.weights[n - 1 - i] = 0.5 * w;
    }
    return rule;
}

ElementQuadrature element_quadrature(const TensorSplineSpace& space, int element_index,
                                     int n_per_axis) {
    if (element_index < 0 || element_index >= space.total_elements())
        throw std::invalid_argument("element_quadrature: invalid element index");
    const int d = space.dim();
    double lo[3], hi[3];
    space.element_box(element_index, std::span<double>(lo, d), std::span<double>(hi, d));

    const QuadratureRule rule = gauss_rule(n_per_axis);
    int total = 1;
    for (int a = 0; a < d; ++a) total *= n_per_axis;

    ElementQuadrature out;
    out.points.resize(static_cast<std::size_t>(total) * d);
    out.weights.resize(total);
    int idx[3] = {0, 0, 0};
    for (int p = 0; p < total; ++p) {
        double w = 1.0;
        for (int a = 0; a < d; ++a) {
            const double len = hi[a] - lo[a];
            out.points[static_cast<std::size_t>(p) * d + a] = lo[a] + len * rule.points[idx[a]];
            w *= len * rule.weights[idx[a]];
        }
        out.weights[p] = w;
        for (int a = 0; a < d; ++a) {
            if (++idx[a] < n_per_axis) break;
            idx[a] = 0;
        }
    }
    return out;
}

namespace {

int element_of(const KnotVector& kv, double x) {
    const auto& b = kv.breakpoints();
    const auto it = std::upper_bound(b.begin(), b.end(), x);
    int e = static_cast<int>(it - b.begin()) - 1;
    return std::clamp(e, 0, kv.num_elements() - 1);
}

std::vector<double> merged_breakpoints(std::vector<double> a, const std::vector<double>& b) {
    a.insert(a.end(), b.begin(), b.end());
    std::sort(a.begin(), a.end());
    std::vector<double> out;
    for (double t : a)
        if (out.empty() || t - out.back() > 1e-12) out.push_back(t);
    // keep the exact endpoints
    out.front() = 0.0;
    out.back() = 1.0;
    return out;
}

int volume_element_at(const TensorSplineSpace& space, const Vec3& xhat) {
    const int d = space.dim();
    int e[3] = {0, 0, 0};
    for (int a = 0; a < d; ++a) e[a] = element_of(space.axes[a], xhat[a]);
    return space.element_index(std::span<const int>(e, d));
}

} // namespace

InterfaceSegmentation merge_interface(const InterfaceFace& face,
                                      const TensorSplineSpace& left_space,
                                      const TensorSplineSpace& right_space) {
    const int d = left_space.dim();
    if (right_space.dim() != d)
        throw std::invalid_argument("merge_interface: mixed dimensions");
    const int fd = d - 1;
    const auto la = face_axes(face.left_face, d);
    const auto ra = face_axes(face.right_face, d);

    // merged breakpoints per left-face axis: own trace plus the other
    // side's trace mapped through the orientation
    std::vector<double> merged[2];
    for (int j = 0; j < fd; ++j) {
        const auto& own = left_space.axes[la[j]].breakpoints();
        const int rj = face.orientation.perm[j];
        const auto& other = right_space.axes[ra[rj]].breakpoints();
        std::vector<double> mapped(other.size());
        for (std::size_t i = 0; i < other.size(); ++i)
            mapped[i] = face.orientation.flip[j] ? 1.0 - other[i] : other[i];
        merged[j] = merged_breakpoints(own, mapped);
    }

    InterfaceSegmentation seg;
    seg.face = face;
    seg.face_dim = fd;
    int counts[2] = {1, 1};
    for (int j = 0; j < fd; ++j) counts[j] = static_cast<int>(merged[j].size()) - 1;

    int idx[2] = {0, 0};
    const int total = counts[0] * counts[1];
    seg.cells.reserve(total);
    for (int c = 0; c < total; ++c) {
        InterfaceCell cell;
        double mid[2] = {0.5, 0.5};
        for (int j = 0; j < fd; ++j) {
            cell.lo[j] = merged[j][idx[j]];
            cell.hi[j] = merged[j][idx[j] + 1];
            mid[j] = 0.5 * (cell.lo[j] + cell.hi[j]);
        }
        const Vec3 xl = face_to_volume(face.left_face, std::span<const double>(mid, fd), d);
        cell.left_element = volume_element_at(left_space, xl);
        const auto s = map_face_coords(face.orientation, std::span<const double>(mid, fd), fd);
        const Vec3 xr = face_to_volume(face.right_face, std::span<const double>(s.data(), fd), d);
        cell.right_element = volume_element_at(right_space, xr);
        seg.cells.push_back(cell);

        for (int j = 0; j < fd; ++j) {
            if (++idx[j] < counts[j]) break;
            idx[j] = 0;
        }
    }
    return seg;
}

namespace {

FaceQuadrature cells_quadrature(const InterfaceFace* face, std::span<const InterfaceCell> cells,
                                const FaceSelector& left_face, int d, int n_per_axis) {
    const int fd = d - 1;
    const QuadratureRule rule = gauss_rule(n_per_axis);
    int per_cell = 1;
    for (int j = 0; j < fd; ++j) per_cell *= n_per_axis;

    FaceQuadrature out;
    out.dim = d;
    const std::size_t total = cells.size() * per_cell;
    out.left_xhat.reserve(total * d);
    out.face_coords.reserve(total * fd);
    out.weights.reserve(total);
    if (face != nullptr) out.right_xhat.reserve(total * d);

    for (const auto& cell : cells) {
        int idx[2] = {0, 0};
        for (int p = 0; p < per_cell; ++p) {
            double t[2], w = 1.0;
            for (int j = 0; j < fd; ++j) {
                const double len = cell.hi[j] - cell.lo[j];
                t[j] = cell.lo[j] + len * rule.points[idx[j]];
                w *= len * rule.weights[idx[j]];
            }
            const Vec3 xl = face_to_volume(left_face, std::span<const double>(t, fd), d);
            for (int a = 0; a < d; ++a) out.left_xhat.push_back(xl[a]);
            for (int j = 0; j < fd; ++j) out.face_coords.push_back(t[j]);
            out.weights.push_back(w);
            if (face != nullptr) {
                const auto s =
                    map_face_coords(face->orientation, std::span<const double>(t, fd), fd);
                const Vec3 xr =
                    face_to_volume(face->right_face, std::span<const double>(s.data(), fd), d);
                for (int a = 0; a < d; ++a) out.right_xhat.push_back(xr[a]);
            }
            for (int j = 0; j < fd; ++j) {
                if (++idx[j] < n_per_axis) break;
                idx[j] = 0;
            }
        }
    }
    return out;
}

} // namespace

FaceQuadrature face_quadrature(const InterfaceSegmentation& seg, int n_per_axis) {
    const int d = seg.face_dim + 1;
    return cells_quadrature(&seg.face, seg.cells, seg.face.left_face, d, n_per_axis);
}

FaceQuadrature boundary_face_quadrature(const TensorSplineSpace& space, const FaceSelector& face,
                                        int n_per_axis) {
    const int d = space.dim();
    const int fd = d - 1;
    const auto fa = face_axes(face, d);

    std::vector<InterfaceCell> cells;
    int counts[2] = {1, 1};
    for (int j = 0; j < fd; ++j) counts[j] = space.axes[fa[j]].num_elements();
    int idx[2] = {0, 0};
    const int total = counts[0] * counts[1];
    cells.reserve(total);
    for (int c = 0; c < total; ++c) {
        InterfaceCell cell;
        for (int j = 0; j < fd; ++j) {
            cell.lo[j] = space.axes[fa[j]].element_start(idx[j]);
            cell.hi[j] = space.axes[fa[j]].element_end(idx[j]);
        }
        cells.push_back(cell);
        for (int j = 0; j < fd; ++j) {
            if (++idx[j] < counts[j]) break;
            idx[j] = 0;
        }
    }
    return cells_quadrature(nullptr, cells, face, d, n_per_axis);
}

} // namespace dgiga
