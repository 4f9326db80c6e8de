#include "blens/nodal.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <queue>
#include <stdexcept>

#include "blens/numerics.hpp"

namespace blens {

namespace {

constexpr double kSignCut = 1e-12;       // relative: nodes this close to zero stay unlabeled
constexpr double kGradTol = 1e-10;       // relative convergence bound on |grad|
constexpr double kDegenerateDet = 1e-8;  // relative nondegeneracy bound on |det H|

void check_grid(const ScalarGrid& g) {
    if (g.nx < 2 || g.ny < 2) throw std::invalid_argument("grid needs at least 2x2 samples");
    if (!(g.step > 0.0)) throw std::invalid_argument("grid step must be positive");
    if (g.values.size() != static_cast<std::size_t>(g.nx) * g.ny)
        throw std::invalid_argument("grid value count does not match dimensions");
}

// Sign assignment shared by the cell pass and the flood fill: zero counts as
// the negative side so both agree on which edges cross.
bool positive(double v) { return v > 0.0; }

struct Segment {
    int a, b;  // global edge ids carrying the two endpoints
};

int flood_fill(const ScalarGrid& g, std::vector<int>& labels) {
    const int nx = g.nx, ny = g.ny;
    const double cut = kSignCut * g.scale();
    labels.assign(static_cast<std::size_t>(nx) * ny, -1);
    std::vector<signed char> sign(labels.size(), 0);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const double v = g.values[i];
        if (std::abs(v) > cut) sign[i] = positive(v) ? 1 : -1;
    }
    int count = 0;
    std::queue<int> frontier;
    for (int iy = 0; iy < ny; ++iy) {
        for (int ix = 0; ix < nx; ++ix) {
            const int i = iy * nx + ix;
            if (sign[i] == 0 || labels[i] >= 0) continue;
            const int id = count++;
            labels[i] = id;
            frontier.push(i);
            while (!frontier.empty()) {
                const int j = frontier.front();
                frontier.pop();
                const int jx = j % nx, jy = j / nx;
                const int steps[4] = {jx > 0 ? j - 1 : -1, jx + 1 < nx ? j + 1 : -1,
                                      jy > 0 ? j - nx : -1, jy + 1 < ny ? j + nx : -1};
                for (int k : steps) {
                    if (k < 0 || labels[k] >= 0 || sign[k] != sign[j]) continue;
                    labels[k] = id;
                    frontier.push(k);
                }
            }
        }
    }
    return count;
}

double polygon_area(const std::vector<Vec2>& pts) {
    double twice = 0.0;
    const std::size_t n = pts.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& p = pts[i];
        const Vec2& q = pts[(i + 1) % n];
        twice += p[0] * q[1] - p[1] * q[0];
    }
    return std::abs(twice) * 0.5;
}

bool point_in_polygon(const std::vector<Vec2>& poly, const Vec2& p) {
    bool inside = false;
    const std::size_t n = poly.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const Vec2& a = poly[j];
        const Vec2& b = poly[i];
        if ((b[1] > p[1]) == (a[1] > p[1])) continue;
        const double xint = b[0] + (p[1] - b[1]) / (a[1] - b[1]) * (a[0] - b[0]);
        if (p[0] < xint) inside = !inside;
    }
    return inside;
}

RootedTree contour_subtree(const std::vector<std::vector<int>>& inside_of, int component);

std::string encode(const RootedTree& t) {
    std::string s = "(";
    for (const RootedTree& c : t.children) s += encode(c);
    s += ")";
    return s;
}

RootedTree canonicalized(RootedTree t) {
    for (RootedTree& c : t.children) c = canonicalized(std::move(c));
    std::sort(t.children.begin(), t.children.end(),
              [](const RootedTree& a, const RootedTree& b) { return encode(a) < encode(b); });
    return t;
}

RootedTree contour_subtree(const std::vector<std::vector<int>>& inside_of, int component) {
    RootedTree node;
    for (int child : inside_of[component]) node.children.push_back(contour_subtree(inside_of, child));
    return node;
}

}  // namespace

double ScalarGrid::scale() const {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
}

ScalarGrid tabulate_grid(const std::function<double(const Vec2&)>& f, const Vec2& origin,
                         double step, int nx, int ny) {
    if (nx < 1 || ny < 1) throw std::invalid_argument("grid dimensions must be positive");
    if (!(step > 0.0)) throw std::invalid_argument("grid step must be positive");
    ScalarGrid g;
    g.origin = origin;
    g.step = step;
    g.nx = nx;
    g.ny = ny;
    g.values.resize(static_cast<std::size_t>(nx) * ny);
    for (int iy = 0; iy < ny; ++iy)
        for (int ix = 0; ix < nx; ++ix) g.values[static_cast<std::size_t>(iy) * nx + ix] = f(g.point(ix, iy));
    return g;
}

NodalAnalysis extract_nodal(const ScalarGrid& grid) {
    check_grid(grid);
    if (grid.step > 0.4) throw std::invalid_argument("grid step exceeds 0.4, oscillations unresolved");
    const double sc = grid.scale();
    if (sc == 0.0) throw std::invalid_argument("identically zero grid is degenerate");

    const int nx = grid.nx, ny = grid.ny;
    // Edge crossings: horizontal edges first, then vertical, each interpolated
    // once so adjacent cells share bitwise identical points.
    const int nh = (nx - 1) * ny;
    const int nv = nx * (ny - 1);
    std::vector<double> cross(static_cast<std::size_t>(nh) + nv, -1.0);
    auto hedge = [nx](int ix, int iy) { return iy * (nx - 1) + ix; };
    auto vedge = [nx, nh](int ix, int iy) { return nh + iy * nx + ix; };
    for (int iy = 0; iy < ny; ++iy)
        for (int ix = 0; ix + 1 < nx; ++ix) {
            const double va = grid.at(ix, iy), vb = grid.at(ix + 1, iy);
            if (positive(va) != positive(vb)) cross[hedge(ix, iy)] = va / (va - vb);
        }
    for (int iy = 0; iy + 1 < ny; ++iy)
        for (int ix = 0; ix < nx; ++ix) {
            const double va = grid.at(ix, iy), vb = grid.at(ix, iy + 1);
            if (positive(va) != positive(vb)) cross[vedge(ix, iy)] = va / (va - vb);
        }
    auto edge_point = [&](int id) -> Vec2 {
        const double t = cross[id];
        if (id < nh) {
            const int iy = id / (nx - 1), ix = id % (nx - 1);
            return {grid.origin[0] + (ix + t) * grid.step, grid.origin[1] + iy * grid.step};
        }
        const int k = id - nh;
        const int iy = k / nx, ix = k % nx;
        return {grid.origin[0] + ix * grid.step, grid.origin[1] + (iy + t) * grid.step};
    };

    // Cell pass, row parallel with a deterministic merge.
    std::vector<std::vector<Segment>> rows(static_cast<std::size_t>(ny - 1));
    parallel_for(static_cast<std::size_t>(ny - 1), 0, [&](std::size_t row) {
        const int iy = static_cast<int>(row);
        std::vector<Segment>& out = rows[row];
        for (int ix = 0; ix + 1 < nx; ++ix) {
            const bool a = positive(grid.at(ix, iy));
            const bool b = positive(grid.at(ix + 1, iy));
            const bool c = positive(grid.at(ix + 1, iy + 1));
            const bool d = positive(grid.at(ix, iy + 1));
            const int code = (a ? 1 : 0) | (b ? 2 : 0) | (c ? 4 : 0) | (d ? 8 : 0);
            if (code == 0 || code == 15) continue;
            const int bottom = hedge(ix, iy), top = hedge(ix, iy + 1);
            const int left = vedge(ix, iy), right = vedge(ix + 1, iy);
            switch (code) {
                case 1: case 14: out.push_back({left, bottom}); break;
                case 2: case 13: out.push_back({bottom, right}); break;
                case 3: case 12: out.push_back({left, right}); break;
                case 4: case 11: out.push_back({right, top}); break;
                case 6: case 9: out.push_back({bottom, top}); break;
                case 7: case 8: out.push_back({left, top}); break;
                case 5: {
                    // Saddle cell, corners a and c positive: the cell-center
                    // sample decides whether the positive region connects.
                    const double center = 0.25 * (grid.at(ix, iy) + grid.at(ix + 1, iy) +
                                                  grid.at(ix + 1, iy + 1) + grid.at(ix, iy + 1));
                    if (positive(center)) {
                        out.push_back({left, top});
                        out.push_back({bottom, right});
                    } else {
                        out.push_back({left, bottom});
                        out.push_back({right, top});
                    }
                    break;
                }
                case 10: {
                    const double center = 0.25 * (grid.at(ix, iy) + grid.at(ix + 1, iy) +
                                                  grid.at(ix + 1, iy + 1) + grid.at(ix, iy + 1));
                    if (positive(center)) {
                        out.push_back({left, bottom});
                        out.push_back({right, top});
                    } else {
                        out.push_back({left, top});
                        out.push_back({bottom, right});
                    }
                    break;
                }
                default: break;
            }
        }
    });
    std::vector<Segment> segments;
    for (const auto& r : rows) segments.insert(segments.end(), r.begin(), r.end());

    // Chain segments into polylines over the shared-edge graph. Every crossing
    // edge touches at most two segments, so endpoints have degree one or two.
    std::vector<std::array<int, 2>> incident(cross.size(), {-1, -1});
    for (std::size_t s = 0; s < segments.size(); ++s) {
        for (int id : {segments[s].a, segments[s].b}) {
            if (incident[id][0] < 0)
                incident[id][0] = static_cast<int>(s);
            else
                incident[id][1] = static_cast<int>(s);
        }
    }
    std::vector<char> used(segments.size(), 0);
    NodalAnalysis analysis;
    analysis.grid = grid;
    auto walk = [&](std::size_t start) {
        std::vector<int> edges;
        int seg = static_cast<int>(start);
        int at = segments[start].a;
        // Rewind to a free end so open chains start at a boundary.
        for (;;) {
            const int other = incident[at][0] == seg ? incident[at][1] : incident[at][0];
            if (other < 0 || other == static_cast<int>(start)) break;
            seg = other;
            at = segments[seg].a == at ? segments[seg].b : segments[seg].a;
        }
        edges.push_back(at);
        int cursor = seg;
        bool cycle = false;
        for (;;) {
            used[cursor] = 1;
            const int next = segments[cursor].a == edges.back() ? segments[cursor].b : segments[cursor].a;
            if (next == edges.front()) {
                cycle = true;
                break;
            }
            edges.push_back(next);
            const int cont = incident[next][0] == cursor ? incident[next][1] : incident[next][0];
            if (cont < 0 || used[cont]) break;
            cursor = cont;
        }
        NodalContour c;
        c.points.reserve(edges.size());
        for (int id : edges) c.points.push_back(edge_point(id));
        if (cycle) {
            c.closed = true;
        } else if (c.points.size() > 2) {
            const Vec2& p = c.points.front();
            const Vec2& q = c.points.back();
            const double gap = std::hypot(p[0] - q[0], p[1] - q[1]);
            c.closed = gap <= grid.step * std::sqrt(2.0);
        }
        if (c.closed) c.area = polygon_area(c.points);
        analysis.contours.push_back(std::move(c));
    };
    for (std::size_t s = 0; s < segments.size(); ++s)
        if (!used[s]) walk(s);

    analysis.domain_count = flood_fill(grid, analysis.labels);

    // Containment forest of the closed contours: the direct parent is the
    // smallest-area closed contour enclosing a representative point.
    const std::size_t m = analysis.contours.size();
    analysis.enclosing.assign(m, -1);
    for (std::size_t i = 0; i < m; ++i) {
        if (!analysis.contours[i].closed) continue;
        const Vec2& probe = analysis.contours[i].points.front();
        int parent = -1;
        for (std::size_t j = 0; j < m; ++j) {
            if (j == i || !analysis.contours[j].closed) continue;
            if (analysis.contours[j].area <= analysis.contours[i].area) continue;
            if (!point_in_polygon(analysis.contours[j].points, probe)) continue;
            if (parent < 0 || analysis.contours[j].area < analysis.contours[parent].area)
                parent = static_cast<int>(j);
        }
        analysis.enclosing[i] = parent;
    }
    return analysis;
}

int count_nodal_domains(const ScalarGrid& grid) {
    check_grid(grid);
    std::vector<int> labels;
    return flood_fill(grid, labels);
}

RootedTree canonical_tree(RootedTree t) { return canonicalized(std::move(t)); }

std::string tree_encoding(const RootedTree& t) { return encode(canonicalized(t)); }

RootedTree nesting_tree(const NodalAnalysis& analysis, int component) {
    if (component < 0 || component >= static_cast<int>(analysis.contours.size()))
        throw std::invalid_argument("contour index out of range");
    if (!analysis.contours[component].closed)
        throw std::invalid_argument("open contour bounds no nesting tree");
    // Vertices are the domains inside the component: the one adjacent to it is
    // the root, and every directly enclosed contour contributes the domain
    // just inside itself as a child, recursively.
    std::vector<std::vector<int>> inside_of(analysis.contours.size());
    for (std::size_t i = 0; i < analysis.enclosing.size(); ++i)
        if (analysis.enclosing[i] >= 0) inside_of[analysis.enclosing[i]].push_back(static_cast<int>(i));
    return canonicalized(contour_subtree(inside_of, component));
}

double contour_max_residual(const NodalAnalysis& analysis) {
    const ScalarGrid& g = analysis.grid;
    const double sc = g.scale();
    if (sc == 0.0) return 0.0;
    double worst = 0.0;
    for (const NodalContour& c : analysis.contours) {
        for (const Vec2& p : c.points) {
            double fx = (p[0] - g.origin[0]) / g.step;
            double fy = (p[1] - g.origin[1]) / g.step;
            int ix = std::clamp(static_cast<int>(std::floor(fx)), 0, g.nx - 2);
            int iy = std::clamp(static_cast<int>(std::floor(fy)), 0, g.ny - 2);
            const double tx = fx - ix, ty = fy - iy;
            const double v = (1 - tx) * (1 - ty) * g.at(ix, iy) + tx * (1 - ty) * g.at(ix + 1, iy) +
                             (1 - tx) * ty * g.at(ix, iy + 1) + tx * ty * g.at(ix + 1, iy + 1);
            worst = std::max(worst, std::abs(v));
        }
    }
    return worst / sc;
}

CriticalSearch find_critical_points(const EigenExpansion& e, const Vec2& z0, double window,
                                    int seeds) {
    if (!(window > 0.0)) throw std::invalid_argument("window radius must be positive");
    if (seeds < 3) throw std::invalid_argument("seed lattice needs at least 3 nodes per axis");
    if (!(e.lambda > 0.0)) throw std::invalid_argument("expansion eigenvalue must be positive");
    const double rt = std::sqrt(e.lambda);
    auto profile = [&](const Vec2& w) {
        const Jet2 j = e.jet({z0[0] + w[0] / rt, z0[1] + w[1] / rt});
        return j;
    };

    // Seed lattice over the window square, masked to the ball.
    const double h = 2.0 * window / (seeds - 1);
    std::vector<double> val(static_cast<std::size_t>(seeds) * seeds);
    std::vector<char> live(val.size(), 0);
    double scale = 0.0;
    for (int iy = 0; iy < seeds; ++iy)
        for (int ix = 0; ix < seeds; ++ix) {
            const Vec2 w{-window + ix * h, -window + iy * h};
            const std::size_t i = static_cast<std::size_t>(iy) * seeds + ix;
            if (w[0] * w[0] + w[1] * w[1] > window * window * (1.0 + 1e-12)) continue;
            live[i] = 1;
            val[i] = e.value2({z0[0] + w[0] / rt, z0[1] + w[1] / rt});
            scale = std::max(scale, std::abs(val[i]));
        }
    if (scale == 0.0) throw std::invalid_argument("expansion vanishes on the whole seed lattice");

    CriticalSearch result;
    auto accept = [&](const Vec2& w, const Jet2& j) {
        for (const CriticalPoint& p : result.points) {
            const double dx = p.w[0] - w[0], dy = p.w[1] - w[1];
            if (dx * dx + dy * dy < 1e-12 * (1.0 + window) * (1.0 + window)) return;
        }
        CriticalPoint cp;
        cp.w = w;
        cp.z = {z0[0] + w[0] / rt, z0[1] + w[1] / rt};
        const double h11 = j.fxx / e.lambda, h12 = j.fxy / e.lambda, h22 = j.fyy / e.lambda;
        cp.grad_norm = std::hypot(j.fx, j.fy) / rt;
        cp.hess_det = h11 * h22 - h12 * h12;
        if (std::abs(cp.hess_det) < kDegenerateDet * scale)
            cp.kind = CritKind::Degenerate;
        else if (cp.hess_det < 0.0)
            cp.kind = CritKind::Saddle;
        else
            cp.kind = h11 + h22 < 0.0 ? CritKind::Maximum : CritKind::Minimum;
        result.points.push_back(cp);
    };

    for (int iy = 0; iy < seeds; ++iy)
        for (int ix = 0; ix < seeds; ++ix) {
            const std::size_t i = static_cast<std::size_t>(iy) * seeds + ix;
            if (!live[i]) continue;
            bool hi = true, lo = true;
            for (int dy = -1; dy <= 1; ++dy)
                for (int dx = -1; dx <= 1; ++dx) {
                    if (dx == 0 && dy == 0) continue;
                    const int jx = ix + dx, jy = iy + dy;
                    if (jx < 0 || jx >= seeds || jy < 0 || jy >= seeds) continue;
                    const std::size_t k = static_cast<std::size_t>(jy) * seeds + jx;
                    if (!live[k]) continue;
                    if (val[k] > val[i]) hi = false;
                    if (val[k] < val[i]) lo = false;
                }
            if (!hi && !lo) continue;

            Vec2 w{-window + ix * h, -window + iy * h};
            bool converged = false;
            Jet2 j{};
            for (int iter = 0; iter < 60; ++iter) {
                j = profile(w);
                const double gx = j.fx / rt, gy = j.fy / rt;
                if (std::hypot(gx, gy) <= kGradTol * scale) {
                    converged = true;
                    break;
                }
                // Spectral pseudo-inverse of the symmetric window Hessian so
                // ridge directions with vanishing curvature are skipped.
                const double h11 = j.fxx / e.lambda, h12 = j.fxy / e.lambda, h22 = j.fyy / e.lambda;
                const double mid = 0.5 * (h11 + h22);
                const double disc = std::hypot(0.5 * (h11 - h22), h12);
                const double l1 = mid + disc, l2 = mid - disc;
                double v1x, v1y;
                if (std::abs(h12) > 1e-300) {
                    v1x = l1 - h22;
                    v1y = h12;
                } else if (h11 >= h22) {
                    v1x = 1.0;
                    v1y = 0.0;
                } else {
                    v1x = 0.0;
                    v1y = 1.0;
                }
                const double n1 = std::hypot(v1x, v1y);
                v1x /= n1;
                v1y /= n1;
                const double v2x = -v1y, v2y = v1x;
                const double cut = 1e-10 * std::max({std::abs(l1), std::abs(l2), scale});
                double sx = 0.0, sy = 0.0;
                bool movable = false;
                if (std::abs(l1) > cut) {
                    const double c1 = (v1x * gx + v1y * gy) / l1;
                    sx -= c1 * v1x;
                    sy -= c1 * v1y;
                    movable = true;
                }
                if (std::abs(l2) > cut) {
                    const double c2 = (v2x * gx + v2y * gy) / l2;
                    sx -= c2 * v2x;
                    sy -= c2 * v2y;
                    movable = true;
                }
                if (!movable) break;
                const double slen = std::hypot(sx, sy);
                if (slen > 0.5) {
                    sx *= 0.5 / slen;
                    sy *= 0.5 / slen;
                }
                w[0] += sx;
                w[1] += sy;
                if (w[0] * w[0] + w[1] * w[1] > (window + 1.0) * (window + 1.0)) break;
            }
            if (converged && w[0] * w[0] + w[1] * w[1] <= window * window * (1.0 + 1e-9))
                accept(w, j);
            else
                ++result.dropped;
        }
    return result;
}

}  // namespace blens
