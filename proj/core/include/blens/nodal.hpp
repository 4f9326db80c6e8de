#pragma once

#include <functional>
#include <string>
#include <vector>

#include "blens/billiards.hpp"
#include "blens/geometry.hpp"

namespace blens {

// Uniformly sampled scalar field, row-major with x fastest.
struct ScalarGrid {
    Vec2 origin{0.0, 0.0};  // coordinates of sample (0, 0)
    double step = 0.1;
    int nx = 0, ny = 0;
    std::vector<double> values;

    double at(int ix, int iy) const { return values[static_cast<std::size_t>(iy) * nx + ix]; }
    Vec2 point(int ix, int iy) const { return {origin[0] + ix * step, origin[1] + iy * step}; }
    double scale() const;  // max |value|
};

ScalarGrid tabulate_grid(const std::function<double(const Vec2&)>& f, const Vec2& origin,
                         double step, int nx, int ny);

// One level-zero polyline. Closed contours also carry their enclosed area.
struct NodalContour {
    std::vector<Vec2> points;
    bool closed = false;
    double area = 0.0;  // absolute enclosed area, closed contours only
};

// Contours, sign-domain labels and the containment forest of the closed
// contours of one sampled field.
struct NodalAnalysis {
    ScalarGrid grid;
    std::vector<NodalContour> contours;
    // per grid node: component id, or -1 on nodes too close to the zero set
    std::vector<int> labels;
    int domain_count = 0;
    // per contour: index of the directly enclosing closed contour, -1 when
    // outermost or open
    std::vector<int> enclosing;
};

// Marching squares with linear interpolation on cell edges; ambiguous saddle
// cells are split by the sign of the cell-center average. Chains sharing an
// edge crossing are joined; a chain whose free endpoints land within one cell
// diagonal closes up. Requires step <= 0.4 so oscillations of unit-frequency
// profiles are resolved, and rejects an identically zero grid as degenerate.
NodalAnalysis extract_nodal(const ScalarGrid& grid);

// Number of 4-connected sign components of the sampled field. Nodes with
// |value| <= 1e-12 * scale separate components and are left unlabeled.
int count_nodal_domains(const ScalarGrid& grid);

// Rooted tree in canonical form: children sorted by their encodings.
struct RootedTree {
    std::vector<RootedTree> children;
};

// Sorts child subtrees recursively; idempotent.
RootedTree canonical_tree(RootedTree t);

// Canonical parenthesis encoding; equal trees have equal encodings.
std::string tree_encoding(const RootedTree& t);

// Nesting tree of the closed contour `component`: one vertex per nodal
// domain strictly inside it, the root being the domain adjacent to the
// contour itself, children ordered canonically. Contours touching the grid
// boundary stay open and are rejected.
RootedTree nesting_tree(const NodalAnalysis& analysis, int component);

// Worst |bilinear interpolant| over all contour points, relative to the
// field scale; extraction keeps this at roundoff level.
double contour_max_residual(const NodalAnalysis& analysis);

enum class CritKind { Minimum, Maximum, Saddle, Degenerate };

struct CriticalPoint {
    Vec2 w{0.0, 0.0};  // window offset from the base point
    Vec2 z{0.0, 0.0};  // physical location
    CritKind kind = CritKind::Degenerate;
    double grad_norm = 0.0;
    double hess_det = 0.0;
};

struct CriticalSearch {
    std::vector<CriticalPoint> points;
    int dropped = 0;  // seeds whose Newton iteration left the window or stalled
};

// Critical points of the rescaled profile w -> u(z0 + w / sqrt(lambda)) over
// the ball |w| <= window. Seeds are grid-local extrema on a seeds x seeds
// lattice; Newton runs on the analytic gradient with the Hessian regularized
// through its spectral decomposition, so ridge-like degenerate sets are still
// reached and reported as degenerate. Convergence at |grad| <= 1e-10 * scale,
// nondegeneracy at |det H| >= 1e-8 * scale.
CriticalSearch find_critical_points(const EigenExpansion& e, const Vec2& z0, double window,
                                    int seeds);

}  // namespace blens
