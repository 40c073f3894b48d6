#pragma once

#include <string>
#include <vector>

namespace mcr::svg {

struct MapCell {
    int cell_id = 0;
    int row = 0;
    int col = 0;
    int territory = 0;
    double workers = 0.0;
};

struct MapLink {
    int from = 0;
    int to = 0;
};

/// Grid map: cells shaded by worker density, territory borders drawn
/// between cells of different mayors, regional links as lines between
/// cell centres. Grid size is taken from the cells themselves.
std::string render_map(const std::vector<MapCell>& cells, const std::vector<MapLink>& links, const std::string& title);

struct Point {
    double x = 0.0;
    double y = 0.0;
};

struct EllipseSpec {
    Point mean;
    double cov_xx = 0.0;
    double cov_xy = 0.0;
    double cov_yy = 0.0;
};

/// Scatter of per-run finals plus each group's 1-σ ellipse in
/// accessibility × travel-time axes. A zero covariance draws a point.
struct EllipseGroup {
    std::string label;
    EllipseSpec ellipse;
    std::vector<Point> runs;
};
std::string render_ellipses(const std::vector<EllipseGroup>& groups, const std::string& title);

struct Curve {
    std::string label;
    std::vector<Point> points; // (ξ, mean accessibility)
};
std::string render_curves(const std::vector<Curve>& curves, const std::string& x_label, const std::string& y_label,
                          const std::string& title);

/// Points of the 1-σ contour of a 2×2 covariance, closed polygon.
std::vector<Point> ellipse_contour(const EllipseSpec& e, int segments = 72);

} // namespace mcr::svg
