#pragma once

#include "barrier_comp/oracle.hpp"
#include "barrier_comp/sim.hpp"

#include <cstdio>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace barrier_comp {

namespace detail {

inline std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline const char* case_name(FilterResult::Case c) {
    switch (c) {
        case FilterResult::Case::PassThrough: return "passthrough";
        case FilterResult::Case::Inactive: return "inactive";
        case FilterResult::Case::Active: return "active";
    }
    return "unknown";
}

inline std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file '" + path + "'");
    return out;
}

}  // namespace detail

// Grid CSV, columns x1,x2,h,h_c (general-dimension grids emit x1..xn).
inline void write_grid_csv(const std::string& path, const MembershipGrid& grid,
                           std::optional<uint64_t> seed = std::nullopt) {
    std::ofstream out = detail::open_out(path);
    if (seed) out << "# seed=" << *seed << "\n";
    for (int d = 0; d < grid.dimension; ++d) out << "x" << (d + 1) << ",";
    out << "h,h_c\n";
    for (size_t i = 0; i < grid.h.size(); ++i) {
        const Vec x = grid.point(i);
        for (int d = 0; d < grid.dimension; ++d) out << detail::fmt(x[d]) << ",";
        out << detail::fmt(grid.h[i]) << "," << detail::fmt(grid.h_c[i]) << "\n";
    }
}

inline void write_trajectory_csv(const std::string& path, const Trajectory& traj,
                                 std::optional<uint64_t> seed = std::nullopt) {
    std::ofstream out = detail::open_out(path);
    if (seed) out << "# seed=" << *seed << "\n";
    const int n = traj.states.empty() ? 0 : static_cast<int>(traj.states[0].size());
    const int m = traj.inputs.empty() ? 0 : static_cast<int>(traj.inputs[0].size());
    out << "t";
    for (int d = 0; d < n; ++d) out << ",x" << (d + 1);
    for (int d = 0; d < m; ++d) out << ",u" << (d + 1);
    for (int d = 0; d < m; ++d) out << ",u_des" << (d + 1);
    out << ",h,h_c,case\n";
    for (size_t k = 0; k < traj.times.size(); ++k) {
        out << detail::fmt(traj.times[k]);
        for (int d = 0; d < n; ++d) out << "," << detail::fmt(traj.states[k][d]);
        for (int d = 0; d < m; ++d) out << "," << detail::fmt(traj.inputs[k][d]);
        for (int d = 0; d < m; ++d) out << "," << detail::fmt(traj.desired_inputs[k][d]);
        out << "," << detail::fmt(traj.h_trace[k]) << "," << detail::fmt(traj.h_c_trace[k])
            << "," << detail::case_name(traj.filter_cases[k]) << "\n";
    }
}

// --- level-set extraction ----------------------------------------------

struct Segment {
    double x0, y0, x1, y1;
};

// Marching squares on a 2-D grid field; returns zero-level segments.
inline std::vector<Segment> zero_contour(const MembershipGrid& grid, bool use_oracle = false) {
    if (grid.dimension != 2) throw SpecError("zero_contour: 2-D grids only");
    const int res = grid.resolution;
    const std::vector<double>& f = use_oracle ? grid.h_c : grid.h;
    auto at = [&](int i, int j) { return f[static_cast<size_t>(i) * res + j]; };
    auto coord = [&](int i, int j) {
        return std::pair<double, double>{
            grid.lo[0] + (grid.hi[0] - grid.lo[0]) * i / double(res - 1),
            grid.lo[1] + (grid.hi[1] - grid.lo[1]) * j / double(res - 1)};
    };
    auto lerp = [](double a, double b) {
        const double d = a - b;
        return d == 0.0 ? 0.5 : a / d;
    };

    std::vector<Segment> segments;
    for (int i = 0; i + 1 < res; ++i) {
        for (int j = 0; j + 1 < res; ++j) {
            const double v00 = at(i, j), v10 = at(i + 1, j);
            const double v01 = at(i, j + 1), v11 = at(i + 1, j + 1);
            int code = 0;
            if (v00 >= 0) code |= 1;
            if (v10 >= 0) code |= 2;
            if (v11 >= 0) code |= 4;
            if (v01 >= 0) code |= 8;
            if (code == 0 || code == 15) continue;

            const auto [x0, y0] = coord(i, j);
            const auto [x1, y1] = coord(i + 1, j + 1);
            // edge crossing points: bottom (y=y0), right (x=x1), top (y=y1), left (x=x0)
            const double bx = x0 + (x1 - x0) * lerp(v00, v10);
            const double rx = y0 + (y1 - y0) * lerp(v10, v11);
            const double tx = x0 + (x1 - x0) * lerp(v01, v11);
            const double lx = y0 + (y1 - y0) * lerp(v00, v01);
            auto add = [&](double ax, double ay, double cx, double cy) {
                segments.push_back({ax, ay, cx, cy});
            };
            switch (code) {
                case 1: case 14: add(bx, y0, x0, lx); break;
                case 2: case 13: add(bx, y0, x1, rx); break;
                case 3: case 12: add(x0, lx, x1, rx); break;
                case 4: case 11: add(x1, rx, tx, y1); break;
                case 6: case 9:  add(bx, y0, tx, y1); break;
                case 7: case 8:  add(x0, lx, tx, y1); break;
                case 5:  add(bx, y0, x0, lx); add(x1, rx, tx, y1); break;
                case 10: add(bx, y0, x1, rx); add(x0, lx, tx, y1); break;
                default: break;
            }
        }
    }
    return segments;
}

// --- SVG rendering ------------------------------------------------------

class SvgCanvas {
public:
    SvgCanvas(double x_lo, double x_hi, double y_lo, double y_hi, int width = 640)
        : x_lo_(x_lo), x_hi_(x_hi), y_lo_(y_lo), y_hi_(y_hi), width_(width) {
        height_ = static_cast<int>(width * (y_hi - y_lo) / (x_hi - x_lo));
    }

    double px(double x) const { return (x - x_lo_) / (x_hi_ - x_lo_) * width_; }
    double py(double y) const { return (y_hi_ - y) / (y_hi_ - y_lo_) * height_; }

    void segments(const std::vector<Segment>& segs, const std::string& stroke,
                  double stroke_width = 1.5) {
        body_ << "<g stroke=\"" << stroke << "\" stroke-width=\"" << stroke_width
              << "\" fill=\"none\">\n";
        for (const Segment& s : segs)
            body_ << "<line x1=\"" << px(s.x0) << "\" y1=\"" << py(s.y0) << "\" x2=\""
                  << px(s.x1) << "\" y2=\"" << py(s.y1) << "\"/>\n";
        body_ << "</g>\n";
    }

    void polyline(const std::vector<Vec>& points, const std::string& stroke,
                  double stroke_width = 2.0) {
        body_ << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\""
              << stroke_width << "\" points=\"";
        for (const Vec& p : points) body_ << px(p[0]) << "," << py(p[1]) << " ";
        body_ << "\"/>\n";
    }

    void circle(double cx, double cy, double r_world, const std::string& stroke) {
        const double r = r_world / (x_hi_ - x_lo_) * width_;
        body_ << "<circle cx=\"" << px(cx) << "\" cy=\"" << py(cy) << "\" r=\"" << r
              << "\" fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"1\"/>\n";
    }

    void marker(double x, double y, const std::string& fill) {
        body_ << "<circle cx=\"" << px(x) << "\" cy=\"" << py(y)
              << "\" r=\"4\" fill=\"" << fill << "\"/>\n";
    }

    void line(double ax, double ay, double bx, double by, const std::string& stroke) {
        body_ << "<line x1=\"" << px(ax) << "\" y1=\"" << py(ay) << "\" x2=\"" << px(bx)
              << "\" y2=\"" << py(by) << "\" stroke=\"" << stroke
              << "\" stroke-width=\"1\" stroke-dasharray=\"4 3\"/>\n";
    }

    void write(const std::string& path) const {
        std::ofstream out = detail::open_out(path);
        out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width_ << "\" height=\""
            << height_ << "\" viewBox=\"0 0 " << width_ << " " << height_ << "\">\n"
            << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
            << body_.str() << "</svg>\n";
    }

private:
    double x_lo_, x_hi_, y_lo_, y_hi_;
    int width_, height_;
    std::ostringstream body_;
};

// Dashed boundary of every leaf primitive, clipped to the canvas box.
inline void draw_leaf_outlines(SvgCanvas& canvas, const LayeredSpec& spec, const Vec& lo,
                               const Vec& hi) {
    for (const LeafSpec& leaf : spec.leaves) {
        if (const auto* c = std::get_if<Circle>(&leaf.primitive)) {
            canvas.circle(c->center[0], c->center[1], c->radius, "#888888");
        } else if (const auto* hs = std::get_if<HalfSpace>(&leaf.primitive)) {
            // boundary line through the anchor, orthogonal to the normal
            const Vec t = Vec{{-hs->normal[1], hs->normal[0]}}.normalized();
            const double span = (hi - lo).norm();
            const Vec a = hs->anchor - span * t;
            const Vec b = hs->anchor + span * t;
            canvas.line(a[0], a[1], b[0], b[1], "#888888");
        }
    }
}

inline void write_grid_svg(const std::string& path, const MembershipGrid& grid,
                           const LayeredSpec& spec) {
    if (grid.dimension != 2) throw SpecError("write_grid_svg: 2-D grids only");
    SvgCanvas canvas(grid.lo[0], grid.hi[0], grid.lo[1], grid.hi[1]);
    draw_leaf_outlines(canvas, spec, grid.lo, grid.hi);
    canvas.segments(zero_contour(grid, true), "#222222", 1.0);   // exact boundary
    canvas.segments(zero_contour(grid, false), "#d62728", 1.5);  // smoothed boundary
    canvas.write(path);
}

inline void write_trajectory_svg(const std::string& path, const Trajectory& traj,
                                 const LayeredSpec& spec, const Vec& lo, const Vec& hi,
                                 const std::optional<Vec>& target = std::nullopt) {
    SvgCanvas canvas(lo[0], hi[0], lo[1], hi[1]);
    draw_leaf_outlines(canvas, spec, lo, hi);
    canvas.polyline(traj.states, "#1f77b4");
    if (!traj.states.empty())
        canvas.marker(traj.states.front()[0], traj.states.front()[1], "#2ca02c");
    if (target) canvas.marker((*target)[0], (*target)[1], "#d62728");
    canvas.write(path);
}

}  // namespace barrier_comp
