#pragma once

// Shared plumbing for the acceptance binaries: each criterion is a standalone
// executable that prints one [PASS]/[FAIL] line per clause, a final verdict
// line, and exits nonzero when any clause failed.  All tolerances live at the
// top of the respective binary, fixed before the run.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#include "shapeflow/bspline.hpp"
#include "shapeflow/shape_grid.hpp"

namespace acceptance {

struct Clause {
    std::string label;
    bool pass = false;
    std::string detail;
};

class Report {
  public:
    explicit Report(std::string name) : name_(std::move(name)) {}

    void check(const std::string& label, bool pass, const std::string& detail = "") {
        clauses_.push_back({label, pass, detail});
    }

    /** Prints all clause lines plus the verdict; returns the process exit code. */
    int finish() const {
        bool all = true;
        for (const auto& c : clauses_) {
            std::printf("  [%s] %s%s%s\n", c.pass ? "PASS" : "FAIL", c.label.c_str(),
                        c.detail.empty() ? "" : " -- ", c.detail.c_str());
            all = all && c.pass;
        }
        std::printf("%s: %s\n", name_.c_str(), all ? "PASS" : "FAIL");
        return all ? 0 : 1;
    }

  private:
    std::string name_;
    std::vector<Clause> clauses_;
};

inline std::string fmt(const char* format, double a) {
    char buffer[160];
    std::snprintf(buffer, sizeof buffer, format, a);
    return buffer;
}

inline std::string fmt2(const char* format, double a, double b) {
    char buffer[160];
    std::snprintf(buffer, sizeof buffer, format, a, b);
    return buffer;
}

struct Band {
    double lo = 0.0, hi = 0.0;
    bool holds(double v) const { return lo <= v && v <= hi; }
};

/** Extremes of the shape's boundaries over the obstacle's x-extent. */
struct FootprintExtremes {
    double lower_min = 0.0; // lowest point of the lower boundary
    double upper_max = 0.0; // highest point of the upper boundary
};

inline FootprintExtremes boundary_extremes(const shapeflow::ShapeParams& shape,
                                           const shapeflow::BSplineBasis& basis,
                                           double length, double x_lo, double x_hi) {
    x_lo = std::max(x_lo, 0.0);
    x_hi = std::min(x_hi, length);
    FootprintExtremes out{1e300, -1e300};
    const int samples = 1024;
    for (int i = 0; i <= samples; ++i) {
        const double x = x_lo + (x_hi - x_lo) * i / samples;
        const Eigen::VectorXd b = basis.eval(x / length);
        const double ml = b.dot(shape.meanline);
        const double th = b.dot(shape.thickness);
        out.lower_min = std::min(out.lower_min, ml - th / 2.0);
        out.upper_max = std::max(out.upper_max, ml + th / 2.0);
    }
    return out;
}

class Stopwatch {
  public:
    Stopwatch() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_)
            .count();
    }

  private:
    std::chrono::steady_clock::time_point start_;
};

} // namespace acceptance
