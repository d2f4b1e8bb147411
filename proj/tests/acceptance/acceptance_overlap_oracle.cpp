// Triangle/disk intersection area against two independent oracles: a
// 10^7-sample Monte-Carlo estimate per randomized pair (agreement within 3
// standard errors, plus a rule-of-three floor for empty/full counts), and the
// closed-form answers for analytically disjoint and fully contained
// configurations (exact to 1e-10).

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <random>

#include "shapeflow/circle_overlap.hpp"
#include "support.hpp"

using namespace shapeflow;
using namespace acceptance;

namespace {

constexpr int kPairs = 200;
constexpr int kSamples = 10'000'000;
constexpr double kSigmaFactor = 3.0;
constexpr double kAnalyticTolerance = 1e-10;

// Cheap, well-distributed generator for the 2 * 10^9 Monte-Carlo draws.
struct SplitMix64 {
    uint64_t state;
    uint64_t next() {
        uint64_t z = (state += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
    double uniform() { return (next() >> 11) * 0x1.0p-53; }
};

double triangle_area(const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                     const Eigen::Vector2d& c) {
    return 0.5 * std::abs((b - a).x() * (c - a).y() - (b - a).y() * (c - a).x());
}

} // namespace

int main() {
    Report report("overlap-area-oracle");

    std::mt19937_64 rng(0xa5ea0c71u);
    std::uniform_real_distribution<double> vertex(-1.5, 1.5);
    std::uniform_real_distribution<double> center(-1.0, 1.0);
    std::uniform_real_distribution<double> radius(0.2, 1.0);
    SplitMix64 mc{0x5eedbeefca11ab1eull};

    int mc_failures = 0;
    double worst_pull = 0.0; // |error| / allowance, worst over pairs
    for (int pair = 0; pair < kPairs; ++pair) {
        const Eigen::Vector2d a{vertex(rng), vertex(rng)};
        const Eigen::Vector2d b{vertex(rng), vertex(rng)};
        const Eigen::Vector2d c{vertex(rng), vertex(rng)};
        const ObstacleCircle circle{{center(rng), center(rng)}, radius(rng)};

        const double exact = triangle_circle_area(a, b, c, circle);
        const double area = triangle_area(a, b, c);

        long hits = 0;
        const double r2 = circle.radius * circle.radius;
        for (int s = 0; s < kSamples; ++s) {
            // Uniform point in the triangle via the square-root warp.
            const double u = std::sqrt(mc.uniform());
            const double v = mc.uniform();
            const Eigen::Vector2d p = a + u * ((b - a) + v * (c - b));
            if ((p - circle.center).squaredNorm() <= r2) ++hits;
        }
        const double p_hat = double(hits) / kSamples;
        const double estimate = area * p_hat;
        const double se = area * std::sqrt(p_hat * (1.0 - p_hat) / kSamples);
        const double allowance = kSigmaFactor * se + kSigmaFactor * area / kSamples;
        const double pull = std::abs(exact - estimate) / allowance;
        worst_pull = std::max(worst_pull, pull);
        if (pull > 1.0) ++mc_failures;
    }

    report.check("200 randomized pairs agree with 10^7-sample Monte Carlo within 3 "
                 "standard errors",
                 mc_failures == 0,
                 fmt2("failures=%g worst_error_over_allowance=%.3f", double(mc_failures),
                      worst_pull));

    // Analytic cases.  Small triangle near the center: fully inside the disk.
    {
        const Eigen::Vector2d a{-0.1, -0.1}, b{0.1, -0.05}, c{0.0, 0.12};
        const ObstacleCircle circle{{0.0, 0.0}, 1.0};
        const double exact = triangle_circle_area(a, b, c, circle);
        report.check("triangle fully inside the disk returns the triangle area",
                     std::abs(exact - triangle_area(a, b, c)) <= kAnalyticTolerance,
                     fmt("err=%.3g", std::abs(exact - triangle_area(a, b, c))));
    }
    // Large triangle around a small disk: the disk is fully contained.
    {
        const Eigen::Vector2d a{-10.0, -5.0}, b{10.0, -5.0}, c{0.0, 12.0};
        const ObstacleCircle circle{{0.2, 0.5}, 0.3};
        const double exact = triangle_circle_area(a, b, c, circle);
        const double disk = M_PI * circle.radius * circle.radius;
        report.check("disk fully inside the triangle returns the disk area",
                     std::abs(exact - disk) <= kAnalyticTolerance,
                     fmt("err=%.3g", std::abs(exact - disk)));
    }
    // Far-apart pair: exactly zero.
    {
        const Eigen::Vector2d a{5.0, 5.0}, b{6.0, 5.0}, c{5.5, 6.0};
        const ObstacleCircle circle{{-3.0, -3.0}, 1.0};
        const double exact = triangle_circle_area(a, b, c, circle);
        report.check("disjoint pair returns exactly zero", exact == 0.0,
                     fmt("value=%.3g", exact));
    }

    return report.finish();
}
