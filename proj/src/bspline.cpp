#include "shapeflow/bspline.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "shapeflow/errors.hpp"

namespace shapeflow {

BSplineBasis BSplineBasis::clamped_uniform(int n_basis, int degree) {
    if (degree < 1)
        throw ContractError("BSplineBasis: degree must be >= 1, got " + std::to_string(degree));
    if (n_basis < degree + 1)
        throw ContractError("BSplineBasis: need at least degree+1 basis functions, got " +
                            std::to_string(n_basis));

    // degree+1 clamped copies at each end, n_basis - degree - 1 uniform interior knots
    std::vector<double> knots(static_cast<size_t>(n_basis + degree + 1));
    const int interior = n_basis - degree - 1;
    for (int i = 0; i <= degree; ++i) {
        knots[static_cast<size_t>(i)] = 0.0;
        knots[knots.size() - 1 - static_cast<size_t>(i)] = 1.0;
    }
    for (int i = 0; i < interior; ++i)
        knots[static_cast<size_t>(degree + 1 + i)] =
            static_cast<double>(i + 1) / static_cast<double>(interior + 1);
    return BSplineBasis(degree, std::move(knots));
}

BSplineBasis::BSplineBasis(int degree, std::vector<double> knots)
    : degree_(degree), n_basis_(static_cast<int>(knots.size()) - degree - 1),
      knots_(std::move(knots)) {
    if (degree_ < 1 || n_basis_ < degree_ + 1)
        throw ContractError("BSplineBasis: knot vector too short for degree " +
                            std::to_string(degree_));
    if (!std::is_sorted(knots_.begin(), knots_.end()))
        throw ContractError("BSplineBasis: knot vector must be non-decreasing");
    if (knots_.front() != 0.0 || knots_.back() != 1.0)
        throw ContractError("BSplineBasis: knot vector must span [0, 1]");
}

int BSplineBasis::find_span(double z) const {
    // Largest span index k with knots[k] <= z < knots[k+1]; z == 1 maps to the
    // last non-empty span so the closed right endpoint evaluates cleanly.
    const int last = n_basis_ - 1; // index of the final non-empty span start
    if (z >= knots_[static_cast<size_t>(last + 1)])
        return last;
    int lo = degree_;
    int hi = last;
    while (lo < hi) {
        const int mid = (lo + hi + 1) / 2;
        if (knots_[static_cast<size_t>(mid)] <= z)
            lo = mid;
        else
            hi = mid - 1;
    }
    return lo;
}

Eigen::VectorXd BSplineBasis::eval(double z) const {
    if (!(z >= 0.0 && z <= 1.0))
        throw std::domain_error("BSplineBasis::eval: z = " + std::to_string(z) +
                                " outside [0, 1]");

    // Cox-de Boor with the left/right difference arrays; computes the
    // degree+1 values that are nonzero on the containing span.
    const int span = find_span(z);
    std::vector<double> local(static_cast<size_t>(degree_ + 1), 0.0);
    std::vector<double> left(static_cast<size_t>(degree_ + 1), 0.0);
    std::vector<double> right(static_cast<size_t>(degree_ + 1), 0.0);

    local[0] = 1.0;
    for (int j = 1; j <= degree_; ++j) {
        left[static_cast<size_t>(j)] = z - knots_[static_cast<size_t>(span + 1 - j)];
        right[static_cast<size_t>(j)] = knots_[static_cast<size_t>(span + j)] - z;
        double saved = 0.0;
        for (int r = 0; r < j; ++r) {
            const double denom = right[static_cast<size_t>(r + 1)] + left[static_cast<size_t>(j - r)];
            const double temp = denom != 0.0 ? local[static_cast<size_t>(r)] / denom : 0.0;
            local[static_cast<size_t>(r)] = saved + right[static_cast<size_t>(r + 1)] * temp;
            saved = left[static_cast<size_t>(j - r)] * temp;
        }
        local[static_cast<size_t>(j)] = saved;
    }

    Eigen::VectorXd values = Eigen::VectorXd::Zero(n_basis_);
    for (int r = 0; r <= degree_; ++r)
        values[span - degree_ + r] = local[static_cast<size_t>(r)];
    return values;
}

double BSplineBasis::integral(int j) const {
    if (j < 0 || j >= n_basis_)
        throw ContractError("BSplineBasis::integral: index out of range");
    return (knots_[static_cast<size_t>(j + degree_ + 1)] - knots_[static_cast<size_t>(j)]) /
           static_cast<double>(degree_ + 1);
}

double BSplineBasis::greville(int j) const {
    if (j < 0 || j >= n_basis_)
        throw ContractError("BSplineBasis::greville: index out of range");
    double sum = 0.0;
    for (int k = 1; k <= degree_; ++k)
        sum += knots_[static_cast<size_t>(j + k)];
    return sum / static_cast<double>(degree_);
}

} // namespace shapeflow
