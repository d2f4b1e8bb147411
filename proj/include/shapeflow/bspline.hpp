#ifndef SHAPEFLOW_BSPLINE_HPP
#define SHAPEFLOW_BSPLINE_HPP

#include <vector>

#include <Eigen/Core>

namespace shapeflow {

/**
 * Clamped B-spline basis on [0, 1].
 *
 * The basis is a partition of unity: the n_basis functions are nonnegative
 * and sum to one everywhere on [0, 1]. With a clamped knot vector the first
 * and last basis functions interpolate the interval endpoints, which is what
 * ties the boundary coefficients of a curve to its endpoint values.
 */
class BSplineBasis {
public:
    /** Builds a clamped basis with uniformly spaced interior knots.
     *  Requires n_basis >= degree + 1 and degree >= 1. */
    static BSplineBasis clamped_uniform(int n_basis, int degree);

    /** Builds a basis from an explicit non-decreasing knot vector spanning [0, 1].
     *  knots.size() must equal n_basis + degree + 1. */
    BSplineBasis(int degree, std::vector<double> knots);

    int degree() const { return degree_; }
    int size() const { return n_basis_; }
    const std::vector<double>& knots() const { return knots_; }

    /** All n_basis values at z via the Cox-de Boor recursion.
     *  Throws std::domain_error if z is outside [0, 1]. */
    Eigen::VectorXd eval(double z) const;

    /** Integral of basis function j over [0, 1] (closed form). */
    double integral(int j) const;

    /** Greville abscissa of basis function j: the knot average at which a
     *  coefficient acts most directly. Coefficients sampled from an affine
     *  function at these points reproduce that function exactly. */
    double greville(int j) const;

private:
    int degree_;
    int n_basis_;
    std::vector<double> knots_;

    int find_span(double z) const;
};

} // namespace shapeflow

#endif
