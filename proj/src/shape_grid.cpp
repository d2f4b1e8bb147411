#include "shapeflow/shape_grid.hpp"

#include <cmath>
#include <string>

#include "shapeflow/errors.hpp"

namespace shapeflow {

int ShapeParams::n_free() const {
    int n = 0;
    for (bool f : free_mask)
        if (f) ++n;
    return n;
}

std::vector<int> MeshGrid::dirichlet_nodes() const {
    std::vector<int> ids;
    ids.reserve(n_y);
    for (int row = 0; row < n_y; ++row) ids.push_back(node_id(0, row));
    return ids;
}

double MeshGrid::triangle_area(int t) const {
    const auto& tri = triangles[t];
    const Eigen::Vector2d e1 = nodes[tri[1]] - nodes[tri[0]];
    const Eigen::Vector2d e2 = nodes[tri[2]] - nodes[tri[0]];
    return 0.5 * (e1.x() * e2.y() - e1.y() * e2.x());
}

namespace {

void check_params(const ShapeParams& params, const BSplineBasis& basis) {
    const int n = basis.size();
    if (params.meanline.size() != n || params.thickness.size() != n)
        throw ContractError("shape coefficient count does not match basis size");
    if (static_cast<int>(params.free_mask.size()) != 2 * n)
        throw ContractError("free_mask must cover meanline and thickness blocks");
}

} // namespace

MeshGrid shape_from_params(const ShapeParams& params, const BSplineBasis& basis,
                           int n_x, int n_y, double length) {
    check_params(params, basis);
    if (n_x < 2 || n_y < 2) throw ContractError("grid needs at least 2x2 nodes");
    if (!(length > 0.0)) throw ContractError("length must be positive");

    MeshGrid mesh;
    mesh.n_x = n_x;
    mesh.n_y = n_y;
    mesh.nodes.resize(static_cast<std::size_t>(n_x) * n_y);

    for (int i = 0; i < n_x; ++i) {
        // x depends only on the column index, never on the shape, so equal
        // resolutions produce bitwise identical x grids.
        const double x = static_cast<double>(i) * length / (n_x - 1);
        const double z = static_cast<double>(i) / (n_x - 1);
        const Eigen::VectorXd theta = basis.eval(z);
        const double ml = theta.dot(params.meanline);
        const double th = theta.dot(params.thickness);
        if (!(th > 0.0))
            throw DegenerateShapeError("thickness " + std::to_string(th) +
                                           " not positive at grid column " + std::to_string(i),
                                       i, th);
        for (int row = 0; row < n_y; ++row) {
            const double frac = static_cast<double>(row) / (n_y - 1);
            mesh.nodes[mesh.node_id(i, row)] = {x, ml + (frac - 0.5) * th};
        }
    }

    mesh.triangles.reserve(static_cast<std::size_t>(n_x - 1) * (n_y - 1) * 2);
    for (int i = 0; i + 1 < n_x; ++i) {
        for (int row = 0; row + 1 < n_y; ++row) {
            const int ll = mesh.node_id(i, row);
            const int lr = mesh.node_id(i + 1, row);
            const int ur = mesh.node_id(i + 1, row + 1);
            const int ul = mesh.node_id(i, row + 1);
            mesh.triangles.push_back({ll, lr, ur});
            mesh.triangles.push_back({ll, ur, ul});
        }
    }

    for (int row = 0; row + 1 < n_y; ++row) {
        mesh.boundary.push_back({mesh.node_id(0, row), mesh.node_id(0, row + 1), EdgeTag::Dirichlet});
        mesh.boundary.push_back({mesh.node_id(n_x - 1, row), mesh.node_id(n_x - 1, row + 1),
                                 EdgeTag::NeumannFixed});
    }
    for (int i = 0; i + 1 < n_x; ++i) {
        mesh.boundary.push_back({mesh.node_id(i, 0), mesh.node_id(i + 1, 0), EdgeTag::NeumannFree});
        mesh.boundary.push_back({mesh.node_id(i, n_y - 1), mesh.node_id(i + 1, n_y - 1),
                                 EdgeTag::NeumannFree});
    }

    return mesh;
}

Eigen::VectorXd params_to_flat(const ShapeParams& params) {
    const int n = params.n_coeffs();
    Eigen::VectorXd flat(params.n_free());
    int k = 0;
    for (int j = 0; j < 2 * n; ++j) {
        if (!params.free_mask[j]) continue;
        flat[k++] = j < n ? params.meanline[j] : params.thickness[j - n];
    }
    return flat;
}

ShapeParams flat_to_params(const Eigen::VectorXd& flat, const ShapeParams& pinned_template) {
    const int n = pinned_template.n_coeffs();
    if (flat.size() != pinned_template.n_free())
        throw ContractError("flat coefficient vector does not match free_mask");
    ShapeParams out = pinned_template;
    int k = 0;
    for (int j = 0; j < 2 * n; ++j) {
        if (!out.free_mask[j]) continue;
        (j < n ? out.meanline[j] : out.thickness[j - n]) = flat[k++];
    }
    return out;
}

Eigen::MatrixXd node_y_sensitivity(const ShapeParams& params, const BSplineBasis& basis,
                                   int n_x, int n_y) {
    check_params(params, basis);
    const int n = basis.size();
    Eigen::MatrixXd sens = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n_x) * n_y,
                                                 params.n_free());
    for (int i = 0; i < n_x; ++i) {
        const double z = static_cast<double>(i) / (n_x - 1);
        const Eigen::VectorXd theta = basis.eval(z);
        for (int row = 0; row < n_y; ++row) {
            const double frac = static_cast<double>(row) / (n_y - 1);
            const int node = i * n_y + row;
            int k = 0;
            for (int j = 0; j < 2 * n; ++j) {
                if (!params.free_mask[j]) continue;
                // y = meanline(z) + (frac - 1/2) thickness(z)
                sens(node, k++) = j < n ? theta[j] : (frac - 0.5) * theta[j - n];
            }
        }
    }
    return sens;
}

} // namespace shapeflow
