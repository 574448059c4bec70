#pragma once

#include <span>
#include <vector>

#include "fvstag/mesh.hpp"
#include "fvstag/types.hpp"

namespace fvstag {

// How the dual operators close a dual cell that touches the physical
// boundary. The boundary term is l_pb n_pb contracted with a boundary value
// built from the sub-cell-weighted average of the adjacent cell values.
enum class BoundaryClosure {
  natural,  // no boundary term (adjoint of the primal operators)
  outflow,  // boundary value = adjacent cell average
  wall,     // boundary value = adjacent cell average with its normal part removed
};

// Primal (node -> cell) operators.
CellVectorField gradient_primal(const NodeScalarField& phi, const Mesh& mesh);
CellVectorField curl_primal(const NodeVectorField& j, const Mesh& mesh);
// (grad w)_ij = d_j w_i.
CellTensorField gradient_primal_vector(const NodeVectorField& w, const Mesh& mesh);

// Dual (cell -> node) operators. On fully periodic meshes the closure is
// irrelevant.
NodeScalarField divergence_dual(const CellVectorField& v, const Mesh& mesh,
                                BoundaryClosure closure = BoundaryClosure::outflow);
NodeVectorField curl_dual(const CellVectorField& v, const Mesh& mesh,
                          BoundaryClosure closure = BoundaryClosure::outflow);
NodeTensorField gradient_dual(const CellVectorField& v, const Mesh& mesh,
                              BoundaryClosure closure = BoundaryClosure::outflow);

// Row-wise application to a cell tensor: entry i is the dual curl of row i.
std::vector<NodeVectorField> curl_dual_rows(const CellTensorField& a, const Mesh& mesh,
                                            BoundaryClosure closure = BoundaryClosure::outflow);

// (div sigma)_c,i = (1/|w_c|) sum_p sigma_p,ij (l_pc n_pc)_j
CellVectorField divergence_primal_tensor(const NodeTensorField& sigma, const Mesh& mesh);

// Sub-cell-area weighted average u_p = (1/|w_p|) sum_c |w_pc| u_c.
NodeScalarField average_cell_to_node(const CellScalarField& f, const Mesh& mesh);
NodeVectorField average_cell_to_node(const CellVectorField& f, const Mesh& mesh);
NodeTensorField average_cell_to_node(const CellTensorField& f, const Mesh& mesh);

// Arithmetic mean of the three vertex values.
CellScalarField average_node_to_cell(const NodeScalarField& g, const Mesh& mesh);
CellVectorField average_node_to_cell(const NodeVectorField& g, const Mesh& mesh);
CellTensorField average_node_to_cell(const NodeTensorField& g, const Mesh& mesh);

// Unique-node compressed views used by the linear solvers.
std::vector<double> gather_unique(const NodeScalarField& f, const Mesh& mesh);
NodeScalarField scatter_unique(const std::vector<double>& u, const Mesh& mesh);

// -div_dual(grad_primal p) with the natural closure, on unique-node arrays:
// y = -(1/|w_p|) sum_c l_cp n_cp . grad_c p. Self-adjoint and positive
// semi-definite under the dual-area inner product.
// `scratch` holds one cell gradient per cell between the two passes.
void apply_negative_laplacian(const Mesh& mesh, std::span<const double> p_unique, std::span<double> y_unique,
                              std::vector<Vec3>& scratch);

}  // namespace fvstag
