#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fvstag/mesh.hpp"

namespace fvstag {

// Random node field that is equal on periodic copies, entries in [-1, 1].
NodeScalarField random_node_field(const Mesh& mesh, std::uint64_t seed);
CellVectorField random_cell_field(const Mesh& mesh, std::uint64_t seed);

struct IdentityCase {
  int n = 0;
  double jitter = 0.0;
  // Largest residuals over the random fields, each divided by its scale
  // max(1, |phi|_inf / h^2) with h the smallest incircle diameter.
  double curl_grad = 0.0;
  double div_curl = 0.0;
  // |<grad phi, v>_cells + <phi, div v>_nodes| / (|phi| |v|)
  double sbp = 0.0;
};

struct IdentityReport {
  std::vector<IdentityCase> cases;
  double curl_grad = 0.0;
  double div_curl = 0.0;
  double sbp = 0.0;
  bool pass(double identity_tol = 1e-13, double sbp_tol = 1e-12) const {
    return curl_grad <= identity_tol && div_curl <= identity_tol && sbp <= sbp_tol;
  }
};

// Discrete identities on periodic unit-square meshes of n x n nodes.
IdentityReport verify_operator_identities(const std::vector<int>& sizes = {8, 16, 32},
                                          const std::vector<double>& jitters = {0.0, 0.2}, int fields = 50,
                                          int sbp_probes = 20, std::uint64_t seed = 7);

std::string format_identity_report(const IdentityReport& r);

}  // namespace fvstag
