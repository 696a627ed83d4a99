#pragma once

#include <array>
#include <string>
#include <vector>

#include "freqlab/frequency.hpp"
#include "freqlab/geometry.hpp"

namespace freqlab {

/// Dirichlet problem for Delta_H u = V u on an axis-aligned box in H^1,
/// second-order stencils. On H^1 the operator expands to
/// u_xx + u_yy + 4y u_xt - 4x u_yt + 4(x^2+y^2) u_tt.
struct GridProblem {
  std::array<double, 3> lo{-0.8, -0.8, -0.64};
  std::array<double, 3> hi{0.8, 0.8, 0.64};
  std::array<int, 3> n{32, 32, 64}; // nodes per axis, >= 8
  Potential V;
  FieldPtr boundary; // Dirichlet data, evaluated on the box faces

  double coord(int axis, int idx) const {
    return lo[axis] + idx * (hi[axis] - lo[axis]) / (n[axis] - 1);
  }
  double h(int axis) const { return (hi[axis] - lo[axis]) / (n[axis] - 1); }
  /// t-major flat index (t slowest, x fastest).
  long flat(int i, int j, int k) const {
    return (static_cast<long>(k) * n[1] + j) * n[0] + i;
  }
  long total_nodes() const {
    return static_cast<long>(n[0]) * n[1] * n[2];
  }
};

struct CsrMatrix {
  int rows = 0;
  std::vector<long> rowptr;
  std::vector<int> col;
  std::vector<double> val;
};

struct AssembledSystem {
  CsrMatrix A;
  std::vector<double> b;
  std::vector<long> interior_flat; // grid flat index per matrix row
  std::vector<double> full;        // boundary values placed, interior zero
};

/// Central stencils for the pure terms, four-point centered cross stencils
/// for the mixed derivatives, V on the diagonal, Dirichlet rows eliminated.
AssembledSystem assemble(const GaugeGeometry& geom, const GridProblem& prob);

struct DiscreteSolution {
  GridProblem problem;
  std::vector<double> values; // all nodes, t-major
  double residual_norm = 0.0; // relative to |b|
  int iterations = 0;
  std::vector<double> residual_history;
};

/// Jacobi-preconditioned BiCGStab (the discrete operator is nonsymmetric).
/// Throws a Numerical error carrying the residual history on stagnation.
DiscreteSolution solve(const GaugeGeometry& geom, const GridProblem& prob,
                       double tol = 1e-10, int max_iter = 20000);

/// Max |solution - reference| over interior nodes.
double max_interior_error(const DiscreteSolution& sol,
                          const ScalarField& reference);

/// Discrete solution wrapped as a ScalarField: trilinear values, jets from
/// finite-difference derivative grids (order 2).
FieldPtr grid_field(const DiscreteSolution& sol);

/// Runs the frequency profile on the interpolated discrete solution. The
/// grid box must contain the bounding box of B_{max r} with a 2-cell margin.
FrequencyProfile discrete_frequency_pipeline(const GaugeGeometry& geom,
                                             const DiscreteSolution& sol,
                                             const std::vector<double>& r_grid,
                                             double alpha,
                                             const QuadratureSpec& spec);

/// Flat binary dump (doubles, t-major) plus a JSON header side file.
void save_solution(const DiscreteSolution& sol, const std::string& base_path);
DiscreteSolution load_solution(const std::string& base_path);

} // namespace freqlab
