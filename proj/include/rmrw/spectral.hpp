#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "rmrw/grid.hpp"

namespace rmrw {

struct PoincareResult {
  double constant = 0.0;  // 1/λ
  double gap = 0.0;       // λ, smallest nonzero eigenvalue
  double residual = 0.0;  // ‖Kv − λΠv‖_{Π⁻¹} / (λ‖v‖_Π)
  int iterations = 0;
  bool converged = false;
};

/// Spectral gap of the nearest-neighbour diffusion that is reversible with
/// respect to the grid masses: K f = λ Π f, where the edge between adjacent
/// cells a, b along an axis of width h has weight √(π_a π_b)/h².
/// Cells with zero mass are dropped; the rest must form a connected set.
PoincareResult poincare_spectrum(const GridDensity& gd, double tol = 1e-10, int max_iter = 2000);
double poincare_constant(const GridDensity& gd);

struct CheegerResult {
  double value = 0.0;
  bool upper_bound = false;  // true when only a cut family was searched
  double set_mass = 0.0;
  double boundary = 0.0;
  std::string witness;
};

/// 1-D: exact minimum over all intervals S of boundary density / min(π(S), 1 − π(S)),
/// the boundary density between cells a, b being √(π_a π_b)/h.
/// 2-D: upper bound from axis-aligned, halfspace and density-level cuts.
CheegerResult cheeger_constant(const GridDensity& gd);

}  // namespace rmrw
