#include "rmrw/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

namespace rmrw {

namespace {

struct Edge {
  int a, b;
  double w;  // √(π_a π_b)/h²
  double h;
};

struct Graph {
  std::vector<std::size_t> cell_of_node;
  Vector pi;
  std::vector<Edge> edges;
};

// Cells below this fraction of the peak mass are dropped; their edge weights
// underflow and break the factorization.
constexpr double kMassFloor = 1e-250;

// Adjacent-cell edges over cells with non-negligible mass, node ids compacted.
Graph build_graph(const GridDensity& gd) {
  const auto& mass = gd.mass();
  const double floor = kMassFloor * *std::max_element(mass.begin(), mass.end());
  std::vector<int> node(mass.size(), -1);
  Graph g;
  for (std::size_t k = 0; k < mass.size(); ++k) {
    if (mass[k] > floor) {
      node[k] = static_cast<int>(g.cell_of_node.size());
      g.cell_of_node.push_back(k);
    }
  }
  if (g.cell_of_node.size() < 2) throw std::invalid_argument("degenerate support: fewer than two cells");
  g.pi.resize(static_cast<Eigen::Index>(g.cell_of_node.size()));
  for (std::size_t v = 0; v < g.cell_of_node.size(); ++v) g.pi[v] = mass[g.cell_of_node[v]];
  g.pi /= g.pi.sum();

  auto add = [&](std::size_t ca, std::size_t cb, double h) {
    if (node[ca] < 0 || node[cb] < 0) return;
    const double w = std::sqrt(mass[ca]) * std::sqrt(mass[cb]) / (h * h);
    g.edges.push_back({node[ca], node[cb], w, h});
  };
  const int m0 = gd.axis(0).m;
  if (gd.dim() == 1) {
    for (int i = 0; i + 1 < m0; ++i) add(i, i + 1, gd.axis(0).width());
  } else {
    const int m1 = gd.axis(1).m;
    for (int i = 0; i < m0; ++i) {
      for (int j = 0; j < m1; ++j) {
        if (i + 1 < m0) add(gd.index(i, j), gd.index(i + 1, j), gd.axis(0).width());
        if (j + 1 < m1) add(gd.index(i, j), gd.index(i, j + 1), gd.axis(1).width());
      }
    }
  }
  // Connectivity by union-find.
  const int n = static_cast<int>(g.pi.size());
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  int comps = n;
  for (const auto& e : g.edges) {
    const int ra = find(e.a), rb = find(e.b);
    if (ra != rb) {
      parent[ra] = rb;
      --comps;
    }
  }
  if (comps != 1) throw std::invalid_argument("degenerate support: positive-mass cells are not connected");
  return g;
}

double pi_dot(const Vector& pi, const Vector& x, const Vector& y) {
  return (pi.array() * x.array() * y.array()).sum();
}

// Π-orthonormalizes the columns of V against the constants and each other.
void pi_orthonormalize(const Vector& pi, Matrix& V) {
  for (int pass = 0; pass < 2; ++pass) {
    for (Eigen::Index c = 0; c < V.cols(); ++c) {
      V.col(c).array() -= pi_dot(pi, V.col(c), Vector::Ones(pi.size()));
      for (Eigen::Index k = 0; k < c; ++k) V.col(c) -= pi_dot(pi, V.col(c), V.col(k)) * V.col(k);
      const double nrm = std::sqrt(pi_dot(pi, V.col(c), V.col(c)));
      if (nrm > 0.0) V.col(c) /= nrm;
    }
  }
}

}  // namespace

PoincareResult poincare_spectrum(const GridDensity& gd, double tol, int max_iter) {
  const Graph g = build_graph(gd);
  const int n = static_cast<int>(g.pi.size());

  using Sparse = Eigen::SparseMatrix<double>;
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(g.edges.size() * 4);
  for (const auto& e : g.edges) {
    trip.emplace_back(e.a, e.a, e.w);
    trip.emplace_back(e.b, e.b, e.w);
    trip.emplace_back(e.a, e.b, -e.w);
    trip.emplace_back(e.b, e.a, -e.w);
  }
  Sparse K(n, n);
  K.setFromTriplets(trip.begin(), trip.end());

  PoincareResult res;
  if (n == 2) {
    // K f = λ Π f on two nodes: λ = w (1/π_a + 1/π_b).
    const double w = g.edges.front().w;
    res.gap = w * (1.0 / g.pi[0] + 1.0 / g.pi[1]);
    res.constant = 1.0 / res.gap;
    res.converged = true;
    return res;
  }

  // Ground the heaviest node: the reduced Laplacian is positive definite.
  Eigen::Index ground = 0;
  g.pi.maxCoeff(&ground);
  std::vector<Eigen::Triplet<double>> red;
  red.reserve(trip.size());
  auto shift = [&](Eigen::Index k) { return k < ground ? k : k - 1; };
  for (const auto& t : trip) {
    if (t.row() == ground || t.col() == ground) continue;
    red.emplace_back(shift(t.row()), shift(t.col()), t.value());
  }
  Sparse Kr(n - 1, n - 1);
  Kr.setFromTriplets(red.begin(), red.end());
  Eigen::SimplicialLDLT<Sparse> solver(Kr);
  if (solver.info() != Eigen::Success) throw std::runtime_error("Laplacian factorization failed");

  auto apply_inverse = [&](const Vector& f) {
    Vector rhs(n - 1);
    for (Eigen::Index k = 0; k < n; ++k) {
      if (k != ground) rhs[shift(k)] = g.pi[k] * f[k];
    }
    const Vector xr = solver.solve(rhs);
    Vector x(n);
    for (Eigen::Index k = 0; k < n; ++k) x[k] = k == ground ? 0.0 : xr[shift(k)];
    return x;
  };

  const int p = std::min(6, n - 1);
  std::mt19937_64 rng(0x9e3779b97f4a7c15ULL);
  std::normal_distribution<double> normal;
  Matrix V(n, p);
  for (Eigen::Index c = 0; c < p; ++c) {
    for (Eigen::Index r = 0; r < n; ++r) V(r, c) = normal(rng);
  }
  pi_orthonormalize(g.pi, V);

  double prev = std::numeric_limits<double>::infinity();
  for (int it = 1; it <= max_iter; ++it) {
    Matrix W(n, p);
    for (Eigen::Index c = 0; c < p; ++c) W.col(c) = apply_inverse(V.col(c));
    pi_orthonormalize(g.pi, W);
    const Matrix KW = K * W;
    Matrix A = W.transpose() * KW;
    A = 0.5 * (A + A.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> es(A);
    V = W * es.eigenvectors();
    const double lambda = es.eigenvalues()[0];
    const Vector v = V.col(0);
    const Vector r = K * v - lambda * (g.pi.array() * v.array()).matrix();
    const double rn = std::sqrt((r.array().square() / g.pi.array()).sum());
    const double vn = std::sqrt(pi_dot(g.pi, v, v));
    res.gap = lambda;
    res.residual = rn / (lambda * vn);
    res.iterations = it;
    if (res.residual <= tol || (std::abs(lambda - prev) <= 1e-15 * lambda && res.residual <= 1e3 * tol)) {
      res.converged = true;
      break;
    }
    prev = lambda;
  }
  res.constant = 1.0 / res.gap;
  return res;
}

double poincare_constant(const GridDensity& gd) {
  const PoincareResult r = poincare_spectrum(gd);
  if (!r.converged) {
    throw std::runtime_error("Poincare eigensolve did not converge (residual " +
                             std::to_string(r.residual) + ")");
  }
  return r.constant;
}

namespace {

CheegerResult cheeger_1d(const GridDensity& gd) {
  const auto& mass = gd.mass();
  const int m = static_cast<int>(mass.size());
  if (m < 2) throw std::invalid_argument("degenerate support: single cell");
  const double h = gd.axis(0).width();
  // Complement masses come from prefix plus suffix sums, never 1 − π(S).
  std::vector<double> cum(m + 1, 0.0), suf(m + 1, 0.0);
  for (int i = 0; i < m; ++i) cum[i + 1] = cum[i] + mass[i];
  for (int i = m - 1; i >= 0; --i) suf[i] = suf[i + 1] + mass[i];
  std::vector<double> bnd(m - 1);
  for (int i = 0; i + 1 < m; ++i) bnd[i] = std::sqrt(mass[i]) * std::sqrt(mass[i + 1]) / h;

  CheegerResult best;
  best.value = std::numeric_limits<double>::infinity();
  for (int l = 0; l < m; ++l) {
    for (int r = l; r < m; ++r) {
      if (l == 0 && r == m - 1) continue;
      const double ms = cum[r + 1] - cum[l];
      const double side = std::min(ms, cum[l] + suf[r + 1]);
      if (!(side > 0.0)) continue;
      const double b = (l > 0 ? bnd[l - 1] : 0.0) + (r + 1 < m ? bnd[r] : 0.0);
      const double v = b / side;
      if (v < best.value) {
        best.value = v;
        best.set_mass = ms;
        best.boundary = b;
        best.witness = "cells [" + std::to_string(l) + ", " + std::to_string(r) + "]";
      }
    }
  }
  if (!std::isfinite(best.value)) throw std::invalid_argument("degenerate support");
  return best;
}

// Sweeps the prefixes of `order`, tracking π(S) and boundary incrementally.
void sweep_2d(const GridDensity& gd, const std::vector<std::size_t>& order, const std::string& label,
              CheegerResult& best) {
  const int m0 = gd.axis(0).m, m1 = gd.axis(1).m;
  const double h0 = gd.axis(0).width(), h1 = gd.axis(1).width();
  const auto& mass = gd.mass();
  std::vector<char> in(mass.size(), 0);
  auto weight = [&](std::size_t a, std::size_t b, double h) { return std::sqrt(mass[a]) * std::sqrt(mass[b]) / h; };
  // rest[k]: mass of order[k..], summed from the back.
  std::vector<double> rest(order.size() + 1, 0.0);
  for (std::size_t k = order.size(); k-- > 0;) rest[k] = rest[k + 1] + mass[order[k]];
  double ms = 0.0, boundary = 0.0;
  for (std::size_t step = 0; step + 1 < order.size(); ++step) {
    const std::size_t c = order[step];
    const int i = static_cast<int>(c / m1), j = static_cast<int>(c % m1);
    in[c] = 1;
    ms += mass[c];
    auto edge = [&](int ii, int jj, double h) {
      if (ii < 0 || jj < 0 || ii >= m0 || jj >= m1) return;
      const std::size_t o = gd.index(ii, jj);
      const double w = weight(c, o, h);
      boundary += in[o] ? -w : w;
    };
    edge(i - 1, j, h0);
    edge(i + 1, j, h0);
    edge(i, j - 1, h1);
    edge(i, j + 1, h1);
    double side = std::min(ms, rest[step + 1]);
    if (!(side > 1e-300)) continue;
    double v = std::max(0.0, boundary) / side;
    if (v < best.value) {
      // The running sums lose digits to cancellation; recompute candidates exactly.
      double exact_b = 0.0, exact_in = 0.0;
      for (int ii = 0; ii < m0; ++ii) {
        for (int jj = 0; jj < m1; ++jj) {
          const std::size_t a = gd.index(ii, jj);
          if (in[a]) exact_in += mass[a];
          if (ii + 1 < m0 && in[a] != in[gd.index(ii + 1, jj)]) exact_b += weight(a, gd.index(ii + 1, jj), h0);
          if (jj + 1 < m1 && in[a] != in[gd.index(ii, jj + 1)]) exact_b += weight(a, gd.index(ii, jj + 1), h1);
        }
      }
      boundary = exact_b;
      side = std::min(exact_in, rest[step + 1]);
      if (!(side > 1e-300)) continue;
      v = exact_b / side;
      if (v < best.value) {
        best.value = v;
        best.set_mass = exact_in;
        best.boundary = exact_b;
        best.witness = label + " prefix " + std::to_string(step + 1);
      }
    }
  }
}

CheegerResult cheeger_2d(const GridDensity& gd) {
  const std::size_t n = gd.cells();
  CheegerResult best;
  best.upper_bound = true;
  best.value = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);

  sweep_2d(gd, order, "axis0 cut", best);  // row-major order: x₀ ≤ c, then partial columns
  {
    const int m0 = gd.axis(0).m, m1 = gd.axis(1).m;
    std::vector<std::size_t> col;
    col.reserve(n);
    for (int j = 0; j < m1; ++j) {
      for (int i = 0; i < m0; ++i) col.push_back(gd.index(i, j));
    }
    sweep_2d(gd, col, "axis1 cut", best);
  }
  const int angles = 36;
  for (int k = 0; k < angles; ++k) {
    const double phi = std::numbers::pi * k / angles;
    const double ux = std::cos(phi), uy = std::sin(phi);
    std::vector<double> proj(n);
    for (std::size_t c = 0; c < n; ++c) {
      const Vector x = gd.center(c);
      proj[c] = ux * x[0] + uy * x[1];
    }
    std::vector<std::size_t> o = order;
    std::stable_sort(o.begin(), o.end(), [&](std::size_t a, std::size_t b) { return proj[a] < proj[b]; });
    sweep_2d(gd, o, "halfspace angle " + std::to_string(k), best);
  }
  {
    const auto& mass = gd.mass();
    std::vector<std::size_t> o = order;
    std::stable_sort(o.begin(), o.end(), [&](std::size_t a, std::size_t b) { return mass[a] > mass[b]; });
    sweep_2d(gd, o, "superlevel set", best);
  }
  if (!std::isfinite(best.value)) throw std::invalid_argument("degenerate support");
  return best;
}

}  // namespace

CheegerResult cheeger_constant(const GridDensity& gd) {
  return gd.dim() == 1 ? cheeger_1d(gd) : cheeger_2d(gd);
}

}  // namespace rmrw
