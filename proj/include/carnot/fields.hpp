#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "carnot/group.hpp"

namespace carnot {

// Axis-aligned spatial box in group coordinates.
struct Box {
  std::vector<double> lo, hi;
  int dim() const { return static_cast<int>(lo.size()); }
  bool contains(const Point& x, double margin = 0.0) const {
    for (std::size_t j = 0; j < lo.size(); ++j)
      if (x[j] < lo[j] + margin || x[j] > hi[j] - margin) return false;
    return true;
  }
};

enum class Smoothness { analytic, grid_interpolated };

// Scalar function of (x, t), the carrier for u, f, g, phi and test fields.
struct ScalarField {
  std::function<double(const Point& x, double t)> eval;
  Smoothness tag = Smoothness::analytic;

  double operator()(const Point& x, double t) const { return eval(x, t); }
  double operator()(const SpaceTimePoint& z) const { return eval(z.x, z.t); }
};

inline ScalarField constant_field(double c) {
  return {[c](const Point&, double) { return c; }, Smoothness::analytic};
}

// Fills a row-major q x q matrix with a_ij(x, t).
using MatrixCoefficients = std::function<void(const Point& x, double t, double* a)>;
// Fills a length-q vector with b_i(x, t).
using VectorCoefficients = std::function<void(const Point& x, double t, double* b)>;

MatrixCoefficients identity_coefficients(int q);
MatrixCoefficients diagonal_coefficients(std::vector<double> diag);
VectorCoefficients zero_drift(int q);
VectorCoefficients constant_drift(std::vector<double> b);

// The operator H = sum a_ij X_i X_j + sum b_i X_i - d/dt together with data
// (f, g, phi) on a space-time box (t0, t1].  Domains are coordinate boxes:
// metric cylinders can be irregular for the Dirichlet problem and the paper
// substitutes modified domains; boxes satisfy an outer-density condition and
// sidestep that construction.  Cylinder suprema in the regularity lab are
// taken over grid nodes inside the metric cylinder.
struct ProblemSpec {
  GroupSpec group;
  MatrixCoefficients a;
  VectorCoefficients b;
  ScalarField f, g, phi;
  bool has_obstacle = true;
  Box box;
  double t0 = 0.0, t1 = 1.0;
  double ellipticity = 1.0;  // Lambda in Lambda^-1 |xi|^2 <= a xi.xi <= Lambda |xi|^2
  double alpha = 0.5;        // Holder exponent of the coefficient class
};

struct ProblemValidation {
  bool symmetric = false;
  bool elliptic = false;
  bool boundary_ordered = false;  // g >= phi on the parabolic boundary
  double worst_symmetry = 0.0;
  double worst_ellipticity_low = 0.0;   // min of a xi.xi * Lambda / |xi|^2
  double worst_ellipticity_high = 0.0;  // max of a xi.xi / (Lambda |xi|^2)
  double worst_gap = 0.0;               // min of g - phi on sampled boundary
  bool ok() const { return symmetric && elliptic && boundary_ordered; }
};

// Sampled checks of the ProblemSpec invariants: a symmetric, elliptic with the
// declared constant, g >= phi on the parabolic boundary.
ProblemValidation validate_problem(const ProblemSpec& p, int samples, std::uint64_t seed);

}  // namespace carnot
