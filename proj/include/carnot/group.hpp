#pragma once

#include <functional>
#include <string>
#include <vector>

namespace carnot {

using Point = std::vector<double>;

// Point in the parabolic extension R^{n+1}: spatial coordinates plus time.
struct SpaceTimePoint {
  Point x;
  double t = 0.0;
};

// A homogeneous Carnot group on R^n given in coordinates: a polynomial group
// law, anisotropic dilations delta_lambda(x)_j = lambda^{sigma_j} x_j with
// sigma_j equal to the layer index of coordinate j, and q generator vector
// fields X_i = sum_k c_ik(x) d/dx_k spanning the first layer.
//
// The structure is stored as evaluators, not symbolically; the required laws
// (identity, associativity, dilation automorphism, left invariance and
// degree-one homogeneity of the generators) are enforced by sampled tests,
// not assumed.  Instances are immutable after construction and safe to share
// across workers.
struct GroupSpec {
  std::string name;
  int n = 0;                    // ambient dimension
  int q = 0;                    // number of generators (= layer_dims[0])
  std::vector<int> layer_dims;  // n_1, ..., n_l
  std::vector<int> sigma;       // per-coordinate dilation exponent

  // out = x o y; all arrays have length n
  std::function<void(const double* x, const double* y, double* out)> compose_law;
  // fills row-major q x n matrix C with C(i,k) = c_ik(x)
  std::function<void(const double* x, double* coeffs)> field_coeffs;

  int step() const { return static_cast<int>(layer_dims.size()); }
};

GroupSpec euclidean_group(int n);
GroupSpec heisenberg_group();

Point compose(const GroupSpec& spec, const Point& p, const Point& r);

// Solves p o r = 0 by damped Newton with a finite-difference Jacobian,
// starting from coordinate negation (exact for homogeneous Carnot groups in
// canonical coordinates, so the solve typically stops after one residual
// check).
Point invert(const GroupSpec& spec, const Point& p);

Point dilate(const GroupSpec& spec, double lambda, const Point& p);
SpaceTimePoint dilate_st(const GroupSpec& spec, double lambda, const SpaceTimePoint& z);

// (x,t) o (y,s) = (x o y, t + s)
SpaceTimePoint compose_st(const GroupSpec& spec, const SpaceTimePoint& z1,
                          const SpaceTimePoint& z2);
SpaceTimePoint invert_st(const GroupSpec& spec, const SpaceTimePoint& z);

// ||x||_G = (sum_j sum_i (x_i^{(j)})^{2 l!/j})^{1/(2 l!)}, homogeneous of
// degree one: ||delta_lambda x|| = lambda ||x||.
double hom_norm(const GroupSpec& spec, const Point& p);

// ||(x,t)||_L = (||x||_G^{2 l!} + |t|^{l!})^{1/(2 l!)}
double hom_norm_st(const GroupSpec& spec, const SpaceTimePoint& z);

// Q = sum_i i * n_i
int homogeneous_dimension(const GroupSpec& spec);

// exp(h X_i)(x): integrates gamma' = X_i(gamma) with classical RK4,
// fixed substep count ceil(|h| / 0.05).  field_index is zero-based.
Point flow(const GroupSpec& spec, int field_index, double h, const Point& x);

// exp(h sum_i dir[i] X_i)(x) for dir of length q.
Point flow_direction(const GroupSpec& spec, const double* dir, double h, const Point& x);

}  // namespace carnot
