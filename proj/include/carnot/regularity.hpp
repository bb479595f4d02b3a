#pragma once

#include <optional>
#include <string>
#include <vector>

#include "carnot/calculus.hpp"
#include "carnot/solver.hpp"

namespace carnot {

// S_k = sup over grid nodes inside C_{2^-k}^{kind}(base) of |u - F|, with the
// one-node-layer membership slack folded into downstream tolerances.
struct DecayEntry {
  int k = 0;
  double s = 0.0;
  long nodes = 0;
};

struct DecaySequence {
  CylinderKind kind = CylinderKind::past;
  std::vector<DecayEntry> entries;
  SpaceTimePoint base;
  double gamma_target = 0.0;
  std::optional<double> gamma_fitted;
  bool truncated = false;
  std::string warning;
};

enum class Anchor { obstacle, boundary };

// F per the selection tables: m = 0 -> P_0 data, m = 1 -> P_1 data,
// m = 2 -> the data itself, with target exponents alpha, 1+alpha, 2.
ScalarField build_F(int m, Anchor anchor, const ScalarField& data,
                    const SpaceTimePoint& base, const GroupSpec& spec, double fd_h = 1e-5);

double gamma_for(int m, double alpha);

// Entries stop (sequence truncated, warning set) at the first k whose
// cylinder holds fewer than min_nodes grid nodes.
DecaySequence decay_sequence(const GridFunction& u, const ScalarField& F,
                             const SpaceTimePoint& base, CylinderKind kind, int kmax,
                             const GroupSpec& spec, double gamma_target = 0.0,
                             long min_nodes = 5);

// Least-squares slope of log2 S_k against k, negated, over k in
// [k_min, k_max]; stores the result in the sequence.  All-zero sequences
// report +infinity.
double fit_exponent(DecaySequence& seq, int k_min = 1, int k_max = 5);

struct DyadicResult {
  bool ok = true;
  int worst_k = -1;
  double worst_excess = 0.0;  // S_{k+1} / max(...) at the worst k
};

// S_{k+1} <= max(c 2^{-(k+1)gamma}, S_k / 2^gamma, ..., S_0 / 2^{(k+1)gamma})
// checked at every k of the sequence.
DyadicResult check_dyadic(const DecaySequence& seq, double gamma, double c);

// c = max_k S_k 2^{k gamma}; check_dyadic with this envelope always passes.
double envelope_constant(const DecaySequence& seq, double gamma);

// u^{r,base}(z) = u(base o delta_r z)
ScalarField rescale_function(const ScalarField& u, double r, const SpaceTimePoint& base,
                             const GroupSpec& spec);

// Pullback of the coefficients and data through base o delta_r: a^r, r b^r,
// r^2 f^r; the generators themselves are unchanged because they are
// left-invariant and homogeneous of degree one.  Preserves the ellipticity
// and Holder constants.
ProblemSpec rescale_problem(const ProblemSpec& p, double r, const SpaceTimePoint& base);

// sup over sampled interior points of |H_r u^r - r^2 (H u)^r|, both sides via
// apply_H; the identity is exact, the residual is pure discretization error.
double verify_rescaling_identity(const ProblemSpec& p, const ScalarField& u, double r,
                                 const SpaceTimePoint& base, double h,
                                 const SpaceTimeBox& sample_region, int lattice = 4);

struct ClassBounds {
  double m1 = 0.0;  // ||u||_inf
  double m2 = 0.0;  // ||f||_{C^{0,alpha}}
  double m3 = 0.0;  // ||g||_{C^{m,alpha}} (boundary data)
  std::optional<double> m4;  // ||phi||_{C^{m,alpha}} when the obstacle is checked too
};

struct ClassCheck {
  std::string bound;
  double measured = 0.0;
  double limit = 0.0;
  bool pass = false;
};

struct ClassReport {
  std::vector<ClassCheck> checks;
  bool ok() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
};

// Membership predicate for the solution classes: sup bound on u, Holder
// bounds on f and on g (and phi when m4 is given), g >= phi on the parabolic
// boundary.
ClassReport class_membership(const ProblemSpec& p, const GridFunction& u, int m,
                             const ClassBounds& bounds, long sample_pairs = 4000);

}  // namespace carnot
