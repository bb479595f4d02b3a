#include <map>
#include <stdexcept>

#include "carnot/scenario.hpp"

namespace carnot {

namespace {

// Registered scenarios: every acceptance check runs off one of these, no
// hand-written configs needed.
const std::map<std::string, const char*>& registry() {
  static const std::map<std::string, const char*> reg = {
      {"euclid-heat-1d", R"cfg(
[scenario]
id = "euclid-heat-1d"
seed = 1

[group]
name = "euclidean"
dim = 1

[problem]
kind = "cauchy"
a = "identity"
b = "zero"
f = "zero"
g = "sine-initial"
phi = "none"
lambda = 1.0
alpha = 0.5

[grid]
box_lo = [0]
box_hi = [1]
nx = [64]
t0 = 0
t1 = 0.1
nt = 256

[solver]
tol = 1e-10
max_iter = 20000

[analysis]
name = "oracle-error"
check = "oracle"
oracle = "heat1d-sine"
threshold = 1e-2
)cfg"},

      {"euclid-obstacle-rate-alpha", R"cfg(
[scenario]
id = "euclid-obstacle-rate-alpha"
seed = 1

[group]
name = "euclidean"
dim = 1

[problem]
kind = "obstacle"
a = "identity"
b = "zero"
f = "zero"
g = "zero"
phi = "neg-holder-cusp"
phi_alpha = 0.5
phi_amplitude = 1.0
phi_base = [0]
phi_base_t = 0.25
lambda = 1.0
alpha = 0.5

[grid]
box_lo = [-1]
box_hi = [1]
nx = [256]
t0 = 0
t1 = 0.5
nt = 2560

[solver]
tol = 1e-9

[analysis]
name = "decay-interior"
check = "decay"
kind = "past"
anchor = "obstacle"
m = 0
alpha = 0.5
f_mode = "raw"
kmax = 5
base = [0]
base_t = 0.25
expect_min = 0.35
expect_max = 0.8

[analysis]
name = "dyadic-interior"
check = "dyadic"
source = "decay-interior"
)cfg"},

      {"initial-state-c1alpha", R"cfg(
[scenario]
id = "initial-state-c1alpha"
seed = 1

[group]
name = "euclidean"
dim = 1

[problem]
kind = "obstacle"
a = "identity"
b = "zero"
f = "zero"
g = "cusp-c1alpha"
g_alpha = 0.5
g_amplitude = 1.0
phi = "const"
phi_value = -10
lambda = 1.0
alpha = 0.5

[grid]
box_lo = [-1]
box_hi = [1]
nx = [256]
t0 = 0
t1 = 0.25
nt = 2048

[solver]
tol = 1e-9

[analysis]
name = "decay-initial"
check = "decay"
kind = "future"
anchor = "boundary"
m = 1
alpha = 0.5
f_mode = "p1"
kmax = 5
base = [0]
base_t = 0
expect_min = 1.3

[analysis]
name = "dyadic-initial"
check = "dyadic"
source = "decay-initial"
)cfg"},

      {"heisenberg-smoke", R"cfg(
[scenario]
id = "heisenberg-smoke"
seed = 1

[group]
name = "heisenberg"

[problem]
kind = "obstacle"
a = "identity"
b = "zero"
f = "const"
f_value = 2.0
g = "zero"
phi = "const"
phi_value = -10
lambda = 1.0
alpha = 0.5

[grid]
box_lo = [-1, -1, -1]
box_hi = [1, 1, 1]
nx = [12, 12, 12]
t0 = 0
t1 = 0.32
nt = 16

[solver]
tol = 1e-9

[analysis]
name = "class"
check = "class_membership"
m = 0
m1 = 1.0
m2 = 2.6
m3 = 0.5
m4 = 11.0

[analysis]
name = "rescaling"
check = "rescaling"
r_values = [0.25, 0.5, 1]
h = 1e-3
threshold = 1e-4
test_field = "quadratic-first-layer"

[analysis]
name = "comparison"
check = "comparison"
trials = 2
bump = 0.05
)cfg"},

      {"heisenberg-obstacle-c2", R"cfg(
[scenario]
id = "heisenberg-obstacle-c2"
seed = 1

[group]
name = "heisenberg"

[problem]
kind = "obstacle"
a = "identity"
b = "zero"
f = "zero"
g = "zero"
phi = "neg-paraboloid"
phi_amplitude = 0.5
phi_offset = 0
lambda = 1.0
alpha = 0.5

[grid]
box_lo = [-0.5, -0.5, -0.0625]
box_hi = [0.5, 0.5, 0.0625]
nx = [24, 24, 24]
t0 = 0
t1 = 0.64
nt = 64

[solver]
tol = 1e-9

[analysis]
name = "decay-c2"
check = "decay"
kind = "past"
anchor = "obstacle"
m = 2
f_mode = "raw"
kmax = 3
base = [0, 0, 0]
base_t = 0.32
expect_min = 1.7
expect_max = 2.3

[analysis]
name = "dyadic-c2"
check = "dyadic"
source = "decay-c2"

[analysis]
name = "sobolev"
check = "sobolev"

[analysis]
name = "class"
check = "class_membership"
m = 2
m1 = 0.5
m2 = 0.5
m3 = 0.5
m4 = 6.0

[analysis]
name = "comparison"
check = "comparison"
trials = 1
bump = 0.05
)cfg"},
  };
  return reg;
}

}  // namespace

std::vector<std::string> builtin_scenario_ids() {
  std::vector<std::string> ids;
  for (const auto& [id, _] : registry()) ids.push_back(id);
  return ids;
}

std::string builtin_scenario_text(const std::string& id) {
  const auto it = registry().find(id);
  if (it == registry().end())
    throw std::invalid_argument("unknown built-in scenario '" + id + "'");
  return it->second;
}

Scenario builtin_scenario(const std::string& id) {
  return parse_config(builtin_scenario_text(id));
}

}  // namespace carnot
