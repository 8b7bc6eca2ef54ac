#include "dbarlab/presets.hpp"

#include "dbarlab/errors.hpp"

namespace dbarlab {

namespace {

const char* kSolve1 = R"(# Weighted minimal-norm solve in one variable.
experiment = "solve"
name = "thm11_solve"
seed = 1
threads = 1

[grid]
n = 1
R = 5.0
N = 128

[weight]
kind = "gaussian"
params = [1.0]

[data]
kind = "dbar-potential"
degree = 1
inner = 0.5
outer = 2.0

[solver]
tolerance = 1e-10
)";

const char* kSolve2 = R"(# Weighted minimal-norm solve of a closed (0,1)-form in C^2.
experiment = "solve"
name = "thm12_solve"
seed = 1
threads = 1

[grid]
n = 2
R = 3.0
N = 16

[weight]
kind = "anisotropic-gaussian"
params = [1.0, 0.5]

[data]
kind = "dbar-potential"
degree = 1
inner = 0.3
outer = 1.5

[solver]
tolerance = 1e-10
)";

const char* kDecay = R"(# Weight bumping: tails of u_k outside D_eps decay like exp(-k chi(eps)).
experiment = "decay"
name = "thm21_decay"
seed = 1
threads = 1

[grid]
n = 2
R = 3.0
N = 16

[weight]
kind = "gaussian"
params = [1.0]

[data]
kind = "dbar-potential"
degree = 2
gauss = 1.0
inner = 0.6
outer = 1.4

[geometry]
D = { center = [0.0, 0.0, 0.0, 0.0], radius = 1.9 }
eps = 1.0
ks = [0, 2, 4, 6, 8, 10, 12]
)";

const char* kConstants = R"(# Weight bumping: the norm ratio stays bounded uniformly in k.
experiment = "constants"
name = "thm21_constants"
seed = 1
threads = 1

[grid]
n = 1
R = 4.0
N = 128

[weight]
kind = "gaussian"
params = [1.0]

[data]
kind = "dbar-potential"
degree = 1
gauss = 1.0
inner = 0.6
outer = 1.4

[geometry]
D = { center = [0.0, 0.0], radius = 2.0 }
eps = 1.0
ks = [0, 2, 4, 6, 8, 10, 12]
)";

const char* kAvoid = R"(# Support avoidance: u = v - dbar(chi h) vanishes on U.
experiment = "avoid"
name = "thm22_avoid"
seed = 1
threads = 1

[grid]
n = 2
R = 3.0
N = 16

[weight]
kind = "gaussian"
params = [1.0]

[data]
kind = "dbar-potential"
degree = 2
center = [-1.6875, -1.6875, -1.6875, -1.6875]
inner = 0.0
outer = 0.75

[geometry]
D = { center = [0.0, 0.0, 0.0, 0.0], radius = 4.6 }
C = { center = [0.9375, 0.9375, 0.9375, 0.9375], radius = 1.65 }
U = { center = [0.9375, 0.9375, 0.9375, 0.9375], radius = 0.5 }
eps = 1.0
k = 12.0

[solver]
tolerance = 1e-14
inner_tolerance = 1e-12
)";

const char* kApprox = R"(# Approximation procedure for data without compact support.
experiment = "approx"
name = "thm31_approx"
seed = 1
threads = 1

[grid]
n = 1
R = 12.0
N = 128

[weight]
kind = "gaussian"
params = [0.125]

[data]
kind = "gaussian-envelope"
degree = 1
gauss = 0.25

[geometry]
stages = 8
duality_tests = 20

[solver]
tolerance = 1e-10
)";

const char* kValidate = R"(# Full invariant suite on small grids.
experiment = "validate"
name = "validate"
seed = 1
threads = 1

[grid]
n = 2
R = 2.0
N = 8

[weight]
kind = "gaussian"
params = [1.0]
)";

}  // namespace

const std::vector<Preset>& presets() {
    static const std::vector<Preset> all = {
        {"thm11_solve", theorem_label("solve", 1), kSolve1},
        {"thm12_solve", theorem_label("solve", 2), kSolve2},
        {"thm21_decay", theorem_label("decay", 2), kDecay},
        {"thm21_constants", theorem_label("constants", 1), kConstants},
        {"thm22_avoid", theorem_label("avoid", 2), kAvoid},
        {"thm31_approx", theorem_label("approx", 1), kApprox},
    };
    return all;
}

const Preset& validate_preset() {
    static const Preset p{"validate", theorem_label("validate", 2), kValidate};
    return p;
}

const Preset& find_preset(std::string_view name) {
    for (const Preset& p : presets()) {
        if (p.name == name) return p;
    }
    if (name == "validate") return validate_preset();
    throw ConfigError("unknown preset '" + std::string(name) + "' (see `dbarlab presets list`)");
}

std::string theorem_label(const std::string& kind, int n) {
    if (kind == "solve") {
        return n == 1 ? "weighted L2 solution in one variable, data orthogonal to holomorphic functions"
                      : "weighted L2 minimal-norm solution on a pseudoconvex domain";
    }
    if (kind == "decay" || kind == "constants") return "compact support by weight bumping";
    if (kind == "avoid") return "support avoidance on a Stein subdomain (q >= 2)";
    if (kind == "approx") return "approximation of data without compact support";
    return "invariant suite";
}

}  // namespace dbarlab
