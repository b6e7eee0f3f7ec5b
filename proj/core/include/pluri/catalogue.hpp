#pragma once

#include <string>
#include <vector>

#include "pluri/envelope.hpp"
#include "pluri/radial.hpp"

namespace pluri {

// Radial profile expression phi(s), s = log(|z|/R).
//   log        c s
//   const      value
//   exp        a (e^{k s} - 1)
//   max, sum   over args
//   csv        samples read from path
struct ProfileSpec {
    std::string kind = "log";
    double c = 1.0, value = 0.0, k = 2.0, a = 1.0;
    std::string path;
    std::vector<ProfileSpec> args;
};

// Grid function expression from the closed catalogue.
//   const            value
//   quadratic        sum_j |z_j|^2 / R^2 - m (m = 1 on the ball, n on the polydisc)
//   green            c G(., at)
//   log_coordinate   c log(|z_axis - a| / R), a hyperplane pole
//   radial           profile
//   max, sum         over args
//   scale            factor * args[0] (factor > 0)
//   shift            args[0] + value
//   truncate         max(args[0], -level)
//   project          largest discretely psh minorant of args[0]
struct FunctionSpec {
    std::string kind = "const";
    double value = 0.0, c = 1.0, factor = 1.0, level = 1.0;
    Point at{};
    int axis = 0;
    double a_re = 0.0, a_im = 0.0;
    ProfileSpec profile;
    std::vector<FunctionSpec> args;
};

const std::vector<std::string>& function_kinds();
const std::vector<std::string>& profile_kinds();

// Throws SchemaError (field = path) for unknown kinds or bad arguments.
RadialProfile build_profile(const ProfileSpec& spec, const std::string& path = "profile");
GridFunction build_function(const FunctionSpec& spec, GridPtr grid, const std::string& path = "function",
                            const EnvelopeOptions& opt = {});

// True when the expression is radial about the origin, i.e. built from
// const, quadratic, radial and combinations thereof on a ball; `out` then
// receives its profile.
bool radial_profile_of(const FunctionSpec& spec, const Domain& d, RadialProfile* out = nullptr);

std::string describe(const FunctionSpec& spec);

// Pointwise max; the pole list keeps carriers shared by every term with the
// smallest coefficient. Throws DomainError when the max is -inf off that list.
GridFunction max_of(const std::vector<GridFunction>& terms);
GridFunction sum_of(const std::vector<GridFunction>& terms);
GridFunction scaled(const GridFunction& u, double factor);
GridFunction shifted(const GridFunction& u, double c);

}  // namespace pluri
