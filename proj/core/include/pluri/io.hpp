#pragma once

#include <iosfwd>
#include <string>

#include "pluri/grid_function.hpp"
#include "pluri/psh.hpp"

namespace pluri {

// Binary grid-function format: magic "PLRG", format version, domain,
// resolution, pole list, then node backgrounds and crossing backgrounds as
// little-endian doubles. The grid is rebuilt from (domain, resolution) on load.
void write_grid_binary(std::ostream& os, const GridFunction& u);
GridFunction read_grid_binary(std::istream& is);

void save_grid(const std::string& path, const GridFunction& u);
GridFunction load_grid(const std::string& path);

// JSON description (domain, resolution, poles, sizes, data scale) written next
// to a binary grid.
std::string grid_sidecar_json(const GridFunction& u, const std::string& binary_name);

// One row per interior node: real coordinates, value (-inf on carriers) and
// background.
void write_grid_csv(std::ostream& os, const GridFunction& u);
// One row per interior node: coordinates and nodal mass; atoms follow with
// kind "atom".
void write_measure_csv(std::ostream& os, const MeasureField& mu);

}  // namespace pluri
