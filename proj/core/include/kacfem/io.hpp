#pragma once

#include <iosfwd>
#include <string>

#include "kacfem/estimator.hpp"
#include "kacfem/mesh.hpp"
#include "kacfem/space.hpp"

namespace kacfem {

/// Line-oriented mesh dump: "vertices N", "elements M", N lines
/// "x y boundary_flag" (17 significant digits), M lines "v0 v1 v2 generation".
void write_mesh(std::ostream& out, const Mesh& mesh);
void write_mesh_file(const std::string& path, const Mesh& mesh);
Mesh read_mesh(std::istream& in);
Mesh read_mesh_file(const std::string& path);

/// P1 dump: "p1 N" then one nodal value per line.
void write_p1(std::ostream& out, const P1Function& fn);

/// Estimator dump: lines "element_index eta_value".
void write_estimates(std::ostream& out, const LocalEstimates& est);

}  // namespace kacfem
