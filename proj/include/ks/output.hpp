#pragma once

#include <iosfwd>
#include <span>
#include <string>

#include "ks/diagnostics.hpp"
#include "ks/mesh.hpp"
#include "ks/scheme.hpp"

namespace ks {

// One row per record, fixed column order matching DiagnosticsRecord; header
// always written. Values use max-precision round-trippable formatting.
void write_diagnostics_csv(std::ostream& os,
                           std::span<const DiagnosticsRecord> records);
void write_diagnostics_csv(const std::string& path,
                           std::span<const DiagnosticsRecord> records);

// Columns: node_id,x,y,u,v,w,z with w = log(v_max_bound/v), z = log(1+u).
void write_fields_csv(const std::string& path, const Mesh& mesh,
                      const State& s, double v_max_bound);

// Legacy ASCII VTK unstructured grid with point data u, v, w, z.
void write_fields_vtk(const std::string& path, const Mesh& mesh,
                      const State& s, double v_max_bound);

}  // namespace ks
