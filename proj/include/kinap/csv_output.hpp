#pragma once

#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "kinap/diagnostics.hpp"
#include "kinap/mesh.hpp"
#include "kinap/scheme.hpp"

namespace kinap::csv {

inline constexpr const char* kSchemaLine = "# kinetic-ap-lab v1";

/// Shortest text that reads back to the same double (%.17g).
std::string format_double(double value);

/// Every writer starts with the schema line, then one `# key=value` line per
/// metadata entry, then the header row.
using Metadata = std::vector<std::pair<std::string, std::string>>;

void write_diagnostics(std::ostream& out, std::span<const DiagnosticsRecord> records,
                       const Metadata& meta);
void write_distribution(std::ostream& out, const CellDistribution& f, const PhaseMesh& mesh,
                        const Metadata& meta);
void write_macro(std::ostream& out, const MomentSet& m, const SpatialMesh& mesh,
                 const Metadata& meta);

/// Opens `path` for writing, calls `body`, and throws on any I/O failure.
template <class Body>
void write_file(const std::string& path, Body&& body);

}  // namespace kinap::csv

#include <fstream>
#include <stdexcept>

template <class Body>
void kinap::csv::write_file(const std::string& path, Body&& body) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  body(out);
  out.flush();
  if (!out) throw std::runtime_error("write to " + path + " failed");
}
