#include "kinap/csv_output.hpp"

#include <cstdio>

namespace kinap::csv {

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

namespace {

void write_preamble(std::ostream& out, const Metadata& meta) {
  out << kSchemaLine << '\n';
  for (const auto& [key, value] : meta) out << "# " << key << '=' << value << '\n';
}

}  // namespace

void write_diagnostics(std::ostream& out, std::span<const DiagnosticsRecord> records,
                       const Metadata& meta) {
  write_preamble(out, meta);
  out << "n,t,norm_to_eq,norm_local,rho_dev,h_norm,H,mass,slack\n";
  for (const auto& r : records) {
    out << r.n << ',' << format_double(r.t) << ',' << format_double(r.norm_to_eq) << ','
        << format_double(r.norm_local) << ',' << format_double(r.rho_dev) << ','
        << format_double(r.h_norm) << ',' << format_double(r.H) << ','
        << format_double(r.mass) << ',' << format_double(r.slack) << '\n';
  }
}

void write_distribution(std::ostream& out, const CellDistribution& f, const PhaseMesh& mesh,
                        const Metadata& meta) {
  write_preamble(out, meta);
  out << "i,j,x_i,v_j,f_ij\n";
  for (std::size_t i = 0; i < f.nx; ++i) {
    for (std::size_t a = 0; a < f.nv; ++a) {
      out << i << ',' << a << ',' << format_double(mesh.x.center(i)) << ','
          << format_double(mesh.v.center(a)) << ',' << format_double(f(i, a)) << '\n';
    }
  }
}

void write_macro(std::ostream& out, const MomentSet& m, const SpatialMesh& mesh,
                 const Metadata& meta) {
  write_preamble(out, meta);
  out << "i,x_i,rho_i,J_i,S_i\n";
  for (std::size_t i = 0; i < m.rho.size(); ++i) {
    out << i << ',' << format_double(mesh.center(i)) << ',' << format_double(m.rho[i]) << ','
        << format_double(m.J[i]) << ',' << format_double(m.S[i]) << '\n';
  }
}

}  // namespace kinap::csv
