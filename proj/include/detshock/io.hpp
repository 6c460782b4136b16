#ifndef DETSHOCK_IO_HPP_
#define DETSHOCK_IO_HPP_

#include <string>
#include <vector>

#include "detshock/elliptic_solver.hpp"
#include "detshock/free_boundary.hpp"
#include "detshock/geometry.hpp"
#include "detshock/shock_polar.hpp"

namespace detshock {

// Every CSV starts with '#' metadata lines naming the kind and config hash.
void write_polar_csv(const std::string& path, const PolarCurve& pc,
                     const GasParams& g, double eps, const std::string& hash);
void write_body_csv(const std::string& path, const BluntBody& body,
                    const std::vector<double>& x2, const std::string& hash);
void write_grid_csv(const std::string& path, const BodyFittedGrid& grid,
                    const std::string& hash);
void write_field_csv(const std::string& path, const BodyFittedGrid& grid,
                     const StreamField& field, const GasParams& g,
                     const std::string& hash);
void write_shock_csv(const std::string& path, const ShockCurve& f,
                     const std::string& hash);
void write_report(const std::string& path, const SolveReport& rep,
                  const std::string& hash);
void write_text(const std::string& path, const std::string& text);

struct CsvTable {
  std::vector<std::string> meta;  // '#' lines without the marker
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::string meta_value(const std::string& key) const;
};

// Throws ConfigError when the file is missing, DomainError when malformed.
CsvTable read_csv(const std::string& path);

ShockCurve read_shock_csv(const std::string& path);

struct FieldTable {
  int ns = 0, nt = 0;
  std::vector<double> x1, x2, psi;
};
FieldTable read_field_csv(const std::string& path);

}  // namespace detshock

#endif  // DETSHOCK_IO_HPP_
