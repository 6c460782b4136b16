#include "detshock/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "detshock/errors.hpp"

namespace detshock {

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  return out;
}

void header(std::ofstream& out, const std::string& kind, const std::string& hash) {
  out << "# detshock " << kind << "\n# config_hash=" << hash << "\n";
}

}  // namespace

void write_polar_csv(const std::string& path, const PolarCurve& pc,
                     const GasParams& g, double eps, const std::string& hash) {
  auto out = open_out(path);
  header(out, "polar", hash);
  out << "# gamma,B0,eps\n# " << num(g.gamma) << "," << num(g.b0_bernoulli)
      << "," << num(eps) << "\n";
  out << "u,v\n";
  for (const auto& [u, v] : pc.samples) out << num(u) << "," << num(v) << "\n";
}

void write_body_csv(const std::string& path, const BluntBody& body,
                    const std::vector<double>& x2, const std::string& hash) {
  auto out = open_out(path);
  header(out, "body", hash);
  out << "# profile=" << body.name() << "\n";
  out << "x2,b,bp,bpp\n";
  for (double y : x2)
    out << num(y) << "," << num(body.b(y)) << "," << num(body.d1(y)) << ","
        << num(body.d2(y)) << "\n";
}

void write_grid_csv(const std::string& path, const BodyFittedGrid& grid,
                    const std::string& hash) {
  auto out = open_out(path);
  header(out, "grid", hash);
  out << "# n_s=" << grid.ns << "\n# n_t=" << grid.nt << "\n";
  out << "i,j,x1,x2,tag\n";
  for (int j = 0; j < grid.nt; ++j)
    for (int i = 0; i < grid.ns; ++i) {
      const int k = grid.idx(i, j);
      out << i << "," << j << "," << num(grid.x1[k]) << "," << num(grid.x2[k])
          << "," << static_cast<int>(grid.tag[k]) << "\n";
    }
}

void write_field_csv(const std::string& path, const BodyFittedGrid& grid,
                     const StreamField& field, const GasParams& g,
                     const std::string& hash) {
  auto out = open_out(path);
  header(out, "field", hash);
  out << "# n_s=" << grid.ns << "\n# n_t=" << grid.nt << "\n";
  out << "i,j,x1,x2,psi,u1,u2,rho,mach\n";
  for (int j = 0; j < grid.nt; ++j)
    for (int i = 0; i < grid.ns; ++i) {
      const int k = grid.idx(i, j);
      out << i << "," << j << "," << num(grid.x1[k]) << "," << num(grid.x2[k])
          << "," << num(field.psi[k]) << "," << num(field.u1(k)) << ","
          << num(field.u2(k)) << "," << num(field.rho[k]) << ","
          << num(mach(g, field.state(k))) << "\n";
    }
}

void write_shock_csv(const std::string& path, const ShockCurve& f,
                     const std::string& hash) {
  auto out = open_out(path);
  header(out, "shock", hash);
  out << "x2,f,fp,fpp\n";
  const auto& xs = f.nodes();
  const auto& vs = f.values();
  for (std::size_t j = 0; j < xs.size(); ++j) {
    const double fp = j == 0 ? f.spline().slope_left()
                      : j + 1 == xs.size() ? f.spline().slope_right()
                                           : f.d1(xs[j]);
    out << num(xs[j]) << "," << num(vs[j]) << "," << num(fp) << ","
        << num(f.d2(xs[j])) << "\n";
  }
}

void write_report(const std::string& path, const SolveReport& rep,
                  const std::string& hash) {
  auto out = open_out(path);
  out << "# detshock report\n# config_hash=" << hash << "\n";
  out << "verified = " << (rep.verified ? 1 : 0) << "\n";
  for (const auto& e : rep.entries)
    out << e.key << " = " << num(e.value) << "  # " << e.tolerance << "\n";
  for (std::size_t k = 0; k < rep.history.size(); ++k) {
    const auto& h = rep.history[k];
    out << "outer_" << k << " = " << num(h.change) << "  # lambda "
        << num(h.lambda) << " fixed_point " << num(h.fixed_point)
        << " picard " << h.picard_iterations << "\n";
  }
}

void write_text(const std::string& path, const std::string& text) {
  auto out = open_out(path);
  out << text;
}

std::string CsvTable::meta_value(const std::string& key) const {
  for (const auto& m : meta) {
    const auto eq = m.find('=');
    if (eq != std::string::npos && m.substr(0, eq) == key) return m.substr(eq + 1);
  }
  return "";
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  CsvTable t;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::string m = line.substr(1);
      if (!m.empty() && m[0] == ' ') m = m.substr(1);
      t.meta.push_back(m);
      continue;
    }
    std::stringstream ss(line);
    std::string cell;
    if (t.columns.empty()) {
      while (std::getline(ss, cell, ',')) t.columns.push_back(cell);
      continue;
    }
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t p = 0;
        row.push_back(std::stod(cell, &p));
        if (p != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw DomainError("'" + path + "': bad number '" + cell + "'");
      }
    }
    if (row.size() != t.columns.size())
      throw DomainError("'" + path + "': row width does not match header");
    t.rows.push_back(std::move(row));
  }
  return t;
}

ShockCurve read_shock_csv(const std::string& path) {
  const CsvTable t = read_csv(path);
  if (t.columns != std::vector<std::string>{"x2", "f", "fp", "fpp"} ||
      t.rows.size() < 2)
    throw DomainError("'" + path + "' is not a shock table");
  std::vector<double> x, f;
  for (const auto& r : t.rows) {
    x.push_back(r[0]);
    f.push_back(r[1]);
  }
  return ShockCurve(x, f, t.rows.front()[2], t.rows.back()[2]);
}

FieldTable read_field_csv(const std::string& path) {
  const CsvTable t = read_csv(path);
  const std::vector<std::string> cols = {"i", "j", "x1", "x2", "psi",
                                         "u1", "u2", "rho", "mach"};
  if (t.columns != cols) throw DomainError("'" + path + "' is not a field table");
  FieldTable ft;
  for (const auto& r : t.rows) {
    ft.ns = std::max(ft.ns, static_cast<int>(r[0]) + 1);
    ft.nt = std::max(ft.nt, static_cast<int>(r[1]) + 1);
  }
  if (static_cast<std::size_t>(ft.ns) * ft.nt != t.rows.size())
    throw DomainError("'" + path + "': incomplete node table");
  ft.x1.assign(t.rows.size(), 0.0);
  ft.x2.assign(t.rows.size(), 0.0);
  ft.psi.assign(t.rows.size(), 0.0);
  std::vector<char> seen(t.rows.size(), 0);
  for (const auto& r : t.rows) {
    const int i = static_cast<int>(r[0]), j = static_cast<int>(r[1]);
    if (i < 0 || j < 0) throw DomainError("'" + path + "': negative index");
    const std::size_t k = static_cast<std::size_t>(j) * ft.ns + i;
    if (seen[k]) throw DomainError("'" + path + "': duplicate node");
    seen[k] = 1;
    ft.x1[k] = r[2];
    ft.x2[k] = r[3];
    ft.psi[k] = r[4];
  }
  return ft;
}

}  // namespace detshock
