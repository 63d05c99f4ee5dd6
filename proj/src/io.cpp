#include "vortexlab/io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "vortexlab/errors.hpp"

namespace vortexlab {

using ordered_json = nlohmann::ordered_json;

std::string format_real(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

std::ofstream open_for_write(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing: " + std::strerror(errno));
  return out;
}

void finish_write(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw IoError("write to '" + path + "' failed");
}

std::ifstream open_for_read(const std::string& path) {
  std::error_code ec;
  if (!std::filesystem::exists(path, ec))
    throw InvalidParameter("input file '" + path + "' does not exist");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading: " + std::strerror(errno));
  return in;
}

std::string params_metadata(const ModelParams& p) {
  return "N=" + std::to_string(p.N) + " n1=" + format_real(p.n1) + " n2=" + format_real(p.n2) +
         " tau=" + format_real(p.tau) + " theorem_mode=" + (p.theorem_mode ? "true" : "false");
}

CsvMetadata parse_metadata_line(const std::string& line, const std::string& path) {
  if (line.empty() || line[0] != '#') throw IoError("'" + path + "' has no '#' metadata line");
  CsvMetadata meta;
  std::istringstream ss(line.substr(1));
  std::string tok;
  while (ss >> tok) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos || eq == 0)
      throw IoError("malformed metadata entry '" + tok + "' in '" + path + "'");
    meta.values[tok.substr(0, eq)] = tok.substr(eq + 1);
  }
  return meta;
}

ModelParams params_from_metadata(const CsvMetadata& m) {
  ModelParams p;
  p.N = m.integer("N");
  p.n1 = m.number("n1");
  p.n2 = m.number("n2");
  p.tau = m.number("tau");
  p.theorem_mode = m.flag("theorem_mode");
  p.validate();
  return p;
}

double parse_real(const std::string& s, const std::string& path) {
  const char* begin = s.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0') throw IoError("malformed number '" + s + "' in '" + path + "'");
  return v;
}

// Reads the header check and all data rows of a CSV file.
std::vector<std::vector<double>> read_rows(std::ifstream& in, const std::string& path,
                                           const std::string& expected_header) {
  std::string line;
  if (!std::getline(in, line) || line != expected_header)
    throw IoError("'" + path + "' does not have the column header '" + expected_header + "'");
  std::size_t columns = 1;
  for (char c : expected_header) columns += c == ',' ? 1 : 0;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    row.reserve(columns);
    std::size_t start = 0;
    while (true) {
      const auto comma = line.find(',', start);
      row.push_back(parse_real(line.substr(start, comma - start), path));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (row.size() != columns) throw IoError("row with wrong column count in '" + path + "'");
    rows.push_back(std::move(row));
  }
  if (in.bad()) throw IoError("read from '" + path + "' failed");
  return rows;
}

constexpr const char* kRadialHeader = "r,u1,u2,Q1,Q2,f,fNA,E1,E2";
constexpr const char* kProfileHeader = "r,f,fNA,Q1,Q2";
constexpr const char* kPlanarHeader = "x,y,w1,w2,u1,u2";

// Serializer that prints every floating-point number with 17 significant digits.
void emit(const ordered_json& j, std::string& out, int indent) {
  const std::string pad(static_cast<std::size_t>(indent), ' ');
  const std::string inner(static_cast<std::size_t>(indent + 2), ' ');
  switch (j.type()) {
    case ordered_json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += inner + ordered_json(it.key()).dump() + ": ";
        emit(it.value(), out, indent + 2);
      }
      out += "\n" + pad + "}";
      return;
    }
    case ordered_json::value_t::array: {
      out += "[";
      bool first = true;
      for (const auto& v : j) {
        if (!first) out += ", ";
        first = false;
        emit(v, out, indent + 2);
      }
      out += "]";
      return;
    }
    case ordered_json::value_t::number_float: {
      const double x = j.get<double>();
      out += std::isfinite(x) ? format_real(x) : "null";
      return;
    }
    default:
      out += j.dump();
  }
}

ordered_json optional_number(const std::optional<double>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

std::optional<double> read_optional(const ordered_json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

ordered_json flux_json(const FluxRecord& r) {
  ordered_json j;
  j["value"] = r.value;
  j["target"] = r.target;
  j["abs_error"] = r.abs_error;
  j["rel_error"] = r.rel_error;
  return j;
}

FluxRecord flux_from(const ordered_json& j) {
  return {j.at("value").get<double>(), j.at("target").get<double>(),
          j.at("abs_error").get<double>(), j.at("rel_error").get<double>()};
}

ordered_json window_json(const DecayWindow& w) { return ordered_json::array({w.r_a, w.r_b}); }

DecayWindow window_from(const ordered_json& j) {
  return {j.at(0).get<double>(), j.at(1).get<double>()};
}

ordered_json mat_json(const Mat2& m) {
  return ordered_json::array({ordered_json::array({m.a11, m.a12}), ordered_json::array({m.a21, m.a22})});
}

}  // namespace

const std::string& CsvMetadata::text(const std::string& key) const {
  const auto it = values.find(key);
  if (it == values.end()) throw IoError("metadata key '" + key + "' is missing");
  return it->second;
}

double CsvMetadata::number(const std::string& key) const {
  return parse_real(text(key), "metadata key " + key);
}

int CsvMetadata::integer(const std::string& key) const {
  const std::string& s = text(key);
  char* end = nullptr;
  const long v = std::strtol(s.c_str(), &end, 10);
  if (end == s.c_str() || *end != '\0') throw IoError("metadata key '" + key + "' is not an integer");
  return static_cast<int>(v);
}

bool CsvMetadata::flag(const std::string& key) const {
  const std::string& s = text(key);
  if (s == "true") return true;
  if (s == "false") return false;
  throw IoError("metadata key '" + key + "' is not true/false");
}

CsvMetadata read_csv_metadata(const std::string& path) {
  std::ifstream in = open_for_read(path);
  std::string line;
  if (!std::getline(in, line)) throw IoError("'" + path + "' is empty");
  return parse_metadata_line(line, path);
}

void write_radial_csv(std::ostream& out, const RadialSolution& sol, double tol) {
  const ProfileSet ps = reconstruct_profiles(sol, sol.params);
  out << "# kind=radial " << params_metadata(sol.params) << " r_min=" << format_real(sol.mesh.r_min)
      << " r_max=" << format_real(sol.mesh.r_max) << " nodes=" << sol.mesh.count()
      << " tol=" << format_real(tol) << " iterations=" << sol.iterations
      << " residual=" << format_real(sol.final_residual) << "\n";
  out << kRadialHeader << "\n";
  for (std::size_t i = 0; i < sol.mesh.count(); ++i) {
    out << format_real(sol.mesh.nodes[i]) << ',' << format_real(sol.u1[i]) << ','
        << format_real(sol.u2[i]) << ',' << format_real(ps.Q1[i]) << ',' << format_real(ps.Q2[i])
        << ',' << format_real(ps.f[i]) << ',' << format_real(ps.f_NA[i]) << ','
        << format_real(sol.E1[i]) << ',' << format_real(sol.E2[i]) << '\n';
  }
}

void write_radial_csv(const std::string& path, const RadialSolution& sol, double tol) {
  std::ofstream out = open_for_write(path);
  write_radial_csv(out, sol, tol);
  finish_write(out, path);
}

RadialSolution read_radial_csv(const std::string& path) {
  std::ifstream in = open_for_read(path);
  std::string line;
  if (!std::getline(in, line)) throw IoError("'" + path + "' is empty");
  const CsvMetadata meta = parse_metadata_line(line, path);
  if (meta.text("kind") != "radial") throw IoError("'" + path + "' is not a radial solution file");
  RadialSolution sol;
  sol.params = params_from_metadata(meta);
  const auto rows = read_rows(in, path, kRadialHeader);
  if (rows.size() < 3) throw IoError("'" + path + "' has too few rows");
  sol.mesh.r_min = meta.number("r_min");
  sol.mesh.r_max = meta.number("r_max");
  const BackgroundField bg(sol.params);
  for (const auto& row : rows) {
    const double r = row[0];
    sol.mesh.nodes.push_back(r);
    sol.u1.push_back(row[1]);
    sol.u2.push_back(row[2]);
    sol.E1.push_back(row[7]);
    sol.E2.push_back(row[8]);
    sol.P1.push_back(row[1] - bg.u0(0, r * r));
    sol.P2.push_back(row[2] - bg.u0(1, r * r));
  }
  sol.iterations = meta.integer("iterations");
  sol.final_residual = meta.number("residual");
  sol.converged = true;
  return sol;
}

void write_profile_csv(std::ostream& out, const ProfileSet& ps, int N, double tol) {
  out << "# kind=profile N=" << N << " r_min=" << format_real(ps.mesh.r_min)
      << " r_max=" << format_real(ps.mesh.r_max) << " nodes=" << ps.mesh.count()
      << " tol=" << format_real(tol) << " iterations=" << ps.iterations
      << " residual=" << format_real(ode_residual(ps, N)) << "\n";
  out << kProfileHeader << "\n";
  for (std::size_t i = 0; i < ps.mesh.count(); ++i) {
    out << format_real(ps.mesh.nodes[i]) << ',' << format_real(ps.f[i]) << ','
        << format_real(ps.f_NA[i]) << ',' << format_real(ps.Q1[i]) << ',' << format_real(ps.Q2[i])
        << '\n';
  }
}

void write_profile_csv(const std::string& path, const ProfileSet& ps, int N, double tol) {
  std::ofstream out = open_for_write(path);
  write_profile_csv(out, ps, N, tol);
  finish_write(out, path);
}

void write_planar_csv(std::ostream& out, const PlanarSolution& sol, double tol) {
  const PlanarGrid& g = sol.grid;
  out << "# kind=planar " << params_metadata(sol.params) << " half_width=" << format_real(g.half_width)
      << " points_per_side=" << g.points_per_side
      << " origin_offset=" << (g.origin_offset ? "true" : "false") << " tol=" << format_real(tol)
      << " iterations=" << sol.iterations << " gradient_norm=" << format_real(sol.final_gradient_norm)
      << " energy=" << format_real(sol.final_energy)
      << " converged=" << (sol.converged ? "true" : "false") << "\n";
  out << kPlanarHeader << "\n";
  std::string line;
  for (int j = 0; j < g.points_per_side; ++j) {
    for (int i = 0; i < g.points_per_side; ++i) {
      const std::size_t k = g.index(i, j);
      line.clear();
      line += format_real(g.coord(i));
      line += ',';
      line += format_real(g.coord(j));
      line += ',';
      line += format_real(sol.w.w1[k]);
      line += ',';
      line += format_real(sol.w.w2[k]);
      line += ',';
      line += format_real(sol.u1[k]);
      line += ',';
      line += format_real(sol.u2[k]);
      line += '\n';
      out << line;
    }
  }
}

void write_planar_csv(const std::string& path, const PlanarSolution& sol, double tol) {
  std::ofstream out = open_for_write(path);
  write_planar_csv(out, sol, tol);
  finish_write(out, path);
}

PlanarSolution read_planar_csv(const std::string& path) {
  std::ifstream in = open_for_read(path);
  std::string line;
  if (!std::getline(in, line)) throw IoError("'" + path + "' is empty");
  const CsvMetadata meta = parse_metadata_line(line, path);
  if (meta.text("kind") != "planar") throw IoError("'" + path + "' is not a planar solution file");
  const ModelParams params = params_from_metadata(meta);
  const PlanarGrid grid = PlanarGrid::make(meta.number("half_width"), meta.integer("points_per_side"));
  const auto rows = read_rows(in, path, kPlanarHeader);
  if (rows.size() != grid.size()) throw IoError("'" + path + "' row count does not match the grid");
  FieldPair w = FieldPair::zeros(grid);
  for (std::size_t k = 0; k < rows.size(); ++k) {
    w.w1[k] = rows[k][2];
    w.w2[k] = rows[k][3];
  }
  PlanarSolution sol = make_planar_solution(params, grid, std::move(w));
  sol.iterations = meta.integer("iterations");
  sol.final_gradient_norm = meta.number("gradient_norm");
  sol.final_energy = meta.number("energy");
  sol.converged = meta.flag("converged");
  return sol;
}

std::string report_to_json(const VerificationReport& r) {
  ordered_json j;
  j["params"] = {{"N", r.params.N},
                 {"n1", r.params.n1},
                 {"n2", r.params.n2},
                 {"tau", r.params.tau},
                 {"theorem_mode", r.params.theorem_mode}};
  const ConstantsRecord& c = r.constants;
  j["constants"] = {{"alpha", c.alpha},     {"beta", c.beta},       {"gamma", c.gamma},
                    {"lambda0", c.lambda0}, {"lambda1", c.lambda1}, {"lambda2", c.lambda2},
                    {"lambda3", c.lambda3}, {"lambda4", c.lambda4}, {"lambda", c.lambda},
                    {"m", c.m},             {"p", c.p},             {"q", c.q}};
  j["flux"] = {{"first", flux_json(r.flux.first)}, {"second", flux_json(r.flux.second)}};
  j["component_flux"] = {{"E1", flux_json(r.component_flux.e1)},
                         {"E2", flux_json(r.component_flux.e2)}};
  ordered_json decay = ordered_json::array();
  for (const DecayRecord& d : r.decay) {
    ordered_json e;
    e["quantity"] = d.quantity;
    e["window"] = window_json(d.window);
    e["fitted_rate"] = optional_number(d.fitted_rate);
    e["paper_bound"] = d.paper_bound;
    e["linearized_rate"] = d.linearized_rate;
    e["linearized_rate_fast"] = d.linearized_rate_fast;
    e["samples"] = d.samples;
    e["warning"] = d.warning;
    decay.push_back(std::move(e));
  }
  j["decay"] = std::move(decay);
  j["residuals"] = {{"pde_sup", optional_number(r.residuals.pde_sup)},
                    {"ode_sup", optional_number(r.residuals.ode_sup)}};
  j["uniqueness"] = {{"sup_difference", optional_number(r.uniqueness.sup_difference)}};
  j["cross_validation"] = {{"sup_difference", optional_number(r.cross_validation.sup_difference)},
                           {"window", window_json(r.cross_validation.window)}};
  std::string out;
  emit(j, out, 0);
  out += "\n";
  return out;
}

VerificationReport report_from_json(const std::string& text) {
  try {
    const ordered_json j = ordered_json::parse(text);
    VerificationReport r;
    const auto& p = j.at("params");
    r.params.N = p.at("N").get<int>();
    r.params.n1 = p.at("n1").get<double>();
    r.params.n2 = p.at("n2").get<double>();
    r.params.tau = p.at("tau").get<double>();
    r.params.theorem_mode = p.at("theorem_mode").get<bool>();
    const auto& c = j.at("constants");
    ConstantsRecord& k = r.constants;
    k.alpha = c.at("alpha").get<double>();
    k.beta = c.at("beta").get<double>();
    k.gamma = c.at("gamma").get<double>();
    k.lambda0 = c.at("lambda0").get<double>();
    k.lambda1 = c.at("lambda1").get<double>();
    k.lambda2 = c.at("lambda2").get<double>();
    k.lambda3 = c.at("lambda3").get<double>();
    k.lambda4 = c.at("lambda4").get<double>();
    k.lambda = c.at("lambda").get<double>();
    k.m = c.at("m").get<double>();
    k.p = c.at("p").get<double>();
    k.q = c.at("q").get<double>();
    r.flux.first = flux_from(j.at("flux").at("first"));
    r.flux.second = flux_from(j.at("flux").at("second"));
    r.component_flux.e1 = flux_from(j.at("component_flux").at("E1"));
    r.component_flux.e2 = flux_from(j.at("component_flux").at("E2"));
    for (const auto& e : j.at("decay")) {
      DecayRecord d;
      d.quantity = e.at("quantity").get<std::string>();
      d.window = window_from(e.at("window"));
      d.fitted_rate = read_optional(e.at("fitted_rate"));
      d.paper_bound = e.at("paper_bound").get<double>();
      d.linearized_rate = e.at("linearized_rate").get<double>();
      d.linearized_rate_fast = e.at("linearized_rate_fast").get<double>();
      d.samples = e.at("samples").get<int>();
      d.warning = e.at("warning").get<std::string>();
      r.decay.push_back(std::move(d));
    }
    r.residuals.pde_sup = read_optional(j.at("residuals").at("pde_sup"));
    r.residuals.ode_sup = read_optional(j.at("residuals").at("ode_sup"));
    r.uniqueness.sup_difference = read_optional(j.at("uniqueness").at("sup_difference"));
    r.cross_validation.sup_difference = read_optional(j.at("cross_validation").at("sup_difference"));
    r.cross_validation.window = window_from(j.at("cross_validation").at("window"));
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("malformed report: ") + e.what());
  }
}

std::string constants_to_json(const CouplingData& cd, const SpectralConstants& sc) {
  ordered_json j;
  j["N"] = cd.N;
  j["alpha"] = cd.alpha;
  j["beta"] = cd.beta;
  j["gamma"] = cd.gamma;
  j["A"] = mat_json(cd.A);
  j["L"] = mat_json(cd.L);
  j["R"] = mat_json(cd.R);
  j["B"] = mat_json(cd.B);
  j["M"] = mat_json(cd.M);
  j["lambda1"] = sc.lambda1;
  j["lambda2"] = sc.lambda2;
  j["lambda0"] = sc.lambda0;
  j["O"] = mat_json(sc.O);
  j["D"] = mat_json(sc.D);
  j["lambda3"] = sc.lambda3;
  j["lambda4"] = sc.lambda4;
  j["lambda"] = sc.lambda;
  j["T"] = mat_json(sc.T);
  j["m"] = sc.m;
  j["p"] = sc.p;
  j["q"] = sc.q;
  std::string out;
  emit(j, out, 0);
  out += "\n";
  return out;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out = open_for_write(path);
  out << content;
  finish_write(out, path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in = open_for_read(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("read from '" + path + "' failed");
  return ss.str();
}

}  // namespace vortexlab
