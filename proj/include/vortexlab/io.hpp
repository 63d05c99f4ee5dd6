#pragma once

// CSV export/import of solutions and the JSON report format.
//
// CSV files start with one metadata line "# key=value key=value ..." followed by a
// column header. Reals are written with 17 significant digits so files round-trip.

#include <map>
#include <ostream>
#include <string>

#include "vortexlab/planar.hpp"
#include "vortexlab/radial.hpp"
#include "vortexlab/verify.hpp"

namespace vortexlab {

/// 17 significant digits; inf and nan as "inf", "-inf", "nan".
std::string format_real(double x);

struct CsvMetadata {
  std::map<std::string, std::string> values;

  bool has(const std::string& key) const { return values.count(key) != 0; }
  /// Throws IoError when the key is missing or malformed.
  const std::string& text(const std::string& key) const;
  double number(const std::string& key) const;
  int integer(const std::string& key) const;
  bool flag(const std::string& key) const;
};

/// Reads only the metadata line. A missing file throws InvalidParameter; an
/// unreadable or malformed one throws IoError.
CsvMetadata read_csv_metadata(const std::string& path);

void write_radial_csv(const std::string& path, const RadialSolution& sol, double tol);
void write_radial_csv(std::ostream& out, const RadialSolution& sol, double tol);
RadialSolution read_radial_csv(const std::string& path);

void write_profile_csv(const std::string& path, const ProfileSet& ps, int N, double tol);
void write_profile_csv(std::ostream& out, const ProfileSet& ps, int N, double tol);

void write_planar_csv(const std::string& path, const PlanarSolution& sol, double tol);
void write_planar_csv(std::ostream& out, const PlanarSolution& sol, double tol);
PlanarSolution read_planar_csv(const std::string& path);

std::string report_to_json(const VerificationReport& report);
/// Throws IoError on malformed input.
VerificationReport report_from_json(const std::string& text);

std::string constants_to_json(const CouplingData& cd, const SpectralConstants& sc);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace vortexlab
