#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "pullin/domain.hpp"
#include "pullin/errors.hpp"
#include "pullin/units.hpp"

namespace pullin {

namespace {

constexpr double kNone = std::numeric_limits<double>::quiet_NaN();

// Measured dimensions in um, voltages in V, prestress in MPa, as tabulated.
struct Row {
  int geometry;
  int sample;
  BoundaryCondition bc;
  double length_um;
  double width_um;
  double thickness_um;
  double gap_um;
  double tip_rise_um;  // cantilevers only
  double vpi_low;
  double vpi_high;
  double prestress_mpa;  // bridges only
  bool incomplete;
};

constexpr auto C = BoundaryCondition::Cantilever;
constexpr auto B = BoundaryCondition::ClampedClamped;

// Geometry 7 sample 1 only reports t* + g* = 9.17 um; nominal t = 4.8 um is
// assumed and the row is flagged incomplete.
constexpr std::array<Row, 19> kRows{{
    {1, 1, C, 531.4, 33.5, 2.953, 2.996, 6.334, 10, 11, kNone, false},
    {1, 2, C, 535.2, 32.9, 2.966, 2.913, 4.158, 10, 11, kNone, false},
    {1, 3, C, 534.3, 33.3, 3.012, 2.883, 6.613, 10, 11, kNone, false},
    {2, 1, C, 190.5, 32.4, 1.842, 2.971, 3.845, 43, 44, kNone, false},
    {2, 2, C, 190.3, 32.0, 1.817, 3.107, 4.139, 46, 47, kNone, false},
    {2, 3, C, 190.3, 32.1, 1.820, 3.170, 3.932, 47, 48, kNone, false},
    {3, 1, C, 189.7, 33.0, 2.594, 2.897, 1.130, 58, 59, kNone, false},
    {3, 2, C, 190.1, 32.6, 2.578, 2.939, 1.270, 56, 57, kNone, false},
    {3, 3, C, 189.7, 32.8, 2.614, 2.968, 1.342, 57, 58, kNone, false},
    {4, 1, C, 189.8, 33.7, 4.899, 3.004, 0.049, 81, 82, kNone, false},
    {4, 2, C, 190.2, 33.3, 4.875, 3.002, 0.044, 90, 91, kNone, false},
    {4, 3, C, 190.6, 33.7, 4.799, 3.079, 0.032, 88, 89, kNone, false},
    {5, 1, B, 541.8, 32.2, 2.68, 2.83, kNone, 57, 58, 30, false},
    {5, 2, B, 541.0, 32.3, 2.7, 2.81, kNone, 59, 60, 32, false},
    {5, 3, B, 544.3, 32.4, 2.792, 2.913, kNone, 59, 60, 29, false},
    {6, 1, B, 371.4, 13.9, 5.627, 3.110, kNone, 180, 190, 0, false},
    {7, 1, B, 650.0, 11.9, 4.8, 4.37, kNone, 88, 89, 20, true},
    {7, 2, B, 653.1, 11.9, 6.08, 3.041, kNone, 88, 89, 20, false},
    {7, 3, B, 655.1, 12.5, 6.01, 3.114, kNone, 88, 89, 20, false},
}};

CatalogEntry make_entry(const Row& row) {
  CatalogEntry entry;
  entry.geometry = row.geometry;
  entry.sample = row.sample;
  entry.id = "geom" + std::to_string(row.geometry) + "/sample" + std::to_string(row.sample);
  entry.measured_vpi_low = row.vpi_low;
  entry.measured_vpi_high = row.vpi_high;
  entry.incomplete = row.incomplete;
  if (!std::isnan(row.prestress_mpa)) entry.published_prestress = units::from_megapascals(row.prestress_mpa);

  Specimen& s = entry.specimen;
  s.name = entry.id;
  s.bc = row.bc;
  s.length = units::from_micrometres(row.length_um);
  s.section.width = units::from_micrometres(row.width_um);
  s.section.thickness = units::from_micrometres(row.thickness_um);
  s.gap = units::from_micrometres(row.gap_um);
  if (!std::isnan(row.tip_rise_um)) s.tip_rise = units::from_micrometres(row.tip_rise_um);
  return entry;
}

}  // namespace

const std::vector<CatalogEntry>& load_catalog() {
  static const std::vector<CatalogEntry> catalog = [] {
    std::vector<CatalogEntry> entries;
    entries.reserve(kRows.size());
    for (const Row& row : kRows) entries.push_back(make_entry(row));
    return entries;
  }();
  return catalog;
}

const CatalogEntry& lookup(std::string_view id) {
  for (const CatalogEntry& entry : load_catalog()) {
    if (entry.id == id) return entry;
  }
  throw InputError("unknown catalog id '" + std::string(id) + "' (expected geomN/sampleM)");
}

}  // namespace pullin
