#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pullin {

struct Material {
  double young_modulus = 80e9;  // Pa, electroplated gold default
  double poisson_ratio = 0.42;

  void validate() const;
};

/// Which modulus the beam bends with.
enum class ModulusRule {
  Auto,   // plate modulus when w/t >= 5, plain E otherwise
  Plain,  // E
  Plate,  // E / (1 - nu^2)
};

struct Section {
  double width = 0.0;      // m
  double thickness = 0.0;  // m
  ModulusRule modulus_rule = ModulusRule::Auto;

  double area() const { return width * thickness; }
  double second_moment() const { return width * thickness * thickness * thickness / 12.0; }

  void validate() const;
};

/// Width-to-thickness ratio at and above which ModulusRule::Auto switches to
/// the plate modulus.
inline constexpr double kWideBeamRatio = 5.0;

double effective_modulus(const Material& material, const Section& section);

enum class BoundaryCondition { Cantilever, ClampedClamped };

std::string_view to_string(BoundaryCondition bc);

/// One tested beam. Lengths in m, stresses in Pa, curvature in 1/m.
///
/// Residual stress only applies to clamped-clamped beams; tip rise and
/// explicit curvature only to cantilevers. A tip rise y is turned into the
/// uniform curvature 2y/L^2.
struct Specimen {
  std::string name;
  BoundaryCondition bc = BoundaryCondition::ClampedClamped;
  double length = 0.0;
  Section section;
  Material material;
  double gap = 0.0;
  double relative_permittivity = 1.0;
  double residual_stress = 0.0;
  std::optional<double> tip_rise;
  std::optional<double> curvature;
  bool fringing = false;

  double permittivity() const;
  double initial_curvature() const;

  /// Throws InputError naming the violated constraint.
  void validate() const;
};

struct CatalogEntry {
  std::string id;  // "geomN/sampleM"
  int geometry = 0;
  int sample = 0;
  Specimen specimen;
  double measured_vpi_low = 0.0;   // V
  double measured_vpi_high = 0.0;  // V
  std::optional<double> published_prestress;  // Pa
  bool incomplete = false;
};

/// The measured (starred) specimens of the cantilever and bridge test series.
const std::vector<CatalogEntry>& load_catalog();

/// Throws InputError for unknown ids.
const CatalogEntry& lookup(std::string_view id);

}  // namespace pullin
