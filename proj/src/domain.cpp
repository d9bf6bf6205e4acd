#include "pullin/domain.hpp"

#include <cmath>

#include "pullin/errors.hpp"
#include "pullin/units.hpp"

namespace pullin {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw InputError(what);
}

bool positive(double x) { return std::isfinite(x) && x > 0.0; }

}  // namespace

void Material::validate() const {
  require(positive(young_modulus), "young modulus must be positive");
  require(std::isfinite(poisson_ratio) && poisson_ratio >= 0.0 && poisson_ratio < 0.5,
          "poisson ratio must lie in [0, 0.5)");
}

void Section::validate() const {
  require(positive(width), "section width must be positive");
  require(positive(thickness), "section thickness must be positive");
}

double effective_modulus(const Material& material, const Section& section) {
  const double plate = material.young_modulus / (1.0 - material.poisson_ratio * material.poisson_ratio);
  switch (section.modulus_rule) {
    case ModulusRule::Plain:
      return material.young_modulus;
    case ModulusRule::Plate:
      return plate;
    case ModulusRule::Auto:
      break;
  }
  return section.width / section.thickness < kWideBeamRatio ? material.young_modulus : plate;
}

std::string_view to_string(BoundaryCondition bc) {
  return bc == BoundaryCondition::Cantilever ? "cantilever" : "clamped";
}

double Specimen::permittivity() const {
  return units::kVacuumPermittivity * relative_permittivity;
}

double Specimen::initial_curvature() const {
  if (curvature) return *curvature;
  if (tip_rise) return 2.0 * *tip_rise / (length * length);
  return 0.0;
}

void Specimen::validate() const {
  require(positive(length), "length L must be positive");
  require(positive(gap), "gap g must be positive");
  section.validate();
  material.validate();
  require(positive(relative_permittivity), "relative permittivity must be positive");
  require(std::isfinite(residual_stress), "residual stress must be finite");
  if (bc == BoundaryCondition::Cantilever) {
    require(residual_stress == 0.0,
            "residual stress applies to clamped beams only; a cantilever releases it into curvature");
    require(!(tip_rise && curvature), "give either tip rise or curvature, not both");
    if (tip_rise) require(std::isfinite(*tip_rise) && *tip_rise >= 0.0, "tip rise must be >= 0");
    if (curvature) require(std::isfinite(*curvature), "curvature must be finite");
  } else {
    require(!tip_rise && !curvature,
            "tip rise / curvature apply to cantilevers only; clamped beams retain residual stress");
  }
}

}  // namespace pullin
