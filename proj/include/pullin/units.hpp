#pragma once

// Conversion between the micro-scale units used in tables, config files and
// CLI output (um, MPa, GPa, 1/um) and the SI values used internally.

namespace pullin::units {

inline constexpr double kVacuumPermittivity = 8.854e-12;  // F/m

inline constexpr double kMicro = 1e6;
inline constexpr double kMega = 1e6;
inline constexpr double kGiga = 1e9;

constexpr double from_micrometres(double um) { return um / kMicro; }
constexpr double to_micrometres(double m) { return m * kMicro; }

constexpr double from_megapascals(double mpa) { return mpa * kMega; }
constexpr double to_megapascals(double pa) { return pa / kMega; }

constexpr double from_gigapascals(double gpa) { return gpa * kGiga; }
constexpr double to_gigapascals(double pa) { return pa / kGiga; }

/// Curvature given in 1/um to 1/m.
constexpr double from_per_micrometre(double per_um) { return per_um * kMicro; }
constexpr double to_per_micrometre(double per_m) { return per_m / kMicro; }

// SI -> display unit such that the matching from_* maps the result back to
// the identical SI value. The plain inverse can be one ulp off; these search
// the neighbourhood so serialized text re-parses bit-exactly.
double micrometres_exact(double m);
double megapascals_exact(double pa);
double gigapascals_exact(double pa);
double per_micrometre_exact(double per_m);

}  // namespace pullin::units
