#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "pullin/domain.hpp"

namespace pullin {

inline constexpr int kDefaultElements = 32;

/// A specimen config file: the specimen plus its mesh density.
struct SpecimenFile {
  Specimen specimen;
  int n_elements = kDefaultElements;
};

/// Parses the flat `key = value` specimen format. Blank lines and `#` comments
/// are ignored. Keys: name, bc (cantilever|clamped), L_um, w_um, t_um, g_um,
/// E_GPa, nu, sigma0_MPa, y_tip_um, kappa0_per_um, eps_r, fringing (on|off),
/// n_elements. bc, L_um, w_um, t_um and g_um are required. Unknown or
/// duplicate keys, malformed values and invalid specimens raise InputError
/// naming the key and line.
SpecimenFile parse_specimen_config(std::string_view text);
SpecimenFile read_specimen_config(const std::filesystem::path& path);

std::string serialize_specimen(const Specimen& specimen, int n_elements = kDefaultElements);

/// Catalog records use the specimen keys plus id, vpi_low_V, vpi_high_V,
/// prestress_MPa and incomplete (yes|no).
std::string serialize_catalog_entry(const CatalogEntry& entry);
CatalogEntry parse_catalog_entry(std::string_view text);

}  // namespace pullin
