#include "pullin/specimen_io.hpp"

#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "pullin/errors.hpp"
#include "pullin/text.hpp"
#include "pullin/units.hpp"

namespace pullin {

namespace {

struct Field {
  std::string value;
  int line = 0;
};

using Fields = std::map<std::string, Field, std::less<>>;

Fields read_fields(std::string_view text, const std::function<bool(std::string_view)>& known) {
  Fields fields;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = text::trim(line);
    if (line.empty()) {
      if (end == text.size()) break;
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw InputError("line " + std::to_string(line_no) + ": expected key = value, got '" + std::string(line) + "'");
    }
    const std::string key(text::trim(line.substr(0, eq)));
    const std::string value(text::trim(line.substr(eq + 1)));
    if (!known(key)) throw InputError("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    if (fields.count(key)) throw InputError("line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    fields.emplace(key, Field{value, line_no});
    if (end == text.size()) break;
  }
  return fields;
}

[[noreturn]] void bad_value(std::string_view key, const Field& f, std::string_view expected) {
  throw InputError("line " + std::to_string(f.line) + ": key '" + std::string(key) + "': expected " +
                   std::string(expected) + ", got '" + f.value + "'");
}

std::optional<double> number(const Fields& fields, std::string_view key) {
  const auto it = fields.find(key);
  if (it == fields.end()) return std::nullopt;
  const auto v = text::parse_double(it->second.value);
  if (!v) bad_value(key, it->second, "a number");
  return v;
}

double positive_number(const Fields& fields, std::string_view key, bool required) {
  const auto v = number(fields, key);
  if (!v) {
    if (required) throw InputError("missing required key '" + std::string(key) + "'");
    return 0.0;
  }
  if (*v <= 0.0) bad_value(key, fields.find(key)->second, "a positive number");
  return *v;
}

bool on_off(const Fields& fields, std::string_view key, std::string_view on, std::string_view off, bool fallback) {
  const auto it = fields.find(key);
  if (it == fields.end()) return fallback;
  if (it->second.value == on) return true;
  if (it->second.value == off) return false;
  bad_value(key, it->second, std::string(on) + " or " + std::string(off));
}

constexpr std::string_view kSpecimenKeys[] = {"name",   "bc",         "L_um",     "w_um",          "t_um",
                                              "g_um",   "E_GPa",      "nu",       "sigma0_MPa",    "y_tip_um",
                                              "kappa0_per_um", "eps_r", "fringing", "n_elements"};
constexpr std::string_view kCatalogKeys[] = {"id", "vpi_low_V", "vpi_high_V", "prestress_MPa", "incomplete"};

bool is_specimen_key(std::string_view key) {
  for (auto k : kSpecimenKeys) {
    if (k == key) return true;
  }
  return false;
}

bool is_catalog_key(std::string_view key) {
  if (is_specimen_key(key)) return true;
  for (auto k : kCatalogKeys) {
    if (k == key) return true;
  }
  return false;
}

SpecimenFile specimen_from_fields(const Fields& fields) {
  SpecimenFile file;
  Specimen& s = file.specimen;
  if (const auto it = fields.find("name"); it != fields.end()) s.name = it->second.value;

  const auto bc = fields.find("bc");
  if (bc == fields.end()) throw InputError("missing required key 'bc'");
  if (bc->second.value == "cantilever") {
    s.bc = BoundaryCondition::Cantilever;
  } else if (bc->second.value == "clamped") {
    s.bc = BoundaryCondition::ClampedClamped;
  } else {
    bad_value("bc", bc->second, "cantilever or clamped");
  }

  s.length = units::from_micrometres(positive_number(fields, "L_um", true));
  s.section.width = units::from_micrometres(positive_number(fields, "w_um", true));
  s.section.thickness = units::from_micrometres(positive_number(fields, "t_um", true));
  s.gap = units::from_micrometres(positive_number(fields, "g_um", true));
  if (fields.count("E_GPa")) s.material.young_modulus = units::from_gigapascals(positive_number(fields, "E_GPa", false));
  if (const auto nu = number(fields, "nu")) s.material.poisson_ratio = *nu;
  if (fields.count("eps_r")) s.relative_permittivity = positive_number(fields, "eps_r", false);
  if (const auto sigma = number(fields, "sigma0_MPa")) s.residual_stress = units::from_megapascals(*sigma);
  if (const auto y = number(fields, "y_tip_um")) s.tip_rise = units::from_micrometres(*y);
  if (const auto k = number(fields, "kappa0_per_um")) s.curvature = units::from_per_micrometre(*k);
  s.fringing = on_off(fields, "fringing", "on", "off", false);

  if (const auto it = fields.find("n_elements"); it != fields.end()) {
    const auto n = text::parse_long(it->second.value);
    if (!n || *n < 1 || *n > 100000) bad_value("n_elements", it->second, "a positive integer");
    file.n_elements = static_cast<int>(*n);
  }

  s.validate();
  return file;
}

void put(std::ostringstream& out, std::string_view key, std::string_view value) {
  out << key << " = " << value << '\n';
}

}  // namespace

SpecimenFile parse_specimen_config(std::string_view text) {
  return specimen_from_fields(read_fields(text, is_specimen_key));
}

SpecimenFile read_specimen_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open specimen config '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_specimen_config(buf.str());
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

std::string serialize_specimen(const Specimen& s, int n_elements) {
  using text::format_shortest;
  std::ostringstream out;
  if (!s.name.empty()) put(out, "name", s.name);
  put(out, "bc", to_string(s.bc));
  put(out, "L_um", format_shortest(units::micrometres_exact(s.length)));
  put(out, "w_um", format_shortest(units::micrometres_exact(s.section.width)));
  put(out, "t_um", format_shortest(units::micrometres_exact(s.section.thickness)));
  put(out, "g_um", format_shortest(units::micrometres_exact(s.gap)));
  put(out, "E_GPa", format_shortest(units::gigapascals_exact(s.material.young_modulus)));
  put(out, "nu", format_shortest(s.material.poisson_ratio));
  if (s.bc == BoundaryCondition::ClampedClamped) {
    put(out, "sigma0_MPa", format_shortest(units::megapascals_exact(s.residual_stress)));
  }
  if (s.tip_rise) put(out, "y_tip_um", format_shortest(units::micrometres_exact(*s.tip_rise)));
  if (s.curvature) put(out, "kappa0_per_um", format_shortest(units::per_micrometre_exact(*s.curvature)));
  put(out, "eps_r", format_shortest(s.relative_permittivity));
  put(out, "fringing", s.fringing ? "on" : "off");
  put(out, "n_elements", std::to_string(n_elements));
  return out.str();
}

std::string serialize_catalog_entry(const CatalogEntry& entry) {
  using text::format_shortest;
  std::ostringstream out;
  put(out, "id", entry.id);
  put(out, "vpi_low_V", format_shortest(entry.measured_vpi_low));
  put(out, "vpi_high_V", format_shortest(entry.measured_vpi_high));
  if (entry.published_prestress) {
    put(out, "prestress_MPa", format_shortest(units::megapascals_exact(*entry.published_prestress)));
  }
  put(out, "incomplete", entry.incomplete ? "yes" : "no");
  return out.str() + serialize_specimen(entry.specimen);
}

CatalogEntry parse_catalog_entry(std::string_view text) {
  const Fields fields = read_fields(text, is_catalog_key);
  CatalogEntry entry;
  const auto id = fields.find("id");
  if (id == fields.end()) throw InputError("missing required key 'id'");
  entry.id = id->second.value;
  if (std::sscanf(entry.id.c_str(), "geom%d/sample%d", &entry.geometry, &entry.sample) != 2) {
    bad_value("id", id->second, "geomN/sampleM");
  }
  entry.measured_vpi_low = positive_number(fields, "vpi_low_V", true);
  entry.measured_vpi_high = positive_number(fields, "vpi_high_V", true);
  if (entry.measured_vpi_low >= entry.measured_vpi_high) {
    throw InputError("line " + std::to_string(fields.find("vpi_high_V")->second.line) +
                     ": vpi_high_V must exceed vpi_low_V");
  }
  if (const auto p = number(fields, "prestress_MPa")) entry.published_prestress = units::from_megapascals(*p);
  entry.incomplete = on_off(fields, "incomplete", "yes", "no", false);

  Fields specimen_fields;
  for (const auto& [key, field] : fields) {
    if (is_specimen_key(key)) specimen_fields.emplace(key, field);
  }
  entry.specimen = specimen_from_fields(specimen_fields).specimen;
  return entry;
}

}  // namespace pullin
