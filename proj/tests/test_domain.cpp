#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "pullin/domain.hpp"
#include "pullin/errors.hpp"
#include "pullin/specimen_io.hpp"
#include "pullin/units.hpp"

using namespace pullin;

TEST_CASE("catalog holds every tabulated sample with starred dimensions") {
  const auto& catalog = load_catalog();
  CHECK(catalog.size() == 19);
  int cantilevers = 0;
  for (const auto& e : catalog) {
    CHECK(e.measured_vpi_low < e.measured_vpi_high);
    CHECK(e.specimen.length > 0.0);
    CHECK(e.specimen.gap > 0.0);
    CHECK(e.specimen.section.width > 0.0);
    CHECK(e.specimen.section.thickness > 0.0);
    CHECK_NOTHROW(e.specimen.validate());
    if (e.specimen.bc == BoundaryCondition::Cantilever) {
      ++cantilevers;
      CHECK(e.specimen.tip_rise.has_value());
      CHECK_FALSE(e.published_prestress.has_value());
    } else {
      CHECK(e.published_prestress.has_value());
    }
  }
  CHECK(cantilevers == 12);
  CHECK(lookup("geom7/sample1").incomplete);
  CHECK_FALSE(lookup("geom7/sample2").incomplete);
}

TEST_CASE("catalog lookups") {
  SUBCASE("geom2/sample2") {
    const auto& e = lookup("geom2/sample2");
    CHECK(e.specimen.bc == BoundaryCondition::Cantilever);
    CHECK(e.specimen.length == units::from_micrometres(190.3));
    CHECK(e.specimen.section.width == units::from_micrometres(32.0));
    CHECK(e.specimen.section.thickness == units::from_micrometres(1.817));
    CHECK(e.specimen.gap == units::from_micrometres(3.107));
    CHECK(*e.specimen.tip_rise == units::from_micrometres(4.139));
    CHECK(e.measured_vpi_low == 46);
    CHECK(e.measured_vpi_high == 47);
  }
  SUBCASE("geom5/sample1") {
    const auto& e = lookup("geom5/sample1");
    CHECK(e.specimen.bc == BoundaryCondition::ClampedClamped);
    CHECK(e.specimen.length == units::from_micrometres(541.8));
    CHECK(e.specimen.section.width == units::from_micrometres(32.2));
    CHECK(e.specimen.section.thickness == units::from_micrometres(2.68));
    CHECK(e.specimen.gap == units::from_micrometres(2.83));
    CHECK(e.measured_vpi_low == 57);
    CHECK(e.measured_vpi_high == 58);
    CHECK(*e.published_prestress == doctest::Approx(30e6));
  }
  SUBCASE("geom6/sample1") {
    const auto& e = lookup("geom6/sample1");
    CHECK(e.specimen.length == units::from_micrometres(371.4));
    CHECK(e.specimen.section.width == units::from_micrometres(13.9));
    CHECK(e.specimen.section.thickness == units::from_micrometres(5.627));
    CHECK(e.specimen.gap == units::from_micrometres(3.110));
    CHECK(e.measured_vpi_low == 180);
    CHECK(e.measured_vpi_high == 190);
    CHECK(*e.published_prestress == 0.0);
  }
  CHECK_THROWS_AS(lookup("geom9/sample1"), InputError);
}

TEST_CASE("effective modulus rule") {
  Material gold{80e9, 0.42};
  Section wide{32e-6, 1.8e-6};
  CHECK(effective_modulus(gold, wide) == doctest::Approx(80e9 / (1.0 - 0.42 * 0.42)).epsilon(1e-14));
  CHECK(effective_modulus(gold, wide) / 1e9 == doctest::Approx(97.0).epsilon(0.002));

  Section narrow{12e-6, 4.8e-6};
  CHECK(effective_modulus(gold, narrow) == 80e9);

  Material no_poisson{80e9, 0.0};
  CHECK(effective_modulus(no_poisson, wide) == 80e9);
  CHECK(effective_modulus(no_poisson, narrow) == 80e9);

  Section forced = narrow;
  forced.modulus_rule = ModulusRule::Plate;
  CHECK(effective_modulus(gold, forced) == doctest::Approx(97.13e9).epsilon(1e-3));
  CHECK(effective_modulus(gold, Section{32e-6, 1.8e-6, ModulusRule::Plain}) == 80e9);
}

TEST_CASE("section derived quantities for random dimensions") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 200; ++i) {
    const double w = oracle::uniform(rng, 1e-6, 100e-6);
    const double t = oracle::uniform(rng, 0.1e-6, 10e-6);
    const Section s{w, t};
    CHECK(std::abs(s.area() - w * t) <= 1e-12 * w * t);
    const double j = w * t * t * t / 12.0;
    CHECK(std::abs(s.second_moment() - j) <= 1e-12 * j);
  }
}

TEST_CASE("unit conversions in both directions") {
  CHECK(units::from_micrometres(190.3) == doctest::Approx(190.3e-6).epsilon(1e-15));
  CHECK(units::to_micrometres(190.3e-6) == doctest::Approx(190.3).epsilon(1e-15));
  CHECK(units::from_megapascals(30.0) == 30e6);
  CHECK(units::to_megapascals(30e6) == 30.0);
  CHECK(units::from_gigapascals(80.0) == 80e9);
  CHECK(units::to_gigapascals(80e9) == 80.0);
  CHECK(units::from_per_micrometre(2e-4) == doctest::Approx(200.0));
  CHECK(units::to_per_micrometre(200.0) == doctest::Approx(2e-4));

  std::mt19937_64 rng(3);
  for (int i = 0; i < 2000; ++i) {
    const double um = oracle::uniform(rng, 0.01, 1000.0);
    const double m = units::from_micrometres(um);
    CHECK(units::from_micrometres(units::micrometres_exact(m)) == m);
    const double mpa = oracle::uniform(rng, -100.0, 100.0);
    const double pa = units::from_megapascals(mpa);
    CHECK(units::from_megapascals(units::megapascals_exact(pa)) == pa);
  }
}

TEST_CASE("catalog entries round-trip through their text form bit-exactly") {
  for (const auto& e : load_catalog()) {
    const CatalogEntry back = parse_catalog_entry(serialize_catalog_entry(e));
    CHECK(back.id == e.id);
    CHECK(back.geometry == e.geometry);
    CHECK(back.sample == e.sample);
    CHECK(back.measured_vpi_low == e.measured_vpi_low);
    CHECK(back.measured_vpi_high == e.measured_vpi_high);
    CHECK(back.published_prestress == e.published_prestress);
    CHECK(back.incomplete == e.incomplete);
    const Specimen& a = e.specimen;
    const Specimen& b = back.specimen;
    CHECK(b.name == a.name);
    CHECK(b.bc == a.bc);
    CHECK(b.length == a.length);
    CHECK(b.section.width == a.section.width);
    CHECK(b.section.thickness == a.section.thickness);
    CHECK(b.material.young_modulus == a.material.young_modulus);
    CHECK(b.material.poisson_ratio == a.material.poisson_ratio);
    CHECK(b.gap == a.gap);
    CHECK(b.relative_permittivity == a.relative_permittivity);
    CHECK(b.residual_stress == a.residual_stress);
    CHECK(b.tip_rise == a.tip_rise);
    CHECK(b.curvature == a.curvature);
    CHECK(b.fringing == a.fringing);
  }
}

TEST_CASE("specimen config parsing") {
  const std::string good = R"(# bridge
name = bridge A
bc = clamped
L_um = 541.8
w_um = 32.2
t_um = 2.68
g_um = 2.83
E_GPa = 90
nu = 0.3
sigma0_MPa = 12.5
eps_r = 1
fringing = on
n_elements = 16
)";
  const SpecimenFile f = parse_specimen_config(good);
  CHECK(f.specimen.name == "bridge A");
  CHECK(f.specimen.bc == BoundaryCondition::ClampedClamped);
  CHECK(f.specimen.length == units::from_micrometres(541.8));
  CHECK(f.specimen.material.young_modulus == 90e9);
  CHECK(f.specimen.material.poisson_ratio == 0.3);
  CHECK(f.specimen.residual_stress == 12.5e6);
  CHECK(f.specimen.fringing);
  CHECK(f.n_elements == 16);

  SUBCASE("defaults") {
    const SpecimenFile d = parse_specimen_config("bc=cantilever\nL_um=200\nw_um=30\nt_um=2\ng_um=3\n");
    CHECK(d.specimen.material.young_modulus == 80e9);
    CHECK(d.specimen.material.poisson_ratio == 0.42);
    CHECK(d.specimen.relative_permittivity == 1.0);
    CHECK_FALSE(d.specimen.fringing);
    CHECK(d.n_elements == kDefaultElements);
    CHECK(d.specimen.initial_curvature() == 0.0);
  }

  SUBCASE("tip rise becomes uniform curvature") {
    const SpecimenFile d = parse_specimen_config("bc=cantilever\nL_um=200\nw_um=30\nt_um=2\ng_um=3\ny_tip_um=4\n");
    CHECK(d.specimen.initial_curvature() == doctest::Approx(2.0 * 4e-6 / (200e-6 * 200e-6)).epsilon(1e-14));
    const SpecimenFile k =
        parse_specimen_config("bc=cantilever\nL_um=200\nw_um=30\nt_um=2\ng_um=3\nkappa0_per_um=0.0002\n");
    CHECK(k.specimen.initial_curvature() == doctest::Approx(200.0));
  }

  auto error_of = [](const std::string& text) {
    try {
      parse_specimen_config(text);
    } catch (const InputError& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  const std::string base = "bc=clamped\nL_um=200\nw_um=30\nt_um=2\n";
  CHECK(error_of(base + "g_um=3\ncolour=red\n").find("line 6: unknown key 'colour'") != std::string::npos);
  CHECK(error_of(base + "g_um=0\n").find("g_um") != std::string::npos);
  CHECK(error_of(base + "g_um=-1\n").find("line 5") != std::string::npos);
  CHECK(error_of(base).find("missing required key 'g_um'") != std::string::npos);
  CHECK(error_of(base + "g_um=3\ng_um=4\n").find("duplicate key 'g_um'") != std::string::npos);
  CHECK(error_of(base + "g_um=abc\n").find("expected a number") != std::string::npos);
  CHECK(error_of(base + "g_um=3\nfringing=maybe\n").find("fringing") != std::string::npos);
  CHECK(error_of(base + "g_um=3\nbc=weird\n").find("duplicate") != std::string::npos);
  CHECK(error_of(base + "g_um=3\ny_tip_um=2\n").find("cantilevers only") != std::string::npos);
  CHECK(error_of("bc=cantilever\nL_um=200\nw_um=30\nt_um=2\ng_um=3\nsigma0_MPa=10\n").find("clamped beams only") !=
        std::string::npos);
  CHECK(error_of(base + "g_um=3\nnu=0.5\n").find("poisson") != std::string::npos);
  CHECK(error_of(base + "g_um=3\nn_elements=0\n").find("n_elements") != std::string::npos);
  CHECK(error_of(base + "g_um 3\n").find("expected key = value") != std::string::npos);
}

TEST_CASE("specimen serialization re-parses to the same specimen") {
  Specimen s = lookup("geom2/sample3").specimen;
  s.material.young_modulus = 91.234e9;
  s.fringing = true;
  const SpecimenFile back = parse_specimen_config(serialize_specimen(s, 24));
  CHECK(back.n_elements == 24);
  CHECK(back.specimen.material.young_modulus == s.material.young_modulus);
  CHECK(back.specimen.tip_rise == s.tip_rise);
  CHECK(back.specimen.fringing);
}
