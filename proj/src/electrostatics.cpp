#include "pullin/electrostatics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "pullin/errors.hpp"

namespace pullin::electrostatics {

ElectrostaticConfig ElectrostaticConfig::for_specimen(const Specimen& specimen) {
  ElectrostaticConfig cfg;
  cfg.permittivity = specimen.permittivity();
  cfg.electrode_width = specimen.section.width;
  cfg.gap = specimen.gap;
  cfg.fringing = specimen.fringing;
  return cfg;
}

void ElectrostaticConfig::validate() const {
  if (!(permittivity > 0.0)) throw InputError("permittivity must be positive");
  if (!(electrode_width > 0.0)) throw InputError("electrode width must be positive");
  if (!(gap > 0.0)) throw InputError("gap must be positive");
  if (!(collapse_fraction > 0.0 && collapse_fraction < 1.0)) throw InputError("collapse fraction must lie in (0, 1)");
  if (!(force_scale > 0.0) || !std::isfinite(force_scale)) throw InputError("force scale must be positive");
  if (quadrature_points < 1 || quadrature_points > 8) throw InputError("quadrature points must lie in 1..8");
}

double ElectrostaticConfig::fringing_factor(double local_gap) const {
  return fringing ? 1.0 + kPalmerCoefficient * local_gap / electrode_width : 1.0;
}

double ElectrostaticConfig::line_load(double local_gap, double voltage) const {
  return force_scale * permittivity * electrode_width * voltage * voltage / (2.0 * local_gap * local_gap) *
         fringing_factor(local_gap);
}

double ElectrostaticConfig::line_load_slope(double local_gap, double voltage) const {
  const double c = force_scale * permittivity * electrode_width * voltage * voltage / 2.0;
  const double g3 = local_gap * local_gap * local_gap;
  double slope = 2.0 * c / g3;
  // The fringing term c*0.65/(w g) contributes -d/dg = c*0.65/(w g^2).
  if (fringing) slope += c * kPalmerCoefficient / (electrode_width * local_gap * local_gap);
  return slope;
}

namespace {

template <typename Visit>
void for_each_point(const fem::Mesh& mesh, const Eigen::VectorXd& q, const ElectrostaticConfig& cfg, Visit visit) {
  const fem::QuadratureRule& rule = fem::gauss_rule(cfg.quadrature_points);
  const double h = mesh.element_length();
  for (std::size_t e = 0; e < static_cast<std::size_t>(mesh.n_elements()); ++e) {
    const fem::ElementVector qe = fem::gather(mesh, q, e);
    for (std::size_t g = 0; g < rule.points.size(); ++g) {
      const fem::HermiteShapes sh = fem::hermite(rule.points[g], h);
      double v = 0.0;
      for (std::size_t k = 0; k < 4; ++k) v += sh.n[k] * qe[fem::kTransverseLocal[k]];
      visit(e, sh, rule.weights[g] * h, cfg.gap - v, rule.points[g]);
    }
  }
}

void require_gap(const fem::Mesh& mesh, std::size_t element, double s, double local_gap) {
  if (local_gap > 0.0) return;
  std::ostringstream msg;
  msg << "penetration: gap " << local_gap << " m at x = " << mesh.element_length() * (element + s) << " m";
  throw PenetrationError(msg.str());
}

}  // namespace

double min_gap(const fem::Mesh& mesh, const Eigen::VectorXd& q, const ElectrostaticConfig& cfg) {
  double smallest = std::numeric_limits<double>::infinity();
  for_each_point(mesh, q, cfg,
                 [&](std::size_t, const fem::HermiteShapes&, double, double g, double) { smallest = std::min(smallest, g); });
  // Node values too, so the tip of a cantilever is covered.
  for (std::size_t node = 0; node < mesh.n_nodes(); ++node) {
    smallest = std::min(smallest, cfg.gap - q[fem::Mesh::dof(node, fem::kTransverse)]);
  }
  return smallest;
}

Eigen::VectorXd distributed_load(const fem::Mesh& mesh, const Eigen::VectorXd& q, double voltage,
                                 const ElectrostaticConfig& cfg) {
  Eigen::VectorXd f = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(mesh.dof_count()));
  for_each_point(mesh, q, cfg, [&](std::size_t e, const fem::HermiteShapes& sh, double dx, double g, double s) {
    require_gap(mesh, e, s, g);
    const double p = cfg.line_load(g, voltage);
    const auto dofs = mesh.element_dofs(e);
    for (std::size_t k = 0; k < 4; ++k) f[dofs[fem::kTransverseLocal[k]]] += dx * p * sh.n[k];
  });
  return f;
}

BandedSymmetricMatrix load_jacobian(const fem::Mesh& mesh, const Eigen::VectorXd& q, double voltage,
                                    const ElectrostaticConfig& cfg) {
  BandedSymmetricMatrix jac(mesh.dof_count(), fem::kHalfBandwidth);
  for_each_point(mesh, q, cfg, [&](std::size_t e, const fem::HermiteShapes& sh, double dx, double g, double s) {
    require_gap(mesh, e, s, g);
    const double dp = cfg.line_load_slope(g, voltage);
    const auto dofs = mesh.element_dofs(e);
    for (std::size_t a = 0; a < 4; ++a) {
      for (std::size_t b = 0; b <= a; ++b) {
        jac.add(dofs[fem::kTransverseLocal[a]], dofs[fem::kTransverseLocal[b]], dx * dp * sh.n[a] * sh.n[b]);
      }
    }
  });
  return jac;
}

double LumpedTransducer::capacitance(double x) const { return permittivity * area / (gap - x); }

double LumpedTransducer::force(double x, double voltage) const {
  const double g = gap - x;
  return permittivity * area * voltage * voltage / (2.0 * g * g);
}

double LumpedTransducer::force_slope(double x, double voltage) const {
  const double g = gap - x;
  return permittivity * area * voltage * voltage / (g * g * g);
}

LumpedPullIn lumped_pullin(double stiffness, const LumpedTransducer& t) {
  if (!(stiffness > 0.0)) throw InputError("spring stiffness must be positive");
  return {std::sqrt(8.0 * stiffness * t.gap * t.gap * t.gap / (27.0 * t.permittivity * t.area)), t.gap / 3.0};
}

}  // namespace pullin::electrostatics
