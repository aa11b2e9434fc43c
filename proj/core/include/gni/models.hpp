#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gni/diagnostics.hpp"
#include "gni/discretization.hpp"
#include "gni/gni_stepper.hpp"
#include "gni/system.hpp"

namespace gni {

/// Nonholonomic particle in R^3: L = |v|^2 / 2, zdot - y xdot = 0.
MechanicalSystem make_particle();

/// Snakeboard on SE(2) x T^2, coordinates (x, y, theta, psi, phi).
/// Throws std::invalid_argument unless all parameters are > 0.
MechanicalSystem make_snakeboard(double m, double J, double J0, double J1, double r);

/// Chaplygin sleigh, coordinates (x, y, theta) of the knife edge; the centre
/// of mass sits at distance a along the body axis.
/// Throws std::invalid_argument unless m, I > 0.
MechanicalSystem make_sleigh(double m, double I, double a);

/// a = r cos(theta) cos(phi), b = r sin(theta) cos(phi), c = -sin(phi).
struct SnakeboardFunctions {
  double a;
  double b;
  double c;
};
SnakeboardFunctions snakeboard_functions(double r, double theta, double phi);

/// Sinusoidal controls on the rotor (psi) and the wheel axles (phi), equal
/// phase and frequency. The defaults are illustrative only.
struct SnakeboardControls {
  double amp_psi = 1.0;
  double amp_phi = -1.0;
  double omega = 1.0;  // rad/s
};
DiscreteForce snakeboard_control_force(const SnakeboardControls& controls);

struct ModelDefaults {
  ChartPoint q0;
  std::optional<TangentVec> v0;
  std::optional<ChartPoint> q1;
  double h = 0.01;
};

/// A system bundled with its discrete Lagrangian, symmetry sections and
/// default initial data.
struct Model {
  std::string name;
  std::string description;
  MechanicalSystem system;
  std::function<DiscreteLagrangian(double h)> lagrangian;
  std::vector<SymmetrySection> sections;
  bool supports_force = false;
  ModelDefaults defaults;
};

/// particle, snakeboard, sleigh, free, oscillator.
std::vector<std::string> model_names();

/// Builds a model by name; params override the defaults listed by
/// default_params(name). Unknown names or keys throw std::invalid_argument.
Model make_model(const std::string& name, const std::map<std::string, double>& params = {});
std::map<std::string, double> default_params(const std::string& name);

}  // namespace gni
