#include "gni/models.hpp"

#include <cmath>
#include <stdexcept>

namespace gni {
namespace {

void require_positive(const std::string& model, const std::string& key, double v) {
  if (!(v > 0.0)) {
    throw std::invalid_argument(model + ": parameter " + key + " must be > 0");
  }
}

// Translations of R^n; xi is a vector of R^n and xi_Q(q) = xi.
TangentVec translation_generator(const ChartPoint&, const Vector& xi) { return xi; }

std::map<std::string, double> merged(const std::string& name,
                                     const std::map<std::string, double>& overrides) {
  std::map<std::string, double> p = default_params(name);
  for (const auto& [k, v] : overrides) {
    if (!p.count(k)) throw std::invalid_argument(name + ": unknown parameter '" + k + "'");
    p[k] = v;
  }
  return p;
}

Model particle_model() {
  Model md;
  md.name = "particle";
  md.description = "nonholonomic particle in R^3, zdot - y xdot = 0";
  md.system = make_particle();
  md.lagrangian = [](double h) { return make_scaled_quadratic(Matrix::Identity(3, 3), h); };

  SymmetrySection xi1;
  xi1.name = "xi1";
  xi1.g_dim = 3;
  xi1.xi_of_q = [](const ChartPoint& q) { return Vector{{1.0, 0.0, q[1]}}; };
  xi1.generator = translation_generator;
  SymmetrySection xi2;
  xi2.name = "xi2";
  xi2.g_dim = 3;
  xi2.xi_of_q = [](const ChartPoint&) { return Vector{{0.0, 1.0, 0.0}}; };
  xi2.generator = translation_generator;
  md.sections = {xi1, xi2};

  md.defaults.q0 = Vector::Zero(3);
  md.defaults.v0 = Vector{{1.0, 1.0, 0.0}};
  md.defaults.h = 0.01;
  return md;
}

Model snakeboard_model(const std::map<std::string, double>& p) {
  Model md;
  md.name = "snakeboard";
  md.description = "snakeboard on SE(2) x T^2, coordinates (x, y, theta, psi, phi)";
  md.system = make_snakeboard(p.at("m"), p.at("J"), p.at("J0"), p.at("J1"), p.at("r"));
  const Matrix inertia = md.system.metric(ChartPoint::Zero(5));
  md.lagrangian = [inertia](double h) { return make_scaled_quadratic(inertia, h); };
  md.supports_force = true;

  const double r = p.at("r");
  // Section of g^D for the SE(2) action on (x, y, theta):
  // xi = (a + c y) e1 + (b - c x) e2 + c e3, so xi_Q = a d_x + b d_y + c d_theta.
  SymmetrySection se2;
  se2.name = "se2";
  se2.g_dim = 3;
  se2.xi_of_q = [r](const ChartPoint& q) {
    const auto f = snakeboard_functions(r, q[2], q[4]);
    return Vector{{f.a + f.c * q[1], f.b - f.c * q[0], f.c}};
  };
  se2.generator = [](const ChartPoint& q, const Vector& xi) {
    TangentVec v = TangentVec::Zero(5);
    v[0] = xi[0] - xi[2] * q[1];
    v[1] = xi[1] + xi[2] * q[0];
    v[2] = xi[2];
    return v;
  };
  // Rotor rotations are a horizontal symmetry.
  SymmetrySection rotor;
  rotor.name = "psi";
  rotor.g_dim = 1;
  rotor.xi_of_q = [](const ChartPoint&) { return Vector{{1.0}}; };
  rotor.generator = [](const ChartPoint&, const Vector& xi) {
    TangentVec v = TangentVec::Zero(5);
    v[3] = xi[0];
    return v;
  };
  md.sections = {se2, rotor};

  md.defaults.q0 = Vector{{0.0, 0.0, 0.0, 0.0, 0.3}};
  const auto f = snakeboard_functions(r, 0.0, 0.3);
  md.defaults.v0 = Vector{{f.a, f.b, f.c, 0.5, 0.2}};
  md.defaults.h = 0.01;
  return md;
}

Model sleigh_model(const std::map<std::string, double>& p) {
  Model md;
  md.name = "sleigh";
  md.description = "Chaplygin sleigh, coordinates (x, y, theta) of the contact point";
  md.system = make_sleigh(p.at("m"), p.at("I"), p.at("a"));
  const MatrixField metric = md.system.metric;
  const MatrixFieldPartial partial = md.system.metric_partial;
  md.lagrangian = [metric, partial](double h) { return make_midpoint_metric(metric, h, partial); };
  md.defaults.q0 = Vector::Zero(3);
  md.defaults.q1 = Vector{{-0.2395, -0.0070, 0.0589}};
  md.defaults.h = 0.1;
  return md;
}

Model free_model(const std::map<std::string, double>& p) {
  Model md;
  md.name = "free";
  md.description = "free particle on the line";
  md.system.name = "free";
  md.system.n = 1;
  md.system.m = 0;
  const double mass = p.at("mass");
  require_positive("free", "mass", mass);
  md.system.metric = [mass](const ChartPoint&) { return Matrix::Constant(1, 1, mass); };
  md.system.constant_metric = true;
  md.system.params = p;
  const MechanicalSystem sys = md.system;
  md.lagrangian = [sys](double h) { return make_symmetric_mechanical(sys, h); };
  md.defaults.q0 = Vector::Zero(1);
  md.defaults.v0 = Vector::Ones(1);
  md.defaults.h = 0.01;
  return md;
}

Model oscillator_model(const std::map<std::string, double>& p) {
  Model md;
  md.name = "oscillator";
  md.description = "harmonic oscillator on the line, V = k q^2 / 2";
  md.system.name = "oscillator";
  md.system.n = 1;
  md.system.m = 0;
  const double mass = p.at("mass");
  const double k = p.at("k");
  require_positive("oscillator", "mass", mass);
  require_positive("oscillator", "k", k);
  md.system.metric = [mass](const ChartPoint&) { return Matrix::Constant(1, 1, mass); };
  md.system.constant_metric = true;
  md.system.potential = [k](const ChartPoint& q) { return 0.5 * k * q[0] * q[0]; };
  md.system.potential_grad = [k](const ChartPoint& q) { return CotangentVec{{k * q[0]}}; };
  md.system.params = p;
  const MechanicalSystem sys = md.system;
  md.lagrangian = [sys](double h) { return make_symmetric_mechanical(sys, h); };
  md.defaults.q0 = Vector::Ones(1);
  md.defaults.v0 = Vector::Zero(1);
  md.defaults.h = 0.01;
  return md;
}

}  // namespace

MechanicalSystem make_particle() {
  MechanicalSystem sys;
  sys.name = "particle";
  sys.n = 3;
  sys.m = 1;
  sys.metric = [](const ChartPoint&) { return Matrix::Identity(3, 3); };
  sys.constant_metric = true;
  sys.constraints = [](const ChartPoint& q) {
    Matrix mu(1, 3);
    mu << -q[1], 0.0, 1.0;
    return mu;
  };
  return sys;
}

MechanicalSystem make_snakeboard(double m, double J, double J0, double J1, double r) {
  require_positive("snakeboard", "m", m);
  require_positive("snakeboard", "J", J);
  require_positive("snakeboard", "J0", J0);
  require_positive("snakeboard", "J1", J1);
  require_positive("snakeboard", "r", r);

  MechanicalSystem sys;
  sys.name = "snakeboard";
  sys.n = 5;
  sys.m = 2;
  Matrix inertia = Vector{{m, m, J + 2.0 * J1, J0, 2.0 * J1}}.asDiagonal();
  sys.metric = [inertia](const ChartPoint&) { return inertia; };
  sys.constant_metric = true;
  sys.constraints = [r](const ChartPoint& q) {
    const double th = q[2];
    const double ph = q[4];
    Matrix mu(2, 5);
    mu << std::sin(th + ph), -std::cos(th + ph), r * std::cos(ph), 0.0, 0.0,
        std::sin(th - ph), -std::cos(th - ph), -r * std::cos(ph), 0.0, 0.0;
    return mu;
  };
  sys.params = {{"m", m}, {"J", J}, {"J0", J0}, {"J1", J1}, {"r", r}};
  return sys;
}

MechanicalSystem make_sleigh(double m, double I, double a) {
  require_positive("sleigh", "m", m);
  require_positive("sleigh", "I", I);

  MechanicalSystem sys;
  sys.name = "sleigh";
  sys.n = 3;
  sys.m = 1;
  sys.metric = [m, I, a](const ChartPoint& q) {
    const double s = std::sin(q[2]);
    const double c = std::cos(q[2]);
    Matrix M(3, 3);
    M << m, 0.0, -a * m * s,
         0.0, m, a * m * c,
         -a * m * s, a * m * c, I + m * a * a;
    return M;
  };
  sys.metric_partial = [m, a](const ChartPoint& q, int i) {
    Matrix dM = Matrix::Zero(3, 3);
    if (i != 2) return dM;
    const double s = std::sin(q[2]);
    const double c = std::cos(q[2]);
    dM(0, 2) = dM(2, 0) = -a * m * c;
    dM(1, 2) = dM(2, 1) = -a * m * s;
    return dM;
  };
  sys.constraints = [](const ChartPoint& q) {
    Matrix mu(1, 3);
    mu << std::sin(q[2]), -std::cos(q[2]), 0.0;
    return mu;
  };
  sys.params = {{"m", m}, {"I", I}, {"a", a}};
  return sys;
}

SnakeboardFunctions snakeboard_functions(double r, double theta, double phi) {
  return {r * std::cos(theta) * std::cos(phi), r * std::sin(theta) * std::cos(phi),
          -std::sin(phi)};
}

DiscreteForce snakeboard_control_force(const SnakeboardControls& ctl) {
  return [ctl](const ChartPoint&, double t) {
    const double wave = std::sin(ctl.omega * t);
    CotangentVec f = CotangentVec::Zero(5);
    f[3] = ctl.amp_psi * wave;
    f[4] = ctl.amp_phi * wave;
    return f;
  };
}

std::vector<std::string> model_names() {
  return {"particle", "snakeboard", "sleigh", "free", "oscillator"};
}

std::map<std::string, double> default_params(const std::string& name) {
  if (name == "particle") return {};
  if (name == "snakeboard") return {{"m", 1.0}, {"J", 1.0}, {"J0", 1.0}, {"J1", 1.0}, {"r", 1.0}};
  if (name == "sleigh") return {{"m", 1.0}, {"I", 1.0}, {"a", 0.2}};
  if (name == "free") return {{"mass", 1.0}};
  if (name == "oscillator") return {{"mass", 1.0}, {"k", 1.0}};
  throw std::invalid_argument("unknown model '" + name + "'");
}

Model make_model(const std::string& name, const std::map<std::string, double>& params) {
  const auto p = merged(name, params);
  if (name == "particle") return particle_model();
  if (name == "snakeboard") return snakeboard_model(p);
  if (name == "sleigh") return sleigh_model(p);
  if (name == "free") return free_model(p);
  return oscillator_model(p);
}

}  // namespace gni
