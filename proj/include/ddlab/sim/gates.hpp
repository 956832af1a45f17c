#pragma once

#include <cmath>
#include <numbers>

#include "ddlab/sim/types.hpp"

// Fixed and parameterized gate matrices. Rotations follow
// R_a(angle) = exp(-i angle/2 a) for Pauli axis a.

namespace ddlab::sim::gates {

template <typename Real = double> CMatrix<Real> identity(int n_qubits = 1)
{
  auto const d = Eigen::Index{1} << n_qubits;
  return CMatrix<Real>::Identity(d, d);
}

template <typename Real = double> CMatrix<Real> pauli(char p)
{
  using C = Complex<Real>;
  CMatrix<Real> m(2, 2);
  switch (p) {
  case 'I': m << C(1), C(0), C(0), C(1); break;
  case 'X': m << C(0), C(1), C(1), C(0); break;
  case 'Y': m << C(0), C(0, -1), C(0, 1), C(0); break;
  case 'Z': m << C(1), C(0), C(0), C(-1); break;
  default: throw ValidationError(std::string("unknown Pauli '") + p + "'");
  }
  return m;
}

template <typename Real = double> CMatrix<Real> rz(Real angle)
{
  CMatrix<Real> m = CMatrix<Real>::Zero(2, 2);
  m(0, 0) = std::polar(Real(1), -angle / 2);
  m(1, 1) = std::polar(Real(1), angle / 2);
  return m;
}

template <typename Real = double> CMatrix<Real> ry(Real angle)
{
  CMatrix<Real> m(2, 2);
  Real const c = std::cos(angle / 2), s = std::sin(angle / 2);
  m << c, -s, s, c;
  return m;
}

template <typename Real = double> CMatrix<Real> rx(Real angle)
{
  using C = Complex<Real>;
  CMatrix<Real> m(2, 2);
  Real const c = std::cos(angle / 2), s = std::sin(angle / 2);
  m << C(c), C(0, -s), C(0, -s), C(c);
  return m;
}

// Rotation by `angle` about the equatorial axis cos(phase) x + sin(phase) y.
template <typename Real = double> CMatrix<Real> xy_rotation(Real angle, Real axis_phase)
{
  using C = Complex<Real>;
  Real const c = std::cos(angle / 2), s = std::sin(angle / 2);
  CMatrix<Real> m(2, 2);
  m(0, 0) = C(c);
  m(1, 1) = C(c);
  m(0, 1) = C(0, -s) * std::polar(Real(1), -axis_phase);
  m(1, 0) = C(0, -s) * std::polar(Real(1), axis_phase);
  return m;
}

template <typename Real = double> CMatrix<Real> hadamard()
{
  Real const h = Real(1) / std::sqrt(Real(2));
  CMatrix<Real> m(2, 2);
  m << h, h, h, -h;
  return m;
}

template <typename Real = double> CMatrix<Real> s_dagger()
{
  using C = Complex<Real>;
  CMatrix<Real> m = CMatrix<Real>::Zero(2, 2);
  m(0, 0) = C(1);
  m(1, 1) = C(0, -1);
  return m;
}

// CNOT with local bit 0 as control and bit 1 as target.
template <typename Real = double> CMatrix<Real> cnot()
{
  CMatrix<Real> m = CMatrix<Real>::Zero(4, 4);
  m(0, 0) = 1;
  m(3, 1) = 1;
  m(2, 2) = 1;
  m(1, 3) = 1;
  return m;
}

// exp(-i A t) for Hermitian A, via eigendecomposition.
template <typename Real = double> CMatrix<Real> expm_hermitian(CMatrix<Real> const &a, Real t)
{
  Eigen::SelfAdjointEigenSolver<CMatrix<Real>> es(a);
  CVector<Real> phases(a.rows());
  for (Eigen::Index i = 0; i < a.rows(); ++i) phases(i) = std::polar(Real(1), -es.eigenvalues()(i) * t);
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

// Kronecker product; `hi` occupies the more significant bits.
template <typename Real = double> CMatrix<Real> kron(CMatrix<Real> const &hi, CMatrix<Real> const &lo)
{
  CMatrix<Real> out(hi.rows() * lo.rows(), hi.cols() * lo.cols());
  for (Eigen::Index i = 0; i < hi.rows(); ++i)
    for (Eigen::Index j = 0; j < hi.cols(); ++j)
      out.block(i * lo.rows(), j * lo.cols(), lo.rows(), lo.cols()) = hi(i, j) * lo;
  return out;
}

// Unitary gate factories with labels and durations attached.

template <typename Real = double> UnitaryGate<Real> make_rz(int q, Real angle)
{
  return {{q}, rz<Real>(angle), 0, "rz", {}};
}

template <typename Real = double> UnitaryGate<Real> make_pulse(int q, Real angle, Real axis_phase, long duration_dt, std::string label)
{
  return {{q}, xy_rotation<Real>(angle, axis_phase), duration_dt, std::move(label), typename UnitaryGate<Real>::Pulse{angle, axis_phase}};
}

template <typename Real = double> UnitaryGate<Real> make_x(int q, long duration_dt)
{
  return make_pulse<Real>(q, std::numbers::pi_v<Real>, 0, duration_dt, "x");
}

template <typename Real = double> UnitaryGate<Real> make_y(int q, long duration_dt)
{
  return make_pulse<Real>(q, std::numbers::pi_v<Real>, std::numbers::pi_v<Real> / 2, duration_dt, "y");
}

template <typename Real = double> UnitaryGate<Real> make_sx(int q, long duration_dt)
{
  return make_pulse<Real>(q, std::numbers::pi_v<Real> / 2, 0, duration_dt, "sx");
}

template <typename Real = double> UnitaryGate<Real> make_h(int q, long duration_dt)
{
  return {{q}, hadamard<Real>(), duration_dt, "h", {}};
}

template <typename Real = double> UnitaryGate<Real> make_cx(int control, int target, long duration_dt)
{
  return {{control, target}, cnot<Real>(), duration_dt, "cx", {}};
}

template <typename Real = double> UnitaryGate<Real> adjoint(UnitaryGate<Real> g)
{
  g.matrix = g.matrix.adjoint().eval();
  if (g.pulse) g.pulse->angle = -g.pulse->angle;
  g.label += "_dg";
  return g;
}

} // namespace ddlab::sim::gates
