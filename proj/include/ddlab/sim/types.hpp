#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ddlab/errors.hpp"

namespace ddlab::sim {

template <typename Real> using Complex = std::complex<Real>;
template <typename Real> using CMatrix = Eigen::Matrix<Complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Real> using CVector = Eigen::Matrix<Complex<Real>, Eigen::Dynamic, 1>;

using Cx = Complex<double>;
using CMatrixd = CMatrix<double>;
using CVectord = CVector<double>;
using Matrix2cd = Eigen::Matrix2cd;

inline constexpr int kMaxQubits = 12;

// Qubit q corresponds to bit q of a basis-state index (little-endian).
// A k-qubit operator acting on targets {t_0, ..., t_{k-1}} uses bit j of
// its local index for t_j.
using Targets = std::vector<int>;

/// 2^n x 2^n density operator. Operations return new states; the object is
/// never mutated in place by the free functions.
template <typename Real = double> class DensityMatrix
{
public:
  using Scalar = Complex<Real>;
  using Matrix = CMatrix<Real>;

  DensityMatrix() = default;

  DensityMatrix(int n_qubits, Matrix data)
    : n_{n_qubits}
    , data_{std::move(data)}
  {
    if (n_ < 1 || n_ > kMaxQubits) throw SizeError("qubit count " + std::to_string(n_) + " outside [1, 12]");
    auto const dim = Eigen::Index{1} << n_;
    if (data_.rows() != dim || data_.cols() != dim) throw ShapeError("density matrix dimension does not match qubit count");
  }

  static DensityMatrix from_pure(int n_qubits, CVector<Real> const &psi)
  {
    return DensityMatrix{n_qubits, psi * psi.adjoint()};
  }

  [[nodiscard]] int n_qubits() const { return n_; }
  [[nodiscard]] Eigen::Index dim() const { return data_.rows(); }
  [[nodiscard]] Matrix const &data() const { return data_; }
  [[nodiscard]] Scalar operator()(Eigen::Index r, Eigen::Index c) const { return data_(r, c); }
  [[nodiscard]] Real trace() const { return data_.trace().real(); }

  // Moves the storage out so kernels can update it without a copy.
  [[nodiscard]] Matrix release() && { return std::move(data_); }

private:
  int n_ = 0;
  Matrix data_;
};

template <typename Real = double> struct UnitaryGate
{
  // Physical drive parameters for X-type pulses; absent for virtual and
  // composite gates.
  struct Pulse
  {
    Real angle = 0;
    Real axis_phase = 0;
  };

  Targets targets;
  CMatrix<Real> matrix;
  long duration_dt = 0;
  std::string label;
  std::optional<Pulse> pulse = {};
};

template <typename Real = double> struct KrausChannel
{
  Targets targets;
  std::vector<CMatrix<Real>> operators;
  long duration_dt = 0;
};

/// Pauli string; character i acts on qubit i.
class PauliObservable
{
public:
  explicit PauliObservable(std::string ops)
    : ops_{std::move(ops)}
  {
    if (ops_.empty()) throw ValidationError("empty Pauli string");
    for (char c : ops_) {
      if (c != 'I' && c != 'X' && c != 'Y' && c != 'Z') throw ValidationError(std::string("invalid Pauli character '") + c + "'");
    }
  }

  [[nodiscard]] std::string const &str() const { return ops_; }
  [[nodiscard]] std::size_t size() const { return ops_.size(); }
  [[nodiscard]] char operator[](std::size_t i) const { return ops_[i]; }

private:
  std::string ops_;
};

using DensityMatrixd = DensityMatrix<double>;
using UnitaryGated = UnitaryGate<double>;
using KrausChanneld = KrausChannel<double>;

} // namespace ddlab::sim
