#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <random>
#include <span>
#include <type_traits>
#include <vector>

#include "ddlab/sim/gates.hpp"
#include "ddlab/sim/rng.hpp"
#include "ddlab/sim/types.hpp"

namespace ddlab::sim {

namespace detail {

inline void check_targets(Targets const &targets, int n_qubits, Eigen::Index op_dim)
{
  if (targets.empty()) throw ShapeError("operator has no targets");
  for (std::size_t i = 0; i < targets.size(); ++i) {
    if (targets[i] < 0 || targets[i] >= n_qubits) throw ShapeError("target qubit " + std::to_string(targets[i]) + " outside register");
    for (std::size_t j = 0; j < i; ++j)
      if (targets[i] == targets[j]) throw ShapeError("duplicate target qubit");
  }
  if (op_dim != (Eigen::Index{1} << targets.size())) throw ShapeError("operator dimension does not match target count");
}

// Offsets of the 2^k target-bit patterns, and the list of base indices whose
// target bits are all zero.
struct LocalIndex
{
  std::vector<Eigen::Index> offsets;
  std::vector<Eigen::Index> bases;

  LocalIndex(Targets const &targets, int n_qubits)
  {
    auto const k = targets.size();
    offsets.resize(std::size_t{1} << k);
    for (std::size_t m = 0; m < offsets.size(); ++m) {
      Eigen::Index off = 0;
      for (std::size_t j = 0; j < k; ++j)
        if ((m >> j) & 1U) off |= Eigen::Index{1} << targets[j];
      offsets[m] = off;
    }
    Eigen::Index mask = 0;
    for (int t : targets) mask |= Eigen::Index{1} << t;
    auto const dim = Eigen::Index{1} << n_qubits;
    bases.reserve(static_cast<std::size_t>(dim >> k));
    for (Eigen::Index b = 0; b < dim; ++b)
      if ((b & mask) == 0) bases.push_back(b);
  }
};

template <typename Real, int D> using LocalVector = Eigen::Matrix<Complex<Real>, D, 1>;
template <typename Real, int D> using LocalMatrix = Eigen::Matrix<Complex<Real>, D, D>;

template <typename Real, int D> LocalVector<Real, D> local_vector(Eigen::Index d)
{
  if constexpr (D == Eigen::Dynamic)
    return LocalVector<Real, D>(d);
  else
    return LocalVector<Real, D>();
}

// m <- (op ⊗ I) m, walking each column once.
template <typename Real, int D> void left_multiply(CMatrix<Real> const &op_in, LocalIndex const &idx, CMatrix<Real> &m)
{
  auto const d = static_cast<Eigen::Index>(idx.offsets.size());
  LocalMatrix<Real, D> const op = op_in;
  auto v = local_vector<Real, D>(d);
  auto w = local_vector<Real, D>(d);
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    auto *col = m.col(c).data();
    for (auto b : idx.bases) {
      for (Eigen::Index a = 0; a < d; ++a) v(a) = col[b + idx.offsets[static_cast<std::size_t>(a)]];
      w.noalias() = op * v;
      for (Eigen::Index a = 0; a < d; ++a) col[b + idx.offsets[static_cast<std::size_t>(a)]] = w(a);
    }
  }
}

// m <- m (op ⊗ I)†, streaming down the d affected columns together.
template <typename Real, int D> void right_multiply_adjoint(CMatrix<Real> const &op_in, LocalIndex const &idx, CMatrix<Real> &m)
{
  auto const d = static_cast<Eigen::Index>(idx.offsets.size());
  LocalMatrix<Real, D> const op = op_in.conjugate();
  auto v = local_vector<Real, D>(d);
  auto w = local_vector<Real, D>(d);
  std::vector<Complex<Real> *> cols(static_cast<std::size_t>(d));
  for (auto b : idx.bases) {
    for (Eigen::Index a = 0; a < d; ++a) cols[static_cast<std::size_t>(a)] = m.col(b + idx.offsets[static_cast<std::size_t>(a)]).data();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index a = 0; a < d; ++a) v(a) = cols[static_cast<std::size_t>(a)][r];
      w.noalias() = op * v;
      for (Eigen::Index a = 0; a < d; ++a) cols[static_cast<std::size_t>(a)][r] = w(a);
    }
  }
}

// m <- S(m) for a superoperator on row-major vectorized local blocks.
template <typename Real, int D> void superoperator_in_place(CMatrix<Real> const &s_in, LocalIndex const &idx, CMatrix<Real> &m)
{
  constexpr int S = D == Eigen::Dynamic ? Eigen::Dynamic : D * D;
  auto const d = static_cast<Eigen::Index>(idx.offsets.size());
  LocalMatrix<Real, S> const s = s_in;
  auto v = local_vector<Real, S>(d * d);
  auto w = local_vector<Real, S>(d * d);
  auto const off = [&](Eigen::Index i) { return idx.offsets[static_cast<std::size_t>(i)]; };
  for (auto bc : idx.bases) {
    for (auto br : idx.bases) {
      for (Eigen::Index j = 0; j < d; ++j)
        for (Eigen::Index i = 0; i < d; ++i) v(i * d + j) = m(br + off(i), bc + off(j));
      w.noalias() = s * v;
      for (Eigen::Index j = 0; j < d; ++j)
        for (Eigen::Index i = 0; i < d; ++i) m(br + off(i), bc + off(j)) = w(i * d + j);
    }
  }
}

// Picks fixed-size local blocks for one- and two-qubit operators.
template <typename F> decltype(auto) dispatch_local(std::size_t k, F &&f)
{
  if (k == 1) return f(std::integral_constant<int, 2>{});
  if (k == 2) return f(std::integral_constant<int, 4>{});
  return f(std::integral_constant<int, Eigen::Dynamic>{});
}

// m <- K m K† for K embedded on the targets of idx.
template <typename Real> void conjugate_in_place(CMatrix<Real> const &op, LocalIndex const &idx, std::size_t k, CMatrix<Real> &m)
{
  dispatch_local(k, [&](auto dim) {
    left_multiply<Real, decltype(dim)::value>(op, idx, m);
    right_multiply_adjoint<Real, decltype(dim)::value>(op, idx, m);
  });
}

} // namespace detail

template <typename Real = double> DensityMatrix<Real> ground_state(int n_qubits)
{
  if (n_qubits < 1 || n_qubits > kMaxQubits) throw SizeError("qubit count " + std::to_string(n_qubits) + " outside [1, 12]");
  auto const dim = Eigen::Index{1} << n_qubits;
  CMatrix<Real> m = CMatrix<Real>::Zero(dim, dim);
  m(0, 0) = 1;
  return {n_qubits, std::move(m)};
}

template <typename Real = double> DensityMatrix<Real> maximally_mixed(int n_qubits)
{
  auto const dim = Eigen::Index{1} << n_qubits;
  return {n_qubits, CMatrix<Real>::Identity(dim, dim) / Real(dim)};
}

template <typename Real> bool is_unitary(CMatrix<Real> const &u, Real tol = Real(1e-10))
{
  if (u.rows() != u.cols()) return false;
  return ((u.adjoint() * u) - CMatrix<Real>::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff() <= tol;
}

template <typename Real> Real completeness_error(KrausChannel<Real> const &ch)
{
  if (ch.operators.empty()) return std::numeric_limits<Real>::infinity();
  auto const d = ch.operators.front().rows();
  CMatrix<Real> sum = CMatrix<Real>::Zero(d, d);
  for (auto const &k : ch.operators) {
    if (k.rows() != d || k.cols() != d) return std::numeric_limits<Real>::infinity();
    sum.noalias() += k.adjoint() * k;
  }
  return (sum - CMatrix<Real>::Identity(d, d)).cwiseAbs().maxCoeff();
}

template <typename Real> void validate_channel(KrausChannel<Real> const &ch, Real tol = Real(1e-9))
{
  if (!(completeness_error(ch) <= tol)) throw ValidationError("Kraus operators are not trace preserving");
}

/// ρ -> U ρ U† with U embedded on g.targets.
template <typename Real> DensityMatrix<Real> apply_unitary(DensityMatrix<Real> rho, UnitaryGate<Real> const &g)
{
  int const n = rho.n_qubits();
  detail::check_targets(g.targets, n, g.matrix.rows());
  if (g.matrix.rows() != g.matrix.cols()) throw ShapeError("gate matrix is not square");
  detail::LocalIndex const idx(g.targets, n);
  CMatrix<Real> m = std::move(rho).release();
  detail::conjugate_in_place(g.matrix, idx, g.targets.size(), m);
  return {n, std::move(m)};
}

/// ρ -> Σ K ρ K†. Throws ValidationError for a channel that is not CPTP.
template <typename Real> DensityMatrix<Real> apply_channel(DensityMatrix<Real> const &rho, KrausChannel<Real> const &ch)
{
  validate_channel(ch);
  detail::check_targets(ch.targets, rho.n_qubits(), ch.operators.front().rows());
  detail::LocalIndex const idx(ch.targets, rho.n_qubits());
  CMatrix<Real> out = CMatrix<Real>::Zero(rho.dim(), rho.dim());
  for (auto const &k : ch.operators) {
    CMatrix<Real> term = rho.data();
    detail::conjugate_in_place(k, idx, ch.targets.size(), term);
    out += term;
  }
  return {rho.n_qubits(), std::move(out)};
}

// Superoperators act on row-major vectorized k-qubit blocks:
// vec(ρ)[i·d + j] = ρ(i, j), so K ρ K† has superoperator K ⊗ conj(K).
template <typename Real = double> struct Superoperator
{
  Targets targets;
  CMatrix<Real> matrix;
};

template <typename Real> Superoperator<Real> to_superoperator(KrausChannel<Real> const &ch)
{
  auto const d = ch.operators.front().rows();
  CMatrix<Real> s = CMatrix<Real>::Zero(d * d, d * d);
  for (auto const &k : ch.operators) s += gates::kron<Real>(k, k.conjugate());
  return {ch.targets, std::move(s)};
}

template <typename Real> Superoperator<Real> to_superoperator(UnitaryGate<Real> const &g)
{
  return {g.targets, gates::kron<Real>(g.matrix, g.matrix.conjugate())};
}

// Canonical Kraus form from the Choi matrix; drops eigenvalues below tol.
template <typename Real> KrausChannel<Real> to_kraus(Superoperator<Real> const &s, long duration_dt = 0, Real tol = Real(1e-14))
{
  auto const d2 = s.matrix.rows();
  auto const d = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(d2))));
  // Choi C[(i,a),(j,b)] = S[(i,j),(a,b)]
  CMatrix<Real> choi(d2, d2);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j)
      for (Eigen::Index a = 0; a < d; ++a)
        for (Eigen::Index b = 0; b < d; ++b) choi(i * d + a, j * d + b) = s.matrix(i * d + j, a * d + b);
  CMatrix<Real> const herm = (choi + choi.adjoint()) / Real(2);
  Eigen::SelfAdjointEigenSolver<CMatrix<Real>> es(herm);
  KrausChannel<Real> out{s.targets, {}, duration_dt};
  for (Eigen::Index e = d2 - 1; e >= 0; --e) {
    Real const lambda = es.eigenvalues()(e);
    if (lambda <= tol) continue;
    CMatrix<Real> k(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
      for (Eigen::Index a = 0; a < d; ++a) k(i, a) = std::sqrt(lambda) * es.eigenvectors()(i * d + a, e);
    out.operators.push_back(std::move(k));
  }
  return out;
}

/// Channel applying `first` and then `second` on the same targets.
template <typename Real> KrausChannel<Real> compose(KrausChannel<Real> const &second, KrausChannel<Real> const &first)
{
  if (second.targets != first.targets) throw ShapeError("composed channels must share targets");
  Superoperator<Real> s{first.targets, to_superoperator(second).matrix * to_superoperator(first).matrix};
  return to_kraus(s, first.duration_dt + second.duration_dt);
}

template <typename Real> KrausChannel<Real> identity_channel(Targets targets, long duration_dt = 0)
{
  auto const d = Eigen::Index{1} << targets.size();
  return {std::move(targets), {CMatrix<Real>::Identity(d, d)}, duration_dt};
}

template <typename Real> DensityMatrix<Real> apply_superoperator(DensityMatrix<Real> rho, Superoperator<Real> const &s)
{
  int const n = rho.n_qubits();
  auto const k = s.targets.size();
  auto const d = Eigen::Index{1} << k;
  detail::check_targets(s.targets, n, d);
  if (s.matrix.rows() != d * d || s.matrix.cols() != d * d) throw ShapeError("superoperator dimension does not match target count");
  detail::LocalIndex const idx(s.targets, n);
  CMatrix<Real> m = std::move(rho).release();
  detail::dispatch_local(k, [&](auto dim) { detail::superoperator_in_place<Real, decltype(dim)::value>(s.matrix, idx, m); });
  return {n, std::move(m)};
}

struct StateDiagnostics
{
  double trace_error = 0;
  double hermiticity_error = 0;
  double min_eigenvalue = 0;
};

// Full check including the O(8^n) eigen-decomposition; keep out of inner loops.
template <typename Real> StateDiagnostics diagnose(DensityMatrix<Real> const &rho)
{
  StateDiagnostics d;
  d.trace_error = std::abs(rho.data().trace() - Complex<Real>(1));
  d.hermiticity_error = (rho.data() - rho.data().adjoint()).cwiseAbs().maxCoeff();
  CMatrix<Real> const herm = (rho.data() + rho.data().adjoint()) / Real(2);
  d.min_eigenvalue = Eigen::SelfAdjointEigenSolver<CMatrix<Real>>(herm, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
  return d;
}

template <typename Real> void validate_state(DensityMatrix<Real> const &rho)
{
  auto const d = diagnose(rho);
  if (d.trace_error > 1e-10) throw ValidationError("density matrix trace differs from 1");
  if (d.hermiticity_error > 1e-10) throw ValidationError("density matrix is not Hermitian");
  if (d.min_eigenvalue < -1e-9) throw ValidationError("density matrix is not positive semidefinite");
}

/// Tr(P ρ). Uses the Pauli structure directly: each row has one nonzero.
template <typename Real> Real expectation(DensityMatrix<Real> const &rho, PauliObservable const &p)
{
  if (static_cast<int>(p.size()) != rho.n_qubits()) throw ShapeError("observable length does not match register");
  Eigen::Index flip = 0;
  Eigen::Index zmask = 0;
  int n_y = 0;
  for (int q = 0; q < rho.n_qubits(); ++q) {
    char const c = p[static_cast<std::size_t>(q)];
    if (c == 'X' || c == 'Y') flip |= Eigen::Index{1} << q;
    if (c == 'Z' || c == 'Y') zmask |= Eigen::Index{1} << q;
    if (c == 'Y') ++n_y;
  }
  // P|b> = i^{n_y} (-1)^{popcount(b & zmask)} |b ^ flip>, so
  // Tr(P ρ) = Σ_c <c^flip|P|c> ρ(c, c^flip)
  Complex<Real> acc = 0;
  for (Eigen::Index b = 0; b < rho.dim(); ++b) {
    auto const src = b ^ flip;
    Real const sign = (std::popcount(static_cast<unsigned long long>(src & zmask)) & 1) ? Real(-1) : Real(1);
    acc += sign * rho(src, b);
  }
  Complex<Real> phase = 1;
  for (int i = 0; i < n_y; ++i) phase *= Complex<Real>(0, 1);
  return (phase * acc).real();
}

namespace detail {

// Basis change mapping the eigenbasis of P to the computational basis.
template <typename Real> DensityMatrix<Real> rotate_to_z_basis(DensityMatrix<Real> rho, PauliObservable const &p)
{
  for (int q = 0; q < rho.n_qubits(); ++q) {
    char const c = p[static_cast<std::size_t>(q)];
    if (c == 'X') rho = apply_unitary(rho, UnitaryGate<Real>{{q}, gates::hadamard<Real>(), 0, "h"});
    if (c == 'Y') rho = apply_unitary(rho, UnitaryGate<Real>{{q}, gates::hadamard<Real>() * gates::s_dagger<Real>(), 0, "sdg_h"});
  }
  return rho;
}

} // namespace detail

/// Probability that a projective measurement of P yields +1.
template <typename Real> Real plus_probability(DensityMatrix<Real> const &rho, PauliObservable const &p)
{
  if (static_cast<int>(p.size()) != rho.n_qubits()) throw ShapeError("observable length does not match register");
  auto const rotated = detail::rotate_to_z_basis(rho, p);
  Eigen::Index support = 0;
  for (int q = 0; q < rho.n_qubits(); ++q)
    if (p[static_cast<std::size_t>(q)] != 'I') support |= Eigen::Index{1} << q;
  Real plus = 0, total = 0;
  for (Eigen::Index b = 0; b < rho.dim(); ++b) {
    Real const pb = std::max(Real(0), rotated(b, b).real());
    total += pb;
    if ((std::popcount(static_cast<unsigned long long>(b & support)) & 1) == 0) plus += pb;
  }
  return std::clamp(plus / total, Real(0), Real(1));
}

/// Finite-shot estimate (n₊ − n₋)/shots of ⟨P⟩. Bitstrings are drawn from
/// the diagonal in the rotated basis; only their parity on the support of P
/// matters, so the count of +1 outcomes is binomial.
template <typename Real> Real sample_expectation(DensityMatrix<Real> const &rho, PauliObservable const &p, long shots, RngStream &rng)
{
  if (shots < 1) throw ValidationError("shots must be positive");
  Real const p_plus = plus_probability(rho, p);
  std::binomial_distribution<long> dist(shots, static_cast<double>(p_plus));
  long const n_plus = dist(rng);
  return Real(2 * n_plus - shots) / Real(shots);
}

/// ⟨ψ|ρ|ψ⟩ for a normalized pure target.
template <typename Real> Real state_fidelity(DensityMatrix<Real> const &rho, CVector<Real> const &psi)
{
  if (psi.size() != rho.dim()) throw ShapeError("target state dimension does not match register");
  if (std::abs(psi.squaredNorm() - Real(1)) > Real(1e-10)) throw ValidationError("target state is not normalized");
  return std::clamp((psi.adjoint() * rho.data() * psi)(0, 0).real(), Real(0), Real(1));
}

template <typename Real = double> CVector<Real> bell_phi_plus()
{
  CVector<Real> v = CVector<Real>::Zero(4);
  v(0) = v(3) = Real(1) / std::sqrt(Real(2));
  return v;
}

} // namespace ddlab::sim
