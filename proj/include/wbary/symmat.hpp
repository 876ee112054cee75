#pragma once

#include <cstddef>
#include <vector>

#include "wbary/errors.hpp"

namespace wbary {

/// Dense symmetric matrix with double entries, stored row-major.
///
/// Symmetry is an invariant, not a promise: every constructor symmetrizes
/// its input as (A + A^T)/2 and rejects non-finite entries, and the only
/// mutator writes both (i,j) and (j,i).  All routines in this library that
/// produce matrices go through this type, so downstream code never has to
/// re-symmetrize.
class SymMat {
 public:
  SymMat() = default;

  /// Zero matrix of the given dimension.
  explicit SymMat(int dim);

  /// Builds from a row-major buffer of dim*dim entries.  The buffer is
  /// symmetrized; non-finite entries or a size mismatch throw
  /// std::invalid_argument.
  SymMat(int dim, std::vector<double> entries);

  static SymMat identity(int dim);
  static SymMat diagonal(const std::vector<double>& d);

  int dim() const { return dim_; }

  double operator()(int i, int j) const { return data_[static_cast<size_t>(i) * dim_ + j]; }

  /// Sets both (i,j) and (j,i).
  void set(int i, int j, double v);

  /// Row-major entries; guaranteed exactly symmetric.
  const std::vector<double>& data() const { return data_; }

  SymMat& operator+=(const SymMat& o);
  SymMat& operator-=(const SymMat& o);
  SymMat& operator*=(double c);

  friend SymMat operator+(SymMat a, const SymMat& b) { return a += b; }
  friend SymMat operator-(SymMat a, const SymMat& b) { return a -= b; }
  friend SymMat operator*(SymMat a, double c) { return a *= c; }
  friend SymMat operator*(double c, SymMat a) { return a *= c; }

 private:
  int dim_ = 0;
  std::vector<double> data_;
};

/// Eigendecomposition A = Q diag(lambda) Q^T with eigenvalues sorted in
/// descending order and Q orthogonal (columns are eigenvectors, row-major
/// storage).
struct EigenDecomp {
  int dim = 0;
  std::vector<double> q;
  std::vector<double> lambda;

  /// Rebuilds Q diag(vals) Q^T for a replacement spectrum.  This is how all
  /// spectral functions (square root, inverse square root, ...) are applied;
  /// the result is exactly symmetric by construction.
  SymMat with_eigenvalues(const std::vector<double>& vals) const;

  /// Q diag(lambda) Q^T with the stored spectrum.
  SymMat reconstruct() const { return with_eigenvalues(lambda); }
};

/// Relative off-diagonal target for the Jacobi sweep: done when
/// off(A) <= kEigenTolRel * ||A||_F.
inline constexpr double kEigenTolRel = 1e-12;
inline constexpr int kEigenMaxSweeps = 100;

/// Eigenvalues in [-kPsdClampRel * ||A||_F, 0) are treated as zero by the
/// semidefinite square root; anything lower is a genuine PSD violation.
inline constexpr double kPsdClampRel = 1e-10;

/// Strict positive-definiteness floor: lowest admissible eigenvalue is
/// 1e-12 * max(1, ||A||_F).
double pd_floor(const SymMat& a);

/// Cyclic Jacobi eigendecomposition.  Deterministic (fixed sweep order, no
/// pivoting), which keeps every downstream computation bit-reproducible for
/// identical inputs.  Throws EigenConvergenceError if the off-diagonal mass
/// has not dropped below the relative target after kEigenMaxSweeps sweeps.
EigenDecomp sym_eigen(const SymMat& a);

/// Principal square root of a positive semidefinite matrix.  Tiny negative
/// eigenvalues within the clamp band are flushed to zero; below the band
/// throws NotPsdError.
SymMat sqrtm_psd(const SymMat& a);

/// Inverse square root of a positive definite matrix.  Throws
/// SingularMatrixError if any eigenvalue is at or below pd_floor(a).
SymMat inv_sqrtm_pd(const SymMat& a);

/// Determinant as the product of eigenvalues (no clamping).
double det_via_eigen(const SymMat& a);

double trace(const SymMat& a);
double frob_norm(const SymMat& a);

/// Symmetrized triple product x * m * x for symmetric x, m.  This is the
/// workhorse pattern of the whole library (congruence by a square root).
SymMat sandwich(const SymMat& x, const SymMat& m);

/// m * m.  Exactly symmetric for symmetric m.
SymMat mat_square(const SymMat& m);

/// Tr(a * b) = sum_ij a_ij b_ij for symmetric a, b.
double trace_product(const SymMat& a, const SymMat& b);

/// Raw row-major product a * b (generally not symmetric); used for
/// commutator checks.
std::vector<double> mat_mul_raw(const SymMat& a, const SymMat& b);

}  // namespace wbary
