#include "wbary/symmat.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace wbary {

namespace {

size_t idx(int dim, int i, int j) { return static_cast<size_t>(i) * dim + j; }

void check_same_dim(const SymMat& a, const SymMat& b, const char* op) {
  if (a.dim() != b.dim()) {
    throw DimMismatchError(std::string(op) + ": dimensions " + std::to_string(a.dim()) +
                           " and " + std::to_string(b.dim()) + " differ");
  }
}

}  // namespace

SymMat::SymMat(int dim) : dim_(dim) {
  if (dim < 1) throw std::invalid_argument("SymMat: dimension must be positive");
  data_.assign(static_cast<size_t>(dim) * dim, 0.0);
}

SymMat::SymMat(int dim, std::vector<double> entries) : dim_(dim), data_(std::move(entries)) {
  if (dim < 1) throw std::invalid_argument("SymMat: dimension must be positive");
  if (data_.size() != static_cast<size_t>(dim) * dim) {
    throw std::invalid_argument("SymMat: buffer size does not match dimension");
  }
  for (double v : data_) {
    if (!std::isfinite(v)) throw std::invalid_argument("SymMat: non-finite entry");
  }
  for (int i = 0; i < dim_; ++i) {
    for (int j = i + 1; j < dim_; ++j) {
      const double m = 0.5 * (data_[idx(dim_, i, j)] + data_[idx(dim_, j, i)]);
      data_[idx(dim_, i, j)] = m;
      data_[idx(dim_, j, i)] = m;
    }
  }
}

SymMat SymMat::identity(int dim) {
  SymMat a(dim);
  for (int i = 0; i < dim; ++i) a.data_[idx(dim, i, i)] = 1.0;
  return a;
}

SymMat SymMat::diagonal(const std::vector<double>& d) {
  SymMat a(static_cast<int>(d.size()));
  for (int i = 0; i < a.dim_; ++i) {
    if (!std::isfinite(d[i])) throw std::invalid_argument("SymMat: non-finite entry");
    a.data_[idx(a.dim_, i, i)] = d[i];
  }
  return a;
}

void SymMat::set(int i, int j, double v) {
  if (!std::isfinite(v)) throw std::invalid_argument("SymMat: non-finite entry");
  data_[idx(dim_, i, j)] = v;
  data_[idx(dim_, j, i)] = v;
}

SymMat& SymMat::operator+=(const SymMat& o) {
  check_same_dim(*this, o, "SymMat::operator+=");
  for (size_t t = 0; t < data_.size(); ++t) data_[t] += o.data_[t];
  return *this;
}

SymMat& SymMat::operator-=(const SymMat& o) {
  check_same_dim(*this, o, "SymMat::operator-=");
  for (size_t t = 0; t < data_.size(); ++t) data_[t] -= o.data_[t];
  return *this;
}

SymMat& SymMat::operator*=(double c) {
  for (double& v : data_) v *= c;
  return *this;
}

SymMat EigenDecomp::with_eigenvalues(const std::vector<double>& vals) const {
  if (static_cast<int>(vals.size()) != dim) {
    throw DimMismatchError("EigenDecomp::with_eigenvalues: spectrum size mismatch");
  }
  SymMat out(dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = i; j < dim; ++j) {
      double s = 0.0;
      for (int k = 0; k < dim; ++k) {
        s += q[idx(dim, i, k)] * vals[k] * q[idx(dim, j, k)];
      }
      out.set(i, j, s);
    }
  }
  return out;
}

double pd_floor(const SymMat& a) { return 1e-12 * std::max(1.0, frob_norm(a)); }

EigenDecomp sym_eigen(const SymMat& a) {
  const int n = a.dim();
  std::vector<double> m = a.data();
  std::vector<double> q(static_cast<size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) q[idx(n, i, i)] = 1.0;

  const double target = kEigenTolRel * frob_norm(a);

  auto off_norm = [&]() {
    double s = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) s += m[idx(n, i, j)] * m[idx(n, i, j)];
    return std::sqrt(2.0 * s);
  };

  bool done = (n <= 1) || off_norm() <= target;
  for (int sweep = 0; !done && sweep < kEigenMaxSweeps; ++sweep) {
    for (int p = 0; p < n - 1; ++p) {
      for (int qi = p + 1; qi < n; ++qi) {
        const double apq = m[idx(n, p, qi)];
        if (apq == 0.0) continue;
        const double h = m[idx(n, qi, qi)] - m[idx(n, p, p)];
        double t;
        if (std::abs(h) + 100.0 * std::abs(apq) == std::abs(h)) {
          // Rotation angle is tiny; the first-order formula avoids overflow
          // in theta^2.
          t = apq / h;
        } else {
          const double theta = 0.5 * h / apq;
          t = 1.0 / (std::abs(theta) + std::sqrt(1.0 + theta * theta));
          if (theta < 0.0) t = -t;
        }
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        const double tau = s / (1.0 + c);

        m[idx(n, p, p)] -= t * apq;
        m[idx(n, qi, qi)] += t * apq;
        m[idx(n, p, qi)] = 0.0;
        m[idx(n, qi, p)] = 0.0;
        for (int r = 0; r < n; ++r) {
          if (r == p || r == qi) continue;
          const double g = m[idx(n, r, p)];
          const double e = m[idx(n, r, qi)];
          const double gp = g - s * (e + g * tau);
          const double ep = e + s * (g - e * tau);
          m[idx(n, r, p)] = gp;
          m[idx(n, p, r)] = gp;
          m[idx(n, r, qi)] = ep;
          m[idx(n, qi, r)] = ep;
        }
        for (int r = 0; r < n; ++r) {
          const double g = q[idx(n, r, p)];
          const double e = q[idx(n, r, qi)];
          q[idx(n, r, p)] = g - s * (e + g * tau);
          q[idx(n, r, qi)] = e + s * (g - e * tau);
        }
      }
    }
    done = off_norm() <= target;
  }
  if (!done) {
    throw EigenConvergenceError("sym_eigen: off-diagonal norm above target after " +
                                std::to_string(kEigenMaxSweeps) + " sweeps");
  }

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int i, int j) { return m[idx(n, i, i)] > m[idx(n, j, j)]; });

  EigenDecomp ed;
  ed.dim = n;
  ed.lambda.resize(n);
  ed.q.resize(static_cast<size_t>(n) * n);
  for (int k = 0; k < n; ++k) {
    ed.lambda[k] = m[idx(n, order[k], order[k])];
    for (int r = 0; r < n; ++r) ed.q[idx(n, r, k)] = q[idx(n, r, order[k])];
  }
  return ed;
}

SymMat sqrtm_psd(const SymMat& a) {
  EigenDecomp ed = sym_eigen(a);
  const double clamp = -kPsdClampRel * frob_norm(a);
  std::vector<double> roots(ed.lambda.size());
  for (size_t k = 0; k < ed.lambda.size(); ++k) {
    const double lam = ed.lambda[k];
    if (lam < clamp) {
      throw NotPsdError("sqrtm_psd: eigenvalue " + std::to_string(lam) +
                        " below clamp threshold " + std::to_string(clamp));
    }
    roots[k] = std::sqrt(std::max(lam, 0.0));
  }
  return ed.with_eigenvalues(roots);
}

SymMat inv_sqrtm_pd(const SymMat& a) {
  EigenDecomp ed = sym_eigen(a);
  const double floor = pd_floor(a);
  std::vector<double> vals(ed.lambda.size());
  for (size_t k = 0; k < ed.lambda.size(); ++k) {
    if (ed.lambda[k] <= floor) {
      throw SingularMatrixError("inv_sqrtm_pd: eigenvalue " + std::to_string(ed.lambda[k]) +
                                " at or below positive-definiteness floor");
    }
    vals[k] = 1.0 / std::sqrt(ed.lambda[k]);
  }
  return ed.with_eigenvalues(vals);
}

double det_via_eigen(const SymMat& a) {
  EigenDecomp ed = sym_eigen(a);
  double det = 1.0;
  for (double lam : ed.lambda) det *= lam;
  return det;
}

double trace(const SymMat& a) {
  double s = 0.0;
  for (int i = 0; i < a.dim(); ++i) s += a(i, i);
  return s;
}

double frob_norm(const SymMat& a) {
  double s = 0.0;
  for (double v : a.data()) s += v * v;
  return std::sqrt(s);
}

SymMat sandwich(const SymMat& x, const SymMat& m) {
  check_same_dim(x, m, "sandwich");
  const int n = x.dim();
  // xm = x * m, then out = xm * x; only the upper triangle of the final
  // product is computed and mirrored, so the result is exactly symmetric.
  std::vector<double> xm = mat_mul_raw(x, m);
  SymMat out(n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      double s = 0.0;
      for (int k = 0; k < n; ++k) s += xm[idx(n, i, k)] * x(k, j);
      out.set(i, j, s);
    }
  }
  return out;
}

SymMat mat_square(const SymMat& m) {
  const int n = m.dim();
  SymMat out(n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      double s = 0.0;
      for (int k = 0; k < n; ++k) s += m(i, k) * m(k, j);
      out.set(i, j, s);
    }
  }
  return out;
}

double trace_product(const SymMat& a, const SymMat& b) {
  check_same_dim(a, b, "trace_product");
  double s = 0.0;
  const std::vector<double>& da = a.data();
  const std::vector<double>& db = b.data();
  for (size_t t = 0; t < da.size(); ++t) s += da[t] * db[t];
  return s;
}

std::vector<double> mat_mul_raw(const SymMat& a, const SymMat& b) {
  check_same_dim(a, b, "mat_mul_raw");
  const int n = a.dim();
  std::vector<double> out(static_cast<size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < n; ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (int j = 0; j < n; ++j) out[idx(n, i, j)] += aik * b(k, j);
    }
  }
  return out;
}

}  // namespace wbary
