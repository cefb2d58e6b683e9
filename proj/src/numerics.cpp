#include "ucadoa/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace ucadoa {
namespace {

// Series expansion of P(a, x), valid for x < a + 1.
double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double term = sum;
  for (int i = 0; i < 10000; ++i) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::abs(term) < std::abs(sum) * 1e-16)
      return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
  }
  throw EstimationError("incomplete gamma series did not converge");
}

// Modified Lentz continued fraction for Q(a, x), valid for x >= a + 1.
double gamma_q_cf(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 10000; ++i) {
    double an = -static_cast<double>(i) * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-16)
      return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
  }
  throw EstimationError("incomplete gamma continued fraction did not converge");
}

}  // namespace

double gamma_p(double a, double x) {
  if (x < 0 || a <= 0) throw std::invalid_argument("gamma_p domain");
  if (x == 0) return 0.0;
  return (x < a + 1.0) ? gamma_p_series(a, x) : 1.0 - gamma_q_cf(a, x);
}

double gamma_q(double a, double x) {
  if (x < 0 || a <= 0) throw std::invalid_argument("gamma_q domain");
  if (x == 0) return 1.0;
  return (x < a + 1.0) ? 1.0 - gamma_p_series(a, x) : gamma_q_cf(a, x);
}

double chi2_cdf(int dof, double u) {
  if (dof < 1) throw std::invalid_argument("dof must be >= 1");
  if (u <= 0) return 0.0;
  return gamma_p(0.5 * dof, 0.5 * u);
}

double chi2_cdf_inverse(int dof, double p) {
  if (p <= 0 || p >= 1) throw std::invalid_argument("p must be in (0, 1)");
  double lo = 0.0;
  double hi = dof + 10.0 * std::sqrt(2.0 * dof) + 10.0;
  int guard = 0;
  while (chi2_cdf(dof, hi) < p) {
    hi *= 2.0;
    if (++guard > 200) throw EstimationError("chi2_cdf_inverse bracket failed");
  }
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    if (chi2_cdf(dof, mid) < p)
      lo = mid;
    else
      hi = mid;
    if (hi - lo < 1e-13 * std::max(1.0, hi)) break;
  }
  double u = 0.5 * (lo + hi);
  if (std::abs(chi2_cdf(dof, u) - p) > 1e-10)
    throw EstimationError("chi2_cdf_inverse did not converge");
  return u;
}

double noncentral_chi2_sf(int dof, double delta, double u) {
  if (dof < 1 || delta < 0) throw std::invalid_argument("noncentral_chi2_sf domain");
  if (u <= 0) return 1.0;
  const double x = 0.5 * u;
  if (delta == 0) return gamma_q(0.5 * dof, x);

  // Poisson mixture over central chi-square tails; walk outward from the
  // Poisson mode until the remaining weight is below 1e-13.
  const double half = 0.5 * delta;
  const long j0 = static_cast<long>(half);
  const double w0 = std::exp(-half + j0 * std::log(half) - std::lgamma(j0 + 1.0));

  long jlo = j0, jhi = j0;
  double mass = w0;
  double wd = w0, wu = w0;
  for (;;) {
    bool active = false;
    if (jlo > 0 && wd > 1e-18 * w0) {
      wd *= jlo / half;
      --jlo;
      mass += wd;
      active = true;
    }
    if (wu > 1e-18 * w0) {
      wu *= half / (jhi + 1.0);
      ++jhi;
      mass += wu;
      active = true;
    }
    if (!active || mass >= 1.0 - 1e-13) break;
  }

  // Upper-tail recurrence: Q(a+1, x) = Q(a, x) + x^a e^{-x} / Gamma(a+1).
  const double alo = jlo + 0.5 * dof;
  double q = gamma_q(alo, x);
  double t = std::exp(alo * std::log(x) - x - std::lgamma(alo + 1.0));
  double w = std::exp(-half + jlo * std::log(half) - std::lgamma(jlo + 1.0));
  double acc = 0.0;
  for (long j = jlo; j <= jhi; ++j) {
    acc += w * q;
    const double a = j + 0.5 * dof;
    q = std::min(q + t, 1.0);
    t *= x / (a + 1.0);
    w *= half / (j + 1.0);
  }
  return std::min(acc, 1.0);
}

double gaussian_q(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

double gaussian_q_inverse(double p) {
  if (p <= 0 || p >= 1) throw std::invalid_argument("p must be in (0, 1)");
  double lo = -40.0, hi = 40.0;
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    if (gaussian_q(mid) > p)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

EigenDecomposition hermitian_eig(const CMat& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("matrix must be square");
  const int n = a.rows();
  if (n > 8) throw std::invalid_argument("eigensolver is limited to n <= 8");

  CMat h(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      h(i, j) = 0.5 * (a(i, j) + std::conj(a(j, i)));

  CMat v = CMat::identity(n);
  const double tol = 1e-12 * std::max(h.frobenius_norm(), 1e-300);

  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += std::abs(h(p, q));
    if (off < tol) break;
    if (sweep == 99) throw EstimationError("jacobi eigensolver did not converge");

    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const cplx g = h(p, q);
        const double ag = std::abs(g);
        if (ag < tol / (n * n)) continue;
        const cplx f = g / ag;  // e^{j phase}
        const double app = h(p, p).real();
        const double aqq = h(q, q).real();
        const double theta = (aqq - app) / (2.0 * ag);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        const cplx sf = s * f;
        const cplx sfc = s * std::conj(f);

        // Columns: [p q] <- [p q] R with R = [[c, s f], [-s conj(f), c]].
        for (int k = 0; k < n; ++k) {
          const cplx hp = h(k, p), hq = h(k, q);
          h(k, p) = c * hp - sfc * hq;
          h(k, q) = sf * hp + c * hq;
        }
        // Rows: apply R^H from the left.
        for (int k = 0; k < n; ++k) {
          const cplx hp = h(p, k), hq = h(q, k);
          h(p, k) = c * hp - sf * hq;
          h(q, k) = sfc * hp + c * hq;
        }
        h(p, q) = 0;
        h(q, p) = 0;
        for (int k = 0; k < n; ++k) {
          const cplx vp = v(k, p), vq = v(k, q);
          v(k, p) = c * vp - sfc * vq;
          v(k, q) = sf * vp + c * vq;
        }
      }
    }
  }

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> diag(n);
  for (int i = 0; i < n; ++i) diag[i] = h(i, i).real();
  std::sort(order.begin(), order.end(),
            [&](int i, int j) { return diag[i] > diag[j]; });

  EigenDecomposition out;
  out.eigenvalues.resize(n);
  out.eigenvectors.assign(n, std::vector<cplx>(n));
  for (int l = 0; l < n; ++l) {
    out.eigenvalues[l] = diag[order[l]];
    double norm = 0;
    for (int k = 0; k < n; ++k) norm += std::norm(v(k, order[l]));
    norm = std::sqrt(norm);
    for (int k = 0; k < n; ++k) out.eigenvectors[l][k] = v(k, order[l]) / norm;
  }
  return out;
}

std::vector<std::vector<cplx>> right_null_space(const CMat& a, int keep) {
  if (keep >= a.cols()) throw std::invalid_argument("keep must be < column count");
  const CMat gram = a.adjoint() * a;
  const EigenDecomposition eig = hermitian_eig(gram);
  std::vector<std::vector<cplx>> out;
  out.reserve(keep);
  for (int l = a.cols() - keep; l < a.cols(); ++l)
    out.push_back(eig.eigenvectors[l]);
  return out;
}

}  // namespace ucadoa
