#include "quadla.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace quadla {

quad qabs(quad x) { return x < quad(0) ? -x : x; }

quad qsqrt(quad x) {
  if (x <= quad(0)) return quad(0);
  // Newton from a double seed; two steps reach full quad precision.
  quad s = static_cast<quad>(std::sqrt(static_cast<double>(x)));
  s = quad(0.5) * (s + x / s);
  s = quad(0.5) * (s + x / s);
  s = quad(0.5) * (s + x / s);
  return s;
}

QMatrix from_double(const illposed::Matrix& m) {
  QMatrix out(m.rows(), m.cols());
  for (Index j = 0; j < m.cols(); ++j)
    for (Index i = 0; i < m.rows(); ++i) out(i, j) = static_cast<quad>(m(i, j));
  return out;
}

illposed::Vector to_double(const QVector& v) {
  illposed::Vector out(static_cast<Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out[static_cast<Index>(i)] = static_cast<double>(v[i]);
  return out;
}

QVector matvec(const QMatrix& m, const QVector& x) {
  QVector y(static_cast<std::size_t>(m.rows), quad(0));
  for (Index j = 0; j < m.cols; ++j) {
    const quad xj = x[static_cast<std::size_t>(j)];
    for (Index i = 0; i < m.rows; ++i) y[static_cast<std::size_t>(i)] += m(i, j) * xj;
  }
  return y;
}

quad norm(const QVector& v) {
  quad acc = 0;
  for (quad x : v) acc += x * x;
  return qsqrt(acc);
}

quad dot(const QVector& a, const QVector& b) {
  quad acc = 0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

void thin_qr(const QMatrix& a, QMatrix& q, QMatrix& r) {
  const Index m = a.rows;
  const Index n = a.cols;
  if (m < n) throw std::invalid_argument("thin_qr: rows < cols");
  QMatrix work = a;
  std::vector<QVector> reflectors;
  reflectors.reserve(static_cast<std::size_t>(n));

  for (Index k = 0; k < n; ++k) {
    quad sigma = 0;
    for (Index i = k; i < m; ++i) sigma += work(i, k) * work(i, k);
    const quad alpha = qsqrt(sigma);
    QVector v(static_cast<std::size_t>(m - k), quad(0));
    const quad x0 = work(k, k);
    const quad sign = x0 >= quad(0) ? quad(1) : quad(-1);
    v[0] = x0 + sign * alpha;
    for (Index i = k + 1; i < m; ++i) v[static_cast<std::size_t>(i - k)] = work(i, k);
    quad vnorm2 = 0;
    for (quad t : v) vnorm2 += t * t;
    if (vnorm2 > quad(0)) {
      for (Index j = k; j < n; ++j) {
        quad proj = 0;
        for (Index i = k; i < m; ++i) proj += v[static_cast<std::size_t>(i - k)] * work(i, j);
        proj = quad(2) * proj / vnorm2;
        for (Index i = k; i < m; ++i) work(i, j) -= proj * v[static_cast<std::size_t>(i - k)];
      }
    }
    reflectors.push_back(std::move(v));
  }

  r = QMatrix(n, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i <= j; ++i) r(i, j) = work(i, j);

  // Accumulate Q = H_1 ... H_n applied to the leading identity block.
  q = QMatrix(m, n);
  for (Index j = 0; j < n; ++j) q(j, j) = quad(1);
  for (Index k = n - 1; k >= 0; --k) {
    const QVector& v = reflectors[static_cast<std::size_t>(k)];
    quad vnorm2 = 0;
    for (quad t : v) vnorm2 += t * t;
    if (vnorm2 == quad(0)) continue;
    for (Index j = 0; j < n; ++j) {
      quad proj = 0;
      for (Index i = k; i < m; ++i) proj += v[static_cast<std::size_t>(i - k)] * q(i, j);
      proj = quad(2) * proj / vnorm2;
      for (Index i = k; i < m; ++i) q(i, j) -= proj * v[static_cast<std::size_t>(i - k)];
    }
  }

  // Fix the diagonal signs of R to be nonnegative.
  for (Index j = 0; j < n; ++j) {
    if (r(j, j) < quad(0)) {
      for (Index l = j; l < n; ++l) r(j, l) = -r(j, l);
      for (Index i = 0; i < m; ++i) q(i, j) = -q(i, j);
    }
  }
}

void svd(const QMatrix& a, QMatrix& u, QVector& s, QMatrix& v) {
  const Index m = a.rows;
  const Index n = a.cols;
  if (m < n) throw std::invalid_argument("svd: rows < cols");
  QMatrix g = a;
  v = QMatrix(n, n);
  for (Index j = 0; j < n; ++j) v(j, j) = quad(1);

  const quad tol = quad(1e-30);
  for (int sweep = 0; sweep < 60; ++sweep) {
    bool rotated = false;
    for (Index p = 0; p < n - 1; ++p) {
      for (Index q2 = p + 1; q2 < n; ++q2) {
        quad app = 0, aqq = 0, apq = 0;
        for (Index i = 0; i < m; ++i) {
          app += g(i, p) * g(i, p);
          aqq += g(i, q2) * g(i, q2);
          apq += g(i, p) * g(i, q2);
        }
        if (qabs(apq) <= tol * qsqrt(app * aqq)) continue;
        rotated = true;
        const quad zeta = (aqq - app) / (quad(2) * apq);
        const quad t = (zeta >= quad(0) ? quad(1) : quad(-1)) /
                       (qabs(zeta) + qsqrt(quad(1) + zeta * zeta));
        const quad c = quad(1) / qsqrt(quad(1) + t * t);
        const quad sn = c * t;
        for (Index i = 0; i < m; ++i) {
          const quad gp = g(i, p);
          const quad gq = g(i, q2);
          g(i, p) = c * gp - sn * gq;
          g(i, q2) = sn * gp + c * gq;
        }
        for (Index i = 0; i < n; ++i) {
          const quad vp = v(i, p);
          const quad vq = v(i, q2);
          v(i, p) = c * vp - sn * vq;
          v(i, q2) = sn * vp + c * vq;
        }
      }
    }
    if (!rotated) break;
  }

  s.assign(static_cast<std::size_t>(n), quad(0));
  u = QMatrix(m, n);
  std::vector<Index> order(static_cast<std::size_t>(n));
  QVector norms(static_cast<std::size_t>(n), quad(0));
  for (Index j = 0; j < n; ++j) {
    quad nrm2 = 0;
    for (Index i = 0; i < m; ++i) nrm2 += g(i, j) * g(i, j);
    norms[static_cast<std::size_t>(j)] = qsqrt(nrm2);
    order[static_cast<std::size_t>(j)] = j;
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](Index x, Index y) { return norms[std::size_t(x)] > norms[std::size_t(y)]; });
  QMatrix vperm(n, n);
  for (Index jj = 0; jj < n; ++jj) {
    const Index j = order[static_cast<std::size_t>(jj)];
    const quad nrm = norms[static_cast<std::size_t>(j)];
    s[static_cast<std::size_t>(jj)] = nrm;
    for (Index i = 0; i < m; ++i) u(i, jj) = nrm > quad(0) ? g(i, j) / nrm : quad(0);
    for (Index i = 0; i < n; ++i) vperm(i, jj) = v(i, j);
  }
  v = std::move(vperm);
}

QVector solve_upper(const QMatrix& r, const QVector& b) {
  const Index n = r.cols;
  QVector x(b);
  for (Index i = n - 1; i >= 0; --i) {
    quad acc = x[static_cast<std::size_t>(i)];
    for (Index j = i + 1; j < n; ++j) acc -= r(i, j) * x[static_cast<std::size_t>(j)];
    x[static_cast<std::size_t>(i)] = acc / r(i, i);
  }
  return x;
}

}  // namespace quadla
