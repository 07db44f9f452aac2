#include "illposed/problems.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace illposed {

namespace {

constexpr double kPi = 3.14159265358979323846;

void require_even(Index n, const char* who) {
  if (n < 2 || n % 2 != 0) {
    throw std::invalid_argument(std::string(who) + ": n must be even and >= 2");
  }
}

double sinc(double u) {
  if (std::abs(u) < 1e-9) {
    const double u2 = u * u;
    return 1.0 - u2 / 6.0 + u2 * u2 / 120.0;
  }
  return std::sin(u) / u;
}

}  // namespace

GeneratedSystem gen_shaw(Index n) {
  require_even(n, "gen_shaw");
  const double h = kPi / static_cast<double>(n);
  Vector t(n), co(n), si(n);
  for (Index i = 0; i < n; ++i) {
    t[i] = -kPi / 2.0 + (static_cast<double>(i) + 0.5) * h;
    co[i] = std::cos(t[i]);
    si[i] = kPi * std::sin(t[i]);
  }
  RowMatrix A(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      const double c = co[i] + co[j];
      const double s = sinc(si[i] + si[j]);
      A(i, j) = h * c * c * s * s;
    }
  }
  Vector x(n);
  for (Index i = 0; i < n; ++i) {
    const double d1 = t[i] - 0.8;
    const double d2 = t[i] + 0.5;
    x[i] = 2.0 * std::exp(-6.0 * d1 * d1) + std::exp(-2.0 * d2 * d2);
  }
  LinearMap Amap = LinearMap::dense(std::move(A));
  Vector b = Amap.apply(x);
  return {Amap, std::move(x), std::move(b)};
}

GeneratedSystem gen_baart(Index n) {
  require_even(n, "gen_baart");
  const double hs = kPi / 2.0 / static_cast<double>(n);
  const double ht = kPi / static_cast<double>(n);
  RowMatrix A(n, n);
  for (Index i = 0; i < n; ++i) {
    const double s = (static_cast<double>(i) + 0.5) * hs;
    for (Index j = 0; j < n; ++j) {
      const double t = (static_cast<double>(j) + 0.5) * ht;
      A(i, j) = ht * std::exp(s * std::cos(t));
    }
  }
  Vector x(n);
  for (Index j = 0; j < n; ++j) x[j] = std::sin((static_cast<double>(j) + 0.5) * ht);
  LinearMap Amap = LinearMap::dense(std::move(A));
  Vector b = Amap.apply(x);
  return {Amap, std::move(x), std::move(b)};
}

GeneratedSystem gen_heat(Index n) {
  require_even(n, "gen_heat");
  const double kappa = 1.0;
  const double h = 1.0 / static_cast<double>(n);
  const double c = h / (2.0 * kappa * std::sqrt(kPi));
  const double d = 1.0 / (4.0 * kappa * kappa);
  Vector col(n);
  for (Index i = 0; i < n; ++i) {
    const double ti = (static_cast<double>(i) + 0.5) * h;
    col[i] = c * std::pow(ti, -1.5) * std::exp(-d / ti);
  }
  RowMatrix A = RowMatrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j <= i; ++j) A(i, j) = col[i - j];
  }
  Vector x = Vector::Zero(n);
  for (Index i = 0; i < n / 2; ++i) {
    const double ti = static_cast<double>(i + 1) * 20.0 / static_cast<double>(n);
    if (ti < 2.0) {
      x[i] = 0.75 * ti * ti / 4.0;
    } else if (ti < 3.0) {
      x[i] = 0.75 + (ti - 2.0) * (3.0 - ti);
    } else {
      x[i] = 0.75 * std::exp(-(ti - 3.0) * 2.0);
    }
  }
  LinearMap Amap = LinearMap::dense(std::move(A));
  Vector b = Amap.apply(x);
  return {Amap, std::move(x), std::move(b)};
}

GeneratedSystem gen_deriv2(Index n, int example) {
  if (n < 2) throw std::invalid_argument("gen_deriv2: n must be >= 2");
  if (example < 1 || example > 3) {
    throw std::invalid_argument("gen_deriv2: example must be 1, 2 or 3");
  }
  if (example == 3) require_even(n, "gen_deriv2(example=3)");
  const double h = 1.0 / static_cast<double>(n);
  const double sqh = std::sqrt(h);
  const double h32 = h * sqh;
  const double h2 = h * h;
  const double sqhi = 1.0 / sqh;
  RowMatrix A(n, n);
  for (Index i = 0; i < n; ++i) {
    const double fi = static_cast<double>(i + 1);
    A(i, i) = h2 * ((fi * fi - fi + 0.25) * h - (fi - 1.0 / 3.0));
    for (Index j = 0; j < i; ++j) {
      const double fj = static_cast<double>(j + 1);
      const double v = h2 * (fj - 0.5) * ((fi - 0.5) * h - 1.0);
      A(i, j) = v;
      A(j, i) = v;
    }
  }
  Vector x(n);
  for (Index i = 0; i < n; ++i) {
    const double fi = static_cast<double>(i + 1);
    switch (example) {
      case 1:
        x[i] = h32 * (fi - 0.5);
        break;
      case 2:
        x[i] = sqhi * (std::exp(fi * h) - std::exp((fi - 1.0) * h));
        break;
      default: {
        const double s1 = fi * h;
        const double s2 = (fi - 1.0) * h;
        const double moment = (s1 * s1 - s2 * s2) / 2.0;
        x[i] = (i < n / 2) ? sqhi * moment : sqhi * (h - moment);
        break;
      }
    }
  }
  LinearMap Amap = LinearMap::dense(std::move(A));
  Vector b = Amap.apply(x);
  return {Amap, std::move(x), std::move(b)};
}

LinearMap gen_gaussian_blur(Index grid, Index band, double sigma) {
  if (grid < 1) throw std::invalid_argument("gen_gaussian_blur: grid must be >= 1");
  if (band < 1 || band > grid) {
    throw std::invalid_argument("gen_gaussian_blur: band must satisfy 1 <= band <= grid");
  }
  if (!(sigma > 0.0)) throw std::invalid_argument("gen_gaussian_blur: sigma must be positive");
  RowMatrix T = RowMatrix::Zero(grid, grid);
  for (Index i = 0; i < grid; ++i) {
    for (Index j = 0; j < grid; ++j) {
      const Index d = i > j ? i - j : j - i;
      if (d < band) {
        const double fd = static_cast<double>(d);
        T(i, j) = std::exp(-fd * fd / (2.0 * sigma * sigma));
      }
    }
  }
  const double scale = 1.0 / (2.0 * kPi * sigma * sigma);
  return LinearMap::kronecker(T, T, scale);
}

LinearMap first_derivative_1d(Index n) { return LinearMap::first_diff_1d(n); }

LinearMap first_derivative_2d(Index grid) { return LinearMap::first_diff_2d(grid); }

Matrix phantom_image(Index grid) {
  if (grid < 4) throw std::invalid_argument("phantom_image: grid must be >= 4");
  Matrix img = Matrix::Zero(grid, grid);
  const double N = static_cast<double>(grid);
  // Two rectangular blocks.
  for (Index i = grid / 8; i < grid / 2; ++i)
    for (Index j = grid / 8; j < (3 * grid) / 8; ++j) img(i, j) = 0.8;
  for (Index i = grid / 2; i < (7 * grid) / 8; ++i)
    for (Index j = grid / 2; j < (3 * grid) / 4; ++j) img(i, j) = 0.5;
  // A smooth bump in the upper right quadrant.
  const double ci = 0.3 * N;
  const double cj = 0.7 * N;
  const double w = 0.01 * N * N;
  for (Index i = 0; i < grid; ++i) {
    for (Index j = 0; j < grid; ++j) {
      const double di = static_cast<double>(i) - ci;
      const double dj = static_cast<double>(j) - cj;
      img(i, j) += std::exp(-(di * di + dj * dj) / (2.0 * w));
    }
  }
  return img;
}

Vector seeded_gaussians(Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto uniform = [&rng]() {
    // 53-bit mantissa in (0, 1]; fully specified, so reproducible anywhere.
    return (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53;
  };
  Vector out(n);
  for (Index i = 0; i < n; i += 2) {
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    out[i] = r * std::cos(2.0 * kPi * u2);
    if (i + 1 < n) out[i + 1] = r * std::sin(2.0 * kPi * u2);
  }
  return out;
}

NoisyData add_noise(const Vector& b_true, double eps, std::uint64_t seed) {
  if (eps < 0.0) throw std::invalid_argument("add_noise: eps must be nonnegative");
  if (eps == 0.0) {
    return {b_true, Vector::Zero(b_true.size())};
  }
  Vector e = seeded_gaussians(b_true.size(), seed);
  const double target = eps * b_true.norm();
  e *= target / e.norm();
  return {b_true + e, std::move(e)};
}

ProblemInstance make_instance(std::string name, const GeneratedSystem& sys, LinearMap L,
                              double eps, std::uint64_t seed) {
  auto noisy = add_noise(sys.b_true, eps, seed);
  return ProblemInstance{sys.A,
                         std::move(L),
                         std::move(noisy.b),
                         sys.x_true,
                         sys.b_true,
                         std::move(noisy.e),
                         eps,
                         seed,
                         std::move(name)};
}

ProblemInstance make_blur_instance(Index grid, Index band, double sigma, double eps,
                                   std::uint64_t seed) {
  LinearMap A = gen_gaussian_blur(grid, band, sigma);
  Matrix img = phantom_image(grid);
  Vector x = Eigen::Map<const Vector>(img.data(), img.size());
  GeneratedSystem sys{A, x, A.apply(x)};
  return make_instance("blur", sys, first_derivative_2d(grid), eps, seed);
}

}  // namespace illposed
