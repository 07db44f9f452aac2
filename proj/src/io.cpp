#include "illposed/io.hpp"

#include <algorithm>
#include <cmath>
#include <charconv>
#include <fstream>
#include <ostream>
#include <stdexcept>

namespace illposed {

std::string format_double(double value) {
  char buf[40];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) throw std::runtime_error("format_double failed");
  return std::string(buf, ptr);
}

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  return os;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open for reading: " + path);
  return is;
}

}  // namespace

void write_matrix(std::ostream& os, const Matrix& m) {
  os << m.rows() << ' ' << m.cols() << '\n';
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j) os << ' ';
      os << format_double(m(i, j));
    }
    os << '\n';
  }
}

void write_matrix_file(const std::string& path, const Matrix& m) {
  auto os = open_out(path);
  write_matrix(os, m);
}

Matrix read_matrix(std::istream& is) {
  Index rows = 0, cols = 0;
  if (!(is >> rows >> cols) || rows < 0 || cols < 0) {
    throw std::runtime_error("matrix header malformed");
  }
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) {
      if (!(is >> m(i, j))) throw std::runtime_error("matrix body truncated");
    }
  }
  return m;
}

Matrix read_matrix_file(const std::string& path) {
  auto is = open_in(path);
  return read_matrix(is);
}

void write_sequence(std::ostream& os, const Vector& v) {
  os << v.size() << '\n';
  for (Index i = 0; i < v.size(); ++i) os << format_double(v[i]) << '\n';
}

void write_sequence_file(const std::string& path, const Vector& v) {
  auto os = open_out(path);
  write_sequence(os, v);
}

Vector read_sequence(std::istream& is) {
  Index n = 0;
  if (!(is >> n) || n < 0) throw std::runtime_error("sequence header malformed");
  Vector v(n);
  for (Index i = 0; i < n; ++i) {
    if (!(is >> v[i])) throw std::runtime_error("sequence body truncated");
  }
  return v;
}

Vector read_sequence_file(const std::string& path) {
  auto is = open_in(path);
  return read_sequence(is);
}

void write_pgm(std::ostream& os, const Matrix& image) {
  const double lo = image.minCoeff();
  const double hi = image.maxCoeff();
  const double span = hi > lo ? hi - lo : 1.0;
  os << "P2\n" << image.cols() << ' ' << image.rows() << "\n255\n";
  for (Index i = 0; i < image.rows(); ++i) {
    for (Index j = 0; j < image.cols(); ++j) {
      const int g = static_cast<int>(std::lround(255.0 * (image(i, j) - lo) / span));
      if (j) os << ' ';
      os << std::clamp(g, 0, 255);
    }
    os << '\n';
  }
}

void write_pgm_file(const std::string& path, const Matrix& image) {
  auto os = open_out(path);
  write_pgm(os, image);
}

}  // namespace illposed
