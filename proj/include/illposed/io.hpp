#ifndef ILLPOSED_IO_HPP
#define ILLPOSED_IO_HPP

#include <iosfwd>
#include <string>

#include "illposed/linop.hpp"

namespace illposed {

// Plain-text formats. A matrix is "rows cols" on the first line followed by
// one whitespace-separated row per line; a sequence is its length followed by
// one value per line. Values round-trip exactly (printed with 17 significant
// digits).

void write_matrix(std::ostream& os, const Matrix& m);
void write_matrix_file(const std::string& path, const Matrix& m);
Matrix read_matrix(std::istream& is);
Matrix read_matrix_file(const std::string& path);

void write_sequence(std::ostream& os, const Vector& v);
void write_sequence_file(const std::string& path, const Vector& v);
Vector read_sequence(std::istream& is);
Vector read_sequence_file(const std::string& path);

/// 8-bit grayscale PGM (ASCII "P2"), values scaled linearly from [min, max].
void write_pgm(std::ostream& os, const Matrix& image);
void write_pgm_file(const std::string& path, const Matrix& image);

/// Shortest decimal form that round-trips a double.
std::string format_double(double value);

}  // namespace illposed

#endif
