#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace statcert {

using Rational = mpq_class;
using Vec = std::vector<Rational>;

/// Parses "p", "-p" or "p/q" with decimal digits only. Throws ParseError.
Rational parseRational(std::string_view text);
std::string formatRational(const Rational &value);

Rational dot(const Vec &a, const Vec &b);
Vec zeros(std::size_t n);
Vec unitVector(std::size_t n, std::size_t i);
bool isZero(const Vec &v);
Vec operator+(const Vec &a, const Vec &b);
Vec operator-(const Vec &a, const Vec &b);
Vec operator-(const Vec &a);
Vec operator*(const Rational &s, const Vec &v);
Vec concat(const Vec &a, const Vec &b);

/// Dense row-major matrix of rationals.
class Matrix {
public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols);
  static Matrix fromRows(const std::vector<Vec> &rows, std::size_t cols);
  static Matrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  Rational &operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const Rational &operator()(std::size_t i, std::size_t j) const {
    return data_[i * cols_ + j];
  }

  Vec row(std::size_t i) const;
  Vec col(std::size_t j) const;
  void appendRow(const Vec &r);
  Matrix transpose() const;
  Vec apply(const Vec &x) const;           // A x
  Vec applyTranspose(const Vec &y) const;  // A^T y
  Matrix operator*(const Matrix &other) const;
  Matrix operator+(const Matrix &other) const;
  bool operator==(const Matrix &other) const = default;

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Rational> data_;
};

Matrix stack(const Matrix &top, const Matrix &bottom);

} // namespace statcert
