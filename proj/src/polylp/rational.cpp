#include "statcert/rational.hpp"

#include "statcert/errors.hpp"

#include <cassert>
#include <cctype>

namespace statcert {

const char *errorKindName(ErrorKind kind) {
  switch (kind) {
  case ErrorKind::Parse: return "ParseError";
  case ErrorKind::DimensionMismatch: return "DimensionMismatch";
  case ErrorKind::InfeasiblePoint: return "InfeasiblePoint";
  case ErrorKind::PartitionLimitExceeded: return "PartitionLimitExceeded";
  case ErrorKind::BranchLimitExceeded: return "BranchLimitExceeded";
  case ErrorKind::SubsetLimitExceeded: return "SubsetLimitExceeded";
  case ErrorKind::MfcqViolated: return "MfcqViolated";
  case ErrorKind::GeInfeasibleAtPoint: return "GeInfeasibleAtPoint";
  case ErrorKind::LambdaBarUnavailable: return "LambdaBarUnavailable";
  case ErrorKind::ConstancyNotEstablished: return "ConstancyNotEstablished";
  case ErrorKind::Internal: return "InternalError";
  }
  return "Error";
}

void fail(ErrorKind kind, const std::string &message) {
  throw Error(kind, std::string(errorKindName(kind)) + ": " + message);
}

static bool allDigits(std::string_view s) {
  if (s.empty())
    return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c)))
      return false;
  return true;
}

Rational parseRational(std::string_view text) {
  std::string_view body = text;
  if (!body.empty() && (body.front() == '-' || body.front() == '+'))
    body.remove_prefix(1);
  auto slash = body.find('/');
  std::string_view num = body.substr(0, slash);
  std::string_view den =
      slash == std::string_view::npos ? std::string_view("1") : body.substr(slash + 1);
  if (!allDigits(num) || !allDigits(den))
    fail(ErrorKind::Parse, "not a rational: \"" + std::string(text) + "\"");
  mpz_class d(std::string(den), 10);
  if (d == 0)
    fail(ErrorKind::Parse, "zero denominator in \"" + std::string(text) + "\"");
  Rational r(mpz_class(std::string(num), 10), d);
  r.canonicalize();
  if (text.front() == '-')
    r = -r;
  return r;
}

std::string formatRational(const Rational &value) { return value.get_str(); }

Rational dot(const Vec &a, const Vec &b) {
  if (a.size() != b.size())
    fail(ErrorKind::DimensionMismatch, "dot product of vectors of length " +
                                           std::to_string(a.size()) + " and " +
                                           std::to_string(b.size()));
  Rational s = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (sgn(a[i]) != 0 && sgn(b[i]) != 0)
      s += a[i] * b[i];
  return s;
}

Vec zeros(std::size_t n) { return Vec(n, Rational(0)); }

Vec unitVector(std::size_t n, std::size_t i) {
  Vec v = zeros(n);
  v[i] = 1;
  return v;
}

bool isZero(const Vec &v) {
  for (const auto &x : v)
    if (sgn(x) != 0)
      return false;
  return true;
}

Vec operator+(const Vec &a, const Vec &b) {
  assert(a.size() == b.size());
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    r[i] = a[i] + b[i];
  return r;
}

Vec operator-(const Vec &a, const Vec &b) {
  assert(a.size() == b.size());
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    r[i] = a[i] - b[i];
  return r;
}

Vec operator-(const Vec &a) {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    r[i] = -a[i];
  return r;
}

Vec operator*(const Rational &s, const Vec &v) {
  Vec r(v.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    r[i] = s * v[i];
  return r;
}

Vec concat(const Vec &a, const Vec &b) {
  Vec r = a;
  r.insert(r.end(), b.begin(), b.end());
  return r;
}

Matrix::Matrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, Rational(0)) {}

Matrix Matrix::fromRows(const std::vector<Vec> &rows, std::size_t cols) {
  Matrix m(0, cols);
  for (const auto &r : rows)
    m.appendRow(r);
  return m;
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    m(i, i) = 1;
  return m;
}

Vec Matrix::row(std::size_t i) const {
  return Vec(data_.begin() + static_cast<std::ptrdiff_t>(i * cols_),
             data_.begin() + static_cast<std::ptrdiff_t>((i + 1) * cols_));
}

Vec Matrix::col(std::size_t j) const {
  Vec c(rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    c[i] = (*this)(i, j);
  return c;
}

void Matrix::appendRow(const Vec &r) {
  if (r.size() != cols_)
    fail(ErrorKind::DimensionMismatch, "row of length " + std::to_string(r.size()) +
                                           " appended to matrix with " +
                                           std::to_string(cols_) + " columns");
  data_.insert(data_.end(), r.begin(), r.end());
  ++rows_;
}

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j)
      t(j, i) = (*this)(i, j);
  return t;
}

Vec Matrix::apply(const Vec &x) const {
  if (x.size() != cols_)
    fail(ErrorKind::DimensionMismatch, "matrix-vector product");
  Vec y = zeros(rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j)
      if (sgn((*this)(i, j)) != 0 && sgn(x[j]) != 0)
        y[i] += (*this)(i, j) * x[j];
  return y;
}

Vec Matrix::applyTranspose(const Vec &y) const {
  if (y.size() != rows_)
    fail(ErrorKind::DimensionMismatch, "transposed matrix-vector product");
  Vec x = zeros(cols_);
  for (std::size_t i = 0; i < rows_; ++i) {
    if (sgn(y[i]) == 0)
      continue;
    for (std::size_t j = 0; j < cols_; ++j)
      if (sgn((*this)(i, j)) != 0)
        x[j] += (*this)(i, j) * y[i];
  }
  return x;
}

Matrix Matrix::operator*(const Matrix &other) const {
  if (cols_ != other.rows_)
    fail(ErrorKind::DimensionMismatch, "matrix product");
  Matrix p(rows_, other.cols_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t k = 0; k < cols_; ++k) {
      if (sgn((*this)(i, k)) == 0)
        continue;
      for (std::size_t j = 0; j < other.cols_; ++j)
        p(i, j) += (*this)(i, k) * other(k, j);
    }
  return p;
}

Matrix Matrix::operator+(const Matrix &other) const {
  if (rows_ != other.rows_ || cols_ != other.cols_)
    fail(ErrorKind::DimensionMismatch, "matrix sum");
  Matrix s = *this;
  for (std::size_t i = 0; i < data_.size(); ++i)
    s.data_[i] += other.data_[i];
  return s;
}

Matrix stack(const Matrix &top, const Matrix &bottom) {
  if (top.cols() != bottom.cols())
    fail(ErrorKind::DimensionMismatch, "stacking matrices with different widths");
  Matrix s = top;
  for (std::size_t i = 0; i < bottom.rows(); ++i)
    s.appendRow(bottom.row(i));
  return s;
}

} // namespace statcert
