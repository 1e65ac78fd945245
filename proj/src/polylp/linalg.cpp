#include "statcert/errors.hpp"
#include "statcert/polylp.hpp"

#include <numeric>

namespace statcert::polylp {

namespace {

// In-place reduced row echelon form; returns pivot columns in row order.
std::vector<std::size_t> rref(Matrix &m) {
  std::vector<std::size_t> pivots;
  std::size_t r = 0;
  for (std::size_t c = 0; c < m.cols() && r < m.rows(); ++c) {
    std::size_t p = r;
    while (p < m.rows() && sgn(m(p, c)) == 0)
      ++p;
    if (p == m.rows())
      continue;
    if (p != r)
      for (std::size_t k = 0; k < m.cols(); ++k)
        std::swap(m(p, k), m(r, k));
    Rational inv = 1 / m(r, c);
    for (std::size_t k = c; k < m.cols(); ++k)
      m(r, k) *= inv;
    for (std::size_t i = 0; i < m.rows(); ++i) {
      if (i == r || sgn(m(i, c)) == 0)
        continue;
      Rational f = m(i, c);
      for (std::size_t k = c; k < m.cols(); ++k)
        if (sgn(m(r, k)) != 0)
          m(i, k) -= f * m(r, k);
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

} // namespace

std::size_t rank(const Matrix &m) {
  Matrix copy = m;
  return rref(copy).size();
}

std::vector<Vec> nullspace(const Matrix &m) {
  Matrix copy = m;
  auto pivots = rref(copy);
  std::vector<bool> isPivot(m.cols(), false);
  for (auto c : pivots)
    isPivot[c] = true;
  std::vector<Vec> basis;
  for (std::size_t f = 0; f < m.cols(); ++f) {
    if (isPivot[f])
      continue;
    Vec v = zeros(m.cols());
    v[f] = 1;
    for (std::size_t r = 0; r < pivots.size(); ++r)
      v[pivots[r]] = -copy(r, f);
    basis.push_back(v);
  }
  return basis;
}

std::optional<Vec> solveLinear(const Matrix &m, const Vec &rhs) {
  if (rhs.size() != m.rows())
    fail(ErrorKind::DimensionMismatch, "right-hand side length");
  Matrix aug(m.rows(), m.cols() + 1);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j)
      aug(i, j) = m(i, j);
    aug(i, m.cols()) = rhs[i];
  }
  auto pivots = rref(aug);
  if (!pivots.empty() && pivots.back() == m.cols())
    return std::nullopt;
  Vec x = zeros(m.cols());
  for (std::size_t r = 0; r < pivots.size(); ++r)
    x[pivots[r]] = aug(r, m.cols());
  return x;
}

Vec primitive(const Vec &v) {
  mpz_class den = 1, num = 0;
  for (const auto &x : v) {
    if (sgn(x) == 0)
      continue;
    mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), x.get_den_mpz_t());
  }
  for (const auto &x : v) {
    if (sgn(x) == 0)
      continue;
    mpz_class scaled = x.get_num() * (den / x.get_den());
    mpz_gcd(num.get_mpz_t(), num.get_mpz_t(), scaled.get_mpz_t());
  }
  if (num == 0)
    return v;
  Vec out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    out[i] = Rational(v[i] * Rational(den) / Rational(num));
  return out;
}

} // namespace statcert::polylp
