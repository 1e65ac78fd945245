#pragma once

// Shared helpers for tests: literals, seeded random rational data, cones.

#include "statcert/polylp.hpp"

#include <random>
#include <string>
#include <vector>

namespace testsupport {

using statcert::Matrix;
using statcert::Rational;
using statcert::Vec;
using statcert::operator+;
using statcert::operator-;
using statcert::operator*;

inline Rational q(const char *s) { return statcert::parseRational(s); }

inline Vec vec(std::initializer_list<long> xs) {
  Vec v;
  for (long x : xs)
    v.emplace_back(x);
  return v;
}

inline Matrix mat(std::initializer_list<std::initializer_list<long>> rows, std::size_t cols) {
  Matrix m(0, cols);
  for (auto r : rows)
    m.appendRow(vec(r));
  return m;
}

class Rng {
public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  long integer(long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(gen_); }
  std::size_t index(std::size_t n) { return static_cast<std::size_t>(integer(0, long(n) - 1)); }
  bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(gen_); }
  Vec vector(std::size_t n, long lo, long hi) {
    Vec v(n);
    for (auto &x : v)
      x = integer(lo, hi);
    return v;
  }
  Vec nonzeroVector(std::size_t n, long lo, long hi) {
    for (;;) {
      Vec v = vector(n, lo, hi);
      if (!statcert::isZero(v))
        return v;
    }
  }
  std::mt19937_64 &engine() { return gen_; }

private:
  std::mt19937_64 gen_;
};

inline statcert::polylp::HCone randomHCone(Rng &rng, std::size_t dim, std::size_t maxRows) {
  statcert::polylp::HCone c(dim);
  std::size_t eqRows = rng.coin(0.3) ? rng.index(2) : 0;
  std::size_t inRows = rng.index(maxRows + 1 - eqRows);
  for (std::size_t i = 0; i < eqRows; ++i)
    c.eq.appendRow(rng.nonzeroVector(dim, -2, 2));
  for (std::size_t i = 0; i < inRows; ++i)
    c.ineq.appendRow(rng.nonzeroVector(dim, -2, 2));
  return c;
}

inline statcert::polylp::GCone randomGCone(Rng &rng, std::size_t dim, std::size_t maxGens) {
  statcert::polylp::GCone c(dim);
  std::size_t lin = rng.coin(0.3) ? rng.index(2) : 0;
  std::size_t rays = rng.index(maxGens + 1 - lin);
  for (std::size_t i = 0; i < lin; ++i)
    c.lin.push_back(rng.nonzeroVector(dim, -2, 2));
  for (std::size_t i = 0; i < rays; ++i)
    c.rays.push_back(rng.nonzeroVector(dim, -2, 2));
  return c;
}

/// A random point of the cone, found by optimizing a random objective over the
/// cone intersected with the box [-3, 3]^dim.
inline Vec pointInHCone(Rng &rng, const statcert::polylp::HCone &c) {
  using namespace statcert::polylp;
  LinearSystem eq(c.eq, statcert::zeros(c.eq.rows()));
  LinearSystem in(c.ineq, statcert::zeros(c.ineq.rows()));
  for (std::size_t d = 0; d < c.dim; ++d) {
    in.add(statcert::unitVector(c.dim, d), 3);
    in.add(-statcert::unitVector(c.dim, d), 3);
  }
  auto out = lpSolve(rng.vector(c.dim, -5, 5), eq, in, Sense::Minimize);
  return out.point;
}

/// Random nonnegative combination of rays plus random combination of lin.
inline Vec pointInGCone(Rng &rng, const statcert::polylp::GCone &c) {
  Vec v = statcert::zeros(c.dim);
  for (const auto &r : c.rays)
    v = v + Rational(rng.integer(0, 3)) * r;
  for (const auto &l : c.lin)
    v = v + Rational(rng.integer(-3, 3)) * l;
  return v;
}

} // namespace testsupport
