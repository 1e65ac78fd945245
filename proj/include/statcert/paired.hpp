#pragma once

// Multiplier-space machinery shared by MPCC and MPVC: the stacked constraint
// Jacobian, coordinate sign patterns, images of sign-pattern cones, kernel
// sign-product tests.

#include "statcert/model.hpp"
#include "statcert/polylp.hpp"
#include "statcert/report.hpp"

#include <array>
#include <functional>
#include <string>

namespace statcert::paired {

using polylp::Sign;
using SignPattern = std::vector<Sign>;

/// Multipliers are ordered (h, g, first pair block, second pair block). For
/// MPCC the pair blocks are (G, H) with columns (-∇G, -∇H); for MPVC they are
/// (H, G) with columns (-∇H, ∇G).
struct Layout {
  std::size_t n = 0, mE = 0, mI = 0, mC = 0;
  std::vector<Vec> columns;
  std::array<std::string, 4> names;

  std::size_t size() const { return mE + mI + 2 * mC; }
  std::size_t h(std::size_t i) const { return i; }
  std::size_t g(std::size_t i) const { return mE + i; }
  std::size_t first(std::size_t i) const { return mE + mI + i; }
  std::size_t second(std::size_t i) const { return mE + mI + mC + i; }
  /// "G3" style 1-based coordinate name.
  std::string coordinateName(std::size_t k) const;
};

Layout mpccLayout(const model::PairedProgram &p);
Layout mpvcLayout(const model::PairedProgram &p);

/// Σ λ_k column_k.
Vec image(const Layout &layout, const Vec &lambda);
Blocks toBlocks(const Layout &layout, const Vec &lambda);
Vec fromBlocks(const Layout &layout, const Blocks &blocks);
bool satisfies(const Vec &lambda, const SignPattern &pattern);

polylp::GCone imageCone(const Layout &layout, const SignPattern &pattern);

struct ImageMembership {
  bool member = false;
  Vec lambda;     // when member
  Vec direction;  // otherwise: <d, target> > 0 and d in the polar of the image
};

/// target ∈ {Σ λ_k column_k : λ satisfies pattern}.
ImageMembership memberImage(const Layout &layout, const Vec &target, const SignPattern &pattern);

/// Adds one LP variable per multiplier coordinate with the pattern's sign.
std::size_t addMultipliers(polylp::LpModel &lp, const SignPattern &pattern);
/// Adds Σ λ_k column_k = rhs for multipliers starting at first.
void addImageRows(polylp::LpModel &lp, const Layout &layout, std::size_t first,
                  const Vec &rhs);

/// Requirement μ_a μ_b >= 0 for all μ in the kernel set.
struct ProductCondition {
  std::size_t a;
  std::size_t b;
};

struct ProductTest {
  bool holds = true;
  Vec violator;              // kernel element with μ_a > 0 > μ_b
  std::size_t failed = 0;    // index into the condition list
};

/// Kernel set {μ : μ satisfies support (Free/Zero only), Σ μ_k column_k = 0}.
ProductTest signProductTest(const Layout &layout, const SignPattern &support,
                            const std::vector<ProductCondition> &conditions);
bool inKernel(const Layout &layout, const SignPattern &support, const Vec &mu);
std::string describeCondition(const Layout &layout, const ProductCondition &c);

/// Calls fn(choice) for every vector in {0..choices-1}^count in lexicographic
/// order until fn returns true. Returns whether fn returned true. Throws
/// BranchLimitExceeded when choices^count > cap.
bool forEachBranch(std::size_t count, std::size_t choices, std::size_t cap,
                   const std::function<bool(const std::vector<std::size_t> &)> &fn);

constexpr std::size_t kDefaultBranchCap = 59049;  // 3^10

} // namespace statcert::paired
