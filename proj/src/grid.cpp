#include "phvs/grid.hpp"

#include <algorithm>

#include "phvs/error.hpp"

namespace phvs {

std::uint64_t grid_size(std::uint64_t modulus, std::size_t nvars, std::uint64_t limit) {
  std::uint64_t size = 1;
  for (std::size_t i = 0; i < nvars; ++i) {
    if (size > limit / modulus) {
      throw Error(Errc::BudgetExceeded, std::to_string(modulus) + "^" + std::to_string(nvars) +
                                            " terms exceed the budget of " + std::to_string(limit));
    }
    size *= modulus;
  }
  if (size > limit) throw Error(Errc::BudgetExceeded, "term count exceeds the budget");
  return size;
}

void decode_point(std::uint64_t index, std::uint64_t modulus, std::vector<std::uint64_t>& out) {
  for (std::size_t i = out.size(); i-- > 0;) {
    out[i] = index % modulus;
    index /= modulus;
  }
}

PolyGrid::PolyGrid(const MultiPoly& f, std::uint64_t modulus)
    : modulus_(modulus), nvars_(f.nvars()), rows_(1), inner_degree_(0) {
  if (modulus < 2 || modulus > ResidueRing::kMaxModulus) throw Error(Errc::InvalidArgument, "grid modulus out of range");
  for (std::size_t i = 1; i < nvars_; ++i) {
    if (rows_ > (std::uint64_t{1} << 40) / modulus) throw Error(Errc::BudgetExceeded, "grid too large");
    rows_ *= modulus;
  }
  for (const auto& [e, c] : f.terms()) {
    const std::uint64_t r = reduce_coeff(c, modulus);
    if (r == 0) continue;
    Term t{r, {}, 0};
    if (nvars_ > 0) {
      t.exps.assign(e.begin(), e.end() - 1);
      t.last = e.back();
    }
    inner_degree_ = std::max(inner_degree_, t.last);
    terms_.push_back(std::move(t));
  }
}

void PolyGrid::row(std::uint64_t r, std::uint32_t* out) const {
  const std::uint64_t n = modulus_;
  if (nvars_ == 0) {
    std::uint64_t v = 0;
    for (const auto& t : terms_) v = (v + t.coeff) % n;
    out[0] = static_cast<std::uint32_t>(v);
    return;
  }

  std::vector<std::uint64_t> prefix(nvars_ - 1);
  decode_point(r, n, prefix);

  // Univariate coefficients in x_n for this prefix.
  std::vector<std::uint64_t> coef(inner_degree_ + 1, 0);
  for (const auto& t : terms_) {
    std::uint64_t v = t.coeff;
    for (std::size_t i = 0; i < prefix.size() && v != 0; ++i)
      for (std::uint32_t k = 0; k < t.exps[i]; ++k) v = v * prefix[i] % n;
    coef[t.last] = (coef[t.last] + v) % n;
  }

  auto horner = [&](std::uint64_t x) {
    std::uint64_t v = 0;
    for (std::size_t k = coef.size(); k-- > 0;) v = (v * x + coef[k]) % n;
    return v;
  };

  const std::uint64_t deg = inner_degree_;
  if (deg + 1 >= n) {
    for (std::uint64_t x = 0; x < n; ++x) out[x] = static_cast<std::uint32_t>(horner(x));
    return;
  }
  // Forward differences: after seeding with deg+1 values, each step costs deg additions.
  std::vector<std::uint64_t> diff(deg + 1);
  for (std::uint64_t x = 0; x <= deg; ++x) diff[x] = horner(x);
  for (std::uint64_t k = 1; k <= deg; ++k)
    for (std::uint64_t j = deg; j >= k; --j) diff[j] = (diff[j] + n - diff[j - 1]) % n;
  for (std::uint64_t x = 0; x < n; ++x) {
    out[x] = static_cast<std::uint32_t>(diff[0]);
    for (std::uint64_t j = 0; j < deg; ++j) {
      const std::uint64_t s = diff[j] + diff[j + 1];
      diff[j] = s >= n ? s - n : s;
    }
  }
}

std::vector<std::uint32_t> PolyGrid::table() const {
  std::vector<std::uint32_t> out(size());
  const std::uint64_t len = row_length();
  for (std::uint64_t r = 0; r < rows_; ++r) row(r, out.data() + r * len);
  return out;
}

}  // namespace phvs
