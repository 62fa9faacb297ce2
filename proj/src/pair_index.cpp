#include "covmax/pair_index.hpp"

#include <algorithm>
#include <string>
#include <utility>

#include "covmax/errors.hpp"

namespace covmax {

std::string_view to_string(IndexKind kind) noexcept {
  switch (kind) {
    case IndexKind::StrictPairs: return "strict_pairs";
    case IndexKind::PairsWithDiagonal: return "pairs_with_diagonal";
    case IndexKind::BandExterior: return "band_exterior";
    case IndexKind::Custom: return "custom";
  }
  return "unknown";
}

PairIndexSet::PairIndexSet(IndexKind kind, std::size_t m, std::size_t band, std::vector<Pair> custom)
    : kind_(kind), m_(m), band_(band), custom_(std::move(custom)) {}

PairIndexSet PairIndexSet::strict_pairs(std::size_t m) {
  if (m < 2) throw EmptyIndexSet("strict pairs need m >= 2");
  return {IndexKind::StrictPairs, m, 0, {}};
}

PairIndexSet PairIndexSet::with_diagonal(std::size_t m) {
  if (m < 1) throw EmptyIndexSet("pairs with diagonal need m >= 1");
  return {IndexKind::PairsWithDiagonal, m, 0, {}};
}

PairIndexSet PairIndexSet::band_exterior(std::size_t m, std::size_t band) {
  if (m < 2 || band + 1 >= m) {
    throw EmptyIndexSet("no pairs with |i - j| > " + std::to_string(band) + " when m = " +
                        std::to_string(m));
  }
  return {IndexKind::BandExterior, m, band, {}};
}

PairIndexSet PairIndexSet::custom(std::size_t m, std::vector<Pair> pairs) {
  if (pairs.empty()) throw EmptyIndexSet("custom index set is empty");
  for (const Pair& p : pairs) {
    if (p.i > p.j) throw InvalidArgument("custom pairs must satisfy i <= j");
    if (p.j >= m) throw IndexOutOfRange("custom pair index exceeds dimension " + std::to_string(m));
  }
  std::sort(pairs.begin(), pairs.end());
  if (std::adjacent_find(pairs.begin(), pairs.end()) != pairs.end()) {
    throw InvalidArgument("custom index set contains duplicate pairs");
  }
  return {IndexKind::Custom, m, 0, std::move(pairs)};
}

std::size_t PairIndexSet::size() const noexcept {
  switch (kind_) {
    case IndexKind::StrictPairs: return m_ * (m_ - 1) / 2;
    case IndexKind::PairsWithDiagonal: return m_ * (m_ + 1) / 2;
    case IndexKind::BandExterior: return (m_ - band_ - 1) * (m_ - band_) / 2;
    case IndexKind::Custom: return custom_.size();
  }
  return 0;
}

bool PairIndexSet::contains(Pair p) const noexcept {
  if (p.i > p.j || p.j >= m_) return false;
  switch (kind_) {
    case IndexKind::StrictPairs: return p.i < p.j;
    case IndexKind::PairsWithDiagonal: return true;
    case IndexKind::BandExterior: return p.j - p.i > band_;
    case IndexKind::Custom: return std::binary_search(custom_.begin(), custom_.end(), p);
  }
  return false;
}

std::vector<Pair> PairIndexSet::pairs() const {
  std::vector<Pair> out;
  out.reserve(size());
  for_each([&](Pair p) { out.push_back(p); });
  return out;
}

}  // namespace covmax
