#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "covmax/pair.hpp"

namespace covmax {

enum class IndexKind { StrictPairs, PairsWithDiagonal, BandExterior, Custom };

[[nodiscard]] std::string_view to_string(IndexKind kind) noexcept;

/**
 * @brief The set of column pairs over which a maximum deviation is taken.
 *
 * All variants iterate in row-major order (i, then j). Custom sets are
 * sorted on construction so that "first attaining pair" means the same
 * thing for every variant. The cardinality >= 3 requirement of the limit
 * law is checked by the normalization, not here: a two-column strict set
 * is a valid index set, it just cannot be Gumbel-normalized.
 */
class PairIndexSet {
 public:
  static PairIndexSet strict_pairs(std::size_t m);
  static PairIndexSet with_diagonal(std::size_t m);
  /// Strict pairs with j - i > band. Throws EmptyIndexSet if band >= m - 1.
  static PairIndexSet band_exterior(std::size_t m, std::size_t band);
  /// Throws on i > j, out-of-range indices, duplicates or an empty list.
  static PairIndexSet custom(std::size_t m, std::vector<Pair> pairs);

  [[nodiscard]] IndexKind kind() const noexcept { return kind_; }
  [[nodiscard]] std::size_t dimension() const noexcept { return m_; }
  [[nodiscard]] std::size_t band() const noexcept { return band_; }

  /// Closed-form cardinality.
  [[nodiscard]] std::size_t size() const noexcept;
  [[nodiscard]] bool contains(Pair p) const noexcept;

  /// Materialized pairs in iteration order.
  [[nodiscard]] std::vector<Pair> pairs() const;

  template <class F>
  void for_each(F&& visit) const {
    switch (kind_) {
      case IndexKind::StrictPairs:
        for (std::size_t i = 0; i < m_; ++i)
          for (std::size_t j = i + 1; j < m_; ++j) visit(Pair{i, j});
        break;
      case IndexKind::PairsWithDiagonal:
        for (std::size_t i = 0; i < m_; ++i)
          for (std::size_t j = i; j < m_; ++j) visit(Pair{i, j});
        break;
      case IndexKind::BandExterior:
        for (std::size_t i = 0; i < m_; ++i)
          for (std::size_t j = i + band_ + 1; j < m_; ++j) visit(Pair{i, j});
        break;
      case IndexKind::Custom:
        for (const Pair& p : custom_) visit(p);
        break;
    }
  }

 private:
  PairIndexSet(IndexKind kind, std::size_t m, std::size_t band, std::vector<Pair> custom);

  IndexKind kind_;
  std::size_t m_;
  std::size_t band_;
  std::vector<Pair> custom_;
};

}  // namespace covmax
