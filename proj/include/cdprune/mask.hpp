#pragma once

#include <cstddef>
#include <vector>

#include "cdprune/types.hpp"

namespace cdprune {

class Network;

/// Binary keep/prune mask, one matrix per weight matrix of a Network.
/// Entries are exactly 0.0 or 1.0; `surviving` caches the number of ones.
struct PruneMask {
  std::vector<Matrix> layers;
  std::size_t surviving = 0;
  int round = 0;

  /// The trivial all-ones mask for `net`.
  static PruneMask ones(const Network& net);

  std::size_t total() const;
  double remaining_fraction() const;
  bool matches(const Network& net) const;

  /// Recomputes `surviving` and checks that every entry is 0 or 1.
  void recount();
};

}  // namespace cdprune
