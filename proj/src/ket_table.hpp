#pragma once

// Interning of local kets for canonical forms and Gram matrices.

#include <cstddef>
#include <unordered_map>
#include <utility>
#include <vector>

#include "hybridtele/state_engine.hpp"

namespace hybridtele::detail {

std::size_t hash_ket(const LocalKet& k);

/// Unit-norm representative of a Fock ket, phase fixed by its largest entry.
/// Returns the factor pulled out. Coherent kets are returned as is.
std::pair<cplx, LocalKet> normalize_ket(const LocalKet& k);

class KetTable {
 public:
  int intern(const LocalKet& k);
  const LocalKet& at(int id) const { return kets_[static_cast<std::size_t>(id)]; }
  std::size_t size() const { return kets_.size(); }

 private:
  std::vector<LocalKet> kets_;
  std::unordered_map<std::size_t, std::vector<int>> by_hash_;
};

struct IdVectorHash {
  std::size_t operator()(const std::vector<int>& v) const;
};

}  // namespace hybridtele::detail
