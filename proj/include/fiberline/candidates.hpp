#pragma once

#include "fiberline/field.hpp"

#include <compare>
#include <cstdint>
#include <vector>

namespace fiberline {

struct CandidatePair {
    Index cell_id = 0;
    Index edge_id = 0;

    friend auto operator<=>(const CandidatePair&, const CandidatePair&) = default;
};

/// (cell, edge) pairs handed from a search to the extraction kernel.
///
/// Sparse lists hold explicit pairs, sorted and unique. A dense list stands for
/// the full cross product of `cells` x `edges` without materializing it.
class CandidateList {
  public:
    CandidateList() = default;

    /// Sorts and removes duplicates.
    explicit CandidateList(std::vector<CandidatePair> pairs);

    static CandidateList all_pairs(std::size_t cells, std::size_t edges);

    bool dense() const { return dense_; }
    std::size_t dense_cells() const { return cells_; }
    std::size_t dense_edges() const { return edges_; }

    std::uint64_t size() const {
        return dense_ ? static_cast<std::uint64_t>(cells_) * edges_ : pairs_.size();
    }
    bool empty() const { return size() == 0; }

    /// Explicit pairs of a sparse list.
    const std::vector<CandidatePair>& pairs() const { return pairs_; }

    /// Explicit pairs for either representation (dense lists are expanded).
    std::vector<CandidatePair> materialize() const;

    bool contains(CandidatePair p) const;

  private:
    std::vector<CandidatePair> pairs_;
    bool dense_ = false;
    std::size_t cells_ = 0;
    std::size_t edges_ = 0;
};

} // namespace fiberline
