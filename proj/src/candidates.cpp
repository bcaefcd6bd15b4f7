#include "fiberline/candidates.hpp"

#include <algorithm>

namespace fiberline {

namespace {

// Searches emit tens of millions of pairs on noisy fields, where a comparison
// sort dominates the search time. Two stable counting passes (edge, then cell)
// give the same order in linear time.
template <class Key>
void counting_pass(std::vector<CandidatePair>& pairs, std::vector<CandidatePair>& out, std::size_t buckets, Key key) {
    std::vector<std::size_t> cursor(buckets + 1, 0);
    for (const CandidatePair& p : pairs)
        ++cursor[key(p) + 1];
    for (std::size_t k = 0; k < buckets; ++k)
        cursor[k + 1] += cursor[k];
    for (const CandidatePair& p : pairs)
        out[cursor[key(p)]++] = p;
    pairs.swap(out);
}

void sort_pairs(std::vector<CandidatePair>& pairs) {
    if (std::is_sorted(pairs.begin(), pairs.end()))
        return;
    Index max_cell = 0, max_edge = 0;
    for (const CandidatePair& p : pairs) {
        max_cell = std::max(max_cell, p.cell_id);
        max_edge = std::max(max_edge, p.edge_id);
    }
    const std::size_t cells = std::size_t{max_cell} + 1, edges = std::size_t{max_edge} + 1;
    if (pairs.size() < 4096 || cells + edges > 4 * pairs.size()) {
        std::sort(pairs.begin(), pairs.end());
        return;
    }
    std::vector<CandidatePair> out(pairs.size());
    counting_pass(pairs, out, edges, [](const CandidatePair& p) { return std::size_t{p.edge_id}; });
    counting_pass(pairs, out, cells, [](const CandidatePair& p) { return std::size_t{p.cell_id}; });
}

} // namespace

CandidateList::CandidateList(std::vector<CandidatePair> pairs) : pairs_(std::move(pairs)) {
    sort_pairs(pairs_);
    pairs_.erase(std::unique(pairs_.begin(), pairs_.end()), pairs_.end());
}

CandidateList CandidateList::all_pairs(std::size_t cells, std::size_t edges) {
    CandidateList list;
    list.dense_ = true;
    list.cells_ = cells;
    list.edges_ = edges;
    return list;
}

std::vector<CandidatePair> CandidateList::materialize() const {
    if (!dense_)
        return pairs_;
    std::vector<CandidatePair> all;
    all.reserve(cells_ * edges_);
    for (std::size_t c = 0; c < cells_; ++c)
        for (std::size_t e = 0; e < edges_; ++e)
            all.push_back({static_cast<Index>(c), static_cast<Index>(e)});
    return all;
}

bool CandidateList::contains(CandidatePair p) const {
    if (dense_)
        return p.cell_id < cells_ && p.edge_id < edges_;
    return std::binary_search(pairs_.begin(), pairs_.end(), p);
}

} // namespace fiberline
