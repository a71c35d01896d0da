#pragma once

#include <cstdint>
#include <iosfwd>
#include <utility>
#include <vector>

namespace coda {

/// Fixed interaction topology. Agents are 0-indexed in this API; all file
/// formats and reports use 1-indexed agent labels and the conversion happens
/// at the I/O boundary. Influencer lists are stored sorted so that traces and
/// reports are deterministic. Immutable after construction.
class Graph {
public:
    static Graph complete(int n);
    static Graph ring(int n);
    static Graph lattice(int rows, int cols);

    /// Build from an explicit edge list. An edge (j,i) means "j influences i",
    /// i.e. j ends up in N_i. Endpoints are 0-indexed here. Duplicate edges
    /// collapse; self-loops and out-of-range endpoints are rejected with the
    /// offending edge named in the exception message.
    static Graph from_edges(int n, const std::vector<std::pair<int, int>>& edges,
                            bool directed);

    /// Text format: header `n <count> directed <0|1>`, then one `j i` pair per
    /// line (influencer first, 1-indexed), `#` starts a comment.
    static Graph parse_edge_list(std::istream& in);

    int size() const { return n_; }
    bool directed() const { return directed_; }

    /// N_i, sorted ascending. May be empty (isolated agent).
    const std::vector<int>& influencers(int i) const { return influencers_[i]; }
    int degree(int i) const { return static_cast<int>(influencers_[i].size()); }

    /// Sum of |N_i| over all agents.
    long total_influence_entries() const;

    bool strongly_connected() const;

    bool operator==(const Graph& other) const = default;

private:
    Graph(int n, bool directed) : n_(n), directed_(directed), influencers_(n) {}

    int n_ = 0;
    bool directed_ = false;
    std::vector<std::vector<int>> influencers_;
};

}  // namespace coda
