#include "coda/graph.hpp"

#include <algorithm>
#include <istream>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>

namespace coda {

namespace {

void sort_unique(std::vector<int>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
}

}  // namespace

Graph Graph::complete(int n) {
    if (n < 2) throw std::invalid_argument("complete graph requires n >= 2");
    Graph g(n, false);
    for (int i = 0; i < n; ++i) {
        g.influencers_[i].reserve(n - 1);
        for (int j = 0; j < n; ++j)
            if (j != i) g.influencers_[i].push_back(j);
    }
    return g;
}

Graph Graph::ring(int n) {
    if (n < 3) throw std::invalid_argument("ring requires n >= 3");
    Graph g(n, false);
    for (int i = 0; i < n; ++i) {
        int prev = (i + n - 1) % n;
        int next = (i + 1) % n;
        g.influencers_[i] = {std::min(prev, next), std::max(prev, next)};
    }
    return g;
}

Graph Graph::lattice(int rows, int cols) {
    if (rows < 2 || cols < 2)
        throw std::invalid_argument("lattice requires rows >= 2 and cols >= 2");
    Graph g(rows * cols, false);
    auto id = [cols](int r, int c) { return r * cols + c; };
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            auto& nb = g.influencers_[id(r, c)];
            if (r > 0) nb.push_back(id(r - 1, c));
            if (r + 1 < rows) nb.push_back(id(r + 1, c));
            if (c > 0) nb.push_back(id(r, c - 1));
            if (c + 1 < cols) nb.push_back(id(r, c + 1));
            std::sort(nb.begin(), nb.end());
        }
    }
    return g;
}

Graph Graph::from_edges(int n, const std::vector<std::pair<int, int>>& edges,
                        bool directed) {
    if (n < 1) throw std::invalid_argument("agent count must be positive");
    Graph g(n, directed);
    for (const auto& [src, dst] : edges) {
        if (src < 0 || src >= n || dst < 0 || dst >= n)
            throw std::invalid_argument("edge (" + std::to_string(src + 1) + "," +
                                        std::to_string(dst + 1) +
                                        ") has an endpoint outside 1.." +
                                        std::to_string(n));
        if (src == dst)
            throw std::invalid_argument("self-loop at agent " +
                                        std::to_string(src + 1));
        g.influencers_[dst].push_back(src);
        if (!directed) g.influencers_[src].push_back(dst);
    }
    for (auto& nb : g.influencers_) sort_unique(nb);
    return g;
}

Graph Graph::parse_edge_list(std::istream& in) {
    std::string line;
    int lineno = 0;
    auto next_line = [&](std::string& out) {
        while (std::getline(in, out)) {
            ++lineno;
            if (auto pos = out.find('#'); pos != std::string::npos) out.erase(pos);
            auto end = out.find_last_not_of(" \t\r");
            if (end == std::string::npos) continue;
            out.erase(end + 1);
            return true;
        }
        return false;
    };

    if (!next_line(line)) throw std::invalid_argument("edge list: missing header");
    std::istringstream hdr(line);
    std::string kw_n, kw_dir;
    int n = 0, dir = -1;
    if (!(hdr >> kw_n >> n >> kw_dir >> dir) || kw_n != "n" ||
        kw_dir != "directed" || (dir != 0 && dir != 1))
        throw std::invalid_argument(
            "edge list line " + std::to_string(lineno) +
            ": header must be `n <count> directed <0|1>`");

    std::vector<std::pair<int, int>> edges;
    while (next_line(line)) {
        std::istringstream ls(line);
        int j = 0, i = 0;
        std::string extra;
        if (!(ls >> j >> i) || (ls >> extra))
            throw std::invalid_argument("edge list line " + std::to_string(lineno) +
                                        ": expected `j i`");
        edges.emplace_back(j - 1, i - 1);
    }
    return from_edges(n, edges, dir == 1);
}

long Graph::total_influence_entries() const {
    long total = 0;
    for (const auto& nb : influencers_) total += static_cast<long>(nb.size());
    return total;
}

bool Graph::strongly_connected() const {
    if (n_ == 0) return false;
    // influencers_ holds in-edges; build out-edges for the forward sweep.
    std::vector<std::vector<int>> out(n_);
    for (int i = 0; i < n_; ++i)
        for (int j : influencers_[i]) out[j].push_back(i);

    auto reaches_all = [this](const std::vector<std::vector<int>>& adj) {
        std::vector<char> seen(n_, 0);
        std::vector<int> stack = {0};
        seen[0] = 1;
        int count = 1;
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            for (int w : adj[v]) {
                if (!seen[w]) {
                    seen[w] = 1;
                    ++count;
                    stack.push_back(w);
                }
            }
        }
        return count == n_;
    };
    return reaches_all(out) && reaches_all(influencers_);
}

}  // namespace coda
