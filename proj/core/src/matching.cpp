#include "bipemb/matching.hpp"

#include <algorithm>
#include <limits>
#include <queue>

#include "bipemb/error.hpp"

namespace bipemb {

namespace {
constexpr std::uint32_t infinity = std::numeric_limits<std::uint32_t>::max();
}

HopcroftKarp::HopcroftKarp(std::size_t left, std::size_t right)
    : adj_(left), mate_left_(left, unmatched), mate_right_(right, unmatched), layer_(left, infinity), cursor_(left, 0),
      right_(right)
{
}

void HopcroftKarp::add_edge(std::uint32_t l, std::uint32_t r)
{
    if (l >= adj_.size() || r >= right_)
        throw PreconditionError("matching edge out of range");
    adj_[l].push_back(r);
}

bool HopcroftKarp::bfs()
{
    std::queue<std::uint32_t> queue;
    bool found_free = false;
    for (std::uint32_t l = 0; l < adj_.size(); ++l) {
        if (mate_left_[l] == unmatched) {
            layer_[l] = 0;
            queue.push(l);
        }
        else
            layer_[l] = infinity;
    }
    while (!queue.empty()) {
        const auto l = queue.front();
        queue.pop();
        for (auto r : adj_[l]) {
            const auto next = mate_right_[r];
            if (next == unmatched)
                found_free = true;
            else if (layer_[next] == infinity) {
                layer_[next] = layer_[l] + 1;
                queue.push(next);
            }
        }
    }
    return found_free;
}

bool HopcroftKarp::dfs(std::uint32_t l)
{
    for (auto & i = cursor_[l]; i < adj_[l].size(); ++i) {
        const auto r = adj_[l][i];
        const auto next = mate_right_[r];
        if (next == unmatched || (layer_[next] == layer_[l] + 1 && dfs(next))) {
            mate_left_[l] = r;
            mate_right_[r] = l;
            ++i;
            return true;
        }
    }
    layer_[l] = infinity;
    return false;
}

std::size_t HopcroftKarp::solve()
{
    std::size_t size = static_cast<std::size_t>(
        std::count_if(mate_left_.begin(), mate_left_.end(), [](auto m) { return m != unmatched; }));
    while (bfs()) {
        std::fill(cursor_.begin(), cursor_.end(), 0);
        for (std::uint32_t l = 0; l < adj_.size(); ++l)
            if (mate_left_[l] == unmatched && dfs(l))
                ++size;
    }
    return size;
}

std::vector<std::uint32_t> HopcroftKarp::hall_violator() const
{
    std::vector<char> seen_left(adj_.size(), 0), seen_right(right_, 0);
    std::queue<std::uint32_t> queue;
    for (std::uint32_t l = 0; l < adj_.size(); ++l)
        if (mate_left_[l] == unmatched) {
            seen_left[l] = 1;
            queue.push(l);
        }
    while (!queue.empty()) {
        const auto l = queue.front();
        queue.pop();
        for (auto r : adj_[l]) {
            if (seen_right[r])
                continue;
            seen_right[r] = 1;
            const auto next = mate_right_[r];
            if (next != unmatched && !seen_left[next]) {
                seen_left[next] = 1;
                queue.push(next);
            }
        }
    }
    std::vector<std::uint32_t> out;
    for (std::uint32_t l = 0; l < adj_.size(); ++l)
        if (seen_left[l])
            out.push_back(l);
    return out;
}

std::vector<std::uint32_t> HopcroftKarp::neighbourhood(const std::vector<std::uint32_t> & left_set) const
{
    std::vector<char> seen(right_, 0);
    for (auto l : left_set)
        for (auto r : adj_.at(l))
            seen[r] = 1;
    std::vector<std::uint32_t> out;
    for (std::uint32_t r = 0; r < right_; ++r)
        if (seen[r])
            out.push_back(r);
    return out;
}

} // namespace bipemb
