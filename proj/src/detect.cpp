#include "sockpuppet/detect.hpp"

#include <algorithm>
#include <numeric>
#include <tuple>
#include <unordered_map>

namespace sockpuppet {

namespace {

class DisjointSet {
 public:
  explicit DisjointSet(std::size_t n) : parent_(n), rank_(n, 0) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  void unite(std::size_t x, std::size_t y) {
    x = find(x);
    y = find(y);
    if (x == y) return;
    if (rank_[x] < rank_[y]) std::swap(x, y);
    parent_[y] = x;
    if (rank_[x] == rank_[y]) ++rank_[x];
  }

 private:
  std::vector<std::size_t> parent_;
  std::vector<unsigned> rank_;
};

std::vector<UserId> users_in(std::span<const CandidatePair> pairs) {
  std::vector<UserId> users;
  users.reserve(pairs.size() * 2);
  for (const auto& p : pairs) {
    users.push_back(p.a);
    users.push_back(p.b);
  }
  std::sort(users.begin(), users.end());
  users.erase(std::unique(users.begin(), users.end()), users.end());
  return users;
}

std::size_t position(const std::vector<UserId>& users, const UserId& u) {
  return static_cast<std::size_t>(std::lower_bound(users.begin(), users.end(), u) - users.begin());
}

bool neighbor_order(const Neighbor& x, const Neighbor& y) {
  return std::tie(x.distance, x.user) < std::tie(y.distance, y.user);
}

std::map<UserId, std::vector<Neighbor>> adjacency(std::span<const CandidatePair> pairs) {
  std::map<UserId, std::vector<Neighbor>> adj;
  for (const auto& p : pairs) {
    adj[p.a].push_back({p.b, p.distance});
    adj[p.b].push_back({p.a, p.distance});
  }
  for (auto& [_, list] : adj) {
    std::sort(list.begin(), list.end(), neighbor_order);
    list.erase(std::unique(list.begin(), list.end()), list.end());
  }
  return adj;
}

}  // namespace

std::vector<MatchCluster> cluster(std::span<const CandidatePair> pairs) {
  const auto users = users_in(pairs);
  DisjointSet sets(users.size());
  for (const auto& p : pairs) sets.unite(position(users, p.a), position(users, p.b));

  std::unordered_map<std::size_t, std::size_t> cluster_of_root;
  std::vector<MatchCluster> clusters;
  for (std::size_t i = 0; i < users.size(); ++i) {
    auto [it, inserted] = cluster_of_root.emplace(sets.find(i), clusters.size());
    if (inserted) clusters.emplace_back();
    clusters[it->second].members.push_back(users[i]);
  }
  for (const auto& p : pairs) {
    clusters[cluster_of_root.at(sets.find(position(users, p.a)))].witness_pairs.push_back(p);
  }
  for (auto& c : clusters) {
    std::sort(c.witness_pairs.begin(), c.witness_pairs.end());
    c.witness_pairs.erase(std::unique(c.witness_pairs.begin(), c.witness_pairs.end()),
                          c.witness_pairs.end());
  }
  // Members were appended in sorted order, so members.front() is the smallest id.
  std::sort(clusters.begin(), clusters.end(), [](const MatchCluster& x, const MatchCluster& y) {
    if (x.members.size() != y.members.size()) return x.members.size() > y.members.size();
    return x.members.front() < y.members.front();
  });
  return clusters;
}

std::vector<MutualMatch> mutual_matches(std::span<const CandidatePair> pairs) {
  const auto adj = adjacency(pairs);
  std::vector<MutualMatch> result;
  for (const auto& [user, list] : adj) {
    const auto& nearest = list.front();
    if (!(user < nearest.user)) continue;  // list each unordered pair once
    const auto& back = adj.at(nearest.user).front();
    if (back.user == user) {
      result.push_back({user, nearest.user, nearest.distance, nearest.distance == 0});
    }
  }
  std::sort(result.begin(), result.end(), [](const MutualMatch& x, const MutualMatch& y) {
    return std::tie(x.distance, x.a, x.b) < std::tie(y.distance, y.a, y.b);
  });
  return result;
}

std::map<UserId, std::vector<Neighbor>> one_to_many(std::span<const CandidatePair> pairs) {
  auto adj = adjacency(pairs);
  std::erase_if(adj, [](const auto& entry) { return entry.second.size() < 2; });
  return adj;
}

MatchReport build_report(std::span<const CandidatePair> pairs) {
  return MatchReport{cluster(pairs), mutual_matches(pairs), one_to_many(pairs)};
}

nlohmann::ordered_json report_to_json(const MatchReport& report,
                                      const nlohmann::ordered_json& config) {
  using nlohmann::ordered_json;
  ordered_json doc;
  doc["config"] = config;
  doc["clusters"] = ordered_json::array();
  for (const auto& c : report.clusters) doc["clusters"].push_back(c.members);
  doc["mutual"] = ordered_json::array();
  for (const auto& m : report.mutual) {
    doc["mutual"].push_back(
        ordered_json{{"a", m.a}, {"b", m.b}, {"distance", m.distance}, {"exact", m.exact}});
  }
  doc["one_to_many"] = ordered_json::object();
  for (const auto& [user, list] : report.one_to_many) {
    auto& entries = doc["one_to_many"][user] = ordered_json::array();
    for (const auto& n : list) entries.push_back(ordered_json{{"id", n.user}, {"distance", n.distance}});
  }
  return doc;
}

}  // namespace sockpuppet
