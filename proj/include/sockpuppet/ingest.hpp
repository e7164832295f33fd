#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace sockpuppet {

/// Opaque account identifier. Numeric ids are carried as decimal strings;
/// ordering is byte-wise (std::string comparison).
using UserId = std::string;
using MessageId = std::int64_t;

struct MessageRecord {
  MessageId message_id = 0;
  UserId sender;
  std::optional<MessageId> reply_to;

  bool operator==(const MessageRecord&) const = default;
};

/// Directed weighted reply graph: edge (u, v) with weight w means u replied
/// w times to messages authored by v. No self-loops, no zero weights.
class InteractionGraph {
 public:
  using Edge = std::pair<UserId, UserId>;

  void add_node(const UserId& user);
  /// Adds `weight` to edge (source, target), creating both nodes if needed.
  /// Throws InputError on a self-loop, zero weight or empty id.
  void add_edge(const UserId& source, const UserId& target, std::uint64_t weight);

  const std::set<UserId>& nodes() const { return nodes_; }
  const std::map<Edge, std::uint64_t>& edges() const { return edges_; }
  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  std::uint64_t total_weight() const;

  bool operator==(const InteractionGraph&) const = default;

 private:
  std::set<UserId> nodes_;
  std::map<Edge, std::uint64_t> edges_;
};

/// Reads canonical JSONL (one message object per line). Blank lines are
/// skipped; errors carry the 1-based line number.
std::vector<MessageRecord> parse_messages(std::istream& in);

/// Writes records as canonical JSONL, the inverse of parse_messages.
void write_messages(std::ostream& out, std::span<const MessageRecord> messages);

/// Converts a desktop chat-export JSON document (a `messages` array whose
/// entries carry `id`, `from_id` and optionally `reply_to_message_id`).
/// Service messages and entries without a sender are skipped.
std::vector<MessageRecord> convert_telegram_export(std::string_view document);

InteractionGraph build_interaction_graph(std::span<const MessageRecord> messages);

/// source<TAB>target<TAB>weight, one edge per line, sorted by (source, target).
void write_edge_tsv(std::ostream& out, const InteractionGraph& graph);
/// Inverse of write_edge_tsv. Lines starting with '#' and blank lines are ignored.
InteractionGraph read_edge_tsv(std::istream& in);

}  // namespace sockpuppet
