#include "sockpuppet/ingest.hpp"

#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "sockpuppet/error.hpp"

namespace sockpuppet {

using nlohmann::json;

void InteractionGraph::add_node(const UserId& user) {
  if (user.empty()) throw InputError("empty user id");
  nodes_.insert(user);
}

void InteractionGraph::add_edge(const UserId& source, const UserId& target,
                                std::uint64_t weight) {
  if (source == target) throw InputError("self-loop edge on user " + source);
  if (weight == 0) throw InputError("zero-weight edge " + source + " -> " + target);
  add_node(source);
  add_node(target);
  edges_[{source, target}] += weight;
}

std::uint64_t InteractionGraph::total_weight() const {
  return std::accumulate(edges_.begin(), edges_.end(), std::uint64_t{0},
                         [](std::uint64_t acc, const auto& e) { return acc + e.second; });
}

namespace {

bool is_blank(std::string_view line) {
  return line.find_first_not_of(" \t\r\n") == std::string_view::npos;
}

// Accepts a JSON string or integer and returns the decimal/string form.
std::optional<UserId> user_id_from(const json& value) {
  if (value.is_string()) {
    auto id = value.get<std::string>();
    if (id.empty()) return std::nullopt;
    return id;
  }
  if (value.is_number_unsigned()) return std::to_string(value.get<std::uint64_t>());
  if (value.is_number_integer()) return std::to_string(value.get<std::int64_t>());
  return std::nullopt;
}

std::string at_line(std::size_t line) { return " at line " + std::to_string(line); }

}  // namespace

std::vector<MessageRecord> parse_messages(std::istream& in) {
  std::vector<MessageRecord> records;
  std::unordered_map<MessageId, std::size_t> first_line;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank(line)) continue;

    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      throw InputError("malformed JSON" + at_line(line_no) + ": " + e.what());
    }
    if (!obj.is_object()) throw InputError("expected a JSON object" + at_line(line_no));

    auto id_it = obj.find("message_id");
    if (id_it == obj.end() || id_it->is_null()) {
      throw InputError("missing message_id" + at_line(line_no));
    }
    if (!id_it->is_number_integer()) {
      throw InputError("message_id is not an integer" + at_line(line_no));
    }
    auto sender_it = obj.find("sender");
    if (sender_it == obj.end() || sender_it->is_null()) {
      throw InputError("missing sender" + at_line(line_no));
    }
    auto sender = user_id_from(*sender_it);
    if (!sender) throw InputError("sender must be a non-empty string" + at_line(line_no));

    MessageRecord rec;
    rec.message_id = id_it->get<MessageId>();
    rec.sender = std::move(*sender);
    if (auto r = obj.find("reply_to"); r != obj.end() && !r->is_null()) {
      if (!r->is_number_integer()) {
        throw InputError("reply_to is not an integer" + at_line(line_no));
      }
      rec.reply_to = r->get<MessageId>();
    }

    auto [it, inserted] = first_line.emplace(rec.message_id, line_no);
    if (!inserted) {
      throw InputError("duplicate message_id " + std::to_string(rec.message_id) +
                       " at lines " + std::to_string(it->second) + " and " +
                       std::to_string(line_no));
    }
    records.push_back(std::move(rec));
  }
  return records;
}

void write_messages(std::ostream& out, std::span<const MessageRecord> messages) {
  for (const auto& m : messages) {
    json obj;
    obj["message_id"] = m.message_id;
    obj["sender"] = m.sender;
    if (m.reply_to) obj["reply_to"] = *m.reply_to;
    out << obj.dump() << '\n';
  }
}

std::vector<MessageRecord> convert_telegram_export(std::string_view document) {
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("export is not valid JSON: ") + e.what());
  }

  // Single-chat exports carry `messages` at the top level; full-account
  // exports nest chats under chats.list[].
  std::vector<const json*> message_arrays;
  if (doc.is_object() && doc.contains("messages") && doc["messages"].is_array()) {
    message_arrays.push_back(&doc["messages"]);
  } else if (doc.is_object() && doc.contains("chats") && doc["chats"].is_object() &&
             doc["chats"].contains("list") && doc["chats"]["list"].is_array()) {
    for (const auto& chat : doc["chats"]["list"]) {
      if (chat.is_object() && chat.contains("messages") && chat["messages"].is_array()) {
        message_arrays.push_back(&chat["messages"]);
      }
    }
  } else {
    throw InputError("export has no messages array");
  }

  std::vector<MessageRecord> records;
  std::unordered_map<MessageId, std::size_t> seen;
  std::size_t index = 0;
  for (const json* messages : message_arrays) {
    for (const auto& msg : *messages) {
      ++index;
      if (!msg.is_object()) throw InputError("message entry " + std::to_string(index) + " is not an object");
      if (msg.value("type", std::string("message")) == "service") continue;
      auto from = msg.find("from_id");
      if (from == msg.end() || from->is_null()) continue;
      auto sender = user_id_from(*from);
      if (!sender) continue;

      auto id = msg.find("id");
      if (id == msg.end() || !id->is_number_integer()) {
        throw InputError("message entry " + std::to_string(index) + " has no integer id");
      }
      MessageRecord rec;
      rec.message_id = id->get<MessageId>();
      rec.sender = std::move(*sender);
      if (auto r = msg.find("reply_to_message_id"); r != msg.end() && r->is_number_integer()) {
        rec.reply_to = r->get<MessageId>();
      }
      if (!seen.emplace(rec.message_id, index).second) {
        throw InputError("duplicate message id " + std::to_string(rec.message_id) + " in export");
      }
      records.push_back(std::move(rec));
    }
  }
  if (records.empty()) throw InputError("empty export");
  return records;
}

InteractionGraph build_interaction_graph(std::span<const MessageRecord> messages) {
  std::unordered_map<MessageId, const UserId*> author;
  author.reserve(messages.size());
  for (const auto& m : messages) author.emplace(m.message_id, &m.sender);

  InteractionGraph graph;
  for (const auto& m : messages) {
    graph.add_node(m.sender);
    if (!m.reply_to) continue;
    auto parent = author.find(*m.reply_to);
    if (parent == author.end()) continue;
    if (*parent->second == m.sender) continue;
    graph.add_edge(m.sender, *parent->second, 1);
  }
  return graph;
}

void write_edge_tsv(std::ostream& out, const InteractionGraph& graph) {
  for (const auto& [edge, weight] : graph.edges()) {
    out << edge.first << '\t' << edge.second << '\t' << weight << '\n';
  }
}

InteractionGraph read_edge_tsv(std::istream& in) {
  InteractionGraph graph;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (is_blank(line) || line.front() == '#') continue;
    auto t1 = line.find('\t');
    auto t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
    if (t2 == std::string::npos || line.find('\t', t2 + 1) != std::string::npos) {
      throw InputError("expected source<TAB>target<TAB>weight" + at_line(line_no));
    }
    std::string source = line.substr(0, t1);
    std::string target = line.substr(t1 + 1, t2 - t1 - 1);
    std::string weight_text = line.substr(t2 + 1);
    std::uint64_t weight = 0;
    std::size_t consumed = 0;
    try {
      weight = std::stoull(weight_text, &consumed);
    } catch (const std::exception&) {
      consumed = 0;
    }
    if (consumed == 0 || consumed != weight_text.size() || weight_text.front() == '-') {
      throw InputError("invalid edge weight '" + weight_text + "'" + at_line(line_no));
    }
    if (source.empty() || target.empty()) throw InputError("empty user id" + at_line(line_no));
    try {
      graph.add_edge(source, target, weight);
    } catch (const InputError& e) {
      throw InputError(std::string(e.what()) + at_line(line_no));
    }
  }
  return graph;
}

}  // namespace sockpuppet
