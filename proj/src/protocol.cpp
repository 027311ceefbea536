/* Copyright 2026 The tlmsim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */


#include "tlmsim/protocol.hpp"

#include <bit>

namespace tlmsim {

namespace {

constexpr unsigned kTypeBits = 8;
constexpr unsigned kPrioBits = 4;
constexpr unsigned kFlagBits = 1;

class BitWriter {
 public:
  explicit BitWriter(std::vector<std::uint32_t>& out) : out_(out) {}

  void put(std::uint64_t value, unsigned bits) {
    for (unsigned i = 0; i < bits; ++i, ++pos_) {
      if (pos_ % 32 == 0) out_.push_back(0);
      if ((value >> i) & 1u) out_.back() |= 1u << (pos_ % 32);
    }
  }

  void pad_to(unsigned total_bits) {
    while (pos_ < total_bits) put(0, 1);
  }

 private:
  std::vector<std::uint32_t>& out_;
  unsigned pos_ = 0;
};

class BitReader {
 public:
  explicit BitReader(std::span<const std::uint32_t> in) : in_(in) {}

  std::uint64_t get(unsigned bits) {
    std::uint64_t v = 0;
    for (unsigned i = 0; i < bits; ++i, ++pos_) {
      const std::size_t w = pos_ / 32;
      if (w >= in_.size()) throw SchemaError("truncated message header");
      if ((in_[w] >> (pos_ % 32)) & 1u) v |= std::uint64_t{1} << i;
    }
    return v;
  }

 private:
  std::span<const std::uint32_t> in_;
  unsigned pos_ = 0;
};

bool may_broadcast(MessageType t) {
  // Stimuli are injected as task-start messages.
  return t == MessageType::StatusBeacon || t == MessageType::TaskStart;
}

}  // namespace

std::string to_string(NodeAddress a) {
  return (a.is_gmn() ? "gmn" : "lc") + std::to_string(a.index);
}

std::uint32_t Topology::flat_id(NodeAddress a) const {
  if (!contains(a)) throw RoutingError("address out of range: " + to_string(a));
  return a.is_gmn() ? a.index : k + a.index;
}

NodeAddress Topology::address(std::uint32_t flat) const {
  if (flat < k) return NodeAddress::gmn(flat);
  if (flat < k + m) return NodeAddress::lc(flat - k);
  throw SchemaError("flat node id out of range: " + std::to_string(flat));
}

bool Topology::contains(NodeAddress a) const noexcept {
  return a.is_gmn() ? a.index < k : a.index < m;
}

void Topology::validate() const {
  if (m == 0 || k == 0) throw ConfigError("m and k must be positive");
  if (k > m) throw ConfigError("k must not exceed m");
  if (m % k != 0) {
    throw ConfigError("k=" + std::to_string(k) + " does not divide m=" + std::to_string(m));
  }
}

std::string_view to_string(MessageType t) {
  switch (t) {
    case MessageType::RcsvSpwn: return "rcsv-spwn";
    case MessageType::RcsvExit: return "rcsv-exit";
    case MessageType::JoinInit: return "join-init";
    case MessageType::JoinFree: return "join-free";
    case MessageType::JoinWait: return "join-wait";
    case MessageType::JoinExit: return "join-exit";
    case MessageType::TaskStart: return "task-start";
    case MessageType::StatusBeacon: return "status-beacon";
    case MessageType::SyscallReply: return "syscall-reply";
  }
  return "?";
}

std::size_t schema_words(MessageType t) {
  switch (t) {
    case MessageType::RcsvSpwn: return 3;   // imem, dmem, cnt
    case MessageType::TaskStart: return 2;  // tcb address, stack pointer
    case MessageType::RcsvExit:
    case MessageType::JoinInit:
    case MessageType::JoinFree:
    case MessageType::JoinWait:
    case MessageType::JoinExit:
    case MessageType::StatusBeacon:
    case MessageType::SyscallReply: return 1;
  }
  throw SchemaError("unknown message type");
}

Message make_message(MessageType type, NodeAddress src, NodeAddress dst, std::uint8_t prio,
                     bool broadcast, std::span<const std::uint32_t> data) {
  if (static_cast<std::size_t>(type) >= kMessageTypeCount) throw SchemaError("unknown message type");
  if (data.size() != schema_words(type)) {
    throw SchemaError(std::string(to_string(type)) + " expects " +
                      std::to_string(schema_words(type)) + " data words, got " +
                      std::to_string(data.size()));
  }
  if (prio > kMaxPrio) throw SchemaError("priority out of range: " + std::to_string(prio));
  if (broadcast && !may_broadcast(type)) {
    throw SchemaError(std::string(to_string(type)) + " cannot be broadcast");
  }
  Message msg;
  msg.type = type;
  msg.src = src;
  msg.dst = dst;
  msg.prio = prio;
  msg.broadcast = broadcast;
  for (std::size_t i = 0; i < data.size(); ++i) msg.data[i] = data[i];
  return msg;
}

unsigned address_bits(std::uint32_t num_nodes) {
  if (num_nodes <= 1) return 0;
  return static_cast<unsigned>(std::bit_width(num_nodes - 1));
}

unsigned header_bit_width(std::uint32_t num_nodes) {
  const unsigned raw = kTypeBits + 2 * address_bits(num_nodes) + kPrioBits + kFlagBits;
  return (raw + 31) / 32 * 32;
}

std::size_t message_word_count(const Message& msg, std::uint32_t num_nodes) {
  return header_bit_width(num_nodes) / 32 + msg.payload().size();
}

std::vector<std::uint32_t> encode(const Message& msg, const Topology& topo) {
  const unsigned abits = address_bits(topo.num_nodes());
  std::vector<std::uint32_t> words;
  words.reserve(message_word_count(msg, topo.num_nodes()));
  BitWriter w(words);
  w.put(static_cast<std::uint8_t>(msg.type), kTypeBits);
  w.put(topo.flat_id(msg.src), abits);
  // Broadcasts leave dst meaningless; it is still encoded verbatim.
  w.put(topo.flat_id(msg.dst), abits);
  w.put(msg.prio, kPrioBits);
  w.put(msg.broadcast ? 1 : 0, kFlagBits);
  w.pad_to(header_bit_width(topo.num_nodes()));
  for (std::uint32_t d : msg.payload()) words.push_back(d);
  return words;
}

Message decode(std::span<const std::uint32_t> words, const Topology& topo) {
  const unsigned abits = address_bits(topo.num_nodes());
  const std::size_t header_words = header_bit_width(topo.num_nodes()) / 32;
  if (words.size() < header_words) throw SchemaError("truncated message header");
  BitReader r(words.first(header_words));
  const auto type_raw = r.get(kTypeBits);
  if (type_raw >= kMessageTypeCount) throw SchemaError("unknown message type " + std::to_string(type_raw));
  const auto type = static_cast<MessageType>(type_raw);
  const NodeAddress src = topo.address(static_cast<std::uint32_t>(r.get(abits)));
  const NodeAddress dst = topo.address(static_cast<std::uint32_t>(r.get(abits)));
  const auto prio = static_cast<std::uint8_t>(r.get(kPrioBits));
  const bool broadcast = r.get(kFlagBits) != 0;
  return make_message(type, src, dst, prio, broadcast, words.subspan(header_words));
}

std::uint32_t pack_beacon(std::uint32_t total, std::uint32_t helpers) {
  if (total > 0xFFFFu || helpers > 0xFFFFu) throw SchemaError("beacon value exceeds 16 bits");
  return (helpers << 16) | total;
}

BeaconValue unpack_beacon(std::uint32_t word) { return {word & 0xFFFFu, word >> 16}; }

}  // namespace tlmsim
