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


#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tlmsim/errors.hpp"

namespace tlmsim {

enum class NodeKind : std::uint8_t { Gmn, Lc };

/// Address of a management node. A processing element is reached through the
/// local controller with the same index.
struct NodeAddress {
  NodeKind kind = NodeKind::Gmn;
  std::uint32_t index = 0;

  static constexpr NodeAddress gmn(std::uint32_t i) { return {NodeKind::Gmn, i}; }
  static constexpr NodeAddress lc(std::uint32_t i) { return {NodeKind::Lc, i}; }

  bool is_gmn() const noexcept { return kind == NodeKind::Gmn; }
  bool is_lc() const noexcept { return kind == NodeKind::Lc; }

  auto operator<=>(const NodeAddress&) const = default;
};

std::string to_string(NodeAddress a);

/// Chip shape: m processing elements split evenly over k clusters.
struct Topology {
  std::uint32_t m = 256;
  std::uint32_t k = 1;

  std::uint32_t num_nodes() const noexcept { return m + k; }
  std::uint32_t pes_per_cluster() const noexcept { return m / k; }
  std::uint32_t cluster_of_lc(std::uint32_t lc) const noexcept { return lc / pes_per_cluster(); }
  std::uint32_t first_lc(std::uint32_t gmn) const noexcept { return gmn * pes_per_cluster(); }

  /// GMNs take flat ids [0, k), LCs take [k, k + m).
  std::uint32_t flat_id(NodeAddress a) const;
  NodeAddress address(std::uint32_t flat) const;
  bool contains(NodeAddress a) const noexcept;
  /// Throws ConfigError unless 1 <= k <= m and k divides m.
  void validate() const;
};

enum class MessageType : std::uint8_t {
  RcsvSpwn = 0,
  RcsvExit,
  JoinInit,
  JoinFree,
  JoinWait,
  JoinExit,
  TaskStart,
  StatusBeacon,
  SyscallReply,
};

inline constexpr std::size_t kMessageTypeCount = 9;
inline constexpr std::size_t kMaxDataWords = 3;
inline constexpr std::uint8_t kMaxPrio = 15;
inline constexpr std::uint8_t kStimulusPrio = kMaxPrio;

std::string_view to_string(MessageType t);
/// Fixed number of 32-bit data words carried by each type.
std::size_t schema_words(MessageType t);

/// One management packet: header fields plus schema-sized data words.
struct Message {
  MessageType type = MessageType::SyscallReply;
  NodeAddress src;
  NodeAddress dst;
  std::uint8_t prio = 0;
  bool broadcast = false;
  std::array<std::uint32_t, kMaxDataWords> data{};

  std::span<const std::uint32_t> payload() const { return {data.data(), schema_words(type)}; }
  std::uint32_t word(std::size_t i) const { return data.at(i); }

  bool operator==(const Message&) const = default;
};

/// Validating constructor. Throws SchemaError on a data length that does not
/// match the type, on prio > 15, or on a broadcast flag for a type that cannot
/// be broadcast.
Message make_message(MessageType type, NodeAddress src, NodeAddress dst, std::uint8_t prio,
                     bool broadcast, std::span<const std::uint32_t> data);

/// Bits used for one address field: ceil(log2(num_nodes)).
unsigned address_bits(std::uint32_t num_nodes);
/// type(8) + src + dst + prio(4) + flag(1), padded to a multiple of 32.
unsigned header_bit_width(std::uint32_t num_nodes);
std::size_t message_word_count(const Message& msg, std::uint32_t num_nodes);

std::vector<std::uint32_t> encode(const Message& msg, const Topology& topo);
/// Inverse of encode(). Throws SchemaError on a truncated or invalid word stream.
Message decode(std::span<const std::uint32_t> words, const Topology& topo);

/// A status beacon carries the sender's mapped-task total in the low half and
/// its live helper count in the high half of the single data word.
std::uint32_t pack_beacon(std::uint32_t total, std::uint32_t helpers);
struct BeaconValue {
  std::uint32_t total;
  std::uint32_t helpers;
};
BeaconValue unpack_beacon(std::uint32_t word);

/// Reply value that tells a local controller to save its task's context and
/// release the PE (join-wait on a barrier that is still open).
inline constexpr std::uint32_t kReplySuspend = 0xFFFFFFFFu;

}  // namespace tlmsim
