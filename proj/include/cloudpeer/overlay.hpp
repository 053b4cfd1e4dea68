#pragma once

#include "cloudpeer/ids.hpp"
#include "cloudpeer/message.hpp"

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cloudpeer::overlay {

struct OverlayConfig {
    int id_bits = 160;
    int bits_per_digit = 4;
    // Total leaf set size; half of it on each side of the owner.
    int leaf_set_size = 8;
    int message_buffer_cap = 1000;

    // Throws InvalidArgument unless all fields are positive, id_bits <= 160,
    // id_bits is a multiple of bits_per_digit and leaf_set_size is even.
    void validate() const;

    int rows() const { return id_bits / bits_per_digit; }
    int columns() const { return 1 << bits_per_digit; }
    int half_leaf() const { return leaf_set_size / 2; }
};

// SHA-1 of `name`, keeping the top id_bits bits. Throws InvalidArgument on empty input.
NodeId derive_id(std::string_view name, const OverlayConfig& cfg);
OverlayKey derive_key(std::string_view name, const OverlayConfig& cfg);

// Brute-force owner: minimum circular distance, exact ties to the numerically smaller id.
NodeId owner_oracle(std::span<const NodeId> live_ids, const OverlayKey& key, int id_bits);

// True when `a` is a strictly better owner candidate for `key` than `b`.
bool closer_to(const NodeId& a, const NodeId& b, const OverlayKey& key, int id_bits);

/// Pastry routing state of a single peer.
///
/// `table` is row-major, rows() x columns(). The entry at (r, c) shares exactly
/// r leading digits with the owner and has digit c at position r. `left` and
/// `right` hold the nearest peers counter-clockwise and clockwise, nearest first.
struct RoutingState {
    NodeId self;
    std::vector<std::optional<NodeId>> table;
    std::vector<NodeId> left;
    std::vector<NodeId> right;
    std::vector<NodeId> neighborhood;

    const std::optional<NodeId>& entry(int row, int col, int columns) const
    {
        return table[static_cast<std::size_t>(row * columns + col)];
    }

    // Every distinct peer this state references, in a deterministic order.
    std::vector<NodeId> known() const;

    friend bool operator==(const RoutingState&, const RoutingState&) = default;
};

struct RouteResult {
    NodeId owner;
    // Peers the message was forwarded to, excluding the source; ends with the owner.
    std::vector<NodeId> hops;
    // The last hop was a leaf-set delivery to the numerically closest peer.
    bool last_hop_via_leaf_set = false;
    // Forward attempts that hit a dead peer and triggered repair.
    int failed_attempts = 0;
    double arrival_time = 0.0;
};

struct JoinReport {
    std::size_t messages = 0;
    double completion_time = 0.0;
};

struct LeaveReport {
    bool known = false;
    std::size_t messages = 0;
};

/// Pastry-style overlay over a shared in-process view of peers.
///
/// Each peer only acts on its own RoutingState. The global map doubles as the
/// network: sending to a peer that is no longer live fails, which is how
/// stale entries are detected and lazily repaired.
class Overlay {
public:
    explicit Overlay(OverlayConfig cfg, MessageSink* sink = nullptr);

    const OverlayConfig& config() const { return cfg_; }

    // Joins `joiner` through `bootstrap`. The first peer needs no bootstrap.
    // Throws DuplicateId if joiner is live, JoinFailure if bootstrap is missing or dead.
    JoinReport join(std::optional<NodeId> bootstrap, const NodeId& joiner, double now = 0.0);

    // Routes from src towards key. Throws RoutingError if src is not live and
    // RoutingFailure if no progress can be made.
    RouteResult route(const NodeId& src, const OverlayKey& key, double now = 0.0,
                      MessageCategory category = MessageCategory::query_routing);

    // Removes a peer. Graceful departures notify the leaf set; failures are silent.
    // Unknown or already dead peers are a no-op that records a warning.
    LeaveReport leave_or_fail(const NodeId& node, bool graceful, double now = 0.0);

    bool is_live(const NodeId& id) const;
    bool empty() const { return live_count_ == 0; }
    std::size_t size() const { return live_count_; }
    std::vector<NodeId> live_nodes() const;
    const RoutingState& state(const NodeId& id) const;

    // Whether `node`, from its own leaf set, considers itself the owner of key.
    bool believes_owner(const NodeId& node, const OverlayKey& key) const;

    // Row/column prefix-property violations over all live peers; empty when sound.
    std::vector<std::string> audit() const;

    const std::vector<std::string>& warnings() const { return warnings_; }
    std::size_t messages_sent() const { return messages_sent_; }

    void set_proximity(std::function<double(const NodeId&, const NodeId&)> proximity)
    {
        proximity_ = std::move(proximity);
    }

private:
    struct Peer {
        RoutingState state;
        bool live = true;
    };

    double send(const NodeId& src, const NodeId& dst, MessageCategory category, double t);
    RoutingState fresh_state(const NodeId& self) const;
    std::optional<NodeId> next_hop(const RoutingState& s, const OverlayKey& key, bool& via_leaf) const;
    bool in_leaf_range(const RoutingState& s, const OverlayKey& key) const;
    void consider(RoutingState& s, const NodeId& candidate) const;
    void rebuild_leaves(RoutingState& s, std::vector<NodeId> candidates) const;
    void rebuild_neighborhood(RoutingState& s, std::vector<NodeId> candidates) const;
    double forget(const NodeId& at, const NodeId& dead, double t, MessageCategory category);

    OverlayConfig cfg_;
    MessageSink* sink_;
    std::map<NodeId, Peer> peers_;
    std::size_t live_count_ = 0;
    std::size_t messages_sent_ = 0;
    std::vector<std::string> warnings_;
    std::function<double(const NodeId&, const NodeId&)> proximity_;
};

} // namespace cloudpeer::overlay
