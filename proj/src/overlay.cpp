#include "cloudpeer/overlay.hpp"

#include "cloudpeer/errors.hpp"
#include "cloudpeer/sha1.hpp"

#include <algorithm>
#include <set>

namespace cloudpeer::overlay {

namespace {

class SilentSink final : public MessageSink {
public:
    double transmit(const NodeId&, const NodeId&, MessageCategory, double send_time, bool) override
    {
        return send_time;
    }
};

SilentSink silent_sink;

void push_unique(std::vector<NodeId>& out, const NodeId& id)
{
    if (std::find(out.begin(), out.end(), id) == out.end())
        out.push_back(id);
}

} // namespace

void OverlayConfig::validate() const
{
    if (id_bits <= 0 || bits_per_digit <= 0 || leaf_set_size <= 0 || message_buffer_cap <= 0)
        throw InvalidArgument("overlay config values must be positive");
    if (id_bits > U160::kBits)
        throw InvalidArgument("id_bits must be at most 160");
    if (bits_per_digit > 8)
        throw InvalidArgument("bits_per_digit must be at most 8");
    if (id_bits % bits_per_digit != 0)
        throw InvalidArgument("id_bits must be divisible by bits_per_digit");
    if (leaf_set_size % 2 != 0)
        throw InvalidArgument("leaf_set_size must be even");
}

NodeId derive_id(std::string_view name, const OverlayConfig& cfg)
{
    if (name.empty())
        throw InvalidArgument("cannot derive an identifier from an empty name");
    const U160 digest = U160::from_bytes(sha1(name));
    return NodeId{digest.shifted_right(U160::kBits - cfg.id_bits)};
}

OverlayKey derive_key(std::string_view name, const OverlayConfig& cfg)
{
    return key_of(derive_id(name, cfg));
}

bool closer_to(const NodeId& a, const NodeId& b, const OverlayKey& key, int id_bits)
{
    const U160 da = circular_distance(a.value, key.value, id_bits);
    const U160 db = circular_distance(b.value, key.value, id_bits);
    if (da != db)
        return da < db;
    return a < b;
}

NodeId owner_oracle(std::span<const NodeId> live_ids, const OverlayKey& key, int id_bits)
{
    if (live_ids.empty())
        throw InvalidArgument("owner_oracle needs at least one live id");
    NodeId best = live_ids.front();
    for (const auto& id : live_ids.subspan(1))
        if (closer_to(id, best, key, id_bits))
            best = id;
    return best;
}

std::vector<NodeId> RoutingState::known() const
{
    std::vector<NodeId> out;
    for (const auto& id : left)
        push_unique(out, id);
    for (const auto& id : right)
        push_unique(out, id);
    for (const auto& e : table)
        if (e)
            push_unique(out, *e);
    for (const auto& id : neighborhood)
        push_unique(out, id);
    return out;
}

Overlay::Overlay(OverlayConfig cfg, MessageSink* sink) : cfg_(cfg), sink_(sink ? sink : &silent_sink)
{
    cfg_.validate();
}

double Overlay::send(const NodeId& src, const NodeId& dst, MessageCategory category, double t)
{
    ++messages_sent_;
    return sink_->transmit(src, dst, category, t, is_live(dst));
}

bool Overlay::is_live(const NodeId& id) const
{
    auto it = peers_.find(id);
    return it != peers_.end() && it->second.live;
}

std::vector<NodeId> Overlay::live_nodes() const
{
    std::vector<NodeId> out;
    out.reserve(live_count_);
    for (const auto& [id, peer] : peers_)
        if (peer.live)
            out.push_back(id);
    return out;
}

const RoutingState& Overlay::state(const NodeId& id) const
{
    auto it = peers_.find(id);
    if (it == peers_.end())
        throw InvalidArgument("unknown peer " + id.value.hex(cfg_.id_bits));
    return it->second.state;
}

RoutingState Overlay::fresh_state(const NodeId& self) const
{
    RoutingState s;
    s.self = self;
    s.table.assign(static_cast<std::size_t>(cfg_.rows() * cfg_.columns()), std::nullopt);
    return s;
}

void Overlay::rebuild_leaves(RoutingState& s, std::vector<NodeId> candidates) const
{
    std::erase(candidates, s.self);
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

    const auto half = static_cast<std::size_t>(cfg_.half_leaf());
    const int bits = cfg_.id_bits;

    auto by_cw = candidates;
    std::sort(by_cw.begin(), by_cw.end(), [&](const NodeId& a, const NodeId& b) {
        return clockwise_distance(s.self.value, a.value, bits) < clockwise_distance(s.self.value, b.value, bits);
    });
    by_cw.resize(std::min(half, by_cw.size()));

    auto by_ccw = std::move(candidates);
    std::sort(by_ccw.begin(), by_ccw.end(), [&](const NodeId& a, const NodeId& b) {
        return clockwise_distance(a.value, s.self.value, bits) < clockwise_distance(b.value, s.self.value, bits);
    });
    by_ccw.resize(std::min(half, by_ccw.size()));

    s.right = std::move(by_cw);
    s.left = std::move(by_ccw);
}

void Overlay::rebuild_neighborhood(RoutingState& s, std::vector<NodeId> candidates) const
{
    std::erase(candidates, s.self);
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
    auto proximity = [&](const NodeId& n) { return proximity_ ? proximity_(s.self, n) : 0.0; };
    std::stable_sort(candidates.begin(), candidates.end(),
                     [&](const NodeId& a, const NodeId& b) { return proximity(a) < proximity(b); });
    candidates.resize(std::min(candidates.size(), static_cast<std::size_t>(cfg_.leaf_set_size)));
    s.neighborhood = std::move(candidates);
}

void Overlay::consider(RoutingState& s, const NodeId& candidate) const
{
    if (candidate == s.self)
        return;
    const int row = shared_prefix_length(s.self.value, candidate.value, cfg_.id_bits, cfg_.bits_per_digit);
    if (row < cfg_.rows()) {
        const int col = static_cast<int>(digit_at(candidate.value, cfg_.id_bits, cfg_.bits_per_digit, row));
        auto& slot = s.table[static_cast<std::size_t>(row * cfg_.columns() + col)];
        if (!slot)
            slot = candidate;
    }
    std::vector<NodeId> leaves = s.left;
    leaves.insert(leaves.end(), s.right.begin(), s.right.end());
    leaves.push_back(candidate);
    rebuild_leaves(s, std::move(leaves));
}

bool Overlay::in_leaf_range(const RoutingState& s, const OverlayKey& key) const
{
    const auto half = static_cast<std::size_t>(cfg_.half_leaf());
    // A short side means the walk around the ring ran out of peers: everything is known.
    if (s.left.size() < half || s.right.size() < half)
        return true;
    const int bits = cfg_.id_bits;
    const U160 ccw_span = clockwise_distance(s.left.back().value, s.self.value, bits);
    const U160 cw_span = clockwise_distance(s.self.value, s.right.back().value, bits);
    const U160 total = ccw_span + cw_span;
    const bool wraps = bits == U160::kBits ? total < ccw_span : total >= U160::pow2(bits);
    if (wraps)
        return true;
    return clockwise_distance(s.self.value, key.value, bits) <= cw_span ||
           clockwise_distance(key.value, s.self.value, bits) <= ccw_span;
}

std::optional<NodeId> Overlay::next_hop(const RoutingState& s, const OverlayKey& key, bool& via_leaf) const
{
    const int bits = cfg_.id_bits;
    if (s.self.value == key.value)
        return std::nullopt;

    if (in_leaf_range(s, key)) {
        NodeId best = s.self;
        for (const auto* side : {&s.left, &s.right})
            for (const auto& id : *side)
                if (closer_to(id, best, key, bits))
                    best = id;
        via_leaf = true;
        if (best == s.self)
            return std::nullopt;
        return best;
    }

    const int prefix = shared_prefix_length(s.self.value, key.value, bits, cfg_.bits_per_digit);
    const int col = static_cast<int>(digit_at(key.value, bits, cfg_.bits_per_digit, prefix));
    via_leaf = false;
    if (const auto& e = s.entry(prefix, col, cfg_.columns()))
        return *e;

    // Rare case: any known peer with at least as long a prefix that is numerically closer.
    const U160 own = circular_distance(s.self.value, key.value, bits);
    std::optional<NodeId> best;
    int best_prefix = -1;
    for (const auto& id : s.known()) {
        const int p = shared_prefix_length(id.value, key.value, bits, cfg_.bits_per_digit);
        if (p < prefix || !(circular_distance(id.value, key.value, bits) < own))
            continue;
        if (!best || p > best_prefix || (p == best_prefix && closer_to(id, *best, key, bits))) {
            best = id;
            best_prefix = p;
        }
    }
    return best;
}

double Overlay::forget(const NodeId& at, const NodeId& dead, double t, MessageCategory category)
{
    RoutingState& s = peers_.at(at).state;
    for (auto& e : s.table)
        if (e && *e == dead)
            e.reset();
    std::erase(s.neighborhood, dead);

    const bool in_left = std::find(s.left.begin(), s.left.end(), dead) != s.left.end();
    const bool in_right = std::find(s.right.begin(), s.right.end(), dead) != s.right.end();
    if (!in_left && !in_right)
        return t;

    std::erase(s.left, dead);
    std::erase(s.right, dead);
    std::vector<NodeId> candidates = s.left;
    candidates.insert(candidates.end(), s.right.begin(), s.right.end());

    // Ask the farthest responsive member on each damaged side for its leaf set.
    for (const auto* side : {in_left ? &s.left : nullptr, in_right ? &s.right : nullptr}) {
        if (!side)
            continue;
        const auto members = *side;
        for (auto it = members.rbegin(); it != members.rend(); ++it) {
            const double arrive = send(at, *it, category, t);
            if (!is_live(*it)) {
                t = arrive;
                std::erase(candidates, *it);
                continue;
            }
            t = send(*it, at, category, arrive);
            const RoutingState& remote = peers_.at(*it).state;
            candidates.insert(candidates.end(), remote.left.begin(), remote.left.end());
            candidates.insert(candidates.end(), remote.right.begin(), remote.right.end());
            candidates.push_back(*it);
            break;
        }
    }
    std::erase(candidates, dead);
    rebuild_leaves(s, std::move(candidates));
    return t;
}

RouteResult Overlay::route(const NodeId& src, const OverlayKey& key, double now, MessageCategory category)
{
    if (!is_live(src))
        throw RoutingError("route source " + src.value.hex(cfg_.id_bits) + " is not live");

    RouteResult result;
    NodeId cur = src;
    double t = now;
    const int budget = 4 * (cfg_.rows() + cfg_.leaf_set_size) + 16;
    for (int step = 0;; ++step) {
        if (step > budget)
            throw RoutingFailure("routing made no progress towards " + key.value.hex(cfg_.id_bits));
        bool via_leaf = false;
        const auto next = next_hop(peers_.at(cur).state, key, via_leaf);
        if (!next)
            break;
        const double arrive = send(cur, *next, category, t);
        if (!is_live(*next)) {
            ++result.failed_attempts;
            t = forget(cur, *next, arrive, MessageCategory::maintenance);
            continue;
        }
        t = arrive;
        result.hops.push_back(*next);
        result.last_hop_via_leaf_set = via_leaf;
        cur = *next;
    }
    result.owner = cur;
    result.arrival_time = t;
    return result;
}

JoinReport Overlay::join(std::optional<NodeId> bootstrap, const NodeId& joiner, double now)
{
    if (joiner.value != joiner.value.masked(cfg_.id_bits))
        throw InvalidArgument("joiner id exceeds the identifier space");
    if (is_live(joiner))
        throw DuplicateId("peer " + joiner.value.hex(cfg_.id_bits) + " is already in the overlay");

    const std::size_t sent_before = messages_sent_;
    JoinReport report;
    report.completion_time = now;

    if (live_count_ == 0) {
        peers_[joiner] = Peer{fresh_state(joiner), true};
        ++live_count_;
        return report;
    }
    if (!bootstrap || !is_live(*bootstrap))
        throw JoinFailure("join of " + joiner.value.hex(cfg_.id_bits) + " needs a live bootstrap peer");

    // The join request travels towards the joiner's own id.
    const RouteResult path = route(*bootstrap, key_of(joiner), now, MessageCategory::maintenance);
    double t = path.arrival_time;

    RoutingState st = fresh_state(joiner);
    std::vector<NodeId> visited{*bootstrap};
    visited.insert(visited.end(), path.hops.begin(), path.hops.end());
    double replies_done = t;
    for (const auto& x : visited) {
        const RoutingState& xs = peers_.at(x).state;
        consider(st, x);
        for (const auto& id : xs.known())
            consider(st, id);
        replies_done = std::max(replies_done, send(x, joiner, MessageCategory::maintenance, t));
    }
    const RoutingState& boot = peers_.at(*bootstrap).state;
    std::vector<NodeId> near = boot.neighborhood;
    near.push_back(*bootstrap);
    rebuild_neighborhood(st, std::move(near));

    peers_[joiner] = Peer{std::move(st), true};
    ++live_count_;

    // Announce the new state to every peer it references.
    t = replies_done;
    double done = t;
    for (const auto& y : peers_.at(joiner).state.known()) {
        const double arrive = send(joiner, y, MessageCategory::maintenance, t);
        if (!is_live(y)) {
            done = std::max(done, forget(joiner, y, arrive, MessageCategory::maintenance));
            continue;
        }
        consider(peers_.at(y).state, joiner);
        done = std::max(done, arrive);
    }
    report.completion_time = done;
    report.messages = messages_sent_ - sent_before;
    return report;
}

LeaveReport Overlay::leave_or_fail(const NodeId& node, bool graceful, double now)
{
    LeaveReport report;
    if (!is_live(node)) {
        warnings_.push_back("leave of unknown or dead peer " + node.value.hex(cfg_.id_bits) + " ignored");
        return report;
    }
    report.known = true;
    Peer& peer = peers_.at(node);
    peer.live = false;
    --live_count_;
    if (!graceful)
        return report;

    const std::size_t sent_before = messages_sent_;
    std::vector<NodeId> leaving_leaves = peer.state.left;
    leaving_leaves.insert(leaving_leaves.end(), peer.state.right.begin(), peer.state.right.end());
    std::vector<NodeId> notified;
    for (const auto& y : leaving_leaves)
        push_unique(notified, y);

    // The departure notice carries the leaving peer's leaf set, so receivers repair locally.
    for (const auto& y : notified) {
        send(node, y, MessageCategory::maintenance, now);
        if (!is_live(y))
            continue;
        RoutingState& ys = peers_.at(y).state;
        for (auto& e : ys.table)
            if (e && *e == node)
                e.reset();
        std::erase(ys.neighborhood, node);
        std::vector<NodeId> candidates = ys.left;
        candidates.insert(candidates.end(), ys.right.begin(), ys.right.end());
        candidates.insert(candidates.end(), leaving_leaves.begin(), leaving_leaves.end());
        std::erase(candidates, node);
        rebuild_leaves(ys, std::move(candidates));
    }
    report.messages = messages_sent_ - sent_before;
    return report;
}

bool Overlay::believes_owner(const NodeId& node, const OverlayKey& key) const
{
    const RoutingState& s = state(node);
    if (!in_leaf_range(s, key))
        return false;
    for (const auto* side : {&s.left, &s.right})
        for (const auto& id : *side)
            if (closer_to(id, node, key, cfg_.id_bits))
                return false;
    return true;
}

std::vector<std::string> Overlay::audit() const
{
    std::vector<std::string> problems;
    const int bits = cfg_.id_bits;
    for (const auto& [id, peer] : peers_) {
        if (!peer.live)
            continue;
        for (int r = 0; r < cfg_.rows(); ++r)
            for (int c = 0; c < cfg_.columns(); ++c) {
                const auto& e = peer.state.entry(r, c, cfg_.columns());
                if (!e)
                    continue;
                const int p = shared_prefix_length(id.value, e->value, bits, cfg_.bits_per_digit);
                const auto d = static_cast<int>(digit_at(e->value, bits, cfg_.bits_per_digit, r));
                if (p != r || d != c)
                    problems.push_back(id.value.hex(bits) + " row " + std::to_string(r) + " col " +
                                       std::to_string(c) + " holds " + e->value.hex(bits));
            }
        if (std::find(peer.state.left.begin(), peer.state.left.end(), id) != peer.state.left.end() ||
            std::find(peer.state.right.begin(), peer.state.right.end(), id) != peer.state.right.end())
            problems.push_back(id.value.hex(bits) + " lists itself in its leaf set");
    }
    return problems;
}

} // namespace cloudpeer::overlay
