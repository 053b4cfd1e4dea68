#pragma once

#include "cloudpeer/ids.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace cloudpeer {

// The four message-complexity buckets reported per scenario.
enum class MessageCategory : std::uint8_t {
    index_init,
    query_routing,
    maintenance,
    notification,
};

inline constexpr std::array<MessageCategory, 4> kAllCategories{
    MessageCategory::index_init,
    MessageCategory::query_routing,
    MessageCategory::maintenance,
    MessageCategory::notification,
};

std::string_view to_string(MessageCategory c);
std::optional<MessageCategory> category_from_string(std::string_view s);

struct MessageRecord {
    double send_time = 0.0;
    double recv_time = 0.0;
    NodeId src;
    NodeId dst;
    MessageCategory category = MessageCategory::query_routing;
    // Destination was dead; the message was dropped at delivery.
    bool failed = false;
    // Destination buffer was at capacity when the message was sent.
    bool overflow = false;
};

// Where overlay and coordination code report every message they send.
// Returns the time the message reaches `dst`.
class MessageSink {
public:
    virtual ~MessageSink() = default;
    virtual double transmit(const NodeId& src, const NodeId& dst, MessageCategory category, double send_time,
                            bool dst_alive) = 0;
};

// Constant-latency sink that keeps every record; handy outside a full simulation.
class RecordingSink final : public MessageSink {
public:
    explicit RecordingSink(double latency = 0.0) : latency_(latency) {}

    double transmit(const NodeId& src, const NodeId& dst, MessageCategory category, double send_time,
                    bool dst_alive) override
    {
        records_.push_back({send_time, send_time + latency_, src, dst, category, !dst_alive, false});
        return send_time + latency_;
    }

    const std::vector<MessageRecord>& records() const { return records_; }
    std::size_t count(MessageCategory c) const
    {
        std::size_t n = 0;
        for (const auto& r : records_)
            n += r.category == c ? 1 : 0;
        return n;
    }
    void clear() { records_.clear(); }

private:
    double latency_;
    std::vector<MessageRecord> records_;
};

} // namespace cloudpeer
