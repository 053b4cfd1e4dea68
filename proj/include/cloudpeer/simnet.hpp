#pragma once

#include "cloudpeer/message.hpp"

#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <queue>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace cloudpeer::simnet {

struct LatencyModel {
    enum class Kind { constant, uniform_jitter };

    Kind kind = Kind::constant;
    double base = 0.05;
    // Samples fall in [base * (1 - jitter), base * (1 + jitter)].
    double jitter = 0.0;
    std::uint64_t seed = 0;

    // Throws ConfigError.
    void validate() const;
};

class LatencySampler {
public:
    explicit LatencySampler(const LatencyModel& model);
    double sample();

private:
    LatencyModel model_;
    std::mt19937_64 rng_;
};

// Uniform double in [0, 1) from the top 53 bits; identical on every platform.
double unit_uniform(std::mt19937_64& rng);

using EventHandle = std::uint64_t;

/// Single-threaded discrete-event loop with message accounting.
///
/// Events fire in (time, insertion order). Every message handed to the
/// simulator becomes one MessageRecord; the trace is the records in send order.
class Simulator final : public MessageSink {
public:
    explicit Simulator(LatencyModel latency = {}, std::size_t buffer_cap = 1000, int id_bits = 160);

    double now() const { return clock_; }

    // Throws InvalidArgument for a time before now().
    EventHandle schedule(double at, std::function<void()> fn);
    EventHandle schedule_after(double delay, std::function<void()> fn) { return schedule(clock_ + delay, std::move(fn)); }
    bool cancel(EventHandle h);

    // Dispatches events with time <= t_end. The clock ends at t_end, or at the
    // last event time when t_end is infinite.
    double run_until(double t_end = std::numeric_limits<double>::infinity());
    bool idle() const { return queue_.size() == cancelled_.size(); }
    std::uint64_t dispatched() const { return dispatched_; }

    // Liveness consulted when a message sent through send() is delivered.
    void set_liveness(std::function<bool(const NodeId&)> alive) { alive_ = std::move(alive); }

    // Sends a message now; on_deliver runs at arrival if dst is still live,
    // otherwise the record is marked failed and on_fail runs.
    double send(const NodeId& src, const NodeId& dst, MessageCategory category, std::function<void()> on_deliver,
                std::function<void()> on_fail = {});

    // Records a message whose delivery the caller handles (the overlay).
    double transmit(const NodeId& src, const NodeId& dst, MessageCategory category, double send_time,
                    bool dst_alive) override;

    double sample_latency() { return latency_.sample(); }

    const std::vector<MessageRecord>& records() const { return records_; }
    std::size_t sent() const { return records_.size(); }
    std::size_t count(MessageCategory c) const { return counts_[static_cast<std::size_t>(c)]; }
    std::size_t failed() const { return failed_; }
    std::size_t drops() const { return drops_; }
    const std::vector<std::string>& warnings() const { return warnings_; }

    // Tab-separated `send_time recv_time src dst category`, one line per record.
    std::string trace_tsv() const;
    std::string trace_hash() const;

private:
    struct Event {
        double at;
        std::uint64_t seq;
        bool operator>(const Event& o) const { return at != o.at ? at > o.at : seq > o.seq; }
    };

    std::size_t record(const NodeId& src, const NodeId& dst, MessageCategory category, double send_time,
                       double recv_time, bool failed);

    LatencySampler latency_;
    std::size_t buffer_cap_;
    int id_bits_;
    double clock_ = 0.0;
    std::uint64_t next_seq_ = 0;
    std::uint64_t dispatched_ = 0;
    std::priority_queue<Event, std::vector<Event>, std::greater<>> queue_;
    std::map<std::uint64_t, std::function<void()>> actions_;
    std::set<std::uint64_t> cancelled_;
    std::function<bool(const NodeId&)> alive_;

    std::vector<MessageRecord> records_;
    std::array<std::size_t, 4> counts_{};
    std::size_t failed_ = 0;
    std::size_t drops_ = 0;
    std::vector<std::string> warnings_;
    // Arrival times of messages still in flight, per destination.
    std::map<NodeId, std::priority_queue<double, std::vector<double>, std::greater<>>> in_flight_;
};

struct ChurnAction {
    enum class Kind { join, leave, fail };

    double time = 0.0;
    Kind kind = Kind::join;
    std::string node;
};

std::string_view to_string(ChurnAction::Kind k);

// Checks times and that every action references a peer that exists (or, for a
// join, does not) at that point of the script. Throws ConfigError.
void validate_churn(const std::vector<ChurnAction>& script, const std::set<std::string>& initial_peers);

// Schedules `apply` for each action at its time, in script order for ties.
void inject_churn(Simulator& sim, const std::vector<ChurnAction>& script,
                  std::function<void(const ChurnAction&)> apply);

} // namespace cloudpeer::simnet
