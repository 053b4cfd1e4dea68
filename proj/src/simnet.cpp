#include "cloudpeer/simnet.hpp"

#include "cloudpeer/errors.hpp"
#include "cloudpeer/sha1.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace cloudpeer::simnet {

void LatencyModel::validate() const
{
    if (!(base > 0.0) || !std::isfinite(base))
        throw ConfigError("latency.base", "must be a positive number of seconds");
    if (!(jitter >= 0.0 && jitter < 1.0))
        throw ConfigError("latency.jitter", "must lie in [0, 1)");
}

double unit_uniform(std::mt19937_64& rng)
{
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

LatencySampler::LatencySampler(const LatencyModel& model) : model_(model), rng_(model.seed)
{
    model_.validate();
}

double LatencySampler::sample()
{
    if (model_.kind == LatencyModel::Kind::constant || model_.jitter == 0.0)
        return model_.base;
    const double u = unit_uniform(rng_);
    return model_.base * (1.0 - model_.jitter + 2.0 * model_.jitter * u);
}

Simulator::Simulator(LatencyModel latency, std::size_t buffer_cap, int id_bits)
    : latency_(latency), buffer_cap_(buffer_cap), id_bits_(id_bits)
{
}

EventHandle Simulator::schedule(double at, std::function<void()> fn)
{
    if (!(at >= clock_) || std::isnan(at))
        throw InvalidArgument("cannot schedule an event before the current clock");
    const std::uint64_t seq = next_seq_++;
    queue_.push({at, seq});
    actions_.emplace(seq, std::move(fn));
    return seq;
}

bool Simulator::cancel(EventHandle h)
{
    auto it = actions_.find(h);
    if (it == actions_.end() || cancelled_.contains(h))
        return false;
    cancelled_.insert(h);
    return true;
}

double Simulator::run_until(double t_end)
{
    while (!queue_.empty() && queue_.top().at <= t_end) {
        const Event ev = queue_.top();
        queue_.pop();
        auto node = actions_.extract(ev.seq);
        if (cancelled_.erase(ev.seq))
            continue;
        clock_ = ev.at;
        ++dispatched_;
        node.mapped()();
    }
    if (std::isfinite(t_end) && t_end > clock_)
        clock_ = t_end;
    return clock_;
}

std::size_t Simulator::record(const NodeId& src, const NodeId& dst, MessageCategory category, double send_time,
                              double recv_time, bool failed)
{
    auto& flight = in_flight_[dst];
    while (!flight.empty() && flight.top() <= send_time)
        flight.pop();
    const bool overflow = flight.size() >= buffer_cap_;
    if (overflow) {
        ++drops_;
        if (warnings_.size() < 100)
            warnings_.push_back("buffer of " + dst.value.hex(id_bits_) + " over capacity at t=" +
                                std::to_string(send_time));
    }
    flight.push(recv_time);

    records_.push_back({send_time, recv_time, src, dst, category, failed, overflow});
    ++counts_[static_cast<std::size_t>(category)];
    if (failed)
        ++failed_;
    return records_.size() - 1;
}

double Simulator::transmit(const NodeId& src, const NodeId& dst, MessageCategory category, double send_time,
                           bool dst_alive)
{
    const double recv = send_time + latency_.sample();
    record(src, dst, category, send_time, recv, !dst_alive);
    return recv;
}

double Simulator::send(const NodeId& src, const NodeId& dst, MessageCategory category,
                       std::function<void()> on_deliver, std::function<void()> on_fail)
{
    const double recv = clock_ + latency_.sample();
    const std::size_t idx = record(src, dst, category, clock_, recv, false);
    schedule(recv, [this, idx, dst, on_deliver = std::move(on_deliver), on_fail = std::move(on_fail)] {
        if (!alive_ || alive_(dst)) {
            if (on_deliver)
                on_deliver();
            return;
        }
        records_[idx].failed = true;
        ++failed_;
        if (on_fail)
            on_fail();
    });
    return recv;
}

std::string Simulator::trace_tsv() const
{
    std::string out;
    char buf[64];
    for (const auto& r : records_) {
        std::snprintf(buf, sizeof buf, "%.6f\t%.6f\t", r.send_time, r.recv_time);
        out += buf;
        out += r.src.value.hex(id_bits_);
        out += '\t';
        out += r.dst.value.hex(id_bits_);
        out += '\t';
        out += to_string(r.category);
        out += '\n';
    }
    return out;
}

std::string Simulator::trace_hash() const
{
    return to_hex(sha1(trace_tsv()));
}

std::string_view to_string(ChurnAction::Kind k)
{
    switch (k) {
    case ChurnAction::Kind::join:
        return "join";
    case ChurnAction::Kind::leave:
        return "leave";
    case ChurnAction::Kind::fail:
        return "fail";
    }
    return "?";
}

void validate_churn(const std::vector<ChurnAction>& script, const std::set<std::string>& initial_peers)
{
    std::vector<std::size_t> order(script.size());
    for (std::size_t i = 0; i < order.size(); ++i)
        order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return script[a].time < script[b].time; });

    std::set<std::string> live = initial_peers;
    for (std::size_t i : order) {
        const auto& a = script[i];
        const std::string field = "churn[" + std::to_string(i) + "]";
        if (!(a.time >= 0.0) || !std::isfinite(a.time))
            throw ConfigError(field + ".time", "must be a finite non-negative time");
        if (a.node.empty())
            throw ConfigError(field + ".node", "must name a peer");
        if (a.kind == ChurnAction::Kind::join) {
            if (!live.insert(a.node).second)
                throw ConfigError(field + ".node", "peer '" + a.node + "' is already live");
        } else if (live.erase(a.node) == 0) {
            throw ConfigError(field + ".node", "peer '" + a.node + "' is not live at that time");
        }
    }
}

void inject_churn(Simulator& sim, const std::vector<ChurnAction>& script,
                  std::function<void(const ChurnAction&)> apply)
{
    std::vector<ChurnAction> sorted = script;
    std::stable_sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.time < b.time; });
    for (const auto& a : sorted)
        sim.schedule(a.time, [apply, a] { apply(a); });
}

} // namespace cloudpeer::simnet
