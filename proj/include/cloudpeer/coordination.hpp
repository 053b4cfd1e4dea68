#pragma once

#include "cloudpeer/index.hpp"
#include "cloudpeer/message.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace cloudpeer::coordination {

using QueryId = std::string;
using VmId = std::string;

struct DiscoveryQuery {
    QueryId query_id;
    index::Region region;
    double submit_time = 0.0;
    std::string reply_to;
    std::uint32_t units_requested = 1;
};

struct UpdateQuery {
    VmId vm_id;
    index::Point point;
    std::uint32_t capacity = 0;
    double publish_time = 0.0;
    // Dispatches the VM had received when it published. When set, grants the
    // VM has not seen yet are held back from `capacity`.
    std::optional<std::uint64_t> dispatched_total;
};

struct Allocation {
    QueryId query_id;
    VmId vm_id;
    std::uint32_t units = 0;
    double grant_time = 0.0;
    // Cell holding the authoritative counter that granted the units.
    std::size_t home_cell = 0;
};

struct WaitingQuery {
    DiscoveryQuery query;
    std::uint32_t remaining = 0;
};

// Replica of an update's unclaimed capacity at one cell of its event region.
struct StoredUpdate {
    UpdateQuery update;
    std::size_t home_cell = 0;
    bool is_home = false;
};

// The single counter that serializes claims against one update.
struct CapacityCounter {
    UpdateQuery update;
    std::vector<std::size_t> region_cells;
    std::uint32_t remaining = 0;
};

struct CoordinatorCellState {
    std::size_t cell = 0;
    // Ordered by (submit_time, query_id).
    std::vector<WaitingQuery> waiting;
    std::map<VmId, StoredUpdate> stored_updates;
    std::map<VmId, CapacityCounter> counters;
};

// Receives every inter-cell message the matchmaker would send. Messages
// between cells hosted by the same peer are still reported; the host decides.
class CoordinationObserver {
public:
    virtual ~CoordinationObserver() = default;
    virtual void cell_message(std::size_t from_cell, std::size_t to_cell, MessageCategory category) = 0;
};

struct LossReport {
    std::vector<QueryId> lost_queries;
    std::vector<VmId> lost_updates;
};

/// Matchmaking state of every index cell.
///
/// Discovery queries wait at each cell of their discovery mapping; updates
/// are replicated over their event region with a single capacity counter at
/// the home cell. All claims go through that counter, so the sum of grants
/// against one update never exceeds what it published.
class Matchmaker {
public:
    explicit Matchmaker(const index::Grid& grid, CoordinationObserver* observer = nullptr);

    // Claims matching residuals in ascending (publish_time, vm_id) order and
    // queues any remaining demand. Throws DuplicateId for a reused query_id.
    std::vector<Allocation> store_discovery(const DiscoveryQuery& q, double now);

    // Replaces the VM's previous update, serves matching waiting queries in
    // (submit_time, query_id) order and stores leftover capacity as a residual.
    // Updates older than the VM's latest publication are ignored.
    std::vector<Allocation> handle_update(const UpdateQuery& u, double now);

    // Grants min(units, remaining) from the counter at home_cell; 0 if the
    // counter is gone. Reaching zero evicts the replicas.
    std::uint32_t claim(std::size_t home_cell, const QueryId& query_id, const VmId& vm_id, std::uint32_t units,
                        std::size_t from_cell);

    // Idempotent. Returns whether the query was waiting.
    bool cancel_discovery(const QueryId& query_id);

    // Soft-state loss of the given cells. Queries and updates with any
    // replica there are removed everywhere and reported.
    LossReport drop_cells(std::span<const std::size_t> cells);

    const index::Grid& grid() const { return grid_; }
    const CoordinatorCellState* cell_state(std::size_t cell) const;
    bool is_waiting(const QueryId& query_id) const;
    std::optional<std::uint32_t> remaining_demand(const QueryId& query_id) const;
    std::vector<QueryId> waiting_queries() const;
    std::optional<std::uint32_t> residual(const VmId& vm_id) const;
    // Cells currently holding any state.
    std::vector<std::size_t> occupied_cells() const;

    // Invariant violations; empty when consistent.
    std::vector<std::string> audit() const;

private:
    CoordinatorCellState& state(std::size_t cell);
    void message(std::size_t from, std::size_t to, MessageCategory category);
    void remove_query(const QueryId& query_id, std::size_t notifier);
    void set_remaining(const QueryId& query_id, std::uint32_t remaining, std::size_t notifier);
    void withdraw_update(const VmId& vm_id, std::size_t notifier);

    const index::Grid& grid_;
    CoordinationObserver* observer_;
    std::map<std::size_t, CoordinatorCellState> cells_;
    std::set<QueryId> seen_queries_;
    std::map<QueryId, std::vector<std::size_t>> placements_;
    std::map<VmId, UpdateQuery> published_;
    std::map<VmId, std::uint64_t> granted_total_;
};

/// Single-queue matcher with the same ordering rules and no index. Reference
/// implementation for cross-checking the distributed matchmaker.
class CentralMatcher {
public:
    std::vector<Allocation> store_discovery(const DiscoveryQuery& q, double now);
    std::vector<Allocation> handle_update(const UpdateQuery& u, double now);
    bool cancel_discovery(const QueryId& query_id);

    std::vector<QueryId> waiting_queries() const;
    std::optional<std::uint32_t> residual(const VmId& vm_id) const;

private:
    struct Residual {
        UpdateQuery update;
        std::uint32_t remaining = 0;
    };

    std::vector<WaitingQuery> waiting_;
    std::map<VmId, Residual> residuals_;
    std::map<VmId, double> latest_publish_;
    std::map<VmId, std::uint64_t> granted_total_;
    std::set<QueryId> seen_;
};

} // namespace cloudpeer::coordination
