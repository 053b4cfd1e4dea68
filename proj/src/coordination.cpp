#include "cloudpeer/coordination.hpp"

#include "cloudpeer/errors.hpp"

#include <algorithm>
#include <tuple>

namespace cloudpeer::coordination {

namespace {

bool waits_before(const WaitingQuery& a, const WaitingQuery& b)
{
    return std::tie(a.query.submit_time, a.query.query_id) < std::tie(b.query.submit_time, b.query.query_id);
}

void insert_waiting(std::vector<WaitingQuery>& queue, WaitingQuery w)
{
    auto at = std::upper_bound(queue.begin(), queue.end(), w, waits_before);
    queue.insert(at, std::move(w));
}

void check_query(const DiscoveryQuery& q, std::size_t dims)
{
    index::validate(q.region);
    if (q.region.dims() != dims)
        throw SchemaViolation("discovery query " + q.query_id + " has the wrong dimensionality");
    if (q.units_requested == 0)
        throw InvalidArgument("discovery query " + q.query_id + " requests zero units");
}

void check_update(const UpdateQuery& u, std::size_t dims)
{
    index::validate(u.point);
    if (u.point.coords.size() != dims)
        throw SchemaViolation("update " + u.vm_id + " has the wrong dimensionality");
}

// Capacity left after holding back grants the VM had not seen when publishing.
std::uint32_t usable_capacity(const UpdateQuery& u, std::uint64_t granted_total)
{
    if (!u.dispatched_total || granted_total <= *u.dispatched_total)
        return u.capacity;
    std::uint64_t inflight = granted_total - *u.dispatched_total;
    return inflight >= u.capacity ? 0 : u.capacity - static_cast<std::uint32_t>(inflight);
}

} // namespace

Matchmaker::Matchmaker(const index::Grid& grid, CoordinationObserver* observer) : grid_(grid), observer_(observer) {}

CoordinatorCellState& Matchmaker::state(std::size_t cell)
{
    auto [it, fresh] = cells_.try_emplace(cell);
    if (fresh)
        it->second.cell = cell;
    return it->second;
}

void Matchmaker::message(std::size_t from, std::size_t to, MessageCategory category)
{
    if (observer_ && from != to)
        observer_->cell_message(from, to, category);
}

std::vector<Allocation> Matchmaker::store_discovery(const DiscoveryQuery& q, double now)
{
    check_query(q, grid_.dims());
    if (seen_queries_.contains(q.query_id))
        throw DuplicateId("duplicate query id " + q.query_id);
    seen_queries_.insert(q.query_id);

    auto cells = index::imap_discovery(q.region, grid_);

    struct Candidate {
        double publish_time;
        VmId vm;
        std::size_t home;
        std::size_t found_at;
    };
    std::vector<Candidate> found;
    std::set<VmId> listed;
    for (std::size_t c : cells) {
        auto it = cells_.find(c);
        if (it == cells_.end())
            continue;
        for (const auto& [vm, stored] : it->second.stored_updates) {
            if (listed.contains(vm) || !index::matches(q.region, stored.update.point))
                continue;
            listed.insert(vm);
            found.push_back({stored.update.publish_time, vm, stored.home_cell, c});
        }
    }
    std::sort(found.begin(), found.end(), [](const Candidate& a, const Candidate& b) {
        return std::tie(a.publish_time, a.vm) < std::tie(b.publish_time, b.vm);
    });

    std::vector<Allocation> out;
    std::uint32_t remaining = q.units_requested;
    for (const auto& cand : found) {
        if (remaining == 0)
            break;
        std::uint32_t got = claim(cand.home, q.query_id, cand.vm, remaining, cand.found_at);
        if (got == 0)
            continue;
        out.push_back({q.query_id, cand.vm, got, now, cand.home});
        remaining -= got;
    }

    if (remaining > 0) {
        for (std::size_t c : cells)
            insert_waiting(state(c).waiting, {q, remaining});
        placements_[q.query_id] = cells;
    }
    return out;
}

std::uint32_t Matchmaker::claim(std::size_t home_cell, const QueryId& query_id, const VmId& vm_id,
                                std::uint32_t units, std::size_t from_cell)
{
    (void)query_id;
    message(from_cell, home_cell, MessageCategory::query_routing);
    auto cit = cells_.find(home_cell);
    if (cit == cells_.end())
        return 0;
    auto kit = cit->second.counters.find(vm_id);
    if (kit == cit->second.counters.end()) {
        message(home_cell, from_cell, MessageCategory::query_routing);
        return 0;
    }
    CapacityCounter& counter = kit->second;
    std::uint32_t got = std::min(units, counter.remaining);
    counter.remaining -= got;
    granted_total_[vm_id] += got;
    message(home_cell, from_cell, MessageCategory::query_routing);

    if (counter.remaining == 0) {
        for (std::size_t c : counter.region_cells) {
            auto rit = cells_.find(c);
            if (rit == cells_.end() || rit->second.stored_updates.erase(vm_id) == 0)
                continue;
            message(home_cell, c, MessageCategory::notification);
        }
        cit->second.counters.erase(kit);
    }
    return got;
}

void Matchmaker::remove_query(const QueryId& query_id, std::size_t notifier)
{
    auto pit = placements_.find(query_id);
    if (pit == placements_.end())
        return;
    for (std::size_t c : pit->second) {
        auto& queue = state(c).waiting;
        std::erase_if(queue, [&](const WaitingQuery& w) { return w.query.query_id == query_id; });
        message(notifier, c, MessageCategory::notification);
    }
    placements_.erase(pit);
}

void Matchmaker::set_remaining(const QueryId& query_id, std::uint32_t remaining, std::size_t notifier)
{
    if (remaining == 0) {
        remove_query(query_id, notifier);
        return;
    }
    auto pit = placements_.find(query_id);
    if (pit == placements_.end())
        return;
    for (std::size_t c : pit->second) {
        for (auto& w : state(c).waiting)
            if (w.query.query_id == query_id)
                w.remaining = remaining;
        message(notifier, c, MessageCategory::notification);
    }
}

void Matchmaker::withdraw_update(const VmId& vm_id, std::size_t notifier)
{
    auto pit = published_.find(vm_id);
    if (pit == published_.end())
        return;
    auto mapping = index::imap_update(pit->second.point, grid_);
    for (std::size_t c : mapping.region_cells) {
        auto it = cells_.find(c);
        if (it == cells_.end())
            continue;
        bool had = it->second.stored_updates.erase(vm_id) > 0;
        had = it->second.counters.erase(vm_id) > 0 || had;
        if (had)
            message(notifier, c, MessageCategory::notification);
    }
}

std::vector<Allocation> Matchmaker::handle_update(const UpdateQuery& u, double now)
{
    check_update(u, grid_.dims());
    auto prior = published_.find(u.vm_id);
    if (prior != published_.end() && u.publish_time < prior->second.publish_time)
        return {};

    auto mapping = index::imap_update(u.point, grid_);
    const std::size_t home = mapping.home;
    withdraw_update(u.vm_id, home);
    published_[u.vm_id] = u;

    // Every region cell reports its matching waiters to the home cell, which
    // serves them oldest first against its counter.
    std::vector<WaitingQuery> candidates;
    std::set<QueryId> listed;
    for (std::size_t c : mapping.region_cells) {
        auto it = cells_.find(c);
        if (it == cells_.end())
            continue;
        bool reported = false;
        for (const auto& w : it->second.waiting) {
            if (listed.contains(w.query.query_id) || !index::matches(w.query.region, u.point))
                continue;
            listed.insert(w.query.query_id);
            candidates.push_back(w);
            reported = true;
        }
        if (reported)
            message(c, home, MessageCategory::query_routing);
    }
    std::sort(candidates.begin(), candidates.end(), waits_before);

    std::uint32_t capacity = usable_capacity(u, granted_total_[u.vm_id]);
    std::vector<Allocation> out;
    if (capacity == 0)
        return out;

    state(home).counters[u.vm_id] = {u, mapping.region_cells, capacity};
    for (const auto& w : candidates) {
        std::uint32_t got = claim(home, w.query.query_id, u.vm_id, w.remaining, home);
        if (got == 0)
            break;
        out.push_back({w.query.query_id, u.vm_id, got, now, home});
        set_remaining(w.query.query_id, w.remaining - got, home);
    }

    auto& home_state = state(home);
    if (home_state.counters.contains(u.vm_id)) {
        for (std::size_t c : mapping.region_cells)
            state(c).stored_updates[u.vm_id] = {u, home, c == home};
    }
    return out;
}

bool Matchmaker::cancel_discovery(const QueryId& query_id)
{
    if (!placements_.contains(query_id))
        return false;
    auto cells = placements_[query_id];
    remove_query(query_id, cells.front());
    return true;
}

LossReport Matchmaker::drop_cells(std::span<const std::size_t> cells)
{
    std::set<QueryId> lost_queries;
    std::set<VmId> lost_updates;
    for (std::size_t c : cells) {
        auto it = cells_.find(c);
        if (it == cells_.end())
            continue;
        for (const auto& w : it->second.waiting)
            lost_queries.insert(w.query.query_id);
        for (const auto& [vm, stored] : it->second.stored_updates)
            lost_updates.insert(vm);
        for (const auto& [vm, counter] : it->second.counters)
            lost_updates.insert(vm);
    }

    for (const auto& q : lost_queries) {
        auto cells_of = placements_[q];
        for (std::size_t c : cells_of)
            std::erase_if(state(c).waiting, [&](const WaitingQuery& w) { return w.query.query_id == q; });
        placements_.erase(q);
    }
    for (const auto& vm : lost_updates) {
        for (auto& [c, st] : cells_) {
            st.stored_updates.erase(vm);
            st.counters.erase(vm);
        }
    }
    for (std::size_t c : cells)
        cells_.erase(c);
    std::erase_if(cells_, [](const auto& kv) {
        const auto& st = kv.second;
        return st.waiting.empty() && st.stored_updates.empty() && st.counters.empty();
    });

    return {{lost_queries.begin(), lost_queries.end()}, {lost_updates.begin(), lost_updates.end()}};
}

const CoordinatorCellState* Matchmaker::cell_state(std::size_t cell) const
{
    auto it = cells_.find(cell);
    return it == cells_.end() ? nullptr : &it->second;
}

bool Matchmaker::is_waiting(const QueryId& query_id) const
{
    return placements_.contains(query_id);
}

std::optional<std::uint32_t> Matchmaker::remaining_demand(const QueryId& query_id) const
{
    auto pit = placements_.find(query_id);
    if (pit == placements_.end())
        return std::nullopt;
    const auto* st = cell_state(pit->second.front());
    for (const auto& w : st->waiting)
        if (w.query.query_id == query_id)
            return w.remaining;
    return std::nullopt;
}

std::vector<QueryId> Matchmaker::waiting_queries() const
{
    std::vector<QueryId> out;
    for (const auto& [id, cells] : placements_)
        out.push_back(id);
    return out;
}

std::optional<std::uint32_t> Matchmaker::residual(const VmId& vm_id) const
{
    for (const auto& [c, st] : cells_) {
        auto it = st.counters.find(vm_id);
        if (it != st.counters.end())
            return it->second.remaining;
    }
    return std::nullopt;
}

std::vector<std::size_t> Matchmaker::occupied_cells() const
{
    std::vector<std::size_t> out;
    for (const auto& [c, st] : cells_)
        if (!st.waiting.empty() || !st.stored_updates.empty() || !st.counters.empty())
            out.push_back(c);
    return out;
}

std::vector<std::string> Matchmaker::audit() const
{
    std::vector<std::string> problems;
    std::map<QueryId, std::size_t> seen_in;
    for (const auto& [c, st] : cells_) {
        if (!std::is_sorted(st.waiting.begin(), st.waiting.end(), waits_before))
            problems.push_back("cell " + std::to_string(c) + " queue out of order");
        for (const auto& w : st.waiting) {
            ++seen_in[w.query.query_id];
            if (w.remaining == 0)
                problems.push_back("query " + w.query.query_id + " waiting with no demand");
        }
        for (const auto& [vm, stored] : st.stored_updates) {
            const auto* home = cell_state(stored.home_cell);
            if (!home || !home->counters.contains(vm))
                problems.push_back("replica of " + vm + " at cell " + std::to_string(c) + " has no counter");
        }
        for (const auto& [vm, counter] : st.counters) {
            if (counter.remaining == 0)
                problems.push_back("exhausted counter for " + vm);
            for (std::size_t rc : counter.region_cells) {
                const auto* r = cell_state(rc);
                if (!r || !r->stored_updates.contains(vm))
                    problems.push_back("counter for " + vm + " missing replica at " + std::to_string(rc));
            }
        }
    }
    for (const auto& [id, cells] : placements_) {
        auto it = seen_in.find(id);
        if (it == seen_in.end() || it->second != cells.size())
            problems.push_back("query " + id + " not present at every placed cell");
    }
    if (seen_in.size() != placements_.size())
        problems.push_back("waiting entries without a placement");
    return problems;
}

std::vector<Allocation> CentralMatcher::store_discovery(const DiscoveryQuery& q, double now)
{
    if (q.units_requested == 0)
        throw InvalidArgument("discovery query " + q.query_id + " requests zero units");
    if (seen_.contains(q.query_id))
        throw DuplicateId("duplicate query id " + q.query_id);
    seen_.insert(q.query_id);

    std::vector<const Residual*> found;
    for (const auto& [vm, r] : residuals_)
        if (index::matches(q.region, r.update.point))
            found.push_back(&r);
    std::sort(found.begin(), found.end(), [](const Residual* a, const Residual* b) {
        return std::tie(a->update.publish_time, a->update.vm_id) < std::tie(b->update.publish_time, b->update.vm_id);
    });

    std::vector<Allocation> out;
    std::uint32_t remaining = q.units_requested;
    std::vector<VmId> exhausted;
    for (const Residual* r : found) {
        if (remaining == 0)
            break;
        auto& res = residuals_.at(r->update.vm_id);
        std::uint32_t got = std::min(remaining, res.remaining);
        res.remaining -= got;
        remaining -= got;
        granted_total_[res.update.vm_id] += got;
        out.push_back({q.query_id, res.update.vm_id, got, now, 0});
        if (res.remaining == 0)
            exhausted.push_back(res.update.vm_id);
    }
    for (const auto& vm : exhausted)
        residuals_.erase(vm);
    if (remaining > 0)
        insert_waiting(waiting_, {q, remaining});
    return out;
}

std::vector<Allocation> CentralMatcher::handle_update(const UpdateQuery& u, double now)
{
    auto last = latest_publish_.find(u.vm_id);
    if (last != latest_publish_.end() && u.publish_time < last->second)
        return {};
    latest_publish_[u.vm_id] = u.publish_time;
    residuals_.erase(u.vm_id);

    std::uint32_t capacity = usable_capacity(u, granted_total_[u.vm_id]);
    std::vector<Allocation> out;
    for (auto& w : waiting_) {
        if (capacity == 0)
            break;
        if (!index::matches(w.query.region, u.point))
            continue;
        std::uint32_t got = std::min(capacity, w.remaining);
        capacity -= got;
        w.remaining -= got;
        granted_total_[u.vm_id] += got;
        out.push_back({w.query.query_id, u.vm_id, got, now, 0});
    }
    std::erase_if(waiting_, [](const WaitingQuery& w) { return w.remaining == 0; });
    if (capacity > 0)
        residuals_[u.vm_id] = {u, capacity};
    return out;
}

bool CentralMatcher::cancel_discovery(const QueryId& query_id)
{
    return std::erase_if(waiting_, [&](const WaitingQuery& w) { return w.query.query_id == query_id; }) > 0;
}

std::vector<QueryId> CentralMatcher::waiting_queries() const
{
    std::vector<QueryId> out;
    for (const auto& w : waiting_)
        out.push_back(w.query.query_id);
    std::sort(out.begin(), out.end());
    return out;
}

std::optional<std::uint32_t> CentralMatcher::residual(const VmId& vm_id) const
{
    auto it = residuals_.find(vm_id);
    if (it == residuals_.end())
        return std::nullopt;
    return it->second.remaining;
}

} // namespace cloudpeer::coordination
