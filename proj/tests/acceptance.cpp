// One PASS/FAIL line per acceptance criterion. Exit status is the number of
// failed criteria.

#include "test_support.hpp"

#include "cloudpeer/cli.hpp"
#include "cloudpeer/coordination.hpp"
#include "cloudpeer/index.hpp"
#include "cloudpeer/overlay.hpp"
#include "cloudpeer/provisioner.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <string>

using namespace cloudpeer;

namespace {

constexpr double kDelayTolerance = 1e-9;
constexpr double kRendezvousBudget = 30.0;
constexpr double kRoutingBudget = 30.0;
constexpr double kProvisioningBudget = 60.0;
constexpr double kSweepBudget = 60.0;

const overlay::OverlayConfig kOverlay{};

struct Outcome {
    bool pass = false;
    std::string detail;
};

int failures = 0;

void report(int n, const char* title, double budget, const std::function<Outcome()>& body)
{
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (budget > 0 && secs > budget) {
        o.pass = false;
        o.detail += "; over the " + std::to_string(static_cast<int>(budget)) + " s budget";
    }
    failures += o.pass ? 0 : 1;
    std::printf("[%s] %d %s: %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", n, title, o.detail.c_str(), secs);
    std::fflush(stdout);
}

std::uint64_t mask_of(const std::vector<std::size_t>& cells)
{
    std::uint64_t m = 0;
    for (auto c : cells)
        m |= std::uint64_t{1} << c;
    return m;
}

// Exhaustive lattice: region endpoints on the 1/16 grid, points on the same
// grid inside [0, 1). Mapping results are cached as cell masks and every
// matching pair is checked.
Outcome rendezvous()
{
    constexpr int g = 16;
    std::vector<std::pair<int, int>> intervals;
    for (int lo = 0; lo <= g; ++lo)
        for (int hi = lo; hi <= g; ++hi)
            intervals.emplace_back(lo, hi);
    const std::size_t ni = intervals.size();

    std::uint64_t pairs = 0, violations = 0;
    for (std::size_t dims = 1; dims <= 3; ++dims) {
        const auto schema = testing::unit_schema(dims);
        std::size_t regions = 1;
        for (std::size_t d = 0; d < dims; ++d)
            regions *= ni;
        std::size_t points = 1;
        for (std::size_t d = 0; d < dims; ++d)
            points *= g;

        // Intervals containing each lattice coordinate.
        std::vector<std::vector<std::size_t>> containing(g);
        for (int x = 0; x < g; ++x)
            for (std::size_t i = 0; i < ni; ++i)
                if (intervals[i].first <= x && x <= intervals[i].second)
                    containing[x].push_back(i);

        for (int f = 1; f <= 4; ++f) {
            const index::Grid grid(schema, index::IndexConfig{f}, kOverlay);
            std::vector<std::uint64_t> dmask(regions), umask(points);
            index::Region r;
            r.lower.resize(dims);
            r.upper.resize(dims);
            for (std::size_t ri = 0; ri < regions; ++ri) {
                std::size_t rest = ri;
                for (std::size_t d = 0; d < dims; ++d) {
                    const auto [lo, hi] = intervals[rest % ni];
                    rest /= ni;
                    r.lower[d] = static_cast<double>(lo) / g;
                    r.upper[d] = static_cast<double>(hi) / g;
                }
                dmask[ri] = mask_of(index::imap_discovery(r, grid));
            }
            index::Point p;
            p.coords.resize(dims);
            for (std::size_t pi = 0; pi < points; ++pi) {
                std::size_t rest = pi;
                for (std::size_t d = 0; d < dims; ++d) {
                    p.coords[d] = static_cast<double>(rest % g) / g;
                    rest /= g;
                }
                umask[pi] = mask_of(index::imap_update(p, grid).region_cells);
            }
            for (std::size_t pi = 0; pi < points; ++pi) {
                int x[3] = {0, 0, 0};
                std::size_t rest = pi;
                for (std::size_t d = 0; d < dims; ++d) {
                    x[d] = static_cast<int>(rest % g);
                    rest /= g;
                }
                const std::uint64_t um = umask[pi];
                const auto& c0 = containing[x[0]];
                const auto& c1 = dims > 1 ? containing[x[1]] : std::vector<std::size_t>{0};
                const auto& c2 = dims > 2 ? containing[x[2]] : std::vector<std::size_t>{0};
                for (auto i2 : c2)
                    for (auto i1 : c1)
                        for (auto i0 : c0) {
                            const std::size_t ri = i0 + ni * (i1 + ni * i2);
                            ++pairs;
                            violations += (dmask[ri] & um) == 0 ? 1 : 0;
                        }
            }
        }
    }

    // Random dimension-4 instances, half of them with points inside the region.
    std::mt19937_64 rng(2024);
    const auto schema4 = testing::unit_schema(4);
    std::uint64_t random_checked = 0, random_matching = 0;
    for (int f = 1; f <= 4; ++f) {
        const index::Grid grid(schema4, index::IndexConfig{f}, kOverlay);
        for (int i = 0; i < 10000; ++i) {
            index::Region r;
            index::Point p;
            for (int d = 0; d < 4; ++d) {
                double a = simnet::unit_uniform(rng), b = simnet::unit_uniform(rng);
                if (a > b)
                    std::swap(a, b);
                r.lower.push_back(a);
                r.upper.push_back(rng() % 8 == 0 ? 1.0 : b);
                p.coords.push_back(i % 2 == 0 ? r.lower[d] + (std::min(r.upper[d], 0x1.fffffffffffffp-1) - r.lower[d]) *
                                                                  simnet::unit_uniform(rng)
                                              : simnet::unit_uniform(rng));
            }
            ++random_checked;
            if (!index::matches(r, p))
                continue;
            ++random_matching;
            std::set<std::size_t> uc;
            for (auto c : index::imap_update(p, grid).region_cells)
                uc.insert(c);
            bool meet = false;
            for (auto c : index::imap_discovery(r, grid))
                meet = meet || uc.contains(c);
            violations += meet ? 0 : 1;
        }
    }
    return {violations == 0 && random_matching >= 10000,
            std::to_string(violations) + " violations over " + std::to_string(pairs) + " lattice pairs and " +
                std::to_string(random_matching) + " matching random dim-4 pairs (" + std::to_string(random_checked) +
                " drawn)"};
}

Outcome routing()
{
    std::string detail;
    bool pass = true;
    for (int n : {1, 2, 16, 100}) {
        overlay::Overlay ov(kOverlay);
        const auto ids = testing::build_overlay(ov, n);
        std::mt19937_64 rng(static_cast<std::uint64_t>(n) * 7919);
        int correct = 0, converging = 0, shortening = 0;
        long hops = 0;
        for (int k = 0; k < 1000; ++k) {
            const auto key = testing::random_key(rng);
            const NodeId src = ids[rng() % ids.size()];
            const auto r = ov.route(src, key);
            correct += r.owner == overlay::owner_oracle(ids, key, kOverlay.id_bits) ? 1 : 0;
            const auto conv = testing::check_convergence(kOverlay, src, key, r);
            converging += conv.ok ? 1 : 0;
            shortening += conv.prefix_shortening_deliveries;
            hops += static_cast<long>(r.hops.size());
        }
        const double mean = hops / 1000.0;
        pass = pass && correct == 1000 && converging == 1000;
        char buf[160];
        std::snprintf(buf, sizeof buf, "%sn=%d owner %d/1000 convergent %d/1000 mean hops %.3f", detail.empty() ? "" : "; ",
                      n, correct, converging, mean);
        detail += buf;
        if (n == 100) {
            const double bound = std::ceil(std::log(100.0) / std::log(16.0)) + 2;
            pass = pass && mean <= bound;
            std::snprintf(buf, sizeof buf, " (bound %.0f, %d terminal leaf deliveries shortened the prefix)", bound,
                          shortening);
            detail += buf;
        }
    }
    return {pass, detail};
}

Outcome cells()
{
    const index::Grid g(testing::example_schema(), index::IndexConfig{3}, kOverlay);
    std::set<U160> keys;
    for (const auto& c : g.cells())
        keys.insert(c.overlay_key.value);
    return {g.size() == 81 && keys.size() == 81,
            std::to_string(g.size()) + " cells, " + std::to_string(keys.size()) + " distinct keys"};
}

Outcome tables56()
{
    const auto run = cli::run_scenario(cli::load_preset("tables56"));
    const auto& a = run.log.allocations;
    const bool one = a.size() == 1 && a[0].query_id == "Query 3" && a[0].vm_id == "VM 2" && a[0].units == 1;
    const bool waiting = run.log.waiting_at_end == std::vector<std::string>{"Query 1", "Query 2"};
    std::string detail = std::to_string(a.size()) + " allocation(s)";
    for (const auto& x : a)
        detail += " " + x.query_id + "<->" + x.vm_id;
    detail += "; waiting:";
    for (const auto& q : run.log.waiting_at_end)
        detail += " " + q;
    return {one && waiting, detail};
}

Outcome provisioning()
{
    using namespace coordination;
    std::mt19937_64 rng(5);
    int schedules = 0, discrepancies = 0, over = 0, duplicates = 0;
    long grants = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t dims = 1 + trial % 4;
        const int f = 1 + (trial / 4) % 4;
        const index::Grid g(testing::unit_schema(dims), index::IndexConfig{f}, kOverlay);
        Matchmaker mm(g);
        CentralMatcher central;
        std::multiset<std::string> a_grants, b_grants;
        // Capacity of each VM's newest accepted update and what it has granted.
        std::map<VmId, std::pair<std::uint32_t, std::uint32_t>> budget;
        std::map<VmId, double> newest;
        std::map<QueryId, std::uint32_t> requested, received;
        auto tally = [&](const std::vector<Allocation>& out) {
            for (const auto& x : out) {
                a_grants.insert(x.query_id + "/" + x.vm_id + "/" + std::to_string(x.units));
                auto& [cap, used] = budget[x.vm_id];
                used += x.units;
                over += used > cap ? 1 : 0;
                received[x.query_id] += x.units;
                duplicates += received[x.query_id] > requested[x.query_id] ? 1 : 0;
                ++grants;
            }
        };
        for (const auto& ev : testing::micro_schedule(rng, dims, 8, 8)) {
            if (auto* d = std::get_if<DiscoveryQuery>(&ev)) {
                requested[d->query_id] = d->units_requested;
                tally(mm.store_discovery(*d, d->submit_time));
                for (const auto& x : central.store_discovery(*d, d->submit_time))
                    b_grants.insert(x.query_id + "/" + x.vm_id + "/" + std::to_string(x.units));
            } else {
                const auto& u = std::get<UpdateQuery>(ev);
                if (!newest.contains(u.vm_id) || u.publish_time >= newest[u.vm_id]) {
                    newest[u.vm_id] = u.publish_time;
                    budget[u.vm_id] = {u.capacity, 0};
                }
                tally(mm.handle_update(u, u.publish_time));
                for (const auto& x : central.handle_update(u, u.publish_time))
                    b_grants.insert(x.query_id + "/" + x.vm_id + "/" + std::to_string(x.units));
            }
        }
        discrepancies += a_grants == b_grants ? 0 : 1;
        ++schedules;
    }
    return {discrepancies == 0 && over == 0 && duplicates == 0,
            std::to_string(schedules) + " schedules, " + std::to_string(grants) + " grants, " +
                std::to_string(discrepancies) + " multiset discrepancies, " + std::to_string(over) +
                " over-provisioned, " + std::to_string(duplicates) + " duplicate notifications"};
}

Outcome trends()
{
    const auto runs = cli::run_all(cli::load_preset("fig6"));
    bool pass = runs.size() == 3;
    std::string detail;
    for (std::size_t i = 0; i < runs.size(); ++i) {
        const auto& m = runs[i].metrics;
        pass = pass && m.mean_response_time && !m.partial;
        for (auto c : kAllCategories)
            pass = pass && m.messages[static_cast<std::size_t>(c)] > 0;
        if (i > 0) {
            const auto& prev = runs[i - 1].metrics;
            pass = pass && *prev.mean_response_time <= *m.mean_response_time &&
                   prev.mean_delay.total <= m.mean_delay.total && prev.total_messages() <= m.total_messages();
        }
        for (const auto& r : runs[i].log.slot_events)
            pass = pass && r.executing <= r.slots;
        char buf[160];
        std::snprintf(buf, sizeof buf, "%s%zu units: response %.3f s, delay %.3f s, %zu msgs", i ? "; " : "",
                      runs[i].units, m.mean_response_time.value_or(NAN), m.mean_delay.total, m.total_messages());
        detail += buf;
    }
    return {pass, detail};
}

Outcome determinism()
{
    bool pass = true;
    std::size_t checked = 0;
    for (const auto& name : cli::preset_names()) {
        const auto a = cli::run_all(cli::load_preset(name));
        const auto b = cli::run_all(cli::load_preset(name));
        pass = pass && cli::csv(a) == cli::csv(b) && a.size() == b.size();
        for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) {
            pass = pass && a[i].log.trace_hash == b[i].log.trace_hash;
            ++checked;
        }
    }
    return {pass, std::to_string(checked) + " runs repeated with identical trace hashes and CSV"};
}

Outcome decomposition()
{
    bool pass = true;
    std::string detail;

    // Synthetic timeline: mapped at 1.0, matched at 4.0, notified at 4.1.
    provisioner::QueryRecord q;
    q.query_id = "synthetic";
    q.placed_time = 1.0;
    q.grant_time = 4.0;
    q.notify_time = 4.1;
    const auto d = provisioner::coordination_delay(q);
    pass = pass && std::abs(d.mapping_latency - 1.0) < kDelayTolerance && std::abs(d.waiting_time - 3.0) < kDelayTolerance &&
           std::abs(d.notification_delay - 0.1) < kDelayTolerance && std::abs(d.total - 4.1) < kDelayTolerance;

    // Simulated: one peer, 0.1 s links; q1 waits for the update published at
    // 3.9 (arrives 4.0), q2 at 5.0 finds the leftover capacity.
    const auto run = cli::run_scenario(cli::load_preset("scripted-delay"));
    struct Expected {
        const char* id;
        double map, wait, notify;
    };
    for (const Expected& e : {Expected{"q1", 0.1, 3.9, 0.1}, Expected{"q2", 0.1, 0.0, 0.1}}) {
        auto it = run.metrics.coordination.find(e.id);
        if (it == run.metrics.coordination.end()) {
            pass = false;
            detail += std::string(e.id) + " missing; ";
            continue;
        }
        const auto& c = it->second;
        pass = pass && std::abs(c.mapping_latency - e.map) < kDelayTolerance &&
               std::abs(c.waiting_time - e.wait) < kDelayTolerance &&
               std::abs(c.notification_delay - e.notify) < kDelayTolerance;
        char buf[120];
        std::snprintf(buf, sizeof buf, "%s=(%.9f, %.9f, %.9f) ", e.id, c.mapping_latency, c.waiting_time,
                      c.notification_delay);
        detail += buf;
    }

    // Components add up for every query of every preset run.
    std::size_t queries = 0;
    double worst = 0.0;
    for (const auto& name : cli::preset_names())
        for (const auto& r : cli::run_all(cli::load_preset(name)))
            for (const auto& [id, c] : r.metrics.coordination) {
                worst = std::max(worst, std::abs(c.mapping_latency + c.waiting_time + c.notification_delay - c.total));
                ++queries;
            }
    pass = pass && worst < kDelayTolerance;
    char buf[120];
    std::snprintf(buf, sizeof buf, "; %zu queries, worst sum error %.3g s", queries, worst);
    detail += buf;
    return {pass, detail};
}

} // namespace

int main()
{
    report(1, "rendezvous", kRendezvousBudget, rendezvous);
    report(2, "routing", kRoutingBudget, routing);
    report(3, "cell construction", 0, cells);
    report(4, "service example scenario", 0, tables56);
    report(5, "no over-provisioning", kProvisioningBudget, provisioning);
    report(6, "trend reproduction", kSweepBudget, trends);
    report(7, "determinism", 0, determinism);
    report(8, "coordination-delay decomposition", 0, decomposition);
    std::printf("%d of 8 criteria failed\n", failures);
    return failures;
}
