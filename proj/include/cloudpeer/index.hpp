#pragma once

#include "cloudpeer/ids.hpp"
#include "cloudpeer/overlay.hpp"

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace cloudpeer::index {

enum class DimensionKind { categorical, integer, continuous };

struct Dimension {
    std::string name;
    DimensionKind kind = DimensionKind::continuous;
    // Categorical domain in rank order.
    std::vector<std::string> values;
    // Numeric bounds, lo < hi.
    double lo = 0.0;
    double hi = 1.0;
};

/// Ordered attribute dimensions. Every raw value is mapped into [0, 1):
/// categorical values to the midpoint of their rank bin, numerics by min-max
/// scaling (the upper bound itself lands on the largest double below 1).
class AttributeSchema {
public:
    AttributeSchema() = default;
    // Throws SchemaViolation on an empty schema, empty categorical domain,
    // duplicate names or lo >= hi.
    explicit AttributeSchema(std::vector<Dimension> dims);

    std::size_t size() const { return dims_.size(); }
    const Dimension& operator[](std::size_t i) const { return dims_[i]; }
    const std::vector<Dimension>& dimensions() const { return dims_; }
    std::optional<std::size_t> find(std::string_view name) const;

private:
    std::vector<Dimension> dims_;
};

using RawValue = std::variant<double, std::string>;
using RawAssignment = std::map<std::string, RawValue>;

struct Constraint {
    enum class Op { eq, ge, le, between, any };

    Op op = Op::any;
    RawValue value{0.0};
    double upper = 0.0; // between only

    static Constraint equals(RawValue v) { return {Op::eq, std::move(v), 0.0}; }
    static Constraint at_least(double v) { return {Op::ge, v, 0.0}; }
    static Constraint at_most(double v) { return {Op::le, v, 0.0}; }
    static Constraint between(double lo, double hi) { return {Op::between, lo, hi}; }
    static Constraint any() { return {}; }
};

using RawConstraints = std::map<std::string, Constraint>;

// A point in the normalized space, one coordinate in [0, 1) per dimension.
struct Point {
    std::vector<double> coords;

    friend bool operator==(const Point&, const Point&) = default;
};

// Closed per-dimension intervals within [0, 1].
struct Region {
    std::vector<double> lower;
    std::vector<double> upper;

    std::size_t dims() const { return lower.size(); }
    friend bool operator==(const Region&, const Region&) = default;
};

void validate(const Point& p);
void validate(const Region& r);

Point normalize(const AttributeSchema& schema, const RawAssignment& raw);
Region normalize_region(const AttributeSchema& schema, const RawConstraints& raw);
RawAssignment denormalize(const AttributeSchema& schema, const Point& p);

struct IndexConfig {
    // Divisions per dimension at the minimum division level.
    int f_min = 3;
};

struct IndexCell {
    std::vector<int> cell_index;
    // Row-major position in the grid.
    std::size_t ordinal = 0;
    // Half-open extent [lower, upper) per dimension.
    std::vector<double> lower;
    std::vector<double> upper;
    std::vector<double> control_point;
    OverlayKey overlay_key;
};

// Canonical "%.12f" encoding of each coordinate, comma separated, through derive_id.
OverlayKey dhash(std::span<const double> control_point, const overlay::OverlayConfig& cfg);

// Exactly f_min^dims cells in row-major order. Throws InvalidArgument for
// f_min < 1 or grids over one million cells.
std::vector<IndexCell> build_cells(const AttributeSchema& schema, IndexConfig cfg,
                                   const overlay::OverlayConfig& overlay_cfg);

/// The fixed cell grid of one indexing domain.
class Grid {
public:
    Grid(const AttributeSchema& schema, IndexConfig cfg, const overlay::OverlayConfig& overlay_cfg);

    int f_min() const { return f_min_; }
    std::size_t dims() const { return dims_; }
    std::size_t size() const { return cells_.size(); }
    const std::vector<IndexCell>& cells() const { return cells_; }
    const IndexCell& cell(std::size_t ordinal) const { return cells_.at(ordinal); }

    // floor(t * f_min) clamped to [0, f_min - 1]; t = 1 belongs to the last bin.
    int bin(double t) const;
    std::size_t ordinal_of(std::span<const int> cell_index) const;
    // Ordinal of the diagonal cell (k, ..., k).
    std::size_t diagonal_ordinal(int k) const;
    std::size_t cell_of(const Point& p) const;

private:
    int f_min_;
    std::size_t dims_;
    std::vector<IndexCell> cells_;
};

struct Segment {
    double lo = 0.0;
    double hi = 0.0;

    friend bool operator==(const Segment&, const Segment&) = default;
};

// With A = max lower and B = min upper: [min(A, B), max(A, B)] on the main diagonal.
Segment diagonal_segment(const Region& r);

// Diagonal cells whose extent meets the region's diagonal segment, ascending.
std::vector<std::size_t> imap_discovery(const Region& r, const Grid& grid);

struct UpdateMapping {
    std::size_t home = 0;
    std::vector<std::size_t> region_cells;
};

// Event region of an update point: the diagonal cells meeting [min p, max p].
UpdateMapping imap_update(const Point& p, const Grid& grid);

// Closed-interval containment. Throws SchemaViolation on a dimension mismatch.
bool matches(const Region& r, const Point& p);

// Brute force: every cell the region crosses.
std::vector<std::size_t> naive_cells_intersecting(const Region& r, const Grid& grid);

} // namespace cloudpeer::index
