#include "cloudpeer/index.hpp"

#include "cloudpeer/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

namespace cloudpeer::index {

namespace {

constexpr double kTop = 0x1.fffffffffffffp-1; // largest double below 1

double scale(const Dimension& d, double v)
{
    const double s = (v - d.lo) / (d.hi - d.lo);
    return std::min(s, kTop);
}

double numeric_value(const Dimension& d, const RawValue& raw)
{
    const double* v = std::get_if<double>(&raw);
    if (!v)
        throw SchemaViolation("dimension '" + d.name + "' expects a number");
    if (!std::isfinite(*v) || *v < d.lo || *v > d.hi)
        throw SchemaViolation("value " + std::to_string(*v) + " outside [" + std::to_string(d.lo) + ", " +
                              std::to_string(d.hi) + "] for '" + d.name + "'");
    if (d.kind == DimensionKind::integer && std::abs(*v - std::round(*v)) > 1e-9)
        throw SchemaViolation("dimension '" + d.name + "' expects an integer");
    return *v;
}

double categorical_coordinate(const Dimension& d, const RawValue& raw)
{
    const std::string* s = std::get_if<std::string>(&raw);
    if (!s)
        throw SchemaViolation("dimension '" + d.name + "' expects a categorical value");
    const auto it = std::find(d.values.begin(), d.values.end(), *s);
    if (it == d.values.end())
        throw SchemaViolation("'" + *s + "' is not in the domain of '" + d.name + "'");
    const auto rank = static_cast<double>(it - d.values.begin());
    return (rank + 0.5) / static_cast<double>(d.values.size());
}

} // namespace

AttributeSchema::AttributeSchema(std::vector<Dimension> dims) : dims_(std::move(dims))
{
    if (dims_.empty())
        throw SchemaViolation("schema needs at least one dimension");
    std::set<std::string> names;
    for (const auto& d : dims_) {
        if (d.name.empty() || !names.insert(d.name).second)
            throw SchemaViolation("dimension names must be unique and non-empty");
        if (d.kind == DimensionKind::categorical) {
            if (d.values.empty())
                throw SchemaViolation("categorical dimension '" + d.name + "' has an empty domain");
            if (std::set(d.values.begin(), d.values.end()).size() != d.values.size())
                throw SchemaViolation("categorical dimension '" + d.name + "' repeats a value");
        } else if (!(d.lo < d.hi)) {
            throw SchemaViolation("numeric dimension '" + d.name + "' needs lo < hi");
        }
    }
}

std::optional<std::size_t> AttributeSchema::find(std::string_view name) const
{
    for (std::size_t i = 0; i < dims_.size(); ++i)
        if (dims_[i].name == name)
            return i;
    return std::nullopt;
}

void validate(const Point& p)
{
    if (p.coords.empty())
        throw SchemaViolation("point has no coordinates");
    for (double c : p.coords)
        if (!(c >= 0.0 && c < 1.0))
            throw SchemaViolation("point coordinate outside [0, 1)");
}

void validate(const Region& r)
{
    if (r.lower.empty() || r.lower.size() != r.upper.size())
        throw SchemaViolation("region bounds have mismatched dimensions");
    for (std::size_t i = 0; i < r.lower.size(); ++i)
        if (!(r.lower[i] >= 0.0 && r.lower[i] <= r.upper[i] && r.upper[i] <= 1.0))
            throw SchemaViolation("region bounds must satisfy 0 <= lower <= upper <= 1");
}

Point normalize(const AttributeSchema& schema, const RawAssignment& raw)
{
    for (const auto& [name, _] : raw)
        if (!schema.find(name))
            throw SchemaViolation("unknown dimension '" + name + "'");
    Point p;
    p.coords.reserve(schema.size());
    for (const auto& d : schema.dimensions()) {
        const auto it = raw.find(d.name);
        if (it == raw.end())
            throw SchemaViolation("missing value for dimension '" + d.name + "'");
        p.coords.push_back(d.kind == DimensionKind::categorical ? categorical_coordinate(d, it->second)
                                                                : scale(d, numeric_value(d, it->second)));
    }
    return p;
}

Region normalize_region(const AttributeSchema& schema, const RawConstraints& raw)
{
    for (const auto& [name, _] : raw)
        if (!schema.find(name))
            throw SchemaViolation("unknown dimension '" + name + "'");
    Region r;
    for (const auto& d : schema.dimensions()) {
        const auto it = raw.find(d.name);
        if (it == raw.end())
            throw SchemaViolation("missing constraint for dimension '" + d.name + "'");
        const Constraint& c = it->second;
        double lo = 0.0, hi = 1.0;
        if (d.kind == DimensionKind::categorical) {
            if (c.op == Constraint::Op::eq)
                lo = hi = categorical_coordinate(d, c.value);
            else if (c.op != Constraint::Op::any)
                throw SchemaViolation("categorical dimension '" + d.name + "' only supports equality");
        } else {
            switch (c.op) {
            case Constraint::Op::eq:
                lo = hi = scale(d, numeric_value(d, c.value));
                break;
            case Constraint::Op::ge:
                lo = scale(d, numeric_value(d, c.value));
                break;
            case Constraint::Op::le:
                hi = scale(d, numeric_value(d, c.value));
                break;
            case Constraint::Op::between: {
                const double a = numeric_value(d, c.value);
                const double b = numeric_value(d, RawValue{c.upper});
                if (a > b)
                    throw SchemaViolation("empty range for dimension '" + d.name + "'");
                lo = scale(d, a);
                hi = scale(d, b);
                break;
            }
            case Constraint::Op::any:
                break;
            }
        }
        r.lower.push_back(lo);
        r.upper.push_back(hi);
    }
    return r;
}

RawAssignment denormalize(const AttributeSchema& schema, const Point& p)
{
    if (p.coords.size() != schema.size())
        throw SchemaViolation("point dimension does not match the schema");
    RawAssignment out;
    for (std::size_t i = 0; i < schema.size(); ++i) {
        const Dimension& d = schema[i];
        const double c = p.coords[i];
        if (d.kind == DimensionKind::categorical) {
            const auto m = d.values.size();
            const auto bin = std::min(m - 1, static_cast<std::size_t>(std::floor(c * static_cast<double>(m))));
            out[d.name] = d.values[bin];
        } else {
            double v = d.lo + c * (d.hi - d.lo);
            if (d.kind == DimensionKind::integer)
                v = std::round(v);
            out[d.name] = v;
        }
    }
    return out;
}

OverlayKey dhash(std::span<const double> control_point, const overlay::OverlayConfig& cfg)
{
    std::string text;
    char buf[32];
    for (std::size_t i = 0; i < control_point.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.12f", control_point[i]);
        if (i > 0)
            text.push_back(',');
        text += buf;
    }
    return overlay::derive_key(text, cfg);
}

std::vector<IndexCell> build_cells(const AttributeSchema& schema, IndexConfig cfg,
                                   const overlay::OverlayConfig& overlay_cfg)
{
    if (cfg.f_min < 1)
        throw InvalidArgument("f_min must be at least 1");
    const std::size_t dims = schema.size();
    const auto f = static_cast<std::size_t>(cfg.f_min);
    std::size_t count = 1;
    for (std::size_t i = 0; i < dims; ++i) {
        count *= f;
        if (count > 1'000'000)
            throw InvalidArgument("index grid exceeds one million cells");
    }

    std::vector<IndexCell> cells;
    cells.reserve(count);
    const double width = 1.0 / cfg.f_min;
    for (std::size_t ordinal = 0; ordinal < count; ++ordinal) {
        IndexCell cell;
        cell.ordinal = ordinal;
        cell.cell_index.assign(dims, 0);
        std::size_t rest = ordinal;
        for (std::size_t i = dims; i-- > 0;) {
            cell.cell_index[i] = static_cast<int>(rest % f);
            rest /= f;
        }
        for (int k : cell.cell_index) {
            cell.lower.push_back(k * width);
            cell.upper.push_back((k + 1) * width);
            cell.control_point.push_back((k + 0.5) * width);
        }
        cell.overlay_key = dhash(cell.control_point, overlay_cfg);
        cells.push_back(std::move(cell));
    }
    return cells;
}

Grid::Grid(const AttributeSchema& schema, IndexConfig cfg, const overlay::OverlayConfig& overlay_cfg)
    : f_min_(cfg.f_min), dims_(schema.size()), cells_(build_cells(schema, cfg, overlay_cfg))
{
}

int Grid::bin(double t) const
{
    const auto k = static_cast<int>(std::floor(t * f_min_));
    return std::clamp(k, 0, f_min_ - 1);
}

std::size_t Grid::ordinal_of(std::span<const int> cell_index) const
{
    std::size_t ordinal = 0;
    for (int k : cell_index)
        ordinal = ordinal * static_cast<std::size_t>(f_min_) + static_cast<std::size_t>(k);
    return ordinal;
}

std::size_t Grid::diagonal_ordinal(int k) const
{
    const std::vector<int> idx(dims_, k);
    return ordinal_of(idx);
}

std::size_t Grid::cell_of(const Point& p) const
{
    std::vector<int> idx;
    idx.reserve(p.coords.size());
    for (double c : p.coords)
        idx.push_back(bin(c));
    return ordinal_of(idx);
}

Segment diagonal_segment(const Region& r)
{
    const double a = *std::max_element(r.lower.begin(), r.lower.end());
    const double b = *std::min_element(r.upper.begin(), r.upper.end());
    return {std::min(a, b), std::max(a, b)};
}

namespace {

std::vector<std::size_t> diagonal_cells(const Segment& s, const Grid& grid)
{
    std::vector<std::size_t> out;
    for (int k = grid.bin(s.lo); k <= grid.bin(s.hi); ++k)
        out.push_back(grid.diagonal_ordinal(k));
    return out;
}

} // namespace

std::vector<std::size_t> imap_discovery(const Region& r, const Grid& grid)
{
    if (r.dims() != grid.dims())
        throw SchemaViolation("region dimension does not match the grid");
    return diagonal_cells(diagonal_segment(r), grid);
}

UpdateMapping imap_update(const Point& p, const Grid& grid)
{
    if (p.coords.size() != grid.dims())
        throw SchemaViolation("point dimension does not match the grid");
    const auto [lo, hi] = std::minmax_element(p.coords.begin(), p.coords.end());
    UpdateMapping m;
    m.region_cells = diagonal_cells({*lo, *hi}, grid);
    m.home = m.region_cells.front();
    return m;
}

bool matches(const Region& r, const Point& p)
{
    if (r.lower.size() != p.coords.size() || r.upper.size() != p.coords.size())
        throw SchemaViolation("region and point have different dimensions");
    for (std::size_t i = 0; i < p.coords.size(); ++i)
        if (p.coords[i] < r.lower[i] || p.coords[i] > r.upper[i])
            return false;
    return true;
}

std::vector<std::size_t> naive_cells_intersecting(const Region& r, const Grid& grid)
{
    if (r.dims() != grid.dims())
        throw SchemaViolation("region dimension does not match the grid");
    std::vector<int> lo, hi;
    for (std::size_t i = 0; i < r.dims(); ++i) {
        lo.push_back(grid.bin(r.lower[i]));
        hi.push_back(grid.bin(r.upper[i]));
    }
    std::vector<std::size_t> out;
    std::vector<int> idx = lo;
    while (true) {
        out.push_back(grid.ordinal_of(idx));
        bool advanced = false;
        for (std::size_t i = idx.size(); i-- > 0;) {
            if (idx[i] < hi[i]) {
                ++idx[i];
                advanced = true;
                break;
            }
            idx[i] = lo[i];
        }
        if (!advanced)
            return out;
    }
}

} // namespace cloudpeer::index
