#include "carnot/field_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

namespace carnot {

namespace {

std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::ofstream open_out(const std::string& path, std::ios::openmode mode = std::ios::out)
{
    std::ofstream out(path, mode);
    if (!out)
        throw IoError("cannot open '" + path + "' for writing");
    return out;
}

void write_meta(std::ostream& out, const CsvMeta& meta)
{
    for (const auto& [k, v] : meta)
        out << "# " << k << ": " << v << '\n';
}

template <typename T>
void put(std::ostream& out, T v)
{
    char buf[sizeof(T)];
    std::memcpy(buf, &v, sizeof(T));
    out.write(buf, sizeof(T));
}

template <typename T>
T get(std::istream& in, const std::string& path)
{
    char buf[sizeof(T)];
    if (!in.read(buf, sizeof(T)))
        throw IoError("'" + path + "': truncated binary field");
    T v;
    std::memcpy(&v, buf, sizeof(T));
    return v;
}

constexpr char kMagic[4] = {'C', 'R', 'G', 'F'};
constexpr std::uint32_t kVersion = 1;

} // namespace

void write_field_csv(const std::string& path, const GridField& field, const CsvMeta& meta)
{
    std::ofstream out = open_out(path);
    write_meta(out, meta);
    const Grid& grid = field.grid();
    const int n = grid.dim();
    for (int k = 0; k < n; ++k)
        out << 'x' << k << ',';
    out << "value";
    if (field.density())
        out << ",density";
    out << '\n';
    for (Eigen::Index i = 0; i < grid.size(); ++i) {
        const Point p = grid.node(i);
        for (int k = 0; k < n; ++k)
            out << fmt(p(k)) << ',';
        out << fmt(field.values()(i));
        if (field.density())
            out << ',' << fmt((*field.density())(i));
        out << '\n';
    }
    if (!out)
        throw IoError("write failed for '" + path + "'");
}

GridField read_field_csv(const std::string& path, const GroupSpec& g)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open field file '" + path + "'");
    const int n = g.n;
    std::string line;
    bool header_seen = false;
    bool has_density = false;
    std::vector<std::vector<double>> rows;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#')
            continue;
        if (!header_seen) {
            header_seen = true;
            const auto cols = static_cast<int>(std::count(line.begin(), line.end(), ',')) + 1;
            if (cols != n + 1 && cols != n + 2)
                throw IoError("'" + path + "': expected " + std::to_string(n + 1) + " or " +
                              std::to_string(n + 2) + " columns for group " + g.id);
            has_density = cols == n + 2;
            continue;
        }
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            try {
                std::size_t used = 0;
                row.push_back(std::stod(cell, &used));
            } catch (const std::exception&) {
                throw IoError("'" + path + "' line " + std::to_string(line_no) + ": bad number '" + cell + "'");
            }
        }
        if (static_cast<int>(row.size()) != n + 1 + (has_density ? 1 : 0))
            throw IoError("'" + path + "' line " + std::to_string(line_no) + ": wrong column count");
        rows.push_back(std::move(row));
    }
    if (rows.empty())
        throw IoError("'" + path + "': no data rows");

    // per-axis node coordinates
    std::vector<std::vector<double>> axes(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        auto& ax = axes[static_cast<std::size_t>(k)];
        for (const auto& r : rows)
            ax.push_back(r[static_cast<std::size_t>(k)]);
        std::sort(ax.begin(), ax.end());
        ax.erase(std::unique(ax.begin(), ax.end()), ax.end());
        if (ax.size() < 2)
            throw IoError("'" + path + "': axis " + std::to_string(k) + " needs at least two nodes");
    }
    Box box{Point(n), Point(n)};
    std::vector<int> dims(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        const auto& ax = axes[static_cast<std::size_t>(k)];
        const double h = (ax.back() - ax.front()) / static_cast<double>(ax.size() - 1);
        for (std::size_t j = 1; j < ax.size(); ++j)
            if (std::abs(ax[j] - ax[j - 1] - h) > 1e-6 * h)
                throw IoError("'" + path + "': axis " + std::to_string(k) + " is not uniformly spaced");
        box.lo(k) = ax.front() - 0.5 * h;
        box.hi(k) = ax.back() + 0.5 * h;
        dims[static_cast<std::size_t>(k)] = static_cast<int>(ax.size());
    }
    Grid grid(box, dims);
    if (static_cast<Eigen::Index>(rows.size()) != grid.size())
        throw IoError("'" + path + "': " + std::to_string(rows.size()) + " rows do not fill a " +
                      std::to_string(grid.size()) + "-node grid");
    Eigen::ArrayXd values = Eigen::ArrayXd::Constant(grid.size(), -1.0);
    std::optional<Eigen::ArrayXd> density;
    if (has_density)
        density.emplace(grid.size());
    for (const auto& r : rows) {
        Eigen::Index flat = 0;
        for (int k = 0; k < n; ++k) {
            const double h = grid.spacing()(k);
            const auto idx = static_cast<Eigen::Index>(std::lround((r[static_cast<std::size_t>(k)] - box.lo(k)) / h - 0.5));
            flat += idx * grid.stride(k);
        }
        if (values(flat) >= 0.0)
            throw IoError("'" + path + "': duplicate node");
        values(flat) = r[static_cast<std::size_t>(n)];
        if (density)
            (*density)(flat) = r[static_cast<std::size_t>(n + 1)];
    }
    return GridField(g, grid, std::move(values), std::move(density));
}

void write_field_binary(const std::string& path, const GridField& field)
{
    std::ofstream out = open_out(path, std::ios::out | std::ios::binary);
    const Grid& grid = field.grid();
    out.write(kMagic, 4);
    put<std::uint32_t>(out, kVersion);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(grid.dim()));
    put<std::uint32_t>(out, field.density() ? 1u : 0u);
    for (int d : grid.dims())
        put<std::uint32_t>(out, static_cast<std::uint32_t>(d));
    for (int k = 0; k < grid.dim(); ++k)
        put<double>(out, grid.box().lo(k));
    for (int k = 0; k < grid.dim(); ++k)
        put<double>(out, grid.box().hi(k));
    for (int k = 0; k < grid.dim(); ++k)
        put<double>(out, grid.spacing()(k));
    for (Eigen::Index i = 0; i < grid.size(); ++i)
        put<double>(out, field.values()(i));
    if (field.density())
        for (Eigen::Index i = 0; i < grid.size(); ++i)
            put<double>(out, (*field.density())(i));
    if (!out)
        throw IoError("write failed for '" + path + "'");
}

GridField read_field_binary(const std::string& path, const GroupSpec& g)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open field file '" + path + "'");
    char magic[4];
    if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0)
        throw IoError("'" + path + "': not a binary field (bad magic)");
    if (get<std::uint32_t>(in, path) != kVersion)
        throw IoError("'" + path + "': unsupported binary field version");
    const auto n = static_cast<int>(get<std::uint32_t>(in, path));
    if (n != g.n)
        throw IoError("'" + path + "': field has dimension " + std::to_string(n) + ", group " + g.id +
                      " needs " + std::to_string(g.n));
    const bool has_density = get<std::uint32_t>(in, path) != 0;
    std::vector<int> dims(static_cast<std::size_t>(n));
    for (int& d : dims)
        d = static_cast<int>(get<std::uint32_t>(in, path));
    Box box{Point(n), Point(n)};
    for (int k = 0; k < n; ++k)
        box.lo(k) = get<double>(in, path);
    for (int k = 0; k < n; ++k)
        box.hi(k) = get<double>(in, path);
    for (int k = 0; k < n; ++k)
        (void)get<double>(in, path); // spacing is implied by box and dims
    Grid grid(box, dims);
    Eigen::ArrayXd values(grid.size());
    for (Eigen::Index i = 0; i < grid.size(); ++i)
        values(i) = get<double>(in, path);
    std::optional<Eigen::ArrayXd> density;
    if (has_density) {
        density.emplace(grid.size());
        for (Eigen::Index i = 0; i < grid.size(); ++i)
            (*density)(i) = get<double>(in, path);
    }
    return GridField(g, grid, std::move(values), std::move(density));
}

GridField read_field(const std::string& path, const GroupSpec& g)
{
    if (path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0)
        return read_field_csv(path, g);
    return read_field_binary(path, g);
}

void write_table_csv(const std::string& path, const std::vector<std::string>& columns,
                     const std::vector<std::vector<double>>& rows, const CsvMeta& meta)
{
    std::ofstream out = open_out(path);
    write_meta(out, meta);
    for (std::size_t j = 0; j < columns.size(); ++j)
        out << (j ? "," : "") << columns[j];
    out << '\n';
    for (const auto& row : rows) {
        for (std::size_t j = 0; j < row.size(); ++j)
            out << (j ? "," : "") << fmt(row[j]);
        out << '\n';
    }
    if (!out)
        throw IoError("write failed for '" + path + "'");
}

} // namespace carnot
