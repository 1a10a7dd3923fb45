#ifndef CARNOT_FIELD_IO_HPP
#define CARNOT_FIELD_IO_HPP

#include "carnot/grid_field.hpp"

#include <string>
#include <utility>
#include <vector>

namespace carnot {

/// Key/value pairs written as leading "# key: value" comment lines of every CSV.
using CsvMeta = std::vector<std::pair<std::string, std::string>>;

/// Node-per-row CSV: x_0..x_{n-1}, value[, density]. Leading '#' lines are comments.
void write_field_csv(const std::string& path, const GridField& field, const CsvMeta& meta = {});

/// Reads a node-per-row CSV. Nodes may come in any order but must fill a full uniform grid;
/// the box is reconstructed as [min - h/2, max + h/2] per axis.
GridField read_field_csv(const std::string& path, const GroupSpec& g);

/// Binary layout (little-endian): "CRGF", u32 version (1), u32 n, u32 has_density,
/// n x u32 dims, n x f64 box lo, n x f64 box hi, n x f64 spacing, row-major f64 values,
/// then f64 density when present.
void write_field_binary(const std::string& path, const GridField& field);
GridField read_field_binary(const std::string& path, const GroupSpec& g);

/// Dispatch on extension: ".csv" or anything else as binary.
GridField read_field(const std::string& path, const GroupSpec& g);

/// Plain numeric table with a header row.
void write_table_csv(const std::string& path, const std::vector<std::string>& columns,
                     const std::vector<std::vector<double>>& rows, const CsvMeta& meta = {});

} // namespace carnot

#endif // CARNOT_FIELD_IO_HPP
