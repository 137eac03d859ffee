#pragma once

#include <iosfwd>
#include <string>

#include "roughflow/grid.hpp"

namespace roughflow {

// A .gfd record is one JSON header line followed by the field's values as
// little-endian float64, point-major with components fastest. A time-indexed
// field is stored as consecutive records, one per slice.

void write_gfd_record(std::ostream& out, const GridField& f, int time_index, double time);
/// Reads one record; returns false at clean end of stream.
bool read_gfd_record(std::istream& in, GridField& f, int& time_index, double& time);

void write_gfd(const std::string& path, const GridField& f);
GridField read_gfd_field(const std::string& path);

void write_gfd(const std::string& path, const TimeIndexedField& F);
TimeIndexedField read_gfd_timefield(const std::string& path);

}  // namespace roughflow
