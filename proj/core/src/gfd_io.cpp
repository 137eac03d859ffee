#include "roughflow/gfd_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <optional>

#include <json.hpp>

#include "roughflow/error.hpp"

namespace roughflow {
namespace {

using nlohmann::json;

struct TimeMeta {
  TimeGrid grid;
  TimeSampling sampling;
  double q;
  double alpha;
};

void write_payload(std::ostream& out, std::span<const double> values) {
  for (double v : values) {
    auto bits = std::bit_cast<std::uint64_t>(v);
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(bits >> (8 * i));
    out.write(reinterpret_cast<const char*>(b), 8);
  }
}

void read_payload(std::istream& in, std::span<double> values) {
  for (double& v : values) {
    unsigned char b[8];
    in.read(reinterpret_cast<char*>(b), 8);
    if (!in) fail(ErrorCode::io_error, "truncated gfd payload");
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    v = std::bit_cast<double>(bits);
  }
}

json header(const GridField& f, int time_index, double time) {
  const Torus& t = f.torus();
  return json{{"format", "gfd"},      {"version", 1},          {"d", t.dimension()},
              {"L", t.length()},      {"N", t.points()},       {"components", f.components()},
              {"time_index", time_index}, {"time", time}};
}

void write_record(std::ostream& out, const GridField& f, int time_index, double time,
                  const std::optional<TimeMeta>& meta) {
  json h = header(f, time_index, time);
  if (meta) {
    h["timegrid"] = {{"T", meta->grid.horizon()},
                     {"M", meta->grid.steps()},
                     {"sampling", meta->sampling == TimeSampling::nodes ? "nodes" : "cells"}};
    h["q"] = meta->q;
    h["alpha"] = meta->alpha;
  }
  out << h.dump() << '\n';
  write_payload(out, f.values());
}

bool read_record(std::istream& in, GridField& f, int& time_index, double& time, json& h) {
  std::string line;
  if (!std::getline(in, line)) return false;
  try {
    h = json::parse(line);
  } catch (const json::exception& e) {
    fail(ErrorCode::io_error, std::string("bad gfd header: ") + e.what());
  }
  if (h.value("format", "") != "gfd") fail(ErrorCode::io_error, "not a gfd record");
  Torus torus(h.at("d").get<int>(), h.at("L").get<double>(), h.at("N").get<int>());
  const int comps = h.at("components").get<int>();
  std::vector<double> values(torus.size() * comps);
  read_payload(in, values);
  f = GridField(torus, comps, std::move(values));
  time_index = h.at("time_index").get<int>();
  time = h.at("time").get<double>();
  return true;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::io_error, "cannot open " + path + " for writing");
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::io_error, "cannot open " + path);
  return in;
}

}  // namespace

void write_gfd_record(std::ostream& out, const GridField& f, int time_index, double time) {
  write_record(out, f, time_index, time, std::nullopt);
}

bool read_gfd_record(std::istream& in, GridField& f, int& time_index, double& time) {
  json h;
  return read_record(in, f, time_index, time, h);
}

void write_gfd(const std::string& path, const GridField& f) {
  auto out = open_out(path);
  write_record(out, f, 0, 0.0, std::nullopt);
}

GridField read_gfd_field(const std::string& path) {
  auto in = open_in(path);
  GridField f(Torus(1, 1.0, 2), 1);
  int idx;
  double t;
  json h;
  if (!read_record(in, f, idx, t, h)) fail(ErrorCode::io_error, "empty gfd file " + path);
  return f;
}

void write_gfd(const std::string& path, const TimeIndexedField& F) {
  auto out = open_out(path);
  const TimeMeta meta{F.grid(), F.sampling(), F.q(), F.alpha()};
  for (std::size_t k = 0; k < F.size(); ++k)
    write_record(out, F.slice(k), static_cast<int>(k), F.slice_time(k), meta);
  if (!out) fail(ErrorCode::io_error, "write failed for " + path);
}

TimeIndexedField read_gfd_timefield(const std::string& path) {
  auto in = open_in(path);
  std::vector<GridField> slices;
  GridField f(Torus(1, 1.0, 2), 1);
  int idx;
  double t;
  json h, first;
  while (read_record(in, f, idx, t, h)) {
    if (slices.empty()) first = h;
    slices.push_back(f);
  }
  if (slices.empty()) fail(ErrorCode::io_error, "empty gfd file " + path);
  if (!first.contains("timegrid")) fail(ErrorCode::io_error, "gfd file lacks time grid metadata");
  const auto& tg = first["timegrid"];
  const TimeSampling s = tg.at("sampling").get<std::string>() == "cells" ? TimeSampling::cells
                                                                          : TimeSampling::nodes;
  return TimeIndexedField(TimeGrid(tg.at("T").get<double>(), tg.at("M").get<int>()), s,
                          std::move(slices), first.value("q", 2.0), first.value("alpha", 0.5));
}

}  // namespace roughflow
