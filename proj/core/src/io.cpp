#include "bubbletree/io.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>

#include <json.hpp>

namespace bubbletree {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

constexpr char kMagic[8] = {'B', 'T', 'F', 'L', 'D', '1', '\n', '\0'};

nlohmann::ordered_json grid_params_json(const GridParams& gp) {
  nlohmann::ordered_json j;
  j["n_r"] = gp.n_r;
  j["n_theta"] = gp.n_theta;
  j["r_min"] = gp.r_min;
  j["r_max"] = gp.r_max;
  j["blend_halfwidth"] = gp.blend_halfwidth;
  j["spacing"] = gp.spacing == RadialSpacing::Log ? "log" : "polar_arc";
  auto bands = nlohmann::ordered_json::array();
  for (const auto& b : gp.bands)
    bands.push_back({{"center_s", b.center_s}, {"width", b.width}, {"boost", b.boost}});
  j["bands"] = bands;
  return j;
}

GridParams grid_params_from_json(const nlohmann::json& j) {
  GridParams gp;
  gp.n_r = j.at("n_r").get<int>();
  gp.n_theta = j.at("n_theta").get<int>();
  gp.r_min = j.at("r_min").get<double>();
  gp.r_max = j.at("r_max").get<double>();
  gp.blend_halfwidth = j.at("blend_halfwidth").get<double>();
  gp.spacing = j.at("spacing").get<std::string>() == "polar_arc" ? RadialSpacing::PolarArc
                                                                 : RadialSpacing::Log;
  for (const auto& b : j.at("bands"))
    gp.bands.push_back({b.at("center_s").get<double>(), b.at("width").get<double>(),
                        b.at("boost").get<double>()});
  return gp;
}

}  // namespace

void dump_field(const Field& f, const std::string& base_path) {
  nlohmann::ordered_json side;
  side["grid"] = grid_params_json(f.grid()->params());
  side["ncomp"] = f.ncomp();
  side["metadata"] = f.metadata();
  std::ofstream sidecar(base_path + ".json");
  if (!sidecar) fail(ErrorCode::ConfigInvalid, "cannot write " + base_path + ".json");
  sidecar << side.dump(2) << "\n";

  std::ofstream bin(base_path + ".btf", std::ios::binary);
  if (!bin) fail(ErrorCode::ConfigInvalid, "cannot write " + base_path + ".btf");
  bin.write(kMagic, sizeof(kMagic));
  const int32_t dims[3] = {f.grid()->n_r(), f.grid()->n_theta(), f.ncomp()};
  bin.write(reinterpret_cast<const char*>(dims), sizeof(dims));
  for (int c = 0; c < 2; ++c) {
    const auto& raw = f.raw(Chart(c));
    bin.write(reinterpret_cast<const char*>(raw.data()),
              std::streamsize(raw.size() * sizeof(double)));
  }
}

Field load_field(const std::string& base_path) {
  std::ifstream sidecar(base_path + ".json");
  if (!sidecar) fail(ErrorCode::ConfigInvalid, "cannot read " + base_path + ".json");
  nlohmann::json side = nlohmann::json::parse(sidecar);
  const GridParams gp = grid_params_from_json(side.at("grid"));
  auto grid = RadialGrid::make(gp);
  Field f(grid, side.at("ncomp").get<int>(), side.at("metadata").get<std::string>());

  std::ifstream bin(base_path + ".btf", std::ios::binary);
  if (!bin) fail(ErrorCode::ConfigInvalid, "cannot read " + base_path + ".btf");
  char magic[sizeof(kMagic)];
  bin.read(magic, sizeof(magic));
  if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    fail(ErrorCode::ConfigInvalid, "bad field file magic in " + base_path);
  int32_t dims[3];
  bin.read(reinterpret_cast<char*>(dims), sizeof(dims));
  if (dims[0] != gp.n_r || dims[1] != gp.n_theta || dims[2] != f.ncomp())
    fail(ErrorCode::ConfigInvalid, "field file does not match its sidecar");
  for (int c = 0; c < 2; ++c) {
    auto& raw = f.raw(Chart(c));
    bin.read(reinterpret_cast<char*>(raw.data()),
             std::streamsize(raw.size() * sizeof(double)));
    if (!bin) fail(ErrorCode::ConfigInvalid, "truncated field payload in " + base_path);
  }
  return f;
}

struct CsvWriter::Impl {
  std::ofstream out;
};

CsvWriter::CsvWriter(const std::string& path) : impl_(new Impl) {
  impl_->out.open(path);
  if (!impl_->out) {
    delete impl_;
    fail(ErrorCode::ConfigInvalid, "cannot open " + path);
  }
}

CsvWriter::~CsvWriter() { delete impl_; }

void CsvWriter::header(const std::vector<std::string>& columns) { row(columns); }

void CsvWriter::row(const std::vector<std::string>& cells) {
  for (size_t i = 0; i < cells.size(); ++i) {
    if (i) impl_->out << ',';
    impl_->out << cells[i];
  }
  impl_->out << '\n';
}

void CsvWriter::row_values(const std::vector<double>& values) {
  std::vector<std::string> cells;
  cells.reserve(values.size());
  for (const double v : values) cells.push_back(format_double(v));
  row(cells);
}

void CsvWriter::flush() { impl_->out.flush(); }

}  // namespace bubbletree
