#include "horst/model/model_io.hpp"

#include <array>
#include <cstring>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "horst/common/error.hpp"

namespace horst::model {

namespace {

static_assert(std::numeric_limits<float>::is_iec559, "IEEE-754 floats required");

void put_bytes(std::ostream& os, const void* p, std::size_t n) {
  os.write(static_cast<const char*>(p), std::streamsize(n));
}

template <class T>
void put(std::ostream& os, T v) {
  put_bytes(os, &v, sizeof v);
}

void get_bytes(std::istream& is, void* p, std::size_t n, const char* what) {
  is.read(static_cast<char*>(p), std::streamsize(n));
  if (std::size_t(is.gcount()) != n) {
    std::ostringstream os;
    os << "model file truncated while reading " << what;
    throw IoError(os.str());
  }
}

template <class T>
T get(std::istream& is, const char* what) {
  T v;
  get_bytes(is, &v, sizeof v, what);
  return v;
}

void put_field(std::ostream& os, const char* name,
               const std::vector<double>& f) {
  std::array<char, 16> buf{};
  std::strncpy(buf.data(), name, buf.size() - 1);
  put_bytes(os, buf.data(), buf.size());
  for (double v : f) put(os, float(v));
}

} // namespace

void save_model(const VtiModel& m, const std::string& path) {
  m.validate();
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open model file for writing: " + path);

  put_bytes(os, "FDM1", 4);
  put<std::uint32_t>(os, 1);
  for (int a = 0; a < 3; ++a) put<std::uint32_t>(os, std::uint32_t(m.grid.dims[a]));
  for (int a = 0; a < 3; ++a) put(os, m.grid.spacing[a]);
  for (int a = 0; a < 3; ++a) put(os, m.grid.origin[a]);
  put<std::uint32_t>(os, 6);

  std::vector<double> watermask(std::size_t(m.grid.size()), 0.0);
  for (int ix = 0; ix < m.grid.dims[0]; ++ix)
    for (int iy = 0; iy < m.grid.dims[1]; ++iy)
      for (int iz = 0; iz < m.grid.dims[2]; ++iz)
        if (m.water(ix, iy, iz))
          watermask[std::size_t(m.grid.index(ix, iy, iz))] = 1.0;

  put_field(os, "v0", m.v0);
  put_field(os, "delta", m.delta);
  put_field(os, "epsilon", m.epsilon);
  put_field(os, "rho", m.rho);
  put_field(os, "q", m.q);
  put_field(os, "watermask", watermask);
  if (!os) throw IoError("write failure on model file: " + path);
}

VtiModel load_model(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open model file: " + path);

  char magic[4];
  get_bytes(is, magic, 4, "magic");
  if (std::memcmp(magic, "FDM1", 4) != 0)
    throw IoError("bad model magic (expected FDM1): " + path);
  const auto version = get<std::uint32_t>(is, "version");
  if (version != 1) {
    std::ostringstream os;
    os << "unsupported model version " << version << ": " << path;
    throw IoError(os.str());
  }

  VtiModel m;
  for (int a = 0; a < 3; ++a)
    m.grid.dims[a] = int(get<std::uint32_t>(is, "dims"));
  for (int a = 0; a < 3; ++a) m.grid.spacing[a] = get<double>(is, "spacing");
  for (int a = 0; a < 3; ++a) m.grid.origin[a] = get<double>(is, "origin");
  const auto nfields = get<std::uint32_t>(is, "field_count");
  const auto n = std::size_t(m.grid.size());
  if (m.grid.size() <= 0 || m.grid.size() > (std::int64_t(1) << 31))
    throw IoError("implausible model dimensions: " + path);

  std::map<std::string, std::vector<double>> fields;
  for (std::uint32_t f = 0; f < nfields; ++f) {
    std::array<char, 16> buf{};
    get_bytes(is, buf.data(), buf.size(), "field name");
    buf.back() = '\0';
    std::vector<double> vals(n);
    for (std::size_t i = 0; i < n; ++i)
      vals[i] = double(get<float>(is, "field values"));
    fields.emplace(buf.data(), std::move(vals));
  }

  auto take = [&](const char* name) -> std::vector<double> {
    auto it = fields.find(name);
    if (it == fields.end())
      throw IoError(std::string("model file missing field '") + name + "': " +
                    path);
    return std::move(it->second);
  };
  m.v0 = take("v0");
  m.delta = take("delta");
  m.epsilon = take("epsilon");
  m.rho = take("rho");
  m.q = take("q");

  m.water_depth.assign(std::size_t(m.grid.dims[0]) * m.grid.dims[1], 0);
  if (fields.count("watermask")) {
    const auto mask = take("watermask");
    for (int ix = 0; ix < m.grid.dims[0]; ++ix)
      for (int iy = 0; iy < m.grid.dims[1]; ++iy) {
        int wd = 0;
        while (wd < m.grid.dims[2] &&
               mask[std::size_t(m.grid.index(ix, iy, wd))] > 0.5)
          ++wd;
        m.water_depth[std::size_t(ix) * m.grid.dims[1] + iy] = wd;
      }
  }
  m.validate();
  return m;
}

} // namespace horst::model
