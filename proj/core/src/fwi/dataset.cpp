#include "horst/fwi/dataset.hpp"

#include <cstring>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "horst/common/error.hpp"

namespace horst::fwi {

namespace {

constexpr char kMagic[4] = {'F', 'D', 'G', '1'};
constexpr std::uint32_t kVersion = 1;

// bounds that keep size arithmetic far from overflow on any platform
constexpr std::uint32_t kMaxFreq = 1u << 20;
constexpr std::uint32_t kMaxSide = 1u << 24;

struct Reader {
  std::ifstream in;
  std::uint64_t off = 0;
  std::string path;

  Reader(const std::string& p) : in(p, std::ios::binary), path(p) {
    if (!in) throw IoError("cannot open gather file: " + p);
  }
  void bytes(void* dst, std::size_t n) {
    in.read(reinterpret_cast<char*>(dst), std::streamsize(n));
    if (std::size_t(in.gcount()) != n)
      throw IoError("truncated gather file " + path + " at byte offset " +
                    std::to_string(off + std::uint64_t(in.gcount())));
    off += n;
  }
  template <class T>
  T scalar() {
    T v;
    bytes(&v, sizeof(T));
    return v;
  }
};

void put(std::ofstream& out, const void* src, std::size_t n) {
  out.write(reinterpret_cast<const char*>(src), std::streamsize(n));
}

template <class T>
void put_scalar(std::ofstream& out, T v) {
  put(out, &v, sizeof(T));
}

} // namespace

FreqGather FreqGather::sized(double f_hz, int n_src, int n_rec) {
  if (n_src < 0 || n_rec < 0)
    throw ConfigError("gather dimensions must be non-negative");
  FreqGather g;
  g.f_hz = f_hz;
  g.n_src = n_src;
  g.n_rec = n_rec;
  g.mask.assign(g.mask_bytes(), 0);
  const std::size_t nt = std::size_t(n_src) * std::size_t(n_rec);
  for (std::size_t k = 0; k < nt; ++k) g.mask[k >> 3] |= std::uint8_t(1u << (k & 7));
  g.signature.assign(std::size_t(n_src), std::complex<float>(1.0f, 0.0f));
  g.data.assign(nt, std::complex<float>(0.0f, 0.0f));
  return g;
}

void FreqGather::validate() const {
  if (n_src < 0 || n_rec < 0 || !(f_hz > 0))
    throw ConfigError("gather has non-positive frequency or dimensions");
  if (mask.size() != mask_bytes() ||
      signature.size() != std::size_t(n_src) ||
      data.size() != std::size_t(n_src) * std::size_t(n_rec))
    throw ConfigError("gather buffers do not match its dimensions");
}

const FreqGather* FreqDataset::find(double f_hz, double rel_tol) const {
  for (const auto& g : gathers)
    if (std::abs(g.f_hz - f_hz) <= rel_tol * std::max(1.0, std::abs(f_hz)))
      return &g;
  return nullptr;
}

void FreqDataset::validate() const {
  for (const auto& g : gathers) {
    g.validate();
    if (!acq.sources.empty() || !acq.receivers.empty()) {
      if (g.n_src != int(acq.sources.size()) ||
          g.n_rec != int(acq.receivers.size()))
        throw ConfigError("gather dimensions do not match the acquisition");
    }
  }
}

void save_gathers(const FreqDataset& d, const std::string& path) {
  d.validate();
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write gather file: " + path);
  put(out, kMagic, 4);
  put_scalar(out, kVersion);
  put_scalar(out, std::uint32_t(d.gathers.size()));
  for (const auto& g : d.gathers) {
    put_scalar(out, g.f_hz);
    put_scalar(out, std::uint32_t(g.n_src));
    put_scalar(out, std::uint32_t(g.n_rec));
    put(out, g.mask.data(), g.mask.size());
    put(out, g.signature.data(), g.signature.size() * sizeof(std::complex<float>));
    put(out, g.data.data(), g.data.size() * sizeof(std::complex<float>));
  }
  out.flush();
  if (!out) throw IoError("write failed for gather file: " + path);
}

FreqDataset load_gathers(const std::string& path) {
  Reader rd(path);
  char magic[4];
  rd.bytes(magic, 4);
  if (std::memcmp(magic, kMagic, 4) != 0)
    throw IoError("bad magic in gather file " + path + " at byte offset 0");
  const auto version = rd.scalar<std::uint32_t>();
  if (version != kVersion)
    throw IoError("unsupported gather file version " + std::to_string(version) +
                  " in " + path);
  const auto nf = rd.scalar<std::uint32_t>();
  if (nf > kMaxFreq)
    throw IoError("implausible frequency count in gather file " + path);
  FreqDataset d;
  d.gathers.reserve(nf);
  for (std::uint32_t k = 0; k < nf; ++k) {
    FreqGather g;
    g.f_hz = rd.scalar<double>();
    const auto ns = rd.scalar<std::uint32_t>();
    const auto nr = rd.scalar<std::uint32_t>();
    if (ns > kMaxSide || nr > kMaxSide)
      throw IoError("implausible gather dimensions in " + path +
                    " at byte offset " + std::to_string(rd.off - 8));
    g.n_src = int(ns);
    g.n_rec = int(nr);
    g.mask.resize(g.mask_bytes());
    rd.bytes(g.mask.data(), g.mask.size());
    g.signature.resize(ns);
    rd.bytes(g.signature.data(), g.signature.size() * sizeof(std::complex<float>));
    g.data.resize(std::size_t(ns) * std::size_t(nr));
    rd.bytes(g.data.data(), g.data.size() * sizeof(std::complex<float>));
    g.validate();
    d.gathers.push_back(std::move(g));
  }
  return d;
}

void save_acquisition(const Acquisition& a, const std::string& path) {
  nlohmann::json j;
  j["reciprocal"] = a.reciprocal;
  auto pts = [](const std::vector<std::array<double, 3>>& v) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& p : v) arr.push_back({p[0], p[1], p[2]});
    return arr;
  };
  j["sources"] = pts(a.sources);
  j["receivers"] = pts(a.receivers);
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write acquisition file: " + path);
  out << j.dump(2) << "\n";
  if (!out) throw IoError("write failed for acquisition file: " + path);
}

Acquisition load_acquisition(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open acquisition file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw IoError("malformed acquisition file " + path + ": " + e.what());
  }
  Acquisition a;
  try {
    a.reciprocal = j.value("reciprocal", true);
    auto pts = [](const nlohmann::json& arr) {
      std::vector<std::array<double, 3>> v;
      v.reserve(arr.size());
      for (const auto& p : arr)
        v.push_back({p.at(0).get<double>(), p.at(1).get<double>(),
                     p.at(2).get<double>()});
      return v;
    };
    a.sources = pts(j.at("sources"));
    a.receivers = pts(j.at("receivers"));
  } catch (const nlohmann::json::exception& e) {
    throw IoError("malformed acquisition file " + path + ": " + e.what());
  }
  return a;
}

} // namespace horst::fwi
