#ifndef HORST_FWI_DATASET_HPP
#define HORST_FWI_DATASET_HPP

#include <array>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

namespace horst::fwi {

/// Source and receiver geometry in meters. Under reciprocity the sources
/// are the ocean-bottom nodes and the receivers the shot carpet, so the
/// expensive solves run over the small side of the acquisition.
struct Acquisition {
  std::vector<std::array<double, 3>> sources;
  std::vector<std::array<double, 3>> receivers;
  bool reciprocal = true;
};

/// Monochromatic gather: complex traces per (source, receiver) with a
/// live-trace mask and one complex signature per source. Trace storage is
/// row-major by source; the mask packs bit (src * n_rec + rec), LSB first.
/// Dead traces stay excluded from every inner product downstream.
struct FreqGather {
  double f_hz = 0.0;
  int n_src = 0;
  int n_rec = 0;
  std::vector<std::uint8_t> mask;
  std::vector<std::complex<float>> signature;
  std::vector<std::complex<float>> data;

  std::size_t mask_bytes() const {
    return (std::size_t(n_src) * std::size_t(n_rec) + 7) / 8;
  }
  bool live(int s, int r) const {
    const std::size_t k = std::size_t(s) * std::size_t(n_rec) + std::size_t(r);
    return (mask[k >> 3] >> (k & 7)) & 1u;
  }
  void set_live(int s, int r, bool v) {
    const std::size_t k = std::size_t(s) * std::size_t(n_rec) + std::size_t(r);
    if (v)
      mask[k >> 3] |= std::uint8_t(1u << (k & 7));
    else
      mask[k >> 3] &= std::uint8_t(~(1u << (k & 7)));
  }
  std::complex<float>& at(int s, int r) {
    return data[std::size_t(s) * std::size_t(n_rec) + std::size_t(r)];
  }
  const std::complex<float>& at(int s, int r) const {
    return data[std::size_t(s) * std::size_t(n_rec) + std::size_t(r)];
  }

  /// Sized, all-live, zero-trace gather with unit signatures.
  static FreqGather sized(double f_hz, int n_src, int n_rec);

  void validate() const;  // throws ConfigError on inconsistent sizes
};

/// The full multi-frequency dataset an inversion consumes.
struct FreqDataset {
  Acquisition acq;
  std::vector<FreqGather> gathers;

  /// Gather whose frequency matches within a relative tolerance, or null.
  const FreqGather* find(double f_hz, double rel_tol = 1e-9) const;
  void validate() const;  // gather dims must match the acquisition
};

/// Gather container format, little-endian:
///   magic "FDG1" | version u32 | n_freq u32 |
///   per frequency: f f64, n_src u32, n_rec u32, mask bytes,
///                  signatures (complex64 x n_src),
///                  traces (complex64, row-major [src][rec]).
/// Truncated or malformed files raise IoError naming the byte offset.
void save_gathers(const FreqDataset& d, const std::string& path);
FreqDataset load_gathers(const std::string& path);  // acquisition left empty

/// Geometry sidecar, JSON: {"reciprocal": bool, "sources": [[x,y,z]...],
/// "receivers": [[x,y,z]...]}.
void save_acquisition(const Acquisition& a, const std::string& path);
Acquisition load_acquisition(const std::string& path);

} // namespace horst::fwi

#endif
