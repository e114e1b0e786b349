#include "horst/mf/mp_format.hpp"

#include <cmath>
#include <cstring>

#include "horst/common/error.hpp"

namespace horst::mf {

const char* prec_name(Prec p) {
  switch (p) {
    case Prec::kF32: return "f32";
    case Prec::kF24: return "f24";
    case Prec::kF16: return "f16";
  }
  return "?";
}

namespace {

std::uint32_t float_bits(float f) {
  std::uint32_t u;
  std::memcpy(&u, &f, 4);
  return u;
}

float bits_float(std::uint32_t u) {
  float f;
  std::memcpy(&f, &u, 4);
  return f;
}

} // namespace

std::uint16_t float_to_half(float f) {
  const std::uint32_t x = float_bits(f);
  const std::uint16_t sign = std::uint16_t((x >> 16) & 0x8000u);
  const std::uint32_t exp = (x >> 23) & 0xFFu;
  std::uint32_t man = x & 0x7FFFFFu;
  if (exp == 0xFFu) return sign | 0x7C00u | (man ? 0x200u : 0u);
  const int e = int(exp) - 112; // rebias 127 -> 15
  if (e >= 0x1F) return sign | 0x7C00u;
  if (e <= 0) {
    if (e < -10) return sign;
    man |= 0x800000u;
    const int shift = 14 - e;
    std::uint32_t hman = man >> shift;
    const std::uint32_t rem = man & ((1u << shift) - 1u);
    const std::uint32_t half = 1u << (shift - 1);
    if (rem > half || (rem == half && (hman & 1u))) ++hman;
    return std::uint16_t(sign | hman);
  }
  std::uint16_t h = std::uint16_t(sign | (std::uint32_t(e) << 10) | (man >> 13));
  const std::uint32_t rem = man & 0x1FFFu;
  if (rem > 0x1000u || (rem == 0x1000u && (h & 1u))) ++h; // carry may round to inf
  return h;
}

float half_to_float(std::uint16_t h) {
  const std::uint32_t sign = std::uint32_t(h & 0x8000u) << 16;
  std::uint32_t exp = (h >> 10) & 0x1Fu;
  std::uint32_t man = h & 0x3FFu;
  if (exp == 0x1Fu) return bits_float(sign | 0x7F800000u | (man << 13));
  if (exp == 0) {
    if (man == 0) return bits_float(sign);
    exp = 113;
    while (!(man & 0x400u)) {
      man <<= 1;
      --exp;
    }
    man &= 0x3FFu;
    return bits_float(sign | (exp << 23) | (man << 13));
  }
  return bits_float(sign | ((exp + 112) << 23) | (man << 13));
}

void encode_f24(const float* src, std::size_t n, std::uint8_t* dst) {
  for (std::size_t i = 0; i < n; ++i) {
    std::uint32_t u = float_bits(src[i]);
    if (((u >> 23) & 0xFFu) != 0xFFu) u += 0x80u; // round; inf/nan kept as-is
    u >>= 8;
    dst[3 * i + 0] = std::uint8_t(u);
    dst[3 * i + 1] = std::uint8_t(u >> 8);
    dst[3 * i + 2] = std::uint8_t(u >> 16);
  }
}

void decode_f24(const std::uint8_t* src, std::size_t n, float* dst) {
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint32_t u = std::uint32_t(src[3 * i + 0]) |
                            (std::uint32_t(src[3 * i + 1]) << 8) |
                            (std::uint32_t(src[3 * i + 2]) << 16);
    dst[i] = bits_float(u << 8);
  }
}

namespace {

void put_scalars(std::vector<std::uint8_t>& out, Prec p, const float* v,
                 std::size_t n) {
  const std::size_t at = out.size();
  switch (p) {
    case Prec::kF32:
      out.resize(at + 4 * n);
      std::memcpy(out.data() + at, v, 4 * n);
      break;
    case Prec::kF24:
      out.resize(at + 3 * n);
      encode_f24(v, n, out.data() + at);
      break;
    case Prec::kF16: {
      out.resize(at + 2 * n);
      for (std::size_t i = 0; i < n; ++i) {
        const std::uint16_t h = float_to_half(v[i]);
        std::memcpy(out.data() + at + 2 * i, &h, 2);
      }
      break;
    }
  }
}

std::size_t get_scalars(const std::vector<std::uint8_t>& in, std::size_t at,
                        Prec p, float* v, std::size_t n) {
  switch (p) {
    case Prec::kF32:
      std::memcpy(v, in.data() + at, 4 * n);
      return at + 4 * n;
    case Prec::kF24:
      decode_f24(in.data() + at, n, v);
      return at + 3 * n;
    case Prec::kF16:
      for (std::size_t i = 0; i < n; ++i) {
        std::uint16_t h;
        std::memcpy(&h, in.data() + at + 2 * i, 2);
        v[i] = half_to_float(h);
      }
      return at + 2 * n;
  }
  return at;
}

} // namespace

MpPanel MpPanel::encode(const MatrixXcf& X, const MatrixXcf& Y,
                        const std::vector<float>& sigma, double eps) {
  if (X.cols() != Y.rows() || std::size_t(X.cols()) != sigma.size())
    throw NumericError("mixed-precision panel: shape mismatch");
  MpPanel p;
  p.m = int(X.rows());
  p.n = int(Y.cols());
  p.r = int(X.cols());
  p.prec.resize(p.r, Prec::kF32);
  p.yscale.resize(p.r, 1.0f);
  const double s0 = p.r ? double(sigma[0]) : 0.0;
  std::vector<float> buf;
  for (int i = 0; i < p.r; ++i) {
    Prec grade = Prec::kF32;
    for (int g = 2; g >= 1; --g) {
      if (kPrecUlp[g] * double(sigma[i]) <= eps * s0) {
        grade = Prec(g);
        break;
      }
    }
    p.prec[i] = grade;
    float sc = Y.row(i).cwiseAbs().maxCoeff();
    if (!(sc > 0.0f) || !std::isfinite(sc)) sc = 1.0f;
    p.yscale[i] = sc;

    buf.resize(std::size_t(2 * (p.m + p.n)));
    for (int k = 0; k < p.m; ++k) {
      buf[std::size_t(2 * k)] = X(k, i).real();
      buf[std::size_t(2 * k + 1)] = X(k, i).imag();
    }
    const float inv = 1.0f / sc;
    for (int k = 0; k < p.n; ++k) {
      buf[std::size_t(2 * (p.m + k))] = Y(i, k).real() * inv;
      buf[std::size_t(2 * (p.m + k) + 1)] = Y(i, k).imag() * inv;
    }
    const std::size_t before = p.data.size();
    put_scalars(p.data, grade, buf.data(), buf.size());
    p.payload_bytes[std::size_t(grade)] +=
        std::int64_t(p.data.size() - before);
  }
  return p;
}

void MpPanel::decode(MatrixXcf& X, MatrixXcf& Y) const {
  X.resize(m, r);
  Y.resize(r, n);
  std::vector<float> buf(std::size_t(2 * (m + n)));
  std::size_t at = 0;
  for (int i = 0; i < r; ++i) {
    at = get_scalars(data, at, prec[std::size_t(i)], buf.data(), buf.size());
    for (int k = 0; k < m; ++k)
      X(k, i) = {buf[std::size_t(2 * k)], buf[std::size_t(2 * k + 1)]};
    const float sc = yscale[std::size_t(i)];
    for (int k = 0; k < n; ++k)
      Y(i, k) = {buf[std::size_t(2 * (m + k))] * sc,
                 buf[std::size_t(2 * (m + k) + 1)] * sc};
  }
}

} // namespace horst::mf
