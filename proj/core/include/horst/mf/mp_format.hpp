#ifndef HORST_MF_MP_FORMAT_HPP
#define HORST_MF_MP_FORMAT_HPP

#include <Eigen/Core>
#include <array>
#include <complex>
#include <cstdint>
#include <vector>

namespace horst::mf {

/// Storage grades for factor payloads. kF24 keeps the float sign/exponent
/// and the top 15 mantissa bits in three bytes; kF16 is IEEE half.
enum class Prec : std::uint8_t { kF32 = 0, kF24 = 1, kF16 = 2 };

/// Unit roundoffs of the three grades, indexed by Prec.
constexpr std::array<double, 3> kPrecUlp = {6.0e-8, 1.6e-5, 5.0e-4};
constexpr std::array<int, 3> kPrecBytes = {4, 3, 2};
const char* prec_name(Prec p);

std::uint16_t float_to_half(float f);
float half_to_float(std::uint16_t h);
void encode_f24(const float* src, std::size_t n, std::uint8_t* dst);
void decode_f24(const std::uint8_t* src, std::size_t n, float* dst);

using MatrixXcf =
    Eigen::Matrix<std::complex<float>, Eigen::Dynamic, Eigen::Dynamic>;

/// Mixed-precision container for one low-rank pair B ~ X*Y. Component i
/// (column i of X, row i of Y) is graded by its singular-value weight
/// sigma[i]: the cheapest grade whose roundoff keeps u*sigma_i below
/// eps*sigma_0 wins. Y rows are stored divided by a per-component float
/// scale so small components keep relative accuracy in narrow formats; X
/// columns are near-orthonormal and stored unscaled.
struct MpPanel {
  int m = 0, n = 0, r = 0;
  std::vector<Prec> prec;      // per component
  std::vector<float> yscale;   // per component
  std::vector<std::uint8_t> data;
  std::array<std::int64_t, 3> payload_bytes{0, 0, 0};

  std::int64_t bytes() const {
    return std::int64_t(data.size()) + std::int64_t(prec.size()) +
           4ll * std::int64_t(yscale.size()) + 16;
  }
  static MpPanel encode(const MatrixXcf& X, const MatrixXcf& Y,
                        const std::vector<float>& sigma, double eps);
  void decode(MatrixXcf& X, MatrixXcf& Y) const;
};

} // namespace horst::mf

#endif
