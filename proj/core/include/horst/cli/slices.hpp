#ifndef HORST_CLI_SLICES_HPP
#define HORST_CLI_SLICES_HPP

#include <string>
#include <vector>

#include "horst/cli/config.hpp"
#include "horst/model/vti_model.hpp"

namespace horst::cli {

/// One extracted plane. values is nu x nv, v fastest. For an x slice the
/// in-plane axes are (y, z), for y (x, z), for z (x, y). overlay holds
/// |grad v0| at the same nodes when requested, else stays empty.
struct SliceData {
  int nu = 0, nv = 0;
  std::vector<double> values;
  std::vector<double> overlay;
};

SliceData extract_slice(const model::VtiModel& m, const SliceSpec& spec);

/// 8-bit binary portable graymap, min..max stretched to 0..255; a flat
/// slice renders mid-gray. Non-finite values clamp to the finite range.
void write_pgm(const std::vector<double>& values, int nu, int nv,
               const std::string& path);

/// values as CSV, one row per u, full double precision.
void write_slice_csv(const SliceData& s, const std::string& path);

/// base + ".pgm" and ".csv", plus base + "_overlay.pgm" when the spec
/// asks for the gradient-magnitude channel.
void export_slices(const model::VtiModel& m, const SliceSpec& spec,
                   const std::string& base_path);

} // namespace horst::cli

#endif
