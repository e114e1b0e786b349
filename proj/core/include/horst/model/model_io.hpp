#ifndef HORST_MODEL_MODEL_IO_HPP
#define HORST_MODEL_MODEL_IO_HPP

#include <string>

#include "horst/model/vti_model.hpp"

namespace horst::model {

/// Binary model interchange, little-endian, layout:
///   magic "FDM1" | version u32 | nx ny nz u32 | hx hy hz f64 |
///   ox oy oz f64 | field_count u32 | per field: 16-byte ASCII name,
///   then nx*ny*nz f32 values, z fastest.
/// Fields written: v0, delta, epsilon, rho, q, watermask (1 in water).
/// The water-bottom index is rebuilt from watermask on read.
void save_model(const VtiModel& m, const std::string& path);
VtiModel load_model(const std::string& path);

} // namespace horst::model

#endif
