#include "horst/mf/stats.hpp"

#include <sstream>

namespace horst::mf {

std::string stats_csv_header() {
  return "flops,flops_compress,factor_bytes,peak_bytes,fr_entries,"
         "dense_blocks,lr_blocks,mp_f32_bytes,mp_f24_bytes,mp_f16_bytes,"
         "front_count,factor_seconds,fwd_visits,bwd_visits,node_blocks,"
         "solve_flops";
}

std::string stats_csv_row(const FactorStats& f, const SolveStats& s) {
  std::ostringstream os;
  os.precision(9);
  os << f.flops << ',' << f.flops_compress << ',' << f.factor_bytes << ','
     << f.peak_bytes << ',' << f.fr_entries << ',' << f.dense_blocks << ','
     << f.lr_blocks << ',' << f.mp_bytes[0] << ',' << f.mp_bytes[1] << ','
     << f.mp_bytes[2] << ',' << f.front_count << ',' << f.seconds << ','
     << s.forward_visits << ',' << s.backward_visits << ',' << s.node_blocks
     << ',' << s.flops;
  return os.str();
}

} // namespace horst::mf
