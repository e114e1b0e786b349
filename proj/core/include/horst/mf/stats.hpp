#ifndef HORST_MF_STATS_HPP
#define HORST_MF_STATS_HPP

#include <string>

#include "horst/mf/factorize.hpp"
#include "horst/mf/solve.hpp"

namespace horst::mf {

/// Fixed column order shared by every solver-statistics table.
std::string stats_csv_header();
std::string stats_csv_row(const FactorStats& f, const SolveStats& s);

} // namespace horst::mf

#endif
