#ifndef HORST_CLI_SURVEY_HPP
#define HORST_CLI_SURVEY_HPP

#include "horst/cli/config.hpp"
#include "horst/fwi/dataset.hpp"
#include "horst/model/vti_model.hpp"

namespace horst::cli {

struct SurveyResult {
  model::VtiModel m_true;
  model::VtiModel m_start;
  fwi::Acquisition acq;
};

/// Base model from the config: a flat water layer over a linear v(z)
/// gradient, isotropic water, constant anisotropy below, densities from
/// the velocity polynomial.
model::VtiModel make_base_model(const BaseModelConfig& b);

/// Inverse-crime survey over a base model. The true model adds the
/// spec's Gaussian anomalies to v0 outside the water column; the
/// starting model is the base unchanged. Ocean-bottom nodes sit on a
/// staggered grid (the reciprocal sources), shots on a regular carpet
/// (the receivers). Anomaly centers must lie inside the volume and at
/// least one node must fit inside the margins.
SurveyResult synthesize_survey(const SurveySpec& spec,
                               const model::VtiModel& base);

/// Default pitches after scaling: {obn_pitch, shot_dx, shot_dy} in m.
std::array<double, 3> survey_pitches(const SurveySpec& spec);

} // namespace horst::cli

#endif
