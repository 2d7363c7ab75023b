#pragma once

#include <vector>

#include "prefdiff/pairs.hpp"
#include "prefdiff/weights.hpp"

namespace prefdiff {

struct WeightCurveRow {
    int bin;
    int t_lo;
    int t_hi;      // inclusive
    double mean_raw;
    int n;
};

// Mean raw importance weight per timestep bin over [2, T], computed along
// the winner path of each pair. Bin membership draws and posterior draws
// come from rng, so two curves built with the same seed share their
// timesteps and are directly comparable.
std::vector<WeightCurveRow> weight_curve(const DenoiserNet& net, const std::vector<PreferencePair>& pairs,
                                         const NoiseSchedule& sched, int bins, Rng rng);

// Same, over an explicit t range.
std::vector<WeightCurveRow> weight_curve(const DenoiserNet& net, const std::vector<PreferencePair>& pairs,
                                         const NoiseSchedule& sched, int bins, int t_lo, int t_hi, Rng rng);

// One-shot winner/loser mean transition log-density over pairs at t drawn
// from [t_lo, t_hi]; the standing-start version of the align trace.
struct DensitySnapshot {
    double mean_logp_winner;
    double mean_logp_loser;
    double diff;
};
DensitySnapshot density_snapshot(const DenoiserNet& net, const std::vector<PreferencePair>& pairs,
                                 int t_lo, int t_hi, const NoiseSchedule& sched, Rng rng);

// Mean |log raw weight| over t drawn uniformly from [t_lo, t_hi], winner
// path; the saturation diagnostic.
double mean_abs_log_weight(const DenoiserNet& net, const std::vector<PreferencePair>& pairs,
                           const NoiseSchedule& sched, int t_lo, int t_hi, Rng rng);

}  // namespace prefdiff
