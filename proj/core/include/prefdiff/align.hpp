#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "prefdiff/adam.hpp"
#include "prefdiff/losses.hpp"
#include "prefdiff/pairs.hpp"

namespace prefdiff {

enum class Method { DiffusionDpo, DpoCm, Sdpo };

std::string method_name(Method m);
Method method_from_name(const std::string& name);

struct RunConfig {
    Method method = Method::Sdpo;
    LossConfig loss;
    AdamConfig opt;
    int steps = 1000;
    std::uint64_t seed = 0;
    int diag_cadence = 50;
    int density_probe_pairs = 32;
    std::string run_id = "run";
};

struct TrainLogRow {
    int step;
    int t;
    double loss;
    double logit;
    double w_raw;      // 1 for plain DPO
    double w_clipped;  // 1 for plain DPO
};

struct WeightLogRow {
    int step;
    int t;
    double raw;
    double clipped;
    double log_p_model;
    double log_q_forward;
};

// Mean winner/loser transition log-density over a fixed probe set, taken at
// one diagnostics checkpoint.
struct DensityTraceRow {
    int step;
    double mean_logp_winner;
    double mean_logp_loser;
    double diff;
};

struct AlignResult {
    DenoiserNet net;
    std::vector<TrainLogRow> log;
    std::vector<WeightLogRow> weight_log;
    std::vector<DensityTraceRow> trace;
};

// One pair and one timestep per optimizer step; ref stays frozen. The
// timestep is uniform over [2, T] (plain DPO additionally sees t=1) or the
// configured window. Throws on a non-finite loss, reporting the step's
// weight diagnostics.
AlignResult align(const DenoiserNet& net, const DenoiserNet& ref, const std::vector<PreferencePair>& pairs,
                  const NoiseSchedule& sched, const RunConfig& cfg);

// Pretraining loop for the epsilon objective; data comes from `dist`.
struct PretrainResult {
    DenoiserNet net;
    std::vector<std::pair<int, double>> loss_log;  // (step, batch loss)
};
PretrainResult pretrain(const DenoiserConfig& net_cfg, const ToyTarget& dist, const NoiseSchedule& sched,
                        int steps, int batch, const AdamConfig& opt, Rng& rng);

double mean_oracle_reward(const DenoiserNet& net, const ToyTarget& target, const NoiseSchedule& sched,
                          int n_samples, Rng& rng);

struct RoundMetric {
    int round;
    double mean_reward;
};

struct IterativeResult {
    DenoiserNet net;
    std::vector<RoundMetric> rounds;
};

// Fresh pairs are generated from the current net each round and trained for
// `epochs` passes; the reference stays the original pretrained model.
IterativeResult iterative_align(const DenoiserNet& net, const DenoiserNet& ref, const ToyTarget& target,
                                const NoiseSchedule& sched, int rounds, int pairs_per_round, int epochs,
                                const RunConfig& cfg);

}  // namespace prefdiff
