#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "prefdiff/adam.hpp"
#include "prefdiff/align.hpp"
#include "prefdiff/denoiser.hpp"
#include "prefdiff/schedule.hpp"
#include "prefdiff/target.hpp"

namespace prefdiff {

// Invalid or unknown configuration; carries the offending field.
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& field, const std::string& message)
        : std::runtime_error("config field '" + field + "': " + message), field_(field) {}
    const std::string& field() const { return field_; }

private:
    std::string field_;
};

// Experiment configuration, read from a `key = value` file (one pair per
// line, '#' comments). Unknown keys are rejected. The schema is documented
// in the README; schema_version is required.
struct ExperimentConfig {
    int schema_version = 1;

    // model
    int dim = 2;
    int conditions = 2;
    int hidden = 32;
    int hidden_layers = 2;
    int time_embed = 8;

    // schedule
    int timesteps = 1000;
    double beta_start = 1e-4;
    double beta_end = 0.02;

    // target and pretraining distribution (mode rows "x y ; x y ...")
    std::vector<std::vector<double>> target_modes = {{-1.5, 0.0}, {1.5, 0.0}};
    double target_cov = 0.02;
    std::vector<double> target_weights;  // empty -> uniform
    std::vector<std::vector<double>> pretrain_modes = {{-1.5, 2.6}, {1.5, -2.6}};
    double pretrain_cov = 0.0;                        // 0 -> target_cov

    // preference training
    std::string method = "sdpo";
    double beta = 0.02;
    double epsilon = 0.2;
    bool detach_weight = true;
    std::string weight_path = "winner";  // winner | loser | pair_max
    std::optional<double> hard_mask_threshold;
    std::optional<std::pair<int, int>> window;
    int steps = 1500;
    double lr = 3e-4;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.95;
    double adam_eps = 1e-8;
    int pairs = 10000;
    int diag_cadence = 50;

    // pretraining
    int pretrain_steps = 6000;
    int pretrain_batch = 64;
    double pretrain_lr = 3e-3;

    // evaluation
    int eval_samples = 256;

    // flow SDE
    double flow_eps = 0.1;
    int flow_steps = 200;
    int flow_paths = 1000;
    std::string flow_denoiser = "data";            // data | noise
    std::string flow_score_denominator = "alpha";  // alpha | beta
    int flow_train_steps = 0;                      // 0 -> closed-form denoiser
    int flow_hidden = 32;
    int flow_time_embed = 8;

    // iterative protocol
    int rounds = 10;
    int epochs = 20;
    int pairs_per_round = 64;

    void validate() const;

    NoiseSchedule make_schedule() const;
    DenoiserConfig make_denoiser_config() const;
    ToyTarget make_target() const;
    ToyTarget make_pretrain_distribution() const;
    LossConfig make_loss_config() const;
    AdamConfig make_adam_config() const;
    RunConfig make_run_config(std::uint64_t seed, const std::string& run_id) const;
};

ExperimentConfig parse_config_file(const std::string& path);
ExperimentConfig parse_config_text(const std::string& text);

// Canonical re-serialization including the effective seed; written into the
// run directory, never back to the input file.
std::string config_snapshot(const ExperimentConfig& cfg, std::uint64_t seed);

}  // namespace prefdiff
