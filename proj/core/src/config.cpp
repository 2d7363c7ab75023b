#include "prefdiff/config.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "prefdiff/csv.hpp"

namespace prefdiff {

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

double parse_double(const std::string& key, const std::string& v) {
    try {
        size_t used = 0;
        const double x = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument("trailing characters");
        return x;
    } catch (const std::exception&) {
        throw ConfigError(key, "expected a number, got '" + v + "'");
    }
}

int parse_int(const std::string& key, const std::string& v) {
    try {
        size_t used = 0;
        const int x = std::stoi(v, &used);
        if (used != v.size()) throw std::invalid_argument("trailing characters");
        return x;
    } catch (const std::exception&) {
        throw ConfigError(key, "expected an integer, got '" + v + "'");
    }
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ConfigError(key, "expected true/false, got '" + v + "'");
}

std::vector<double> parse_numbers(const std::string& key, const std::string& v) {
    std::vector<double> out;
    std::istringstream in(v);
    std::string tok;
    while (in >> tok) out.push_back(parse_double(key, tok));
    if (out.empty()) throw ConfigError(key, "expected numbers");
    return out;
}

std::vector<std::vector<double>> parse_modes(const std::string& key, const std::string& v) {
    std::vector<std::vector<double>> out;
    std::string part;
    std::istringstream in(v);
    while (std::getline(in, part, ';')) {
        part = trim(part);
        if (part.empty()) throw ConfigError(key, "empty mode entry");
        out.push_back(parse_numbers(key, part));
    }
    if (out.empty()) throw ConfigError(key, "expected mode rows separated by ';'");
    return out;
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text) {
    ExperimentConfig cfg;
    bool saw_version = false;

    std::map<std::string, std::function<void(const std::string&)>> setters;
    auto set_int = [&](const std::string& k, int& field) {
        setters[k] = [&field, k](const std::string& v) { field = parse_int(k, v); };
    };
    auto set_double = [&](const std::string& k, double& field) {
        setters[k] = [&field, k](const std::string& v) { field = parse_double(k, v); };
    };
    auto set_bool = [&](const std::string& k, bool& field) {
        setters[k] = [&field, k](const std::string& v) { field = parse_bool(k, v); };
    };
    auto set_string = [&](const std::string& k, std::string& field) {
        setters[k] = [&field](const std::string& v) { field = v; };
    };

    setters["schema_version"] = [&](const std::string& v) {
        cfg.schema_version = parse_int("schema_version", v);
        saw_version = true;
    };
    set_int("dim", cfg.dim);
    set_int("conditions", cfg.conditions);
    set_int("hidden", cfg.hidden);
    set_int("hidden_layers", cfg.hidden_layers);
    set_int("time_embed", cfg.time_embed);
    set_int("timesteps", cfg.timesteps);
    set_double("beta_start", cfg.beta_start);
    set_double("beta_end", cfg.beta_end);
    setters["target_modes"] = [&](const std::string& v) { cfg.target_modes = parse_modes("target_modes", v); };
    set_double("target_cov", cfg.target_cov);
    setters["target_weights"] = [&](const std::string& v) {
        cfg.target_weights = parse_numbers("target_weights", v);
    };
    setters["pretrain_modes"] = [&](const std::string& v) {
        cfg.pretrain_modes = parse_modes("pretrain_modes", v);
    };
    set_double("pretrain_cov", cfg.pretrain_cov);
    set_string("method", cfg.method);
    set_double("beta", cfg.beta);
    set_double("epsilon", cfg.epsilon);
    set_bool("detach_weight", cfg.detach_weight);
    set_string("weight_path", cfg.weight_path);
    setters["hard_mask_threshold"] = [&](const std::string& v) {
        cfg.hard_mask_threshold = parse_double("hard_mask_threshold", v);
    };
    setters["window"] = [&](const std::string& v) {
        const std::vector<double> xs = parse_numbers("window", v);
        if (xs.size() != 2) throw ConfigError("window", "expected two integers t_lo t_hi");
        cfg.window = {static_cast<int>(xs[0]), static_cast<int>(xs[1])};
    };
    set_int("steps", cfg.steps);
    set_double("lr", cfg.lr);
    set_double("adam_beta1", cfg.adam_beta1);
    set_double("adam_beta2", cfg.adam_beta2);
    set_double("adam_eps", cfg.adam_eps);
    set_int("pairs", cfg.pairs);
    set_int("diag_cadence", cfg.diag_cadence);
    set_int("pretrain_steps", cfg.pretrain_steps);
    set_int("pretrain_batch", cfg.pretrain_batch);
    set_double("pretrain_lr", cfg.pretrain_lr);
    set_int("eval_samples", cfg.eval_samples);
    set_double("flow_eps", cfg.flow_eps);
    set_int("flow_steps", cfg.flow_steps);
    set_int("flow_paths", cfg.flow_paths);
    set_string("flow_denoiser", cfg.flow_denoiser);
    set_string("flow_score_denominator", cfg.flow_score_denominator);
    set_int("flow_train_steps", cfg.flow_train_steps);
    set_int("flow_hidden", cfg.flow_hidden);
    set_int("flow_time_embed", cfg.flow_time_embed);
    set_int("rounds", cfg.rounds);
    set_int("epochs", cfg.epochs);
    set_int("pairs_per_round", cfg.pairs_per_round);

    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(line_no), "expected 'key = value', got '" + line + "'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const auto it = setters.find(key);
        if (it == setters.end()) throw ConfigError(key, "unknown key");
        if (value.empty()) throw ConfigError(key, "empty value");
        it->second(value);
    }
    if (!saw_version) throw ConfigError("schema_version", "missing (this schema is version 1)");
    if (cfg.schema_version != 1)
        throw ConfigError("schema_version", "unsupported version " + std::to_string(cfg.schema_version));
    cfg.validate();
    return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config", "cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

void ExperimentConfig::validate() const {
    if (dim < 1 || dim > 16) throw ConfigError("dim", "must be in [1, 16]");
    if (conditions < 1) throw ConfigError("conditions", "must be >= 1");
    if (hidden < 1) throw ConfigError("hidden", "must be >= 1");
    if (hidden_layers < 1) throw ConfigError("hidden_layers", "must be >= 1");
    if (time_embed < 2 || time_embed % 2 != 0) throw ConfigError("time_embed", "must be even and >= 2");
    if (timesteps < 2) throw ConfigError("timesteps", "must be >= 2");
    if (!(0.0 < beta_start && beta_start <= beta_end && beta_end < 1.0))
        throw ConfigError("beta_start", "need 0 < beta_start <= beta_end < 1");
    if (target_modes.empty()) throw ConfigError("target_modes", "need at least one mode");
    for (const auto& m : target_modes)
        if (static_cast<int>(m.size()) != dim) throw ConfigError("target_modes", "mode dimension != dim");
    if (!pretrain_modes.empty()) {
        if (pretrain_modes.size() != target_modes.size())
            throw ConfigError("pretrain_modes", "mode count must match target_modes");
        for (const auto& m : pretrain_modes)
            if (static_cast<int>(m.size()) != dim) throw ConfigError("pretrain_modes", "mode dimension != dim");
    }
    if (target_cov <= 0.0) throw ConfigError("target_cov", "must be positive");
    if (pretrain_cov < 0.0) throw ConfigError("pretrain_cov", "must be nonnegative");
    if (!target_weights.empty()) {
        if (target_weights.size() != target_modes.size())
            throw ConfigError("target_weights", "length must match target_modes");
        double s = 0.0;
        for (double w : target_weights) {
            if (w <= 0.0) throw ConfigError("target_weights", "weights must be positive");
            s += w;
        }
        if (std::abs(s - 1.0) > 1e-9) throw ConfigError("target_weights", "weights must sum to 1");
    }
    if (conditions > static_cast<int>(target_modes.size()))
        throw ConfigError("conditions", "more conditions than modes");
    if (method != "dpo" && method != "cm" && method != "sdpo")
        throw ConfigError("method", "expected dpo|cm|sdpo, got '" + method + "'");
    if (beta <= 0.0) throw ConfigError("beta", "must be positive");
    if (!(0.0 < epsilon && epsilon < 1.0)) throw ConfigError("epsilon", "must lie in (0, 1)");
    if (weight_path != "winner" && weight_path != "loser" && weight_path != "pair_max")
        throw ConfigError("weight_path", "expected winner|loser|pair_max");
    if (window) {
        if (!(1 <= window->first && window->first < window->second && window->second <= timesteps))
            throw ConfigError("window", "need 1 <= t_lo < t_hi <= timesteps");
    }
    if (steps < 0) throw ConfigError("steps", "must be nonnegative");
    if (lr <= 0.0) throw ConfigError("lr", "must be positive");
    if (pairs < 1) throw ConfigError("pairs", "must be >= 1");
    if (diag_cadence < 1) throw ConfigError("diag_cadence", "must be >= 1");
    if (pretrain_steps < 1) throw ConfigError("pretrain_steps", "must be >= 1");
    if (pretrain_batch < 1) throw ConfigError("pretrain_batch", "must be >= 1");
    if (pretrain_lr <= 0.0) throw ConfigError("pretrain_lr", "must be positive");
    if (eval_samples < 1) throw ConfigError("eval_samples", "must be >= 1");
    if (flow_eps < 0.0) throw ConfigError("flow_eps", "must be nonnegative");
    if (flow_steps < 2) throw ConfigError("flow_steps", "must be >= 2");
    if (flow_paths < 1) throw ConfigError("flow_paths", "must be >= 1");
    if (flow_denoiser != "data" && flow_denoiser != "noise")
        throw ConfigError("flow_denoiser", "expected data|noise");
    if (flow_score_denominator != "alpha" && flow_score_denominator != "beta")
        throw ConfigError("flow_score_denominator", "expected alpha|beta");
    if (flow_train_steps < 0) throw ConfigError("flow_train_steps", "must be nonnegative");
    if (rounds < 1) throw ConfigError("rounds", "must be >= 1");
    if (epochs < 1) throw ConfigError("epochs", "must be >= 1");
    if (pairs_per_round < 1) throw ConfigError("pairs_per_round", "must be >= 1");
}

NoiseSchedule ExperimentConfig::make_schedule() const {
    return NoiseSchedule::linear(timesteps, beta_start, beta_end);
}

DenoiserConfig ExperimentConfig::make_denoiser_config() const {
    return {dim, conditions, hidden, hidden_layers, time_embed};
}

namespace {
ToyTarget build_target(const std::vector<std::vector<double>>& modes, double cov,
                       const std::vector<double>& weights, int conditions) {
    ToyTarget t;
    for (size_t i = 0; i < modes.size(); ++i) {
        ToyTarget::Mode m;
        m.mean = Tensor({static_cast<int>(modes[i].size())}, modes[i]);
        m.cov = cov;
        m.weight = weights.empty() ? 1.0 / modes.size() : weights[i];
        t.modes.push_back(std::move(m));
    }
    for (int c = 0; c < conditions; ++c) t.condition_mode.push_back(c % static_cast<int>(modes.size()));
    return t;
}
}  // namespace

ToyTarget ExperimentConfig::make_target() const {
    ToyTarget t = build_target(target_modes, target_cov, target_weights, conditions);
    t.validate();
    return t;
}

ToyTarget ExperimentConfig::make_pretrain_distribution() const {
    const auto& modes = pretrain_modes.empty() ? target_modes : pretrain_modes;
    const double cov = pretrain_cov == 0.0 ? target_cov : pretrain_cov;
    ToyTarget t = build_target(modes, cov, target_weights, conditions);
    t.validate();
    return t;
}

LossConfig ExperimentConfig::make_loss_config() const {
    LossConfig lc;
    lc.beta = beta;
    lc.clip.epsilon = epsilon;
    lc.clip.detach_weight = detach_weight;
    lc.hard_mask_threshold = hard_mask_threshold;
    lc.timestep_window = window;
    lc.weight_path = weight_path == "winner"  ? WeightPath::Winner
                     : weight_path == "loser" ? WeightPath::Loser
                                              : WeightPath::PairMax;
    return lc;
}

AdamConfig ExperimentConfig::make_adam_config() const {
    return {lr, adam_beta1, adam_beta2, adam_eps};
}

RunConfig ExperimentConfig::make_run_config(std::uint64_t seed, const std::string& run_id) const {
    RunConfig rc;
    rc.method = method_from_name(method);
    rc.loss = make_loss_config();
    rc.opt = make_adam_config();
    rc.steps = steps;
    rc.seed = seed;
    rc.diag_cadence = diag_cadence;
    rc.run_id = run_id;
    return rc;
}

namespace {
std::string modes_to_string(const std::vector<std::vector<double>>& modes) {
    std::string s;
    for (size_t i = 0; i < modes.size(); ++i) {
        if (i) s += " ; ";
        for (size_t j = 0; j < modes[i].size(); ++j) {
            if (j) s += " ";
            s += format_double(modes[i][j]);
        }
    }
    return s;
}
}  // namespace

std::string config_snapshot(const ExperimentConfig& cfg, std::uint64_t seed) {
    std::ostringstream out;
    out << "schema_version = " << cfg.schema_version << "\n";
    out << "# effective seed for this run\n";
    out << "# seed: " << seed << "\n";
    out << "dim = " << cfg.dim << "\n";
    out << "conditions = " << cfg.conditions << "\n";
    out << "hidden = " << cfg.hidden << "\n";
    out << "hidden_layers = " << cfg.hidden_layers << "\n";
    out << "time_embed = " << cfg.time_embed << "\n";
    out << "timesteps = " << cfg.timesteps << "\n";
    out << "beta_start = " << format_double(cfg.beta_start) << "\n";
    out << "beta_end = " << format_double(cfg.beta_end) << "\n";
    out << "target_modes = " << modes_to_string(cfg.target_modes) << "\n";
    out << "target_cov = " << format_double(cfg.target_cov) << "\n";
    if (!cfg.target_weights.empty()) {
        out << "target_weights =";
        for (double w : cfg.target_weights) out << " " << format_double(w);
        out << "\n";
    }
    if (!cfg.pretrain_modes.empty()) out << "pretrain_modes = " << modes_to_string(cfg.pretrain_modes) << "\n";
    if (cfg.pretrain_cov != 0.0) out << "pretrain_cov = " << format_double(cfg.pretrain_cov) << "\n";
    out << "method = " << cfg.method << "\n";
    out << "beta = " << format_double(cfg.beta) << "\n";
    out << "epsilon = " << format_double(cfg.epsilon) << "\n";
    out << "detach_weight = " << (cfg.detach_weight ? "true" : "false") << "\n";
    out << "weight_path = " << cfg.weight_path << "\n";
    if (cfg.hard_mask_threshold) out << "hard_mask_threshold = " << format_double(*cfg.hard_mask_threshold) << "\n";
    if (cfg.window) out << "window = " << cfg.window->first << " " << cfg.window->second << "\n";
    out << "steps = " << cfg.steps << "\n";
    out << "lr = " << format_double(cfg.lr) << "\n";
    out << "adam_beta1 = " << format_double(cfg.adam_beta1) << "\n";
    out << "adam_beta2 = " << format_double(cfg.adam_beta2) << "\n";
    out << "adam_eps = " << format_double(cfg.adam_eps) << "\n";
    out << "pairs = " << cfg.pairs << "\n";
    out << "diag_cadence = " << cfg.diag_cadence << "\n";
    out << "pretrain_steps = " << cfg.pretrain_steps << "\n";
    out << "pretrain_batch = " << cfg.pretrain_batch << "\n";
    out << "pretrain_lr = " << format_double(cfg.pretrain_lr) << "\n";
    out << "eval_samples = " << cfg.eval_samples << "\n";
    out << "flow_eps = " << format_double(cfg.flow_eps) << "\n";
    out << "flow_steps = " << cfg.flow_steps << "\n";
    out << "flow_paths = " << cfg.flow_paths << "\n";
    out << "flow_denoiser = " << cfg.flow_denoiser << "\n";
    out << "flow_score_denominator = " << cfg.flow_score_denominator << "\n";
    out << "flow_train_steps = " << cfg.flow_train_steps << "\n";
    out << "flow_hidden = " << cfg.flow_hidden << "\n";
    out << "flow_time_embed = " << cfg.flow_time_embed << "\n";
    out << "rounds = " << cfg.rounds << "\n";
    out << "epochs = " << cfg.epochs << "\n";
    out << "pairs_per_round = " << cfg.pairs_per_round << "\n";
    return out.str();
}

}  // namespace prefdiff
