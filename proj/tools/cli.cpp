#include "cli.hpp"

#include <CLI11.hpp>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "prefdiff/align.hpp"
#include "prefdiff/checkpoint.hpp"
#include "prefdiff/config.hpp"
#include "prefdiff/csv.hpp"
#include "prefdiff/diagnostics.hpp"
#include "prefdiff/flow_sde.hpp"
#include "prefdiff/svg.hpp"

namespace fs = std::filesystem;

namespace prefdiff::cli {

namespace {

struct CommonArgs {
    std::string config_path;
    std::uint64_t seed = 0;
    std::string out_dir;
    std::string init_checkpoint;
};

void ensure_out_dir(const std::string& out) {
    fs::create_directories(out);
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path);
    f << text;
}

void write_snapshot(const ExperimentConfig& cfg, std::uint64_t seed, const std::string& out) {
    write_text(out + "/config.snapshot", config_snapshot(cfg, seed));
}

std::string run_id_for(const std::string& command, std::uint64_t seed) {
    return command + "-seed" + std::to_string(seed);
}

void write_pairs_csv(const std::string& path, const std::string& run_id,
                     const std::vector<PreferencePair>& pairs, int dim) {
    std::vector<std::string> cols = {"run_id", "pair_id", "condition", "provenance", "reward_w", "reward_l"};
    for (int i = 0; i < dim; ++i) cols.push_back("x0_w_" + std::to_string(i));
    for (int i = 0; i < dim; ++i) cols.push_back("x0_l_" + std::to_string(i));
    CsvWriter w(path, cols);
    for (size_t i = 0; i < pairs.size(); ++i) {
        const PreferencePair& p = pairs[i];
        w.field(run_id).field(static_cast<long>(i)).field(p.c);
        w.field(p.provenance == Provenance::OnPolicy ? std::string("on-policy") : std::string("unlike"));
        w.field(p.reward_w).field(p.reward_l);
        for (int k = 0; k < dim; ++k) w.field(p.x0_w[k]);
        for (int k = 0; k < dim; ++k) w.field(p.x0_l[k]);
        w.end_row();
    }
}

std::vector<PreferencePair> read_pairs_csv(const std::string& path, int dim) {
    const CsvTable t = read_csv(path);
    std::vector<PreferencePair> pairs;
    const int c_cond = t.column_index("condition");
    const int c_prov = t.column_index("provenance");
    const int c_rw = t.column_index("reward_w");
    const int c_rl = t.column_index("reward_l");
    std::vector<int> wi(static_cast<size_t>(dim)), li(static_cast<size_t>(dim));
    for (int i = 0; i < dim; ++i) {
        wi[static_cast<size_t>(i)] = t.column_index("x0_w_" + std::to_string(i));
        li[static_cast<size_t>(i)] = t.column_index("x0_l_" + std::to_string(i));
    }
    for (size_t r = 0; r < t.rows.size(); ++r) {
        PreferencePair p;
        p.c = static_cast<int>(t.number(r, c_cond));
        p.provenance =
            t.rows[r][static_cast<size_t>(c_prov)] == "unlike" ? Provenance::Unlike : Provenance::OnPolicy;
        p.reward_w = t.number(r, c_rw);
        p.reward_l = t.number(r, c_rl);
        p.x0_w = Tensor({dim});
        p.x0_l = Tensor({dim});
        for (int i = 0; i < dim; ++i) {
            p.x0_w[i] = t.number(r, wi[static_cast<size_t>(i)]);
            p.x0_l[i] = t.number(r, li[static_cast<size_t>(i)]);
        }
        pairs.push_back(std::move(p));
    }
    return pairs;
}

void write_training_logs(const std::string& out, const std::string& run_id, const std::string& method,
                         double beta, const AlignResult& result) {
    {
        CsvWriter w(out + "/training_log.csv",
                    {"run_id", "step", "t", "method", "loss", "logit", "w_raw", "w_clipped", "beta"});
        for (const TrainLogRow& r : result.log) {
            w.field(run_id).field(r.step).field(r.t).field(method);
            w.field(r.loss).field(r.logit).field(r.w_raw).field(r.w_clipped).field(beta);
            w.end_row();
        }
    }
    {
        CsvWriter w(out + "/weight_report.csv",
                    {"run_id", "step", "t", "raw", "clipped", "log_p_model", "log_q_forward"});
        for (const WeightLogRow& r : result.weight_log) {
            w.field(run_id).field(r.step).field(r.t);
            w.field(r.raw).field(r.clipped).field(r.log_p_model).field(r.log_q_forward);
            w.end_row();
        }
    }
    {
        CsvWriter w(out + "/density_trace.csv",
                    {"run_id", "step", "mean_logp_winner", "mean_logp_loser", "diff"});
        for (const DensityTraceRow& r : result.trace) {
            w.field(run_id).field(r.step);
            w.field(r.mean_logp_winner).field(r.mean_logp_loser).field(r.diff);
            w.end_row();
        }
    }
}

void write_weight_curve_csv(const std::string& path, const std::string& run_id,
                            const std::vector<WeightCurveRow>& rows) {
    CsvWriter w(path, {"run_id", "bin", "t_lo", "t_hi", "mean_raw", "n"});
    for (const WeightCurveRow& r : rows) {
        w.field(run_id).field(r.bin).field(r.t_lo).field(r.t_hi).field(r.mean_raw).field(r.n);
        w.end_row();
    }
}

int cmd_pretrain(const CommonArgs& a) {
    const ExperimentConfig cfg = parse_config_file(a.config_path);
    ensure_out_dir(a.out_dir);
    write_snapshot(cfg, a.seed, a.out_dir);
    const NoiseSchedule sched = cfg.make_schedule();
    Rng rng(a.seed);
    const PretrainResult r = pretrain(cfg.make_denoiser_config(), cfg.make_pretrain_distribution(), sched,
                                      cfg.pretrain_steps, cfg.pretrain_batch,
                                      {cfg.pretrain_lr, 0.9, 0.999, 1e-8}, rng);
    const std::string run_id = run_id_for("pretrain", a.seed);
    {
        CsvWriter w(a.out_dir + "/pretrain_log.csv", {"run_id", "step", "loss"});
        for (const auto& [step, loss] : r.loss_log) {
            w.field(run_id).field(step).field(loss);
            w.end_row();
        }
    }
    save_checkpoint(r.net, a.out_dir + "/checkpoint.txt");
    std::cout << "pretrained " << cfg.pretrain_steps << " steps; checkpoint at " << a.out_dir
              << "/checkpoint.txt\n";
    return 0;
}

int cmd_gen_pairs(const CommonArgs& a, int n, bool unlike) {
    const ExperimentConfig cfg = parse_config_file(a.config_path);
    ensure_out_dir(a.out_dir);
    write_snapshot(cfg, a.seed, a.out_dir);
    const NoiseSchedule sched = cfg.make_schedule();
    const ToyTarget target = cfg.make_target();
    const DenoiserNet net = load_checkpoint(a.init_checkpoint);
    Rng rng = Rng(a.seed).split("gen-pairs");
    const int count = n > 0 ? n : cfg.pairs;
    const std::vector<PreferencePair> pairs = unlike ? gen_unlike_pairs(target, net, sched, count, rng)
                                                     : gen_pairs(net, target, sched, count, rng);
    const std::string run_id = run_id_for(unlike ? "gen-pairs-unlike" : "gen-pairs", a.seed);
    write_pairs_csv(a.out_dir + "/pairs.csv", run_id, pairs, cfg.dim);
    std::cout << "wrote " << pairs.size() << " pairs to " << a.out_dir << "/pairs.csv\n";
    return 0;
}

int cmd_align(const CommonArgs& a, const std::string& method_override, const std::string& pairs_file) {
    ExperimentConfig cfg = parse_config_file(a.config_path);
    if (!method_override.empty()) {
        cfg.method = method_override;
        cfg.validate();
    }
    ensure_out_dir(a.out_dir);
    write_snapshot(cfg, a.seed, a.out_dir);
    const NoiseSchedule sched = cfg.make_schedule();
    const ToyTarget target = cfg.make_target();
    const DenoiserNet net = load_checkpoint(a.init_checkpoint);
    const DenoiserNet ref = net;

    Rng rng(a.seed);
    std::vector<PreferencePair> pairs;
    if (!pairs_file.empty()) {
        pairs = read_pairs_csv(pairs_file, cfg.dim);
    } else {
        Rng pair_rng = rng.split("pairs");
        pairs = gen_pairs(net, target, sched, cfg.pairs, pair_rng);
    }

    const std::string run_id = run_id_for("align-" + cfg.method, a.seed);
    const RunConfig rc = cfg.make_run_config(rng.split("align").seed(), run_id);
    const AlignResult result = align(net, ref, pairs, sched, rc);

    write_training_logs(a.out_dir, run_id, cfg.method, cfg.beta, result);
    {
        Rng curve_rng = rng.split("weight-curve");
        const size_t probe_n = std::min<size_t>(pairs.size(), 128);
        const std::vector<PreferencePair> probe(pairs.begin(), pairs.begin() + static_cast<long>(probe_n));
        write_weight_curve_csv(a.out_dir + "/weight_curve.csv", run_id,
                               weight_curve(result.net, probe, sched, 10, curve_rng));
    }
    save_checkpoint(result.net, a.out_dir + "/checkpoint.txt");
    std::cout << "aligned " << rc.steps << " steps with " << cfg.method << "; outputs in " << a.out_dir
              << "\n";
    return 0;
}

int cmd_iterate(const CommonArgs& a, const std::string& method_override) {
    ExperimentConfig cfg = parse_config_file(a.config_path);
    if (!method_override.empty()) {
        cfg.method = method_override;
        cfg.validate();
    }
    ensure_out_dir(a.out_dir);
    write_snapshot(cfg, a.seed, a.out_dir);
    const NoiseSchedule sched = cfg.make_schedule();
    const ToyTarget target = cfg.make_target();
    const DenoiserNet net = load_checkpoint(a.init_checkpoint);
    const DenoiserNet ref = net;

    const std::string run_id = run_id_for("iterate-" + cfg.method, a.seed);
    RunConfig rc = cfg.make_run_config(a.seed, run_id);
    const IterativeResult result =
        iterative_align(net, ref, target, sched, cfg.rounds, cfg.pairs_per_round, cfg.epochs, rc);
    {
        CsvWriter w(a.out_dir + "/rounds.csv", {"run_id", "round", "mean_reward"});
        for (const RoundMetric& r : result.rounds) {
            w.field(run_id).field(r.round).field(r.mean_reward);
            w.end_row();
        }
    }
    save_checkpoint(result.net, a.out_dir + "/checkpoint.txt");
    std::cout << "iterated " << cfg.rounds << " rounds; outputs in " << a.out_dir << "\n";
    return 0;
}

int cmd_diagnose(const CommonArgs& a, const std::string& what, int n, int bins) {
    const ExperimentConfig cfg = parse_config_file(a.config_path);
    ensure_out_dir(a.out_dir);
    write_snapshot(cfg, a.seed, a.out_dir);
    const NoiseSchedule sched = cfg.make_schedule();
    const ToyTarget target = cfg.make_target();
    const DenoiserNet net = load_checkpoint(a.init_checkpoint);
    Rng rng(a.seed);
    const std::string run_id = run_id_for("diagnose-" + what, a.seed);

    if (what == "weight-curve") {
        Rng pair_rng = rng.split("pairs");
        const std::vector<PreferencePair> pairs = gen_pairs(net, target, sched, n, pair_rng);
        write_weight_curve_csv(a.out_dir + "/weight_curve.csv", run_id,
                               weight_curve(net, pairs, sched, bins, rng.split("curve")));
        std::cout << "wrote " << a.out_dir << "/weight_curve.csv\n";
        return 0;
    }
    if (what == "weight-compare") {
        Rng pair_rng = rng.split("pairs");
        const std::vector<PreferencePair> on_policy = gen_pairs(net, target, sched, n, pair_rng);
        Rng unlike_rng = rng.split("unlike");
        const std::vector<PreferencePair> unlike = gen_unlike_pairs(target, net, sched, n, unlike_rng);
        // Matched draws: both curves share the same bin/timestep stream.
        const std::vector<WeightCurveRow> on_rows = weight_curve(net, on_policy, sched, bins, rng.split("curve"));
        const std::vector<WeightCurveRow> un_rows = weight_curve(net, unlike, sched, bins, rng.split("curve"));
        CsvWriter w(a.out_dir + "/weight_compare.csv",
                    {"run_id", "bin", "t_lo", "t_hi", "mean_raw_on_policy", "mean_raw_unlike"});
        for (size_t i = 0; i < on_rows.size(); ++i) {
            w.field(run_id).field(on_rows[i].bin).field(on_rows[i].t_lo).field(on_rows[i].t_hi);
            w.field(on_rows[i].mean_raw).field(un_rows[i].mean_raw);
            w.end_row();
        }
        std::cout << "wrote " << a.out_dir << "/weight_compare.csv\n";
        return 0;
    }
    if (what == "density-trace") {
        Rng pair_rng = rng.split("pairs");
        const std::vector<PreferencePair> pairs = gen_pairs(net, target, sched, n, pair_rng);
        const DensitySnapshot s =
            density_snapshot(net, pairs, sched.T / 2, 3 * sched.T / 5, sched, rng.split("trace"));
        CsvWriter w(a.out_dir + "/density_trace.csv",
                    {"run_id", "step", "mean_logp_winner", "mean_logp_loser", "diff"});
        w.field(run_id).field(0).field(s.mean_logp_winner).field(s.mean_logp_loser).field(s.diff);
        w.end_row();
        std::cout << "wrote " << a.out_dir << "/density_trace.csv\n";
        return 0;
    }
    std::cerr << "error: unknown --what '" << what << "' (weight-curve|weight-compare|density-trace)\n";
    return 2;
}

int cmd_sde_sample(const CommonArgs& a, int paths_override, int trace_paths) {
    const ExperimentConfig cfg = parse_config_file(a.config_path);
    ensure_out_dir(a.out_dir);
    write_snapshot(cfg, a.seed, a.out_dir);
    InterpolantSchedule sched = InterpolantSchedule::linear(cfg.flow_eps);
    sched.score_denominator_beta = cfg.flow_score_denominator == "beta";
    const DenoiserTarget kind = cfg.flow_denoiser == "noise" ? DenoiserTarget::Noise : DenoiserTarget::Data;

    Rng rng(a.seed);
    DenoiserField field;
    FlowDenoiserNet trained;
    if (cfg.flow_train_steps > 0) {
        const ToyTarget target = cfg.make_target();
        Rng data_rng = rng.split("flow-data");
        std::vector<Tensor> data;
        data.reserve(2048);
        for (int i = 0; i < 2048; ++i)
            data.push_back(target.sample_condition(target.sample_condition_id(data_rng), data_rng));
        Rng init_rng = rng.split("flow-init");
        trained = FlowDenoiserNet(cfg.dim, cfg.flow_hidden, 2, cfg.flow_time_embed, init_rng);
        Rng train_rng = rng.split("flow-train");
        const double loss = train_denoiser(trained, data, sched, kind, cfg.flow_train_steps, 32,
                                           {1e-3, 0.9, 0.999, 1e-8}, train_rng);
        field = trained.as_field();
        std::cout << "trained flow denoiser (" << cfg.flow_denoiser << " target), tail loss " << loss << "\n";
    } else {
        field = gaussian_denoiser(sched, kind);
    }

    const int n_paths = paths_override > 0 ? paths_override : cfg.flow_paths;
    const std::string run_id = run_id_for("sde-sample", a.seed);
    Rng path_rng = rng.split("paths");
    {
        std::vector<std::string> cols = {"run_id", "path_id"};
        for (int i = 0; i < cfg.dim; ++i) cols.push_back("x_" + std::to_string(i));
        CsvWriter w(a.out_dir + "/endpoints.csv", cols);
        std::optional<CsvWriter> trace;
        if (trace_paths > 0) {
            std::vector<std::string> tc = {"run_id", "path_id", "t"};
            for (int i = 0; i < cfg.dim; ++i) tc.push_back("x_" + std::to_string(i));
            trace.emplace(a.out_dir + "/paths.csv", tc);
        }
        for (int p = 0; p < n_paths; ++p) {
            Rng stream = path_rng.split(static_cast<std::uint64_t>(p));
            const std::vector<PathPoint> path = sde_sample_path(field, sched, cfg.flow_steps, cfg.dim, stream);
            const Tensor& x = path.back().x;
            w.field(run_id).field(static_cast<long>(p));
            for (int i = 0; i < cfg.dim; ++i) w.field(x[i]);
            w.end_row();
            if (trace && p < trace_paths) {
                for (const PathPoint& pt : path) {
                    trace->field(run_id).field(static_cast<long>(p)).field(pt.t);
                    for (int i = 0; i < cfg.dim; ++i) trace->field(pt.x[i]);
                    trace->end_row();
                }
            }
        }
    }
    std::cout << "wrote " << n_paths << " endpoints to " << a.out_dir << "/endpoints.csv\n";
    return 0;
}

struct PlotSpec {
    std::string csv;
    std::string svg;
    std::string title;
    std::string x_col;
    std::string y_col;
    std::string y2_col;  // optional second series
};

int cmd_report(const std::string& run_dir) {
    std::string message;
    const int rc = emit_plots(run_dir, &message);
    std::cout << message;
    if (rc != 0) return rc;

    std::ostringstream report;
    report << "run report: " << run_dir << "\n";
    const std::string tl = run_dir + "/training_log.csv";
    if (fs::exists(tl)) {
        const CsvTable t = read_csv(tl);
        if (!t.rows.empty()) {
            const int c_loss = t.column_index("loss");
            const int c_step = t.column_index("step");
            double first = t.number(0, c_loss);
            double last = t.number(t.rows.size() - 1, c_loss);
            size_t tail = std::min<size_t>(t.rows.size(), 50);
            double tail_mean = 0.0;
            for (size_t i = t.rows.size() - tail; i < t.rows.size(); ++i) tail_mean += t.number(i, c_loss);
            tail_mean /= static_cast<double>(tail);
            report << "  steps: " << t.number(t.rows.size() - 1, c_step) << "\n";
            report << "  loss first/last/tail-mean: " << format_double(first) << " / " << format_double(last)
                   << " / " << format_double(tail_mean) << "\n";
        }
    }
    const std::string wc = run_dir + "/weight_curve.csv";
    if (fs::exists(wc)) {
        const CsvTable t = read_csv(wc);
        if (t.rows.size() >= 2) {
            const int c_mean = t.column_index("mean_raw");
            report << "  weight curve first bin " << format_double(t.number(0, c_mean)) << ", last bin "
                   << format_double(t.number(t.rows.size() - 1, c_mean)) << "\n";
        }
    }
    const std::string rd = run_dir + "/rounds.csv";
    if (fs::exists(rd)) {
        const CsvTable t = read_csv(rd);
        if (!t.rows.empty()) {
            const int c_r = t.column_index("mean_reward");
            report << "  rounds: first " << format_double(t.number(0, c_r)) << ", last "
                   << format_double(t.number(t.rows.size() - 1, c_r)) << "\n";
        }
    }
    write_text(run_dir + "/report.txt", report.str());
    std::cout << report.str();
    return 0;
}

}  // namespace

int emit_plots(const std::string& run_dir, std::string* message) {
    std::ostringstream out;
    int written = 0;
    int candidates = 0;

    const auto plot_series = [&](const std::string& csv, const std::string& svg, const std::string& title,
                                 const std::string& x_col, const std::vector<std::string>& y_cols,
                                 const std::string& x_label, const std::string& y_label) {
        ++candidates;
        const std::string path = run_dir + "/" + csv;
        if (!fs::exists(path)) {
            out << "skipped " << csv << " (missing)\n";
            return;
        }
        const CsvTable t = read_csv(path);
        if (t.rows.empty()) {
            out << "skipped " << csv << " (empty)\n";
            return;
        }
        std::vector<Series> series;
        const int xc = t.column_index(x_col);
        for (const std::string& y_col : y_cols) {
            Series s;
            s.label = y_col;
            const int yc = t.column_index(y_col);
            for (size_t r = 0; r < t.rows.size(); ++r) {
                s.x.push_back(t.number(r, xc));
                s.y.push_back(t.number(r, yc));
            }
            series.push_back(std::move(s));
        }
        write_line_plot(run_dir + "/" + svg, title, x_label, y_label, series);
        out << "wrote " << svg << "\n";
        ++written;
    };

    plot_series("training_log.csv", "loss.svg", "training loss", "step", {"loss"}, "step", "loss");
    plot_series("weight_curve.csv", "weight_curve.svg", "importance weight vs timestep", "t_lo", {"mean_raw"},
                "t (bin lower edge)", "mean raw w(t)");
    plot_series("density_trace.csv", "density_trace.svg", "winner/loser log-density trace", "step",
                {"mean_logp_winner", "mean_logp_loser", "diff"}, "step", "mean log p");
    plot_series("weight_compare.csv", "weight_compare.svg", "on-policy vs unlike weights", "t_lo",
                {"mean_raw_on_policy", "mean_raw_unlike"}, "t (bin lower edge)", "mean raw w(t)");
    plot_series("rounds.csv", "rounds.svg", "iterative alignment reward", "round", {"mean_reward"}, "round",
                "mean oracle reward");
    plot_series("pretrain_log.csv", "pretrain_loss.svg", "pretraining loss", "step", {"loss"}, "step",
                "loss");

    if (message) *message = out.str();
    return written == 0 ? 1 : 0;
}

int run(const std::vector<std::string>& args) {
    CLI::App app{"desk-scale diffusion preference optimization lab"};
    app.require_subcommand(1);

    CommonArgs a;
    std::string method_override;
    std::string pairs_file;
    std::string what = "weight-curve";
    std::string run_dir;
    int n = 256;
    int bins = 10;
    bool unlike = false;
    int paths_override = 0;
    int trace_paths = 0;

    const auto add_common = [&](CLI::App* cmd, bool needs_init) {
        cmd->add_option("--config", a.config_path, "experiment config file")->required();
        cmd->add_option("--seed", a.seed, "random seed (required: all randomness flows from it)")->required();
        cmd->add_option("--out", a.out_dir, "output directory")->required();
        if (needs_init)
            cmd->add_option("--init", a.init_checkpoint, "input model checkpoint")->required();
    };

    CLI::App* pretrain_cmd = app.add_subcommand("pretrain", "pretrain the epsilon denoiser");
    add_common(pretrain_cmd, false);

    CLI::App* gen_cmd = app.add_subcommand("gen-pairs", "sample preference pairs");
    add_common(gen_cmd, true);
    gen_cmd->add_option("--n", n, "pair count (default: config 'pairs')");
    gen_cmd->add_flag("--unlike", unlike, "winners from the target instead of the net");

    CLI::App* align_cmd = app.add_subcommand("align", "preference-align a pretrained model");
    add_common(align_cmd, true);
    align_cmd->add_option("--method", method_override, "dpo|cm|sdpo (overrides config)");
    align_cmd->add_option("--pairs", pairs_file, "pairs.csv from gen-pairs (default: sample fresh)");

    CLI::App* iterate_cmd = app.add_subcommand("iterate", "iterative alignment rounds");
    add_common(iterate_cmd, true);
    iterate_cmd->add_option("--method", method_override, "dpo|cm|sdpo (overrides config)");

    CLI::App* diag_cmd = app.add_subcommand("diagnose", "standing-start diagnostics");
    add_common(diag_cmd, true);
    diag_cmd->add_option("--what", what, "weight-curve|weight-compare|density-trace")->required();
    diag_cmd->add_option("--n", n, "probe pair count");
    diag_cmd->add_option("--bins", bins, "timestep bins");

    CLI::App* sde_cmd = app.add_subcommand("sde-sample", "integrate the flow SDE");
    add_common(sde_cmd, false);
    sde_cmd->add_option("--paths", paths_override, "path count (default: config 'flow_paths')");
    sde_cmd->add_option("--trace", trace_paths, "also trace the first N paths to paths.csv");

    CLI::App* report_cmd = app.add_subcommand("report", "summarize a run directory");
    report_cmd->add_option("--run", run_dir, "run directory with CSV logs")->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*pretrain_cmd) return cmd_pretrain(a);
        if (*gen_cmd) return cmd_gen_pairs(a, gen_cmd->count("--n") ? n : 0, unlike);
        if (*align_cmd) return cmd_align(a, method_override, pairs_file);
        if (*iterate_cmd) return cmd_iterate(a, method_override);
        if (*diag_cmd) return cmd_diagnose(a, what, n, bins);
        if (*sde_cmd) return cmd_sde_sample(a, paths_override, trace_paths);
        if (*report_cmd) return cmd_report(run_dir);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

}  // namespace prefdiff::cli
