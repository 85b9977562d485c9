// Copyright 2026 The polsfp Authors
// SPDX-License-Identifier: Apache-2.0

#include "polsfp/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>

#include "polsfp/dataio.hpp"
#include "polsfp/error.hpp"
#include "polsfp/evaluate.hpp"
#include "polsfp/metrics.hpp"
#include "polsfp/run_config.hpp"
#include "polsfp/sfp_physics.hpp"
#include "polsfp/synth.hpp"
#include "polsfp/tinynet/train.hpp"

namespace polsfp {

namespace fs = std::filesystem;

namespace {

struct Verb {
    std::string name;
    std::string description;
    std::vector<std::string> keys;  // flags shown in the verb's synopsis
};

const std::vector<Verb>& verbs() {
    static const std::vector<Verb> v = {
        {"render", "render a synthetic dataset",
         {"out", "seed", "scenes", "height", "width", "noise_sigma", "eta", "eta_min", "eta_max", "mode",
          "test_fraction"}},
        {"fit", "fit the polarization sinusoid of one sample", {"input", "fit", "out"}},
        {"reconstruct", "predict normals for the samples of a split",
         {"dataset", "method", "policy", "eta", "mode", "fit", "checkpoint", "split", "out"}},
        {"train", "train the network on a dataset",
         {"dataset", "out", "seed", "depth", "base_width", "blocks_per_stage", "l2_factor", "epochs", "batch_size",
          "learning_rate", "val_fraction", "patch_side", "patch_stride", "min_foreground"}},
        {"infer", "predict normals with a trained network", {"dataset", "checkpoint", "split", "out"}},
        {"eval", "score predictions against ground truth",
         {"dataset", "method", "policy", "eta", "mode", "fit", "checkpoint", "predictions", "split", "out"}},
        {"export-png", "write PNG visualizations of a sample or normal raster", {"input", "out"}},
    };
    return v;
}

std::string flag_name(const std::string& key) {
    std::string f = key;
    std::replace(f.begin(), f.end(), '_', '-');
    return "--" + f;
}

std::string synopsis(const Verb& verb) {
    std::string s = "usage: polsfp " + verb.name + " [--config FILE]";
    for (const auto& k : verb.keys) s += " [" + flag_name(k) + " V]";
    s += "\n  " + verb.description + "\n";
    return s;
}

std::string main_synopsis() {
    std::string s = "usage: polsfp <verb> [options]\nverbs:\n";
    for (const auto& v : verbs()) s += "  " + v.name + std::string(14 - v.name.size(), ' ') + v.description + "\n";
    s += "Every config key is also accepted as a --flag; flags override --config.\n";
    return s;
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw Error(ErrorCode::IoError, "cannot create directory " + dir.string());
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << text;
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
}

fs::path require(const RunConfig& cfg, const std::string& key) {
    const auto& v = cfg.get(key);
    if (v.empty()) throw Error(ErrorCode::UsageError, flag_name(key) + " is required");
    return fs::path(v);
}

fs::path dataset_root(const RunConfig& cfg) {
    const fs::path root = require(cfg, "dataset");
    if (!fs::is_directory(root)) throw Error(ErrorCode::MissingFile, "dataset not found: " + root.string());
    return root;
}

EvalOptions eval_options(const RunConfig& cfg, bool allow_stored) {
    EvalOptions o;
    o.material = cfg.material();
    o.material_from_manifest = !cfg.is_set("eta") && !cfg.is_set("mode");
    o.policy = cfg.get("policy");
    parse_policy(o.policy);
    o.fit.method = cfg.fit_method();
    o.split = cfg.get("split");
    const auto& method = cfg.get("method");
    if (allow_stored && !cfg.get("predictions").empty()) {
        o.source = PredictionSource::Stored;
        o.predictions = cfg.get("predictions");
    } else if (method == "physics") {
        o.source = PredictionSource::Physics;
    } else if (method == "net") {
        o.source = PredictionSource::Net;
        o.checkpoint = require(cfg, "checkpoint");
        if (!fs::exists(o.checkpoint)) throw Error(ErrorCode::MissingFile, "checkpoint not found: " + o.checkpoint.string());
    } else {
        throw Error(ErrorCode::ConfigError, "method must be physics or net, got '" + method + "'");
    }
    o.dataset = dataset_root(cfg);
    return o;
}

int cmd_render(const RunConfig& cfg, std::ostream& out) {
    DatasetOptions o;
    o.height = cfg.get_int("height");
    o.width = cfg.get_int("width");
    o.noise_sigma = cfg.get_double("noise_sigma");
    o.eta_min = cfg.is_set("eta") ? cfg.get_double("eta") : cfg.get_double("eta_min");
    o.eta_max = cfg.is_set("eta") ? cfg.get_double("eta") : cfg.get_double("eta_max");
    o.mode = parse_mode(cfg.get("mode"));
    o.test_fraction = cfg.get_double("test_fraction");
    const int scenes = cfg.get_int("scenes");
    if (scenes < 0) throw Error(ErrorCode::ConfigError, "scenes must be >= 0");
    const fs::path root = cfg.get("out");
    const auto manifest = make_dataset(static_cast<std::size_t>(scenes), o, root, cfg.get_u64("seed"));
    out << "rendered " << manifest.size() << " scenes to " << root.string() << "\n";
    return kExitOk;
}

int cmd_fit(const RunConfig& cfg, std::ostream& out) {
    const fs::path input = require(cfg, "input");
    PolarizedStack stack;
    Mask mask;
    if (fs::is_directory(input)) {
        const SampleRecord s = load_sample(input);
        stack = s.stack;
        mask = s.mask();
    } else {
        stack = raster_to_stack(read_raster(input));
        mask = Mask::full(stack.height, stack.width);
    }
    FitOptions fo;
    fo.method = cfg.fit_method();
    const PolarizationMap pm = fit_stack(stack, mask, fo);
    // channels: phase, dop, intensity, valid
    Raster r(pm.height, pm.width, 4);
    for (int y = 0; y < pm.height; ++y)
        for (int x = 0; x < pm.width; ++x) {
            const auto i = pm.index(y, x);
            r.at(y, x, 0) = pm.phi[i];
            r.at(y, x, 1) = pm.rho[i];
            r.at(y, x, 2) = pm.intensity[i];
            r.at(y, x, 3) = pm.valid[i];
        }
    const fs::path dir = cfg.get("out");
    ensure_dir(dir);
    write_raster(r, dir / "polarization.psfp");
    out << "wrote " << (dir / "polarization.psfp").string() << "\n";
    return kExitOk;
}

int write_predictions(const RunConfig& cfg, EvalOptions options, std::ostream& out) {
    const auto refs = select_samples(options.dataset, options.split);
    if (refs.empty()) throw Error(ErrorCode::DataError, "no samples selected under " + options.dataset.string());
    Predictor predictor(options);
    std::vector<std::pair<SampleRef, NormalMap>> results;
    for (const auto& ref : refs) results.emplace_back(ref, predictor.predict(load_sample(ref.dir)));
    const fs::path root = cfg.get("out");
    for (const auto& [ref, normals] : results) {
        const fs::path path = prediction_path(root, ref);
        ensure_dir(path.parent_path());
        write_raster(normals_to_raster(normals), path);
    }
    out << "wrote " << results.size() << " predictions to " << root.string() << "\n";
    return kExitOk;
}

int cmd_reconstruct(const RunConfig& cfg, std::ostream& out) { return write_predictions(cfg, eval_options(cfg, false), out); }

int cmd_infer(const RunConfig& cfg, std::ostream& out) {
    RunConfig net_cfg = cfg;
    net_cfg.set("method", "net");
    return write_predictions(cfg, eval_options(net_cfg, false), out);
}

int cmd_train(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const fs::path root = dataset_root(cfg);
    SplitSpec spec = read_split_file(root / "split.txt");
    spec.val_fraction = cfg.get_double("val_fraction");
    spec.seed = cfg.get_u64("seed");
    PatchOptions po;
    po.side = cfg.get_int("patch_side");
    po.stride = cfg.get_int("patch_stride");
    po.min_foreground = cfg.get_double("min_foreground");

    std::vector<SampleRecord> samples;
    for (const auto& ref : scan_dataset(root)) samples.push_back(load_sample(ref.dir));
    const PatchSplits splits = make_splits(samples, spec, po);

    tinynet::UNetConfig nc;
    nc.depth = cfg.get_int("depth");
    nc.base_width = cfg.get_int("base_width");
    nc.blocks_per_stage = cfg.get_int("blocks_per_stage");
    nc.l2_factor = cfg.get_double("l2_factor");
    nc.seed = cfg.get_u64("seed");
    nc.validate();
    if (po.side % nc.patch_multiple() != 0)
        throw Error(ErrorCode::ConfigError, "patch side must be divisible by 2^depth");

    tinynet::TrainOptions to;
    to.epochs = cfg.get_int("epochs");
    to.batch_size = cfg.get_int("batch_size");
    to.learning_rate = cfg.get_double("learning_rate");
    to.seed = cfg.get_u64("seed");
    to.on_epoch = [&err](const tinynet::EpochRecord& r) {
        err << "epoch " << r.epoch << " train " << r.train_loss << " val " << r.val_loss << "\n";
    };
    const auto result = tinynet::train(nc, splits.train, splits.val, to);

    const fs::path dir = cfg.get("out");
    ensure_dir(dir);
    tinynet::save_checkpoint(result.best, dir / "model.psfp");
    write_text(dir / "history.csv", tinynet::format_history_csv(result.history));
    out << "trained on " << splits.train.size() << " patches (" << splits.val.size() << " validation); best epoch "
        << result.best_epoch << "; checkpoint " << (dir / "model.psfp").string() << "\n";
    return kExitOk;
}

int cmd_eval(const RunConfig& cfg, std::ostream& out) {
    const EvalOptions o = eval_options(cfg, true);
    const MaeReport report = evaluate(o);
    std::string title = "method=";
    if (o.source == PredictionSource::Stored)
        title += "stored predictions";
    else if (o.source == PredictionSource::Net)
        title += "net";
    else
        title += "physics policy=" + o.policy;
    title += " split=" + o.split;
    const std::string table = format_table(report, title);
    if (cfg.is_set("out")) {
        const fs::path dir = cfg.get("out");
        ensure_dir(dir);
        write_text(dir / "report.txt", table);
        write_text(dir / "report.csv", format_csv(report));
    }
    out << table;
    return kExitOk;
}

int cmd_export_png(const RunConfig& cfg, std::ostream& out) {
    const fs::path input = require(cfg, "input");
    const fs::path dir = cfg.get("out");
    if (fs::is_directory(input)) {
        const SampleRecord s = load_sample(input);
        ensure_dir(dir);
        write_normals_png(s.normals, dir / "normals.png");
        write_mask_png(s.mask(), dir / "mask.png");
    } else {
        const Raster r = read_raster(input);
        if (r.channels != 3) throw Error(ErrorCode::DimensionMismatch, "normal raster needs 3 channels");
        NormalMap n(r.height, r.width);
        n.mask = Mask(r.height, r.width);
        for (int y = 0; y < r.height; ++y)
            for (int x = 0; x < r.width; ++x) {
                n.at(y, x) = {r.at(y, x, 0), r.at(y, x, 1), r.at(y, x, 2)};
                n.mask.set(y, x, norm(n.at(y, x)) > 0.0);
            }
        ensure_dir(dir);
        write_normals_png(n, dir / "normals.png");
    }
    out << "wrote " << (dir / "normals.png").string() << "\n";
    return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"polarization shape-from-polarization toolkit", "polsfp"};
    app.set_help_flag();
    app.require_subcommand(1, 1);

    std::map<std::string, std::map<std::string, std::string>> flag_values;
    std::map<std::string, std::string> config_paths;
    std::map<std::string, CLI::App*> subs;
    for (const auto& v : verbs()) {
        CLI::App* sub = app.add_subcommand(v.name, v.description);
        sub->set_help_flag();
        subs[v.name] = sub;
        sub->add_option("--config", config_paths[v.name]);
        for (const auto& k : config_keys()) sub->add_option(flag_name(k.name), flag_values[v.name][k.name], k.help);
    }

    const Verb* verb = nullptr;
    for (const auto& v : verbs())
        if (!args.empty() && args.front() == v.name) verb = &v;
    if (std::find_if(args.begin(), args.end(), [](const auto& a) { return a == "--help" || a == "-h"; }) != args.end()) {
        out << (verb ? synopsis(*verb) : main_synopsis());
        return kExitOk;
    }

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n" << (verb ? synopsis(*verb) : main_synopsis());
        return kExitUsage;
    }
    for (const auto& v : verbs())
        if (app.got_subcommand(v.name)) verb = &v;

    try {
        RunConfig cfg;
        if (!config_paths[verb->name].empty()) cfg.load_file(config_paths[verb->name]);
        for (const auto& k : config_keys())
            if (subs[verb->name]->count(flag_name(k.name)) > 0) cfg.set(k.name, flag_values[verb->name][k.name]);

        if (verb->name == "render") return cmd_render(cfg, out);
        if (verb->name == "fit") return cmd_fit(cfg, out);
        if (verb->name == "reconstruct") return cmd_reconstruct(cfg, out);
        if (verb->name == "train") return cmd_train(cfg, out, err);
        if (verb->name == "infer") return cmd_infer(cfg, out);
        if (verb->name == "eval") return cmd_eval(cfg, out);
        return cmd_export_png(cfg, out);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        if (e.code() == ErrorCode::UsageError || e.code() == ErrorCode::ConfigError) {
            err << synopsis(*verb);
            return kExitUsage;
        }
        return kExitData;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitData;
    }
}

}  // namespace polsfp
