// Copyright 2026 The polsfp Authors
// SPDX-License-Identifier: Apache-2.0

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// non-zero if any fails. Pass criterion numbers as arguments to run a subset.
//
// Criterion 12 runs on a user-supplied dataset when POLSFP_REAL_DATASET
// points at one; otherwise it exercises the same path on a synthetic tree in
// the same layout.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "polsfp/cli.hpp"
#include "polsfp/dataio.hpp"
#include "polsfp/fresnel.hpp"
#include "polsfp/metrics.hpp"
#include "polsfp/polcore.hpp"
#include "polsfp/sfp_physics.hpp"
#include "polsfp/synth.hpp"
#include "polsfp/tinynet/adam.hpp"
#include "polsfp/tinynet/ops.hpp"
#include "polsfp/tinynet/train.hpp"
#include "polsfp/tinynet/unet.hpp"
#include "test_util.hpp"

namespace polsfp {
namespace {

using Clock = std::chrono::steady_clock;
using namespace tinynet;

struct Outcome {
    bool pass = true;
    std::string detail;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, auto... args) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double phase_gap(double a, double b) {
    const double d = wrap_angle(a - b, kPi);
    return std::min(d, kPi - d);
}

Outcome stokes_round_trip() {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(20260101);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double phase_err = 0.0, rho_err = 0.0;
    const auto angles = canonical_angles();
    for (int i = 0; i < 10000; ++i) {
        const double mean = 0.05 + 2.0 * u(rng);
        const SinusoidParams p{mean, mean * u(rng), kPi * u(rng)};
        std::vector<PolarizationSample> s;
        for (const auto& a : angles) s.push_back({a, eval_sinusoid(p, a)});
        for (auto method : {FitMethod::ClosedFormQuad, FitMethod::LeastSquares}) {
            const auto f = fit_sinusoid(s, method);
            rho_err = std::max(rho_err, std::abs(f.amplitude / f.i_mean - p.amplitude / p.i_mean));
            phase_err = std::max(phase_err, phase_gap(f.phase, p.phase));
        }
    }
    const double t = seconds_since(t0);
    return {phase_err < 1e-9 && rho_err < 1e-12 && t < 5.0,
            fmt("max phase err %.3g rad, max rho err %.3g, %.2f s", phase_err, rho_err, t)};
}

Outcome fresnel_round_trip() {
    const auto t0 = Clock::now();
    double diffuse_err = 0.0, specular_err = 0.0;
    bool counts_ok = true;
    for (double eta : {1.3, 1.5, 1.8}) {
        for (int k = 1; k <= 179; ++k) {
            const double deg = 0.5 * k;
            const double theta = deg_to_rad(deg);
            const auto d = invert_dop({eta, ReflectionMode::Diffuse}, dop_diffuse(eta, theta));
            counts_ok = counts_ok && d.candidates.size() == 1;
            diffuse_err = std::max(diffuse_err, std::abs(rad_to_deg(d.candidates.at(0)) - deg));
            const auto s = invert_dop({eta, ReflectionMode::Specular}, dop_specular(eta, theta).value);
            const bool at_peak = std::abs(theta - std::atan(eta)) < 1e-6;
            counts_ok = counts_ok && s.candidates.size() == (at_peak ? 1u : 2u);
            double best = 1e9;
            for (double c : s.candidates) best = std::min(best, std::abs(rad_to_deg(c) - deg));
            specular_err = std::max(specular_err, best);
        }
    }
    const double t = seconds_since(t0);
    return {diffuse_err < 1e-6 && specular_err < 1e-6 && counts_ok && t < 5.0,
            fmt("diffuse %.3g deg, specular %.3g deg, candidate counts %s, %.2f s", diffuse_err, specular_err,
                counts_ok ? "ok" : "WRONG", t)};
}

Outcome specular_peak_check() {
    double value_err = 0.0, where_err = 0.0;
    for (double eta : {1.3, 1.5, 1.8}) {
        const auto p = specular_peak(eta);
        value_err = std::max(value_err, std::abs(p.value - 1.0));
        where_err = std::max(where_err, std::abs(p.zenith - std::atan(eta)));
    }
    return {value_err < 1e-9 && where_err < 1e-6, fmt("|max-1| %.3g, |argmax-atan eta| %.3g rad", value_err, where_err)};
}

Outcome sphere_reconstruction() {
    const auto t0 = Clock::now();
    Scene s;
    s.geometry = Sphere{127.5, 127.5, 120.0};
    s.material = {1.5, ReflectionMode::Diffuse};
    RenderConfig cfg;
    cfg.height = cfg.width = 256;
    const auto truth = ground_truth(s, cfg);
    const auto stack = render(s, cfg);
    const double oracle = mae(reconstruct_physics(stack, truth.mask, s.material, OraclePolicy{truth}).normal_map, truth,
                              truth.mask);
    const double convex = mae(
        reconstruct_physics(stack, truth.mask, s.material, ConvexityPolicy{127.5, 127.5}).normal_map, truth, truth.mask);
    const double t = seconds_since(t0);
    return {oracle < 0.1 && convex < 0.1 && t < 10.0,
            fmt("oracle %.3g deg, convexity %.3g deg, %.2f s", oracle, convex, t)};
}

Outcome scale_invariance() {
    std::mt19937_64 rng(55);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    PolarizedStack stack(48, 48, canonical_angles());
    for (auto& v : stack.intensities) v = u(rng);
    const Mask mask = Mask::full(48, 48);
    bool same = true;
    for (auto mode : {ReflectionMode::Diffuse, ReflectionMode::Specular}) {
        const Material m{1.5, mode};
        const auto base = reconstruct_physics(stack, mask, m, ConvexityPolicy{24, 24}).normal_map;
        for (double c : {0.01, 1.0, 100.0}) {
            PolarizedStack scaled = stack;
            for (auto& v : scaled.intensities) v *= c;
            same = same && reconstruct_physics(scaled, mask, m, ConvexityPolicy{24, 24}).normal_map == base;
        }
    }
    return {same, same ? "bit-identical for c in {0.01, 1, 100}, both modes" : "normal maps differ"};
}

Outcome gradient_checks() {
    using testing::grad_check;
    using testing::random_tensor;
    const auto t0 = Clock::now();
    double op_err = 0.0, net_err = 0.0;
    std::size_t net_params = 0;
    for (std::uint64_t seed : {1, 2, 3}) {
        std::mt19937_64 rng(seed);
        Tensor x = random_tensor({2, 3, 5, 5}, rng);
        Tensor w = random_tensor({4, 3, 3, 3}, rng);
        Tensor b = random_tensor({4}, rng);
        auto worst = [&](const testing::GradCheck& g) { op_err = std::max(op_err, g.max_rel_error); };
        worst(grad_check([&] { return sum_of_squares(conv2d(x, w, b, 1, 1)); }, {x, w, b}));
        worst(grad_check([&] { return sum_of_squares(conv2d(x, w, b, 2, 1)); }, {x, w, b}));
        Tensor uw = random_tensor({3, 2, 2, 2}, rng);
        Tensor ub = random_tensor({2}, rng);
        worst(grad_check([&] { return sum_of_squares(upconv2x(x, uw, ub)); }, {x, uw, ub}));
        Tensor y = random_tensor({2, 3, 5, 5}, rng);
        worst(grad_check([&] { return sum_of_squares(relu(x)); }, {x}));
        worst(grad_check([&] { return sum_of_squares(add(x, y)); }, {x, y}));
        worst(grad_check([&] { return sum_of_squares(scale(x, 1.3)); }, {x}));
        worst(grad_check([&] { return sum_of_squares(concat_channels(x, y)); }, {x, y}));
        worst(grad_check([&] { return sum(x); }, {x}));
        Tensor target = random_tensor({2, 3, 5, 5}, rng);
        target.set_requires_grad(false);
        std::vector<std::uint8_t> mask(50);
        for (auto& m : mask) m = rng() % 3 != 0;
        mask[0] = 1;
        worst(grad_check([&] { return cosine_loss(x, target, mask); }, {x}));
        ResidualParams rp;
        rp.stride = 2;
        rp.conv1_w = random_tensor({4, 3, 3, 3}, rng, -0.5, 0.5);
        rp.conv1_b = random_tensor({4}, rng);
        rp.conv2_w = random_tensor({4, 4, 3, 3}, rng, -0.5, 0.5);
        rp.conv2_b = random_tensor({4}, rng);
        rp.proj_w = random_tensor({4, 3, 1, 1}, rng);
        rp.proj_b = random_tensor({4}, rng);
        worst(grad_check([&] { return sum_of_squares(residual_block(x, rp)); },
                         {x, rp.conv1_w, rp.conv1_b, rp.conv2_w, rp.conv2_b, rp.proj_w, rp.proj_b}));

        UNetConfig c;
        c.seed = seed;
        UNet net(c);
        net.set_requires_grad(true);
        Tensor in = random_tensor({1, 4, 16, 16}, rng, 0.0, 1.0);
        in.set_requires_grad(false);
        Tensor normals = random_tensor({1, 3, 16, 16}, rng);
        normals.set_requires_grad(false);
        std::vector<std::uint8_t> m16(256, 1);
        std::vector<Tensor> tensors;
        std::vector<std::vector<std::size_t>> picks;
        for (auto& p : net.params()) {
            tensors.push_back(p.tensor);
            std::vector<std::size_t> pick;
            for (int k = 0; k < 5; ++k) pick.push_back(rng() % p.tensor.size());
            net_params += pick.size();
            picks.push_back(pick);
        }
        const auto g = grad_check([&] { return add(cosine_loss(net.forward(in), normals, m16), net.l2_penalty()); },
                                  tensors, picks);
        net_err = std::max(net_err, g.max_rel_error);
    }
    const double t = seconds_since(t0);
    return {op_err < 1e-4 && net_err < 1e-3 && t < 60.0 && net_params >= 300,
            fmt("per-op %.3g, network %.3g over %zu parameters, 3 seeds, %.2f s", op_err, net_err, net_params, t)};
}

Outcome residual_identity() {
    std::mt19937_64 rng(7);
    Tensor x = testing::random_tensor({2, 4, 6, 6}, rng);
    ResidualParams p;
    p.conv1_w = Tensor({4, 4, 3, 3});
    p.conv1_b = Tensor({4});
    p.conv2_w = Tensor({4, 4, 3, 3});
    p.conv2_b = Tensor({4});
    const Tensor y = residual_block(x, p);
    bool exact = y.shape() == x.shape();
    for (std::size_t i = 0; exact && i < x.size(); ++i) exact = y.values()[i] == std::max(x.values()[i], 0.0);
    return {exact, exact ? "output equals relu(input) exactly" : "output differs from relu(input)"};
}

Outcome adam_properties() {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Tensor p({1000});
    for (auto& v : p.values()) v = u(rng);
    const std::vector<double> before(p.values().begin(), p.values().end());
    auto g = p.mutable_grad();
    for (auto& v : g) v = u(rng);
    AdamState s;
    s.learning_rate = 1e-3;
    std::vector<Tensor> params{p};
    adam_step(s, params);
    double worst = 0.0;
    std::size_t checked = 0;
    for (std::size_t i = 0; i < 1000; ++i) {
        if (std::abs(g[i]) < 1e-3) continue;
        ++checked;
        worst = std::max(worst, std::abs(p.values()[i] - before[i] + s.learning_rate * (g[i] > 0 ? 1.0 : -1.0)));
    }
    const bool sign_ok = worst < s.learning_rate * 1e-4;

    const std::vector<double> frozen_before(p.values().begin(), p.values().end());
    AdamState frozen;
    frozen.learning_rate = 0.0;
    for (int i = 0; i < 10; ++i) adam_step(frozen, params);
    const bool identity = std::equal(frozen_before.begin(), frozen_before.end(), p.values().begin());
    return {sign_ok && identity,
            fmt("first step max |dp + lr sign g| = %.3g (limit %.3g, %zu entries); lr=0 %s", worst,
                s.learning_rate * 1e-4, checked, identity ? "identity" : "CHANGED PARAMETERS")};
}

// Criterion 9 dataset: 64x64 scenes rendered in memory, one patch each.
constexpr int kTrainScenes = 2400;
constexpr int kTestScenes = 120;
constexpr int kEpochs = 8;
constexpr double kLearningRate = 2e-3;

std::vector<Patch> desk_patches(std::size_t first, std::size_t count, std::vector<SampleRecord>* keep) {
    DatasetOptions o;
    o.noise_sigma = 0.01;
    std::vector<Patch> out;
    for (std::size_t i = first; i < first + count; ++i) {
        const auto s = random_scene(o, 2026, i);
        SampleRecord rec;
        rec.object_id = s.entry.object_id;
        rec.condition = s.entry.condition;
        rec.stack = render(s.scene, s.config);
        rec.normals = ground_truth(s.scene, s.config);
        for (auto& p : extract_patches(rec)) out.push_back(std::move(p));
        if (keep) keep->push_back(std::move(rec));
    }
    return out;
}

Outcome desk_learning() {
    const auto t0 = Clock::now();
    const auto patches = desk_patches(0, kTrainScenes, nullptr);
    std::vector<SampleRecord> held_out;
    desk_patches(kTrainScenes, kTestScenes, &held_out);

    UNetConfig c;
    c.depth = 3;
    c.base_width = 8;
    c.seed = 9;
    TrainOptions o;
    o.epochs = kEpochs;
    o.batch_size = 32;
    o.learning_rate = kLearningRate;
    o.seed = 9;
    o.on_epoch = [&](const EpochRecord& r) {
        std::fprintf(stderr, "  epoch %d train %.4f val %.4f (%.0f s)\n", r.epoch, r.train_loss, r.val_loss,
                     seconds_since(t0));
    };
    auto result = train(c, patches, 0.2, o);
    const double final_val = result.history.empty() ? result.initial_val_loss : result.history.back().val_loss;

    std::vector<SampleMae> net_rows, flat_rows;
    for (const auto& rec : held_out) {
        const auto pred = infer_normals(result.best, rec.stack, rec.mask());
        NormalMap flat = rec.normals;
        for (int y = 0; y < flat.height; ++y)
            for (int x = 0; x < flat.width; ++x) flat.at(y, x) = rec.mask().at(y, x) ? Vec3{0, 0, 1} : Vec3{};
        const auto a = mae_detail(pred, rec.normals, rec.mask());
        const auto b = mae_detail(flat, rec.normals, rec.mask());
        net_rows.push_back({rec.object_id, rec.condition, View::Front, a.degrees, a.pixels, a.zero_length});
        flat_rows.push_back({rec.object_id, rec.condition, View::Front, b.degrees, b.pixels, 0});
    }
    const double net_mae = MaeReport::from_samples(net_rows).whole_set;
    const double flat_mae = MaeReport::from_samples(flat_rows).whole_set;
    const double t = seconds_since(t0);
    const bool pass = patches.size() >= 2000 && final_val <= 0.5 * result.initial_val_loss && net_mae < 30.0 &&
                      net_mae < flat_mae && t <= 600.0;
    return {pass, fmt("%zu patches, val loss %.4f -> %.4f (ratio %.3f), held-out MAE %.2f deg vs flat %.2f deg, %.0f s",
                      patches.size(), result.initial_val_loss, final_val, final_val / result.initial_val_loss, net_mae,
                      flat_mae, t)};
}

Outcome file_round_trips() {
    testing::TempDir dir("acceptance_files");
    std::vector<std::string> failures;

    std::mt19937_64 rng(10);
    std::uniform_real_distribution<float> u(-3.0f, 3.0f);
    Raster r(64, 64, 4);
    for (auto& v : r.values) v = u(rng);
    write_raster(r, dir.path() / "r.psfp");
    if (!(read_raster(dir.path() / "r.psfp") == r)) failures.push_back("raster");

    make_dataset(2, {}, dir.path() / "ds", 10);
    for (const auto& ref : scan_dataset(dir.path() / "ds")) {
        const auto a = load_sample(ref.dir);
        write_sample(a, dir.path() / "copy");
        const auto b = load_sample(dir.path() / "copy");
        if (a.stack.intensities != b.stack.intensities || !(a.normals == b.normals)) failures.push_back("sample");
        for (const char* f : {"stack.psfp", "normals.psfp", "mask.png"})
            if (testing::read_bytes(ref.dir / f) != testing::read_bytes(dir.path() / "copy" / f))
                failures.push_back(std::string("sample file ") + f);
    }

    UNet net(UNetConfig{});
    save_checkpoint(net, dir.path() / "m.psfp");
    const UNet back = load_checkpoint(dir.path() / "m.psfp");
    for (std::size_t i = 0; i < net.params().size(); ++i) {
        const auto a = net.params()[i].tensor.values();
        const auto b = back.params()[i].tensor.values();
        if (a.size() != b.size() || !std::equal(a.begin(), a.end(), b.begin())) {
            failures.push_back("checkpoint " + net.params()[i].name);
            break;
        }
    }

    // same fixed-seed run as the golden-file unit test
    std::ostringstream out, err;
    const auto ds = (dir.path() / "golden").string();
    run_cli({"render", "--seed", "42", "--scenes", "4", "--test-fraction", "0.5", "--noise-sigma", "0.01", "--out", ds},
            out, err);
    std::ostringstream table;
    run_cli({"eval", "--dataset", ds, "--policy", "convexity"}, table, err);
    const auto golden = testing::read_bytes(std::filesystem::path(POLSFP_TEST_DATA) / "golden_report.txt");
    if (golden.empty() || table.str() != golden) failures.push_back("golden report");

    std::string detail = "rasters, sample dirs, checkpoints and golden report";
    if (!failures.empty()) {
        detail = "mismatch:";
        for (const auto& f : failures) detail += " " + f;
    }
    return {failures.empty(), detail};
}

Outcome mae_exactness() {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> g(0.0, 1.0);
    NormalMap truth(16, 16);
    truth.mask = Mask::full(16, 16);
    for (auto& n : truth.normals) n = normalized({g(rng), g(rng), g(rng)});
    NormalMap anti = truth, ortho = truth;
    for (std::size_t i = 0; i < truth.normals.size(); ++i) {
        const Vec3 n = truth.normals[i];
        anti.normals[i] = {-n.x, -n.y, -n.z};
        ortho.normals[i] = std::abs(n.x) < 0.5 ? Vec3{0.0, -n.z, n.y} : Vec3{-n.y, n.x, 0.0};
    }
    const double zero = mae(truth, truth, truth.mask);
    const double ninety = mae(ortho, truth, truth.mask);
    const double half_turn = mae(anti, truth, truth.mask);

    double rot_err = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        NormalMap pred = truth;
        for (auto& n : pred.normals) n = normalized({g(rng), g(rng), g(rng)});
        // random rotation from a unit quaternion
        double q[4] = {g(rng), g(rng), g(rng), g(rng)};
        const double len = std::sqrt(q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3]);
        for (double& v : q) v /= len;
        const double w = q[0], x = q[1], y = q[2], z = q[3];
        const double m[3][3] = {{1 - 2 * (y * y + z * z), 2 * (x * y - z * w), 2 * (x * z + y * w)},
                                {2 * (x * y + z * w), 1 - 2 * (x * x + z * z), 2 * (y * z - x * w)},
                                {2 * (x * z - y * w), 2 * (y * z + x * w), 1 - 2 * (x * x + y * y)}};
        auto rotate = [&](NormalMap f) {
            for (auto& n : f.normals)
                n = {m[0][0] * n.x + m[0][1] * n.y + m[0][2] * n.z, m[1][0] * n.x + m[1][1] * n.y + m[1][2] * n.z,
                     m[2][0] * n.x + m[2][1] * n.y + m[2][2] * n.z};
            return f;
        };
        rot_err = std::max(rot_err, std::abs(mae(rotate(pred), rotate(truth), truth.mask) - mae(pred, truth, truth.mask)));
    }

    std::uniform_real_distribution<double> deg(0.0, 180.0);
    std::vector<SampleMae> rows;
    for (int i = 0; i < 60; ++i)
        rows.push_back({"o" + std::to_string(i % 7), static_cast<LightingCondition>(i % 3), View::Front, deg(rng),
                        1 + rng() % 4000, 0});
    long double num = 0.0, den = 0.0;
    for (const auto& r : rows) {
        num += static_cast<long double>(r.mae_deg) * r.pixels;
        den += r.pixels;
    }
    const double recombine_err = std::abs(MaeReport::from_samples(rows).whole_set - static_cast<double>(num / den));

    const bool pass = zero == 0.0 && ninety == 90.0 && half_turn == 180.0 && rot_err < 1e-9 && recombine_err < 1e-12;
    return {pass, fmt("0/90/180 -> %.17g/%.17g/%.17g, rotation %.3g deg, recombination %.3g", zero, ninety, half_turn,
                      rot_err, recombine_err)};
}

// Synthetic stand-in with every condition and view, one sample per pair.
void write_layout_tree(const std::filesystem::path& root) {
    SplitSpec split;
    std::size_t index = 0;
    for (const char* object : {"bird", "cup", "pot"}) {
        (std::string(object) == "pot" ? split.train_objects : split.test_objects).insert(object);
        for (auto c : {LightingCondition::Indoor, LightingCondition::Sunny, LightingCondition::Cloudy})
            for (auto v : {View::Front, View::Back, View::Left, View::Right}) {
                DatasetOptions o;
                o.noise_sigma = 0.01;
                const auto s = random_scene(o, 12, index++);
                SampleRecord rec;
                rec.object_id = object;
                rec.condition = c;
                rec.view = v;
                rec.stack = render(s.scene, with_condition(s.config, c));
                rec.normals = ground_truth(s.scene, s.config);
                write_sample(rec, sample_dir(root, object, c, v));
            }
    }
    write_split_file(split, root / "split.txt");
}

Outcome real_data_eval() {
    testing::TempDir dir("acceptance_layout");
    std::filesystem::path root;
    std::string source;
    if (const char* env = std::getenv("POLSFP_REAL_DATASET"); env && *env) {
        root = env;
        source = "user dataset " + root.string();
    } else {
        root = dir.path() / "tree";
        write_layout_tree(root);
        source = "synthetic tree in the same layout (set POLSFP_REAL_DATASET for real data)";
    }
    std::ostringstream out, err;
    const int code = run_cli({"eval", "--dataset", root.string(), "--method", "physics", "--policy", "convexity"}, out,
                             err);
    if (code != kExitOk) return {false, "eval exited " + std::to_string(code) + ": " + err.str()};
    std::istringstream table(out.str());
    std::string line;
    int rows = 0;
    bool finite = true, whole = false;
    while (std::getline(table, line)) {
        if (line.empty() || line[0] == '#' || line.rfind("object", 0) == 0) continue;
        if (line.rfind("Whole Set", 0) == 0) whole = true;
        else ++rows;
        std::istringstream cells(line);
        std::string cell;
        while (cells >> cell)
            if (cell.find("nan") != std::string::npos || cell.find("inf") != std::string::npos) finite = false;
    }
    return {rows > 0 && whole && finite,
            fmt("%d object rows%s, %s; ", rows, whole ? " plus Whole Set" : " and NO Whole Set row",
                finite ? "all finite" : "NON-FINITE values") +
                source};
}

}  // namespace
}  // namespace polsfp

int main(int argc, char** argv) {
    using polsfp::Outcome;
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"Sinusoid/Stokes round trip", polsfp::stokes_round_trip},
        {"Fresnel inversion round trip", polsfp::fresnel_round_trip},
        {"Specular peak", polsfp::specular_peak_check},
        {"End-to-end physics reconstruction", polsfp::sphere_reconstruction},
        {"Scale invariance", polsfp::scale_invariance},
        {"Gradient checks", polsfp::gradient_checks},
        {"Residual identity", polsfp::residual_identity},
        {"Adam first step and lr=0", polsfp::adam_properties},
        {"Desk-scale learning", polsfp::desk_learning},
        {"File-format round trips", polsfp::file_round_trips},
        {"MAE metric exactness", polsfp::mae_exactness},
        {"Dataset-layout evaluation", polsfp::real_data_eval},
    };
    std::set<int> only;
    for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int number = static_cast<int>(i) + 1;
        if (!only.empty() && !only.count(number)) continue;
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += o.pass ? 0 : 1;
        std::printf("%s %2d %s: %s\n", o.pass ? "PASS" : "FAIL", number, criteria[i].first.c_str(), o.detail.c_str());
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
