#include "cli.hpp"

#include "awarekit/awareness.hpp"
#include "awarekit/cgw1.hpp"
#include "awarekit/error.hpp"
#include "awarekit/image_io.hpp"
#include "awarekit/interventions.hpp"
#include "awarekit/metrics.hpp"
#include "awarekit/model.hpp"
#include "awarekit/planted.hpp"
#include "awarekit/random.hpp"
#include "awarekit/segmentation.hpp"
#include "awarekit/service.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <csignal>
#include <filesystem>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace awarekit::cli {

namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

void write_json(const fs::path& path, const Json& j) { write_text(path, j.dump(2) + "\n"); }

std::string write_image(const fs::path& dir, const std::string& stem, const Tensor& image, const std::string& format) {
  const std::string name = stem + (format == "ppm" ? ".ppm" : ".png");
  write_file(dir / name, format == "ppm" ? encode_ppm(image) : encode_png_rgb(image));
  return name;
}

std::string write_difference(const fs::path& dir, const std::string& stem, const DifferenceMap& d) {
  const std::string name = stem + ".png";
  write_file(dir / name, encode_png_difference(d.map));
  return name;
}

Json channel_json(const AwarenessTable& table, ChannelRef r) {
  return {{"block", r.block}, {"channel", r.channel}, {"category", table.category(r)}, {"latent", table.latent(r)}};
}

std::string awareness_csv(const AwarenessTable& table) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "block,channel,category_awareness,latent_awareness,inactive\n";
  for (const auto& b : table.blocks) {
    for (Index c = 0; c < b.channels(); ++c) {
      os << b.block << ',' << c << ',' << -b.mean_t[c] << ',' << b.var_t[c] << ','
         << (b.inactive[static_cast<std::size_t>(c)] ? 1 : 0) << '\n';
    }
  }
  return os.str();
}

std::vector<Index> parse_classes(const std::string& text, Index num_classes) {
  std::vector<Index> out;
  if (text == "all") {
    for (Index c = 0; c < num_classes; ++c) out.push_back(c);
    return out;
  }
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    Index c = -1;
    try {
      c = std::stoll(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) throw bad_param("invalid class list entry '" + item + "'");
    if (c < 0 || c >= num_classes) throw bad_class("class " + item + " out of range");
    out.push_back(c);
  }
  if (out.empty()) throw bad_param("class list is empty");
  return out;
}

service::HttpServer* active_server = nullptr;

extern "C" void handle_signal(int) {
  if (active_server != nullptr) active_server->stop();
}

struct PlantArgs {
  std::string spec_path;
  std::string preset = "default";
  std::uint64_t seed = 0;
  std::string out;
  std::string truth;
};

int cmd_plant(const PlantArgs& a, bool seed_given, std::ostream& out) {
  PlantedSpec spec;
  if (!a.spec_path.empty()) {
    const auto bytes = read_file(a.spec_path);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(bytes.begin(), bytes.end());
    } catch (const nlohmann::json::exception& e) {
      throw Error("bad_spec", std::string("spec file is not valid JSON: ") + e.what());
    }
    spec = planted_spec_from_json(j);
    if (seed_given) spec.seed = a.seed;
  } else if (a.preset == "default") {
    spec = default_planted_spec(a.seed);
  } else if (a.preset == "diversity") {
    spec = diversity_suite_spec(a.seed);
  } else {
    spec = ungated_twin(diversity_suite_spec(a.seed));
  }
  const PlantedModel model = build_planted(spec);
  const std::vector<std::uint8_t> bytes = cgw1::encode(model.generator);
  write_file(a.out, bytes);
  const fs::path truth_path = a.truth.empty() ? fs::path(a.out).replace_extension(".truth.json") : fs::path(a.truth);
  Json j;
  j["provenance"] = provenance(spec.seed, 0, sha256_hex(bytes));
  j["spec"] = to_json(spec);
  j["truth"] = to_json(model.truth);
  write_json(truth_path, j);
  out << "wrote " << a.out << " and " << truth_path.string() << "\n";
  return kExitOk;
}

struct AwarenessArgs {
  std::string model;
  Index class_id = 0;
  Index samples = 256;
  std::uint64_t seed = 0;
  std::string out;
  std::string csv;
  std::string filter = "all";
  unsigned workers = 0;
};

int cmd_awareness(const AwarenessArgs& a, std::ostream& out) {
  const LoadedModel m = load_model(a.model);
  AwarenessOptions opt{a.samples, a.seed, a.workers};
  opt.filter = a.filter == "positive-gamma" ? ProbeFilter::positive_gamma_only : ProbeFilter::include_all;
  const AwarenessTable t = estimate_awareness(m.generator, a.class_id, opt);
  Json j = to_json(t);
  j["provenance"] = provenance(a.seed, a.samples, m.model_hash);
  if (a.out.empty()) {
    out << j.dump(2) << "\n";
  } else {
    write_json(a.out, j);
  }
  if (!a.csv.empty()) write_text(a.csv, awareness_csv(t));
  return kExitOk;
}

struct InterveneArgs {
  std::string model;
  Index class_id = 0;
  std::string mode = "zero";
  std::string select = "top";
  std::string criterion = "category";
  std::string modulation = "multiply";
  float magnitude = 0.0f;
  Index k = 8;
  Index group_size = 0;
  Index samples = 256;
  std::uint64_t seed = 0;
  std::string out_dir = "intervene";
  std::string format = "png";
  unsigned workers = 0;
};

int cmd_intervene(const InterveneArgs& a, std::ostream& out) {
  const LoadedModel m = load_model(a.model);
  const Generator& g = m.generator;
  const AwarenessTable table = estimate_awareness(g, a.class_id, {a.samples, a.seed, a.workers});
  std::vector<ChannelRef> selection;
  if (a.k > 0) {
    selection = a.select == "random"
                    ? random_channels(table, a.k, a.seed)
                    : top_k_channels(table, parse_criterion(a.criterion), parse_direction(a.select), a.k).channels;
  }
  const Index group = a.group_size > 0 ? a.group_size : std::max<Index>(1, static_cast<Index>(selection.size()));
  std::vector<std::vector<ChannelRef>> groups;
  for (std::size_t i = 0; i < selection.size(); i += static_cast<std::size_t>(group)) {
    const auto end = std::min(selection.size(), i + static_cast<std::size_t>(group));
    groups.emplace_back(selection.begin() + static_cast<std::ptrdiff_t>(i), selection.begin() + static_cast<std::ptrdiff_t>(end));
  }
  if (groups.empty()) groups.emplace_back();

  const ConditioningInput cond{sample_latent(g.spec().latent_dim, a.seed, 0), a.class_id};
  const ForwardResult base = forward(g, cond);
  const fs::path dir(a.out_dir);
  Json j;
  j["provenance"] = provenance(a.seed, a.samples, m.model_hash);
  j["class_id"] = a.class_id;
  j["mode"] = a.mode;
  j["select"] = a.select;
  j["criterion"] = a.criterion;
  j["k"] = a.k;
  j["group_size"] = a.group_size;
  if (a.mode == "modulate") {
    j["modulation"] = a.modulation;
    j["magnitude"] = a.magnitude;
  }
  j["base_image"] = write_image(dir, "base", base.image, a.format);
  Json records = Json::array();
  for (std::size_t gi = 0; gi < groups.size(); ++gi) {
    InterventionPlan plan;
    if (a.mode == "zero") {
      plan = zero_plan(groups[gi]);
    } else {
      for (const auto& r : groups[gi]) {
        if (a.modulation == "add") {
          plan.add(r.block, {r.channel}, a.magnitude);
        } else {
          plan.multiply(r.block, {r.channel}, a.magnitude);
        }
      }
    }
    const Tensor image = forward(g, cond, plan).image;
    const DifferenceMap diff = difference_map(base.image, image);
    std::ostringstream stem;
    stem << "group_" << std::setw(3) << std::setfill('0') << gi;
    Json rec;
    rec["group"] = gi;
    Json channels = Json::array();
    for (const auto& r : groups[gi]) channels.push_back(channel_json(table, r));
    rec["channels"] = channels;
    rec["aggregate"] = diff.aggregate;
    rec["image"] = write_image(dir, stem.str(), image, a.format);
    rec["difference_image"] = write_difference(dir, stem.str() + "_diff", diff);
    records.push_back(rec);
  }
  j["records"] = records;
  write_json(dir / "intervene.json", j);
  out << "wrote " << groups.size() << " intervention record(s) to " << dir.string() << "\n";
  return kExitOk;
}

struct HybridizeArgs {
  std::string model;
  Index input_class = 0;
  Index reference_class = 1;
  Index k = 10;
  Index mix_block = -1;
  Index samples = 256;
  std::uint64_t seed = 0;
  std::string out_dir = "hybridize";
  std::string format = "png";
  unsigned workers = 0;
};

int cmd_hybridize(const HybridizeArgs& a, std::ostream& out) {
  const LoadedModel m = load_model(a.model);
  const Generator& g = m.generator;
  const Index mix = a.mix_block < 0 ? default_mix_block(g.spec()) : a.mix_block;
  if (mix >= g.spec().num_blocks()) throw bad_block("mix block " + std::to_string(mix) + " out of range");
  const AwarenessTable table = estimate_awareness(g, a.reference_class, {a.samples, a.seed, a.workers});
  HybridizationRequest req;
  req.input_class = a.input_class;
  req.reference_class = a.reference_class;
  req.z = sample_latent(g.spec().latent_dim, a.seed, 0);
  req.mix_blocks = {mix};
  req.channels = {hybrid_channels(table, mix, a.k)};
  req.allow_same_class = a.input_class == a.reference_class;
  const HybridResult r = hybridize(g, req);
  const Tensor style = style_mixing_baseline(g, req.z, a.input_class, a.reference_class, mix + 1);
  const fs::path dir(a.out_dir);
  Json j;
  j["provenance"] = provenance(a.seed, a.samples, m.model_hash);
  j["input_class"] = a.input_class;
  j["reference_class"] = a.reference_class;
  j["mix_block"] = mix;
  j["k"] = a.k;
  j["channels"] = req.channels.front();
  j["images"] = {{"input", write_image(dir, "input", r.input, a.format)},
                 {"reference", write_image(dir, "reference", r.reference, a.format)},
                 {"hybrid", write_image(dir, "hybrid", r.hybrid, a.format)},
                 {"style_mix", write_image(dir, "style_mix", style, a.format)}};
  j["difference"] = {{"hybrid_vs_input", difference_map(r.hybrid, r.input).aggregate},
                     {"hybrid_vs_reference", difference_map(r.hybrid, r.reference).aggregate},
                     {"hybrid_vs_style_mix", difference_map(r.hybrid, style).aggregate}};
  write_json(dir / "hybridize.json", j);
  out << "wrote hybrid of class " << a.input_class << " with " << a.reference_class << " to " << dir.string() << "\n";
  return kExitOk;
}

struct SegmentArgs {
  std::string model;
  Index class_id = 0;
  Index k = 3;
  std::string layers = "all";
  std::string weighted = "on";
  Index samples = 256;
  std::uint64_t seed = 0;
  std::string out_dir = "segment";
  std::string format = "png";
};

int cmd_segment(const SegmentArgs& a, std::ostream& out) {
  const LoadedModel m = load_model(a.model);
  const Generator& g = m.generator;
  const fs::path dir(a.out_dir);
  SegmentRequest req;
  req.class_id = a.class_id;
  req.seed = a.seed;
  req.k = a.k;
  req.layers = parse_layer_selection(a.layers);
  req.samples = a.samples;
  std::vector<std::pair<std::string, bool>> variants;
  if (a.weighted != "off") variants.emplace_back("weighted", true);
  if (a.weighted != "on") variants.emplace_back("unweighted", false);

  Json j;
  j["provenance"] = provenance(a.seed, a.samples, m.model_hash);
  j["class_id"] = a.class_id;
  j["k"] = a.k;
  j["layers"] = a.layers;
  j["image"] = write_image(dir, "image", forward(g, {sample_latent(g.spec().latent_dim, a.seed, 0), a.class_id}).image,
                           a.format);
  Json results = Json::object();
  for (const auto& [name, weighted] : variants) {
    req.weighted = weighted;
    const SegmentationResult r = segment_class(g, req);
    Json rj = to_json(r, false);
    rj["labels_image"] = "labels_" + name + ".png";
    write_file(dir / ("labels_" + name + ".png"), encode_png_labels(r.labels, r.height, r.width));
    results[name] = rj;
  }
  j["results"] = results;
  write_json(dir / "segment.json", j);
  out << "wrote " << variants.size() << " segmentation(s) to " << dir.string() << "\n";
  return kExitOk;
}

struct EvaluateArgs {
  std::string model;
  std::string classes = "all";
  std::string out = "evaluate";
  std::string reference;
  std::uint64_t seed = 0;
  std::int64_t reference_seed = -1;
  Index samples = 256;
  Index fake_samples = 256;
  Index real_samples = 256;
  Index ms_ssim_images = 32;
  Index ms_ssim_pairs = 496;
  Index knn_k = 3;
  Index smoothing = 20;
  unsigned workers = 0;
};

int cmd_evaluate(const EvaluateArgs& a, std::ostream& out) {
  const LoadedModel m = load_model(a.model);
  const Generator& g = m.generator;
  const LoadedModel ref = a.reference.empty() ? m : load_model(a.reference);
  if (ref.generator.spec().num_classes != g.spec().num_classes ||
      ref.generator.spec().output_resolution() != g.spec().output_resolution()) {
    throw bad_param("reference model must have the same classes and output resolution");
  }
  const std::vector<Index> classes = parse_classes(a.classes, g.spec().num_classes);
  const std::uint64_t ref_seed = a.reference_seed < 0 ? a.seed : static_cast<std::uint64_t>(a.reference_seed);
  const AvgPoolExtractor extractor;
  EvaluationConfig config{a.samples, a.fake_samples, a.ms_ssim_images, a.ms_ssim_pairs, a.knn_k, a.seed, a.workers};
  std::vector<ClassEvaluation> evals;
  for (Index c : classes) {
    const FeatureMatrix real = generate_features(ref.generator, c, a.real_samples, ref_seed, extractor, a.workers);
    evals.push_back(evaluate_class(g, c, extractor, real, config));
  }
  const fs::path dir(a.out);
  write_text(dir / "evaluation.csv", evaluations_csv(evals));

  Json j;
  j["provenance"] = provenance(a.seed, a.samples, m.model_hash);
  j["reference_model_hash"] = ref.model_hash;
  j["reference_seed"] = ref_seed;
  j["extractor"] = extractor.name();
  const Index window = std::min<Index>(a.smoothing, static_cast<Index>(evals.size()));
  j["smoothing_window"] = window;
  Json corr = Json::object();
  for (const auto& name : metric_names()) {
    Json entry;
    try {
      entry["pearson"] = awareness_metric_correlation(evals, name);
    } catch (const Error&) {
      entry["pearson"] = nullptr;
    }
    try {
      entry["pearson_smoothed"] = window > 1 ? Json(awareness_metric_correlation(evals, name, window)) : Json(nullptr);
    } catch (const Error&) {
      entry["pearson_smoothed"] = nullptr;
    }
    corr[name] = entry;
  }
  j["correlation"] = corr;
  Json per_class = Json::array();
  for (const auto& e : evals) per_class.push_back(to_json(e));
  j["classes"] = per_class;
  write_json(dir / "correlation.json", j);
  out << "evaluated " << evals.size() << " class(es) into " << dir.string() << "\n";
  return kExitOk;
}

struct ServeArgs {
  std::string model;
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string static_dir;
};

int cmd_serve(const ServeArgs& a, std::ostream& out) {
  const LoadedModel m = load_model(a.model);
  service::HttpServer server(m, {a.host, a.port, a.static_dir});
  const int port = server.bind();
  out << "listening on http://" << a.host << ":" << port << std::endl;
  active_server = &server;
  std::signal(SIGINT, handle_signal);
  std::signal(SIGTERM, handle_signal);
  server.run();
  active_server = nullptr;
  return kExitOk;
}

bool is_usage_code(const std::string& code) {
  return code == "bad_class" || code == "bad_block" || code == "bad_channel" || code == "bad_param";
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Channel awareness toolkit for class-conditional generators"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);

  auto formats = CLI::IsMember({"png", "ppm"});

  PlantArgs plant;
  auto* p = app.add_subcommand("plant", "Build a planted generator and its ground truth");
  p->add_option("--spec", plant.spec_path, "PlantedSpec JSON file (defaults to the preset)")->check(CLI::ExistingFile);
  p->add_option("--preset", plant.preset, "Built-in spec when --spec is absent")
      ->check(CLI::IsMember({"default", "diversity", "diversity-twin"}));
  auto* plant_seed = p->add_option("--seed", plant.seed, "Seed for the convolution weights");
  p->add_option("--out", plant.out, "Output CGW1 path")->required();
  p->add_option("--truth", plant.truth, "Ground-truth JSON path (default: <out>.truth.json)");

  AwarenessArgs aw;
  auto* a = app.add_subcommand("awareness", "Estimate channel awareness for one class");
  a->add_option("--model", aw.model, "CGW1 model")->required();
  a->add_option("--class", aw.class_id, "Class id")->required()->check(CLI::NonNegativeNumber);
  a->add_option("--samples", aw.samples, "Latent samples")->check(CLI::Range(Index{2}, Index{10000000}));
  a->add_option("--seed", aw.seed, "Seed");
  a->add_option("--out", aw.out, "Output JSON path (default: stdout)");
  a->add_option("--csv", aw.csv, "Optional per-channel CSV path");
  a->add_option("--filter", aw.filter, "Probe filter")->check(CLI::IsMember({"all", "positive-gamma"}));
  a->add_option("--workers", aw.workers, "Worker threads (0 = all cores)");

  InterveneArgs iv;
  auto* i = app.add_subcommand("intervene", "Zero or modulate selected channels and measure the image change");
  i->add_option("--model", iv.model, "CGW1 model")->required();
  i->add_option("--class", iv.class_id, "Class id")->required()->check(CLI::NonNegativeNumber);
  i->add_option("--mode", iv.mode, "Intervention")->check(CLI::IsMember({"zero", "modulate"}));
  i->add_option("--select", iv.select, "Channel selection")->check(CLI::IsMember({"top", "bottom", "random"}));
  i->add_option("--criterion", iv.criterion, "Ranking criterion")->check(CLI::IsMember({"category", "latent"}));
  i->add_option("--modulation", iv.modulation, "Modulation operator")->check(CLI::IsMember({"multiply", "add"}));
  i->add_option("--magnitude", iv.magnitude, "Modulation magnitude");
  i->add_option("--k", iv.k, "Channels to select")->check(CLI::NonNegativeNumber);
  i->add_option("--group-size", iv.group_size, "Channels per intervention (0 = all at once)")
      ->check(CLI::NonNegativeNumber);
  i->add_option("--samples", iv.samples, "Awareness samples")->check(CLI::Range(Index{2}, Index{10000000}));
  i->add_option("--seed", iv.seed, "Seed");
  i->add_option("--out-dir", iv.out_dir, "Output directory");
  i->add_option("--format", iv.format, "Image format")->check(formats);
  i->add_option("--workers", iv.workers, "Worker threads (0 = all cores)");

  HybridizeArgs hy;
  auto* h = app.add_subcommand("hybridize", "Transplant high-awareness channels of a reference class");
  h->add_option("--model", hy.model, "CGW1 model")->required();
  h->add_option("--input-class", hy.input_class, "Input class")->required()->check(CLI::NonNegativeNumber);
  h->add_option("--reference-class", hy.reference_class, "Reference class")->required()->check(CLI::NonNegativeNumber);
  h->add_option("--k", hy.k, "Channels to transplant")->check(CLI::NonNegativeNumber);
  h->add_option("--mix-block", hy.mix_block, "Block whose channels are mixed (default: middle)")
      ->check(CLI::NonNegativeNumber);
  h->add_option("--samples", hy.samples, "Awareness samples")->check(CLI::Range(Index{2}, Index{10000000}));
  h->add_option("--seed", hy.seed, "Seed");
  h->add_option("--out-dir", hy.out_dir, "Output directory");
  h->add_option("--format", hy.format, "Image format")->check(formats);
  h->add_option("--workers", hy.workers, "Worker threads (0 = all cores)");

  SegmentArgs sg;
  auto* s = app.add_subcommand("segment", "Cluster the feature volume of a synthesized image");
  s->add_option("--model", sg.model, "CGW1 model")->required();
  s->add_option("--class", sg.class_id, "Class id")->required()->check(CLI::NonNegativeNumber);
  s->add_option("--k", sg.k, "Clusters")->check(CLI::Range(Index{2}, Index{16}));
  s->add_option("--layers", sg.layers, "Blocks in the volume")->check(CLI::IsMember({"all", "second-half"}));
  s->add_option("--weighted", sg.weighted, "Awareness weighting")->check(CLI::IsMember({"on", "off", "both"}));
  s->add_option("--samples", sg.samples, "Awareness samples")->check(CLI::Range(Index{2}, Index{10000000}));
  s->add_option("--seed", sg.seed, "Seed");
  s->add_option("--out-dir", sg.out_dir, "Output directory");
  s->add_option("--format", sg.format, "Image format")->check(formats);

  EvaluateArgs ev;
  auto* e = app.add_subcommand("evaluate", "Relate total awareness to per-class quality metrics");
  e->add_option("--model", ev.model, "CGW1 model")->required();
  e->add_option("--classes", ev.classes, "'all' or a comma-separated list");
  e->add_option("--out", ev.out, "Output directory");
  e->add_option("--reference", ev.reference, "Model standing in for real data (default: the model itself)");
  e->add_option("--reference-seed", ev.reference_seed, "Seed for reference samples (default: --seed)");
  e->add_option("--seed", ev.seed, "Seed");
  e->add_option("--samples", ev.samples, "Awareness samples")->check(CLI::Range(Index{2}, Index{10000000}));
  e->add_option("--fake-samples", ev.fake_samples, "Generated samples per class")->check(CLI::Range(Index{4}, Index{1000000}));
  e->add_option("--real-samples", ev.real_samples, "Reference samples per class")->check(CLI::Range(Index{4}, Index{1000000}));
  e->add_option("--ms-ssim-images", ev.ms_ssim_images, "Images for MS-SSIM pairs")->check(CLI::Range(Index{2}, Index{100000}));
  e->add_option("--ms-ssim-pairs", ev.ms_ssim_pairs, "MS-SSIM pairs")->check(CLI::Range(Index{1}, Index{10000000}));
  e->add_option("--knn-k", ev.knn_k, "Neighbourhood size for precision/recall")->check(CLI::Range(Index{1}, Index{1000}));
  e->add_option("--smoothing", ev.smoothing, "Sliding window for smoothed correlations")->check(CLI::NonNegativeNumber);
  e->add_option("--workers", ev.workers, "Worker threads (0 = all cores)");

  ServeArgs sv;
  auto* v = app.add_subcommand("serve", "Serve the JSON API");
  v->add_option("--model", sv.model, "CGW1 model")->required();
  v->add_option("--host", sv.host, "Bind address");
  v->add_option("--port", sv.port, "Port (0 = any free port)")->check(CLI::Range(0, 65535));
  v->add_option("--static-dir", sv.static_dir, "Directory of static assets served at /")->check(CLI::ExistingDirectory);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& ex) {
    const int code = app.exit(ex, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (p->parsed()) return cmd_plant(plant, plant_seed->count() > 0, out);
    if (a->parsed()) return cmd_awareness(aw, out);
    if (i->parsed()) return cmd_intervene(iv, out);
    if (h->parsed()) return cmd_hybridize(hy, out);
    if (s->parsed()) return cmd_segment(sg, out);
    if (e->parsed()) return cmd_evaluate(ev, out);
    if (v->parsed()) return cmd_serve(sv, out);
  } catch (const Error& ex) {
    err << "error [" << ex.code() << "]: " << ex.what() << "\n";
    return is_usage_code(ex.code()) ? kExitUsage : kExitRuntime;
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace awarekit::cli
