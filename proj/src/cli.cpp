#include "photostyle/cli.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "photostyle/color.hpp"
#include "photostyle/error.hpp"
#include "photostyle/image_io.hpp"

namespace photostyle {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  const std::string v = trim(text);
  T out{};
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc() || ptr != v.data() + v.size())
    throw ValidationError(key + ": cannot parse '" + text + "' as a number");
  if constexpr (std::is_floating_point_v<T>) {
    if (!std::isfinite(out)) throw ValidationError(key + ": value must be finite");
  }
  return out;
}

struct Field {
  ConfigKey names;
  std::function<void(PipelineConfig&, const std::string&)> set;
};

template <typename T>
Field number_field(std::string key, std::string flag, T PipelineConfig::*member) {
  return {{key, flag}, [key, member](PipelineConfig& c, const std::string& v) { c.*member = parse_number<T>(key, v); }};
}

Field weight_field(std::string key, std::string flag, double FeatureWeights::*member) {
  return {{key, flag},
          [key, member](PipelineConfig& c, const std::string& v) { c.weights.*member = parse_number<double>(key, v); }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      weight_field("lambda_M", "--lambda-m", &FeatureWeights::lambda_M),
      weight_field("lambda_T", "--lambda-t", &FeatureWeights::lambda_T),
      weight_field("lambda_C", "--lambda-c", &FeatureWeights::lambda_C),
      weight_field("lambda_DV", "--lambda-dv", &FeatureWeights::lambda_DV),
      weight_field("lambda_S", "--lambda-s", &FeatureWeights::lambda_S),
      weight_field("lambda_La", "--lambda-la", &FeatureWeights::lambda_La),
      weight_field("lambda_Lr", "--lambda-lr", &FeatureWeights::lambda_Lr),
      weight_field("n_alpha", "--n-alpha", &FeatureWeights::n_alpha),
      weight_field("n_beta", "--n-beta", &FeatureWeights::n_beta),
      number_field("match_fraction", "--match-fraction", &PipelineConfig::match_fraction),
      number_field("patch_side", "--patch-side", &PipelineConfig::patch_side),
      {{"t_cluster", "--t-cluster"},
       [](PipelineConfig& c, const std::string& v) {
         if (trim(v) == "auto")
           c.t_cluster.reset();
         else
           c.t_cluster = parse_number<double>("t_cluster", v);
       }},
      number_field("target_superpixel_area", "--superpixel-area", &PipelineConfig::target_superpixel_area),
      number_field("stride", "--stride", &PipelineConfig::stride),
      number_field("epsilon_edge", "--epsilon-edge", &PipelineConfig::epsilon_edge),
      number_field("guided_radius", "--guided-radius", &PipelineConfig::guided_radius),
      number_field("guided_eps", "--guided-eps", &PipelineConfig::guided_eps),
      number_field("sigma_floor", "--sigma-floor", &PipelineConfig::sigma_floor),
      number_field("log_floor", "--log-floor", &PipelineConfig::log_floor),
      number_field("rng_seed", "--seed", &PipelineConfig::rng_seed),
      {{"feature_toggles", "--features"},
       [](PipelineConfig& c, const std::string& v) {
         try {
           c.feature_toggles = parse_feature_toggles(trim(v));
         } catch (const ValidationError& e) {
           throw ValidationError(std::string("feature_toggles: ") + e.what());
         }
       }},
  };
  return table;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ImageIoError(ImageIoError::Kind::unreadable, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Scales both sides' match locations; collisions are resolved by the
// ordinary loader (highest score wins).
std::string rescale_match_text(const MatchedPointSet& set, double factor, Dims in_dims, Dims ref_dims) {
  auto scale = [factor](PixelLoc p, Dims d) {
    const int r = std::clamp(static_cast<int>(std::lround(p.row * factor)), 0, d.height - 1);
    const int c = std::clamp(static_cast<int>(std::lround(p.col * factor)), 0, d.width - 1);
    return PixelLoc{r, c};
  };
  std::ostringstream out;
  out.precision(17);
  for (const Match& m : set.entries()) {
    const PixelLoc a = scale(m.input, in_dims);
    const PixelLoc b = scale(m.ref, ref_dims);
    out << a.col << ' ' << a.row << ' ' << b.col << ' ' << b.row << ' ' << m.score << '\n';
  }
  return out.str();
}

void write_intermediates(const std::string& stem, const ImagePlane& input, const ImagePlane& reference,
                         const MatchedPointSet& matches, const RunResult& result) {
  const Intermediates& im = result.intermediates;
  write_png(stem + ".matches_input.png", render_match_overlay(input, matches, Side::input));
  write_png(stem + ".matches_reference.png", render_match_overlay(reference, matches, Side::reference));
  write_png(stem + ".seeds_input.png", render_labels(im.seeds_input));
  write_png(stem + ".seeds_reference.png", render_labels(im.seeds_reference));
  write_png(stem + ".labels_input.png", render_labels(im.labels_input));
  write_png(stem + ".labels_reference.png", render_labels(im.labels_reference));
  write_png(stem + ".prefilter.png", lab_to_rgb(im.transferred));
  std::ofstream corr(stem + ".corr.txt");
  write_correspondences(corr, im.table, im.affinity);
  std::ofstream edges(stem + ".edges.txt");
  write_edge_list(edges, im.pixel_graph);
  if (!corr || !edges) throw ImageIoError(ImageIoError::Kind::write_failed, "failed writing intermediates for '" + stem + "'");
}

}  // namespace

const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys = [] {
    std::vector<ConfigKey> out;
    for (const Field& f : fields()) out.push_back(f.names);
    return out;
  }();
  return keys;
}

void set_config_value(PipelineConfig& config, const std::string& key, const std::string& value) {
  for (const Field& f : fields()) {
    if (f.names.key == key) {
      f.set(config, value);
      return;
    }
  }
  throw ValidationError("unknown key '" + key + "'");
}

void apply_config_text(PipelineConfig& config, std::istream& text) {
  std::string line;
  std::size_t number = 0;
  std::set<std::string> seen;
  while (std::getline(text, line)) {
    ++number;
    const std::string body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ParseError(number, "expected 'key = value'");
    const std::string key = trim(body.substr(0, eq));
    const std::string value = trim(body.substr(eq + 1));
    if (key.empty() || value.empty()) throw ParseError(number, "expected 'key = value'");
    if (!seen.insert(key).second) throw ParseError(number, "repeated key '" + key + "'");
    try {
      set_config_value(config, key, value);
    } catch (const ValidationError& e) {
      throw ParseError(number, e.what());
    }
  }
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Transfer the photographic style of a reference image onto an input image."};
  app.name("photostyle");
  std::string input_path, reference_path, matches_path, output_path, config_path, stop_after_text;
  double pre_scale = 1.0;
  bool emit_intermediates = false;
  app.add_option("--input", input_path, "Input image (PNG or JPEG)")->required();
  app.add_option("--reference", reference_path, "Reference image (PNG or JPEG)")->required();
  app.add_option("--matches", matches_path, "Match file: x_in y_in x_ref y_ref score per line")->required();
  app.add_option("--output", output_path, "Output PNG")->required();
  app.add_option("--config", config_path, "Flat key = value config file");
  app.add_flag("--emit-intermediates", emit_intermediates, "Write debug images and tables next to the output");
  app.add_option("--stop-after", stop_after_text, "Cut the flow short")
      ->check(CLI::IsMember({"seeds", "partition", "match"}));
  app.add_option("--pre-scale", pre_scale, "Resample both images by this factor first")
      ->check(CLI::PositiveNumber);

  std::vector<std::pair<std::string, std::string>> flag_values(fields().size());
  std::vector<CLI::Option*> flag_options;
  for (std::size_t i = 0; i < fields().size(); ++i) {
    const Field& f = fields()[i];
    flag_values[i].first = f.names.key;
    flag_options.push_back(app.add_option(f.names.flag, flag_values[i].second, "Sets " + f.names.key));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "usage: " << e.what() << "\nRun with --help for the list of options.\n";
    return 2;
  }

  PipelineConfig config;
  try {
    if (!config_path.empty()) {
      std::ifstream cfg(config_path);
      if (!cfg) throw ValidationError("cannot open '" + config_path + "'");
      apply_config_text(config, cfg);
    }
    for (std::size_t i = 0; i < flag_options.size(); ++i)
      if (flag_options[i]->count() > 0) set_config_value(config, flag_values[i].first, flag_values[i].second);
    config.validate();
  } catch (const Error& e) {
    err << "config: " << e.what() << '\n';
    return 2;
  }

  StopAfter stop = StopAfter::none;
  if (stop_after_text == "seeds") stop = StopAfter::seeds;
  if (stop_after_text == "partition") stop = StopAfter::partition;
  if (stop_after_text == "match") stop = StopAfter::match;

  std::string stage = "input";
  try {
    ImagePlane input = read_image(input_path);
    stage = "reference";
    ImagePlane reference = read_image(reference_path);
    stage = "matches";
    const std::string match_text = read_text_file(matches_path);
    std::istringstream match_stream(match_text);
    MatchedPointSet matches = load_matches(match_stream, input.dims(), reference.dims());
    if (pre_scale != 1.0) {
      stage = "pre-scale";
      input = resize_bilinear(input, pre_scale);
      reference = resize_bilinear(reference, pre_scale);
      std::istringstream scaled(rescale_match_text(matches, pre_scale, input.dims(), reference.dims()));
      stage = "matches";
      matches = load_matches(scaled, input.dims(), reference.dims());
    }

    stage = "pipeline";
    const RunResult result = run(input, reference, matches, config, stop);

    stage = "output";
    write_png(output_path, result.styled);
    if (emit_intermediates) {
      const std::filesystem::path p(output_path);
      const std::string stem = (p.parent_path() / p.stem()).string();
      write_intermediates(stem, input, reference, matches, result);
    }
    result.report.write(out);
  } catch (const StageError& e) {
    err << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << stage << ": " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace photostyle
