#include "hjb/config.hpp"

#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace hjb {

using nlohmann::json;

namespace {

[[noreturn]] void schema_fail(const std::string& path, const std::string& what) {
  fail(ErrorKind::Schema, path + ": " + what);
}

double require_positive(const json& j, const std::string& path) {
  if (!j.is_number()) schema_fail(path, "expected a number");
  const double v = j.get<double>();
  if (!(v > 0)) schema_fail(path, "must be positive");
  return v;
}

Domain parse_domain(const json& j) {
  if (!j.is_object()) schema_fail("domain", "expected an object");
  const std::string kind = j.value("kind", "");
  if (kind == "interval")
    return make_interval(require_positive(j.at("half_width"), "domain.half_width"));
  if (kind == "disk")
    return make_disk(require_positive(j.at("radius"), "domain.radius"));
  if (kind == "radial") {
    if (!j.contains("profile") || !j.at("profile").is_array())
      schema_fail("domain.profile", "expected an array of radii");
    std::vector<double> profile;
    for (const auto& v : j.at("profile")) profile.push_back(v.get<double>());
    return make_radial(std::move(profile));
  }
  schema_fail("domain.kind", "must be one of interval, disk, radial");
}

RunningCost parse_cost(const json& j) {
  if (!j.is_object()) schema_fail("lagrangian.f", "expected an object");
  const std::string name = j.value("name", "");
  if (name == "zero") return RunningCost::zero();
  if (name == "constant") return RunningCost::constant(j.value("value", 0.0));
  if (name == "affine") {
    Vec2 slope(j.value("slope_x", 0.0), j.value("slope_y", 0.0));
    return RunningCost::affine(j.value("offset", 0.0), slope);
  }
  if (name == "bump")
    return RunningCost::bump(j.value("amplitude", 1.0), j.value("sigma", 0.5));
  if (name == "cosine")
    return RunningCost::cosine(j.value("amplitude", 1.0), j.value("omega", 1.0));
  schema_fail("lagrangian.f.name", "unknown catalog entry '" + name + "'");
}

} // namespace

std::string pipeline_name(Pipeline p) {
  switch (p) {
    case Pipeline::Discounted: return "discounted";
    case Pipeline::Eigencurve: return "eigencurve";
    case Pipeline::Derivatives: return "derivatives";
    case Pipeline::DiscountLimit: return "discount-limit";
    case Pipeline::HopfCole: return "hopf-cole";
    case Pipeline::FullSuite: return "full-suite";
  }
  return "unknown";
}

Pipeline pipeline_from_name(const std::string& name) {
  for (Pipeline p : {Pipeline::Discounted, Pipeline::Eigencurve, Pipeline::Derivatives,
                     Pipeline::DiscountLimit, Pipeline::HopfCole, Pipeline::FullSuite})
    if (pipeline_name(p) == name) return p;
  fail(ErrorKind::Schema, "pipeline: unknown name '" + name + "'");
}

ExperimentConfig parse_config_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const std::exception& e) {
    fail(ErrorKind::Schema, std::string("config: invalid JSON: ") + e.what());
  }
  ExperimentConfig cfg;
  if (j.contains("domain")) cfg.domain = parse_domain(j.at("domain"));
  if (j.contains("lagrangian")) {
    const json& l = j.at("lagrangian");
    if (l.contains("p")) cfg.p = require_positive(l.at("p"), "lagrangian.p");
    if (l.contains("epsilon"))
      cfg.epsilon = require_positive(l.at("epsilon"), "lagrangian.epsilon");
    if (l.contains("f")) cfg.f = parse_cost(l.at("f"));
  }
  if (j.contains("grid")) {
    const json& g = j.at("grid");
    if (g.contains("h")) cfg.h = require_positive(g.at("h"), "grid.h");
    if (g.contains("refinements")) cfg.refinements = g.at("refinements").get<int>();
  }
  if (j.contains("schedule")) {
    const json& s = j.at("schedule");
    if (s.contains("gamma")) cfg.gamma = s.at("gamma").get<double>();
    if (s.contains("lambdas")) {
      cfg.lambdas.clear();
      for (const auto& v : s.at("lambdas")) cfg.lambdas.push_back(v.get<double>());
    }
    if (s.contains("deltas")) {
      cfg.deltas.clear();
      for (const auto& v : s.at("deltas"))
        cfg.deltas.push_back(require_positive(v, "schedule.deltas[]"));
    }
    if (s.contains("discount"))
      cfg.discount = require_positive(s.at("discount"), "schedule.discount");
  }
  if (j.contains("pipeline")) cfg.pipeline = pipeline_from_name(j.at("pipeline"));
  if (j.contains("output")) {
    const json& o = j.at("output");
    if (o.contains("dir")) cfg.output_dir = o.at("dir").get<std::string>();
    if (o.contains("formats")) {
      cfg.formats.clear();
      for (const auto& v : o.at("formats")) {
        const std::string s = v.get<std::string>();
        if (s == "csv")
          cfg.formats.push_back(OutputFormat::Csv);
        else if (s == "json")
          cfg.formats.push_back(OutputFormat::Json);
        else if (s == "plot-data")
          cfg.formats.push_back(OutputFormat::PlotData);
        else
          schema_fail("output.formats[]", "unknown format '" + s + "'");
      }
    }
  }
  if (const char* env = std::getenv("HJBLAB_OUT")) cfg.output_dir = env;
  validate_config(cfg);
  return cfg;
}

void validate_config(const ExperimentConfig& cfg) {
  // Regime guard: the chain pipelines need p > 2; the quadratic branch is
  // exactly p = 2.
  const bool chain_pipeline = cfg.pipeline != Pipeline::HopfCole;
  if (chain_pipeline && !(cfg.p > 2.0))
    schema_fail("lagrangian.p",
                "must be > 2 for pipeline " + pipeline_name(cfg.pipeline));
  if (cfg.pipeline == Pipeline::HopfCole && std::abs(cfg.p - 2.0) > 1e-12)
    schema_fail("lagrangian.p", "must equal 2 for the hopf-cole pipeline");
  if (cfg.refinements < 1) schema_fail("grid.refinements", "must be at least 1");
  if (!(cfg.h > 0)) schema_fail("grid.h", "must be positive");
  if (!(cfg.epsilon > 0)) schema_fail("lagrangian.epsilon", "must be positive");
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot open config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

std::string ExperimentConfig::canonical_text() const {
  std::ostringstream os;
  os.precision(17);
  os << "domain=" << static_cast<int>(domain.kind) << ":" << domain.half_width << ":"
     << domain.radius << ":" << domain.scale;
  for (double r : domain.profile) os << "," << r;
  os << ";p=" << p << ";eps=" << epsilon << ";f=" << f.describe() << ";h=" << h
     << ";refine=" << refinements << ";gamma=" << gamma << ";lambdas=";
  for (double l : lambdas) os << l << ",";
  os << ";deltas=";
  for (double d : deltas) os << d << ",";
  os << ";discount=" << discount << ";pipeline=" << pipeline_name(pipeline);
  return os.str();
}

} // namespace hjb
