#include "tsboost/commands.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <openssl/evp.h>

#include "CLI11.hpp"
#include "json.hpp"
#include "tsboost/boost.hpp"
#include "tsboost/csv.hpp"
#include "tsboost/eval.hpp"
#include "tsboost/fcm.hpp"
#include "tsboost/simgen.hpp"

namespace tsboost::cli {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr);
  char buf[1 << 16];
  while (in.read(buf, sizeof buf) || in.gcount() > 0)
    EVP_DigestUpdate(ctx.get(), buf, static_cast<std::size_t>(in.gcount()));
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), digest, &len);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 15];
  }
  return out;
}

void prepare_output(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + dir.string() + ": " + ec.message());
}

Dataset load(const fs::path& input, const std::string& format) {
  if (format == "wide") return io::read_wide(input);
  if (format == "long") return io::read_long(input);
  throw Error(ErrorCode::ConfigError, "unknown input format '" + format + "'");
}

Json manifest_base(const std::string& command) {
  Json m;
  m["tool"] = "tsboost";
  m["version"] = kVersion;
  m["command"] = command;
  return m;
}

void add_spline(Json& m, const SplineOptions& s, std::size_t n) {
  m["spline_degree"] = s.degree;
  m["spline_penalty_order"] = s.penalty_order;
  m["spline_interior_knots"] = s.interior_knots.value_or(pspline::default_interior_knots(n));
  m["lambda_criterion"] = s.criterion;
  m["lambda_grid_min"] = 1e-6;
  m["lambda_grid_max"] = 1e6;
  m["lambda_grid_points"] = 50;
}

// Wall-clock timings vary run to run, so they live outside the manifest.
void write_timings(const fs::path& dir, const std::vector<std::pair<std::string, double>>& phases) {
  Json t;
  for (const auto& [name, seconds] : phases) t[name + "_seconds"] = seconds;
  io::write_text(dir / "timings.json", t.dump(2) + "\n");
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::vector<std::string> ids_of(const Dataset& d) {
  std::vector<std::string> ids;
  for (const auto& s : d.series) ids.push_back(s.id);
  return ids;
}

std::string format_centers(const std::vector<double>& domain, const Matrix& centers) {
  std::string out = "cluster";
  for (double t : domain) out += "," + io::format_double(t);
  out += "\n";
  for (Eigen::Index k = 0; k < centers.rows(); ++k) {
    out += std::to_string(k + 1);
    for (Eigen::Index j = 0; j < centers.cols(); ++j) out += "," + io::format_double(centers(k, j));
    out += "\n";
  }
  return out;
}

std::string optional_number(double x) { return std::isnan(x) ? std::string() : io::format_double(x); }

}  // namespace

pspline::SmootherSettings SplineOptions::settings() const {
  pspline::SmootherSettings s;
  s.degree = degree;
  s.penalty_order = penalty_order;
  s.interior_knots = interior_knots;
  s.criterion.name = pspline::parse_criterion(criterion);
  return s;
}

std::size_t threads_from_environment() {
  const char* raw = std::getenv("TSBOOST_THREADS");
  if (raw == nullptr || *raw == '\0') return 0;
  const std::string_view text(raw);
  std::size_t value = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size())
    throw Error(ErrorCode::ConfigError, "TSBOOST_THREADS must be a nonnegative integer");
  return value;
}

void cmd_simulate(const SimulateOptions& o) {
  const auto start = Clock::now();
  simgen::SimConfig config;
  config.cluster_sizes = o.sizes;
  config.points = o.points;
  config.sigma2_e = o.sigma2_e;
  config.sigma2_v = o.sigma2_v;
  config.sigma2_u = o.sigma2_u;
  config.ar_coefficient = o.ar_phi;
  config.ar_innovation_variance = o.ar_variance;
  config.seed = o.seed;
  const auto sim = simgen::generate(config);
  const double generate_time = seconds_since(start);

  prepare_output(o.out);
  io::write_text(o.out / "series.csv", io::format_wide(sim.data));
  io::write_text(o.out / "labels.csv", io::format_labels(ids_of(sim.data), sim.labels));

  Json m = manifest_base("simulate");
  m["seed"] = o.seed;
  std::string sizes;
  for (std::size_t i = 0; i < o.sizes.size(); ++i) sizes += (i ? "," : "") + std::to_string(o.sizes[i]);
  m["cluster_sizes"] = sizes;
  m["series"] = sim.data.size();
  m["points"] = o.points;
  m["sigma2_e"] = o.sigma2_e;
  m["sigma2_v"] = o.sigma2_v;
  m["sigma2_u"] = o.sigma2_u;
  m["ar_coefficient"] = o.ar_phi;
  m["ar_innovation_variance"] = o.ar_variance;
  io::write_text(o.out / "manifest.json", m.dump(2) + "\n");
  write_timings(o.out, {{"generate", generate_time}, {"total", seconds_since(start)}});
}

void cmd_cluster(const ClusterOptions& o) {
  const auto start = Clock::now();
  const Dataset data = load(o.input, o.format);
  const double load_time = seconds_since(start);
  const auto kind = distance::parse_kind(o.distance);
  const auto ids = ids_of(data);

  Json m = manifest_base("cluster");
  m["input"] = o.input.string();
  m["input_sha256"] = sha256_file(o.input);
  m["input_format"] = o.format;
  m["series"] = data.size();
  m["points"] = data.length();
  m["algorithm"] = o.algorithm;
  m["clusters"] = o.clusters;
  m["seed"] = o.seed;

  Matrix centers;
  Matrix membership;
  std::string trace;
  const auto fit_start = Clock::now();
  if (o.algorithm == "boost") {
    boost::BoostConfig config;
    config.clusters = o.clusters;
    config.max_iterations = o.iterations;
    config.restarts = o.restarts;
    config.distance = kind;
    config.seed = o.seed;
    config.spline = o.spline.settings();
    config.sample_size = o.sample_size;
    config.threads = threads_from_environment();
    const auto result = boost::run_boost(data, config);
    centers = result.centers;
    membership = result.P.values();
    trace = "restart,iteration,beta,bc\n";
    for (std::size_t r = 0; r < result.restarts.size(); ++r) {
      const auto& t = result.restarts[r];
      for (std::size_t it = 0; it < t.beta.size(); ++it)
        trace += std::to_string(r + 1) + "," + std::to_string(it + 1) + "," +
                 io::format_double(t.beta[it]) + "," + io::format_double(t.bc[it]) + "\n";
    }
    m["distance"] = o.distance;
    m["iterations"] = o.iterations;
    m["restarts"] = o.restarts;
    m["sample_size"] = o.sample_size.value_or(data.size());
    add_spline(m, o.spline, data.length());
    m["chosen_restart"] = result.restart + 1;
    m["bc_final"] = result.bc_final;
  } else if (o.algorithm == "fcm") {
    fcm::FcmConfig config;
    config.clusters = o.clusters;
    config.fuzzifier = o.fuzzifier;
    config.epsilon = o.epsilon;
    config.max_sweeps = o.max_sweeps;
    config.seed = o.seed;
    const auto result = fcm::run_fcm(data, config);
    centers = result.centers;
    membership = result.U.values();
    trace = "restart,iteration,objective,bc\n";
    for (std::size_t it = 0; it < result.objective.size(); ++it)
      trace += "1," + std::to_string(it + 1) + "," + io::format_double(result.objective[it]) + "," +
               io::format_double(result.bc[it]) + "\n";
    m["fuzzifier"] = o.fuzzifier;
    m["epsilon"] = o.epsilon;
    m["max_sweeps"] = o.max_sweeps;
    m["sweeps"] = result.sweeps;
    m["converged"] = result.converged;
    m["bc_final"] = pdclust::bc_index(result.U);
  } else {
    throw Error(ErrorCode::ConfigError, "unknown algorithm '" + o.algorithm + "'");
  }
  const double fit_time = seconds_since(fit_start);

  prepare_output(o.out);
  io::write_text(o.out / "membership.csv", io::format_membership(ids, membership));
  io::write_text(o.out / "centers.csv", format_centers(data.domain, centers));
  io::write_text(o.out / "assignments.csv", io::format_labels(ids, harden(membership), "cluster"));
  io::write_text(o.out / "trace.csv", trace);
  io::write_text(o.out / "manifest.json", m.dump(2) + "\n");
  write_timings(o.out, {{"load", load_time}, {"cluster", fit_time}, {"total", seconds_since(start)}});
}

std::string cmd_evaluate(const EvaluateOptions& o) {
  const auto candidate = io::read_membership(o.membership);
  MembershipMatrix reference;
  std::vector<int> truth;
  std::vector<std::string> reference_ids;
  if (o.reference_membership) {
    if (o.reference_labels)
      throw Error(ErrorCode::ConfigError, "give either --reference-membership or --reference-labels");
    auto ref = io::read_membership(*o.reference_membership);
    reference_ids = ref.ids;
    reference = ref.P;
    truth = harden(reference);
  } else if (o.reference_labels) {
    if (!o.input) throw Error(ErrorCode::ConfigError, "--reference-labels requires --input");
    const Dataset data = load(*o.input, o.format);
    const auto labels = io::read_labels(*o.reference_labels);
    if (labels.ids != ids_of(data))
      throw Error(ErrorCode::SizeMismatch, "reference labels do not list the input series in order");
    const auto ref = eval::reference_partition(data, labels.labels, distance::parse_kind(o.distance),
                                               o.spline.settings());
    reference_ids = labels.ids;
    reference = ref.model.P;
    truth = labels.labels;
  } else {
    throw Error(ErrorCode::ConfigError, "a reference (membership or labels) is required");
  }
  if (candidate.ids.size() != reference_ids.size())
    throw Error(ErrorCode::SizeMismatch, "candidate has " + std::to_string(candidate.ids.size()) +
                                             " series, reference has " +
                                             std::to_string(reference_ids.size()));
  if (candidate.ids != reference_ids)
    throw Error(ErrorCode::SizeMismatch, "candidate and reference list different series ids");

  const auto predicted = harden(candidate.P);
  const double fuzzy = eval::fuzzy_rand(candidate.P, reference);
  const double rand = eval::classic_rand(truth, predicted);
  const double bc = pdclust::bc_index(candidate.P);
  const auto cm = eval::confusion_matrix(truth, predicted);

  std::ostringstream report;
  report << "fuzzy_rand " << io::format_double(fuzzy) << "\n";
  report << "classic_rand " << io::format_double(rand) << "\n";
  report << "bc " << io::format_double(bc) << "\n";
  report << "confusion (rows: reference, columns: candidate)\n";
  report << "ref\\cand";
  for (int p : cm.predicted_labels) report << "," << p;
  report << "\n";
  for (std::size_t t = 0; t < cm.truth_labels.size(); ++t) {
    report << cm.truth_labels[t];
    for (std::size_t c : cm.counts[t]) report << "," << c;
    report << "\n";
  }

  if (o.out) {
    Json j;
    j["fuzzy_rand"] = fuzzy;
    j["classic_rand"] = rand;
    j["bc"] = bc;
    j["confusion_reference_labels"] = cm.truth_labels;
    j["confusion_candidate_labels"] = cm.predicted_labels;
    j["confusion_counts"] = cm.counts;
    if (o.out->has_parent_path()) prepare_output(o.out->parent_path());
    io::write_text(*o.out, j.dump(2) + "\n");
  }
  return report.str();
}

void cmd_smooth(const SmoothOptions& o) {
  const auto start = Clock::now();
  const Dataset data = load(o.input, o.format);
  const TimeSeriesRecord* series = &data.series.front();
  if (o.series_id) {
    series = nullptr;
    for (const auto& s : data.series)
      if (s.id == *o.series_id) series = &s;
    if (series == nullptr)
      throw Error(ErrorCode::ParseError, "series '" + *o.series_id + "' not found in " + o.input.string());
  }
  const auto settings = o.spline.settings();
  const pspline::OptimalSmoother smoother(data.domain, settings);
  const Vector y = Eigen::Map<const Vector>(series->values.data(),
                                            static_cast<Eigen::Index>(series->values.size()));

  pspline::LambdaSelection sel;
  bool flat = false;
  try {
    sel = pspline::select_lambda(y, smoother.basis(), smoother.penalty(), settings.criterion);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::FlatCriterion) throw;
    flat = true;
  }
  const pspline::SplineFit fit = flat ? smoother.fit(y) : sel.fit;

  prepare_output(o.out);
  std::string fitted = "t,y,fitted\n";
  for (std::size_t j = 0; j < data.length(); ++j)
    fitted += io::format_double(data.domain[j]) + "," + io::format_double(series->values[j]) + "," +
              io::format_double(fit.fitted(static_cast<Eigen::Index>(j))) + "\n";
  io::write_text(o.out / "fit.csv", fitted);

  // One row per grid lambda; `score` sits on the grid point where the
  // criterion's value is attributed (interval start for the V-curve).
  const auto& grid = settings.criterion.grid;
  std::string profile = "lambda,rss,roughness,ed,score_lambda,score\n";
  std::size_t offset = settings.criterion.name == pspline::Criterion::LCurve ? 1 : 0;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const auto f = pspline::fit_pspline(y, std::nullopt, smoother.basis(), smoother.penalty(), grid[g]);
    const double rss = (y - f.fitted).squaredNorm();
    const double rough = (smoother.penalty()->D * f.coefficients).squaredNorm();
    const double ed = pspline::effective_dimension(*smoother.basis(), *smoother.penalty(), grid[g]);
    double score = std::nan(""), at = std::nan("");
    if (!flat && g >= offset && g - offset < sel.scores.size()) {
      score = sel.scores[g - offset];
      at = sel.score_lambda[g - offset];
    }
    profile += io::format_double(grid[g]) + "," + io::format_double(rss) + "," +
               io::format_double(rough) + "," + io::format_double(ed) + "," + optional_number(at) +
               "," + optional_number(score) + "\n";
  }
  io::write_text(o.out / "profile.csv", profile);

  Json m = manifest_base("smooth");
  m["input"] = o.input.string();
  m["input_sha256"] = sha256_file(o.input);
  m["input_format"] = o.format;
  m["series_id"] = series->id;
  add_spline(m, o.spline, data.length());
  m["criterion_flat"] = flat;
  m["selected_lambda"] = fit.lambda;
  io::write_text(o.out / "manifest.json", m.dump(2) + "\n");
  write_timings(o.out, {{"total", seconds_since(start)}});
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::ConfigError:
    case ErrorCode::InvalidArgument:
      return kExitUsage;
    default:
      return kExitData;
  }
}

int run(int argc, char** argv) {
  CLI::App app{"Boosted probabilistic clustering of time series"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  auto add_spline_flags = [](CLI::App* cmd, SplineOptions& s) {
    cmd->add_option("--lambda-criterion,--criterion", s.criterion,
                    "aic | loocv | gcv | lcurve | vcurve")
        ->capture_default_str();
    cmd->add_option("--degree", s.degree, "B-spline degree")->capture_default_str();
    cmd->add_option("--penalty-order", s.penalty_order, "difference penalty order")
        ->capture_default_str();
    cmd->add_option("--interior-knots", s.interior_knots, "default min(ceil(n/4), 40)");
  };

  SimulateOptions sim;
  auto* simulate = app.add_subcommand("simulate", "generate the six-cluster benchmark");
  simulate->add_option("--out", sim.out, "output directory")->capture_default_str();
  simulate->add_option("--seed", sim.seed)->capture_default_str();
  simulate->add_option("--sizes", sim.sizes, "six cluster sizes")->delimiter(',')->expected(6);
  simulate->add_option("--points", sim.points)->capture_default_str();
  simulate->add_option("--sigma2-e", sim.sigma2_e)->capture_default_str();
  simulate->add_option("--sigma2-v", sim.sigma2_v)->capture_default_str();
  simulate->add_option("--sigma2-u", sim.sigma2_u)->capture_default_str();
  simulate->add_option("--ar-phi", sim.ar_phi)->capture_default_str();
  simulate->add_option("--ar-variance", sim.ar_variance, "AR(1) innovation variance")
      ->capture_default_str();

  ClusterOptions cl;
  auto* cluster = app.add_subcommand("cluster", "cluster series from a CSV file");
  cluster->add_option("--input", cl.input)->required();
  cluster->add_option("--format", cl.format, "wide | long")->capture_default_str();
  cluster->add_option("--out", cl.out)->capture_default_str();
  cluster->add_option("--algorithm", cl.algorithm, "boost | fcm")->capture_default_str();
  cluster->add_option("--k", cl.clusters)->required();
  cluster->add_option("--distance", cl.distance, "euclidean | penrose | periodogram")
      ->capture_default_str();
  cluster->add_option("--iters", cl.iterations)->capture_default_str();
  cluster->add_option("--restarts", cl.restarts)->capture_default_str();
  cluster->add_option("--seed", cl.seed)->capture_default_str();
  cluster->add_option("--sample-size", cl.sample_size, "series drawn per cluster (default N)");
  cluster->add_option("--fuzzifier", cl.fuzzifier, "fcm only")->capture_default_str();
  cluster->add_option("--epsilon", cl.epsilon, "fcm only")->capture_default_str();
  cluster->add_option("--max-sweeps", cl.max_sweeps, "fcm only")->capture_default_str();
  add_spline_flags(cluster, cl.spline);

  EvaluateOptions ev;
  auto* evaluate = app.add_subcommand("evaluate", "compare a membership matrix to a reference");
  evaluate->add_option("--membership", ev.membership)->required();
  auto* ref_m = evaluate->add_option("--reference-membership", ev.reference_membership);
  auto* ref_l = evaluate->add_option("--reference-labels", ev.reference_labels);
  ref_m->excludes(ref_l);
  evaluate->add_option("--input", ev.input);
  evaluate->add_option("--format", ev.format)->capture_default_str();
  evaluate->add_option("--distance", ev.distance)->capture_default_str();
  evaluate->add_option("--out", ev.out, "write the report as JSON");
  add_spline_flags(evaluate, ev.spline);

  SmoothOptions sm;
  auto* smooth = app.add_subcommand("smooth", "fit an optimal P-spline to one series");
  smooth->add_option("--input", sm.input)->required();
  smooth->add_option("--format", sm.format)->capture_default_str();
  smooth->add_option("--series-id", sm.series_id, "default: first series");
  smooth->add_option("--out", sm.out)->capture_default_str();
  add_spline_flags(smooth, sm.spline);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*simulate) cmd_simulate(sim);
    if (*cluster) cmd_cluster(cl);
    if (*evaluate) std::cout << cmd_evaluate(ev);
    if (*smooth) cmd_smooth(sm);
  } catch (const Error& e) {
    std::cerr << "tsboost: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "tsboost: " << e.what() << "\n";
    return kExitData;
  }
  return kExitOk;
}

}  // namespace tsboost::cli
