#include "bdg/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include "bdg/bdmcmc.hpp"
#include "bdg/benchmark.hpp"
#include "bdg/errors.hpp"
#include "bdg/estimators.hpp"
#include "bdg/io.hpp"
#include "bdg/timecourse.hpp"

namespace bdg::cli {

std::string version() { return "0.1.0"; }

namespace {

namespace fs = std::filesystem;

struct KeySpec {
  std::string key;
  std::string def;
  std::string help;
};

const std::vector<KeySpec> kChainKeys = {
    {"b", "3", "G-Wishart prior degrees of freedom (> 2)"},
    {"d", "identity", "G-Wishart prior scale: identity | scaled:<c> | file:<path>"},
    {"prior", "uniform", "graph prior: uniform | poisson:<gamma>"},
    {"iterations", "60000", "chain length"},
    {"burn_in", "30000", "steps left out of the estimates"},
    {"seed", "0", "master seed (BDG_SEED overrides the config file, the flag overrides both)"},
    {"stride", "10", "K snapshot stride after burn-in"},
    {"occupancy_stride", "100", "rows of occupancy.csv every this many steps"},
    {"exchange_mode", "shared", "auxiliary prior draw: shared | per_edge"},
    {"rate_form", "ratio", "rate from density ratio r: ratio | capped (min(1, r))"},
    {"svg", "false", "also write occupancy.svg"},
    {"out", ".", "output directory"},
};

const std::vector<std::string> kMetaKeys = {"command", "version", "config_hash", "data_hash"};

struct Command {
  std::string name;
  std::string help;
  std::vector<KeySpec> keys;
};

std::vector<KeySpec> with_chain(std::vector<KeySpec> own) {
  own.insert(own.end(), kChainKeys.begin(), kChainKeys.end());
  return own;
}

std::vector<Command> commands() {
  return {
      {"fit", "learn the graph from an n x p data CSV (or a scatter matrix)",
       with_chain({{"data", "", "n x p numeric CSV, header optional"},
                   {"header", "auto", "data header: auto | present | absent"},
                   {"scatter", "", "p x p scatter matrix S = x^T x instead of data"},
                   {"n", "", "sample size behind --scatter"}})},
      {"simulate", "draw data from one of the synthetic models",
       {{"model", "circle", "circle | star | ar1 | ar2 | random | cluster | scale-free"},
        {"p", "10", "number of nodes"},
        {"n", "100", "number of rows"},
        {"seed", "0", "master seed"},
        {"out", ".", "output directory"}}},
      {"bench", "run a scenario grid and score every replication",
       {{"scenarios", "", "CSV with header model,p,n,reps[,iterations,burn_in]"},
        {"iterations", "60000", "default chain length"},
        {"burn_in", "30000", "default burn-in"},
        {"seed", "0", "master seed"},
        {"threads", "1", "worker threads"},
        {"threshold", "0.5", "edge selected when p_e exceeds this"},
        {"exchange_mode", "shared", "shared | per_edge"},
        {"rate_form", "ratio", "ratio | capped"},
        {"out", ".", "output directory"}}},
      {"timecourse", "stable graph with spline mean curves; first CSV column is time",
       with_chain({{"data", "", "CSV with header, first column named time"},
                   {"basis_size", "5", "natural cubic spline basis size m"},
                   {"beta_prior_var", "10", "prior variance of every spline coefficient"}})},
  };
}

std::string dashed(std::string key) {
  std::replace(key.begin(), key.end(), '_', '-');
  return key;
}

class Settings {
 public:
  explicit Settings(KeyValues v) : v_(std::move(v)) {}

  const std::string& str(const std::string& key) const { return v_.at(key); }
  const KeyValues& all() const { return v_; }

  double real(const std::string& key) const {
    const std::string& s = str(key);
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || *end != '\0' || !std::isfinite(v)) throw ConfigError(key + " must be a number, got '" + s + "'");
    return v;
  }

  std::uint64_t u64(const std::string& key) const {
    const std::string& s = str(key);
    if (s.empty() || !std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); }))
      throw ConfigError(key + " must be a non-negative integer, got '" + s + "'");
    try {
      return std::stoull(s);
    } catch (const std::exception&) {
      throw ConfigError(key + " is out of range: '" + s + "'");
    }
  }

  bool flag(const std::string& key) const {
    const std::string& s = str(key);
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no" || s.empty()) return false;
    throw ConfigError(key + " must be true or false, got '" + s + "'");
  }

 private:
  KeyValues v_;
};

Settings resolve(const Command& cmd, const std::string& config_path, const KeyValues& flags, std::ostream& err) {
  KeyValues v;
  for (const auto& k : cmd.keys) v[k.key] = k.def;
  if (!config_path.empty()) {
    const KeyValues file = read_key_values_file(config_path);
    for (const auto& [key, value] : file) {
      if (std::find(kMetaKeys.begin(), kMetaKeys.end(), key) != kMetaKeys.end()) {
        if (key == "command" && value != cmd.name)
          throw ConfigError("config file is for command '" + value + "', not '" + cmd.name + "'");
        continue;
      }
      if (!v.count(key)) {
        std::string valid;
        for (const auto& k : cmd.keys) valid += (valid.empty() ? "" : ", ") + k.key;
        throw ConfigError("unknown config key '" + key + "' for " + cmd.name + "; valid keys: " + valid);
      }
      v[key] = value;
    }
  }
  if (const char* env = std::getenv("BDG_SEED"); env && v.count("seed")) {
    v["seed"] = env;
    if (flags.count("seed")) err << "note: --seed overrides BDG_SEED\n";
  }
  for (const auto& [key, value] : flags) v[key] = value;
  return Settings(std::move(v));
}

// Parse errors name the file; the row and column stay in the message.
NumericTable read_table(const std::string& path, HeaderMode mode = HeaderMode::Auto) {
  try {
    return read_numeric_csv_file(path, mode);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

GraphPrior parse_prior(const std::string& s) {
  if (s == "uniform") return UniformPrior{};
  if (s.rfind("poisson:", 0) == 0) {
    char* end = nullptr;
    const double g = std::strtod(s.c_str() + 8, &end);
    if (*end != '\0' || !(g > 0.0) || !std::isfinite(g)) throw ConfigError("poisson prior needs gamma > 0, got '" + s + "'");
    return TruncatedPoissonPrior{g};
  }
  throw ConfigError("prior must be uniform or poisson:<gamma>, got '" + s + "'");
}

SymMatrixd parse_scale(const std::string& s, Index p) {
  if (s == "identity") return SymMatrixd::identity(p);
  if (s.rfind("scaled:", 0) == 0) {
    char* end = nullptr;
    const double c = std::strtod(s.c_str() + 7, &end);
    if (*end != '\0' || !(c > 0.0) || !std::isfinite(c)) throw ConfigError("d=scaled:<c> needs c > 0, got '" + s + "'");
    return SymMatrixd(MatrixXd::Identity(p, p) * c);
  }
  if (s.rfind("file:", 0) == 0) {
    const MatrixXd m = read_table(s.substr(5)).values;
    if (m.rows() != p || m.cols() != p)
      throw ConfigError("D file must be " + std::to_string(p) + " x " + std::to_string(p));
    if (!(m - m.transpose()).isZero(1e-12)) throw ConfigError("D file is not symmetric");
    return SymMatrixd(m);
  }
  throw ConfigError("d must be identity, scaled:<c> or file:<path>, got '" + s + "'");
}

ChainConfig chain_config(const Settings& s, Index p) {
  ChainConfig cfg;
  cfg.iterations = s.u64("iterations");
  cfg.burn_in = s.u64("burn_in");
  cfg.seed = s.u64("seed");
  cfg.snapshot_stride = s.u64("stride");
  cfg.prior = parse_prior(s.str("prior"));
  cfg.gw_prior = GWishartParams{s.real("b"), parse_scale(s.str("d"), p)};
  cfg.exchange_mode = parse_exchange_mode(s.str("exchange_mode"));
  cfg.rate_form = parse_rate_form(s.str("rate_form"));
  return cfg;
}

fs::path out_dir(const Settings& s) {
  fs::path dir(s.str("out"));
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory '" + dir.string() + "': " + ec.message());
  return dir;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot write '" + path.string() + "'");
  return f;
}

void write_manifest(const fs::path& dir, const std::string& command, const Settings& s,
                    const std::vector<std::string>& data_paths) {
  std::ostringstream body;
  for (const auto& [key, value] : s.all())
    if (key != "out") body << key << '=' << value << '\n';
  std::string data_bytes;
  for (const auto& path : data_paths)
    if (!path.empty()) data_bytes += read_file(path);
  auto f = open_out(dir / "run_manifest.txt");
  f << "# bdg run manifest; pass it back with --config to repeat the run\n";
  f << "command=" << command << '\n';
  f << "version=" << version() << '\n';
  f << "config_hash=" << hex64(fnv1a64(command + '\n' + body.str())) << '\n';
  if (!data_bytes.empty()) f << "data_hash=" << hex64(fnv1a64(data_bytes)) << '\n';
  f << body.str();
}

std::vector<std::string> edge_labels(int p) {
  std::vector<std::string> labels;
  for (int i = 0; i < p; ++i)
    for (int j = i + 1; j < p; ++j) labels.push_back(std::to_string(i) + "-" + std::to_string(j));
  return labels;
}

// Rows of the running p_e at every `every`-th step and at the last step.
struct OccupancyRows {
  std::vector<std::size_t> steps;
  std::vector<std::vector<double>> values;
};

OccupancyRows occupancy_rows(const ChainTrace& trace, std::size_t every) {
  const int p = trace.p();
  std::vector<double> in(candidate_count(p), 0.0);
  double all = 0.0;
  OccupancyRows rows;
  const auto& steps = trace.steps();
  for (std::size_t t = 0; t < steps.size(); ++t) {
    all += steps[t].weight;
    for (const Edge e : trace.graphs()[steps[t].graph_id].edges()) in[edge_index(p, e)] += steps[t].weight;
    if (t % every == 0 || t + 1 == steps.size()) {
      rows.steps.push_back(t);
      std::vector<double> row(in.size());
      for (std::size_t k = 0; k < in.size(); ++k) row[k] = in[k] / all;
      rows.values.push_back(std::move(row));
    }
  }
  return rows;
}

void write_svg(const fs::path& path, const OccupancyRows& rows, std::size_t burn_in, std::size_t total) {
  const double w = 800, h = 400, pad = 40;
  auto f = open_out(path);
  f << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\">\n";
  f << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  const double span = std::max<double>(1.0, static_cast<double>(total - 1));
  const auto x = [&](std::size_t t) { return pad + (w - 2 * pad) * static_cast<double>(t) / span; };
  const auto y = [&](double v) { return h - pad - (h - 2 * pad) * v; };
  f << "<line x1=\"" << pad << "\" y1=\"" << y(0) << "\" x2=\"" << w - pad << "\" y2=\"" << y(0)
    << "\" stroke=\"black\"/>\n";
  f << "<line x1=\"" << pad << "\" y1=\"" << y(0) << "\" x2=\"" << pad << "\" y2=\"" << y(1)
    << "\" stroke=\"black\"/>\n";
  f << "<line x1=\"" << x(burn_in) << "\" y1=\"" << y(0) << "\" x2=\"" << x(burn_in) << "\" y2=\"" << y(1)
    << "\" stroke=\"grey\" stroke-dasharray=\"4\"/>\n";
  f << "<text x=\"" << pad << "\" y=\"" << pad - 10 << "\" font-size=\"12\">cumulative occupancy</text>\n";
  const std::size_t edges = rows.values.empty() ? 0 : rows.values.front().size();
  for (std::size_t k = 0; k < edges; ++k) {
    f << "<polyline fill=\"none\" stroke=\"hsl(" << (k * 47) % 360 << ",60%,40%)\" stroke-width=\"1\" points=\"";
    for (std::size_t r = 0; r < rows.steps.size(); ++r)
      f << (r ? " " : "") << x(rows.steps[r]) << ',' << y(rows.values[r][k]);
    f << "\"/>\n";
  }
  f << "</svg>\n";
}

void write_fit_outputs(const fs::path& dir, const ChainTrace& trace, const Settings& s) {
  const int p = trace.p();
  const PosteriorSummary sum = summarize(trace);
  write_matrix_csv_file((dir / "phat.csv").string(), sum.phat);
  write_matrix_csv_file((dir / "khat.csv").string(), sum.khat.matrix());

  {
    auto f = open_out(dir / "graph_probs.csv");
    f << "graph,probability\n";
    for (const auto& gp : sum.graph_probs) f << '"' << gp.graph.canonical() << "\"," << format_double(gp.probability) << '\n';
  }
  {
    auto f = open_out(dir / "trace.csv");
    f << "step,graph,weight\n";
    for (std::size_t t = 0; t < trace.steps().size(); ++t) {
      const auto& st = trace.steps()[t];
      f << t << ",\"" << trace.graphs()[st.graph_id].canonical() << "\"," << format_double(st.weight) << '\n';
    }
  }
  const std::size_t every = std::max<std::uint64_t>(1, s.u64("occupancy_stride"));
  const OccupancyRows rows = occupancy_rows(trace, every);
  {
    auto f = open_out(dir / "occupancy.csv");
    f << "step,burn_in";
    for (const auto& l : edge_labels(p)) f << ',' << l;
    f << '\n';
    for (std::size_t r = 0; r < rows.steps.size(); ++r) {
      f << rows.steps[r] << ',' << (rows.steps[r] < trace.burn_in() ? 1 : 0);
      for (double v : rows.values[r]) f << ',' << format_double(v);
      f << '\n';
    }
  }
  if (s.flag("svg")) write_svg(dir / "occupancy.svg", rows, trace.burn_in(), trace.steps().size());
  {
    auto f = open_out(dir / "diagnostics.txt");
    f << "steps=" << trace.steps().size() << '\n';
    f << "counted_steps=" << trace.counted_steps() << '\n';
    f << "visited_graphs=" << sum.graph_probs.size() << '\n';
    f << "clamped_rates=" << trace.clamped << '\n';
    f << "map_graph=" << sum.map_graph.canonical() << '\n';
    f << "map_probability=" << format_double(sum.graph_probs.front().probability) << '\n';
  }
}

int cmd_fit(const Settings& s, std::ostream& out) {
  const std::string& data = s.str("data");
  const std::string& scatter = s.str("scatter");
  if (data.empty() == scatter.empty()) throw ConfigError("fit needs exactly one of data or scatter");

  SymMatrixd S;
  double n = 0.0;
  if (!data.empty()) {
    if (!s.str("n").empty()) throw ConfigError("n is only used with scatter; with data it is the row count");
    const std::string& hm = s.str("header");
    const HeaderMode mode = hm == "auto"      ? HeaderMode::Auto
                            : hm == "present" ? HeaderMode::Present
                            : hm == "absent"  ? HeaderMode::Absent
                                              : throw ConfigError("header must be auto, present or absent");
    const MatrixXd x = read_table(data, mode).values;
    const MatrixXd xtx = x.transpose() * x;
    if (!xtx.allFinite()) throw NumericalError("scatter matrix overflowed; rescale the data");
    S = SymMatrixd(xtx);
    n = static_cast<double>(x.rows());
  } else {
    const MatrixXd m = read_table(scatter).values;
    if (m.rows() != m.cols()) throw ConfigError("scatter matrix must be square");
    if (!(m - m.transpose()).isZero(1e-12)) throw ConfigError("scatter matrix is not symmetric");
    S = SymMatrixd(m);
    if (s.str("n").empty()) throw ConfigError("scatter needs n");
    n = s.real("n");
  }
  const Index p = S.size();
  if (p < 2) throw ConfigError("need at least 2 variables, got " + std::to_string(p));
  ChainConfig cfg = chain_config(s, p);
  cfg.data_scatter = S;
  cfg.n = n;
  const fs::path dir = out_dir(s);
  const ChainTrace trace = run_chain(cfg);
  write_fit_outputs(dir, trace, s);
  write_manifest(dir, "fit", s, {data, scatter});
  out << "fit: p=" << p << " n=" << n << " steps=" << trace.steps().size() << " -> " << dir.string() << '\n';
  return kExitOk;
}

int cmd_simulate(const Settings& s, std::ostream& out) {
  const ModelKind kind = parse_model_kind(s.str("model"));
  const auto p = static_cast<int>(s.u64("p"));
  const auto n = static_cast<std::size_t>(s.u64("n"));
  const std::uint64_t seed = s.u64("seed");
  TrueModel truth;
  try {
    truth = generate_model(SyntheticModel{kind, p, seed});
  } catch (const InvalidDimension& e) {
    throw ConfigError(e.what());
  }
  Rng rng = make_stream(seed, 2);
  const MvnSample data = sample_mvn(truth.sigma, n, rng);
  const fs::path dir = out_dir(s);
  std::vector<std::string> header;
  for (int i = 0; i < p; ++i) header.push_back("x" + std::to_string(i));
  write_matrix_csv_file((dir / "data.csv").string(), data.x, header);
  write_matrix_csv_file((dir / "true_k.csv").string(), truth.k.matrix());
  write_matrix_csv_file((dir / "true_sigma.csv").string(), truth.sigma.matrix());
  open_out(dir / "true_graph.txt") << truth.graph.canonical() << '\n';
  write_manifest(dir, "simulate", s, {});
  out << "simulate: " << to_string(kind) << " p=" << p << " n=" << n << " edges=" << truth.graph.edge_count()
      << " -> " << dir.string() << '\n';
  return kExitOk;
}

std::vector<Scenario> read_scenarios(const std::string& path, const Settings& s) {
  std::istringstream in(read_file(path));
  std::string line;
  std::size_t row = 0;
  std::vector<std::string> header;
  std::vector<Scenario> out;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos || line[0] == '#') continue;
    std::vector<std::string> fields;
    std::stringstream ls(line);
    std::string f;
    while (std::getline(ls, f, ',')) {
      const auto a = f.find_first_not_of(" \t"), b = f.find_last_not_of(" \t");
      fields.push_back(a == std::string::npos ? "" : f.substr(a, b - a + 1));
    }
    if (header.empty()) {
      header = fields;
      const std::vector<std::string> need = {"model", "p", "n", "reps"};
      for (std::size_t c = 0; c < need.size(); ++c)
        if (c >= header.size() || header[c] != need[c])
          throw ParseError("scenario header must start with model,p,n,reps", row, c + 1);
      continue;
    }
    if (fields.size() != header.size())
      throw ParseError("expected " + std::to_string(header.size()) + " fields, got " + std::to_string(fields.size()),
                       row);
    Scenario sc;
    sc.iterations = s.u64("iterations");
    sc.burn_in = s.u64("burn_in");
    for (std::size_t c = 0; c < fields.size(); ++c) {
      const std::string& key = header[c];
      if (key == "model") {
        sc.kind = parse_model_kind(fields[c]);
        continue;
      }
      const std::string& v = fields[c];
      if (v.empty() || !std::all_of(v.begin(), v.end(), [](unsigned char ch) { return std::isdigit(ch); }))
        throw ParseError("expected a non-negative integer, got '" + v + "'", row, c + 1);
      const auto num = std::stoull(v);
      if (key == "p") sc.p = static_cast<int>(num);
      else if (key == "n") sc.n = num;
      else if (key == "reps") sc.reps = num;
      else if (key == "iterations") sc.iterations = num;
      else if (key == "burn_in") sc.burn_in = num;
      else throw ParseError("unknown scenario column '" + key + "'", 1, c + 1);
    }
    out.push_back(sc);
  }
  return out;
}

int cmd_bench(const Settings& s, std::ostream& out) {
  if (s.str("scenarios").empty()) throw ConfigError("bench needs a scenarios file");
  const std::vector<Scenario> scenarios = read_scenarios(s.str("scenarios"), s);
  BenchOptions opts;
  opts.seed = s.u64("seed");
  opts.threads = static_cast<unsigned>(s.u64("threads"));
  opts.threshold = s.real("threshold");
  opts.exchange_mode = parse_exchange_mode(s.str("exchange_mode"));
  opts.rate_form = parse_rate_form(s.str("rate_form"));
  const fs::path dir = out_dir(s);
  const BenchReport report = run_benchmark(scenarios, opts);

  {
    auto f = open_out(dir / "reps.csv");
    f << "model,p,n,rep,seed,status,f1,ce,kl,seconds,error\n";
    for (const auto& r : report.reps) {
      const Scenario& sc = scenarios[r.scenario];
      std::string msg = r.error;
      std::replace(msg.begin(), msg.end(), ',', ';');
      std::replace(msg.begin(), msg.end(), '\n', ' ');
      f << to_string(sc.kind) << ',' << sc.p << ',' << sc.n << ',' << r.rep << ',' << r.seed << ','
        << (r.ok ? "ok" : "failed") << ',' << format_double(r.f1) << ',' << format_double(r.ce) << ','
        << format_double(r.kl) << ',' << format_double(r.seconds) << ',' << msg << '\n';
    }
  }
  {
    auto f = open_out(dir / "report.csv");
    f << "model,p,n,reps,iterations,burn_in,succeeded,failed,f1_mean,f1_sd,ce_mean,ce_sd,kl_mean,kl_sd,"
         "seconds_mean,seconds_sd\n";
    for (const auto& sum : report.summaries) {
      const Scenario& sc = sum.scenario;
      f << to_string(sc.kind) << ',' << sc.p << ',' << sc.n << ',' << sc.reps << ',' << sc.iterations << ','
        << sc.burn_in << ',' << sum.succeeded << ',' << sum.failed;
      for (const MetricStats* m : {&sum.f1, &sum.ce, &sum.kl, &sum.seconds})
        f << ',' << format_double(m->mean) << ',' << format_double(m->sd);
      f << '\n';
      out << to_string(sc.kind) << " p=" << sc.p << " n=" << sc.n << ": F1 " << sum.f1.mean << " (" << sum.f1.sd
          << "), CE " << sum.ce.mean << ", KL " << sum.kl.mean << ", failed " << sum.failed << "/" << sc.reps
          << '\n';
    }
  }
  write_manifest(dir, "bench", s, {s.str("scenarios")});
  const auto failed = std::count_if(report.reps.begin(), report.reps.end(), [](const RepResult& r) { return !r.ok; });
  if (failed == 0) return kExitOk;
  return static_cast<std::size_t>(failed) == report.reps.size() ? kExitNumerical : kExitPartial;
}

int cmd_timecourse(const Settings& s, std::ostream& out) {
  const std::string& data = s.str("data");
  if (data.empty()) throw ConfigError("timecourse needs data");
  const NumericTable table = read_table(data);
  if (table.header.empty()) throw ParseError(data + ": missing time column (header with 'time' first)", 1, 1);
  std::string first = table.header.front();
  std::transform(first.begin(), first.end(), first.begin(), [](unsigned char c) { return std::tolower(c); });
  if (first != "time" && first != "t")
    throw ParseError(data + ": missing time column, first header field is '" + table.header.front() + "'", 1, 1);
  if (table.values.cols() < 3) throw ConfigError("timecourse needs a time column and at least 2 variables");

  const Index p = table.values.cols() - 1;
  TimecourseConfig cfg;
  cfg.times = table.values.col(0);
  cfg.x = table.values.rightCols(p);
  if (cfg.x.rows() < 2) throw ConfigError("timecourse needs at least 2 time points");
  const auto m = static_cast<Index>(s.u64("basis_size"));
  cfg.basis = natural_cubic_basis(cfg.times, m);
  const double var = s.real("beta_prior_var");
  if (!(var > 0.0)) throw ConfigError("beta_prior_var must be positive");
  cfg.beta = BetaState::zeros(p, m, var);
  cfg.chain = chain_config(s, p);
  const fs::path dir = out_dir(s);
  const TimecourseResult res = run_timecourse_chain(cfg);
  write_fit_outputs(dir, res.trace, s);
  {
    auto f = open_out(dir / "beta_trace.csv");
    f << "step,node";
    for (Index c = 0; c < m; ++c) f << ",b" << c;
    f << '\n';
    for (const auto& d : res.beta_trace)
      for (Index i = 0; i < p; ++i) {
        f << d.step << ',' << i;
        for (Index c = 0; c < m; ++c) f << ',' << format_double(d.beta[static_cast<std::size_t>(i)](c));
        f << '\n';
      }
  }
  MatrixXd mean = MatrixXd::Zero(p, m);
  for (const auto& d : res.beta_trace)
    for (Index i = 0; i < p; ++i) mean.row(i) += d.beta[static_cast<std::size_t>(i)].transpose();
  if (!res.beta_trace.empty()) mean /= static_cast<double>(res.beta_trace.size());
  write_matrix_csv_file((dir / "beta_mean.csv").string(), mean);
  write_manifest(dir, "timecourse", s, {data});
  out << "timecourse: p=" << p << " T=" << cfg.x.rows() << " m=" << m << " -> " << dir.string() << '\n';
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Birth-death MCMC structure learning for Gaussian graphical models", "bdg"};
  app.require_subcommand(1);
  app.set_version_flag("--version", version());

  const auto cmds = commands();
  std::map<std::string, std::map<std::string, std::string>> raw;
  std::map<std::string, std::map<std::string, CLI::Option*>> opts;
  std::map<std::string, std::string> config_paths;
  std::map<std::string, CLI::App*> subs;
  for (const auto& c : cmds) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    subs[c.name] = sub;
    sub->add_option("--config", config_paths[c.name], "key=value settings file (flags win)");
    for (const auto& k : c.keys) {
      std::string desc = k.help;
      if (!k.def.empty()) desc += " [" + k.def + "]";
      opts[c.name][k.key] = sub->add_option("--" + dashed(k.key), raw[c.name][k.key], desc);
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitConfig;
  }

  for (const auto& c : cmds) {
    if (!subs[c.name]->parsed()) continue;
    KeyValues flags;
    for (const auto& [key, opt] : opts[c.name])
      if (opt->count() > 0) flags[key] = raw[c.name][key];
    try {
      const Settings s = resolve(c, config_paths[c.name], flags, err);
      if (c.name == "fit") return cmd_fit(s, out);
      if (c.name == "simulate") return cmd_simulate(s, out);
      if (c.name == "bench") return cmd_bench(s, out);
      return cmd_timecourse(s, out);
    } catch (const ConfigError& e) {
      err << "config error: " << e.what() << '\n';
      return kExitConfig;
    } catch (const ParseError& e) {
      err << "parse error: " << e.what() << '\n';
      return kExitParse;
    } catch (const NumericalError& e) {
      err << "numerical failure: " << e.what() << '\n';
      return kExitNumerical;
    } catch (const InvalidArgument& e) {
      err << "config error: " << e.what() << '\n';
      return kExitConfig;
    } catch (const std::exception& e) {
      err << "error: " << e.what() << '\n';
      return kExitUsage;
    }
  }
  return kExitUsage;
}

}  // namespace bdg::cli
