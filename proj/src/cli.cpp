#include "ldp/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ldp/analytics.hpp"
#include "ldp/privacy.hpp"

namespace ldp::cli {
namespace {

using nlohmann::json;

std::string fmt(double value, const char* spec) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), spec, value);
  return buffer;
}

std::string fmt_metric(double value, Precision precision) {
  return fmt(value, precision == Precision::kFull ? "%.17g" : "%.10g");
}

std::string csv_field(const std::string& text) {
  if (text.find_first_of(",\"\n") == std::string::npos) {
    return text;
  }
  std::string quoted = "\"";
  for (const char c : text) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  quoted += '"';
  return quoted;
}

void write_csv_row(std::ostream& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i != 0) out << ',';
    out << csv_field(fields[i]);
  }
  out << '\n';
}

// Per-user variance of the concrete mechanism an experiment runs: the
// spec's own constants for pure protocols, the Laplace sum for SHE.
double spec_var_per_user(const ExperimentConfig& config) {
  const ProtocolSpec spec(config.protocol, PrivacyBudget(config.epsilon),
                          Domain(config.d), {config.theta, config.g});
  if (spec.kind() == ProtocolKind::kSHE) {
    return 8.0 / (config.epsilon * config.epsilon);
  }
  return var_star(spec.pure_params());
}

}  // namespace

int cmd_table(const TableOptions& options, std::ostream& out) {
  const char* var_spec =
      options.precision == Precision::kFull ? "%.17g" : "%.2f";
  struct Row {
    ProtocolKind kind;
    std::optional<std::uint64_t> d;
  };
  std::vector<Row> rows;
  for (const std::uint64_t d : options.ds) {
    rows.push_back({ProtocolKind::kDE, d});
  }
  for (const ProtocolKind kind :
       {ProtocolKind::kSHE, ProtocolKind::kTHE, ProtocolKind::kSUE,
        ProtocolKind::kOUE, ProtocolKind::kBLH, ProtocolKind::kOLH}) {
    rows.push_back({kind, std::nullopt});
  }

  json array = json::array();
  if (options.format == Format::kCsv) {
    write_csv_row(out, {"protocol", "epsilon", "d", "var_per_user"});
  }
  for (const Row& row : rows) {
    for (const double epsilon : options.epsilons) {
      const double value =
          analytic_var(row.kind, epsilon, row.d.value_or(2), 1.0);
      if (options.format == Format::kCsv) {
        write_csv_row(out, {std::string(to_string(row.kind)),
                            fmt(epsilon, "%.10g"),
                            row.d ? std::to_string(*row.d) : std::string(),
                            fmt(value, var_spec)});
      } else {
        json obj;
        obj["protocol"] = std::string(to_string(row.kind));
        obj["epsilon"] = epsilon;
        obj["d"] = row.d ? json(*row.d) : json(nullptr);
        obj["var_per_user"] = value;
        array.push_back(obj);
      }
    }
  }
  if (options.format == Format::kJson) {
    out << array.dump() << '\n';
  }
  return kExitOk;
}

int cmd_bench(const BenchOptions& options, std::ostream& out,
              std::ostream& diag) {
  const ExperimentConfig& config = options.config;
  const std::vector<TrialResult> results = run_experiment(config);
  const std::uint64_t n_actual = results[0].estimates.n;

  std::optional<double> threshold;
  if (config.threshold_value) {
    threshold = *config.threshold_value;
  } else if (config.threshold_alpha) {
    threshold = significance_threshold(
        {*config.threshold_alpha, config.d, n_actual,
         spec_var_per_user(config) * static_cast<double>(n_actual)});
  }

  const std::string protocol{to_string(config.protocol)};
  const std::string dist = config.dist.to_string();
  const std::string eps = fmt(config.epsilon, "%.10g");
  const auto metric = [&](double v) { return fmt_metric(v, options.precision); };

  double mean = 0.0;
  double mean_topk = 0.0;
  double mean_tp = 0.0;
  double mean_fp = 0.0;
  std::vector<double> topk_values(results.size(), 0.0);
  std::vector<std::uint64_t> tp_values(results.size(), 0);
  std::vector<std::uint64_t> fp_values(results.size(), 0);
  for (std::size_t r = 0; r < results.size(); ++r) {
    mean += results[r].avg_sq_error;
    if (config.top_k) {
      topk_values[r] = topk_error(results[r], *config.top_k);
      mean_topk += topk_values[r];
    }
    if (threshold) {
      const auto [tp, fp] = tp_fp(results[r], *threshold);
      tp_values[r] = tp;
      fp_values[r] = fp;
      mean_tp += static_cast<double>(tp);
      mean_fp += static_cast<double>(fp);
    }
  }
  const auto reps = static_cast<double>(results.size());
  mean /= reps;
  mean_topk /= reps;
  mean_tp /= reps;
  mean_fp /= reps;
  double variance = 0.0;
  for (const TrialResult& result : results) {
    const double diff = result.avg_sq_error - mean;
    variance += diff * diff;
  }
  const double stddev =
      results.size() > 1 ? std::sqrt(variance / (reps - 1.0)) : 0.0;

  json array = json::array();
  if (options.format == Format::kCsv) {
    write_csv_row(out, {"protocol", "epsilon", "d", "n", "dist", "seed", "rep",
                        "avg_sq_error", "topk_error", "tp", "fp", "threshold",
                        "stddev"});
  }
  const auto emit = [&](const std::string& rep, double avg,
                        std::optional<double> topk, std::optional<double> tp,
                        std::optional<double> fp, std::optional<double> sd) {
    if (options.format == Format::kCsv) {
      write_csv_row(
          out,
          {protocol, eps, std::to_string(config.d), std::to_string(n_actual),
           dist, std::to_string(config.master_seed), rep, metric(avg),
           topk ? metric(*topk) : std::string(),
           tp ? metric(*tp) : std::string(), fp ? metric(*fp) : std::string(),
           threshold ? metric(*threshold) : std::string(),
           sd ? metric(*sd) : std::string()});
    } else {
      json obj;
      obj["protocol"] = protocol;
      obj["epsilon"] = config.epsilon;
      obj["d"] = config.d;
      obj["n"] = n_actual;
      obj["dist"] = dist;
      obj["seed"] = config.master_seed;
      obj["rep"] = rep;
      obj["avg_sq_error"] = avg;
      obj["topk_error"] = topk ? json(*topk) : json(nullptr);
      obj["tp"] = tp ? json(*tp) : json(nullptr);
      obj["fp"] = fp ? json(*fp) : json(nullptr);
      obj["threshold"] = threshold ? json(*threshold) : json(nullptr);
      obj["stddev"] = sd ? json(*sd) : json(nullptr);
      array.push_back(obj);
    }
  };

  for (std::size_t r = 0; r < results.size(); ++r) {
    emit(std::to_string(r), results[r].avg_sq_error,
         config.top_k ? std::optional<double>(topk_values[r]) : std::nullopt,
         threshold ? std::optional<double>(static_cast<double>(tp_values[r]))
                   : std::nullopt,
         threshold ? std::optional<double>(static_cast<double>(fp_values[r]))
                   : std::nullopt,
         std::nullopt);
    diag << "rep " << r << ": " << results[r].seconds << " s\n";
  }
  emit("summary", mean,
       config.top_k ? std::optional<double>(mean_topk) : std::nullopt,
       threshold ? std::optional<double>(mean_tp) : std::nullopt,
       threshold ? std::optional<double>(mean_fp) : std::nullopt, stddev);
  if (options.format == Format::kJson) {
    out << array.dump() << '\n';
  }
  return kExitOk;
}

int cmd_privacy_check(const PrivacyCheckOptions& options, std::ostream& out,
                      std::ostream& diag) {
  switch (options.protocol) {
    case ProtocolKind::kSHE:
    case ProtocolKind::kTHE:
      diag << "histogram protocols emit continuous noise and cannot be "
              "enumerated; check a categorical protocol (de, sue, oue, blh, "
              "olh) instead\n";
      return kExitUsage;
    case ProtocolKind::kDE:
      if (options.d > 12) {
        diag << "exhaustive direct-encoding check supports d <= 12; rerun "
                "with a smaller --d\n";
        return kExitUsage;
      }
      break;
    case ProtocolKind::kSUE:
    case ProtocolKind::kOUE:
      if (options.d > 4) {
        diag << "exhaustive unary-encoding check enumerates 2^d outputs and "
                "supports d <= 4; rerun with a smaller --d\n";
        return kExitUsage;
      }
      break;
    case ProtocolKind::kBLH:
    case ProtocolKind::kOLH:
      break;  // checked conditionally on the seed, any d works
  }
  const ProtocolSpec spec(options.protocol, PrivacyBudget(options.epsilon),
                          Domain(options.d));
  const PrivacyCheck check = privacy_check(spec);
  const char* verdict = check.pass ? "PASS" : "FAIL";
  if (options.format == Format::kCsv) {
    write_csv_row(out,
                  {"protocol", "epsilon", "d", "max_ratio", "bound", "verdict"});
    write_csv_row(out, {std::string(to_string(options.protocol)),
                        fmt(options.epsilon, "%.10g"),
                        std::to_string(options.d), fmt(check.max_ratio, "%.12g"),
                        fmt(check.bound, "%.12g"), verdict});
  } else {
    json obj;
    obj["protocol"] = std::string(to_string(options.protocol));
    obj["epsilon"] = options.epsilon;
    obj["d"] = options.d;
    obj["max_ratio"] = check.max_ratio;
    obj["bound"] = check.bound;
    obj["verdict"] = verdict;
    out << obj.dump() << '\n';
  }
  return check.pass ? kExitOk : kExitCheckFailed;
}

int cmd_threshold(const ThresholdOptions& options, std::ostream& out) {
  const double var_per_user = analytic_var(
      options.protocol, options.epsilon, std::max<std::uint64_t>(options.d, 2),
      options.theta.value_or(1.0));
  const double total = var_per_user * static_cast<double>(options.n);
  const double threshold =
      significance_threshold({options.alpha, options.d, options.n, total});
  const double coeff =
      threshold / std::sqrt(static_cast<double>(options.n));
  std::optional<double> split;
  if (options.with_split_ratio) {
    split = split_ratio(options.epsilon);
  }
  if (options.format == Format::kCsv) {
    std::vector<std::string> header = {"protocol", "epsilon",   "d",
                                       "n",        "alpha",     "threshold",
                                       "coeff_per_sqrt_n"};
    std::vector<std::string> row = {std::string(to_string(options.protocol)),
                                    fmt(options.epsilon, "%.10g"),
                                    std::to_string(options.d),
                                    std::to_string(options.n),
                                    fmt(options.alpha, "%.10g"),
                                    fmt(threshold, "%.10g"),
                                    fmt(coeff, "%.10g")};
    if (split) {
      header.push_back("split_ratio");
      row.push_back(fmt(*split, "%.10g"));
    }
    write_csv_row(out, header);
    write_csv_row(out, row);
  } else {
    json obj;
    obj["protocol"] = std::string(to_string(options.protocol));
    obj["epsilon"] = options.epsilon;
    obj["d"] = options.d;
    obj["n"] = options.n;
    obj["alpha"] = options.alpha;
    obj["threshold"] = threshold;
    obj["coeff_per_sqrt_n"] = coeff;
    if (split) {
      obj["split_ratio"] = *split;
    }
    out << obj.dump() << '\n';
  }
  return kExitOk;
}

namespace {

struct ParsedArgs {
  std::string protocol;
  std::string dist = "zipf:1.1";
  std::string format = "csv";
  std::string precision = "default";
};

Format parse_format(const std::string& text) {
  if (text == "csv") return Format::kCsv;
  if (text == "json") return Format::kJson;
  throw std::invalid_argument("unknown format: " + text +
                              " (expected csv or json)");
}

Precision parse_precision(const std::string& text) {
  if (text == "default") return Precision::kDefault;
  if (text == "full") return Precision::kFull;
  throw std::invalid_argument("unknown precision: " + text +
                              " (expected default or full)");
}

ProtocolKind parse_protocol(const std::string& text) {
  const auto kind = protocol_from_string(text);
  if (!kind) {
    throw std::invalid_argument(
        "unknown protocol: " + text +
        " (expected de, she, the, sue, oue, blh, or olh)");
  }
  return *kind;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"frequency estimation under local differential privacy"};
  app.require_subcommand(1);

  TableOptions table;
  ParsedArgs table_args;
  auto* table_cmd = app.add_subcommand(
      "table", "per-user analytic variance for every protocol");
  table_cmd->add_option("--epsilon", table.epsilons, "privacy budget grid")
      ->delimiter(',');
  table_cmd->add_option("--d", table.ds, "domain sizes (direct encoding only)")
      ->delimiter(',');
  table_cmd->add_option("--format", table_args.format, "csv or json");
  table_cmd->add_option("--precision", table_args.precision,
                        "default (2 decimals) or full");

  BenchOptions bench;
  ParsedArgs bench_args;
  auto* bench_cmd = app.add_subcommand(
      "bench", "run repeated estimation trials and report their error");
  bench_cmd->add_option("--protocol", bench_args.protocol,
                        "de, she, the, sue, oue, blh, olh")
      ->required();
  bench_cmd->add_option("--epsilon", bench.config.epsilon, "privacy budget");
  bench_cmd->add_option("--d", bench.config.d, "domain size");
  bench_cmd->add_option("--n", bench.config.n, "number of users");
  bench_cmd->add_option("--dist", bench_args.dist,
                        "zipf:<s>, uniform, or file:<path>");
  bench_cmd->add_option("--reps", bench.config.repetitions, "repetitions");
  bench_cmd->add_option("--seed", bench.config.master_seed, "master seed");
  bench_cmd->add_option("--theta", bench.config.theta,
                        "support threshold override (the)");
  bench_cmd->add_option("--g", bench.config.g, "hash range override (olh)");
  bench_cmd->add_option("--top-k", bench.config.top_k,
                        "also score the k largest true counts");
  bench_cmd->add_option("--threshold-alpha", bench.config.threshold_alpha,
                        "derive a significance cutoff from this level");
  bench_cmd->add_option("--threshold-value", bench.config.threshold_value,
                        "explicit significance cutoff");
  bench_cmd->add_option("--threads", bench.config.threads,
                        "worker threads (0 = all cores)");
  bench_cmd->add_option("--format", bench_args.format, "csv or json");
  bench_cmd->add_option("--precision", bench_args.precision,
                        "default or full");

  PrivacyCheckOptions privacy;
  ParsedArgs privacy_args;
  auto* privacy_cmd = app.add_subcommand(
      "privacy-check", "exhaustive likelihood-ratio check of a protocol");
  privacy_cmd
      ->add_option("--protocol", privacy_args.protocol,
                   "de, sue, oue, blh, or olh")
      ->required();
  privacy_cmd->add_option("--epsilon", privacy.epsilon, "privacy budget");
  privacy_cmd->add_option("--d", privacy.d, "domain size");
  privacy_cmd->add_option("--format", privacy_args.format, "csv or json");

  ThresholdOptions threshold;
  ParsedArgs threshold_args;
  threshold_args.protocol = "olh";
  auto* threshold_cmd = app.add_subcommand(
      "threshold", "significance threshold for reliable estimates");
  threshold_cmd->add_option("--protocol", threshold_args.protocol,
                            "protocol whose variance sets the scale");
  threshold_cmd->add_option("--epsilon", threshold.epsilon, "privacy budget");
  threshold_cmd->add_option("--d", threshold.d, "domain size");
  threshold_cmd->add_option("--n", threshold.n, "number of users");
  threshold_cmd->add_option("--threshold-alpha", threshold.alpha,
                            "significance level");
  threshold_cmd->add_option("--theta", threshold.theta,
                            "support threshold (the)");
  threshold_cmd->add_flag("--split-ratio", threshold.with_split_ratio,
                          "also print the budget-vs-population split ratio");
  threshold_cmd->add_option("--format", threshold_args.format, "csv or json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    if (table_cmd->parsed()) {
      table.format = parse_format(table_args.format);
      table.precision = parse_precision(table_args.precision);
      return cmd_table(table, out);
    }
    if (bench_cmd->parsed()) {
      bench.config.protocol = parse_protocol(bench_args.protocol);
      const auto dist = Distribution::parse(bench_args.dist);
      if (!dist) {
        throw std::invalid_argument(
            "unknown distribution: " + bench_args.dist +
            " (expected zipf:<s>, uniform, or file:<path>)");
      }
      bench.config.dist = *dist;
      bench.format = parse_format(bench_args.format);
      bench.precision = parse_precision(bench_args.precision);
      return cmd_bench(bench, out, err);
    }
    if (privacy_cmd->parsed()) {
      privacy.protocol = parse_protocol(privacy_args.protocol);
      privacy.format = parse_format(privacy_args.format);
      return cmd_privacy_check(privacy, out, err);
    }
    threshold.protocol = parse_protocol(threshold_args.protocol);
    threshold.format = parse_format(threshold_args.format);
    return cmd_threshold(threshold, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}

}  // namespace ldp::cli
