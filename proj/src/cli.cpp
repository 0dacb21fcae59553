#include "recaudit/cli.hpp"

#include <cstdio>
#include <ostream>

#include "CLI11.hpp"
#include "recaudit/checkpoint.hpp"
#include "recaudit/config.hpp"
#include "recaudit/error.hpp"
#include "recaudit/mitigate.hpp"
#include "recaudit/snapshot.hpp"
#include "recaudit/textio.hpp"

namespace recaudit {
namespace {

namespace fs = std::filesystem;

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::MalformedLine:
    case ErrorCode::IoError:
      return kExitParse;
    case ErrorCode::EmptyAfterFilter:
    case ErrorCode::EmptyInput:
      return kExitEmptyData;
    case ErrorCode::DivergedTraining:
    case ErrorCode::SingularSystem:
      return kExitTraining;
    default:
      return kExitUsage;
  }
}

std::string fixed(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

fs::path snapshot_dir(const RunConfig& cfg) { return cfg.out_dir / "snapshot"; }
fs::path audit_dir(const RunConfig& cfg) { return cfg.out_dir / "audit" / to_string(cfg.model.kind); }

// Effective settings without paths, so artifacts do not depend on where they were produced.
std::string describe(const RunConfig& cfg) {
  std::string s = "# config_hash=" + audit_config_hash(cfg) + "\n";
  s += "data_config_hash=" + data_config_hash(cfg) + "\n";
  s += "min_rating=" + std::to_string(cfg.preprocess.min_rating) + "\n";
  s += "min_interactions=" + std::to_string(cfg.preprocess.min_interactions) + "\n";
  s += "age_cutoff=" + std::to_string(cfg.age_cutoff) + "\n";
  s += "split_ratio=" + format_double(cfg.split_ratio) + "\n";
  s += "k=" + std::to_string(cfg.k) + "\n";
  s += "alpha=" + format_double(cfg.alpha) + "\n";
  s += cfg.model.serialize();
  return s;
}

Snapshot load_snapshot_checked(const RunConfig& cfg) {
  auto snap = read_snapshot(snapshot_dir(cfg));
  const auto expected = data_config_hash(cfg);
  if (snap.manifest.config_hash != expected) {
    throw Error(ErrorCode::ConfigMismatch,
                "snapshot was prepared with data config " + snap.manifest.config_hash +
                    " but the current config hashes to " + expected + "; rerun prepare");
  }
  return snap;
}

std::string summary_line(const AuditReport& r) {
  return "model=" + r.model + " users=" + std::to_string(r.per_user.size()) + " ndcg@" +
         std::to_string(r.k) + "=" + fixed(r.ndcg_mean) + " mc@" + std::to_string(r.k) + "=" +
         fixed(r.system.miscalibration_mean) + " st=" + fixed(r.system.stereotype) +
         " bias=" + fixed(r.system.bias_term) + " variance=" + fixed(r.system.variance_term) +
         " st_users=" + fixed(r.stereotyped_share);
}

int command_prepare(const RunConfig& cfg, std::ostream& out) {
  if (cfg.data_dir.empty()) throw Error(ErrorCode::ConfigError, "prepare needs --data");
  const auto interactions = parse_interactions(cfg.data_dir / "ratings.dat");
  const auto catalog = parse_catalog(cfg.data_dir / "movies.dat");
  const auto users = parse_users(cfg.data_dir / "users.dat", cfg.age_cutoff);
  const auto dataset = preprocess(interactions, catalog, users, cfg.preprocess);
  const auto m = write_snapshot(dataset, snapshot_dir(cfg), data_config_hash(cfg));
  out << "prepared users=" << m.users << " items=" << m.items << " interactions=" << m.interactions
      << " categories=" << m.categories << " content_hash=" << m.content_hash << '\n';
  return kExitOk;
}

int command_audit(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto snap = load_snapshot_checked(cfg);
  const auto split = chronological_split(snap.dataset, cfg.split_ratio);
  for (const auto& w : split.warnings) err << "warning: " << w << '\n';

  const auto model = train_model(split, cfg.model);
  AuditOptions opts;
  opts.k = cfg.k;
  opts.alpha = cfg.alpha;
  const auto report = build_report(split, *model, opts, audit_config_hash(cfg), snap.manifest.content_hash);
  check_consistency(report);

  const auto dir = audit_dir(cfg);
  export_report(report, dir, ReportFormat::Tsv);
  export_report(report, dir, ReportFormat::Json);
  save_model(*model, dir / "model.bin");
  write_text(dir / "config.txt", describe(cfg));
  const auto line = summary_line(report);
  write_text(dir / "summary.txt", line + '\n');
  out << line << '\n';
  return kExitOk;
}

int command_mitigate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (cfg.b_grid.empty()) {
    err << "error: mitigate needs a non-empty --b grid\n";
    return kExitUsage;
  }
  for (double b : cfg.b_grid) {
    if (!(b >= kMinBaseRate && b <= kMaxBaseRate)) {
      throw Error(ErrorCode::RateOutOfRange, "base rate " + format_double(b) + " outside [0.01, 0.4]");
    }
  }
  const auto snap = load_snapshot_checked(cfg);
  const auto split = chronological_split(snap.dataset, cfg.split_ratio);
  AuditOptions opts;
  opts.k = cfg.k;
  opts.alpha = cfg.alpha;
  const auto model = train_model(split, cfg.model);
  const auto baseline = audit_population(split, *model, opts);

  const std::string hash = audit_config_hash(cfg);
  std::string tsv = "# config_hash=" + hash + "\n# manifest_hash=" + snap.manifest.content_hash +
                    "\n# resample_seed=" + std::to_string(cfg.resample_seed) + "\n" +
                    "model\tb\tbins\tst_users_before\tst_users_after\tndcg_before\tndcg_after\t"
                    "delta_ndcg\tst_before\tst_after\tdelta_st\tmc_before\tmc_after\tdelta_mc\t"
                    "train_rows_before\ttrain_rows_after\n";
  for (double b : cfg.b_grid) {
    const auto r = mitigate_from_baseline(split, cfg.model, baseline, b, cfg.resample_seed, opts);
    tsv += r.model + '\t' + format_double(r.base_rate) + '\t' + std::to_string(r.bins) + '\t' +
           format_double(r.stereotyped_share_before) + '\t' + format_double(r.stereotyped_share_after) +
           '\t' + format_double(r.ndcg_before) + '\t' + format_double(r.ndcg_after) + '\t' +
           format_double(r.delta_ndcg()) + '\t' + format_double(r.stereotype_before) + '\t' +
           format_double(r.stereotype_after) + '\t' + format_double(r.delta_stereotype()) + '\t' +
           format_double(r.miscalibration_before) + '\t' + format_double(r.miscalibration_after) +
           '\t' + format_double(r.delta_miscalibration()) + '\t' +
           std::to_string(r.train_rows_before) + '\t' + std::to_string(r.train_rows_after) + '\n';
    out << "b=" << format_double(b) << " ndcg " << fixed(r.ndcg_before) << " -> " << fixed(r.ndcg_after)
        << " st " << fixed(r.stereotype_before) << " -> " << fixed(r.stereotype_after) << " mc "
        << fixed(r.miscalibration_before) << " -> " << fixed(r.miscalibration_after) << " st_users "
        << fixed(r.stereotyped_share_before) << " -> " << fixed(r.stereotyped_share_after) << '\n';
  }
  const auto dir = cfg.out_dir / "mitigate" / to_string(cfg.model.kind);
  write_text(dir / "comparison.tsv", tsv);
  write_text(dir / "config.txt", describe(cfg));
  return kExitOk;
}

int command_report(const RunConfig& cfg, std::ostream& out) {
  const auto dir = audit_dir(cfg);
  const auto report = import_report(dir, cfg.format);
  const auto expected = audit_config_hash(cfg);
  if (report.config_hash != expected) {
    throw Error(ErrorCode::ConfigMismatch, "report in " + dir.filename().string() +
                                               " was produced with config " + report.config_hash +
                                               ", current config is " + expected);
  }
  const auto manifest = read_manifest(snapshot_dir(cfg));
  if (report.manifest_hash != manifest.content_hash) {
    throw Error(ErrorCode::ConfigMismatch, "report does not belong to the current snapshot");
  }
  check_consistency(report);
  out << summary_line(report) << '\n';
  for (const auto& g : report.groups) {
    for (const auto& m : g.measures) {
      if (m.measure != "miscalibration") continue;
      out << to_string(g.attribute) << ' ' << m.measure << ' ' << g.minority << '='
          << fixed(m.minority.mean) << ' ' << g.majority << '=' << fixed(m.majority.mean)
          << " t=" << fixed(m.welch.t, 3) << " p=" << format_double(m.welch.p_value) << '\n';
    }
  }
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Calibration and stereotype audits for top-k recommenders", "recaudit"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path, data, out_dir, model, b, format;
  std::size_t k = 0;
  std::uint64_t seed = 0;
  app.add_option("--config", config_path, "key=value config file");
  auto* o_data = app.add_option("--data", data, "directory with ratings.dat, movies.dat, users.dat");
  auto* o_out = app.add_option("--out", out_dir, "output directory");
  auto* o_model = app.add_option("--model", model, "userknn, itemknn, bpr, wrmf or identity-oracle");
  auto* o_k = app.add_option("--k", k, "recommendation list length");
  auto* o_seed = app.add_option("--seed", seed, "model seed");
  auto* o_b = app.add_option("--b", b, "comma-separated base oversampling rates");
  auto* o_format = app.add_option("--format", format, "report format read by `report`: tsv or json");

  auto* prepare = app.add_subcommand("prepare", "preprocess raw data into a snapshot");
  auto* audit = app.add_subcommand("audit", "train, recommend and export the audit report");
  auto* mitigate = app.add_subcommand("mitigate", "oversample stereotyped users over a grid of base rates");
  auto* report = app.add_subcommand("report", "re-read and verify an exported audit report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    RunConfig cfg;
    if (!config_path.empty()) apply_config(cfg, parse_config_text(read_text(config_path)));
    std::map<std::string, std::string> flags;
    if (o_data->count()) flags["data"] = data;
    if (o_out->count()) flags["out"] = out_dir;
    if (o_model->count()) flags["model"] = model;
    if (o_k->count()) flags["k"] = std::to_string(k);
    if (o_seed->count()) flags["seed"] = std::to_string(seed);
    if (o_b->count()) flags["b"] = b;
    if (o_format->count()) flags["format"] = format;
    apply_config(cfg, flags);
    cfg.validate();

    if (prepare->parsed()) return command_prepare(cfg, out);
    if (audit->parsed()) return command_audit(cfg, out, err);
    if (mitigate->parsed()) return command_mitigate(cfg, out, err);
    if (report->parsed()) return command_report(cfg, out);
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}

}  // namespace recaudit
