// Benchmark harness CLI: seeded experiment runs, rate comparison across T,
// and the coupled lower-bound experiment.
//
// Exit codes: 0 success, 1 invariant violation, 2 config error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pfopt/adversary.hpp"
#include "pfopt/bench/config.hpp"
#include "pfopt/bench/rates.hpp"
#include "pfopt/bench/runner.hpp"

namespace {

int cmd_run(const std::string& config_path) {
  const pfopt::bench::ExperimentConfig cfg = pfopt::bench::parse_config_file(config_path);
  const pfopt::bench::SummaryRecord rec = pfopt::bench::run_experiment(cfg);
  std::cout << pfopt::bench::aggregate_csv(rec);
  double wall = 0.0;
  for (const auto& row : rec.rows) wall += row.wall_seconds;
  std::cout << "# total seed wall time: " << wall << " s over " << rec.rows.size() << " seeds\n";
  return 0;
}

int cmd_rates(const std::vector<std::string>& files) {
  std::vector<pfopt::bench::RatePoint> points;
  points.reserve(files.size());
  for (const std::string& f : files) points.push_back(pfopt::bench::read_aggregate_csv(f));
  const pfopt::bench::RateReport report = pfopt::bench::compare_rates(std::move(points));
  std::cout << pfopt::bench::format_rate_report(report);
  return 0;
}

struct LowerboundArgs {
  std::uint64_t T = 16;
  double alpha = 1.0;
  double dmax = 1.0;
  double sigmamax = 1.0;
  std::uint64_t seeds = 1000;
  std::string out;
};

int cmd_lowerbound(const LowerboundArgs& args) {
  using pfopt::coupled_run;
  const double sqrt_T = std::sqrt(static_cast<double>(args.T));
  const auto [inst1, inst2] =
      pfopt::build_instances(args.T, args.alpha, args.dmax, args.sigmamax);

  struct Subject {
    std::string name;
    pfopt::AlgorithmFactory factory;
  };
  const double eta1 = inst1.D1 / ((inst1.G_star + inst1.sigma1) * sqrt_T);
  const double eta2 = inst2.D2 / ((inst2.G_star + inst2.sigma2) * sqrt_T);
  const std::vector<Subject> subjects = {
      {"sgd_eta_wide", pfopt::make_fixed_sgd_subject(0.0, eta1)},
      {"sgd_eta_narrow", pfopt::make_fixed_sgd_subject(0.0, eta2)},
      {"alg3", pfopt::make_diameter_tuned_subject(0.0, args.dmax, args.dmax, inst1.G_star,
                                                  args.sigmamax, args.T, 0.1)},
  };

  std::ofstream csv;
  if (!args.out.empty()) {
    csv.open(args.out, std::ios::binary);
    if (!csv) {
      std::cerr << "cannot write " << args.out << "\n";
      return 2;
    }
    csv << "subject,seed,rare_event_fired,output_w,gap1,gap2,bound1,bound2,violated_both\n";
  }

  bool invariant_broken = false;
  for (const Subject& subject : subjects) {
    std::uint64_t rare_free = 0, violations = 0;
    for (std::uint64_t seed = 1; seed <= args.seeds; ++seed) {
      const pfopt::IndistinguishabilityReport rep = coupled_run(
          subject.factory, args.T, args.alpha, args.dmax, args.sigmamax, pfopt::RngStream(seed));
      if (!rep.rare_event_fired) {
        ++rare_free;
        if (rep.violated_both) ++violations;
      }
      if (csv.is_open())
        csv << subject.name << ',' << seed << ',' << (rep.rare_event_fired ? 1 : 0) << ','
            << pfopt::bench::format_double(rep.output_w) << ','
            << pfopt::bench::format_double(rep.gap1) << ','
            << pfopt::bench::format_double(rep.gap2) << ','
            << pfopt::bench::format_double(rep.bound1) << ','
            << pfopt::bench::format_double(rep.bound2) << ',' << (rep.violated_both ? 1 : 0)
            << '\n';
    }
    const double frac = static_cast<double>(rare_free) / static_cast<double>(args.seeds);
    std::cout << subject.name << ": rare_event_free " << rare_free << "/" << args.seeds << " ("
              << frac << "), violated_both on rare-free runs: " << violations << "\n";
    if (violations > 0) invariant_broken = true;
  }
  if (invariant_broken) {
    std::cerr << "lowerbound invariant violated: some run beat both theorem bounds\n";
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"parameter-free stochastic optimization benchmark harness"};
  app.require_subcommand(1);

  std::string config_path;
  CLI::App* run = app.add_subcommand("run", "run a seeded experiment from a config file");
  run->add_option("config", config_path, "flat key-value config file")->required();

  std::vector<std::string> rate_files;
  CLI::App* rates = app.add_subcommand("rates", "fit log-log rate across aggregate summaries");
  rates->add_option("files", rate_files, "aggregate CSV files (>= 2)")->required();

  LowerboundArgs lb;
  CLI::App* lower = app.add_subcommand("lowerbound", "coupled two-instance lower-bound experiment");
  lower->add_option("--T", lb.T, "queries per run (>= 4)");
  lower->add_option("--alpha", lb.alpha, "range looseness in [1, 0.75*sqrt(T)]");
  lower->add_option("--dmax", lb.dmax, "diameter range upper bound");
  lower->add_option("--sigmamax", lb.sigmamax, "noise range upper bound");
  lower->add_option("--seeds", lb.seeds, "number of seeded runs per subject");
  lower->add_option("--out", lb.out, "per-run CSV output path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(config_path);
    if (rates->parsed()) return cmd_rates(rate_files);
    if (lower->parsed()) return cmd_lowerbound(lb);
  } catch (const pfopt::bench::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::logic_error& e) {
    std::cerr << "invariant violation: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
