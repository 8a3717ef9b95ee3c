// Copyright 2026 The nonstoq Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line driver. Exit codes: 0 success, 2 bad arguments or model
// file, 3 numerical failure, 4 I/O failure.

#ifndef NONSTOQ_CLI_HPP
#define NONSTOQ_CLI_HPP

#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "nonstoq/adaptive.hpp"
#include "nonstoq/crossing.hpp"
#include "nonstoq/csv.hpp"
#include "nonstoq/errors.hpp"
#include "nonstoq/exact.hpp"
#include "nonstoq/model.hpp"
#include "nonstoq/model_io.hpp"
#include "nonstoq/parallel.hpp"
#include "nonstoq/pimc.hpp"

namespace nonstoq {

enum class Workflow { adaptive, sweep, cross, exact, signcheck };

struct RunConfig {
  std::string model_path;
  Workflow workflow = Workflow::exact;
  MCParams mc;
  AdaptiveParams adaptive;
  Grid grid{0.0, 4.0, 0.05};
  std::string gamma_field_list;
  std::string xx_list;
  std::string out_path;
  int workers = 1;
};

namespace cli_detail {

/// "a,b,c" or "min:max:step".
inline std::vector<double> parse_values(const std::string& text) {
  if (text.find(':') != std::string::npos) return Grid::parse(text).points();
  std::vector<double> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    item = detail::trim(item);
    if (item.empty()) throw ParseError("empty value in list '" + text + "'");
    out.push_back(detail::parse_double(item, 0));
  }
  if (out.empty()) throw ParseError("empty value list");
  return out;
}

struct Target {
  std::optional<double> gamma_field;
  std::optional<double> xx;
  FluctuationSpec f;
};

/// (Gamma, gamma) grid, Gamma outer. Falls back to the model file's fluctuation.
inline std::vector<Target> targets(const RunConfig& cfg, const NonStoqModel& model) {
  std::optional<double> file_gamma, file_xx;
  if (const auto* l = std::get_if<Linear>(&model.fluctuation.variant())) {
    file_gamma = l->gamma_field;
    file_xx = 0.0;
  } else if (const auto* lq = std::get_if<LinearQuadratic>(&model.fluctuation.variant())) {
    file_gamma = lq->gamma_field;
    file_xx = lq->xx;
  }
  if (cfg.gamma_field_list.empty() && cfg.xx_list.empty())
    return {Target{file_gamma, file_xx, model.fluctuation}};
  const auto gs = cfg.gamma_field_list.empty() ? std::vector<double>{file_gamma.value_or(0.0)}
                                               : parse_values(cfg.gamma_field_list);
  const auto xs = cfg.xx_list.empty() ? std::vector<double>{file_xx.value_or(0.0)} : parse_values(cfg.xx_list);
  std::vector<Target> out;
  for (double g : gs)
    for (double x : xs) out.push_back({g, x, FluctuationSpec::linear_quadratic(g, x)});
  return out;
}

inline std::string fmt(double v, int prec = 6) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*g", prec, v);
  return buf;
}

inline std::string summary(const CsvRow& r) {
  std::string s = r.workflow + " N=" + std::to_string(r.n_spins) + " beta=" + fmt(r.beta);
  if (r.gamma_field) s += " Gamma=" + fmt(*r.gamma_field);
  if (r.xx) s += " gamma=" + fmt(*r.xx);
  if (r.gamma_tilde) s += " field=" + fmt(*r.gamma_tilde);
  s += " m_x=" + fmt(r.m_x) + "+-" + fmt(r.m_x_err, 2);
  s += " |m_z|=" + fmt(r.m_z_abs) + "+-" + fmt(r.m_z_abs_err, 2);
  s += " E/N=" + fmt(r.energy_per_spin) + "+-" + fmt(r.energy_err, 2);
  if (!r.converged) s += " (not converged)";
  return s;
}

inline std::string sibling_path(const std::string& out, const std::string& tag) {
  std::filesystem::path p(out);
  const auto ext = p.has_extension() ? p.extension().string() : std::string(".csv");
  p.replace_extension();
  return p.string() + "." + tag + ext;
}

}  // namespace cli_detail

struct CliOutput {
  /// File name -> CSV text, in emission order.
  std::vector<std::pair<std::string, std::string>> files;
  std::vector<std::string> summaries;
  std::vector<std::string> failures;
};

/// Runs one workflow and returns the files it would write.
inline CliOutput execute(const RunConfig& cfg) {
  using namespace cli_detail;
  const NonStoqModel model = load_model(cfg.model_path);
  CliOutput out;
  const std::string main_path = cfg.out_path.empty() ? std::string("-") : cfg.out_path;

  auto emit = [&](const std::string& path, const std::vector<CsvRow>& rows, bool summarize) {
    if (summarize)
      for (const auto& r : rows) out.summaries.push_back(summary(r));
    out.files.emplace_back(path, to_csv(rows));
  };

  switch (cfg.workflow) {
    case Workflow::exact: {
      const auto ts = targets(cfg, model);
      auto rows = parallel_map(ts.size(), cfg.workers, [&](std::size_t k) {
        const NonStoqModel m{model.classical, ts[k].f};
        return csv_row(exact_thermal(m, cfg.mc.beta), model.n_spins(), cfg.mc.beta, ts[k].gamma_field, ts[k].xx);
      });
      emit(main_path, rows, true);
      break;
    }
    case Workflow::adaptive: {
      const auto ts = targets(cfg, model);
      auto rows = parallel_map(ts.size(), cfg.workers, [&](std::size_t k) {
        AdaptiveParams p = cfg.adaptive;
        p.inner = cfg.mc;
        p.inner.seed = derive_seed(cfg.mc.seed, k);
        const NonStoqModel m{model.classical, ts[k].f};
        const auto res = adaptive_solve(m, p);
        auto row = csv_row("adaptive", res.final_record, ts[k].gamma_field, ts[k].xx, res.converged);
        row.gamma_tilde = res.fixed_point_field;
        return row;
      });
      emit(main_path, rows, true);
      break;
    }
    case Workflow::sweep: {
      const auto table = sweep_standard(model.classical, cfg.grid, cfg.mc, cfg.workers);
      std::vector<CsvRow> rows;
      for (const auto& r : table.rows) rows.push_back(csv_row("sweep", r.record, r.field, 0.0));
      emit(main_path, rows, true);
      break;
    }
    case Workflow::cross: {
      const auto table = sweep_standard(model.classical, cfg.grid, cfg.mc, cfg.workers);
      std::vector<CsvRow> sweep_rows, crossing_rows, remapped;
      for (const auto& r : table.rows) sweep_rows.push_back(csv_row("sweep", r.record, r.field, 0.0));
      for (const auto& t : targets(cfg, model)) {
        try {
          const auto res = find_crossings(table, t.f);
          for (std::size_t c = 0; c < res.crossings.size(); ++c) {
            auto row = csv_row("crossing", res.crossings[c].record, t.gamma_field, t.xx, res.selected == c);
            row.m_x = res.crossings[c].m_x;
            crossing_rows.push_back(row);
          }
          remapped.push_back(csv_row("cross", remap(res, t.f), t.gamma_field, t.xx));
        } catch (const NumericalError& e) {
          out.failures.push_back("target " + t.f.describe() + ": " + e.what());
        }
      }
      if (main_path == "-") {
        emit("-", remapped, true);
      } else {
        emit(sibling_path(main_path, "sweep"), sweep_rows, false);
        emit(sibling_path(main_path, "crossings"), crossing_rows, false);
        emit(main_path, remapped, true);
      }
      break;
    }
    case Workflow::signcheck: {
      std::string csv = "workflow,N,beta,tau,Gamma,gamma,stoquastic,max_off_diagonal,min_transfer_entry,average_sign\n";
      for (const auto& t : targets(cfg, model)) {
        const NonStoqModel m{model.classical, t.f};
        const auto st = is_stoquastic(m);
        std::optional<SignReport> sign;
        if (m.n_spins() <= kSignReportMaxSpins) sign = naive_sign_report(m, cfg.mc.tau, cfg.mc.beta);
        auto opt = [](const std::optional<double>& v) { return v ? detail::format_double(*v) : std::string(); };
        csv += "signcheck," + std::to_string(m.n_spins()) + "," + detail::format_double(cfg.mc.beta) + "," +
               std::to_string(cfg.mc.tau) + "," + opt(t.gamma_field) + "," + opt(t.xx) + "," +
               (st.stoquastic ? "1" : "0") + "," + detail::format_double(st.max_off_diagonal) + "," +
               (sign ? detail::format_double(sign->min_transfer_entry) + "," +
                           detail::format_double(sign->average_sign)
                     : std::string(",")) +
               "\n";
        out.summaries.push_back("signcheck N=" + std::to_string(m.n_spins()) + " " + t.f.describe() +
                                (st.stoquastic ? " stoquastic" : " non-stoquastic") +
                                " max_offdiag=" + fmt(st.max_off_diagonal) +
                                (sign ? " min_T=" + fmt(sign->min_transfer_entry) + " <sign>=" + fmt(sign->average_sign)
                                      : std::string(" (sign report skipped above N=6)")));
      }
      out.files.emplace_back(main_path, csv);
      break;
    }
  }
  return out;
}

inline int run_cli(const std::vector<std::string>& args, std::ostream& out = std::cout,
                   std::ostream& err = std::cerr) {
  RunConfig cfg;
  cfg.mc.beta = 10.0;
  cfg.mc.tau = 64;
  cfg.mc.equilibration_sweeps = 5000;
  cfg.mc.measurement_sweeps = 20000;
  cfg.mc.seed = 1;
  cfg.workers = workers_from_environment(1);
  std::string grid_text = "0:4:0.05";
  std::string workflow_opt;
  bool random_order = false;

  CLI::App app{"Quantum Monte Carlo for H = H0 - N f(m_x) without a sign problem", "nonstoq"};
  app.require_subcommand(0, 1);
  app.add_option("--workflow", workflow_opt, "adaptive | sweep | cross | exact | signcheck (or use a subcommand)");
  app.add_option("--model", cfg.model_path, "model file")->required();
  app.add_option("--beta", cfg.mc.beta, "inverse temperature");
  app.add_option("--tau", cfg.mc.tau, "Trotter number (even)");
  app.add_option("--sweeps-equil", cfg.mc.equilibration_sweeps, "equilibration sweeps");
  app.add_option("--sweeps-meas", cfg.mc.measurement_sweeps, "measurement sweeps");
  app.add_option("--measure-interval", cfg.mc.measure_interval, "sweeps between measurements");
  app.add_flag("--random-order", random_order, "propose spins in random order instead of sequentially");
  app.add_option("--grid", grid_text, "effective field grid min:max:step (sweep, cross)");
  app.add_option("--Gamma", cfg.gamma_field_list, "transverse field values: list a,b,c or min:max:step");
  app.add_option("--gamma", cfg.xx_list, "XX interaction values: list a,b,c or min:max:step");
  app.add_option("--seed", cfg.mc.seed, "master seed");
  app.add_option("--workers", cfg.workers, "worker threads (default: NONSTOQ_WORKERS or 1)");
  app.add_option("--out", cfg.out_path, "output CSV (stdout when omitted)");
  app.add_option("--damping", cfg.adaptive.damping, "adaptive: field update damping in (0, 1]");
  app.add_option("--tolerance", cfg.adaptive.tolerance, "adaptive: convergence threshold on m_x");
  app.add_option("--max-iter", cfg.adaptive.max_outer_iterations, "adaptive: outer iteration limit");
  app.add_option("--initial-field", cfg.adaptive.initial_field, "adaptive: starting effective field");
  const std::pair<const char*, Workflow> names[] = {{"adaptive", Workflow::adaptive},
                                                    {"sweep", Workflow::sweep},
                                                    {"cross", Workflow::cross},
                                                    {"exact", Workflow::exact},
                                                    {"signcheck", Workflow::signcheck}};
  for (const auto& [name, wf] : names) app.add_subcommand(name)->fallthrough();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "nonstoq: " << e.what() << "\n";
    return 2;
  }

  try {
    std::optional<Workflow> chosen;
    for (const auto& [name, wf] : names)
      if (app.got_subcommand(name)) chosen = wf;
    if (!workflow_opt.empty()) {
      std::optional<Workflow> by_flag;
      for (const auto& [name, wf] : names)
        if (workflow_opt == name) by_flag = wf;
      if (!by_flag) throw ParseError("unknown workflow '" + workflow_opt + "'");
      if (chosen && *chosen != *by_flag) throw ParseError("--workflow disagrees with the subcommand");
      chosen = by_flag;
    }
    if (!chosen) throw ParseError("choose exactly one workflow");
    cfg.workflow = *chosen;
    cfg.mc.order = random_order ? SweepOrder::random : SweepOrder::sequential;
    if (cfg.workflow == Workflow::sweep || cfg.workflow == Workflow::cross) cfg.grid = Grid::parse(grid_text);
    if (cfg.workers < 1) throw ParseError("--workers must be >= 1");
    cfg.mc.validate();
    cfg.adaptive.inner = cfg.mc;
    cfg.adaptive.validate();
  } catch (const ParseError& e) {
    err << "nonstoq: " << e.what() << "\n";
    return 2;
  } catch (const ArgumentError& e) {
    err << "nonstoq: " << e.what() << "\n";
    return 2;
  }

  try {
    const auto result = execute(cfg);
    for (const auto& [path, text] : result.files) {
      if (path == "-") out << text;
      else write_file_atomic(path, text);
    }
    if (!cfg.out_path.empty())
      for (const auto& s : result.summaries) out << s << "\n";
    for (const auto& f : result.failures) err << "nonstoq: " << f << "\n";
    return result.failures.empty() ? 0 : 3;
  } catch (const ParseError& e) {
    err << "nonstoq: " << e.what() << "\n";
    return 2;
  } catch (const IoError& e) {
    err << "nonstoq: " << e.what() << "\n";
    return 4;
  } catch (const ArgumentError& e) {
    err << "nonstoq: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    err << "nonstoq: " << e.what() << "\n";
    return 3;
  }
}

inline int run_cli(int argc, char** argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  return run_cli(std::vector<std::string>(argv + 1, argv + argc), out, err);
}

}  // namespace nonstoq

#endif  // NONSTOQ_CLI_HPP
