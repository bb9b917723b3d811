#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <ostream>

#include "vertalign/cli.hpp"
#include "vertalign/io.hpp"
#include "vertalign/model.hpp"
#include "vertalign/oracle.hpp"
#include "vertalign/solver.hpp"
#include "vertalign/synth.hpp"

namespace vertalign {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Inputs {
  std::string model = "cuva";
  std::string network;
  std::string profile;
  std::string sections;
  int slabs = 10;
  std::string fit = "auto";
  double time_limit = 600.0;
  long seed = 0;
};

void add_inputs(CLI::App* cmd, Inputs& in, bool with_model) {
  if (with_model) cmd->add_option("--model", in.model, "uva or cuva")->check(CLI::IsMember({"uva", "cuva"}));
  cmd->add_option("--network", in.network, "network JSON document")->required();
  cmd->add_option("--profile", in.profile, "ground profile CSV");
  cmd->add_option("--sections", in.sections, "cross-section CSV")->required();
  cmd->add_option("--slabs", in.slabs, "slabs per side (uva)")->check(CLI::PositiveNumber);
  cmd->add_option("--fit", in.fit, "volume fit: linear, quadratic or auto")
      ->check(CLI::IsMember({"linear", "quadratic", "auto"}));
}

FitMode fit_mode(const std::string& s) {
  if (s == "linear") return FitMode::kLinear;
  if (s == "quadratic") return FitMode::kQuadratic;
  return FitMode::kAuto;
}

struct Loaded {
  RoadNetwork network;
  CrossSectionSet tables;
};

Loaded load_inputs(const Inputs& in) {
  Loaded l;
  GroundProfile profile;
  if (!in.profile.empty()) profile = load_profile(in.profile);
  l.network = load_network(in.network, in.profile.empty() ? nullptr : &profile);
  l.tables = load_cross_sections(in.sections, &l.network);
  return l;
}

ModelInstance build(const Inputs& in, const Loaded& l) {
  const CapSet caps = volume_caps(l.network, l.tables);
  if (in.model == "uva") return build_uva(l.network, make_slabs(l.network, l.tables, in.slabs, in.slabs), caps);
  return build_cuva(l.network, fit_volume_models(l.network, l.tables, fit_mode(in.fit)), caps);
}

int exit_for(SolveStatus s) {
  switch (s) {
    case SolveStatus::kOptimal: return kExitOk;
    case SolveStatus::kInfeasible:
    case SolveStatus::kUnbounded: return kExitInfeasible;
    case SolveStatus::kLimitHit: return kExitLimit;
  }
  return kExitLimit;
}

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void ensure_dir(const std::string& dir) {
  if (dir.empty()) throw UsageError("--out is required");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir + ": " + ec.message());
}

int cmd_fit(const Inputs& in, const std::string& out_dir, std::ostream& out) {
  const Loaded l = load_inputs(in);
  const FitSet fits = fit_volume_models(l.network, l.tables, fit_mode(in.fit));
  std::string csv = "road_id,section,material,side,kind,chi1,chi2,chi3,r_squared\n";
  int quadratic = 0, total = 0;
  double r2_sum = 0.0;
  for (const auto& [key, f] : fits) {
    for (const FittedVolumeModel* m : {&f.cut, &f.fill}) {
      const auto q = m->quadratic_form();
      csv += std::to_string(key.road + 1) + "," + std::to_string(key.section + 1) + "," +
             std::to_string(key.material + 1) + "," + side_name(m->side) + "," + fit_kind_name(m->kind) + "," +
             fmt::format("{:.17g},{:.17g},{:.17g},{:.17g}\n", q[0], q[1], q[2], m->r_squared);
      quadratic += m->kind == FitKind::kQuadratic;
      r2_sum += m->r_squared;
      ++total;
    }
  }
  if (!out_dir.empty()) {
    ensure_dir(out_dir);
    write_text(fs::path(out_dir) / "fits.csv", csv);
  } else {
    out << csv;
  }
  out << fmt::format("fitted {} sides: {} quadratic, {} linear, mean R^2 {:.6f}\n", total, quadratic,
                     total - quadratic, total ? r2_sum / total : 0.0);
  const ErrorMetrics em = area_error_metrics(l.tables, [&](const SectionKey& k, Side side, double u) {
    const SideFits& f = fits.at(k);
    const double len = l.network.roads[k.road].sections[k.section].length;
    return (side == Side::kCut ? f.cut : f.fill).evaluate(u) / len;
  });
  out << fmt::format("area MAPE cut {:.4f}% fill {:.4f}%, RMSE cut {:.4f} fill {:.4f}\n", em.mape_cut,
                     em.mape_fill, em.rmse_cut, em.rmse_fill);
  return kExitOk;
}

int cmd_build(const Inputs& in, std::ostream& out) {
  const Loaded l = load_inputs(in);
  const ModelInstance inst = build(in, l);
  const InstanceCounts c = count_instance(inst);
  out << "model        " << model_kind_name(inst.kind) << "\n";
  out << "variables    " << c.variables << " (" << c.integers << " binary)\n";
  out << "rows         " << c.linear_rows << " linear, " << c.quadratic_rows << " quadratic\n";
  for (const auto& [fam, n] : c.families) out << "  " << fam << ": " << n << "\n";
  return kExitOk;
}

int cmd_solve(const Inputs& in, const std::string& out_dir, bool svg, std::ostream& out) {
  ensure_dir(out_dir);
  const auto t0 = Clock::now();
  const Loaded l = load_inputs(in);
  const ModelInstance inst = build(in, l);
  const double build_seconds = std::chrono::duration<double>(Clock::now() - t0).count();

  SolverOptions opt;
  opt.time_limit = in.time_limit;
  const Solution sol = solve_instance(inst, opt);

  RunReport rep = make_report(sol, inst);
  rep.inputs = {{"network", in.network},
                {"profile", in.profile},
                {"sections", in.sections},
                {"model", in.model},
                {"slabs", std::to_string(in.slabs)},
                {"fit", in.fit}};
  rep.seed = in.seed;
  rep.build_seconds = build_seconds;
  rep.timestamp = utc_now();
  const fs::path dir(out_dir);
  write_report(rep, dir / "report.json");
  write_solution(sol, inst, dir / "solution.json");
  if (svg && sol.has_point()) write_profile_svg(l.network, inst.catalog, sol.values, dir / "profile.svg");
  out << report_summary(rep);
  return exit_for(sol.status);
}

int cmd_validate(const Inputs& in, const std::string& solution, double tol, std::ostream& out) {
  const Loaded l = load_inputs(in);
  const ModelInstance inst = build(in, l);
  const std::vector<double> x = load_solution(solution, inst);
  const ResidualReport rep = validate_solution(inst, x, tol);
  for (const auto& [fam, v] : rep.family_max) out << fmt::format("{:<24} {:.3e}\n", fam, v);
  for (std::size_t m = 0; m < rep.conservation.size(); ++m) {
    out << fmt::format("conservation material {} {:.3e}\n", m + 1, rep.conservation[m]);
  }
  for (const auto& v : rep.violations) out << "violation: " << v << "\n";
  out << (rep.ok() ? "ok\n" : "FAILED\n");
  return rep.ok() ? kExitOk : kExitInfeasible;
}

int cmd_export(const Inputs& in, const std::string& target, std::ostream& out) {
  if (target.empty()) throw UsageError("--out is required");
  const Loaded l = load_inputs(in);
  const ModelInstance inst = build(in, l);
  fs::path path(target);
  if (path.extension() != ".mps") {
    ensure_dir(target);
    path /= in.model + ".mps";
  }
  export_mps(inst, path.string());
  out << "wrote " << path.string() << "\n";
  return kExitOk;
}

int cmd_compare(const Inputs& in, const std::string& models, int runs, const std::string& out_dir,
                std::ostream& out) {
  const Loaded l = load_inputs(in);
  std::vector<Variant> variants;
  std::size_t pos = 0;
  while (pos <= models.size()) {
    const std::size_t comma = models.find(',', pos);
    const std::string name = models.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    if (!name.empty()) {
      try {
        variants.push_back(parse_variant(name));
      } catch (const OracleError& e) {
        throw UsageError(e.what());
      }
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  CompareOptions opt;
  opt.runs = runs;
  opt.slabs = in.slabs;
  opt.fit = fit_mode(in.fit);
  opt.solver.time_limit = in.time_limit;
  const ComparisonTable table = compare_models(l.network, l.tables, variants, opt);
  const std::string csv = table.to_csv();
  if (!out_dir.empty()) {
    ensure_dir(out_dir);
    write_text(fs::path(out_dir) / "comparison.csv", csv);
  }
  out << csv;
  return kExitOk;
}

int cmd_gen(SynthSpec spec, const std::string& terrain, const std::string& shape, const std::string& out_dir,
            std::ostream& out) {
  ensure_dir(out_dir);
  try {
    spec.terrain = parse_terrain(terrain);
    spec.shape = parse_shape(shape);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const SynthCase c = generate(spec);
  const fs::path dir(out_dir);
  write_network(c.network, dir / "network.json");
  write_profile(c.profile, dir / "profile.csv");
  write_cross_sections(c.tables, dir / "sections.csv");
  int stations = 0;
  for (const Road& r : c.network.roads) stations += r.section_count();
  out << fmt::format("generated {} roads, {} stations, {} intersections in {}\n", c.network.roads.size(),
                     stations, c.network.intersections.size(), out_dir);
  return kExitOk;
}

}  // namespace

void configure_logging() {
  static bool done = false;
  if (!done) {
    spdlog::set_default_logger(spdlog::stderr_color_mt("vertalign"));
    done = true;
  }
  spdlog::set_level(spdlog::level::warn);
  if (const char* env = std::getenv("VERTALIGN_LOG")) {
    spdlog::set_level(spdlog::level::from_str(env));
  }
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Road vertical alignment and earthwork optimizer", "vertalign"};
  app.require_subcommand(1);

  Inputs in;
  std::string out_dir, solution, models = "uva,cuva";
  bool svg = false;
  int runs = 5;
  double tol = 1e-6;
  SynthSpec spec;
  std::string terrain = "sinusoidal", shape = "trapezoid";

  CLI::App* fit = app.add_subcommand("fit", "fit volume models to cross-section tables");
  add_inputs(fit, in, false);
  fit->add_option("--out", out_dir, "directory for fits.csv");

  CLI::App* bld = app.add_subcommand("build", "build an instance and print its size");
  add_inputs(bld, in, true);

  CLI::App* solve = app.add_subcommand("solve", "build and solve, writing report and solution");
  add_inputs(solve, in, true);
  solve->add_option("--out", out_dir, "output directory")->required();
  solve->add_option("--time-limit", in.time_limit, "seconds")->check(CLI::PositiveNumber);
  solve->add_option("--seed", in.seed, "run seed recorded in the report");
  solve->add_flag("--svg", svg, "write profile.svg");

  CLI::App* val = app.add_subcommand("validate", "check a solution file against the instance");
  add_inputs(val, in, true);
  val->add_option("--solution", solution, "solution JSON")->required();
  val->add_option("--tolerance", tol, "residual tolerance");

  CLI::App* exp = app.add_subcommand("export", "write the instance as MPS");
  add_inputs(exp, in, true);
  exp->add_option("--out", out_dir, "MPS file or directory")->required();

  CLI::App* cmp = app.add_subcommand("compare", "time model variants against each other");
  add_inputs(cmp, in, false);
  cmp->add_option("--models", models, "comma-separated variants: uva, cuva, angle");
  cmp->add_option("--runs", runs, "runs per variant")->check(CLI::PositiveNumber);
  cmp->add_option("--time-limit", in.time_limit, "seconds per solve")->check(CLI::PositiveNumber);
  cmp->add_option("--out", out_dir, "directory for comparison.csv");

  CLI::App* gen = app.add_subcommand("gen", "generate a synthetic network");
  gen->add_option("--out", out_dir, "output directory")->required();
  gen->add_option("--seed", spec.seed, "random seed");
  gen->add_option("--roads", spec.roads)->check(CLI::PositiveNumber);
  gen->add_option("--intersections", spec.intersections)->check(CLI::NonNegativeNumber);
  gen->add_option("--segments", spec.segments_per_road)->check(CLI::PositiveNumber);
  gen->add_option("--sections-per-segment", spec.sections_per_segment)->check(CLI::PositiveNumber);
  gen->add_option("--segment-length", spec.segment_length)->check(CLI::PositiveNumber);
  gen->add_option("--materials", spec.materials)->check(CLI::PositiveNumber);
  gen->add_option("--hauls", spec.haul_types)->check(CLI::PositiveNumber);
  gen->add_option("--pits", spec.pits)->check(CLI::NonNegativeNumber);
  gen->add_option("--terrain", terrain, "flat, sinusoidal, ramp or noisy");
  gen->add_option("--shape", shape, "rectangular, trapezoid, noisy-trapezoid, concave or irregular");
  gen->add_option("--amplitude", spec.amplitude);
  gen->add_option("--offset-limit", spec.offset_limit)->check(CLI::PositiveNumber);
  gen->add_option("--grade", spec.grade)->check(CLI::PositiveNumber);
  gen->add_option("--samples", spec.samples_per_side)->check(CLI::PositiveNumber);

  std::vector<const char*> argv{"vertalign"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n";
    const CLI::App* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
    err << sub->help();
    return kExitUsage;
  }

  try {
    if (fit->parsed()) return cmd_fit(in, out_dir, out);
    if (bld->parsed()) return cmd_build(in, out);
    if (solve->parsed()) return cmd_solve(in, out_dir, svg, out);
    if (val->parsed()) return cmd_validate(in, solution, tol, out);
    if (exp->parsed()) return cmd_export(in, out_dir, out);
    if (cmp->parsed()) return cmd_compare(in, models, runs, out_dir, out);
    if (gen->parsed()) return cmd_gen(spec, terrain, shape, out_dir, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace vertalign
