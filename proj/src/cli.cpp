#include "descfilt/cli.hpp"

#include "descfilt/batch_oracle.hpp"
#include "descfilt/errors.hpp"
#include "descfilt/minimax_filter.hpp"
#include "descfilt/model.hpp"
#include "descfilt/model_io.hpp"
#include "descfilt/reference_example.hpp"
#include "descfilt/regular_kalman.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <tuple>

namespace descfilt::cli {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Options {
  std::string spec;
  std::string measurements;
  std::string inputs;
  std::string generator;
  std::string out;
  std::string summary;
  std::string mode = "kalman";
  std::vector<std::string> directions;
  double rank_tol = 0.0;
};

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ParseError:
    case ErrorKind::DimensionMismatch:
    case ErrorKind::InvalidMatrix:
      return kParseError;
    case ErrorKind::InconsistentDynamics:
      return kInconsistentDynamics;
    case ErrorKind::InconsistentData:
      return kInconsistentData;
    case ErrorKind::SingularMatrix:
      return kRegularityViolation;
    default:
      return kAssertionFailure;
  }
}

Vec parse_direction(const std::string& text, Index n) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw ParseError("direction \"" + text + "\": invalid component \"" + item + "\"");
    }
    if (used != item.size()) {
      throw ParseError("direction \"" + text + "\": invalid component \"" + item + "\"");
    }
    values.push_back(v);
  }
  if (static_cast<Index>(values.size()) != n) {
    throw ParseError("direction \"" + text + "\" has " + std::to_string(values.size()) +
                     " components, model state dimension is " + std::to_string(n));
  }
  return Eigen::Map<const Vec>(values.data(), n);
}

// Writes to the named file, or to `fallback` when the path is empty.
template <typename Fn>
void emit(const std::string& path, std::ostream& fallback, Fn&& write) {
  if (path.empty()) {
    write(fallback);
    return;
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ParseError("cannot open " + path + " for writing");
  write(os);
}

InputSequences inputs_from_csv(const CsvTable& table, const DescriptorModel& model) {
  const Index steps = model.tau + 1;
  if (static_cast<Index>(table.rows.size()) < steps) {
    throw ParseError("input CSV has " + std::to_string(table.rows.size()) + " rows, need " +
                     std::to_string(steps));
  }
  InputSequences in = zero_inputs(model);
  const auto fill = [&](const char* prefix, VecSeq& seq, Index dim) {
    for (Index i = 0; i < dim; ++i) {
      const int col = table.column(prefix + std::to_string(i));
      if (col < 0) continue;
      for (Index k = 0; k < steps; ++k) {
        seq[static_cast<std::size_t>(k)](i) =
            table.rows[static_cast<std::size_t>(k)][static_cast<std::size_t>(col)];
      }
    }
  };
  fill("f", in.f, model.m);
  fill("g", in.g, model.p);
  fill("w", in.w, model.n);
  return in;
}

int cmd_simulate(const Options& o, std::ostream& out, std::ostream& err) {
  const ModelSpec spec = load_model_spec(o.spec);
  InputSequences in;
  if (!o.inputs.empty()) {
    in = inputs_from_csv(load_csv(o.inputs), spec.model);
  } else if (!o.generator.empty()) {
    in = generate_inputs(o.generator, spec.model);
  } else if (spec.inputs) {
    in = *spec.inputs;
  } else if (!spec.generator.empty()) {
    in = generate_inputs(spec.generator, spec.model);
  } else {
    in = zero_inputs(spec.model);
  }
  const Trajectory traj = simulate(spec.model, in, o.rank_tol);
  emit(o.out, out, [&](std::ostream& os) { write_trajectory_csv(os, traj); });
  const double b = budget(spec.model, in.f, in.g);
  err << "budget " << format_number(b) << (b > 1.0 ? " (exceeds 1: outside the uncertainty set)" : "")
      << '\n';
  return kOk;
}

int cmd_estimate(const Options& o, std::ostream& out, std::ostream& err) {
  const ModelSpec spec = load_model_spec(o.spec);
  const DescriptorModel& model = spec.model;
  const VecSeq ys = measurements_from_csv(load_csv(o.measurements), model.p, model.tau + 1);
  std::vector<Vec> dirs;
  for (const auto& d : o.directions) dirs.push_back(parse_direction(d, model.n));

  FilterOptions fo;
  fo.rank_tol = o.rank_tol;

  std::vector<std::string> header{"k"};
  for (Index i = 0; i < model.n; ++i) header.push_back("xhat" + std::to_string(i));
  header.push_back("beta");
  for (std::size_t j = 0; j < dirs.size(); ++j) {
    const std::string pre = "d" + std::to_string(j) + "_";
    for (const char* col : {"value", "low", "high", "error", "observable"}) header.push_back(pre + col);
  }

  std::vector<std::vector<double>> rows;
  std::optional<FilterState> state;
  bool inconsistent = false;
  EstimateReport last;
  for (Index k = 0; k <= model.tau; ++k) {
    const auto& y = ys[static_cast<std::size_t>(k)];
    state = k == 0 ? init(model, y, fo) : step(*state, model, y, fo);
    const InformationalSet set(*state, fo);
    last = set.report();
    inconsistent = inconsistent || !last.consistent;
    std::vector<double> row{static_cast<double>(k)};
    row.insert(row.end(), last.xhat.data(), last.xhat.data() + last.xhat.size());
    row.push_back(last.beta);
    for (const Vec& ell : dirs) {
      const double value = ell.dot(last.xhat);
      const bool obs = set.observable(ell);
      if (!last.consistent) {
        row.insert(row.end(), {value, kNaN, kNaN, kNaN, obs ? 1.0 : 0.0});
      } else if (!obs) {
        const double inf = kInfiniteError;
        row.insert(row.end(), {value, -inf, inf, inf, 0.0});
      } else {
        const auto [lo, hi] = set.direction_bounds(ell);
        row.insert(row.end(), {value, lo, hi, set.ell_error(ell), 1.0});
      }
    }
    rows.push_back(std::move(row));
  }
  emit(o.out, out, [&](std::ostream& os) { write_csv(os, header, rows); });

  std::ostringstream summary;
  summary << "{\n  \"tau\": " << model.tau << ",\n  \"observable_rank\": " << last.observable_rank
          << ",\n  \"noncausality_index\": " << last.noncausality_index
          << ",\n  \"beta\": " << format_number(last.beta)
          << ",\n  \"consistent\": " << (inconsistent ? "false" : "true") << "\n}\n";
  if (!o.summary.empty()) emit(o.summary, out, [&](std::ostream& os) { os << summary.str(); });
  (o.out.empty() ? err : out) << "final rank " << last.observable_rank
                              << ", index of non-causality " << last.noncausality_index
                              << ", beta " << format_number(last.beta) << ", consistent "
                              << (inconsistent ? "no" : "yes") << '\n';
  if (inconsistent) {
    err << "inconsistent data: beta < 0, the informational set is empty\n";
    return kInconsistentData;
  }
  return kOk;
}

int cmd_observability(const Options& o, std::ostream& out, std::ostream&) {
  const ModelSpec spec = load_model_spec(o.spec);
  const DescriptorModel& model = spec.model;
  FilterOptions fo;
  fo.rank_tol = o.rank_tol;
  const VecSeq zeros = zero_sequence(model.p, model.tau + 1);

  std::vector<std::vector<double>> rows;
  std::optional<FilterState> state;
  Mat basis;
  for (Index k = 0; k <= model.tau; ++k) {
    const auto& y = zeros[static_cast<std::size_t>(k)];
    state = k == 0 ? init(model, y, fo) : step(*state, model, y, fo);
    const InformationalSet set(*state, fo);
    rows.push_back({static_cast<double>(k), static_cast<double>(set.observable_rank()),
                    static_cast<double>(set.noncausality_index())});
    if (k == model.tau) basis = range_basis(set.projector(), o.rank_tol);
  }
  emit(o.out, out, [&](std::ostream& os) {
    write_csv(os, {"k", "observable_rank", "noncausality_index"}, rows);
  });
  out << "basis of observable subspace at tau=" << model.tau << " (" << basis.cols()
      << " vectors)\n";
  for (Index c = 0; c < basis.cols(); ++c) {
    for (Index i = 0; i < basis.rows(); ++i) out << (i ? "," : "") << format_number(basis(i, c));
    out << '\n';
  }
  return kOk;
}

int cmd_compare(const Options& o, std::ostream& out, std::ostream& err) {
  const ModelSpec spec = load_model_spec(o.spec);
  const DescriptorModel& model = spec.model;
  const VecSeq ys = measurements_from_csv(load_csv(o.measurements), model.p, model.tau + 1);
  FilterOptions fo;
  fo.rank_tol = o.rank_tol;

  std::vector<std::vector<double>> rows;
  std::vector<std::string> header;
  double worst = 0.0;

  if (o.mode == "kalman") {
    const auto regular = check_regularity(model, o.rank_tol);
    for (std::size_t k = 0; k < regular.size(); ++k) {
      if (!regular[k]) {
        err << "regularity violation: rank [F_" << k << "; H_" << k << "] < n = " << model.n
            << "; the Kalman recursion does not apply\n";
        return kRegularityViolation;
      }
    }
    header = {"k", "state_discrepancy", "noncausality_index"};
    FilterState fs = init(model, ys[0], fo);
    KalmanState ks = kalman_init(model, ys[0], o.rank_tol);
    for (Index k = 0; k <= model.tau; ++k) {
      if (k > 0) {
        fs = step(fs, model, ys[static_cast<std::size_t>(k)], fo);
        ks = kalman_step(ks, model, ys[static_cast<std::size_t>(k)], o.rank_tol);
      }
      const auto rep = estimate(fs, fo);
      const double d = (rep.xhat - ks.x).norm();
      worst = std::max(worst, rep.noncausality_index != 0 ? kInfiniteError : d);
      rows.push_back({static_cast<double>(k), d, static_cast<double>(rep.noncausality_index)});
    }
  } else if (o.mode == "batch") {
    header = {"k", "state_discrepancy", "beta_discrepancy"};
    FilterState fs = init(model, ys[0], fo);
    for (Index k = 0; k <= model.tau; ++k) {
      if (k > 0) fs = step(fs, model, ys[static_cast<std::size_t>(k)], fo);
      const auto rep = estimate(fs, fo);
      const VecSeq prefix_ys(ys.begin(), ys.begin() + k + 1);
      const BatchProblem pb = assemble(model.prefix(k), prefix_ys);
      const BatchSolution sol = solve(pb, o.rank_tol);
      const Vec last = sol.block(k, model.n);
      const double dx = (rep.projector * last - rep.xhat).norm();
      const double db = std::abs(rep.beta - (1.0 - sol.min_value));
      worst = std::max({worst, dx, db});
      rows.push_back({static_cast<double>(k), dx, db});
    }
  } else {
    throw ParseError("unknown mode \"" + o.mode + "\" (expected kalman or batch)");
  }
  emit(o.out, out, [&](std::ostream& os) { write_csv(os, header, rows); });
  (o.out.empty() ? err : out) << "max discrepancy " << format_number(worst) << '\n';
  return worst <= kCompareTolerance ? kOk : kAssertionFailure;
}

// Compresses a per-step integer series into "v at k=a..b" runs.
std::string describe_runs(const std::vector<Index>& values) {
  std::ostringstream os;
  std::size_t start = 0;
  for (std::size_t k = 1; k <= values.size(); ++k) {
    if (k < values.size() && values[k] == values[start]) continue;
    if (start > 0) os << ", ";
    os << values[start] << " at k=" << start;
    if (k - 1 > start) os << ".." << k - 1;
    start = k;
  }
  return os.str();
}

int cmd_reproduce(const Options& o, std::ostream& out, std::ostream& err) {
  namespace fs = std::filesystem;
  using namespace reference;
  const fs::path dir = o.out.empty() ? fs::path(".") : fs::path(o.out);
  fs::create_directories(dir);

  const DescriptorModel sim_model = oscillator_model(kSimulationHorizon);
  const InputSequences in = oscillator_inputs(kSimulationHorizon);
  const Trajectory truth = simulate(sim_model, in, o.rank_tol);
  const DescriptorModel model = sim_model.prefix(kFigureHorizon);

  FilterOptions fo;
  fo.rank_tol = o.rank_tol;
  // The direction acts on the original two-dimensional state; the augmented
  // direction is (l, 0).
  const Vec l2 = parse_direction(o.directions.empty() ? "0,1" : o.directions.front(), 2);
  Vec ell = Vec::Zero(4);
  ell.head(2) = l2;
  const Vec hidden_a{{0.0, 0.0, 1.0, 0.0}};
  const Vec hidden_b{{0.0, 0.0, 0.0, 1.0}};

  std::vector<std::vector<double>> truth_rows, estimate_rows, bound_rows;
  std::vector<Index> indices;
  double centering = 0.0;
  bool hidden_infinite = true, consistent = true, observable = true;
  FilterState state = init(model, truth.outputs[0], fo);
  for (Index k = 0; k <= kFigureHorizon; ++k) {
    if (k > 0) state = step(state, model, truth.outputs[static_cast<std::size_t>(k)], fo);
    const InformationalSet set(state, fo);
    indices.push_back(set.noncausality_index());
    consistent = consistent && set.consistent();
    if (!set.consistent()) continue;
    hidden_infinite = hidden_infinite && std::isinf(set.ell_error(hidden_a)) &&
                      std::isinf(set.ell_error(hidden_b));
    if (k == 0) continue;
    const double value = ell.dot(set.center());
    double lo = -kInfiniteError, hi = kInfiniteError;
    if (set.observable(ell)) {
      std::tie(lo, hi) = set.direction_bounds(ell);
      centering = std::max(centering, std::abs(value - 0.5 * (lo + hi)));
    } else {
      observable = false;
    }
    const double kd = static_cast<double>(k);
    truth_rows.push_back({kd, ell.dot(truth.states[static_cast<std::size_t>(k)])});
    estimate_rows.push_back({kd, value});
    bound_rows.push_back({kd, lo, hi});
  }
  const auto write = [&dir, &out](const char* name, const std::vector<std::string>& header,
                                  const std::vector<std::vector<double>>& rows) {
    emit((dir / name).string(), out, [&](std::ostream& os) { write_csv(os, header, rows); });
  };
  write("true.csv", {"k", "true_value"}, truth_rows);
  write("estimate.csv", {"k", "estimate"}, estimate_rows);
  write("bounds.csv", {"k", "low", "high"}, bound_rows);

  out << "note: R_0 = 0 is not positive definite; substituted R_0 = " << format_number(kR0Substitute)
      << '\n';
  out << "budget of generating inputs (k=0.." << kSimulationHorizon
      << "): " << format_number(budget(sim_model, in.f, in.g)) << '\n';
  out << "index of non-causality: " << describe_runs(indices) << '\n';
  out << "directions (0,0,1,0) and (0,0,0,1) error: " << (hidden_infinite ? "inf" : "finite")
      << '\n';
  out << "direction (" << format_number(l2(0)) << "," << format_number(l2(1)) << ",0,0): "
      << (observable ? "observable at k=1.." + std::to_string(kFigureHorizon)
                     : std::string("not observable, bounds are infinite"))
      << '\n';
  out << "centering residual: " << (observable ? format_number(centering) : "not evaluable")
      << '\n';
  out << "wrote " << (dir / "true.csv").string() << ", " << (dir / "estimate.csv").string()
      << ", " << (dir / "bounds.csv").string() << '\n';

  if (!consistent) {
    err << "inconsistent data: beta < 0 during the run\n";
    return kAssertionFailure;
  }
  if (!observable || centering > 1e-12) {
    err << "centering assertion failed: the bounds for the requested direction are not finite "
           "and centered at every step\n";
    return kAssertionFailure;
  }
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Minimax state estimation for linear descriptor systems", "descfilt"};
  app.require_subcommand(1);
  Options o;

  const auto add_rank_tol = [&o](CLI::App* sub) {
    sub->add_option("--rank-tol", o.rank_tol,
                    "relative SVD cutoff for every rank decision (0 = eps*dim*sigma_max)")
        ->check(CLI::NonNegativeNumber);
  };

  auto* sim = app.add_subcommand("simulate", "simulate a model and write trajectory + measurements");
  sim->add_option("--spec", o.spec, "model spec JSON")->required();
  sim->add_option("--inputs", o.inputs, "CSV with columns f*, g*, w* (missing columns are zero)");
  sim->add_option("--generator", o.generator, "built-in input generator (zero, oscillator)");
  sim->add_option("--out", o.out, "output CSV (default stdout)");
  add_rank_tol(sim);

  auto* est = app.add_subcommand("estimate", "run the minimax filter over a measurement file");
  est->add_option("--spec", o.spec, "model spec JSON")->required();
  est->add_option("--measurements", o.measurements, "measurement CSV")->required();
  est->add_option("--direction", o.directions, "direction components v1,v2,... (repeatable)")
      ->allow_extra_args(false);
  est->add_option("--out", o.out, "output CSV (default stdout)");
  est->add_option("--summary", o.summary, "write the run summary as JSON");
  add_rank_tol(est);

  auto* obs = app.add_subcommand("observability", "report observable rank and non-causality index");
  obs->add_option("--spec", o.spec, "model spec JSON")->required();
  obs->add_option("--out", o.out, "per-step CSV (default stdout)");
  add_rank_tol(obs);

  auto* cmp = app.add_subcommand("compare", "cross-check the filter against the Kalman recursion or the batch oracle");
  cmp->add_option("--spec", o.spec, "model spec JSON")->required();
  cmp->add_option("--measurements", o.measurements, "measurement CSV")->required();
  cmp->add_option("--mode", o.mode, "kalman or batch")->check(CLI::IsMember({"kalman", "batch"}));
  cmp->add_option("--out", o.out, "per-step discrepancy CSV (default stdout)");
  add_rank_tol(cmp);

  auto* rep = app.add_subcommand("reproduce-example", "emit curve data for the built-in oscillator example");
  rep->add_option("--out", o.out, "output directory")->required();
  rep->add_option("--direction", o.directions, "direction l1,l2 on the original state (default 0,1)")
      ->allow_extra_args(false);
  add_rank_tol(rep);

  std::vector<std::string> reversed(args.begin() + (args.empty() ? 0 : 1), args.end());
  std::reverse(reversed.begin(), reversed.end());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kParseError;
  }

  try {
    if (app.got_subcommand(sim)) return cmd_simulate(o, out, err);
    if (app.got_subcommand(est)) return cmd_estimate(o, out, err);
    if (app.got_subcommand(obs)) return cmd_observability(o, out, err);
    if (app.got_subcommand(cmp)) return cmd_compare(o, out, err);
    if (app.got_subcommand(rep)) return cmd_reproduce(o, out, err);
  } catch (const Error& e) {
    err << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kAssertionFailure;
  }
  return kParseError;
}

}  // namespace descfilt::cli
