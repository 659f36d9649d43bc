#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <fstream>
#include <iostream>
#include <random>

#include "adseq/adkernel.hpp"
#include "adseq/experiments.hpp"
#include "adseq/io.hpp"
#include "adseq/seqspace.hpp"
#include "adseq/thresholds.hpp"
#include "adseq/util.hpp"

using nlohmann::json;
using namespace adseq;

namespace {

struct WindowFlags {
  int jmin = 0, jmax = 0, n = 1;
  std::int64_t K = 1;
  Window window() const { return Window{jmin, jmax, K, n}; }
};

void add_window_flags(CLI::App* cmd, WindowFlags& wf) {
  cmd->add_option("--jmin", wf.jmin, "coarsest level");
  cmd->add_option("--jmax", wf.jmax, "finest level");
  cmd->add_option("--K", wf.K, "spatial half-width in level-jmin cubes");
  cmd->add_option("--n", wf.n, "ambient dimension");
}

double parse_q(const std::string& s) {
  if (s == "inf" || s == "infinity") return std::numeric_limits<double>::infinity();
  return std::stod(s);
}

Family parse_space_family(const std::string& s) {
  if (s == "b" || s == "besov") return Family::besov;
  if (s == "f" || s == "triebel") return Family::triebel;
  throw std::invalid_argument("family must be b or f");
}

std::vector<long> parse_ladder(const std::string& s) {
  std::vector<long> out;
  if (s.find(':') != std::string::npos) {
    const auto pos = s.find(':');
    long lo = std::stol(s.substr(0, pos));
    long hi = std::stol(s.substr(pos + 1));
    for (long v = lo; v <= hi; v *= 2) out.push_back(v);
  } else {
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stol(item));
  }
  return out;
}

AdKernel parse_kernel_spec(const std::string& spec, const TruncationPolicy& trunc) {
  if (spec.rfind("def:", 0) == 0) {
    AdParams p;
    double amp = 1.0;
    std::stringstream ss(spec.substr(4));
    std::string item;
    while (std::getline(ss, item, ',')) {
      const auto eq = item.find('=');
      if (eq == std::string::npos)
        throw std::invalid_argument("kernel spec item needs key=value: " + item);
      const std::string key = item.substr(0, eq);
      const double value = std::stod(item.substr(eq + 1));
      if (key == "D") p.D = value;
      else if (key == "E") p.E = value;
      else if (key == "F") p.F = value;
      else if (key == "amp") amp = value;
      else throw std::invalid_argument("unknown kernel key: " + key);
    }
    return AdKernel::analytic(p, amp, trunc);
  }
  if (spec.rfind("diag:", 0) == 0)
    return AdKernel::diagonal(std::stod(spec.substr(5)), trunc);
  if (spec.rfind("file:", 0) == 0) {
    AdKernel k = io::read_kernel_file(spec.substr(5));
    k.trunc = trunc;
    return k;
  }
  throw std::invalid_argument("unrecognized kernel spec: " + spec);
}

void emit(const json& j, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << j.dump(2) << std::endl;
  } else {
    std::ofstream out(out_path);
    if (!out) throw std::invalid_argument("cannot open output: " + out_path);
    out << j.dump(2) << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"matrix-weighted dyadic sequence spaces and almost-diagonal operators"};
  app.require_subcommand(1);

  int threads = 0;
  unsigned seed = 12345;
  app.add_option("--threads", threads, "worker thread cap (0 = all cores)");
  app.add_option("--seed", seed, "seed for all randomized reports");

  std::string out_path;
  app.add_option("--out", out_path, "output path (default stdout)");

  // ---- classify ----
  auto* classify_cmd = app.add_subcommand("classify", "threshold report for a space");
  struct {
    int n = 1;
    std::string family = "f", q = "2";
    double s = 0, tau = 0, p = 2, d = 0, dtilde = 0;
  } cls;
  classify_cmd->add_option("--n", cls.n);
  classify_cmd->add_option("--family", cls.family);
  classify_cmd->add_option("--s", cls.s);
  classify_cmd->add_option("--tau", cls.tau);
  classify_cmd->add_option("--p", cls.p);
  classify_cmd->add_option("--q", cls.q);
  classify_cmd->add_option("--d", cls.d);
  classify_cmd->add_option("--dtilde", cls.dtilde);

  // ---- norm ----
  auto* norm_cmd = app.add_subcommand("norm", "quasi-norm of a coefficient file");
  struct {
    std::string space = "b", q = "1", mode = "none", weight = "ident",
                reducing = "ident", in;
    double s = 0, tau = 0, p = 1, reducing_d = 0;
    int m = 1, quad_points = 0, quad_depth = 0;
  } nr;
  WindowFlags nr_win;
  norm_cmd->add_option("--space", nr.space, "b or f");
  norm_cmd->add_option("--s", nr.s);
  norm_cmd->add_option("--tau", nr.tau);
  norm_cmd->add_option("--p", nr.p);
  norm_cmd->add_option("--q", nr.q);
  norm_cmd->add_option("--mode", nr.mode, "none | W | A");
  norm_cmd->add_option("--weight", nr.weight, "W-mode weight spec");
  norm_cmd->add_option("--reducing", nr.reducing, "A-mode family: ident | closed:d=<f>");
  norm_cmd->add_option("--m", nr.m, "target dimension");
  norm_cmd->add_option("--quad-points", nr.quad_points);
  norm_cmd->add_option("--quad-depth", nr.quad_depth);
  norm_cmd->add_option("--in", nr.in, "coefficient file (JSON-lines)")->required();
  add_window_flags(norm_cmd, nr_win);

  // ---- apply ----
  auto* apply_cmd = app.add_subcommand("apply", "apply a kernel to a coefficient file");
  struct {
    std::string kernel = "def:D=2,E=2,F=2", in, coeff_out;
    double eps_cut = 0.0;
    int band = std::numeric_limits<int>::max();
  } ap;
  WindowFlags ap_win;
  apply_cmd->add_option("--kernel", ap.kernel, "def:D=..,E=..,F=..[,amp=..] | diag:<c> | file:<path>");
  apply_cmd->add_option("--in", ap.in)->required();
  apply_cmd->add_option("--coeff-out", ap.coeff_out, "output coefficient file")->required();
  apply_cmd->add_option("--eps-cut", ap.eps_cut);
  apply_cmd->add_option("--band", ap.band, "level band half-width");
  add_window_flags(apply_cmd, ap_win);

  // ---- ap-estimate ----
  auto* ap_est_cmd = app.add_subcommand("ap-estimate", "A_p constant and dimension fit");
  struct {
    std::string weight = "power:d=0.5";
    double p = 2;
    int imax = 4, m = 1;
  } ae;
  WindowFlags ae_win;
  ap_est_cmd->add_option("--weight", ae.weight);
  ap_est_cmd->add_option("--p", ae.p);
  ap_est_cmd->add_option("--imax", ae.imax);
  ap_est_cmd->add_option("--m", ae.m);
  add_window_flags(ap_est_cmd, ae_win);

  // ---- verify-reducing ----
  auto* vr_cmd = app.add_subcommand("verify-reducing",
                                    "closed form vs quadrature reducing operators");
  struct {
    double d = 0.5, p = 2;
    int quad_points = 4;
  } vr;
  WindowFlags vr_win;
  vr_cmd->add_option("--d", vr.d);
  vr_cmd->add_option("--p", vr.p);
  vr_cmd->add_option("--quad-points", vr.quad_points);
  add_window_flags(vr_cmd, vr_win);

  // ---- lemma22 ----
  auto* l22_cmd = app.add_subcommand("lemma22", "fitted constant of the reducing-operator estimate");
  struct {
    double weight_d = 0.5, p = 1, d = 0.5, dtilde = 0;
    long pairs = 10000;
  } l22;
  WindowFlags l22_win;
  l22_cmd->add_option("--weight-d", l22.weight_d, "power-weight exponent");
  l22_cmd->add_option("--p", l22.p);
  l22_cmd->add_option("--d", l22.d, "A_p-dimension");
  l22_cmd->add_option("--dtilde", l22.dtilde);
  l22_cmd->add_option("--pairs", l22.pairs);
  add_window_flags(l22_cmd, l22_win);

  // ---- sharpness ----
  auto* sharp_cmd = app.add_subcommand("sharpness", "counterexample growth ladder (CSV)");
  struct {
    std::string experiment = "tN_level0", ladder = "16:1024", q = "1",
                space = "b";
    double D = 1, E = 2, F = 2, amp = 1, p = 1, s = 0, tau = 0, weight_d = 0;
    int n = 1, m = 1;
  } sh;
  sharp_cmd->add_option("--experiment", sh.experiment)->required();
  sharp_cmd->add_option("--D", sh.D);
  sharp_cmd->add_option("--E", sh.E);
  sharp_cmd->add_option("--F", sh.F);
  sharp_cmd->add_option("--amp", sh.amp);
  sharp_cmd->add_option("--space", sh.space);
  sharp_cmd->add_option("--p", sh.p);
  sharp_cmd->add_option("--q", sh.q);
  sharp_cmd->add_option("--s", sh.s);
  sharp_cmd->add_option("--tau", sh.tau);
  sharp_cmd->add_option("--n", sh.n);
  sharp_cmd->add_option("--m", sh.m);
  sharp_cmd->add_option("--weight-d", sh.weight_d);
  sharp_cmd->add_option("--ladder", sh.ladder, "a:b doubling range or comma list");

  // ---- verify-ad ----
  auto* va_cmd = app.add_subcommand("verify-ad", "fitted almost-diagonality constant");
  struct {
    std::string kernel = "def:D=2,E=2,F=2";
    double D = 2, E = 2, F = 2;
    double bound = std::numeric_limits<double>::infinity();
  } va;
  WindowFlags va_win;
  va_cmd->add_option("--kernel", va.kernel);
  va_cmd->add_option("--D", va.D)->required();
  va_cmd->add_option("--E", va.E)->required();
  va_cmd->add_option("--F", va.F)->required();
  va_cmd->add_option("--bound", va.bound);
  add_window_flags(va_cmd, va_win);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }
  set_max_threads(threads);

  try {
    if (*classify_cmd) {
      const auto report =
          classify(cls.n, parse_space_family(cls.family), cls.s, cls.tau, cls.p,
                   parse_q(cls.q), cls.d, cls.dtilde);
      emit(io::threshold_report_to_json(report), out_path);
    } else if (*norm_cmd) {
      CoeffSequence t = io::read_coeffs_file(nr.in);
      if (t.entries.empty()) {
        t.n = nr_win.n;
        t.m = nr.m;
      }
      SpaceParams params{parse_space_family(nr.space), nr.s, nr.tau, nr.p,
                         parse_q(nr.q)};
      WeightModel weight = io::parse_weight_spec(nr.weight, t.m);
      if (nr.quad_points > 0) weight.quad.points = nr.quad_points;
      if (nr.quad_depth > 0) weight.quad.singular_depth = nr.quad_depth;
      ReducingFamily family = ReducingFamily::identity(t.m);
      if (nr.reducing.rfind("closed:d=", 0) == 0)
        family = ReducingFamily::closed_form_power(
            std::stod(nr.reducing.substr(9)), nr.p, t.m);
      WeightMode mode = WeightMode::unweighted();
      if (nr.mode == "W") mode = WeightMode::matrix(weight);
      else if (nr.mode == "A") mode = WeightMode::averaging(family);
      else if (nr.mode != "none") throw std::invalid_argument("mode must be none|W|A");
      emit(io::norm_result_to_json(seq_norm(t, params, mode, nr_win.window())),
           out_path);
    } else if (*apply_cmd) {
      TruncationPolicy trunc{ap.band, ap.eps_cut};
      const AdKernel kernel = parse_kernel_spec(ap.kernel, trunc);
      const CoeffSequence t = io::read_coeffs_file(ap.in);
      const auto result = apply(kernel, t, ap_win.window());
      io::write_coeffs_file(ap.coeff_out, result.out);
      json j;
      j["tail_bound"] = std::isinf(result.tail_bound)
                            ? json("inf")
                            : json(result.tail_bound);
      j["outputs"] = result.out.entries.size();
      emit(j, out_path);
    } else if (*ap_est_cmd) {
      const WeightModel weight = io::parse_weight_spec(ae.weight, ae.m);
      const Window win = ae_win.window();
      const auto est = ap_constant(weight, ae.p, win);
      const auto fit = ap_dimension_fit(weight, ae.p, win, ae.imax);
      json j;
      j["ap_constant"] = {{"value", est.value},
                          {"argmax", io::cube_to_json(est.argmax)}};
      json per_i = json::array();
      for (const auto& [i, v] : fit.per_i) per_i.push_back({{"i", i}, {"max", v}});
      j["dimension_fit"] = {{"slope", fit.slope}, {"per_i", per_i}};
      emit(j, out_path);
    } else if (*vr_cmd) {
      const Window win = vr_win.window();
      WeightModel weight = WeightModel::scalar_power(vr.d);
      weight.quad.points = vr.quad_points;
      auto interval = [&](const WeightModel& w) {
        double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
        for (const auto& q : win.enumerate()) {
          const double num = reducing_operator(w, q, vr.p).a(0, 0).real();
          const double ratio = num / reducing_power_closed_form(vr.d, vr.p, q);
          lo = std::min(lo, ratio);
          hi = std::max(hi, ratio);
        }
        return std::pair<double, double>{lo, hi};
      };
      const auto base = interval(weight);
      WeightModel doubled = weight;
      doubled.quad.points = vr.quad_points * 2;
      const auto refined = interval(doubled);
      json j;
      j["lo"] = base.first;
      j["hi"] = base.second;
      j["spread"] = base.second / base.first;
      j["lo_doubled"] = refined.first;
      j["hi_doubled"] = refined.second;
      j["spread_doubled"] = refined.second / refined.first;
      emit(j, out_path);
    } else if (*l22_cmd) {
      const Window win = l22_win.window();
      const auto fam =
          ReducingFamily::closed_form_power(l22.weight_d, l22.p, 1);
      WeightProfile prof{l22.p, l22.d, l22.dtilde, std::nullopt};
      prof.validate(win.n);
      const auto cubes = win.enumerate();
      std::mt19937 rng(seed);
      std::uniform_int_distribution<std::size_t> pick(0, cubes.size() - 1);
      std::vector<std::pair<DyadicCube, DyadicCube>> pairs;
      pairs.reserve(l22.pairs);
      for (long i = 0; i < l22.pairs; ++i)
        pairs.emplace_back(cubes[pick(rng)], cubes[pick(rng)]);
      const auto report = lemma22_check(fam, prof, pairs);
      json j;
      j["C"] = report.c;
      j["pairs"] = report.pairs;
      j["arg_q"] = io::cube_to_json(report.arg_q);
      j["arg_r"] = io::cube_to_json(report.arg_r);
      emit(j, out_path);
    } else if (*sharp_cmd) {
      ExperimentSpec spec;
      spec.family = parse_family(sh.experiment);
      spec.n = sh.n;
      spec.m = sh.m;
      spec.space = SpaceParams{parse_space_family(sh.space), sh.s, sh.tau, sh.p,
                               parse_q(sh.q)};
      if (spec.weighted() && spec.space.tau == 0.0)
        spec.space.tau = 1.0 / spec.space.p;
      spec.kernel = AdParams{sh.D, sh.E, sh.F};
      spec.amplitude = sh.amp;
      spec.weight_d = sh.weight_d;
      spec.ladder = parse_ladder(sh.ladder);
      const auto series = growth_run(spec);
      const std::string csv = growth_csv(series);
      if (out_path.empty()) {
        std::cout << csv;
      } else {
        std::ofstream out(out_path);
        if (!out) throw std::invalid_argument("cannot open output: " + out_path);
        out << csv;
      }
    } else if (*va_cmd) {
      const AdKernel kernel = parse_kernel_spec(va.kernel, {});
      const auto result =
          verify_ad(kernel, AdParams{va.D, va.E, va.F}, va_win.window(), va.bound);
      json j;
      j["C"] = result.c;
      j["passed"] = result.passed;
      if (!result.passed) {
        j["witness"] = {{"q", io::cube_to_json(result.witness_q)},
                        {"r", io::cube_to_json(result.witness_r)},
                        {"ratio", result.witness_ratio}};
      }
      emit(j, out_path);
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << std::endl;
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 1;
  }
  return 0;
}
