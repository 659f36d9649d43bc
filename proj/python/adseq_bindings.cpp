#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "adseq/adkernel.hpp"
#include "adseq/experiments.hpp"
#include "adseq/seqspace.hpp"
#include "adseq/thresholds.hpp"

namespace py = pybind11;
using namespace adseq;

namespace {

DyadicCube make_cube(int j, const std::vector<std::int64_t>& k) {
  return DyadicCube(j, k);
}

CoeffSequence sequence_from_entries(
    int n, int m,
    const std::vector<std::tuple<int, std::vector<std::int64_t>,
                                 std::vector<std::complex<double>>>>& entries) {
  CoeffSequence t(n, m);
  for (const auto& [j, k, values] : entries) {
    Vector v(m);
    for (int i = 0; i < m; ++i) v(i) = values.at(i);
    t.set(DyadicCube(j, k), std::move(v));
  }
  return t;
}

std::vector<std::tuple<int, std::vector<std::int64_t>,
                       std::vector<std::complex<double>>>>
sequence_entries(const CoeffSequence& t) {
  std::vector<std::tuple<int, std::vector<std::int64_t>,
                         std::vector<std::complex<double>>>>
      out;
  for (const auto& [q, v] : t.entries) {
    std::vector<std::complex<double>> values(v.data(), v.data() + v.size());
    out.emplace_back(q.j, q.k, std::move(values));
  }
  return out;
}

py::dict report_dict(const ThresholdReport& rep) {
  py::dict d;
  d["n"] = rep.n;
  d["family"] = rep.family == Family::besov ? "b" : "f";
  d["s"] = rep.s;
  d["tau"] = rep.tau;
  d["p"] = rep.p;
  d["q"] = rep.q;
  d["d"] = rep.d;
  d["d_tilde"] = rep.d_tilde;
  d["Delta"] = rep.delta;
  d["J"] = rep.j_exponent;
  d["J_tau"] = rep.j_tau;
  d["regime"] = to_string(rep.regime);
  d["tau_hat"] = rep.tau_hat;
  d["J_tilde"] = rep.j_tilde;
  d["s_tilde"] = rep.s_tilde;
  d["r_tilde"] = rep.r_tilde;
  py::dict rules;
  for (const auto& rb : rep.rules) {
    py::dict one;
    one["applicable"] = rb.applicable;
    if (rb.applicable) {
      one["D"] = rb.d_bound;
      one["E"] = rb.e_bound;
      one["F"] = rb.f_bound;
    }
    rules[py::str(to_string(rb.rule))] = one;
  }
  d["rules"] = rules;
  return d;
}

}  // namespace

PYBIND11_MODULE(_adseq, mod) {
  mod.doc() = "matrix-weighted dyadic sequence spaces and almost-diagonal operators";

  py::class_<DyadicCube>(mod, "DyadicCube")
      .def(py::init(&make_cube), py::arg("j"), py::arg("k"))
      .def_readonly("j", &DyadicCube::j)
      .def_readonly("k", &DyadicCube::k)
      .def("edge", &DyadicCube::edge)
      .def("volume", &DyadicCube::volume)
      .def("corner", &DyadicCube::corner)
      .def("center", &DyadicCube::center)
      .def("__repr__", [](const DyadicCube& q) {
        std::string s = "DyadicCube(j=" + std::to_string(q.j) + ", k=[";
        for (std::size_t i = 0; i < q.k.size(); ++i)
          s += (i ? "," : "") + std::to_string(q.k[i]);
        return s + "])";
      });

  py::class_<Window>(mod, "Window")
      .def(py::init([](int j_min, int j_max, std::int64_t K, int n) {
             Window w{j_min, j_max, K, n};
             w.validate();
             return w;
           }),
           py::arg("j_min"), py::arg("j_max"), py::arg("K"), py::arg("n") = 1)
      .def_readonly("j_min", &Window::j_min)
      .def_readonly("j_max", &Window::j_max)
      .def_readonly("K", &Window::K)
      .def_readonly("n", &Window::n)
      .def("cube_count", &Window::cube_count)
      .def("enumerate", &Window::enumerate);

  mod.def("cube_at", [](int j, const std::vector<double>& x) {
    return cube_at(j, x);
  });
  mod.def("distance_factor", &distance_factor);
  mod.def(
      "bdef_entry",
      [](const DyadicCube& q, const DyadicCube& r, double D, double E, double F) {
        return bdef_entry(q, r, AdParams{D, E, F});
      },
      py::arg("q"), py::arg("r"), py::arg("D"), py::arg("E"), py::arg("F"));

  mod.def(
      "classify",
      [](int n, const std::string& family, double s, double tau, double p,
         double q, double d, double d_tilde) {
        const Family fam = family == "b" ? Family::besov : Family::triebel;
        return report_dict(classify(n, fam, s, tau, p, q, d, d_tilde));
      },
      py::arg("n"), py::arg("family"), py::arg("s"), py::arg("tau"),
      py::arg("p"), py::arg("q"), py::arg("d") = 0.0, py::arg("d_tilde") = 0.0);

  mod.def(
      "admissible",
      [](double D, double E, double F, int n, const std::string& family, double s,
         double tau, double p, double q, double d, double d_tilde,
         const std::string& rule_name) {
        const Family fam = family == "b" ? Family::besov : Family::triebel;
        const auto rep = classify(n, fam, s, tau, p, q, d, d_tilde);
        Rule rule = Rule::adBF2;
        if (rule_name == "adFJ") rule = Rule::adFJ;
        else if (rule_name == "adYY") rule = Rule::adYY;
        else if (rule_name == "thm77") rule = Rule::thm77;
        else if (rule_name == "adBF") rule = Rule::adBF;
        else if (rule_name == "eq173") rule = Rule::eq173;
        const auto adm = admissible(D, E, F, rep, rule);
        return py::make_tuple(adm.admissible, adm.margins);
      },
      py::arg("D"), py::arg("E"), py::arg("F"), py::arg("n"), py::arg("family"),
      py::arg("s"), py::arg("tau"), py::arg("p"), py::arg("q"),
      py::arg("d") = 0.0, py::arg("d_tilde") = 0.0, py::arg("rule") = "adBF2");

  mod.def(
      "rho_q",
      [](const std::string& weight_kind, double weight_d, const DyadicCube& q,
         double p) {
        WeightModel w = weight_kind == "ident"
                            ? WeightModel::identity(1)
                            : WeightModel::scalar_power(weight_d, 1);
        return rho_q(w, q, p, Vector::Ones(1));
      },
      py::arg("weight"), py::arg("d"), py::arg("cube"), py::arg("p"));

  mod.def("reducing_power_closed_form", &reducing_power_closed_form,
          py::arg("d"), py::arg("p"), py::arg("cube"));

  mod.def(
      "norm",
      [](int n, int m,
         const std::vector<std::tuple<int, std::vector<std::int64_t>,
                                      std::vector<std::complex<double>>>>& entries,
         const std::string& family, double s, double tau, double p, double q,
         const std::string& mode, double weight_d, int j_min, int j_max,
         std::int64_t K) {
        const CoeffSequence t = sequence_from_entries(n, m, entries);
        SpaceParams params{family == "b" ? Family::besov : Family::triebel, s,
                           tau, p, q};
        const Window win{j_min, j_max, K, n};
        if (mode == "none")
          return seq_norm(t, params, WeightMode::unweighted(), win).value;
        if (mode == "W") {
          const WeightModel w = weight_d == 0.0
                                    ? WeightModel::identity(m)
                                    : WeightModel::scalar_power(weight_d, m);
          return seq_norm(t, params, WeightMode::matrix(w), win).value;
        }
        if (mode == "A") {
          const ReducingFamily fam =
              ReducingFamily::closed_form_power(weight_d, p, m);
          return seq_norm(t, params, WeightMode::averaging(fam), win).value;
        }
        throw std::invalid_argument("mode must be none|W|A");
      },
      py::arg("n"), py::arg("m"), py::arg("entries"), py::arg("family"),
      py::arg("s"), py::arg("tau"), py::arg("p"), py::arg("q"),
      py::arg("mode") = "none", py::arg("weight_d") = 0.0, py::arg("j_min") = 0,
      py::arg("j_max") = 0, py::arg("K") = 1);

  mod.def(
      "apply_bdef",
      [](int n, int m,
         const std::vector<std::tuple<int, std::vector<std::int64_t>,
                                      std::vector<std::complex<double>>>>& entries,
         double D, double E, double F, int j_min, int j_max, std::int64_t K,
         double eps_cut) {
        const CoeffSequence t = sequence_from_entries(n, m, entries);
        TruncationPolicy trunc;
        trunc.eps_cut = eps_cut;
        const AdKernel kernel = AdKernel::analytic(AdParams{D, E, F}, 1.0, trunc);
        const Window win{j_min, j_max, K, n};
        const auto result = apply(kernel, t, win);
        return py::make_tuple(sequence_entries(result.out), result.tail_bound);
      },
      py::arg("n"), py::arg("m"), py::arg("entries"), py::arg("D"), py::arg("E"),
      py::arg("F"), py::arg("j_min"), py::arg("j_max"), py::arg("K"),
      py::arg("eps_cut") = 0.0);

  mod.def(
      "growth_run",
      [](const std::string& family_name, int n, const std::string& space,
         double s, double tau, double p, double q, double D, double E, double F,
         double weight_d, const std::vector<long>& ladder) {
        ExperimentSpec spec;
        spec.family = parse_family(family_name);
        spec.n = n;
        spec.space = SpaceParams{space == "b" ? Family::besov : Family::triebel,
                                 s, tau, p, q};
        spec.kernel = AdParams{D, E, F};
        spec.weight_d = weight_d;
        spec.ladder = ladder;
        const auto series = growth_run(spec);
        py::dict d;
        py::list pts;
        for (const auto& pt : series.points) {
          py::dict one;
          one["N"] = pt.N;
          one["norm_in"] = pt.norm_in;
          one["norm_out"] = pt.norm_out;
          one["ratio"] = pt.ratio;
          pts.append(one);
        }
        d["points"] = pts;
        d["model"] = to_string(series.model);
        d["alpha"] = series.pow_alpha;
        d["log_r2"] = series.log_r2;
        d["last_step_change"] = series.last_step_change;
        return d;
      },
      py::arg("family"), py::arg("n"), py::arg("space"), py::arg("s"),
      py::arg("tau"), py::arg("p"), py::arg("q"), py::arg("D"), py::arg("E"),
      py::arg("F"), py::arg("weight_d") = 0.0,
      py::arg("ladder") = std::vector<long>{4, 8, 16});

  mod.def(
      "series_probe",
      [](const std::string& family, double a, int n, int j, double E, double F,
         double s, double d, double p, long depth) {
        SeriesParams prm;
        prm.a = a;
        prm.n = n;
        prm.j = j;
        prm.E = E;
        prm.F = F;
        prm.s = s;
        prm.d = d;
        prm.p = p;
        const auto probe = series_probe(parse_series_family(family), prm, depth);
        py::dict out;
        out["value"] = probe.value;
        out["convergent"] = probe.convergent;
        out["tail_ratio"] = probe.tail_ratio;
        out["partial"] = probe.partial;
        return out;
      },
      py::arg("family"), py::arg("a") = 2.0, py::arg("n") = 1, py::arg("j") = 0,
      py::arg("E") = 0.0, py::arg("F") = 0.0, py::arg("s") = 0.0,
      py::arg("d") = 0.0, py::arg("p") = 1.0, py::arg("depth") = 4096);
}
