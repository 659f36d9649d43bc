#include "adseq/io.hpp"

#include <nlohmann/json.hpp>
#include <fstream>
#include <sstream>

namespace adseq::io {

json cube_to_json(const DyadicCube& q) {
  return json{{"j", q.j}, {"k", q.k}};
}

DyadicCube cube_from_json(const json& j) {
  DyadicCube q;
  q.j = j.at("j").get<int>();
  q.k = j.at("k").get<std::vector<std::int64_t>>();
  return q;
}

CoeffSequence read_coeffs(std::istream& in) {
  CoeffSequence t;
  bool first = true;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const json j = json::parse(line);
    DyadicCube q = cube_from_json(j);
    const auto re = j.at("re").get<std::vector<double>>();
    std::vector<double> im(re.size(), 0.0);
    if (j.contains("im")) im = j.at("im").get<std::vector<double>>();
    if (im.size() != re.size())
      throw std::invalid_argument("coeff line: re/im length mismatch");
    Vector v(re.size());
    for (std::size_t i = 0; i < re.size(); ++i) v(i) = {re[i], im[i]};
    if (first) {
      t.n = q.dim();
      t.m = static_cast<int>(re.size());
      first = false;
    }
    t.set(q, std::move(v));
  }
  return t;
}

CoeffSequence read_coeffs_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open coefficient file: " + path);
  return read_coeffs(in);
}

void write_coeffs(std::ostream& out, const CoeffSequence& t) {
  for (const auto& [q, v] : t.entries) {
    json j = cube_to_json(q);
    std::vector<double> re(v.size()), im(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      re[i] = v(i).real();
      im[i] = v(i).imag();
    }
    j["re"] = re;
    j["im"] = im;
    out << j.dump() << '\n';
  }
}

void write_coeffs_file(const std::string& path, const CoeffSequence& t) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot open output file: " + path);
  write_coeffs(out, t);
}

AdKernel read_kernel(std::istream& in) {
  std::map<std::pair<DyadicCube, DyadicCube>, std::complex<double>> entries;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const json j = json::parse(line);
    DyadicCube q = cube_from_json(j.at("q"));
    DyadicCube r = cube_from_json(j.at("r"));
    const double re = j.at("re").get<double>();
    const double im = j.contains("im") ? j.at("im").get<double>() : 0.0;
    entries[{std::move(q), std::move(r)}] = {re, im};
  }
  return AdKernel::explicit_table(std::move(entries));
}

AdKernel read_kernel_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open kernel file: " + path);
  return read_kernel(in);
}

void write_kernel(std::ostream& out, const AdKernel& kernel) {
  const auto* table = std::get_if<AdKernel::Explicit>(&kernel.form());
  if (!table)
    throw std::invalid_argument("write_kernel: only explicit tables are serializable");
  for (const auto& [qr, v] : table->entries) {
    json j;
    j["q"] = cube_to_json(qr.first);
    j["r"] = cube_to_json(qr.second);
    j["re"] = v.real();
    j["im"] = v.imag();
    out << j.dump() << '\n';
  }
}

namespace {

std::vector<double> parse_float_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
  return out;
}

WeightModel parse_grid_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open grid weight file: " + path);
  std::vector<GridSample> samples;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const json j = json::parse(line);
    GridSample s;
    s.x = j.at("x").get<std::vector<double>>();
    const auto& rows = j.at("w");
    const int m = static_cast<int>(rows.size());
    s.w = Matrix::Zero(m, m);
    for (int a = 0; a < m; ++a) {
      if (static_cast<int>(rows[a].size()) != m)
        throw std::invalid_argument("grid weight: non-square matrix");
      for (int b = 0; b < m; ++b) {
        const auto& cell = rows[a][b];
        s.w(a, b) = {cell.at(0).get<double>(), cell.at(1).get<double>()};
      }
    }
    samples.push_back(std::move(s));
  }
  return WeightModel::grid(std::move(samples));
}

}  // namespace

WeightModel parse_weight_spec(const std::string& spec, int m) {
  if (spec == "ident") return WeightModel::identity(m);
  if (spec.rfind("power:d=", 0) == 0)
    return WeightModel::scalar_power(std::stod(spec.substr(8)), m);
  if (spec.rfind("dpower:d=", 0) == 0)
    return WeightModel::diagonal_power(parse_float_list(spec.substr(9)));
  if (spec.rfind("grid:", 0) == 0) return parse_grid_file(spec.substr(5));
  throw std::invalid_argument("unrecognized weight spec: " + spec);
}

json norm_result_to_json(const NormResult& r) {
  json j;
  j["value"] = r.value;
  if (r.attaining) j["attaining"] = cube_to_json(*r.attaining);
  j["quad_error"] = r.quad_error;
  j["boundary_biased"] = r.boundary_biased;
  return j;
}

json threshold_report_to_json(const ThresholdReport& r) {
  json j;
  j["n"] = r.n;
  j["family"] = r.family == Family::besov ? "b" : "f";
  j["s"] = r.s;
  j["tau"] = r.tau;
  j["p"] = r.p;
  j["q"] = std::isinf(r.q) ? json("inf") : json(r.q);
  j["d"] = r.d;
  j["d_tilde"] = r.d_tilde;
  j["Delta"] = r.delta;
  j["J"] = r.j_exponent;
  j["J_tau"] = r.j_tau;
  j["regime"] = to_string(r.regime);
  j["tau_hat"] = r.tau_hat;
  j["J_tilde"] = r.j_tilde;
  j["s_tilde"] = r.s_tilde;
  j["r_tilde"] = r.r_tilde;
  json rules = json::array();
  for (const auto& rb : r.rules) {
    json one;
    one["rule"] = to_string(rb.rule);
    one["applicable"] = rb.applicable;
    if (rb.applicable) {
      one["D"] = rb.d_bound;
      one["E"] = rb.e_bound;
      one["F"] = rb.f_bound;
    }
    rules.push_back(std::move(one));
  }
  j["rules"] = std::move(rules);
  return j;
}

json growth_series_to_json(const GrowthSeries& s) {
  json j;
  json pts = json::array();
  for (const auto& p : s.points)
    pts.push_back({{"N", p.N},
                   {"norm_in", p.norm_in},
                   {"norm_out", p.norm_out},
                   {"ratio", p.ratio}});
  j["points"] = std::move(pts);
  j["model"] = to_string(s.model);
  j["log_fit"] = {{"c0", s.log_c0}, {"c1", s.log_c1}, {"r2", s.log_r2}};
  j["power_fit"] = {{"c", s.pow_c}, {"alpha", s.pow_alpha}, {"r2", s.pow_r2}};
  j["last_step_change"] = s.last_step_change;
  return j;
}

}  // namespace adseq::io
