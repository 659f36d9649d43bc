#pragma once

#include <nlohmann/json_fwd.hpp>
#include <iosfwd>
#include <string>

#include "adseq/adkernel.hpp"
#include "adseq/experiments.hpp"
#include "adseq/seqspace.hpp"
#include "adseq/thresholds.hpp"

namespace adseq::io {

using json = nlohmann::json;

// Cube wire form: {"j": int, "k": [int; n]}.
json cube_to_json(const DyadicCube& q);
DyadicCube cube_from_json(const json& j);

// Coefficient files are JSON-lines: {"j":int,"k":[int;n],"re":[f;m],"im":[f;m]}.
CoeffSequence read_coeffs(std::istream& in);
CoeffSequence read_coeffs_file(const std::string& path);
void write_coeffs(std::ostream& out, const CoeffSequence& t);
void write_coeffs_file(const std::string& path, const CoeffSequence& t);

// Explicit kernel files are JSON-lines: {"q":cube,"r":cube,"re":f,"im":f}.
AdKernel read_kernel(std::istream& in);
AdKernel read_kernel_file(const std::string& path);
void write_kernel(std::ostream& out, const AdKernel& kernel);

/// Weight spec strings: `ident` | `power:d=<f>` | `dpower:d=<f,...,f>` |
/// `grid:<path>`; grid files are JSON-lines {"x":[f;n],"w":[[re,im];m x m]}.
WeightModel parse_weight_spec(const std::string& spec, int m = 1);

json norm_result_to_json(const NormResult& r);
json threshold_report_to_json(const ThresholdReport& r);
json growth_series_to_json(const GrowthSeries& s);

}  // namespace adseq::io
