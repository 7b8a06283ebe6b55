#pragma once

// JSON <-> library types for the command-line tool.

#include <string>

#include "json.hpp"
#include "phb/cartan.hpp"
#include "phb/modelmetric.hpp"
#include "phb/parabolic.hpp"

namespace phb::io {

using nlohmann::json;

// Rationals are "p/q" strings; plain JSON numbers and decimal strings are accepted on input.
Q to_q(const json& j);
json from_q(const Q& q);
QVec to_qvec(const json& j);
json from_qvec(const QVec& v);
QMat to_qmat(const json& j);
json from_qmat(const QMat& m);

RVec to_rvec(const json& j);

// Complex matrices: {"re": [[...]], "im": [[...]]} or rows of entries, each
// entry a number, a rational string or a [re, im] pair.
CMat to_cmat(const json& j);
json from_cmat(const CMat& m);
json from_cd(cd z);

RealizationSpec to_group(const json& j);
json from_group(const RealizationSpec& g);

// schema "parhiggs-v1"
ParabolicHiggsData to_parhiggs(const json& j);
json from_parhiggs(const ParabolicHiggsData& d);
PunctureData to_puncture(const json& j);
json from_puncture(const PunctureData& p);

WeightedFlag to_flag(const json& j);

MonodromyConvention to_convention(const json& j, MonodromyConvention fallback);

// FNV-1a over the canonical dump.
std::string digest(const json& j);

}  // namespace phb::io
