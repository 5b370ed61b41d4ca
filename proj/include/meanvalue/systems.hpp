#pragma once

#include <map>
#include <string>
#include <vector>

#include "meanvalue/control.hpp"

namespace meanvalue {

/// Builds a builtin system by id. Known ids: rotation, rotation-controlled,
/// stable-point, drift-indicator, relax-to-one, bang-cost, expanding.
/// bang-cost accepts parameters "K" (penalty below zero, default 10) and
/// "regularized" (nonzero replaces the discontinuous field by f(y,+1)=y on
/// [0,1], numeric integration only).
ControlSystem make_system(const std::string& id, const std::map<std::string, double>& params = {});

const std::vector<std::string>& builtin_system_ids();

}  // namespace meanvalue
