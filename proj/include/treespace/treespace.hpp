#pragma once

#include "treespace/error.hpp"
#include "treespace/extremal.hpp"
#include "treespace/generators.hpp"
#include "treespace/metrics.hpp"
#include "treespace/newick.hpp"
#include "treespace/rearrange.hpp"
#include "treespace/tree.hpp"
#include "treespace/verify.hpp"

namespace treespace {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace treespace
