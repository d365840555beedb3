#pragma once

#include "popeq/binary.hpp"
#include "popeq/error.hpp"
#include "popeq/harness/csv.hpp"
#include "popeq/harness/scenario.hpp"
#include "popeq/harness/summary.hpp"
#include "popeq/multivariate.hpp"
#include "popeq/normal.hpp"
#include "popeq/numeric/quadrature.hpp"
#include "popeq/numeric/random.hpp"
#include "popeq/numeric/special.hpp"
#include "popeq/operating.hpp"
#include "popeq/plot/svg.hpp"
#include "popeq/report.hpp"
#include "popeq/version.hpp"
