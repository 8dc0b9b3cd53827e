#pragma once

// Umbrella for the core library. serialize.hpp and experiment.hpp are left
// out on purpose: they use the vendored single-header json library, so they
// are included explicitly by code that has vendor/ on its include path.

#include "jlrobust/combination.hpp"
#include "jlrobust/dataset.hpp"
#include "jlrobust/geometry.hpp"
#include "jlrobust/hull.hpp"
#include "jlrobust/kcenter.hpp"
#include "jlrobust/oracles.hpp"
#include "jlrobust/projection.hpp"
#include "jlrobust/random.hpp"
#include "jlrobust/svm.hpp"
