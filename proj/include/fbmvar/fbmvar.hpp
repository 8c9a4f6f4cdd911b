#pragma once

#include "fbmvar/errors.hpp"
#include "fbmvar/kernels.hpp"
#include "fbmvar/rng.hpp"
#include "fbmvar/sampler.hpp"
#include "fbmvar/weights.hpp"
#include "fbmvar/statistics.hpp"
#include "fbmvar/harness.hpp"
#include "fbmvar/config.hpp"
#include "fbmvar/report.hpp"
#include "fbmvar/cli.hpp"
