#pragma once

#include "gofmc/calibration.hpp"
#include "gofmc/core/concepts.hpp"
#include "gofmc/core/dataset.hpp"
#include "gofmc/core/engine.hpp"
#include "gofmc/core/enumeration.hpp"
#include "gofmc/core/error.hpp"
#include "gofmc/core/rng.hpp"
#include "gofmc/core/types.hpp"
#include "gofmc/divergences.hpp"
#include "gofmc/models/exponential.hpp"
#include "gofmc/models/poisson_glm.hpp"
#include "gofmc/models/sorted_zipf.hpp"
#include "gofmc/models/zipf.hpp"
