#pragma once

#include "rgmphd/diagnostics.hpp"
#include "rgmphd/errors.hpp"
#include "rgmphd/gaussian_mixture.hpp"
#include "rgmphd/harness.hpp"
#include "rgmphd/kalman.hpp"
#include "rgmphd/metrics.hpp"
#include "rgmphd/models.hpp"
#include "rgmphd/phd_extended.hpp"
#include "rgmphd/phd_robust.hpp"
#include "rgmphd/phd_standard.hpp"
#include "rgmphd/rng.hpp"
#include "rgmphd/scenarios.hpp"
