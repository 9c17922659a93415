#pragma once

#include "lamsmooth/catalog.hpp"
#include "lamsmooth/config.hpp"
#include "lamsmooth/cutoff.hpp"
#include "lamsmooth/domain.hpp"
#include "lamsmooth/errors.hpp"
#include "lamsmooth/families.hpp"
#include "lamsmooth/harness.hpp"
#include "lamsmooth/log_lipschitz.hpp"
#include "lamsmooth/ode.hpp"
#include "lamsmooth/projection.hpp"
#include "lamsmooth/report.hpp"
#include "lamsmooth/sampled_field.hpp"
#include "lamsmooth/smoothing_r2.hpp"
#include "lamsmooth/smoothing_r3_curves.hpp"
#include "lamsmooth/smoothing_r3_surfaces.hpp"
#include "lamsmooth/acceptance.hpp"
