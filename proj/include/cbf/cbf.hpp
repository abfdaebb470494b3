#pragma once
// umbrella header

#include "cbf/attractor.hpp"
#include "cbf/brownian.hpp"
#include "cbf/checkpoint.hpp"
#include "cbf/config.hpp"
#include "cbf/diagnostics.hpp"
#include "cbf/experiments.hpp"
#include "cbf/field.hpp"
#include "cbf/forcing.hpp"
#include "cbf/grid.hpp"
#include "cbf/initial_data.hpp"
#include "cbf/integrators.hpp"
#include "cbf/lagrangian.hpp"
#include "cbf/manifest.hpp"
#include "cbf/operators.hpp"
#include "cbf/params.hpp"
#include "cbf/spectral_ops.hpp"
#include "cbf/time_grid.hpp"
#include "cbf/trajectory.hpp"
