#pragma once

// Viewport-adaptive rate adaptation for tiled cubemap 360 video: tile
// geometry and priorities, the sigma-parameterized quality optimizer, per
// tile SI/TI analysis, quality-ladder fitting, a storage model, and a
// chunk-level session simulator.

#include "cubetile/adaptation.hpp"
#include "cubetile/complexity.hpp"
#include "cubetile/csv.hpp"
#include "cubetile/error.hpp"
#include "cubetile/geometry.hpp"
#include "cubetile/rd_model.hpp"
#include "cubetile/session.hpp"
#include "cubetile/storage.hpp"
