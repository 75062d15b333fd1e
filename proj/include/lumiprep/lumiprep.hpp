#pragma once

#include "lumiprep/acquisition.hpp"
#include "lumiprep/convert.hpp"
#include "lumiprep/darknet_cfg.hpp"
#include "lumiprep/dataset.hpp"
#include "lumiprep/error.hpp"
#include "lumiprep/histogram.hpp"
#include "lumiprep/raster.hpp"
#include "lumiprep/raster_io.hpp"
#include "lumiprep/rng.hpp"
#include "lumiprep/solar.hpp"
#include "lumiprep/synth.hpp"
#include "lumiprep/weights.hpp"
