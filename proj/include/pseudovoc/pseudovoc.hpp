#pragma once

// Umbrella header for the whole toolkit.

#include "pseudovoc/annotation.hpp"
#include "pseudovoc/classes.hpp"
#include "pseudovoc/dataset.hpp"
#include "pseudovoc/denoise.hpp"
#include "pseudovoc/detection.hpp"
#include "pseudovoc/error.hpp"
#include "pseudovoc/geometry.hpp"
#include "pseudovoc/manifest.hpp"
#include "pseudovoc/metrics.hpp"
#include "pseudovoc/rng.hpp"
#include "pseudovoc/simulator.hpp"
#include "pseudovoc/table.hpp"
#include "pseudovoc/version.hpp"
