#pragma once

#include "jigsawbench/config.hpp"
#include "jigsawbench/errors.hpp"
#include "jigsawbench/geometry.hpp"
#include "jigsawbench/harness.hpp"
#include "jigsawbench/jigsaw.hpp"
#include "jigsawbench/oracles.hpp"
#include "jigsawbench/pipeline.hpp"
#include "jigsawbench/report.hpp"
#include "jigsawbench/rng.hpp"
#include "jigsawbench/sensing.hpp"
#include "jigsawbench/tasks.hpp"
#include "jigsawbench/version.hpp"
#include "jigsawbench/world.hpp"
