#pragma once

#include "windsim/error.hpp"
#include "windsim/time.hpp"
#include "windsim/series.hpp"
#include "windsim/stats.hpp"
#include "windsim/grid.hpp"
#include "windsim/vertical.hpp"
#include "windsim/turbine.hpp"
#include "windsim/fleet.hpp"
#include "windsim/biascorr.hpp"
#include "windsim/validate.hpp"
#include "windsim/io.hpp"
#include "windsim/config.hpp"
#include "windsim/pipeline.hpp"
#include "windsim/synthetic.hpp"
