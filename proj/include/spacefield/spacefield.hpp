#pragma once

#include "spacefield/errors.hpp"
#include "spacefield/geometry.hpp"
#include "spacefield/kinematics.hpp"
#include "spacefield/sport.hpp"
#include "spacefield/csv.hpp"
#include "spacefield/space_data.hpp"
#include "spacefield/game_state.hpp"
#include "spacefield/grid.hpp"
#include "spacefield/pitch_control.hpp"
#include "spacefield/obso.hpp"
#include "spacefield/crsv.hpp"
#include "spacefield/bimos.hpp"
#include "spacefield/evaluation.hpp"
#include "spacefield/report.hpp"
#include "spacefield/render.hpp"
#include "spacefield/config.hpp"
#include "spacefield/batch.hpp"
