#pragma once

#include "distortion_lab/audit.hpp"
#include "distortion_lab/cost_value.hpp"
#include "distortion_lab/errors.hpp"
#include "distortion_lab/generators.hpp"
#include "distortion_lab/instance.hpp"
#include "distortion_lab/io.hpp"
#include "distortion_lab/matching.hpp"
#include "distortion_lab/mechanisms.hpp"
#include "distortion_lab/metric.hpp"
#include "distortion_lab/model.hpp"
#include "distortion_lab/objectives.hpp"
#include "distortion_lab/rational.hpp"
#include "distortion_lab/rules.hpp"
#include "distortion_lab/tournament.hpp"
