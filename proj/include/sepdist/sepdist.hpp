#pragma once

#include "sepdist/config.hpp"
#include "sepdist/covariance.hpp"
#include "sepdist/errors.hpp"
#include "sepdist/experiments.hpp"
#include "sepdist/io.hpp"
#include "sepdist/network.hpp"
#include "sepdist/noise.hpp"
#include "sepdist/states.hpp"
#include "sepdist/tomography.hpp"
