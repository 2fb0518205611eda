#pragma once

#include "critspec/assemble.hpp"
#include "critspec/asymptotics.hpp"
#include "critspec/bessel.hpp"
#include "critspec/covering.hpp"
#include "critspec/errors.hpp"
#include "critspec/experiments.hpp"
#include "critspec/geometry.hpp"
#include "critspec/hash.hpp"
#include "critspec/io.hpp"
#include "critspec/kernels.hpp"
#include "critspec/orlicz.hpp"
#include "critspec/spectra.hpp"
